//! Plays an algorithm against a reward sequence and records the ledger.

use super::Bandit;
use crate::domains::ActionSet;
use crate::error::Result;
use crate::regret::{RegretLedger, RewardSequence};
use crate::rng::StreamRng;

/// Plays `horizon` days and records the played policies and rewards.
pub fn run_horizon(
    bandit: &mut dyn Bandit,
    set: &ActionSet,
    adversary: &mut dyn RewardSequence,
    horizon: u64,
    rng: &mut StreamRng,
) -> Result<RegretLedger> {
    run(bandit, set, adversary, horizon, rng, false)
}

/// Like [`run_horizon`], also recording each scale learner's policy against
/// the true rewards, interval by interval.
pub fn run_instrumented(
    bandit: &mut dyn Bandit,
    set: &ActionSet,
    adversary: &mut dyn RewardSequence,
    horizon: u64,
    rng: &mut StreamRng,
) -> Result<RegretLedger> {
    run(bandit, set, adversary, horizon, rng, true)
}

fn run(
    bandit: &mut dyn Bandit,
    set: &ActionSet,
    adversary: &mut dyn RewardSequence,
    horizon: u64,
    rng: &mut StreamRng,
    instrument: bool,
) -> Result<RegretLedger> {
    let mut ledger = RegretLedger::new(set.dim());
    for _ in 0..horizon {
        let t = bandit.day() + 1;
        let rewards = adversary.reward(t)?;
        let scales = if instrument { bandit.scale_policies()? } else { Vec::new() };
        let out = bandit.play(rng, &mut |a| a.dot(&rewards))?;
        if instrument {
            ledger.record_scales(t, &scales, &rewards, bandit.last_estimate());
        }
        ledger.push_day(&out.policy, &out.action, rewards, out.reward)?;
    }
    Ok(ledger)
}
