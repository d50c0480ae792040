//! Exact external and swap regret of a recorded policy sequence.

use crate::action::ActionVector;
use crate::domains::ActionSet;
use crate::error::{Error, Result};
use crate::linalg::axpy;

use super::ledger::{DayRecord, RegretLedger};

/// `max_M Σ_t R_t·M − Σ_t E_{p_t}[R_t·M]`.
pub fn external_regret(ledger: &RegretLedger, set: &ActionSet) -> Result<f64> {
    let mut tr = RegretTracker::new(ledger.dim());
    for rec in ledger.days() {
        tr.push(ledger, rec);
    }
    tr.external(set)
}

/// `Σ_M [max_{M'} G_M·M' − G_M·M]` with `G_M = Σ_t p_t(M) R_t`, which is the
/// best swap function chosen independently per support action.
pub fn swap_regret(ledger: &RegretLedger, set: &ActionSet) -> Result<f64> {
    let mut tr = RegretTracker::new(ledger.dim());
    for rec in ledger.days() {
        tr.push(ledger, rec);
    }
    tr.swap(set)
}

/// Swap regret by exhaustive search over every map from the support actions
/// to `actions`. Exponential; for tests only.
pub fn brute_force_swap(ledger: &RegretLedger, actions: &[ActionVector], cap: u64) -> Result<f64> {
    let mut support: Vec<u32> = ledger
        .days()
        .iter()
        .flat_map(|d| d.policy.iter().map(|&(id, _)| id))
        .collect();
    support.sort_unstable();
    support.dedup();
    let n = actions.len() as u64;
    let count = n.checked_pow(support.len() as u32).unwrap_or(u64::MAX);
    if count > cap || actions.is_empty() {
        return Err(Error::TooLarge {
            count: count as u128,
            cap: cap as u128,
        });
    }
    // phi is an odometer over actions^support.
    let mut phi = vec![0usize; support.len()];
    let mut best = f64::NEG_INFINITY;
    loop {
        let mut total = 0.0;
        for d in ledger.days() {
            for &(id, w) in &d.policy {
                let j = support.binary_search(&id).expect("support id");
                total += w * (actions[phi[j]].dot(&d.rewards) - ledger.action(id).dot(&d.rewards));
            }
        }
        best = best.max(total);
        let mut i = 0;
        while i < phi.len() {
            phi[i] += 1;
            if phi[i] < actions.len() {
                break;
            }
            phi[i] = 0;
            i += 1;
        }
        if i == phi.len() {
            return Ok(best);
        }
    }
}

/// Running sums for regret on prefixes of a ledger.
#[derive(Debug, Clone)]
pub struct RegretTracker {
    total: Vec<f64>,
    expected: f64,
    /// `G_M` per action id, with `Σ_t p_t(M) E[R_t·M]` alongside.
    per_action: Vec<Option<(Vec<f64>, f64)>>,
    days: u64,
}

impl RegretTracker {
    pub fn new(dim: usize) -> Self {
        RegretTracker {
            total: vec![0.0; dim],
            expected: 0.0,
            per_action: Vec::new(),
            days: 0,
        }
    }

    pub fn push(&mut self, ledger: &RegretLedger, rec: &DayRecord) {
        axpy(1.0, &rec.rewards, &mut self.total);
        for &(id, w) in &rec.policy {
            let v = ledger.action(id).dot(&rec.rewards);
            self.expected += w * v;
            let i = id as usize;
            if i >= self.per_action.len() {
                self.per_action.resize(i + 1, None);
            }
            let slot = self.per_action[i].get_or_insert_with(|| (vec![0.0; rec.rewards.len()], 0.0));
            axpy(w, &rec.rewards, &mut slot.0);
            slot.1 += w * v;
        }
        self.days += 1;
    }

    pub fn days(&self) -> u64 {
        self.days
    }

    pub fn external(&self, set: &ActionSet) -> Result<f64> {
        Ok(set.max_value(&self.total)? - self.expected)
    }

    pub fn swap(&self, set: &ActionSet) -> Result<f64> {
        let mut s = 0.0;
        for (g, own) in self.per_action.iter().flatten() {
            s += set.max_value(g)? - own;
        }
        Ok(s)
    }
}

/// External and swap regret every `stride` days (and on the last day).
pub fn prefix_regrets(ledger: &RegretLedger, set: &ActionSet, stride: u64) -> Result<Vec<(u64, f64, f64)>> {
    let stride = stride.max(1);
    let mut tr = RegretTracker::new(ledger.dim());
    let mut out = Vec::new();
    let horizon = ledger.horizon();
    for rec in ledger.days() {
        tr.push(ledger, rec);
        if rec.t % stride == 0 || rec.t == horizon {
            out.push((rec.t, tr.external(set)?, tr.swap(set)?));
        }
    }
    Ok(out)
}

/// Both sides of the decomposition inequality
/// `swap ≤ (1/K) Σ_{k<K} Σ_l Reg(k, l) + T/K`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub horizon: u64,
    pub num_scales: u32,
    pub swap: f64,
    /// `Σ_l Reg(k, l)` for `k = 1..=K`.
    pub per_scale: Vec<f64>,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

pub const AUDIT_TOL: f64 = 1e-6;

/// Checks the decomposition bound on an instrumented ledger. `Reg(k, l)` is
/// the external regret of the interval's learner on the true rewards.
pub fn decomposition_audit(ledger: &RegretLedger, set: &ActionSet) -> Result<AuditReport> {
    let k_total = ledger.num_scales();
    if k_total == 0 {
        return Err(Error::invalid("ledger has no per-scale instrumentation"));
    }
    ledger.validate()?;
    let mut per_scale = vec![0.0; k_total as usize];
    for r in ledger.intervals() {
        per_scale[(r.k - 1) as usize] += set.max_value(&r.reward_sum)? - r.learner_reward;
    }
    let t = ledger.horizon() as f64;
    let kf = k_total as f64;
    let rhs = per_scale[..per_scale.len() - 1].iter().sum::<f64>() / kf + t / kf;
    let swap = swap_regret(ledger, set)?;
    let slack = rhs - swap;
    Ok(AuditReport {
        horizon: ledger.horizon(),
        num_scales: k_total,
        swap,
        per_scale,
        rhs,
        slack,
        holds: slack >= -AUDIT_TOL,
    })
}
