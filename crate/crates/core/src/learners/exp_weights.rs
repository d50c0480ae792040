//! Non-lazy exponential weights over an enumerated action set with spanner
//! exploration, estimating from its own policy.

use std::sync::Arc;

use rand::Rng;

use super::comband::softmax;
use super::{check_precondition, CombandShared};
use crate::action::{ActionVector, Policy};
use crate::error::{Error, Result};
use crate::estimator::Estimator;
use crate::master::{Bandit, DayOutcome};
use crate::rng::StreamRng;

#[derive(Debug, Clone)]
pub struct ExpWeights {
    shared: Arc<CombandShared>,
    estimator: Estimator,
    gamma: f64,
    eta: f64,
    log_w: Vec<f64>,
    t: u64,
    policy: Policy,
}

impl ExpWeights {
    pub fn new(shared: Arc<CombandShared>, estimator: Estimator, gamma: f64, eta: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0 && eta > 0.0) {
            return Err(Error::invalid("exponential weights need gamma in (0, 1] and eta > 0"));
        }
        let mut s = ExpWeights {
            log_w: vec![0.0; shared.actions.len()],
            shared,
            estimator,
            gamma,
            eta,
            t: 0,
            policy: Policy::new(),
        };
        s.rebuild();
        Ok(s)
    }

    fn rebuild(&mut self) {
        let p = Policy::from_atoms(self.shared.actions.iter().cloned().zip(softmax(&self.log_w)))
            .expect("softmax weights are probabilities");
        self.policy = p.mix(&self.shared.mu, self.gamma);
    }

    /// Applies one estimate as a full update.
    pub fn update(&mut self, estimate: &[f64]) -> Result<()> {
        let gains: Vec<f64> = self.shared.actions.iter().map(|a| a.dot(estimate)).collect();
        let magnitude = gains.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        check_precondition(self.eta, magnitude)?;
        if magnitude == 0.0 {
            return Ok(());
        }
        for (l, g) in self.log_w.iter_mut().zip(&gains) {
            *l += self.eta * g;
        }
        self.rebuild();
        Ok(())
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }
}

impl Bandit for ExpWeights {
    fn day(&self) -> u64 {
        self.t
    }

    fn current_policy(&mut self) -> Result<&Policy> {
        Ok(&self.policy)
    }

    fn play(&mut self, rng: &mut StreamRng, reveal: &mut dyn FnMut(&ActionVector) -> f64) -> Result<DayOutcome> {
        self.t += 1;
        let policy = self.policy.clone();
        let idx = policy.pick(rng.gen::<f64>());
        let action = policy.atoms()[idx].0.clone();
        let reward = reveal(&action);
        let est = self.estimator.prepare(&policy)?.estimate(&action, reward);
        self.update(&est)?;
        Ok(DayOutcome { policy, action, reward })
    }
}
