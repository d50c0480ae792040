//! The multi-scale master: a uniform mixture over `K` scale learners that
//! samples, estimates `R̃_t = r_t Σ_t⁺ M_t` under the mixture, and broadcasts
//! the estimate to every scale. Scale `k` restarts every `H^k` days.

mod doubling;
mod run;
mod schedule;

pub use doubling::{epoch_bounds, Doubling};
pub use run::{run_horizon, run_instrumented};
pub use schedule::{LearnerKind, Schedule};

use std::sync::Arc;

use rand::Rng;

use crate::action::{ActionVector, Policy};
use crate::domains::ActionSet;
use crate::error::{Error, Result};
use crate::estimator::{Estimator, Prepared};
use crate::learners::{ComBand, CombandShared, ComBcp, CombcpShared, LazyLearner};
use crate::rng::StreamRng;
use crate::spanner::Spanner;

/// What an algorithm did on one day. The reward vector never reaches the
/// algorithm: it only sees `reward` for the action it chose.
#[derive(Debug, Clone, PartialEq)]
pub struct DayOutcome {
    pub policy: Policy,
    pub action: ActionVector,
    pub reward: f64,
}

/// An online algorithm with bandit feedback.
pub trait Bandit {
    /// Days played so far.
    fn day(&self) -> u64;
    /// The policy that will be played on the next day.
    fn current_policy(&mut self) -> Result<&Policy>;
    /// Plays one day. `reveal` returns the scalar reward of the chosen action.
    fn play(&mut self, rng: &mut StreamRng, reveal: &mut dyn FnMut(&ActionVector) -> f64) -> Result<DayOutcome>;
    /// Per-scale policies `(k, l, policy)` for the next day, if the algorithm
    /// is a multi-scale master.
    fn scale_policies(&mut self) -> Result<Vec<(u32, u64, Policy)>> {
        Ok(Vec::new())
    }
    /// The reward estimate formed on the most recent day, if any.
    fn last_estimate(&self) -> Option<&[f64]> {
        None
    }
}

impl<B: Bandit + ?Sized> Bandit for Box<B> {
    fn day(&self) -> u64 {
        (**self).day()
    }

    fn current_policy(&mut self) -> Result<&Policy> {
        (**self).current_policy()
    }

    fn play(&mut self, rng: &mut StreamRng, reveal: &mut dyn FnMut(&ActionVector) -> f64) -> Result<DayOutcome> {
        (**self).play(rng, reveal)
    }

    fn scale_policies(&mut self) -> Result<Vec<(u32, u64, Policy)>> {
        (**self).scale_policies()
    }

    fn last_estimate(&self) -> Option<&[f64]> {
        (**self).last_estimate()
    }
}

/// Everything a master needs to spawn fresh learners.
#[derive(Clone)]
pub enum LearnerFactory {
    ComBcp(Arc<CombcpShared>),
    ComBand(Arc<CombandShared>),
}

impl LearnerFactory {
    pub fn new(kind: LearnerKind, set: &Arc<ActionSet>, spanner: &Spanner) -> Result<Self> {
        Ok(match kind {
            LearnerKind::ComBcp => LearnerFactory::ComBcp(Arc::new(CombcpShared::new(set.clone(), spanner)?)),
            LearnerKind::ComBand => LearnerFactory::ComBand(Arc::new(CombandShared::new(set, spanner)?)),
        })
    }

    pub fn kind(&self) -> LearnerKind {
        match self {
            LearnerFactory::ComBcp(_) => LearnerKind::ComBcp,
            LearnerFactory::ComBand(_) => LearnerKind::ComBand,
        }
    }

    fn lambda_min(&self) -> f64 {
        match self {
            LearnerFactory::ComBcp(_) => 0.0,
            LearnerFactory::ComBand(s) => s.lambda_min,
        }
    }

    fn spawn(&self, params: crate::learners::LearnerParams) -> Result<Box<dyn LazyLearner>> {
        Ok(match self {
            LearnerFactory::ComBcp(s) => Box::new(ComBcp::new(s.clone(), params)?),
            LearnerFactory::ComBand(s) => Box::new(ComBand::new(s.clone(), params)?),
        })
    }
}

/// One scale: its current learner instance and interval index.
pub struct ScaleSlot {
    pub k: u32,
    /// Interval index, starting at 1.
    pub l: u64,
    pub learner: Box<dyn LazyLearner>,
    /// Days at which this scale restarted.
    pub restarts: Vec<u64>,
}

pub struct Master {
    set: Arc<ActionSet>,
    schedule: Schedule,
    factory: LearnerFactory,
    estimator: Estimator,
    scales: Vec<ScaleSlot>,
    t: u64,
    /// Whether restarts for day `t + 1` have been applied.
    day_open: bool,
    mixture: Option<(Vec<(u64, u64)>, Policy)>,
    prepared: Option<(Vec<(u64, u64)>, Prepared)>,
    last_estimate: Vec<f64>,
}

impl Master {
    pub fn new(set: Arc<ActionSet>, spanner: &Spanner, kind: LearnerKind, schedule: Schedule) -> Result<Self> {
        let factory = LearnerFactory::new(kind, &set, spanner)?;
        Self::with_factory(set, spanner, factory, schedule)
    }

    /// A master reusing already-built learner state (cheap to create per
    /// epoch or per seed).
    pub fn with_factory(set: Arc<ActionSet>, spanner: &Spanner, factory: LearnerFactory, schedule: Schedule) -> Result<Self> {
        if schedule.k == 0 || schedule.h < 2 {
            return Err(Error::invalid("schedule needs K >= 1 and H >= 2"));
        }
        let d = set.dim();
        Ok(Master {
            estimator: Estimator::new(d, spanner.span_basis().to_vec()),
            set,
            schedule,
            factory,
            scales: Vec::new(),
            t: 0,
            day_open: false,
            mixture: None,
            prepared: None,
            last_estimate: vec![0.0; d],
        })
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn scales(&self) -> &[ScaleSlot] {
        &self.scales
    }

    /// The estimate broadcast on the most recent day.
    pub fn last_estimate(&self) -> &[f64] {
        &self.last_estimate
    }

    fn context(&self, idx: usize, e: Error) -> Error {
        let s = &self.scales[idx];
        Error::AtDay {
            t: self.t,
            k: s.k,
            l: s.l,
            h: s.learner.meta_day(),
            source: Box::new(e),
        }
    }

    /// Applies restarts due on day `t + 1`.
    fn open_day(&mut self) -> Result<()> {
        if self.day_open {
            return Ok(());
        }
        let day = self.t + 1;
        let (d, m) = (self.set.dim(), self.set.weight());
        let lambda = self.factory.lambda_min();
        for k in 1..=self.schedule.k {
            let len = self.schedule.interval_len(k);
            let idx = (k - 1) as usize;
            if (day - 1).is_multiple_of(len) {
                let params = self.schedule.learner_params(self.factory.kind(), k, d, m, lambda);
                let l = (day - 1) / len + 1;
                let learner = self.factory.spawn(params).map_err(|e| Error::AtDay {
                    t: day,
                    k,
                    l,
                    h: 1,
                    source: Box::new(e),
                })?;
                if idx < self.scales.len() {
                    let slot = &mut self.scales[idx];
                    slot.l = l;
                    slot.learner = learner;
                    slot.restarts.push(day);
                } else {
                    self.scales.push(ScaleSlot { k, l, learner, restarts: vec![day] });
                }
            }
        }
        self.day_open = true;
        Ok(())
    }

    fn key(&self) -> Vec<(u64, u64)> {
        self.scales
            .iter()
            .map(|s| (s.restarts.len() as u64, s.learner.version()))
            .collect()
    }

    /// `p̂ = (1/K) Σ_k p_k`.
    fn mixture(&mut self) -> Result<&Policy> {
        self.open_day()?;
        let key = self.key();
        if self.mixture.as_ref().map(|(k, _)| k != &key).unwrap_or(true) {
            let w = 1.0 / self.scales.len() as f64;
            let mut p = Policy::new();
            for s in &self.scales {
                for (a, x) in s.learner.policy().atoms() {
                    p.add(a.clone(), w * x);
                }
            }
            self.mixture = Some((key, p));
        }
        Ok(&self.mixture.as_ref().expect("mixture built").1)
    }
}

impl Bandit for Master {
    fn day(&self) -> u64 {
        self.t
    }

    fn last_estimate(&self) -> Option<&[f64]> {
        Some(&self.last_estimate)
    }

    fn current_policy(&mut self) -> Result<&Policy> {
        self.mixture()
    }

    fn scale_policies(&mut self) -> Result<Vec<(u32, u64, Policy)>> {
        self.open_day()?;
        Ok(self
            .scales
            .iter()
            .map(|s| (s.k, s.l, s.learner.policy().clone()))
            .collect())
    }

    fn play(&mut self, rng: &mut StreamRng, reveal: &mut dyn FnMut(&ActionVector) -> f64) -> Result<DayOutcome> {
        let policy = self.mixture()?.clone();
        self.t += 1;
        self.day_open = false;

        // A uniformly chosen scale, then an atom of its frozen policy.
        let scale = rng.gen_range(0..self.scales.len());
        let sp = self.scales[scale].learner.policy();
        let action = sp.atoms()[sp.pick(rng.gen::<f64>())].0.clone();
        let reward = reveal(&action);

        let estimate = if reward == 0.0 {
            vec![0.0; self.set.dim()]
        } else {
            let key = self.key();
            if self.prepared.as_ref().map(|(k, _)| k != &key).unwrap_or(true) {
                let prep = self.estimator.prepare(&policy).map_err(|e| self.context(0, e))?;
                self.prepared = Some((key, prep));
            }
            self.prepared.as_ref().expect("prepared").1.estimate(&action, reward)
        };

        for idx in 0..self.scales.len() {
            if let Err(e) = self.scales[idx].learner.ingest(&estimate) {
                return Err(self.context(idx, e));
            }
        }
        self.last_estimate = estimate;
        Ok(DayOutcome { policy, action, reward })
    }
}
