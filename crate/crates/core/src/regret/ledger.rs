//! Per-day records of a run, with actions interned to small ids.

use std::collections::HashMap;

use crate::action::{ActionVector, Policy, MASS_TOL};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DayRecord {
    pub t: u64,
    /// Support of the played policy as `(action id, weight)`.
    pub policy: Vec<(u32, f64)>,
    pub sampled: u32,
    /// The hidden reward vector `R_t`, in action coordinates.
    pub rewards: Vec<f64>,
    pub realized: f64,
}

/// One interval `(k, l)` of a scale learner, with its aggregated rewards.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalRecord {
    pub k: u32,
    pub l: u64,
    pub start: u64,
    pub end: u64,
    /// `Σ_t R_t` over the interval.
    pub reward_sum: Vec<f64>,
    /// `Σ_t E_{p_{k,t}}[R_t · M]`.
    pub learner_reward: f64,
    /// `Σ_t E_{p_{k,t}}[R̃_t · M]`, when estimates were recorded.
    pub learner_estimated: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RegretLedger {
    dim: usize,
    actions: Vec<ActionVector>,
    index: HashMap<ActionVector, u32>,
    days: Vec<DayRecord>,
    intervals: Vec<IntervalRecord>,
    num_scales: u32,
}

impl RegretLedger {
    pub fn new(dim: usize) -> Self {
        RegretLedger {
            dim,
            ..Default::default()
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn intern(&mut self, a: &ActionVector) -> u32 {
        if let Some(&id) = self.index.get(a) {
            return id;
        }
        let id = self.actions.len() as u32;
        self.actions.push(a.clone());
        self.index.insert(a.clone(), id);
        id
    }

    pub fn action(&self, id: u32) -> &ActionVector {
        &self.actions[id as usize]
    }

    /// Distinct actions seen so far, indexed by id.
    pub fn actions(&self) -> &[ActionVector] {
        &self.actions
    }

    pub fn push_day(&mut self, policy: &Policy, sampled: &ActionVector, rewards: Vec<f64>, realized: f64) -> Result<()> {
        if rewards.len() != self.dim {
            return Err(Error::invalid("reward vector has the wrong dimension"));
        }
        let support = policy.atoms().iter().map(|(a, w)| (self.intern(a), *w)).collect();
        let sampled = self.intern(sampled);
        let t = self.days.len() as u64 + 1;
        self.days.push(DayRecord {
            t,
            policy: support,
            sampled,
            rewards,
            realized,
        });
        Ok(())
    }

    /// Adds day `t`'s contribution of each scale policy `(k, l, p_{k,t})`.
    /// A new interval record opens whenever `l` changes for a scale.
    pub fn record_scales(&mut self, t: u64, scales: &[(u32, u64, Policy)], rewards: &[f64], estimate: Option<&[f64]>) {
        for (k, l, p) in scales {
            self.num_scales = self.num_scales.max(*k);
            let open = self
                .intervals
                .iter()
                .rposition(|r| r.k == *k)
                .filter(|&i| self.intervals[i].l == *l && self.intervals[i].end + 1 == t);
            let i = match open {
                Some(i) => i,
                None => {
                    self.intervals.push(IntervalRecord {
                        k: *k,
                        l: *l,
                        start: t,
                        end: t - 1,
                        reward_sum: vec![0.0; self.dim],
                        learner_reward: 0.0,
                        learner_estimated: 0.0,
                    });
                    self.intervals.len() - 1
                }
            };
            let rec = &mut self.intervals[i];
            rec.end = t;
            for (s, r) in rec.reward_sum.iter_mut().zip(rewards) {
                *s += r;
            }
            rec.learner_reward += p.expected_reward(rewards);
            if let Some(est) = estimate {
                rec.learner_estimated += p.expected_reward(est);
            }
        }
    }

    pub fn days(&self) -> &[DayRecord] {
        &self.days
    }

    pub fn horizon(&self) -> u64 {
        self.days.len() as u64
    }

    pub fn intervals(&self) -> &[IntervalRecord] {
        &self.intervals
    }

    /// Number of scales seen in the instrumentation (0 if none).
    pub fn num_scales(&self) -> u32 {
        self.num_scales
    }

    /// Expected reward `E_{p_t}[R_t · M]` of day record `rec`.
    pub fn expected_reward(&self, rec: &DayRecord) -> f64 {
        rec.policy
            .iter()
            .map(|&(id, w)| w * self.action(id).dot(&rec.rewards))
            .sum()
    }

    /// Checks per-day unit mass and that each scale's intervals tile the run.
    pub fn validate(&self) -> Result<()> {
        for d in &self.days {
            let mass: f64 = d.policy.iter().map(|(_, w)| w).sum();
            if (mass - 1.0).abs() > MASS_TOL {
                return Err(Error::invalid(format!("day {}: policy mass {mass}", d.t)));
            }
        }
        for k in 1..=self.num_scales {
            let mut next = 1;
            for r in self.intervals.iter().filter(|r| r.k == k) {
                if r.start != next {
                    return Err(Error::invalid(format!("scale {k}: interval {} starts at {}", r.l, r.start)));
                }
                next = r.end + 1;
            }
            if next != self.horizon() + 1 {
                return Err(Error::invalid(format!("scale {k}: intervals stop at day {}", next - 1)));
            }
        }
        Ok(())
    }
}
