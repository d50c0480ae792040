//! Anytime play by restarting a fixed-horizon algorithm on epochs of
//! length `1, 2, 4, …`.

use super::{Bandit, DayOutcome};
use crate::action::{ActionVector, Policy};
use crate::error::Result;
use crate::rng::StreamRng;

/// First and last day (1-based, inclusive) of epoch `i`, which has length
/// `2^i`. Epochs end at days 1, 3, 7, 15, …
pub fn epoch_bounds(i: u32) -> (u64, u64) {
    let start = 1u64 << i;
    (start, (start << 1) - 1)
}

pub struct Doubling<B, F> {
    make: F,
    current: Option<B>,
    epoch: u32,
    left: u64,
    t: u64,
    epoch_starts: Vec<u64>,
}

impl<B: Bandit, F: FnMut(u64) -> Result<B>> Doubling<B, F> {
    /// `make(len)` builds a fresh algorithm tuned for an epoch of `len` days.
    pub fn new(make: F) -> Self {
        Doubling {
            make,
            current: None,
            epoch: 0,
            left: 0,
            t: 0,
            epoch_starts: Vec::new(),
        }
    }

    /// Days at which a new epoch began.
    pub fn epoch_starts(&self) -> &[u64] {
        &self.epoch_starts
    }

    fn ensure(&mut self) -> Result<&mut B> {
        if self.current.is_none() || self.left == 0 {
            if self.current.is_some() {
                self.epoch += 1;
            }
            let len = 1u64 << self.epoch;
            self.current = Some((self.make)(len)?);
            self.left = len;
            self.epoch_starts.push(self.t + 1);
        }
        Ok(self.current.as_mut().expect("epoch algorithm"))
    }
}

impl<B: Bandit, F: FnMut(u64) -> Result<B>> Bandit for Doubling<B, F> {
    fn day(&self) -> u64 {
        self.t
    }

    fn current_policy(&mut self) -> Result<&Policy> {
        self.ensure()?.current_policy()
    }

    fn scale_policies(&mut self) -> Result<Vec<(u32, u64, Policy)>> {
        self.ensure()?.scale_policies()
    }

    fn last_estimate(&self) -> Option<&[f64]> {
        self.current.as_ref().and_then(|b| b.last_estimate())
    }

    fn play(&mut self, rng: &mut StreamRng, reveal: &mut dyn FnMut(&ActionVector) -> f64) -> Result<DayOutcome> {
        let out = self.ensure()?.play(rng, reveal)?;
        self.left -= 1;
        self.t += 1;
        Ok(out)
    }
}
