//! Scale count, base horizon unit, exploration and learning rates.

use crate::error::{Error, Result};
use crate::learners::{pow_sat, LearnerParams, Mode};

/// Which lazy learner runs inside each scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnerKind {
    ComBcp,
    ComBand,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub mode: Mode,
    /// Meta-days per interval.
    pub h: u64,
    /// Number of scales.
    pub k: u32,
    pub gamma: f64,
    /// Multiplier `c` on the practical learning rate.
    pub eta_scale: f64,
    /// A learning rate applied at every scale, overriding the formula.
    pub eta_fixed: Option<f64>,
}

/// Largest `K` with `H^K ≤ T` (0 if `T < H`).
fn floor_log(h: u64, t: u64) -> u32 {
    let mut k = 0;
    let mut p: u64 = 1;
    while let Some(next) = p.checked_mul(h) {
        if next > t {
            break;
        }
        p = next;
        k += 1;
    }
    k
}

/// Smallest `K` with `H^K ≥ T`.
fn ceil_log(h: u64, t: u64) -> u32 {
    let mut k = 0;
    let mut p: u64 = 1;
    while p < t {
        p = p.saturating_mul(h);
        k += 1;
    }
    k
}

impl Schedule {
    /// The asymptotic schedule: `H = 27⌊log T⌋³ d⁹ m^{9/2} log³ d` (base-2
    /// logs), the fewest scales with `T ≤ H^K`, `γ = H^{-1/3}`.
    pub fn theory(d: usize, m: usize, horizon: u64) -> Self {
        let lt = (horizon.max(1) as f64).log2().floor();
        let ld = (d as f64).log2();
        let h = 27.0 * lt.powi(3) * (d as f64).powi(9) * (m as f64).powf(4.5) * ld.powi(3);
        let h = if h.is_finite() && h < u64::MAX as f64 { (h.ceil() as u64).max(2) } else { u64::MAX };
        let k = ceil_log(h, horizon).max(1);
        Schedule {
            mode: Mode::Theory,
            h,
            k,
            gamma: (h as f64).powf(-1.0 / 3.0),
            eta_scale: 1.0,
            eta_fixed: None,
        }
    }

    /// A desk-scale schedule. `K` defaults to `max(2, ⌊log_H T⌋)` and `γ`
    /// to `H^{-1/3}`.
    pub fn practical(horizon: u64, h: u64, k: Option<u32>, gamma: Option<f64>, eta_scale: f64) -> Result<Self> {
        if h < 2 {
            return Err(Error::invalid(format!("H must be at least 2, got {h}")));
        }
        let k = k.unwrap_or_else(|| floor_log(h, horizon).max(2));
        if k == 0 {
            return Err(Error::invalid("need at least one scale"));
        }
        let gamma = gamma.unwrap_or((h as f64).powf(-1.0 / 3.0));
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::invalid(format!("gamma must lie in (0, 1], got {gamma}")));
        }
        if !(eta_scale > 0.0) {
            return Err(Error::invalid("learning-rate multiplier must be positive"));
        }
        Ok(Schedule {
            mode: Mode::Practical,
            h,
            k,
            gamma,
            eta_scale,
            eta_fixed: None,
        })
    }

    /// The default base unit for a horizon when none is given: `⌈√T⌉`.
    pub fn auto_h(horizon: u64) -> u64 {
        ((horizon as f64).sqrt().ceil() as u64).max(2)
    }

    /// Days between restarts of scale `k`, `H^k`.
    pub fn interval_len(&self, k: u32) -> u64 {
        pow_sat(self.h, k)
    }

    /// Days per meta-day at scale `k`, `H^{k-1}`.
    pub fn meta_len(&self, k: u32) -> u64 {
        pow_sat(self.h, k - 1)
    }

    /// Learning rate at scale `k`.
    pub fn eta(&self, kind: LearnerKind, k: u32, d: usize, m: usize, lambda_min: f64) -> f64 {
        if let Some(e) = self.eta_fixed {
            return e;
        }
        let hk = (self.h as f64).powf(k as f64 - 1.0 / 3.0);
        let (d, m) = (d as f64, m as f64);
        match (kind, self.mode) {
            (LearnerKind::ComBcp, Mode::Theory) => 1.0 / (d.powi(3) * m.sqrt() * hk),
            (LearnerKind::ComBcp, Mode::Practical) => self.eta_scale / (d * m.sqrt() * hk),
            (LearnerKind::ComBand, Mode::Theory) => lambda_min / (hk * m),
            (LearnerKind::ComBand, Mode::Practical) => self.eta_scale * lambda_min / (hk * m),
        }
    }

    pub fn learner_params(&self, kind: LearnerKind, k: u32, d: usize, m: usize, lambda_min: f64) -> LearnerParams {
        LearnerParams {
            k,
            gamma: self.gamma,
            eta: self.eta(kind, k, d, m, lambda_min),
            meta_len: self.meta_len(k),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn practical_defaults() {
        let s = Schedule::practical(81, 3, None, None, 1.0).unwrap();
        assert_eq!(s.k, 4);
        assert!((s.gamma - 3f64.powf(-1.0 / 3.0)).abs() < 1e-15);
        assert_eq!(s.interval_len(2), 9);
        assert_eq!(s.meta_len(1), 1);
        assert_eq!(Schedule::practical(5, 3, None, None, 1.0).unwrap().k, 2);
        assert!(Schedule::practical(5, 1, None, None, 1.0).is_err());
    }

    #[test]
    fn theory_constants_exceed_desk_horizons() {
        let s = Schedule::theory(6, 2, 8000);
        assert!(s.h > 8000);
        assert_eq!(s.k, 1);
        let eta = s.eta(LearnerKind::ComBcp, 1, 6, 2, 0.0);
        let want = 1.0 / (216.0 * 2f64.sqrt() * (s.h as f64).powf(2.0 / 3.0));
        assert!((eta - want).abs() <= 1e-12 * want);
        // saturates instead of overflowing
        assert_eq!(Schedule::theory(1000, 500, 1 << 40).h, u64::MAX);
    }

    #[test]
    fn auto_h_is_root_horizon() {
        assert_eq!(Schedule::auto_h(1000), 32);
        assert_eq!(Schedule::auto_h(1), 2);
    }
}
