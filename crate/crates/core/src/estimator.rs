//! The one-sample reward estimator `R̃ = r Σ⁺ M` for a sparse policy.

use crate::action::{ActionVector, Policy};
use crate::error::{Error, Result};
use crate::linalg::{co_occurrence, Spectral, DEFAULT_RANK_TOL};

/// Computes `Σ⁺ M` for `Σ = E_p[MMᵀ]`.
///
/// When the policy's support spans the whole of `span(A)` (always the case
/// once spanner exploration is mixed in), `Σ = Q S Qᵀ` with `S` positive
/// definite in the coordinates of an orthonormal span basis `Q`, and
/// `Σ⁺ M = Q S⁻¹ Qᵀ M` costs one small Cholesky solve. Otherwise it falls
/// back to a full eigendecomposition.
#[derive(Debug, Clone)]
pub struct Estimator {
    span: Vec<Vec<f64>>,
    dim: usize,
}

/// Pivot size (relative to the largest diagonal) below which the reduced
/// matrix is treated as singular.
const CHOLESKY_TOL: f64 = 1e-10;

struct Reduced {
    chol: Vec<f64>,
    r: usize,
}

impl Estimator {
    /// `span` is an orthonormal basis of `span(A)` in `R^dim`.
    pub fn new(dim: usize, span: Vec<Vec<f64>>) -> Self {
        Estimator { span, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn coords(&self, a: &ActionVector) -> Vec<f64> {
        self.span
            .iter()
            .map(|q| a.ones().map(|i| q[i]).sum())
            .collect()
    }

    fn reduced(&self, policy: &Policy) -> Option<Reduced> {
        let r = self.span.len();
        if r == 0 {
            return None;
        }
        let mut s = vec![0.0; r * r];
        for (a, w) in policy.atoms() {
            let c = self.coords(a);
            for i in 0..r {
                let wi = w * c[i];
                for j in 0..=i {
                    s[i * r + j] += wi * c[j];
                }
            }
        }
        let scale = (0..r).map(|i| s[i * r + i]).fold(0.0, f64::max);
        if !(scale > 0.0) {
            return None;
        }
        // In-place lower Cholesky.
        for j in 0..r {
            let mut diag = s[j * r + j];
            for k in 0..j {
                diag -= s[j * r + k] * s[j * r + k];
            }
            if diag <= CHOLESKY_TOL * scale {
                return None;
            }
            let l = diag.sqrt();
            s[j * r + j] = l;
            for i in (j + 1)..r {
                let mut v = s[i * r + j];
                for k in 0..j {
                    v -= s[i * r + k] * s[j * r + k];
                }
                s[i * r + j] = v / l;
            }
        }
        Some(Reduced { chol: s, r })
    }

    /// A solver for `Σ⁺ x` under `policy`, reusable across days while the
    /// policy is unchanged.
    pub fn prepare(&self, policy: &Policy) -> Result<Prepared> {
        if policy.is_empty() {
            return Err(Error::EmptySupport);
        }
        if let Some(red) = self.reduced(policy) {
            return Ok(Prepared::Reduced {
                chol: red.chol,
                r: red.r,
                span: self.span.clone(),
            });
        }
        let sigma = co_occurrence(policy)?;
        let spec = Spectral::new(&sigma, DEFAULT_RANK_TOL)?;
        Ok(Prepared::Full(spec))
    }
}

/// A factored co-occurrence matrix.
#[derive(Debug, Clone)]
pub enum Prepared {
    Reduced { chol: Vec<f64>, r: usize, span: Vec<Vec<f64>> },
    Full(Spectral),
}

impl Prepared {
    /// `Σ⁺ M`.
    pub fn apply(&self, m: &ActionVector) -> Vec<f64> {
        match self {
            Prepared::Full(spec) => spec.pinv.mul_vec(&m.to_f64()),
            Prepared::Reduced { chol, r, span } => {
                let r = *r;
                let mut y: Vec<f64> = span.iter().map(|q| m.ones().map(|i| q[i]).sum()).collect();
                for i in 0..r {
                    for k in 0..i {
                        y[i] -= chol[i * r + k] * y[k];
                    }
                    y[i] /= chol[i * r + i];
                }
                for i in (0..r).rev() {
                    for k in (i + 1)..r {
                        y[i] -= chol[k * r + i] * y[k];
                    }
                    y[i] /= chol[i * r + i];
                }
                let d = m.dim();
                let mut out = vec![0.0; d];
                for (c, q) in y.iter().zip(span) {
                    for (o, qi) in out.iter_mut().zip(q) {
                        *o += c * qi;
                    }
                }
                out
            }
        }
    }

    /// `R̃ = r Σ⁺ M`; exactly zero when `r = 0`.
    pub fn estimate(&self, m: &ActionVector, reward: f64) -> Vec<f64> {
        if reward == 0.0 {
            return vec![0.0; m.dim()];
        }
        let mut v = self.apply(m);
        v.iter_mut().for_each(|x| *x *= reward);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::ActionSet;
    use crate::linalg::pseudo_inverse;
    use crate::spanner::build_spanner;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_sets_closed_form() {
        let set = ActionSet::m_sets(3, 2).unwrap();
        let sp = build_spanner(&set, 2.0).unwrap();
        let est = Estimator::new(3, sp.span_basis().to_vec());
        let p = Policy::uniform(set.enumerate(10).unwrap());
        let prep = est.prepare(&p).unwrap();
        assert!(matches!(prep, Prepared::Reduced { .. }));
        let r = prep.estimate(&ActionVector::parse("110").unwrap(), 1.0);
        for (a, b) in r.iter().zip([1.5, 1.5, -1.5]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn reduced_and_full_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let set = ActionSet::m_sets(5, 2).unwrap();
        let all = set.enumerate(100).unwrap();
        let sp = build_spanner(&set, 2.0).unwrap();
        let est = Estimator::new(5, sp.span_basis().to_vec());
        for _ in 0..20 {
            let p = Policy::from_atoms(all.iter().map(|a| (a.clone(), rng.gen::<f64>()))).unwrap();
            let mut p = p;
            p.normalize();
            let pinv = pseudo_inverse(&co_occurrence(&p).unwrap(), DEFAULT_RANK_TOL).unwrap();
            let prep = est.prepare(&p).unwrap();
            for a in &all {
                let want = pinv.mul_vec(&a.to_f64());
                let got = prep.apply(a);
                assert!(want.iter().zip(&got).all(|(x, y)| (x - y).abs() < 1e-9));
            }
        }
    }

    #[test]
    fn deficient_support_falls_back() {
        let set = ActionSet::m_sets(3, 2).unwrap();
        let sp = build_spanner(&set, 2.0).unwrap();
        let est = Estimator::new(3, sp.span_basis().to_vec());
        let m = ActionVector::parse("110").unwrap();
        let prep = est.prepare(&Policy::point_mass(m.clone())).unwrap();
        assert!(matches!(prep, Prepared::Full(_)));
        let r = prep.estimate(&m, 0.7);
        for (a, b) in r.iter().zip([0.35, 0.35, 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
