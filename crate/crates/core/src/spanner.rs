//! C-approximate barycentric spanners built from the linear oracle alone.
//!
//! The construction first discovers `span(A)` with signed oracle sweeps over
//! complement directions, then runs the Awerbuch–Kleinberg determinant
//! maximization in the coordinates of an orthonormal basis of that span.

use crate::action::{ActionVector, Policy};
use crate::domains::ActionSet;
use crate::error::{Error, Result};
use crate::linalg::{dot, orthonormal_basis, Lu};

/// Residual below which an action counts as lying in the current span.
const SPAN_TOL: f64 = 1e-9;
/// Slack on the "improves |det| by more than C" test.
const RATIO_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Spanner {
    c: f64,
    basis: Vec<ActionVector>,
    /// Orthonormal basis of `span(A)`, one row per direction.
    span: Vec<Vec<f64>>,
    /// Basis actions in span coordinates, column-major (`coords[j]` is column j).
    coords: Vec<Vec<f64>>,
    oracle_calls: usize,
}

impl Spanner {
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn basis(&self) -> &[ActionVector] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Orthonormal basis of the span of the action set.
    pub fn span_basis(&self) -> &[Vec<f64>] {
        &self.span
    }

    /// Number of linear-oracle calls spent building the spanner.
    pub fn oracle_calls(&self) -> usize {
        self.oracle_calls
    }

    fn span_coords(&self, x: &[f64]) -> Vec<f64> {
        self.span.iter().map(|q| dot(q, x)).collect()
    }

    fn lu(&self) -> Lu {
        let r = self.rank();
        let mut a = vec![0.0; r * r];
        for (j, col) in self.coords.iter().enumerate() {
            for i in 0..r {
                a[i * r + j] = col[i];
            }
        }
        Lu::new(r, &a)
    }

    /// Coefficients `a` with `Σ_j a_j basis_j = M` (least squares within the
    /// span; exact for members of the action set).
    pub fn coefficients(&self, action: &ActionVector) -> Vec<f64> {
        let c = self.span_coords(&action.to_f64());
        self.lu().solve(&c).expect("spanner basis is nonsingular")
    }

    /// Largest `‖a‖_∞` over the given actions.
    pub fn max_coefficient<'a>(&self, actions: impl IntoIterator<Item = &'a ActionVector>) -> f64 {
        let lu = self.lu();
        actions
            .into_iter()
            .map(|m| {
                let a = lu.solve(&self.span_coords(&m.to_f64())).expect("nonsingular");
                a.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
            })
            .fold(0.0, f64::max)
    }
}

/// Counts oracle calls while tracking the better of `lmo(g)` and `lmo(−g)`.
struct Oracle<'a> {
    set: &'a ActionSet,
    calls: usize,
}

impl Oracle<'_> {
    /// The action maximizing `|g · M|`, with its signed value.
    fn best_abs(&mut self, g: &[f64]) -> Result<(f64, ActionVector)> {
        let neg: Vec<f64> = g.iter().map(|x| -x).collect();
        let plus = self.set.lmo(g)?;
        let minus = self.set.lmo(&neg)?;
        self.calls += 2;
        let (vp, vm) = (plus.dot(g), minus.dot(g));
        Ok(if vp.abs() >= vm.abs() { (vp, plus) } else { (vm, minus) })
    }
}

/// Builds a `c`-approximate barycentric spanner of `set` (`c > 1`).
pub fn build_spanner(set: &ActionSet, c: f64) -> Result<Spanner> {
    if !(c > 1.0) {
        return Err(Error::invalid(format!("spanner factor must exceed 1, got {c}")));
    }
    let d = set.dim();
    let mut oracle = Oracle { set, calls: 0 };

    // Span discovery: each probe either finds an action outside the current
    // span or certifies a direction orthogonal to all of A.
    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut dead: Vec<Vec<f64>> = Vec::new();
    loop {
        let mut fixed: Vec<Vec<f64>> = orthonormal_basis(&found, SPAN_TOL);
        fixed.extend(dead.iter().cloned());
        let fixed = orthonormal_basis(&fixed, SPAN_TOL);
        if fixed.len() >= d {
            break;
        }
        let mut probe = None;
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            let mut all = fixed.clone();
            all.push(e);
            let ob = orthonormal_basis(&all, 1e-6);
            if ob.len() > fixed.len() {
                probe = ob.last().cloned();
                break;
            }
        }
        let Some(w) = probe else { break };
        let (v, a) = oracle.best_abs(&w)?;
        if v.abs() > SPAN_TOL {
            found.push(a.to_f64());
        } else {
            dead.push(w);
        }
    }
    let span = orthonormal_basis(&found, SPAN_TOL);
    let r = span.len();
    if r == 0 {
        return Err(Error::DegenerateSet);
    }
    let to_coords = |m: &ActionVector| -> Vec<f64> {
        let x = m.to_f64();
        span.iter().map(|q| dot(q, &x)).collect()
    };
    let lift = |g: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; d];
        for (gi, q) in g.iter().zip(&span) {
            for (o, qj) in out.iter_mut().zip(q) {
                *o += gi * qj;
            }
        }
        out
    };
    // Row i of X⁻¹: the linear functional M ↦ det(X with column i := M)/det(X).
    let inverse_row = |cols: &[Vec<f64>], i: usize| -> Option<Vec<f64>> {
        let mut a = vec![0.0; r * r];
        for (j, col) in cols.iter().enumerate() {
            for k in 0..r {
                a[k * r + j] = col[k];
            }
        }
        let lu = Lu::new(r, &a);
        if lu.is_singular() {
            return None;
        }
        let mut e = vec![0.0; r];
        e[i] = 1.0;
        lu.solve_transpose(&e)
    };

    let mut cols: Vec<Vec<f64>> = (0..r)
        .map(|j| {
            let mut e = vec![0.0; r];
            e[j] = 1.0;
            e
        })
        .collect();
    let mut basis: Vec<Option<ActionVector>> = vec![None; r];
    for i in 0..r {
        let g = inverse_row(&cols, i).ok_or(Error::DegenerateSet)?;
        let (v, a) = oracle.best_abs(&lift(&g))?;
        if v.abs() <= SPAN_TOL {
            return Err(Error::DegenerateSet);
        }
        cols[i] = to_coords(&a);
        basis[i] = Some(a);
    }
    let mut basis: Vec<ActionVector> = basis.into_iter().map(|a| a.unwrap()).collect();

    'improve: loop {
        for i in 0..r {
            let g = inverse_row(&cols, i).ok_or(Error::DegenerateSet)?;
            let (v, a) = oracle.best_abs(&lift(&g))?;
            if v.abs() > c * (1.0 + RATIO_SLACK) {
                cols[i] = to_coords(&a);
                basis[i] = a;
                continue 'improve;
            }
        }
        break;
    }

    Ok(Spanner {
        c,
        basis,
        span,
        coords: cols,
        oracle_calls: oracle.calls,
    })
}

/// Uniform distribution over the spanner's basis actions.
pub fn exploration_policy(sp: &Spanner) -> Policy {
    Policy::uniform(sp.basis().iter().cloned())
}
