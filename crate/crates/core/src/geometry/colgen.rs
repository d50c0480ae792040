//! Generic hull decomposition by column generation: a phase-one simplex over
//! the (implicit) columns `(M, 1)`, priced with the linear oracle.

use crate::action::{ActionVector, Policy};
use crate::domains::ActionSet;
use crate::error::{Error, Result};
use crate::linalg::Lu;

const PRICE_TOL: f64 = 1e-11;
const PIVOT_TOL: f64 = 1e-11;
const FEASIBLE_TOL: f64 = 1e-7;
const REFRESH_EVERY: usize = 40;

#[derive(Debug, Clone, PartialEq)]
enum Var {
    Artificial(usize),
    Column(ActionVector),
}

struct Tableau {
    rows: usize,
    basis: Vec<Var>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    rhs: Vec<f64>,
}

impl Tableau {
    fn column(&self, v: &Var) -> Vec<f64> {
        let mut col = vec![0.0; self.rows];
        match v {
            Var::Artificial(r) => col[*r] = 1.0,
            Var::Column(m) => {
                for i in m.ones() {
                    col[i] = 1.0;
                }
                col[self.rows - 1] = 1.0;
            }
        }
        col
    }

    fn binv_times(&self, a: &[f64]) -> Vec<f64> {
        let r = self.rows;
        (0..r)
            .map(|i| (0..r).map(|j| self.binv[i * r + j] * a[j]).sum())
            .collect()
    }

    /// Recomputes `B⁻¹` and `x_B` from scratch to shed accumulated error.
    fn refresh(&mut self) -> bool {
        let r = self.rows;
        let mut b = vec![0.0; r * r];
        for (j, v) in self.basis.iter().enumerate() {
            for (i, x) in self.column(v).into_iter().enumerate() {
                b[i * r + j] = x;
            }
        }
        let lu = Lu::new(r, &b);
        if lu.is_singular() {
            return false;
        }
        for j in 0..r {
            let mut e = vec![0.0; r];
            e[j] = 1.0;
            let col = lu.solve(&e).expect("nonsingular");
            for i in 0..r {
                self.binv[i * r + j] = col[i];
            }
        }
        self.xb = lu.solve(&self.rhs).expect("nonsingular");
        true
    }

    fn pivot(&mut self, leave: usize, u: &[f64], entering: Var) {
        let r = self.rows;
        let piv = u[leave];
        for j in 0..r {
            self.binv[leave * r + j] /= piv;
        }
        self.xb[leave] /= piv;
        for i in 0..r {
            if i != leave && u[i] != 0.0 {
                let f = u[i];
                for j in 0..r {
                    self.binv[i * r + j] -= f * self.binv[leave * r + j];
                }
                self.xb[i] -= f * self.xb[leave];
            }
        }
        self.basis[leave] = entering;
    }

    fn infeasibility(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.xb)
            .filter(|(v, _)| matches!(v, Var::Artificial(_)))
            .map(|(_, x)| x.max(0.0))
            .sum()
    }
}

/// Whether row `i` of `[x_B | B⁻¹] / u` is lexicographically below row `l`.
fn lex_less(t: &Tableau, u: &[f64], i: usize, l: usize) -> bool {
    let r = t.rows;
    let a = std::iter::once(t.xb[i] / u[i]).chain((0..r).map(|j| t.binv[i * r + j] / u[i]));
    let b = std::iter::once(t.xb[l] / u[l]).chain((0..r).map(|j| t.binv[l * r + j] / u[l]));
    for (x, y) in a.zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Writes the point `x ∈ conv(A)` as a convex combination of at most `d + 1`
/// actions, for any action set with a linear oracle.
pub fn decompose_by_columns(set: &ActionSet, x: &[f64]) -> Result<Policy> {
    let d = set.dim();
    let rows = d + 1;
    let mut rhs: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
    rhs.push(1.0);
    let mut t = Tableau {
        rows,
        basis: (0..rows).map(Var::Artificial).collect(),
        binv: (0..rows * rows).map(|k| if k / rows == k % rows { 1.0 } else { 0.0 }).collect(),
        xb: rhs.clone(),
        rhs,
    };
    let max_iters = 50 * rows * rows + 1000;
    let mut iters = 0;
    while t.infeasibility() > 1e-14 {
        iters += 1;
        if iters > max_iters {
            break;
        }
        if iters % REFRESH_EVERY == 0 && !t.refresh() {
            break;
        }
        // Duals of the phase-one objective (cost 1 on artificials).
        let mut pi = vec![0.0; rows];
        for (i, v) in t.basis.iter().enumerate() {
            if matches!(v, Var::Artificial(_)) {
                for j in 0..rows {
                    pi[j] += t.binv[i * rows + j];
                }
            }
        }
        let (val, m) = set.argmax_any(&pi[..d])?;
        if val + pi[d] <= PRICE_TOL {
            break;
        }
        let entering = Var::Column(m);
        if t.basis.contains(&entering) {
            break;
        }
        let u = t.binv_times(&t.column(&entering));
        // Lexicographic ratio test on rows of [x_B | B⁻¹] prevents cycling.
        let mut leave: Option<usize> = None;
        for i in 0..rows {
            if u[i] <= PIVOT_TOL {
                continue;
            }
            leave = match leave {
                Some(l) if !lex_less(&t, &u, i, l) => Some(l),
                _ => Some(i),
            };
        }
        let Some(leave) = leave else { break };
        t.pivot(leave, &u, entering);
    }
    t.refresh();
    let residual = t.infeasibility();
    if residual > FEASIBLE_TOL {
        return Err(Error::NotInHull { residual });
    }
    let atoms = t
        .basis
        .iter()
        .zip(&t.xb)
        .filter_map(|(v, &w)| match v {
            Var::Column(m) if w > 0.0 => Some((m.clone(), w)),
            _ => None,
        });
    let mut p = Policy::from_atoms(atoms)?;
    p.normalize();
    Ok(p)
}

/// A vector in the null space of the row-major `rows × cols` matrix, if
/// `cols > rank`.
fn null_vector(rows: usize, cols: usize, a: &[f64]) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut pivot_col = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (p, pv) = (r..rows)
            .map(|i| (i, m[i * cols + c].abs()))
            .fold((r, -1.0), |b, x| if x.1 > b.1 { x } else { b });
        if pv <= 1e-12 {
            continue;
        }
        for j in 0..cols {
            m.swap(p * cols + j, r * cols + j);
        }
        let inv = 1.0 / m[r * cols + c];
        for j in 0..cols {
            m[r * cols + j] *= inv;
        }
        for i in 0..rows {
            if i != r {
                let f = m[i * cols + c];
                if f != 0.0 {
                    for j in 0..cols {
                        m[i * cols + j] -= f * m[r * cols + j];
                    }
                }
            }
        }
        pivot_col.push(c);
        r += 1;
    }
    let free = (0..cols).find(|c| !pivot_col.contains(c))?;
    let mut v = vec![0.0; cols];
    v[free] = 1.0;
    for (row, &pc) in pivot_col.iter().enumerate() {
        v[pc] = -m[row * cols + free];
    }
    Some(v)
}

/// Reduces a distribution to at most `d + 1` atoms with the same mean.
pub fn caratheodory_reduce(policy: &Policy) -> Policy {
    let Some(d) = policy.dim() else {
        return policy.clone();
    };
    let mut atoms: Vec<(ActionVector, f64)> = policy.atoms().iter().filter(|(_, w)| *w > 0.0).cloned().collect();
    while atoms.len() > d + 1 {
        let k = d + 2;
        let rows = d + 1;
        let mut a = vec![0.0; rows * k];
        for (j, (m, _)) in atoms[..k].iter().enumerate() {
            for i in m.ones() {
                a[i * k + j] = 1.0;
            }
            a[d * k + j] = 1.0;
        }
        let c = null_vector(rows, k, &a).expect("d + 2 vectors in R^(d+1) are dependent");
        let (jmin, step) = (0..k)
            .filter(|&j| c[j] > 1e-12)
            .map(|j| (j, atoms[j].1 / c[j]))
            .fold((usize::MAX, f64::INFINITY), |b, x| if x.1 < b.1 { x } else { b });
        for j in 0..k {
            atoms[j].1 -= step * c[j];
        }
        atoms[jmin].1 = 0.0;
        atoms.retain(|(_, w)| *w > 1e-15);
    }
    let mut p = Policy::from_atoms(atoms.into_iter().map(|(a, w)| (a, w.max(0.0)))).expect("nonnegative");
    p.normalize();
    p
}
