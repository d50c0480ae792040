//! Dense symmetric linear algebra for the reward estimators.
//!
//! Everything here is small and dense: `d` is at most a few hundred. The
//! eigensolver is a cyclic Jacobi sweep, which is deterministic and accurate
//! to working precision for symmetric input.

use crate::action::Policy;
use crate::error::{Error, Result};

/// Default relative cutoff below which an eigenvalue is treated as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Relative tolerance for declaring a matrix not positive semidefinite.
pub const PSD_TOL: f64 = 1e-9;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_REL_TOL: f64 = 1e-12;

/// A symmetric `d × d` matrix stored densely in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "SymMatrix needs dim >= 1");
        SymMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    /// Builds from rows; fails unless the input is square and exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid("matrix must be square and non-empty"));
        }
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if rows[j][i] != v {
                    return Err(Error::invalid(format!("matrix not symmetric at ({i},{j})")));
                }
                m.data[i * dim + j] = v;
            }
        }
        Ok(m)
    }

    /// Builds `Σ_j w_j v_j v_jᵀ`.
    pub fn from_outer_products<'a>(
        dim: usize,
        terms: impl IntoIterator<Item = (f64, &'a [f64])>,
    ) -> Self {
        let mut m = Self::zeros(dim);
        for (w, v) in terms {
            m.add_outer(w, v);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Sets both `(i,j)` and `(j,i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn add_outer(&mut self, w: f64, v: &[f64]) {
        let d = self.dim;
        for i in 0..d {
            if v[i] == 0.0 {
                continue;
            }
            let wi = w * v[i];
            for j in 0..d {
                self.data[i * d + j] += wi * v[j];
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Plain (not necessarily symmetric) product, row-major.
    pub fn matmul(&self, other: &SymMatrix) -> Vec<f64> {
        let d = self.dim;
        assert_eq!(d, other.dim);
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out[i * d + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// Entrywise max-norm.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Eigenvalues in descending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomp {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
}

impl EigenDecomp {
    /// Rebuilds `Σ λ_i u_i u_iᵀ` with eigenvalues mapped through `f`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let d = self.eigenvalues.len();
        let mut m = SymMatrix::zeros(d);
        for (lam, u) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(*lam);
            if w != 0.0 {
                m.add_outer(w, u);
            }
        }
        symmetrize(&mut m);
        m
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }
}

fn symmetrize(m: &mut SymMatrix) {
    let d = m.dim;
    for i in 0..d {
        for j in (i + 1)..d {
            let v = 0.5 * (m.data[i * d + j] + m.data[j * d + i]);
            m.data[i * d + j] = v;
            m.data[j * d + i] = v;
        }
    }
}

/// Cyclic Jacobi eigendecomposition.
pub fn eigen(sigma: &SymMatrix) -> EigenDecomp {
    let d = sigma.dim;
    let mut a = sigma.data.clone();
    let mut v = vec![0.0; d * d];
    for i in 0..d {
        v[i * d + i] = 1.0;
    }
    let fro = sigma.frobenius();
    let target = JACOBI_REL_TOL * fro;

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                off += 2.0 * a[p * d + q] * a[p * d + q];
            }
        }
        if off.sqrt() <= target {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * d + p];
                let aqq = a[q * d + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p * d + k];
                    let aqk = a[q * d + k];
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
                a[p * d + q] = 0.0;
                a[q * d + p] = 0.0;
                for k in 0..d {
                    let vkp = v[k * d + p];
                    let vkq = v[k * d + q];
                    v[k * d + p] = c * vkp - s * vkq;
                    v[k * d + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[j * d + j].total_cmp(&a[i * d + i]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| a[i * d + i]).collect();
    let eigenvectors = order
        .iter()
        .map(|&j| (0..d).map(|k| v[k * d + j]).collect())
        .collect();
    EigenDecomp {
        eigenvalues,
        eigenvectors,
    }
}

/// `Σ = Σ_M p(M) M Mᵀ` over the sparse support of `policy`.
pub fn co_occurrence(policy: &Policy) -> Result<SymMatrix> {
    let d = policy.dim().ok_or(Error::EmptySupport)?;
    let mut m = SymMatrix::zeros(d);
    for (action, w) in policy.atoms() {
        let ones: Vec<usize> = action.ones().collect();
        for &i in &ones {
            for &j in &ones {
                m.data[i * d + j] += w;
            }
        }
    }
    Ok(m)
}

/// Spectral summary of a PSD matrix: its pseudo-inverse, rank and smallest
/// nonzero eigenvalue, all from one eigendecomposition.
#[derive(Debug, Clone)]
pub struct Spectral {
    pub decomp: EigenDecomp,
    pub pinv: SymMatrix,
    pub rank: usize,
    pub min_nonzero: f64,
}

impl Spectral {
    pub fn new(sigma: &SymMatrix, rank_tol: f64) -> Result<Self> {
        let decomp = eigen(sigma);
        let lmax = decomp.max_eigenvalue().max(0.0);
        let lmin = *decomp.eigenvalues.last().unwrap();
        if lmin < -PSD_TOL * lmax.max(f64::MIN_POSITIVE) && lmin < -PSD_TOL {
            return Err(Error::NotPsd {
                min_eigenvalue: lmin,
                max_eigenvalue: lmax,
            });
        }
        let cutoff = rank_tol * lmax;
        let keep = |l: f64| lmax > 0.0 && l > cutoff;
        let pinv = decomp.reconstruct_with(|l| if keep(l) { 1.0 / l } else { 0.0 });
        let rank = decomp.eigenvalues.iter().filter(|&&l| keep(l)).count();
        let min_nonzero = decomp
            .eigenvalues
            .iter()
            .copied()
            .filter(|&l| keep(l))
            .fold(f64::INFINITY, f64::min);
        Ok(Spectral {
            decomp,
            pinv,
            rank,
            min_nonzero: if rank == 0 { 0.0 } else { min_nonzero },
        })
    }
}

/// Moore–Penrose pseudo-inverse of a PSD matrix.
pub fn pseudo_inverse(sigma: &SymMatrix, rank_tol: f64) -> Result<SymMatrix> {
    Ok(Spectral::new(sigma, rank_tol)?.pinv)
}

/// Smallest eigenvalue above `rank_tol · λ_max`, or 0 if there is none.
pub fn min_nonzero_eigenvalue(sigma: &SymMatrix, rank_tol: f64) -> f64 {
    let decomp = eigen(sigma);
    let lmax = decomp.max_eigenvalue();
    if lmax <= 0.0 {
        return 0.0;
    }
    decomp
        .eigenvalues
        .iter()
        .copied()
        .filter(|&l| l > rank_tol * lmax)
        .fold(f64::INFINITY, f64::min)
}

/// `Σ Σ⁺ x`: the orthogonal projection of `x` onto the range of `Σ`.
pub fn span_project(sigma: &SymMatrix, sigma_plus: &SymMatrix, x: &[f64]) -> Vec<f64> {
    sigma.mul_vec(&sigma_plus.mul_vec(x))
}

/// Maximum entrywise difference between two row-major `d × d` arrays.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// LU factorization with partial pivoting of a general square matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Lu {
    /// Factors the row-major `n × n` matrix `a`.
    pub fn new(n: usize, a: &[f64]) -> Self {
        let mut lu = a.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for col in 0..n {
            let (piv, pval) = (col..n)
                .map(|r| (r, lu[r * n + col].abs()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pval <= 1e-13 * scale {
                singular = true;
                continue;
            }
            if piv != col {
                for j in 0..n {
                    lu.swap(piv * n + j, col * n + j);
                }
                perm.swap(piv, col);
                sign = -sign;
            }
            let p = lu[col * n + col];
            for r in (col + 1)..n {
                let f = lu[r * n + col] / p;
                lu[r * n + col] = f;
                if f != 0.0 {
                    for j in (col + 1)..n {
                        lu[r * n + j] -= f * lu[col * n + j];
                    }
                }
            }
        }
        Lu {
            n,
            lu,
            perm,
            sign,
            singular,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> f64 {
        if self.singular {
            return 0.0;
        }
        (0..self.n).fold(self.sign, |acc, i| acc * self.lu[i * self.n + i])
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        if self.singular {
            return None;
        }
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.lu[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                x[i] -= self.lu[i * n + j] * x[j];
            }
            x[i] /= self.lu[i * n + i];
        }
        Some(x)
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Option<Vec<f64>> {
        if self.singular {
            return None;
        }
        let n = self.n;
        // Aᵀ = Uᵀ Lᵀ Pᵀ... with PA = LU, Aᵀ Pᵀ = Uᵀ Lᵀ.
        let mut y = b.to_vec();
        for i in 0..n {
            for j in 0..i {
                y[i] -= self.lu[j * n + i] * y[j];
            }
            y[i] /= self.lu[i * n + i];
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                y[i] -= self.lu[j * n + i] * y[j];
            }
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        Some(x)
    }
}

/// Orthonormal basis (Gram–Schmidt with re-orthogonalization) of the span of
/// `vectors`; vectors whose residual norm falls below `tol` are skipped.
pub fn orthonormal_basis(vectors: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&r, b);
                axpy(-c, b, &mut r);
            }
        }
        let norm = dot(&r, &r).sqrt();
        if norm > tol {
            r.iter_mut().for_each(|x| *x /= norm);
            basis.push(r);
        }
    }
    basis
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}
