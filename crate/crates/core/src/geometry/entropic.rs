//! Generalized-KL projection onto polyhedra given by ±1-coefficient linear
//! constraints, by cyclic dual coordinate ascent (Bregman projections with
//! corrections for inequalities).

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Sense {
    Eq,
    Le,
}

/// `Σ_{i∈plus} x_i − Σ_{i∈minus} x_i (= or ≤) rhs`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Constraint {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    pub rhs: f64,
    pub sense: Sense,
}

impl Constraint {
    pub(crate) fn sum_eq(idx: Vec<usize>, rhs: f64) -> Self {
        Constraint { plus: idx, minus: vec![], rhs, sense: Sense::Eq }
    }

    pub(crate) fn sum_le(idx: Vec<usize>, rhs: f64) -> Self {
        Constraint { plus: idx, minus: vec![], rhs, sense: Sense::Le }
    }

    pub(crate) fn value(&self, x: &[f64]) -> f64 {
        self.plus.iter().map(|&i| x[i]).sum::<f64>() - self.minus.iter().map(|&i| x[i]).sum::<f64>()
    }

    pub(crate) fn violation(&self, x: &[f64]) -> f64 {
        let v = self.value(x) - self.rhs;
        match self.sense {
            Sense::Eq => v.abs(),
            Sense::Le => v.max(0.0),
        }
    }
}

pub(crate) const CHANGE_TOL: f64 = 1e-9;
pub(crate) const MAX_CYCLES: usize = 10_000;
pub(crate) const ACCEPT_RESIDUAL: f64 = 1e-6;

/// Projection state: the iterate and one dual variable per constraint.
pub(crate) struct Projector {
    pub x: Vec<f64>,
    pub constraints: Vec<Constraint>,
    duals: Vec<f64>,
    pub cycles: usize,
}

impl Projector {
    pub(crate) fn new(y: &[f64], constraints: Vec<Constraint>) -> Self {
        let n = constraints.len();
        Projector {
            x: y.to_vec(),
            constraints,
            duals: vec![0.0; n],
            cycles: 0,
        }
    }

    pub(crate) fn add(&mut self, c: Constraint) {
        self.constraints.push(c);
        self.duals.push(0.0);
    }

    pub(crate) fn residual(&self) -> f64 {
        self.constraints
            .iter()
            .map(|c| c.violation(&self.x))
            .fold(0.0, f64::max)
    }

    /// Exact dual step for constraint `c`: returns the multiplicative factor
    /// change `log u` applied to `plus` (and `−log u` to `minus`).
    fn step(&mut self, ci: usize) -> f64 {
        let c = &self.constraints[ci];
        let p: f64 = c.plus.iter().map(|&i| self.x[i]).sum();
        let n: f64 = c.minus.iter().map(|&i| self.x[i]).sum();
        let b = c.rhs;
        // Solve P u² − b u − N = 0 for u = e^δ > 0.
        let u = if p > 0.0 {
            let disc = (b * b + 4.0 * p * n).sqrt();
            if b >= 0.0 {
                (b + disc) / (2.0 * p)
            } else {
                // Stable form of the same root.
                2.0 * n / (disc - b)
            }
        } else if n > 0.0 && b < 0.0 {
            -n / b
        } else {
            return 0.0;
        };
        if !(u > 0.0) || !u.is_finite() {
            return 0.0;
        }
        let mut delta = u.ln();
        if c.sense == Sense::Le {
            // Keep the multiplier of an inequality on the correct side.
            let z = self.duals[ci];
            delta = (z + delta).min(0.0) - z;
        }
        if delta == 0.0 {
            return 0.0;
        }
        self.duals[ci] += delta;
        let (f, g) = (delta.exp(), (-delta).exp());
        for &i in &c.plus {
            self.x[i] *= f;
        }
        for &i in &c.minus {
            self.x[i] *= g;
        }
        delta
    }

    /// Cycles through the constraints until the iterate moves less than
    /// `CHANGE_TOL` per cycle, or the global cycle budget runs out.
    pub(crate) fn run(&mut self) -> Result<()> {
        while self.cycles < MAX_CYCLES {
            self.cycles += 1;
            let before = self.x.clone();
            for ci in 0..self.constraints.len() {
                self.step(ci);
            }
            let change = before
                .iter()
                .zip(&self.x)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            if change < CHANGE_TOL {
                return Ok(());
            }
        }
        let residual = self.residual();
        if residual > ACCEPT_RESIDUAL {
            return Err(Error::NoConvergence {
                residual,
                cycles: self.cycles,
            });
        }
        Ok(())
    }
}

/// Projects `y > 0` onto `{x : constraints}` in generalized KL.
#[cfg(test)]
fn project(y: &[f64], constraints: Vec<Constraint>) -> Result<Vec<f64>> {
    let mut p = Projector::new(y, constraints);
    p.run()?;
    Ok(p.x)
}

/// Generalized KL divergence `Σ x log(x/y) − x + y`.
pub fn generalized_kl(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&a, &b)| {
            let t = if a > 0.0 { a * (a / b).ln() } else { 0.0 };
            t - a + b
        })
        .sum()
}
