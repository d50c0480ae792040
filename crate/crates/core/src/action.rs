//! Binary action vectors and sparse distributions over them.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// A binary vector `M ∈ {0,1}^d`. Ordering is lexicographic on the bits.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionVector(Box<[u8]>);

impl ActionVector {
    pub fn zeros(d: usize) -> Self {
        ActionVector(vec![0u8; d].into_boxed_slice())
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::invalid("action entries must be 0 or 1"));
        }
        Ok(ActionVector(bits.to_vec().into_boxed_slice()))
    }

    /// Builds the indicator vector of `ones` in dimension `d`.
    pub fn from_support(d: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut bits = vec![0u8; d];
        for i in ones {
            bits[i] = 1;
        }
        ActionVector(bits.into_boxed_slice())
    }

    /// Parses a string such as `"0110"`.
    pub fn parse(s: &str) -> Result<Self> {
        let bits: Option<Vec<u8>> = s
            .chars()
            .map(|c| match c {
                '0' => Some(0),
                '1' => Some(1),
                _ => None,
            })
            .collect();
        bits.map(|b| ActionVector(b.into_boxed_slice()))
            .ok_or_else(|| Error::invalid(format!("not a bit string: {s:?}")))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i] == 1
    }

    pub fn set(&mut self, i: usize, on: bool) {
        self.0[i] = on as u8;
    }

    pub fn weight(&self) -> usize {
        self.0.iter().map(|&b| b as usize).sum()
    }

    /// Indices of the nonzero coordinates.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(i, _)| i)
    }

    pub fn dot(&self, w: &[f64]) -> f64 {
        debug_assert_eq!(w.len(), self.dim());
        self.ones().map(|i| w[i]).sum()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&b| b as f64).collect()
    }
}

impl fmt::Debug for ActionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ActionVector({self})")
    }
}

impl fmt::Display for ActionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in self.0.iter() {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Tolerance on the total mass of a distribution.
pub const MASS_TOL: f64 = 1e-9;

/// A sparse probability distribution over action vectors.
///
/// Atoms are kept merged (no duplicate actions) and in insertion order, so
/// sampling with a fixed stream is reproducible.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Policy {
    atoms: Vec<(ActionVector, f64)>,
}

impl Policy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn point_mass(action: ActionVector) -> Self {
        Policy {
            atoms: vec![(action, 1.0)],
        }
    }

    pub fn uniform(actions: impl IntoIterator<Item = ActionVector>) -> Self {
        let actions: Vec<_> = actions.into_iter().collect();
        let w = 1.0 / actions.len() as f64;
        let mut p = Policy::new();
        for a in actions {
            p.add(a, w);
        }
        p
    }

    /// Builds a policy from weighted atoms, merging duplicates and dropping
    /// zero weights. Rejects negative or non-finite weights.
    pub fn from_atoms(atoms: impl IntoIterator<Item = (ActionVector, f64)>) -> Result<Self> {
        let mut p = Policy::new();
        for (a, w) in atoms {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::invalid(format!("policy weight {w} is not a probability")));
            }
            p.add(a, w);
        }
        Ok(p)
    }

    /// Adds `w` to the weight of `action`.
    pub fn add(&mut self, action: ActionVector, w: f64) {
        if w == 0.0 {
            return;
        }
        if let Some(slot) = self.atoms.iter_mut().find(|(a, _)| *a == action) {
            slot.1 += w;
        } else {
            self.atoms.push((action, w));
        }
    }

    pub fn atoms(&self) -> &[(ActionVector, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.atoms.first().map(|(a, _)| a.dim())
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    pub fn weight_of(&self, action: &ActionVector) -> f64 {
        self.atoms
            .iter()
            .find(|(a, _)| a == action)
            .map_or(0.0, |(_, w)| *w)
    }

    /// Checks nonnegativity and unit mass within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.atoms.is_empty() {
            return Err(Error::EmptySupport);
        }
        let d = self.atoms[0].0.dim();
        if self.atoms.iter().any(|(a, _)| a.dim() != d) {
            return Err(Error::invalid("policy atoms have mixed dimensions"));
        }
        if self.atoms.iter().any(|(_, w)| !(*w >= 0.0)) {
            return Err(Error::invalid("negative policy weight"));
        }
        let mass = self.total_mass();
        if (mass - 1.0).abs() > tol {
            return Err(Error::invalid(format!("policy mass {mass} differs from 1")));
        }
        Ok(())
    }

    /// Rescales the weights to sum to one.
    pub fn normalize(&mut self) {
        let mass = self.total_mass();
        if mass > 0.0 {
            for (_, w) in &mut self.atoms {
                *w /= mass;
            }
        }
    }

    /// Drops atoms with weight at most `tol` and renormalizes.
    pub fn prune(&mut self, tol: f64) {
        self.atoms.retain(|(_, w)| *w > tol);
        self.normalize();
    }

    /// `(1 - gamma) * self + gamma * other`.
    pub fn mix(&self, other: &Policy, gamma: f64) -> Policy {
        let mut out = Policy::new();
        if gamma < 1.0 {
            for (a, w) in &self.atoms {
                out.add(a.clone(), (1.0 - gamma) * w);
            }
        }
        if gamma > 0.0 {
            for (a, w) in &other.atoms {
                out.add(a.clone(), gamma * w);
            }
        }
        out
    }

    /// The mean vector `Σ p(M) M`.
    pub fn mean(&self) -> Vec<f64> {
        let d = self.dim().unwrap_or(0);
        let mut x = vec![0.0; d];
        for (a, w) in &self.atoms {
            for i in a.ones() {
                x[i] += w;
            }
        }
        x
    }

    /// Expected linear reward `Σ p(M) (r · M)`.
    pub fn expected_reward(&self, reward: &[f64]) -> f64 {
        self.atoms.iter().map(|(a, w)| w * a.dot(reward)).sum()
    }

    /// Index of the atom selected by a uniform draw `u ∈ [0,1)`.
    pub fn pick(&self, u: f64) -> usize {
        let mass = self.total_mass();
        let target = u * mass;
        let mut acc = 0.0;
        for (i, (_, w)) in self.atoms.iter().enumerate() {
            acc += w;
            if target < acc {
                return i;
            }
        }
        // u*mass can round to the full mass; fall back to the last positive atom.
        self.atoms
            .iter()
            .rposition(|(_, w)| *w > 0.0)
            .unwrap_or(self.atoms.len().saturating_sub(1))
    }

    /// Atoms sorted by action, for order-independent comparisons.
    pub fn sorted(&self) -> BTreeMap<ActionVector, f64> {
        let mut m = BTreeMap::new();
        for (a, w) in &self.atoms {
            *m.entry(a.clone()).or_insert(0.0) += w;
        }
        m
    }
}
