//! Combinatorial action sets: m-sets, DAG paths, spanning trees, k-forests,
//! permutations and truncated permutations.
//!
//! Every set exposes its dimension `d`, weight `m`, a membership test, an
//! exact linear maximization oracle with lexicographic tie-breaking, and a
//! count-guarded enumerator for brute-force checks.

mod assignment;
pub mod dag;
pub mod graph;

use rand::Rng;

pub use assignment::max_weight_assignment;
pub use dag::{build_shortcut_dag, equalize_path_lengths, Dag, LeveledDag};
pub use graph::UGraph;

use crate::action::ActionVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainKind {
    MSets,
    DagPaths,
    SpanningTrees,
    KForests,
    Permutations,
    TruncatedPermutations,
}

impl DomainKind {
    pub fn name(self) -> &'static str {
        match self {
            DomainKind::MSets => "m_sets",
            DomainKind::DagPaths => "dag_paths",
            DomainKind::SpanningTrees => "spanning_trees",
            DomainKind::KForests => "k_forests",
            DomainKind::Permutations => "permutations",
            DomainKind::TruncatedPermutations => "truncated_permutations",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// All `m`-subsets of `d` items.
    MSets { d: usize, m: usize },
    /// s–t paths of a DAG. `leveled` records whether all paths share one length.
    DagPaths(LeveledDag),
    SpanningTrees(UGraph),
    KForests { graph: UGraph, k: usize },
    /// `n × n` permutation matrices, coordinate `i * n + j`.
    Permutations { n: usize },
    /// Injective maps `[k] → [n]`, coordinate `i * n + j`.
    TruncatedPermutations { k: usize, n: usize },
}

/// An immutable combinatorial action set `A ⊂ {0,1}^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSet {
    domain: Domain,
    d: usize,
    m: usize,
    fixed_weight: bool,
}

/// Absolute slack, relative to the weight scale, when comparing oracle values.
const VALUE_TOL: f64 = 1e-10;

impl ActionSet {
    pub fn m_sets(d: usize, m: usize) -> Result<Self> {
        if m == 0 || m > d {
            return Err(Error::invalid(format!("m-sets need 1 <= m <= d, got m={m}, d={d}")));
        }
        Ok(ActionSet {
            domain: Domain::MSets { d, m },
            d,
            m,
            fixed_weight: true,
        })
    }

    /// Paths of `dag` as given. Path lengths may differ.
    pub fn dag_paths(dag: Dag) -> Result<Self> {
        let d = dag.num_edges();
        let lv = LeveledDag {
            original_of: (0..d).map(Some).collect(),
            original_dim: d,
            dag,
        };
        Ok(Self::from_leveled(lv))
    }

    /// Paths of `dag` after length equalization, so that `‖M‖₁ = m` holds.
    pub fn leveled_dag_paths(dag: &Dag) -> Result<Self> {
        Ok(Self::from_leveled(equalize_path_lengths(dag)))
    }

    fn from_leveled(lv: LeveledDag) -> Self {
        let d = lv.dag.num_edges();
        let m = lv.dag.max_path_length();
        let fixed_weight = lv.dag.min_path_length() == m;
        ActionSet {
            domain: Domain::DagPaths(lv),
            d,
            m,
            fixed_weight,
        }
    }

    pub fn spanning_trees(graph: UGraph) -> Result<Self> {
        if !graph.is_connected() {
            return Err(Error::InfeasibleDomain("graph is disconnected: no spanning tree".into()));
        }
        if graph.num_vertices() < 2 {
            return Err(Error::invalid("spanning trees need at least two vertices"));
        }
        let d = graph.num_edges();
        let m = graph.num_vertices() - 1;
        Ok(ActionSet {
            domain: Domain::SpanningTrees(graph),
            d,
            m,
            fixed_weight: true,
        })
    }

    pub fn k_forests(graph: UGraph, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("k-forests need k >= 1"));
        }
        if graph.rank() < k {
            return Err(Error::InfeasibleDomain(format!(
                "graph has no forest with {k} edges (rank {})",
                graph.rank()
            )));
        }
        let d = graph.num_edges();
        Ok(ActionSet {
            domain: Domain::KForests { graph, k },
            d,
            m: k,
            fixed_weight: true,
        })
    }

    pub fn permutations(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("permutations need n >= 1"));
        }
        Ok(ActionSet {
            domain: Domain::Permutations { n },
            d: n * n,
            m: n,
            fixed_weight: true,
        })
    }

    pub fn truncated_permutations(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::invalid(format!("truncated permutations need 1 <= k <= n, got k={k}, n={n}")));
        }
        Ok(ActionSet {
            domain: Domain::TruncatedPermutations { k, n },
            d: k * n,
            m: k,
            fixed_weight: true,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Action weight `m` (the maximum weight for variable-weight sets).
    pub fn weight(&self) -> usize {
        self.m
    }

    /// Whether every action has `‖M‖₁ = m`.
    pub fn is_fixed_weight(&self) -> bool {
        self.fixed_weight
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn kind(&self) -> DomainKind {
        match self.domain {
            Domain::MSets { .. } => DomainKind::MSets,
            Domain::DagPaths(_) => DomainKind::DagPaths,
            Domain::SpanningTrees(_) => DomainKind::SpanningTrees,
            Domain::KForests { .. } => DomainKind::KForests,
            Domain::Permutations { .. } => DomainKind::Permutations,
            Domain::TruncatedPermutations { .. } => DomainKind::TruncatedPermutations,
        }
    }

    /// The DAG behind a path domain.
    pub fn dag(&self) -> Option<&LeveledDag> {
        match &self.domain {
            Domain::DagPaths(lv) => Some(lv),
            _ => None,
        }
    }

    /// Embeds a reward vector given over the original coordinates (only DAG
    /// domains differ; padding edges receive 0).
    pub fn lift_reward(&self, original: &[f64]) -> Vec<f64> {
        match &self.domain {
            Domain::DagPaths(lv) => lv.lift(original),
            _ => original.to_vec(),
        }
    }

    /// Dimension of the coordinates rewards are expressed in.
    pub fn reward_dim(&self) -> usize {
        match &self.domain {
            Domain::DagPaths(lv) => lv.original_dim,
            _ => self.d,
        }
    }

    pub fn contains(&self, a: &ActionVector) -> bool {
        if a.dim() != self.d {
            return false;
        }
        match &self.domain {
            Domain::MSets { m, .. } => a.weight() == *m,
            Domain::DagPaths(lv) => lv.dag.is_path(a),
            Domain::SpanningTrees(g) => g.is_forest_of_size(a, self.m),
            Domain::KForests { graph, k } => graph.is_forest_of_size(a, *k),
            Domain::Permutations { n } => is_injection(a, *n, *n, true),
            Domain::TruncatedPermutations { k, n } => is_injection(a, *k, *n, false),
        }
    }

    /// Best value and a maximizer of `w · M` over actions avoiding the
    /// `forbidden` coordinates; `None` if no such action exists.
    pub(crate) fn best_avoiding(&self, w: &[f64], forbidden: &[bool]) -> Option<(f64, ActionVector)> {
        match &self.domain {
            Domain::MSets { d, m } => {
                let mut idx: Vec<usize> = (0..*d).filter(|&i| !forbidden[i]).collect();
                if idx.len() < *m {
                    return None;
                }
                idx.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b)));
                idx.truncate(*m);
                let v = idx.iter().map(|&i| w[i]).sum();
                Some((v, ActionVector::from_support(*d, idx)))
            }
            Domain::DagPaths(lv) => lv.dag.longest_path(w, forbidden),
            Domain::SpanningTrees(g) => g.max_weight_forest(self.m, w, forbidden),
            Domain::KForests { graph, k } => graph.max_weight_forest(*k, w, forbidden),
            Domain::Permutations { n } => assignment_action(*n, *n, w, forbidden),
            Domain::TruncatedPermutations { k, n } => assignment_action(*k, *n, w, forbidden),
        }
    }

    fn check_weights(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.d {
            return Err(Error::invalid(format!("weight vector has length {}, expected {}", w.len(), self.d)));
        }
        if w.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("weights must be finite"));
        }
        Ok(())
    }

    fn infeasible(&self) -> Error {
        Error::InfeasibleDomain(format!("{} has no actions", self.kind().name()))
    }

    /// `max_{M ∈ A} w · M` without computing a tie-broken maximizer.
    pub fn max_value(&self, w: &[f64]) -> Result<f64> {
        self.check_weights(w)?;
        self.best_avoiding(w, &vec![false; self.d])
            .map(|(v, _)| v)
            .ok_or_else(|| self.infeasible())
    }

    /// A maximizer of `w · M` without tie-breaking guarantees (cheaper than
    /// [`ActionSet::lmo`]).
    pub fn argmax_any(&self, w: &[f64]) -> Result<(f64, ActionVector)> {
        self.check_weights(w)?;
        self.best_avoiding(w, &vec![false; self.d])
            .ok_or_else(|| self.infeasible())
    }

    /// `argmax_{M ∈ A} w · M`, ties broken toward the lexicographically
    /// smallest bit vector.
    ///
    /// Coordinates are fixed in order: coordinate `i` is forbidden whenever
    /// some optimal action consistent with the earlier choices avoids it.
    pub fn lmo(&self, w: &[f64]) -> Result<ActionVector> {
        self.check_weights(w)?;
        let mut forbidden = vec![false; self.d];
        let (best, mut current) = self.best_avoiding(w, &forbidden).ok_or_else(|| self.infeasible())?;
        let tol = VALUE_TOL * w.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        for i in 0..self.d {
            if !current.get(i) {
                forbidden[i] = true;
                continue;
            }
            forbidden[i] = true;
            match self.best_avoiding(w, &forbidden) {
                Some((v, a)) if v >= best - tol => current = a,
                _ => forbidden[i] = false,
            }
        }
        Ok(current)
    }

    /// Number of actions (saturating).
    pub fn count(&self) -> u128 {
        match &self.domain {
            Domain::MSets { d, m } => binomial(*d as u128, *m as u128),
            Domain::DagPaths(lv) => lv.dag.path_count(),
            Domain::SpanningTrees(g) => g.spanning_tree_count(),
            Domain::KForests { graph, k } => {
                let mut c = 0u128;
                graph.for_each_forest(*k, u128::MAX, |_| c += 1);
                c
            }
            Domain::Permutations { n } => falling_factorial(*n as u128, *n as u128),
            Domain::TruncatedPermutations { k, n } => falling_factorial(*n as u128, *k as u128),
        }
    }

    /// Count, but stop counting once it exceeds `cap`.
    fn count_capped(&self, cap: u128) -> u128 {
        match &self.domain {
            Domain::KForests { graph, k } => {
                let mut c = 0u128;
                let limit = cap.saturating_add(1);
                graph.for_each_forest(*k, limit, |_| c += 1);
                c
            }
            _ => self.count(),
        }
    }

    /// All actions in lexicographic order; fails with `TooLarge` when
    /// `|A| > cap`.
    pub fn enumerate(&self, cap: usize) -> Result<Vec<ActionVector>> {
        let cap128 = cap as u128;
        let count = self.count_capped(cap128);
        if count > cap128 {
            return Err(Error::TooLarge { count, cap: cap128 });
        }
        let mut out: Vec<ActionVector> = match &self.domain {
            Domain::MSets { d, m } => {
                let mut out = Vec::new();
                let mut comb: Vec<usize> = (0..*m).collect();
                loop {
                    out.push(ActionVector::from_support(*d, comb.iter().copied()));
                    let mut i = *m;
                    let mut advanced = false;
                    while i > 0 {
                        i -= 1;
                        if comb[i] < d - m + i {
                            comb[i] += 1;
                            for j in (i + 1)..*m {
                                comb[j] = comb[j - 1] + 1;
                            }
                            advanced = true;
                            break;
                        }
                    }
                    if !advanced {
                        break;
                    }
                }
                out
            }
            Domain::DagPaths(lv) => lv.dag.paths(),
            Domain::SpanningTrees(g) => {
                let mut out = Vec::new();
                g.for_each_forest(self.m, u128::MAX, |es| {
                    out.push(ActionVector::from_support(self.d, es.iter().copied()))
                });
                out
            }
            Domain::KForests { graph, k } => {
                let mut out = Vec::new();
                graph.for_each_forest(*k, u128::MAX, |es| {
                    out.push(ActionVector::from_support(self.d, es.iter().copied()))
                });
                out
            }
            Domain::Permutations { n } => injections(*n, *n),
            Domain::TruncatedPermutations { k, n } => injections(*k, *n),
        };
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// A uniformly random action, where that is cheap to sample exactly.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<ActionVector> {
        match &self.domain {
            Domain::MSets { d, m } => {
                let idx = rand::seq::index::sample(rng, *d, *m);
                Some(ActionVector::from_support(*d, idx.into_iter()))
            }
            Domain::DagPaths(lv) => Some(lv.dag.sample_path(|| rng.gen::<f64>())),
            Domain::Permutations { n } => Some(random_injection(rng, *n, *n)),
            Domain::TruncatedPermutations { k, n } => Some(random_injection(rng, *k, *n)),
            Domain::SpanningTrees(_) | Domain::KForests { .. } => {
                let all = self.enumerate(100_000).ok()?;
                Some(all[rng.gen_range(0..all.len())].clone())
            }
        }
    }
}

fn assignment_action(rows: usize, cols: usize, w: &[f64], forbidden: &[bool]) -> Option<(f64, ActionVector)> {
    let (v, assign) = max_weight_assignment(rows, cols, w, forbidden)?;
    Some((
        v,
        ActionVector::from_support(rows * cols, assign.iter().enumerate().map(|(i, &j)| i * cols + j)),
    ))
}

fn is_injection(a: &ActionVector, rows: usize, cols: usize, square: bool) -> bool {
    let mut col_used = vec![false; cols];
    for i in 0..rows {
        let ones: Vec<usize> = (0..cols).filter(|&j| a.get(i * cols + j)).collect();
        if ones.len() != 1 || col_used[ones[0]] {
            return false;
        }
        col_used[ones[0]] = true;
    }
    !square || col_used.iter().all(|&u| u)
}

fn injections(rows: usize, cols: usize) -> Vec<ActionVector> {
    fn rec(i: usize, rows: usize, cols: usize, used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<ActionVector>) {
        if i == rows {
            out.push(ActionVector::from_support(
                rows * cols,
                cur.iter().enumerate().map(|(r, &c)| r * cols + c),
            ));
            return;
        }
        for j in 0..cols {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                rec(i + 1, rows, cols, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(0, rows, cols, &mut vec![false; cols], &mut Vec::new(), &mut out);
    out
}

fn random_injection<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ActionVector {
    let cols_chosen = rand::seq::index::sample(rng, cols, rows).into_vec();
    ActionVector::from_support(rows * cols, cols_chosen.iter().enumerate().map(|(r, &c)| r * cols + c))
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

fn falling_factorial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i))
}
