//! Polytope primitives over `conv(A)`: decomposing a hull point into a
//! sparse distribution over actions, and KL projection onto `P = conv(A)/m`.
//!
//! Both work in hull coordinates `x = m q`.

mod colgen;
mod entropic;
mod maxflow;

use crate::action::{ActionVector, Policy};
use crate::domains::{ActionSet, Domain, UGraph};
use crate::error::{Error, Result};

pub use colgen::{caratheodory_reduce, decompose_by_columns};
pub use entropic::generalized_kl;
use entropic::{Constraint, Projector, Sense};
use maxflow::FlowNetwork;

/// Entries below this are treated as exact zeros while peeling.
const ZERO_TOL: f64 = 1e-12;
/// Maximum reconstruction error accepted from a decomposition.
pub const RECONSTRUCTION_TOL: f64 = 1e-7;

/// Decomposes `m q ∈ conv(A)` into a distribution over actions whose mean
/// is `m q`, with at most `d + 1` atoms.
pub fn decompose(set: &ActionSet, q: &[f64]) -> Result<Policy> {
    if q.len() != set.dim() {
        return Err(Error::invalid(format!("point has length {}, expected {}", q.len(), set.dim())));
    }
    let m = set.weight() as f64;
    let x: Vec<f64> = q.iter().map(|v| (m * v).max(0.0)).collect();
    decompose_point(set, &x)
}

/// Decomposes a hull point `x ∈ conv(A)` given in action coordinates.
pub fn decompose_point(set: &ActionSet, x: &[f64]) -> Result<Policy> {
    if x.iter().any(|v| !v.is_finite() || *v < -ZERO_TOL) {
        return Err(Error::invalid("hull point has negative or non-finite entries"));
    }
    let x: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
    let p = match set.domain() {
        Domain::MSets { m, .. } => sorted_levels(&x, *m)?,
        Domain::Permutations { n } => birkhoff(&x, *n, *n)?,
        Domain::TruncatedPermutations { k, n } => birkhoff(&x, *k, *n)?,
        Domain::DagPaths(lv) => flow_paths(lv, &x)?,
        Domain::SpanningTrees(_) | Domain::KForests { .. } => decompose_by_columns(set, &x)?,
    };
    let p = if p.len() > set.dim() + 1 { caratheodory_reduce(&p) } else { p };
    let residual = p
        .mean()
        .iter()
        .zip(&x)
        .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    if p.is_empty() || residual > RECONSTRUCTION_TOL {
        return Err(Error::NotInHull { residual });
    }
    Ok(p)
}

/// Whether `x` lies in `conv(A)` (via a successful decomposition).
pub fn in_hull(set: &ActionSet, x: &[f64]) -> bool {
    decompose_point(set, x).is_ok()
}

/// m-sets: `x ∈ λ·conv(A)` iff `0 ≤ x ≤ λ` and `Σx = mλ`. Each step takes
/// the tight coordinates plus the largest others and peels as much as keeps
/// that invariant.
fn sorted_levels(x: &[f64], m: usize) -> Result<Policy> {
    let d = x.len();
    let mut y = x.to_vec();
    let mut lambda: f64 = y.iter().sum::<f64>() / m as f64;
    let mut p = Policy::new();
    for _ in 0..=d + 1 {
        if lambda <= ZERO_TOL {
            break;
        }
        let mut order: Vec<usize> = (0..d).collect();
        let tight = |v: f64| v >= lambda - ZERO_TOL;
        order.sort_by(|&a, &b| {
            tight(y[b])
                .cmp(&tight(y[a]))
                .then(y[b].total_cmp(&y[a]))
                .then(a.cmp(&b))
        });
        let (inside, outside) = order.split_at(m);
        let min_in = inside.iter().map(|&i| y[i]).fold(f64::INFINITY, f64::min);
        let max_out = outside.iter().map(|&i| y[i]).fold(0.0, f64::max);
        let alpha = min_in.min(lambda - max_out).min(lambda);
        if alpha <= ZERO_TOL {
            break;
        }
        for &i in inside {
            y[i] = (y[i] - alpha).max(0.0);
            if y[i] < ZERO_TOL {
                y[i] = 0.0;
            }
        }
        lambda -= alpha;
        p.add(ActionVector::from_support(d, inside.iter().copied()), alpha);
    }
    p.normalize();
    Ok(p)
}

/// Perfect matching of rows into columns using only allowed cells.
fn find_matching(rows: usize, cols: usize, allowed: &dyn Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    fn augment(
        i: usize,
        cols: usize,
        allowed: &dyn Fn(usize, usize) -> bool,
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for j in 0..cols {
            if allowed(i, j) && !seen[j] {
                seen[j] = true;
                if owner[j].is_none() || augment(owner[j].unwrap(), cols, allowed, seen, owner) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    let mut owner: Vec<Option<usize>> = vec![None; cols];
    for i in 0..rows {
        let mut seen = vec![false; cols];
        if !augment(i, cols, allowed, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut assign = vec![0; rows];
    for (j, o) in owner.iter().enumerate() {
        if let Some(i) = o {
            assign[*i] = j;
        }
    }
    Some(assign)
}

/// Birkhoff–von Neumann peeling with a maximum-bottleneck matching each step.
/// Truncated `k × n` points are completed to `n × n` with dummy rows.
fn birkhoff(x: &[f64], k: usize, n: usize) -> Result<Policy> {
    let mut y = vec![0.0; n * n];
    y[..k * n].copy_from_slice(x);
    if k < n {
        for j in 0..n {
            let col: f64 = (0..k).map(|i| x[i * n + j]).sum();
            let slack = ((1.0 - col) / (n - k) as f64).max(0.0);
            for i in k..n {
                y[i * n + j] = slack;
            }
        }
    }
    let mut p = Policy::new();
    let mut remaining: f64 = y[..n].iter().sum();
    for _ in 0..(n * n + 1) {
        let mut levels: Vec<f64> = y.iter().copied().filter(|v| *v > ZERO_TOL).collect();
        if levels.is_empty() || remaining <= ZERO_TOL {
            break;
        }
        levels.sort_by(|a, b| b.total_cmp(a));
        levels.dedup();
        // Largest threshold admitting a perfect matching.
        let (mut lo, mut hi) = (0usize, levels.len() - 1);
        let ok = |th: f64| find_matching(n, n, &|i, j| y[i * n + j] >= th);
        if ok(levels[hi]).is_none() {
            break;
        }
        while lo < hi {
            let mid = (lo + hi) / 2;
            if ok(levels[mid]).is_some() {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let assign = ok(levels[lo]).expect("threshold admits a matching");
        let alpha = (0..n).map(|i| y[i * n + assign[i]]).fold(f64::INFINITY, f64::min);
        for (i, &j) in assign.iter().enumerate() {
            let v = &mut y[i * n + j];
            *v -= alpha;
            if *v < ZERO_TOL {
                *v = 0.0;
            }
        }
        remaining -= alpha;
        p.add(
            ActionVector::from_support(k * n, assign[..k].iter().enumerate().map(|(i, &j)| i * n + j)),
            alpha,
        );
    }
    p.normalize();
    Ok(p)
}

/// Path decomposition of a unit s–t flow, peeling the maximum-bottleneck
/// path each step.
fn flow_paths(lv: &crate::domains::LeveledDag, x: &[f64]) -> Result<Policy> {
    let g = &lv.dag;
    let mut flow = x.to_vec();
    let mut p = Policy::new();
    for _ in 0..=g.num_edges() {
        let Some((alpha, path)) = g.max_bottleneck_path(&flow, ZERO_TOL) else {
            break;
        };
        for e in path.ones() {
            flow[e] -= alpha;
            if flow[e] < ZERO_TOL {
                flow[e] = 0.0;
            }
        }
        p.add(path, alpha);
    }
    p.normalize();
    Ok(p)
}

/// Generalized-KL projection of `q_raw > 0` onto `P = conv(A)/m`.
pub fn kl_project(set: &ActionSet, q_raw: &[f64]) -> Result<Vec<f64>> {
    if q_raw.len() != set.dim() {
        return Err(Error::invalid(format!("point has length {}, expected {}", q_raw.len(), set.dim())));
    }
    if q_raw.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::invalid("projection input must be finite and nonnegative"));
    }
    let m = set.weight() as f64;
    let y: Vec<f64> = q_raw.iter().map(|v| m * v).collect();
    let x = match set.domain() {
        Domain::MSets { m, .. } => waterfill(&y, *m as f64),
        _ => project_hull(set, &y)?,
    };
    Ok(x.into_iter().map(|v| v / m).collect())
}

/// Projection onto `{0 ≤ x ≤ 1, Σx = m}`: `x_i = min(1, c·y_i)` with `c`
/// chosen to meet the sum.
fn waterfill(y: &[f64], m: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..y.len()).collect();
    order.sort_by(|&a, &b| y[b].total_cmp(&y[a]).then(a.cmp(&b)));
    let mut rest: f64 = y.iter().sum();
    let mut scale = 0.0;
    for (capped, &i) in order.iter().enumerate() {
        scale = (m - capped as f64) / rest;
        if scale * y[i] <= 1.0 {
            break;
        }
        rest -= y[i];
    }
    y.iter().map(|&v| (scale * v).min(1.0)).collect()
}

/// The constraint system of `conv(A)` used by the entropic projection
/// (tree and forest rank constraints are separated lazily).
fn hull_constraints(set: &ActionSet) -> Vec<Constraint> {
    match set.domain() {
        Domain::MSets { d, m } => {
            let mut cs = vec![Constraint::sum_eq((0..*d).collect(), *m as f64)];
            cs.extend((0..*d).map(|i| Constraint::sum_le(vec![i], 1.0)));
            cs
        }
        Domain::Permutations { n } => {
            let n = *n;
            let mut cs: Vec<Constraint> = (0..n).map(|i| Constraint::sum_eq((0..n).map(|j| i * n + j).collect(), 1.0)).collect();
            cs.extend((0..n).map(|j| Constraint::sum_eq((0..n).map(|i| i * n + j).collect(), 1.0)));
            cs
        }
        Domain::TruncatedPermutations { k, n } => {
            let (k, n) = (*k, *n);
            let mut cs: Vec<Constraint> = (0..k).map(|i| Constraint::sum_eq((0..n).map(|j| i * n + j).collect(), 1.0)).collect();
            cs.extend((0..n).map(|j| Constraint::sum_le((0..k).map(|i| i * n + j).collect(), 1.0)));
            cs
        }
        Domain::DagPaths(lv) => {
            let g = &lv.dag;
            let mut cs = vec![Constraint::sum_eq(g.out_edges(g.source()).to_vec(), 1.0)];
            for v in g.internal_vertices() {
                cs.push(Constraint {
                    plus: g.in_edges(v).to_vec(),
                    minus: g.out_edges(v).to_vec(),
                    rhs: 0.0,
                    sense: Sense::Eq,
                });
            }
            cs
        }
        Domain::SpanningTrees(g) => vec![Constraint::sum_eq((0..g.num_edges()).collect(), (g.num_vertices() - 1) as f64)],
        Domain::KForests { graph, k } => vec![Constraint::sum_eq((0..graph.num_edges()).collect(), *k as f64)],
    }
}

fn forest_graph(set: &ActionSet) -> Option<&UGraph> {
    match set.domain() {
        Domain::SpanningTrees(g) => Some(g),
        Domain::KForests { graph, .. } => Some(graph),
        _ => None,
    }
}

/// Slack below which a subtour constraint counts as violated.
const SEPARATION_TOL: f64 = 1e-9;

/// Vertex sets `U` with `x(E(U)) > |U| − 1`, found by one min cut per
/// forced vertex.
fn violated_subtours(g: &UGraph, x: &[f64]) -> Vec<Vec<usize>> {
    let n = g.num_vertices();
    let mut deg = vec![0.0; n];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        deg[u] += x[e];
        deg[v] += x[e];
    }
    let mut found: Vec<Vec<usize>> = Vec::new();
    for forced in 0..n {
        // min over U ∋ forced of Σ_{i∈U}(1 − deg_i/2) + x(δ(U))/2 = |U| − x(E(U)).
        let (s, t) = (n, n + 1);
        let mut net = FlowNetwork::new(n + 2);
        let mut offset = 0.0;
        for i in 0..n {
            let w = 1.0 - deg[i] / 2.0;
            if i == forced {
                net.add_arc(s, i, f64::INFINITY);
                offset += w;
            } else if w >= 0.0 {
                net.add_arc(i, t, w);
            } else {
                net.add_arc(s, i, -w);
                offset += w;
            }
        }
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            if x[e] > 0.0 {
                net.add_arc(u, v, x[e] / 2.0);
                net.add_arc(v, u, x[e] / 2.0);
            }
        }
        let (cut, side) = net.min_cut(s, t, 1e-15);
        // Arcs from s into forced carry infinite capacity; the forced vertex's
        // own term is already in the offset.
        let value = cut + offset;
        if value < 1.0 - SEPARATION_TOL {
            let u: Vec<usize> = (0..n).filter(|&i| side[i]).collect();
            if u.len() >= 2 && !found.contains(&u) {
                found.push(u);
            }
        }
    }
    found
}

fn subtour_constraint(g: &UGraph, u: &[usize]) -> Constraint {
    let mut inside = vec![false; g.num_vertices()];
    for &v in u {
        inside[v] = true;
    }
    let idx = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, &(a, b))| inside[a] && inside[b])
        .map(|(e, _)| e)
        .collect();
    Constraint::sum_le(idx, (u.len() - 1) as f64)
}

fn project_hull(set: &ActionSet, y: &[f64]) -> Result<Vec<f64>> {
    let mut proj = Projector::new(y, hull_constraints(set));
    let Some(g) = forest_graph(set) else {
        proj.run()?;
        return Ok(proj.x);
    };
    // Cutting planes: project onto the current pool, then add violated
    // rank constraints until none remain.
    loop {
        proj.run()?;
        let cuts: Vec<Constraint> = violated_subtours(g, &proj.x)
            .iter()
            .map(|u| subtour_constraint(g, u))
            .filter(|c| !proj.constraints.contains(c))
            .collect();
        if cuts.is_empty() {
            return Ok(proj.x);
        }
        for c in cuts {
            proj.add(c);
        }
    }
}

/// Entropic projection through the generic constraint engine for any kind
/// (m-sets included), used to cross-check closed-form projections.
pub fn kl_project_generic(set: &ActionSet, q_raw: &[f64]) -> Result<Vec<f64>> {
    let m = set.weight() as f64;
    let y: Vec<f64> = q_raw.iter().map(|v| m * v).collect();
    Ok(project_hull(set, &y)?.into_iter().map(|v| v / m).collect())
}

#[cfg(test)]
mod tests;
