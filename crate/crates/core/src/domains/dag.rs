//! Directed acyclic graphs with a designated source and sink, s–t path
//! oracles, and the path-length equalizing transform.

use std::collections::VecDeque;

use crate::action::ActionVector;
use crate::error::{Error, Result};

/// A DAG whose edges all lie on some s–t path. Edge `e` is coordinate `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dag {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    source: usize,
    sink: usize,
    topo: Vec<usize>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    /// Index of each kept edge in the edge list passed to [`Dag::new`].
    input_index: Vec<usize>,
}

impl Dag {
    /// Validates the graph and prunes edges that lie on no s–t path.
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>, source: usize, sink: usize) -> Result<Self> {
        if source >= num_vertices || sink >= num_vertices {
            return Err(Error::invalid("source or sink out of range"));
        }
        if source == sink {
            return Err(Error::invalid("source and sink must differ"));
        }
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= num_vertices || v >= num_vertices) {
            return Err(Error::invalid(format!("edge ({u},{v}) out of range")));
        }
        let topo = topo_sort(num_vertices, &edges)
            .ok_or_else(|| Error::invalid("graph has a directed cycle"))?;

        let mut from_s = vec![false; num_vertices];
        from_s[source] = true;
        for &v in &topo {
            if from_s[v] {
                for &(a, b) in &edges {
                    if a == v {
                        from_s[b] = true;
                    }
                }
            }
        }
        let mut to_t = vec![false; num_vertices];
        to_t[sink] = true;
        for &v in topo.iter().rev() {
            if !to_t[v] && edges.iter().any(|&(a, b)| a == v && to_t[b]) {
                to_t[v] = true;
            }
        }
        if !from_s[sink] {
            return Err(Error::InfeasibleDomain("sink is unreachable from source".into()));
        }
        let mut kept = Vec::new();
        let mut input_index = Vec::new();
        for (i, &(u, v)) in edges.iter().enumerate() {
            if from_s[u] && to_t[v] {
                kept.push((u, v));
                input_index.push(i);
            }
        }
        let mut dag = Dag {
            num_vertices,
            edges: kept,
            source,
            sink,
            topo,
            out_edges: vec![],
            in_edges: vec![],
            input_index,
        };
        dag.index_adjacency();
        Ok(dag)
    }

    fn index_adjacency(&mut self) {
        self.out_edges = vec![Vec::new(); self.num_vertices];
        self.in_edges = vec![Vec::new(); self.num_vertices];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            self.out_edges[u].push(e);
            self.in_edges[v].push(e);
        }
    }

    /// Parses `"V E s t"` followed by `E` lines `"u v"` (0-indexed).
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, header) = lines.next().ok_or_else(|| Error::invalid("empty DAG file"))?;
        let nums = parse_usizes(header, ln, 4)?;
        let (nv, ne, s, t) = (nums[0], nums[1], nums[2], nums[3]);
        let mut edges = Vec::with_capacity(ne);
        for _ in 0..ne {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| Error::invalid(format!("expected {ne} edge lines, found {}", edges.len())))?;
            let uv = parse_usizes(line, ln, 2)?;
            edges.push((uv[0], uv[1]));
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::invalid(format!("line {ln}: unexpected trailing content")));
        }
        Dag::new(nv, edges, s, t)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {} {}\n", self.num_vertices, self.edges.len(), self.source, self.sink);
        for &(u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn input_index(&self) -> &[usize] {
        &self.input_index
    }

    /// Vertices other than s and t that carry at least one edge.
    pub fn internal_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_vertices).filter(move |&v| {
            v != self.source && v != self.sink && !(self.in_edges[v].is_empty() && self.out_edges[v].is_empty())
        })
    }

    /// Number of s–t paths (saturating).
    pub fn path_count(&self) -> u128 {
        let mut count = vec![0u128; self.num_vertices];
        count[self.source] = 1;
        for &v in &self.topo {
            for &e in &self.out_edges[v] {
                let w = self.edges[e].1;
                count[w] = count[w].saturating_add(count[v]);
            }
        }
        count[self.sink]
    }

    /// Number of s–t paths through each edge (saturating).
    pub fn edge_usage(&self) -> Vec<u128> {
        let mut from_s = vec![0u128; self.num_vertices];
        from_s[self.source] = 1;
        for &v in &self.topo {
            for &e in &self.out_edges[v] {
                let w = self.edges[e].1;
                from_s[w] = from_s[w].saturating_add(from_s[v]);
            }
        }
        let mut to_t = vec![0u128; self.num_vertices];
        to_t[self.sink] = 1;
        for &v in self.topo.iter().rev() {
            for &e in &self.out_edges[v] {
                let w = self.edges[e].1;
                to_t[v] = to_t[v].saturating_add(to_t[w]);
            }
        }
        self.edges
            .iter()
            .map(|&(u, v)| from_s[u].saturating_mul(to_t[v]))
            .collect()
    }

    /// Longest path length (in edges) from the source to every vertex;
    /// `None` for vertices the source cannot reach.
    pub fn levels(&self) -> Vec<Option<usize>> {
        let mut lvl: Vec<Option<usize>> = vec![None; self.num_vertices];
        lvl[self.source] = Some(0);
        for &v in &self.topo {
            if let Some(l) = lvl[v] {
                for &e in &self.out_edges[v] {
                    let w = self.edges[e].1;
                    lvl[w] = Some(lvl[w].map_or(l + 1, |x| x.max(l + 1)));
                }
            }
        }
        lvl
    }

    pub fn max_path_length(&self) -> usize {
        self.levels()[self.sink].unwrap_or(0)
    }

    pub fn min_path_length(&self) -> usize {
        let mut dist: Vec<Option<usize>> = vec![None; self.num_vertices];
        dist[self.source] = Some(0);
        for &v in &self.topo {
            if let Some(l) = dist[v] {
                for &e in &self.out_edges[v] {
                    let w = self.edges[e].1;
                    dist[w] = Some(dist[w].map_or(l + 1, |x| x.min(l + 1)));
                }
            }
        }
        dist[self.sink].unwrap_or(0)
    }

    /// Maximum-weight s–t path avoiding `forbidden` edges.
    pub fn longest_path(&self, weights: &[f64], forbidden: &[bool]) -> Option<(f64, ActionVector)> {
        let mut best = vec![f64::NEG_INFINITY; self.num_vertices];
        let mut pred: Vec<Option<usize>> = vec![None; self.num_vertices];
        best[self.source] = 0.0;
        for &v in &self.topo {
            if best[v] == f64::NEG_INFINITY {
                continue;
            }
            for &e in &self.out_edges[v] {
                if forbidden[e] {
                    continue;
                }
                let w = self.edges[e].1;
                let cand = best[v] + weights[e];
                if cand > best[w] {
                    best[w] = cand;
                    pred[w] = Some(e);
                }
            }
        }
        if best[self.sink] == f64::NEG_INFINITY {
            return None;
        }
        Some((best[self.sink], self.trace(&pred)))
    }

    /// The s–t path maximizing the minimum of `flow` over its edges, among
    /// edges with flow above `tol`.
    pub fn max_bottleneck_path(&self, flow: &[f64], tol: f64) -> Option<(f64, ActionVector)> {
        let mut best = vec![f64::NEG_INFINITY; self.num_vertices];
        let mut pred: Vec<Option<usize>> = vec![None; self.num_vertices];
        best[self.source] = f64::INFINITY;
        for &v in &self.topo {
            if best[v] == f64::NEG_INFINITY {
                continue;
            }
            for &e in &self.out_edges[v] {
                if flow[e] <= tol {
                    continue;
                }
                let w = self.edges[e].1;
                let cand = best[v].min(flow[e]);
                if cand > best[w] {
                    best[w] = cand;
                    pred[w] = Some(e);
                }
            }
        }
        if best[self.sink] == f64::NEG_INFINITY {
            return None;
        }
        Some((best[self.sink], self.trace(&pred)))
    }

    fn trace(&self, pred: &[Option<usize>]) -> ActionVector {
        let mut bits = ActionVector::zeros(self.edges.len());
        let mut v = self.sink;
        while v != self.source {
            let e = pred[v].expect("predecessor chain reaches the source");
            bits.set(e, true);
            v = self.edges[e].0;
        }
        bits
    }

    /// All s–t paths as edge-incidence vectors, unsorted.
    pub fn paths(&self) -> Vec<ActionVector> {
        let mut out = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        self.dfs_paths(self.source, &mut stack, &mut out);
        out
    }

    fn dfs_paths(&self, v: usize, stack: &mut Vec<usize>, out: &mut Vec<ActionVector>) {
        if v == self.sink {
            out.push(ActionVector::from_support(self.edges.len(), stack.iter().copied()));
            return;
        }
        for &e in &self.out_edges[v] {
            stack.push(e);
            self.dfs_paths(self.edges[e].1, stack, out);
            stack.pop();
        }
    }

    /// Whether `bits` is the incidence vector of an s–t path.
    pub fn is_path(&self, bits: &ActionVector) -> bool {
        if bits.dim() != self.edges.len() {
            return false;
        }
        let mut v = self.source;
        let mut used = 0;
        let total = bits.weight();
        while v != self.sink {
            let next: Vec<usize> = self.out_edges[v].iter().copied().filter(|&e| bits.get(e)).collect();
            if next.len() != 1 {
                return false;
            }
            used += 1;
            v = self.edges[next[0]].1;
        }
        used == total
    }

    /// Samples a uniformly random s–t path from a uniform draw per step.
    pub fn sample_path(&self, mut uniform: impl FnMut() -> f64) -> ActionVector {
        let mut to_t = vec![0f64; self.num_vertices];
        to_t[self.sink] = 1.0;
        for &v in self.topo.iter().rev() {
            for &e in &self.out_edges[v] {
                to_t[v] += to_t[self.edges[e].1];
            }
        }
        let mut bits = ActionVector::zeros(self.edges.len());
        let mut v = self.source;
        while v != self.sink {
            let u = uniform() * to_t[v];
            let mut acc = 0.0;
            let outs = &self.out_edges[v];
            let mut chosen = *outs.last().expect("non-sink vertex on a path has out-edges");
            for &e in outs {
                acc += to_t[self.edges[e].1];
                if u < acc {
                    chosen = e;
                    break;
                }
            }
            bits.set(chosen, true);
            v = self.edges[chosen].1;
        }
        bits
    }
}

fn parse_usizes(line: &str, ln: usize, n: usize) -> Result<Vec<usize>> {
    let vals: std::result::Result<Vec<usize>, _> = line.split_whitespace().map(str::parse).collect();
    match vals {
        Ok(v) if v.len() == n => Ok(v),
        _ => Err(Error::invalid(format!("line {ln}: expected {n} non-negative integers, got {line:?}"))),
    }
}

fn topo_sort(n: usize, edges: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut indeg = vec![0usize; n];
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        indeg[v] += 1;
        adj[u].push(v);
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &adj[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// A DAG together with the map from its edges back to an original DAG's
/// edges. Padding edges map to `None` and always carry reward zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LeveledDag {
    pub dag: Dag,
    pub original_of: Vec<Option<usize>>,
    pub original_dim: usize,
}

impl LeveledDag {
    /// Embeds a reward vector over the original edges.
    pub fn lift(&self, original: &[f64]) -> Vec<f64> {
        self.original_of
            .iter()
            .map(|o| o.map_or(0.0, |e| original[e]))
            .collect()
    }

    /// Maps a path of the leveled DAG back to the original edge set.
    pub fn project_path(&self, bits: &ActionVector) -> ActionVector {
        ActionVector::from_support(
            self.original_dim,
            bits.ones().filter_map(|e| self.original_of[e]),
        )
    }

    /// Number of padding vertices added by the transform.
    pub fn padding_vertices(&self, original: &Dag) -> usize {
        self.dag.num_vertices() - original.num_vertices()
    }
}

/// Rewrites `g` so that every s–t path has the same number of edges (the
/// longest path length `K` of `g`).
///
/// Each vertex `v` at longest-path level `L(v)` gets a chain of padding
/// vertices at levels below `L(v)`; an edge `(u, v)` skipping levels enters
/// that chain at level `L(u) + 1`. Original edges keep their indices; padding
/// edges are appended after them.
pub fn equalize_path_lengths(g: &Dag) -> LeveledDag {
    let lvl = g.levels();
    let level = |v: usize| lvl[v].expect("every vertex on an s-t path is reachable");
    let mut num_vertices = g.num_vertices();
    let mut edges: Vec<(usize, usize)> = g.edges().to_vec();
    let mut padding: Vec<(usize, usize)> = Vec::new();

    // chain[v][j] = padding vertex for v at level j
    for v in 0..g.num_vertices() {
        let gap_edges: Vec<usize> = g
            .in_edges(v)
            .iter()
            .copied()
            .filter(|&e| level(g.edges()[e].0) + 1 < level(v))
            .collect();
        if gap_edges.is_empty() {
            continue;
        }
        let lv = level(v);
        let lowest = gap_edges.iter().map(|&e| level(g.edges()[e].0) + 1).min().unwrap();
        let chain: Vec<usize> = (lowest..lv).map(|_| {
            num_vertices += 1;
            num_vertices - 1
        }).collect();
        for w in chain.windows(2) {
            padding.push((w[0], w[1]));
        }
        padding.push((*chain.last().unwrap(), v));
        for e in gap_edges {
            let u = g.edges()[e].0;
            edges[e] = (u, chain[level(u) + 1 - lowest]);
        }
    }
    let original_dim = edges.len();
    let mut original_of: Vec<Option<usize>> = (0..original_dim).map(Some).collect();
    original_of.extend(std::iter::repeat_n(None, padding.len()));
    edges.extend(padding);
    let dag = Dag::new(num_vertices, edges, g.source(), g.sink())
        .expect("leveling preserves acyclicity and s-t reachability");
    debug_assert_eq!(dag.num_edges(), original_of.len());
    LeveledDag {
        dag,
        original_of,
        original_dim,
    }
}

/// The shortcut counterexample DAG on vertices `{S, D, A_1..A_n, B_1..B_n}`.
///
/// Edge 0 is the shortcut `(S, D)`; `2^n` further paths of length `n + 1`
/// run through the `A`/`B` ladder.
pub fn build_shortcut_dag(n: usize) -> Result<Dag> {
    if n == 0 {
        return Err(Error::invalid("shortcut DAG needs n >= 1"));
    }
    const S: usize = 0;
    const D: usize = 1;
    let a = |i: usize| 2 + 2 * (i - 1);
    let b = |i: usize| 3 + 2 * (i - 1);
    let mut edges = vec![(S, D), (S, a(1)), (S, b(1))];
    for i in 1..n {
        edges.extend([(a(i), a(i + 1)), (a(i), b(i + 1)), (b(i), a(i + 1)), (b(i), b(i + 1))]);
    }
    edges.extend([(a(n), D), (b(n), D)]);
    Dag::new(2 * n + 2, edges, S, D)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shortcut_line() -> Dag {
        // s=0 -> a=1 -> t=2 plus shortcut s->t (edge 2)
        Dag::new(3, vec![(0, 1), (1, 2), (0, 2)], 0, 2).unwrap()
    }

    #[test]
    fn rejects_cycles_and_prunes_dead_edges() {
        assert!(Dag::new(3, vec![(0, 1), (1, 0), (1, 2)], 0, 2).is_err());
        // edge 2->3 leads nowhere; edge 4->1 is unreachable
        let g = Dag::new(5, vec![(0, 1), (1, 2), (2, 3), (4, 1)], 0, 2).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g.input_index(), &[0, 1]);
    }

    #[test]
    fn longest_path_picks_shortcut() {
        let g = shortcut_line();
        let (v, p) = g.longest_path(&[0.0, 0.0, 1.0], &[false; 3]).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(p.to_string(), "001");
        assert!(g.longest_path(&[0.0, 0.0, 1.0], &[true, false, true]).is_none());
    }

    #[test]
    fn shortcut_dag_sizes() {
        let g = build_shortcut_dag(1).unwrap();
        assert_eq!(g.num_edges(), 5);
        assert_eq!(g.path_count(), 3);
        let g = build_shortcut_dag(3).unwrap();
        assert_eq!(g.num_vertices(), 8);
        assert_eq!(g.num_edges(), 13);
        assert_eq!(g.path_count(), 9);
        assert_eq!(g.paths().len(), 9);
    }

    #[test]
    fn shortcut_dag_edge_usage_matches_counts() {
        for n in 2..=8usize {
            let g = build_shortcut_dag(n).unwrap();
            let usage = g.edge_usage();
            assert_eq!(usage[0], 1);
            let boundary = 1u128 << (n - 1);
            let internal = 1u128 << (n - 2);
            // S->A1, S->B1 and the last two edges into D
            for e in [1, 2, g.num_edges() - 2, g.num_edges() - 1] {
                assert_eq!(usage[e], boundary, "n={n} edge {e}");
            }
            for (e, &u) in usage.iter().enumerate().take(g.num_edges() - 2).skip(3) {
                assert_eq!(u, internal, "n={n} edge {e}");
            }
            // cross-check against enumeration
            let mut counted = vec![0u128; g.num_edges()];
            for p in g.paths() {
                for e in p.ones() {
                    counted[e] += 1;
                }
            }
            assert_eq!(counted, usage);
        }
    }

    #[test]
    fn equalize_identity_when_already_level() {
        let g = Dag::new(4, vec![(0, 1), (0, 2), (1, 3), (2, 3)], 0, 3).unwrap();
        let lv = equalize_path_lengths(&g);
        assert_eq!(lv.dag, g);
        assert!(lv.original_of.iter().all(Option::is_some));
    }

    #[test]
    fn equalize_pads_single_shortcut() {
        let g = shortcut_line();
        let lv = equalize_path_lengths(&g);
        assert_eq!(lv.padding_vertices(&g), 1);
        let lens: Vec<usize> = lv.dag.paths().iter().map(ActionVector::weight).collect();
        assert_eq!(lens, vec![2, 2]);
    }

    #[test]
    fn equalize_shortcut_dag_within_padding_bound() {
        for n in 1..=6 {
            let g = build_shortcut_dag(n).unwrap();
            let lv = equalize_path_lengths(&g);
            let k = g.max_path_length();
            assert_eq!(lv.dag.min_path_length(), k);
            assert_eq!(lv.dag.max_path_length(), k);
            let added_edges = lv.dag.num_edges() - g.num_edges();
            let bound = (k.saturating_sub(2)) * (g.num_vertices() - 2) + 1;
            assert!(lv.padding_vertices(&g) <= bound);
            assert!(added_edges <= bound);
            assert_eq!(lv.dag.path_count(), g.path_count());
        }
    }

    #[test]
    fn parse_round_trip_and_errors() {
        let g = build_shortcut_dag(2).unwrap();
        assert_eq!(Dag::parse(&g.to_text()).unwrap(), g);
        assert!(Dag::parse("3 2 0 2\n0 1\n").is_err());
        assert!(Dag::parse("3 1 0 2\n0 x\n").is_err());
    }

    #[test]
    fn sampled_paths_are_paths() {
        let g = build_shortcut_dag(3).unwrap();
        let mut state = 0.123_f64;
        for _ in 0..50 {
            let p = g.sample_path(|| {
                state = (state * 9301.0 + 0.49297).fract();
                state
            });
            assert!(g.is_path(&p));
        }
    }
}
