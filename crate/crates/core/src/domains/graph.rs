//! Undirected multigraph oracles for spanning trees and k-forests.

use crate::action::ActionVector;
use crate::error::{Error, Result};
use crate::linalg::Lu;

#[derive(Debug, Clone, PartialEq)]
pub struct UGraph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

impl UGraph {
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if num_vertices == 0 {
            return Err(Error::invalid("graph needs at least one vertex"));
        }
        for &(u, v) in &edges {
            if u >= num_vertices || v >= num_vertices {
                return Err(Error::invalid(format!("edge ({u},{v}) out of range")));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
        }
        Ok(UGraph { num_vertices, edges })
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        UGraph { num_vertices: n, edges }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Rank of the graphic matroid: `|V|` minus the number of components.
    pub fn rank(&self) -> usize {
        let mut uf = UnionFind::new(self.num_vertices);
        self.edges.iter().filter(|&&(u, v)| uf.union(u, v)).count()
    }

    pub fn is_connected(&self) -> bool {
        self.rank() + 1 == self.num_vertices
    }

    /// Maximum-weight forest with exactly `k` edges avoiding `forbidden`
    /// (greedy on the truncated graphic matroid).
    pub fn max_weight_forest(&self, k: usize, weights: &[f64], forbidden: &[bool]) -> Option<(f64, ActionVector)> {
        let mut order: Vec<usize> = (0..self.edges.len()).filter(|&e| !forbidden[e]).collect();
        order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
        let mut uf = UnionFind::new(self.num_vertices);
        let mut chosen = Vec::with_capacity(k);
        for e in order {
            if chosen.len() == k {
                break;
            }
            let (u, v) = self.edges[e];
            if uf.union(u, v) {
                chosen.push(e);
            }
        }
        if chosen.len() < k {
            return None;
        }
        let value = chosen.iter().map(|&e| weights[e]).sum();
        Some((value, ActionVector::from_support(self.edges.len(), chosen)))
    }

    pub fn is_forest_of_size(&self, bits: &ActionVector, k: usize) -> bool {
        if bits.dim() != self.edges.len() || bits.weight() != k {
            return false;
        }
        let mut uf = UnionFind::new(self.num_vertices);
        bits.ones().all(|e| uf.union(self.edges[e].0, self.edges[e].1))
    }

    /// Spanning-tree count by the matrix-tree theorem (rounded, saturating).
    pub fn spanning_tree_count(&self) -> u128 {
        let n = self.num_vertices;
        if n == 1 {
            return 1;
        }
        let m = n - 1;
        let mut lap = vec![0.0; m * m];
        for &(u, v) in &self.edges {
            for (a, b) in [(u, v), (v, u)] {
                if a < m {
                    lap[a * m + a] += 1.0;
                    if b < m {
                        lap[a * m + b] -= 1.0;
                    }
                }
            }
        }
        let det = Lu::new(m, &lap).det();
        if det <= 0.5 {
            0
        } else if det >= u128::MAX as f64 {
            u128::MAX
        } else {
            det.round() as u128
        }
    }

    /// Calls `visit` on every `k`-edge forest, stopping early (returning
    /// false) once `limit` forests have been visited without finishing.
    pub fn for_each_forest(&self, k: usize, limit: u128, mut visit: impl FnMut(&[usize])) -> bool {
        let mut count = 0u128;
        let mut chosen = Vec::with_capacity(k);
        let uf = UnionFind::new(self.num_vertices);
        self.forests_rec(0, k, uf, &mut chosen, &mut count, limit, &mut visit)
    }

    #[allow(clippy::too_many_arguments)]
    fn forests_rec(
        &self,
        start: usize,
        k: usize,
        uf: UnionFind,
        chosen: &mut Vec<usize>,
        count: &mut u128,
        limit: u128,
        visit: &mut impl FnMut(&[usize]),
    ) -> bool {
        if chosen.len() == k {
            if *count >= limit {
                return false;
            }
            *count += 1;
            visit(chosen);
            return true;
        }
        let need = k - chosen.len();
        for e in start..self.edges.len() {
            if self.edges.len() - e < need {
                break;
            }
            let mut next = uf.clone();
            let (u, v) = self.edges[e];
            if next.union(u, v) {
                chosen.push(e);
                let ok = self.forests_rec(e + 1, k, next, chosen, count, limit, visit);
                chosen.pop();
                if !ok {
                    return false;
                }
            }
        }
        true
    }
}
