//! Small Edmonds–Karp max-flow on real capacities, used for subtour
//! separation.

use std::collections::VecDeque;

pub(crate) struct FlowNetwork {
    n: usize,
    // (to, capacity, reverse arc index)
    adj: Vec<Vec<(usize, f64, usize)>>,
}

impl FlowNetwork {
    pub(crate) fn new(n: usize) -> Self {
        FlowNetwork {
            n,
            adj: vec![Vec::new(); n],
        }
    }

    pub(crate) fn add_arc(&mut self, u: usize, v: usize, cap: f64) {
        let ru = self.adj[v].len();
        let rv = self.adj[u].len();
        self.adj[u].push((v, cap, ru));
        self.adj[v].push((u, 0.0, rv));
    }

    /// Maximum flow value and the source side of a minimum cut.
    pub(crate) fn min_cut(&mut self, s: usize, t: usize, eps: f64) -> (f64, Vec<bool>) {
        let mut total = 0.0;
        loop {
            let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.n];
            let mut seen = vec![false; self.n];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for (i, &(v, cap, _)) in self.adj[u].iter().enumerate() {
                    if cap > eps && !seen[v] {
                        seen[v] = true;
                        prev[v] = Some((u, i));
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return (total, seen);
            }
            let mut bottleneck = f64::INFINITY;
            let mut v = t;
            while let Some((u, i)) = prev[v] {
                bottleneck = bottleneck.min(self.adj[u][i].1);
                v = u;
            }
            let mut v = t;
            while let Some((u, i)) = prev[v] {
                self.adj[u][i].1 -= bottleneck;
                let (to, _, rev) = self.adj[u][i];
                self.adj[to][rev].1 += bottleneck;
                v = u;
            }
            total += bottleneck;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_network() {
        let mut g = FlowNetwork::new(4);
        g.add_arc(0, 1, 3.0);
        g.add_arc(0, 2, 2.0);
        g.add_arc(1, 2, 1.0);
        g.add_arc(1, 3, 2.0);
        g.add_arc(2, 3, 3.0);
        let (f, side) = g.min_cut(0, 3, 1e-12);
        assert!((f - 5.0).abs() < 1e-12);
        assert!(side[0] && !side[3]);
    }
}
