//! Dinic's algorithm on real capacities.
//!
//! Residual capacities are stored directly, so an edge saturated by an
//! augmentation ends at exactly `0.0`; all comparisons are exact.

use std::collections::VecDeque;

#[derive(Clone, Debug)]
struct Edge {
    to: usize,
    rev: usize,
    cap: f64,
}

#[derive(Clone, Debug)]
pub struct FlowNetwork {
    adj: Vec<Vec<Edge>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork { adj: vec![Vec::new(); nodes], level: vec![-1; nodes], iter: vec![0; nodes] }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: f64) {
        debug_assert!(cap >= 0.0);
        let rev_from = self.adj[to].len() + usize::from(from == to);
        let rev_to = self.adj[from].len();
        self.adj[from].push(Edge { to, rev: rev_from, cap });
        self.adj[to].push(Edge { to: from, rev: rev_to, cap: 0.0 });
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for e in &self.adj[v] {
                if e.cap > 0.0 && self.level[e.to] < 0 {
                    self.level[e.to] = self.level[v] + 1;
                    queue.push_back(e.to);
                }
            }
        }
    }

    /// Pushes up to `limit` along level-increasing paths, several at once.
    fn dfs(&mut self, v: usize, t: usize, limit: f64) -> f64 {
        if v == t {
            return limit;
        }
        let mut rem = limit;
        let mut total = 0.0;
        while self.iter[v] < self.adj[v].len() {
            let i = self.iter[v];
            let Edge { to, rev, cap } = self.adj[v][i];
            if cap > 0.0 && self.level[v] < self.level[to] {
                let pushed = self.dfs(to, t, rem.min(cap));
                if pushed > 0.0 {
                    let e = &mut self.adj[v][i];
                    e.cap = if pushed >= e.cap { 0.0 } else { e.cap - pushed };
                    self.adj[to][rev].cap += pushed;
                    total += pushed;
                    rem -= pushed;
                    if rem <= 0.0 {
                        return total;
                    }
                }
            }
            self.iter[v] += 1;
        }
        self.level[v] = -1;
        total
    }

    /// Maximum `s`–`t` flow value.
    pub fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut flow = 0.0;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return flow;
            }
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, f64::INFINITY);
                if f <= 0.0 {
                    break;
                }
                flow += f;
            }
        }
    }

    /// Nodes reachable from `s` in the residual graph (the source side of a min cut).
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for e in &self.adj[v] {
                if e.cap > 0.0 && !seen[e.to] {
                    seen[e.to] = true;
                    queue.push_back(e.to);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_network() {
        // CLRS figure 26.1, max flow 23
        let mut g = FlowNetwork::new(6);
        for &(a, b, c) in &[
            (0, 1, 16.0),
            (0, 2, 13.0),
            (1, 3, 12.0),
            (2, 1, 4.0),
            (2, 4, 14.0),
            (3, 2, 9.0),
            (3, 5, 20.0),
            (4, 3, 7.0),
            (4, 5, 4.0),
        ] {
            g.add_edge(a, b, c);
        }
        assert_eq!(g.max_flow(0, 5), 23.0);
        let side = g.source_side(0);
        assert!(side[0] && !side[5]);
    }

    #[test]
    fn cut_value_equals_flow() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = 8;
            let mut g = FlowNetwork::new(n);
            let mut edges = Vec::new();
            for _ in 0..20 {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                if a != b {
                    let c: f64 = rng.gen_range(0.0..5.0);
                    g.add_edge(a, b, c);
                    edges.push((a, b, c));
                }
            }
            let flow = g.max_flow(0, n - 1);
            let side = g.source_side(0);
            assert!(!side[n - 1]);
            let cut: f64 = edges.iter().filter(|(a, b, _)| side[*a] && !side[*b]).map(|e| e.2).sum();
            assert!((cut - flow).abs() < 1e-9, "{cut} vs {flow}");
        }
    }
}
