//! Dinic max-flow on integer capacities.

use std::collections::VecDeque;

#[derive(Clone, Copy, Debug)]
struct Arc {
    to: usize,
    cap: i64,
    rev: usize,
}

#[derive(Clone, Debug)]
pub struct FlowNetwork {
    adj: Vec<Vec<Arc>>,
    /// (node, position in adj[node]) of every arc added through `add_edge`,
    /// with the capacity it started with
    edges: Vec<(usize, usize, i64)>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

/// Handle to an arc added with [`FlowNetwork::add_edge`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeRef(usize);

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            adj: vec![Vec::new(); nodes],
            edges: Vec::new(),
            level: vec![0; nodes],
            iter: vec![0; nodes],
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Directed arc `from -> to` with capacity `cap`.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64) -> EdgeRef {
        self.add_arc_pair(from, to, cap, 0)
    }

    /// Undirected edge: capacity `cap` in both directions.
    pub fn add_undirected(&mut self, a: usize, b: usize, cap: i64) -> EdgeRef {
        self.add_arc_pair(a, b, cap, cap)
    }

    fn add_arc_pair(&mut self, from: usize, to: usize, cap: i64, back: i64) -> EdgeRef {
        let fwd_pos = self.adj[from].len();
        let rev_pos = self.adj[to].len() + usize::from(from == to);
        self.adj[from].push(Arc { to, cap, rev: rev_pos });
        self.adj[to].push(Arc { to: from, cap: back, rev: fwd_pos });
        self.edges.push((from, fwd_pos, cap));
        EdgeRef(self.edges.len() - 1)
    }

    /// Net flow pushed along an arc added with `add_edge`.
    pub fn flow(&self, e: EdgeRef) -> i64 {
        let (node, pos, cap) = self.edges[e.0];
        cap - self.adj[node][pos].cap
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        let mut queue = VecDeque::new();
        self.level[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for a in &self.adj[v] {
                if a.cap > 0 && self.level[a.to] < 0 {
                    self.level[a.to] = self.level[v] + 1;
                    queue.push_back(a.to);
                }
            }
        }
    }

    // Iterative blocking-flow search; recursion depth would reach the path
    // length, which is O(nodes) on grid graphs.
    fn augment(&mut self, s: usize, t: usize, limit: i64) -> i64 {
        let mut stack: Vec<usize> = vec![s];
        loop {
            let v = *stack.last().unwrap();
            if v == t {
                let mut f = limit;
                for w in &stack[..stack.len() - 1] {
                    let a = self.adj[*w][self.iter[*w]];
                    f = f.min(a.cap);
                }
                for w in &stack[..stack.len() - 1] {
                    let pos = self.iter[*w];
                    let a = self.adj[*w][pos];
                    self.adj[*w][pos].cap -= f;
                    self.adj[a.to][a.rev].cap += f;
                }
                return f;
            }
            let mut advanced = false;
            while self.iter[v] < self.adj[v].len() {
                let a = self.adj[v][self.iter[v]];
                if a.cap > 0 && self.level[v] < self.level[a.to] {
                    stack.push(a.to);
                    advanced = true;
                    break;
                }
                self.iter[v] += 1;
            }
            if !advanced {
                stack.pop();
                match stack.last() {
                    Some(&u) => {
                        self.level[v] = -1;
                        self.iter[u] += 1;
                    }
                    None => return 0,
                }
            }
        }
    }

    /// Maximum flow from `s` to `t`, stopping early once `limit` is reached.
    pub fn max_flow_limited(&mut self, s: usize, t: usize, limit: i64) -> i64 {
        let mut total = 0;
        while total < limit {
            self.bfs(s);
            if self.level[t] < 0 {
                break;
            }
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.augment(s, t, limit - total);
                if f == 0 {
                    break;
                }
                total += f;
                if total >= limit {
                    break;
                }
            }
        }
        total
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        self.max_flow_limited(s, t, i64::MAX)
    }

    /// Nodes reachable from `s` in the residual network. After a maximum
    /// flow this is the source side of the minimal minimum cut.
    pub fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut queue = VecDeque::from([s]);
        seen[s] = true;
        while let Some(v) = queue.pop_front() {
            for a in &self.adj[v] {
                if a.cap > 0 && !seen[a.to] {
                    seen[a.to] = true;
                    queue.push_back(a.to);
                }
            }
        }
        seen
    }

    /// Arcs `v -> w` with positive flow, as recorded by `add_edge` handles.
    pub fn positive_flow_arcs(&self) -> Vec<(usize, usize, i64)> {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(k, &(node, pos, _))| {
                let f = self.flow(EdgeRef(k));
                (f > 0).then(|| (node, self.adj[node][pos].to, f))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_example() {
        // CLRS figure 26.1: max flow 23
        let mut g = FlowNetwork::new(6);
        for (u, v, c) in [(0, 1, 16), (0, 2, 13), (1, 3, 12), (2, 1, 4), (2, 4, 14), (3, 2, 9), (3, 5, 20), (4, 3, 7), (4, 5, 4)] {
            g.add_edge(u, v, c);
        }
        assert_eq!(g.max_flow(0, 5), 23);
        let side = g.residual_reachable(0);
        assert!(side[0] && !side[5]);
    }

    #[test]
    fn undirected_path() {
        let mut g = FlowNetwork::new(3);
        g.add_undirected(2, 1, 5);
        g.add_undirected(1, 0, 3);
        assert_eq!(g.max_flow(0, 2), 3);
    }

    #[test]
    fn limit_stops_early() {
        let mut g = FlowNetwork::new(2);
        g.add_edge(0, 1, 10);
        assert_eq!(g.max_flow_limited(0, 1, 4), 4);
    }

    #[test]
    fn long_path_does_not_overflow_stack() {
        let n = 200_000;
        let mut g = FlowNetwork::new(n);
        for v in 0..n - 1 {
            g.add_edge(v, v + 1, 1);
        }
        assert_eq!(g.max_flow(0, n - 1), 1);
    }
}
