//! Dinic's algorithm on real capacities.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

/// Arcs are stored in twin pairs `(2k, 2k + 1)`; `res[a]` is the residual
/// capacity and pushing along `a` credits `a ^ 1`.
pub(crate) struct MaxFlow {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<f64>,
    res: Vec<f64>,
    level: Vec<i32>,
    next: Vec<usize>,
    eps: f64,
}

impl MaxFlow {
    pub fn new(n: usize, eps: f64) -> Self {
        MaxFlow {
            adj: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
            res: Vec::new(),
            level: vec![0; n],
            next: vec![0; n],
            eps,
        }
    }

    /// Adds `u → v` with capacity `forward` and `v → u` with capacity
    /// `backward`; returns the index of the forward arc.
    pub fn add(&mut self, u: usize, v: usize, forward: f64, backward: f64) -> usize {
        let a = self.to.len();
        self.to.extend([v, u]);
        self.cap.extend([forward, backward]);
        self.res.extend([forward, backward]);
        self.adj[u].push(a);
        self.adj[v].push(a + 1);
        a
    }

    pub fn set_capacity(&mut self, arc: usize, forward: f64, backward: f64) {
        self.cap[arc] = forward;
        self.cap[arc ^ 1] = backward;
    }

    /// Net amount sent along `arc` (negative when it went the other way).
    pub fn net_flow(&self, arc: usize) -> f64 {
        self.cap[arc] - self.res[arc]
    }

    pub fn run(&mut self, s: usize, t: usize) -> f64 {
        self.res.copy_from_slice(&self.cap);
        let mut total = 0.0;
        while self.bfs(s, t) {
            self.next.iter_mut().for_each(|x| *x = 0);
            loop {
                let pushed = self.dfs(s, t, f64::INFINITY);
                if pushed <= 0.0 {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[u] {
                let v = self.to[a];
                if self.level[v] < 0 && self.res[a] > self.eps {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, limit: f64) -> f64 {
        if u == t {
            return limit;
        }
        while self.next[u] < self.adj[u].len() {
            let a = self.adj[u][self.next[u]];
            let v = self.to[a];
            if self.res[a] > self.eps && self.level[v] == self.level[u] + 1 {
                let d = self.dfs(v, t, limit.min(self.res[a]));
                if d > 0.0 {
                    self.res[a] -= d;
                    self.res[a ^ 1] += d;
                    return d;
                }
            }
            self.next[u] += 1;
        }
        0.0
    }

    /// Nodes reachable from `s` through arcs with residual above `eps`; after
    /// [`run`](Self::run) this is the source side of a minimum cut.
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for &a in &self.adj[u] {
                let v = self.to[a];
                if !seen[v] && self.res[a] > self.eps {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}
