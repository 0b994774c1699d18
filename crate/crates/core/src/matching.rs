//! Bipartite matching and max-flow on dense integer ids.

use std::collections::VecDeque;

const NIL: usize = usize::MAX;

/// Maximum bipartite matching by Hopcroft–Karp.
///
/// `adj[u]` lists the right vertices adjacent to left vertex `u`. Returns
/// `mate[u]` (the matched right vertex, if any) for every left vertex.
pub fn hopcroft_karp(adj: &[Vec<usize>], right_len: usize) -> Vec<Option<usize>> {
    let n = adj.len();
    let mut mate_l = vec![NIL; n];
    let mut mate_r = vec![NIL; right_len];
    let mut dist = vec![0usize; n];
    loop {
        // layered BFS from free left vertices
        let mut q = VecDeque::new();
        for u in 0..n {
            if mate_l[u] == NIL {
                dist[u] = 0;
                q.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = q.pop_front() {
            for &v in &adj[u] {
                let w = mate_r[v];
                if w == NIL {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    q.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut it = vec![0usize; n];
        for u in 0..n {
            if mate_l[u] == NIL {
                augment(u, adj, &mut mate_l, &mut mate_r, &mut dist, &mut it);
            }
        }
    }
    mate_l.into_iter().map(|v| (v != NIL).then_some(v)).collect()
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    mate_l: &mut [usize],
    mate_r: &mut [usize],
    dist: &mut [usize],
    it: &mut [usize],
) -> bool {
    while it[u] < adj[u].len() {
        let v = adj[u][it[u]];
        it[u] += 1;
        let w = mate_r[v];
        if w == NIL
            || (dist[w] == dist[u] + 1 && augment(w, adj, mate_l, mate_r, dist, it))
        {
            mate_l[u] = v;
            mate_r[v] = u;
            return true;
        }
    }
    dist[u] = usize::MAX;
    false
}

/// Maximum flow by Dinic's algorithm on integer capacities.
pub struct FlowNetwork {
    head: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<i64>,
    next: Vec<usize>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork { head: vec![NIL; nodes], to: Vec::new(), cap: Vec::new(), next: Vec::new() }
    }

    /// Adds an edge and returns its id; the reverse edge is `id ^ 1`.
    pub fn add_edge(&mut self, u: usize, v: usize, c: i64) -> usize {
        let id = self.to.len();
        for (a, b, cc) in [(u, v, c), (v, u, 0)] {
            self.to.push(b);
            self.cap.push(cc);
            self.next.push(self.head[a]);
            self.head[a] = self.to.len() - 1;
        }
        id
    }

    /// Flow currently routed through edge `id`.
    pub fn flow(&self, id: usize) -> i64 {
        self.cap[id ^ 1]
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let n = self.head.len();
        let mut total = 0;
        loop {
            let mut level = vec![usize::MAX; n];
            level[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                let mut e = self.head[u];
                while e != NIL {
                    if self.cap[e] > 0 && level[self.to[e]] == usize::MAX {
                        level[self.to[e]] = level[u] + 1;
                        q.push_back(self.to[e]);
                    }
                    e = self.next[e];
                }
            }
            if level[t] == usize::MAX {
                return total;
            }
            let mut it = self.head.clone();
            loop {
                let f = self.push(s, t, i64::MAX, &level, &mut it);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
    }

    fn push(&mut self, u: usize, t: usize, f: i64, level: &[usize], it: &mut [usize]) -> i64 {
        if u == t {
            return f;
        }
        while it[u] != NIL {
            let e = it[u];
            let v = self.to[e];
            if self.cap[e] > 0 && level[v] == level[u] + 1 {
                let d = self.push(v, t, f.min(self.cap[e]), level, it);
                if d > 0 {
                    self.cap[e] -= d;
                    self.cap[e ^ 1] += d;
                    return d;
                }
            }
            it[u] = self.next[e];
        }
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_and_deficient() {
        let adj = vec![vec![0, 1], vec![0], vec![1, 2]];
        let m = hopcroft_karp(&adj, 3);
        assert_eq!(m.iter().flatten().count(), 3);
        let adj = vec![vec![0], vec![0], vec![0, 1]];
        assert_eq!(hopcroft_karp(&adj, 2).iter().flatten().count(), 2);
    }

    #[test]
    fn flow_small() {
        let mut g = FlowNetwork::new(4);
        g.add_edge(0, 1, 3);
        g.add_edge(0, 2, 2);
        g.add_edge(1, 2, 5);
        g.add_edge(1, 3, 2);
        g.add_edge(2, 3, 3);
        assert_eq!(g.max_flow(0, 3), 5);
    }
}
