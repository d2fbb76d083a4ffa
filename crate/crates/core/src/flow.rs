//! Exact min-weight vertex cover on bipartite graphs via max-flow/min-cut.

use crate::{Error, Ratio, Result};
use num_traits::Zero;
use std::collections::VecDeque;

/// Vertex-weighted bipartite graph; edges go between the two sides.
#[derive(Clone, Debug, Default)]
pub struct BipartiteGraph {
    pub left: Vec<Ratio>,
    pub right: Vec<Ratio>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

struct FlowEdge {
    to: usize,
    cap: Ratio,
}

/// Residual network with paired forward/backward edges.
struct FlowNetwork {
    edges: Vec<FlowEdge>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    fn new(vertices: usize) -> Self {
        FlowNetwork { edges: Vec::new(), adj: vec![Vec::new(); vertices] }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: Ratio) {
        self.adj[from].push(self.edges.len());
        self.edges.push(FlowEdge { to, cap });
        self.adj[to].push(self.edges.len());
        self.edges.push(FlowEdge { to: from, cap: Ratio::zero() });
    }

    /// Edmonds-Karp; exact rational arithmetic throughout.
    fn max_flow(&mut self, source: usize, sink: usize) -> Ratio {
        let mut total = Ratio::zero();
        loop {
            // BFS for a shortest augmenting path.
            let mut pred: Vec<Option<usize>> = vec![None; self.adj.len()];
            let mut queue = VecDeque::from([source]);
            'bfs: while let Some(u) = queue.pop_front() {
                for &eid in &self.adj[u] {
                    let e = &self.edges[eid];
                    if e.cap.is_zero() || e.to == source || pred[e.to].is_some() {
                        continue;
                    }
                    pred[e.to] = Some(eid);
                    if e.to == sink {
                        break 'bfs;
                    }
                    queue.push_back(e.to);
                }
            }
            if pred[sink].is_none() {
                return total;
            }
            let mut bottleneck: Option<Ratio> = None;
            let mut v = sink;
            while v != source {
                let eid = pred[v].unwrap();
                let cap = &self.edges[eid].cap;
                if bottleneck.as_ref().is_none_or(|b| cap < b) {
                    bottleneck = Some(cap.clone());
                }
                v = self.edges[eid ^ 1].to;
            }
            let aug = bottleneck.unwrap();
            let mut v = sink;
            while v != source {
                let eid = pred[v].unwrap();
                self.edges[eid].cap -= &aug;
                self.edges[eid ^ 1].cap += &aug;
                v = self.edges[eid ^ 1].to;
            }
            total += aug;
        }
    }

    /// Vertices reachable from `source` in the residual graph.
    fn residual_reachable(&self, source: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[source] = true;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &eid in &self.adj[u] {
                let e = &self.edges[eid];
                if !e.cap.is_zero() && !seen[e.to] {
                    seen[e.to] = true;
                    queue.push_back(e.to);
                }
            }
        }
        seen
    }
}

/// Exact minimum-weight vertex cover, with a realizing cover. Uses the
/// min-cut correspondence: source→left arcs carry the left weights,
/// right→sink arcs the right weights, and cross arcs are effectively
/// unbounded, so a finite cut picks exactly a cover.
pub fn min_weight_vertex_cover(g: &BipartiteGraph) -> Result<(Ratio, Vec<(Side, usize)>)> {
    for w in g.left.iter().chain(&g.right) {
        if *w < Ratio::zero() {
            return Err(Error::Precondition("negative vertex weight".into()));
        }
    }
    let nl = g.left.len();
    let nr = g.right.len();
    let source = nl + nr;
    let sink = source + 1;
    let mut net = FlowNetwork::new(nl + nr + 2);
    let infinite: Ratio = g.left.iter().chain(&g.right).sum::<Ratio>() + Ratio::from_integer(1.into());
    for (u, w) in g.left.iter().enumerate() {
        net.add_edge(source, u, w.clone());
    }
    for (v, w) in g.right.iter().enumerate() {
        net.add_edge(nl + v, sink, w.clone());
    }
    for &(u, v) in &g.edges {
        if u >= nl || v >= nr {
            return Err(Error::Precondition(format!("edge ({u},{v}) out of range")));
        }
        net.add_edge(u, nl + v, infinite.clone());
    }
    let weight = net.max_flow(source, sink);
    let reachable = net.residual_reachable(source);
    let mut cover = Vec::new();
    for u in 0..nl {
        if !reachable[u] {
            cover.push((Side::Left, u));
        }
    }
    for v in 0..nr {
        if reachable[nl + v] {
            cover.push((Side::Right, v));
        }
    }
    Ok((weight, cover))
}

/// Checks that `cover` touches every edge.
pub fn is_vertex_cover(g: &BipartiteGraph, cover: &[(Side, usize)]) -> bool {
    g.edges.iter().all(|&(u, v)| {
        cover.contains(&(Side::Left, u)) || cover.contains(&(Side::Right, v))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;
    use rand::{Rng, SeedableRng};

    fn brute_force_min_cover(g: &BipartiteGraph) -> Ratio {
        let nl = g.left.len();
        let total = nl + g.right.len();
        assert!(total <= 20);
        let mut best: Option<Ratio> = None;
        for mask in 0u32..(1 << total) {
            let covered = g.edges.iter().all(|&(u, v)| {
                mask & (1 << u) != 0 || mask & (1 << (nl + v)) != 0
            });
            if !covered {
                continue;
            }
            let mut w = Ratio::zero();
            for (i, wt) in g.left.iter().chain(&g.right).enumerate() {
                if mask & (1 << i) != 0 {
                    w += wt;
                }
            }
            if best.as_ref().is_none_or(|b| w < *b) {
                best = Some(w);
            }
        }
        best.unwrap()
    }

    #[test]
    fn single_edge() {
        let g = BipartiteGraph {
            left: vec![ratio(3, 1)],
            right: vec![ratio(5, 1)],
            edges: vec![(0, 0)],
        };
        let (w, cover) = min_weight_vertex_cover(&g).unwrap();
        assert_eq!(w, ratio(3, 1));
        assert_eq!(cover, vec![(Side::Left, 0)]);
    }

    #[test]
    fn empty_graph() {
        let g = BipartiteGraph { left: vec![ratio(1, 1)], right: vec![], edges: vec![] };
        let (w, cover) = min_weight_vertex_cover(&g).unwrap();
        assert!(w.is_zero());
        assert!(cover.is_empty());
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..200 {
            let nl = rng.gen_range(1..=8);
            let nr = rng.gen_range(1..=8);
            let left = (0..nl).map(|_| ratio(rng.gen_range(0..20), rng.gen_range(1..4))).collect();
            let right = (0..nr).map(|_| ratio(rng.gen_range(0..20), rng.gen_range(1..4))).collect();
            let mut edges = Vec::new();
            for u in 0..nl {
                for v in 0..nr {
                    if rng.gen_bool(0.3) {
                        edges.push((u, v));
                    }
                }
            }
            let g = BipartiteGraph { left, right, edges };
            let (w, cover) = min_weight_vertex_cover(&g).unwrap();
            assert_eq!(w, brute_force_min_cover(&g));
            assert!(is_vertex_cover(&g, &cover));
            let cover_weight: Ratio = cover
                .iter()
                .map(|&(side, i)| match side {
                    Side::Left => g.left[i].clone(),
                    Side::Right => g.right[i].clone(),
                })
                .sum();
            assert_eq!(cover_weight, w);
        }
    }
}
