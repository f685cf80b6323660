//! Simple undirected graphs over dense node indices.

use std::collections::VecDeque;
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::design::{derive_params, sorted_intersection_len, Design, ParamsError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) has an endpoint outside 0..{2}")]
    NodeOutOfRange(usize, usize, usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
}

/// Undirected simple graph; adjacency kept as one neighbour bitset per node.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<FixedBitSet>,
    edge_count: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.node_count())
            .field("edges", &self.edges())
            .finish()
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self {
            adj: vec![FixedBitSet::with_capacity(n); n],
            edge_count: 0,
        }
    }

    /// Builds a graph, rejecting self-loops, out-of-range endpoints and duplicates.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n);
        for (a, b) in edges {
            g.try_add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for a in 0..n {
            for b in a + 1..n {
                g.add_edge(a, b);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::empty(n);
        for a in 0..n {
            g.add_edge(a, (a + 1) % n);
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Self::empty(n);
        for a in 1..n {
            g.add_edge(a - 1, a);
        }
        g
    }

    fn try_add_edge(&mut self, a: usize, b: usize) -> Result<(), GraphError> {
        let n = self.node_count();
        if a >= n || b >= n {
            return Err(GraphError::NodeOutOfRange(a, b, n));
        }
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        if self.has_edge(a, b) {
            return Err(GraphError::DuplicateEdge(a.min(b), a.max(b)));
        }
        self.adj[a].insert(b);
        self.adj[b].insert(a);
        self.edge_count += 1;
        Ok(())
    }

    /// Adds `{a, b}`; returns `false` if it was already present. Panics on a
    /// self-loop or an out-of-range endpoint.
    pub fn add_edge(&mut self, a: usize, b: usize) -> bool {
        assert!(a != b, "self-loop at node {a}");
        if self.adj[a].contains(b) {
            return false;
        }
        self.adj[a].insert(b);
        self.adj[b].insert(a);
        self.edge_count += 1;
        true
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) -> bool {
        if !self.has_edge(a, b) {
            return false;
        }
        self.adj[a].set(b, false);
        self.adj[b].set(a, false);
        self.edge_count -= 1;
        true
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.node_count() && self.adj[a].contains(b)
    }

    pub fn degree(&self, a: usize) -> usize {
        self.adj[a].count_ones(..)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.node_count())
            .map(|a| self.degree(a))
            .max()
            .unwrap_or(0)
    }

    pub fn neighbor_set(&self, a: usize) -> &FixedBitSet {
        &self.adj[a]
    }

    pub fn neighbors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[a].ones()
    }

    pub fn common_neighbor_count(&self, a: usize, b: usize) -> usize {
        self.adj[a].intersection_count(&self.adj[b])
    }

    /// All edges `(a, b)` with `a < b`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for a in 0..self.node_count() {
            out.extend(self.adj[a].ones().filter(|&b| b > a).map(|b| (a, b)));
        }
        out
    }

    pub fn complement(&self) -> Graph {
        let n = self.node_count();
        let mut g = Graph::empty(n);
        for a in 0..n {
            for b in a + 1..n {
                if !self.has_edge(a, b) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    /// Edges present in both graphs. Node counts must agree.
    pub fn intersection(&self, other: &Graph) -> Graph {
        assert_eq!(self.node_count(), other.node_count());
        let mut adj = self.adj.clone();
        for (mine, theirs) in adj.iter_mut().zip(&other.adj) {
            mine.intersect_with(theirs);
        }
        Self::from_adjacency(adj)
    }

    /// Edges present in either graph. Node counts must agree.
    pub fn union(&self, other: &Graph) -> Graph {
        assert_eq!(self.node_count(), other.node_count());
        let mut adj = self.adj.clone();
        for (mine, theirs) in adj.iter_mut().zip(&other.adj) {
            mine.union_with(theirs);
        }
        Self::from_adjacency(adj)
    }

    fn from_adjacency(adj: Vec<FixedBitSet>) -> Self {
        let twice: usize = adj.iter().map(|s| s.count_ones(..)).sum();
        Self {
            adj,
            edge_count: twice / 2,
        }
    }

    /// True when every two distinct listed nodes are adjacent.
    pub fn is_clique(&self, nodes: &[usize]) -> bool {
        nodes.iter().enumerate().all(|(i, &a)| {
            a < self.node_count()
                && nodes[i + 1..]
                    .iter()
                    .all(|&b| a != b && self.has_edge(a, b))
        })
    }

    /// Applies `perm` (old index → new index) to every node.
    pub fn relabeled(&self, perm: &[usize]) -> Graph {
        let mut g = Graph::empty(self.node_count());
        for (a, b) in self.edges() {
            g.add_edge(perm[a], perm[b]);
        }
        g
    }
}

/// One node per block; an edge when two blocks share a point.
pub fn design_graph(design: &Design) -> Graph {
    let blocks = design.blocks();
    let mut g = Graph::empty(blocks.len());
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            if sorted_intersection_len(&blocks[i], &blocks[j]) > 0 {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// Parameters `srg(b, d, t, u)` of a strongly regular graph.
///
/// `t` is `None` when the graph has no adjacent pairs and `u` is `None` when it
/// has no non-adjacent pairs (complete graphs); the condition is vacuous there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SrgCertificate {
    pub b: usize,
    pub d: usize,
    pub t: Option<usize>,
    pub u: Option<usize>,
}

impl fmt::Display for SrgCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |x: Option<usize>| x.map_or_else(|| "-".to_string(), |v| v.to_string());
        write!(
            f,
            "srg({},{},{},{})",
            self.b,
            self.d,
            show(self.t),
            show(self.u)
        )
    }
}

/// Exhaustive strong-regularity check; `None` if the graph is not strongly regular.
pub fn check_srg(graph: &Graph) -> Option<SrgCertificate> {
    let n = graph.node_count();
    if n < 2 {
        return None;
    }
    let d = graph.degree(0);
    if (1..n).any(|a| graph.degree(a) != d) {
        return None;
    }
    let mut t = None;
    let mut u = None;
    for a in 0..n {
        for b in a + 1..n {
            let common = graph.common_neighbor_count(a, b);
            let slot = if graph.has_edge(a, b) { &mut t } else { &mut u };
            match *slot {
                None => *slot = Some(common),
                Some(expected) if expected != common => return None,
                Some(_) => {}
            }
        }
    }
    Some(SrgCertificate { b: n, d, t, u })
}

/// Closed-form `(d, t, u)` for the design graph of a `(1, k, v)`-BIBD:
/// `d = k(v−k)/(k−1)`, `t = (v−1)/(k−1) − 2 + (k−1)²`, `u = k²`.
pub fn srg_params_lambda1(k: usize, v: usize) -> Result<(usize, usize, usize), ParamsError> {
    let p = derive_params(1, k, v)?;
    let d = k * (v - k) / (k - 1);
    let t = p.r + (k - 1) * (k - 1) - 2;
    Ok((d, t, k * k))
}

/// Hop distances between all node pairs; `None` marks unreachable pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTable {
    n: usize,
    dist: Vec<Option<usize>>,
}

impl DistanceTable {
    pub fn get(&self, a: usize, b: usize) -> Option<usize> {
        self.dist[a * self.n + b]
    }

    pub fn node_count(&self) -> usize {
        self.n
    }
}

fn bfs(graph: &Graph, source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; graph.node_count()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(a) = queue.pop_front() {
        let next = dist[a].unwrap() + 1;
        for b in graph.neighbors(a) {
            if dist[b].is_none() {
                dist[b] = Some(next);
                queue.push_back(b);
            }
        }
    }
    dist
}

/// Breadth-first distances from every node.
pub fn all_pairs_shortest_paths(graph: &Graph) -> DistanceTable {
    let n = graph.node_count();
    let dist = (0..n).flat_map(|s| bfs(graph, s)).collect();
    DistanceTable { n, dist }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{affine_plane, projective_plane, stanton_design};

    #[test]
    fn construction_errors() {
        assert_eq!(Graph::from_edges(3, [(0, 0)]), Err(GraphError::SelfLoop(0)));
        assert_eq!(
            Graph::from_edges(3, [(0, 3)]),
            Err(GraphError::NodeOutOfRange(0, 3, 3))
        );
        assert_eq!(
            Graph::from_edges(3, [(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(0, 1))
        );
    }

    #[test]
    fn stanton_design_graph() {
        let g = design_graph(&stanton_design());
        assert_eq!(g.node_count(), 14);
        assert_eq!(g.edge_count(), 84);
        let missing = g.complement().edges();
        assert_eq!(missing, (0..7).map(|i| (i, i + 7)).collect::<Vec<_>>());
    }

    #[test]
    fn plane_design_graphs() {
        let fano = design_graph(&projective_plane(2).unwrap());
        assert_eq!(fano, Graph::complete(7));
        let ag = design_graph(&affine_plane(3).unwrap());
        assert_eq!(ag.node_count(), 12);
        assert!((0..12).all(|a| ag.degree(a) == 9));
    }

    #[test]
    fn srg_examples() {
        let ag = design_graph(&affine_plane(3).unwrap());
        assert_eq!(
            check_srg(&ag),
            Some(SrgCertificate {
                b: 12,
                d: 9,
                t: Some(6),
                u: Some(9)
            })
        );
        assert_eq!(
            check_srg(&Graph::cycle(5)),
            Some(SrgCertificate {
                b: 5,
                d: 2,
                t: Some(0),
                u: Some(1)
            })
        );
        assert_eq!(check_srg(&Graph::path(3)), None);
        let k7 = check_srg(&Graph::complete(7)).unwrap();
        assert_eq!((k7.d, k7.t, k7.u), (6, Some(5), None));
        assert_eq!(k7.to_string(), "srg(7,6,5,-)");
        // C6 is regular but not strongly regular.
        assert_eq!(check_srg(&Graph::cycle(6)), None);
    }

    #[test]
    fn lambda_one_closed_form() {
        assert_eq!(srg_params_lambda1(3, 9).unwrap(), (9, 6, 9));
        assert_eq!(srg_params_lambda1(3, 7).unwrap(), (6, 5, 9));
        assert!(srg_params_lambda1(3, 8).is_err());
    }

    #[test]
    fn distances() {
        let k7 = all_pairs_shortest_paths(&Graph::complete(7));
        for a in 0..7 {
            for b in 0..7 {
                assert_eq!(k7.get(a, b), Some(usize::from(a != b)));
            }
        }
        let st = all_pairs_shortest_paths(&design_graph(&stanton_design()));
        for a in 0..14 {
            for b in a + 1..14 {
                let expected = if b == a + 7 { 2 } else { 1 };
                assert_eq!(st.get(a, b), Some(expected));
            }
        }
        let iso = all_pairs_shortest_paths(&Graph::empty(2));
        assert_eq!(iso.get(0, 1), None);
    }

    #[test]
    fn set_operations() {
        let p = Graph::path(4);
        let c = Graph::cycle(4);
        assert_eq!(p.union(&c), c);
        assert_eq!(p.intersection(&c), p);
        assert_eq!(c.complement().edge_count(), 2);
        assert!(Graph::complete(4).is_clique(&[0, 2, 3]));
        assert!(!p.is_clique(&[0, 1, 2]));
        assert!(!p.is_clique(&[0, 0]));
    }
}
