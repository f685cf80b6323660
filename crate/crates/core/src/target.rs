//! Target graphs: which node pairs must, must not, or may talk directly.
//!
//! A pair absent from all three graphs is expected to communicate over a path
//! only. The union of the three edge sets need not be complete.

use std::fmt;

use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    Must,
    Forbid,
    May,
}

impl Section {
    pub const ALL: [Section; 3] = [Section::Must, Section::Forbid, Section::May];

    pub fn tag(self) -> &'static str {
        match self {
            Section::Must => "must",
            Section::Forbid => "forbid",
            Section::May => "may",
        }
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TargetError {
    #[error("{section} graph has {found} nodes, expected {expected}")]
    NodeCountMismatch {
        section: Section,
        expected: usize,
        found: usize,
    },
    #[error("edge ({}, {}) appears in both {first} and {second}", edge.0, edge.1)]
    OverlappingEdge {
        edge: (usize, usize),
        first: Section,
        second: Section,
    },
    #[error("target needs at least {min} nodes, got {got}")]
    TooSmall { min: usize, got: usize },
    #[error("hierarchical target needs s >= 2, b0 >= 1 and tau0 <= b0 (got s={s}, b0={b0}, tau0={tau0})")]
    BadHierarchy { s: usize, b0: usize, tau0: usize },
}

/// The triplet `(must, forbid, may)` over one node set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetGraph {
    pub must: Graph,
    pub forbid: Graph,
    pub may: Graph,
}

impl TargetGraph {
    /// Builds a target and checks it with [`validate_target`].
    pub fn new(must: Graph, forbid: Graph, may: Graph) -> Result<Self, TargetError> {
        let t = Self { must, forbid, may };
        validate_target(&t)?;
        Ok(t)
    }

    pub fn node_count(&self) -> usize {
        self.must.node_count()
    }

    pub fn section(&self, s: Section) -> &Graph {
        match s {
            Section::Must => &self.must,
            Section::Forbid => &self.forbid,
            Section::May => &self.may,
        }
    }

    /// `must ∪ may`: the pairs whose direct links are evaluated.
    pub fn evaluation_graph(&self) -> Graph {
        self.must.union(&self.may)
    }
}

/// Checks node-count agreement and pairwise edge disjointness, reporting the
/// first overlapping edge in `(must, forbid)`, `(must, may)`, `(forbid, may)` order.
pub fn validate_target(t: &TargetGraph) -> Result<(), TargetError> {
    let n = t.must.node_count();
    for s in [Section::Forbid, Section::May] {
        let found = t.section(s).node_count();
        if found != n {
            return Err(TargetError::NodeCountMismatch {
                section: s,
                expected: n,
                found,
            });
        }
    }
    let pairs = [
        (Section::Must, Section::Forbid),
        (Section::Must, Section::May),
        (Section::Forbid, Section::May),
    ];
    for (first, second) in pairs {
        let (a, b) = (t.section(first), t.section(second));
        if let Some(edge) = a.edges().into_iter().find(|&(x, y)| b.has_edge(x, y)) {
            return Err(TargetError::OverlappingEdge {
                edge,
                first,
                second,
            });
        }
    }
    Ok(())
}

/// No constraints: every pair may connect directly.
pub fn classical_target(n: usize) -> Result<TargetGraph, TargetError> {
    if n < 2 {
        return Err(TargetError::TooSmall { min: 2, got: n });
    }
    Ok(TargetGraph {
        must: Graph::empty(n),
        forbid: Graph::empty(n),
        may: Graph::complete(n),
    })
}

/// Adjacency of the group hierarchy: `s` groups of `b0` nodes, node `m` in
/// group `m / b0`, central when `m mod b0 < tau0`. Entry `(m, n)` is true for
/// same-group pairs and for central–central pairs. The diagonal is true.
pub fn hierarchy_matrix(s: usize, b0: usize, tau0: usize) -> Vec<Vec<bool>> {
    let n = s * b0;
    (0..n)
        .map(|m| {
            (0..n)
                .map(|c| (m % b0 < tau0 && c % b0 < tau0) || m / b0 == c / b0)
                .collect()
        })
        .collect()
}

/// Groups with central nodes: `may` holds every within-group pair and every
/// central–central pair; `must` and `forbid` are empty.
pub fn hierarchical_target(s: usize, b0: usize, tau0: usize) -> Result<TargetGraph, TargetError> {
    if s < 2 || b0 == 0 || tau0 > b0 {
        return Err(TargetError::BadHierarchy { s, b0, tau0 });
    }
    let n = s * b0;
    let mut may = Graph::empty(n);
    for m in 0..n {
        for c in m + 1..n {
            let same_group = m / b0 == c / b0;
            let both_central = m % b0 < tau0 && c % b0 < tau0;
            if same_group || both_central {
                may.add_edge(m, c);
            }
        }
    }
    Ok(TargetGraph {
        must: Graph::empty(n),
        forbid: Graph::empty(n),
        may,
    })
}

/// `2·n_pairs` nodes; node `i` and `i + n_pairs` must not talk, all other pairs must.
pub fn matched_pairs_target(n_pairs: usize) -> Result<TargetGraph, TargetError> {
    if n_pairs == 0 {
        return Err(TargetError::TooSmall { min: 1, got: 0 });
    }
    let n = 2 * n_pairs;
    let mut must = Graph::complete(n);
    let mut forbid = Graph::empty(n);
    for i in 0..n_pairs {
        must.remove_edge(i, i + n_pairs);
        forbid.add_edge(i, i + n_pairs);
    }
    Ok(TargetGraph {
        must,
        forbid,
        may: Graph::empty(n),
    })
}

/// For a graph whose complement is a perfect matching, a relabeling
/// (old → new) that sends the `p`-th matched pair (ordered by smaller
/// endpoint) to `(p, p + n/2)`. `None` if the complement is not a perfect matching.
pub fn matched_pair_labeling(graph: &Graph) -> Option<Vec<usize>> {
    let n = graph.node_count();
    let comp = graph.complement();
    if !n.is_multiple_of(2) || (0..n).any(|a| comp.degree(a) != 1) {
        return None;
    }
    let half = n / 2;
    let mut perm = vec![usize::MAX; n];
    for (p, (a, b)) in comp.edges().into_iter().enumerate() {
        perm[a] = p;
        perm[b] = p + half;
    }
    Some(perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::stanton_design;
    use crate::graph::design_graph;

    #[test]
    fn classical() {
        let t = classical_target(3).unwrap();
        assert_eq!(t.may.edge_count(), 3);
        assert_eq!(t.must.edge_count() + t.forbid.edge_count(), 0);
        assert_eq!(classical_target(14).unwrap().may.edge_count(), 91);
        assert!(classical_target(1).is_err());
        assert_eq!(validate_target(&classical_target(5).unwrap()), Ok(()));
    }

    #[test]
    fn hierarchical_counts() {
        assert_eq!(hierarchical_target(2, 7, 1).unwrap().may.edge_count(), 43);
        let t = hierarchical_target(2, 7, 0).unwrap();
        assert_eq!(t.may.edge_count(), 42);
        assert!(!t.may.has_edge(0, 7));
        assert_eq!(hierarchical_target(3, 4, 2).unwrap().may.edge_count(), 30);
        assert!(hierarchical_target(1, 4, 1).is_err());
        assert!(hierarchical_target(2, 4, 5).is_err());
    }

    #[test]
    fn matched_pairs() {
        let t = matched_pairs_target(7).unwrap();
        assert_eq!(t.must.edge_count(), 84);
        assert_eq!(t.forbid.edge_count(), 7);
        assert_eq!(validate_target(&t), Ok(()));
        let t = matched_pairs_target(1).unwrap();
        assert_eq!((t.must.edge_count(), t.forbid.edge_count()), (0, 1));
        let t = matched_pairs_target(2).unwrap();
        assert_eq!(t.must, Graph::cycle(4));
    }

    #[test]
    fn overlap_witness() {
        let mut must = Graph::empty(3);
        must.add_edge(0, 1);
        let forbid = must.clone();
        let err = TargetGraph::new(must, forbid, Graph::empty(3)).unwrap_err();
        assert_eq!(
            err,
            TargetError::OverlappingEdge {
                edge: (0, 1),
                first: Section::Must,
                second: Section::Forbid
            }
        );
        let err = TargetGraph::new(Graph::empty(3), Graph::empty(4), Graph::empty(3)).unwrap_err();
        assert!(matches!(err, TargetError::NodeCountMismatch { .. }));
    }

    #[test]
    fn stanton_matches_matched_pairs() {
        let g = design_graph(&stanton_design());
        let perm = matched_pair_labeling(&g).unwrap();
        assert_eq!(perm, (0..14).collect::<Vec<_>>());
        assert_eq!(g.relabeled(&perm), matched_pairs_target(7).unwrap().must);
        assert_eq!(matched_pair_labeling(&Graph::complete(4)), None);
    }
}
