//! Edge-disjoint clique decompositions of design graphs.

use std::collections::HashMap;

use itertools::Itertools;
use thiserror::Error;

use crate::design::{check_g_design, validate_bibd, BibdError, Design, DesignParams};
use crate::graph::Graph;

/// A list of node subsets whose induced edge sets are meant to partition a host graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueDecomposition {
    pub host_node_count: usize,
    pub cliques: Vec<Vec<usize>>,
}

impl CliqueDecomposition {
    /// Applies `perm` (old index → new index) to every clique member.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        let cliques = self
            .cliques
            .iter()
            .map(|c| c.iter().map(|&a| perm[a]).sorted().collect())
            .collect();
        Self {
            host_node_count: self.host_node_count,
            cliques,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error(transparent)]
    InvalidDesign(#[from] BibdError),
    #[error("pair-clique decomposition needs a g-design with g = 2 and lambda >= 2")]
    NotG2Design,
    #[error("point-clique decomposition needs lambda = 1, got lambda = {0}")]
    NotSteiner(usize),
}

/// One clique per point pair: the blocks containing that pair.
///
/// On a g = 2 design every edge of the design graph comes from exactly one
/// shared pair, so the `v(v−1)/2` cliques (each of size λ) partition it.
pub fn pair_clique_decomposition(
    design: &Design,
) -> Result<(CliqueDecomposition, DesignParams), DecompositionError> {
    let params = validate_bibd(design)?;
    if params.lambda < 2 || check_g_design(design) != Some(2) {
        return Err(DecompositionError::NotG2Design);
    }
    let v = params.v;
    let mut cliques = vec![Vec::new(); v * v];
    for (i, block) in design.blocks().iter().enumerate() {
        for (&p, &q) in block.iter().tuple_combinations() {
            cliques[p * v + q].push(i);
        }
    }
    let cliques = (0..v)
        .flat_map(|p| (p + 1..v).map(move |q| p * v + q))
        .map(|idx| std::mem::take(&mut cliques[idx]))
        .filter(|c| c.len() >= 2)
        .collect();
    Ok((
        CliqueDecomposition {
            host_node_count: params.b,
            cliques,
        },
        params,
    ))
}

/// One clique per point: the `r` blocks containing it. Partitions the design
/// graph of any Steiner system.
pub fn point_clique_decomposition(
    design: &Design,
) -> Result<(CliqueDecomposition, DesignParams), DecompositionError> {
    let params = validate_bibd(design)?;
    if params.lambda != 1 {
        return Err(DecompositionError::NotSteiner(params.lambda));
    }
    let cliques = (0..params.v).map(|p| design.blocks_containing(p)).collect();
    Ok((
        CliqueDecomposition {
            host_node_count: params.b,
            cliques,
        },
        params,
    ))
}

/// Why a decomposition fails to partition a graph; each names the first witness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompositionViolation {
    #[error("decomposition is for {found} nodes, graph has {expected}")]
    HostMismatch { expected: usize, found: usize },
    #[error("clique {clique} has fewer than two distinct nodes")]
    TooSmall { clique: usize },
    #[error("clique {clique} names node {node}, outside the graph")]
    NodeOutOfRange { clique: usize, node: usize },
    #[error("clique {clique} is missing edge ({}, {})", edge.0, edge.1)]
    NotAClique { clique: usize, edge: (usize, usize) },
    #[error("edge ({}, {}) is covered by cliques {first} and {second}", edge.0, edge.1)]
    SharedEdge {
        edge: (usize, usize),
        first: usize,
        second: usize,
    },
    #[error("edge ({}, {}) is covered by no clique", edge.0, edge.1)]
    UncoveredEdge { edge: (usize, usize) },
}

/// Checks that every clique is complete in `graph`, that clique edge sets are
/// pairwise disjoint, and that together they cover every edge.
pub fn verify_decomposition(
    graph: &Graph,
    decomp: &CliqueDecomposition,
) -> Result<(), DecompositionViolation> {
    if decomp.host_node_count != graph.node_count() {
        return Err(DecompositionViolation::HostMismatch {
            expected: graph.node_count(),
            found: decomp.host_node_count,
        });
    }
    let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
    for (ci, clique) in decomp.cliques.iter().enumerate() {
        let nodes: Vec<usize> = clique.iter().copied().sorted().dedup().collect();
        if nodes.len() < 2 || nodes.len() != clique.len() {
            return Err(DecompositionViolation::TooSmall { clique: ci });
        }
        if let Some(&node) = nodes.iter().find(|&&a| a >= graph.node_count()) {
            return Err(DecompositionViolation::NodeOutOfRange { clique: ci, node });
        }
        for (&a, &b) in nodes.iter().tuple_combinations() {
            if !graph.has_edge(a, b) {
                return Err(DecompositionViolation::NotAClique {
                    clique: ci,
                    edge: (a, b),
                });
            }
            if let Some(&first) = owner.get(&(a, b)) {
                return Err(DecompositionViolation::SharedEdge {
                    edge: (a, b),
                    first,
                    second: ci,
                });
            }
            owner.insert((a, b), ci);
        }
    }
    if owner.len() != graph.edge_count() {
        let edge = graph
            .edges()
            .into_iter()
            .find(|e| !owner.contains_key(e))
            .expect("fewer covered edges than graph edges");
        return Err(DecompositionViolation::UncoveredEdge { edge });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{affine_plane, projective_plane, stanton_design};
    use crate::graph::design_graph;

    #[test]
    fn stanton_pair_cliques() {
        let d = stanton_design();
        let (dec, params) = pair_clique_decomposition(&d).unwrap();
        assert_eq!(dec.cliques.len(), 28);
        assert!(dec.cliques.iter().all(|c| c.len() == 3));
        assert_eq!(verify_decomposition(&design_graph(&d), &dec), Ok(()));
        let (lhs, rhs) = params.pair_clique_identity();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn fano_is_not_g2() {
        assert_eq!(
            pair_clique_decomposition(&projective_plane(2).unwrap()),
            Err(DecompositionError::NotG2Design)
        );
    }

    #[test]
    fn point_cliques() {
        let fano = projective_plane(2).unwrap();
        let (dec, _) = point_clique_decomposition(&fano).unwrap();
        assert_eq!(dec.cliques.len(), 7);
        assert!(dec.cliques.iter().all(|c| c.len() == 3));
        assert_eq!(verify_decomposition(&design_graph(&fano), &dec), Ok(()));

        let ag = affine_plane(3).unwrap();
        let (dec, params) = point_clique_decomposition(&ag).unwrap();
        assert_eq!(dec.cliques.len(), 9);
        assert!(dec.cliques.iter().all(|c| c.len() == 4));
        assert_eq!(design_graph(&ag).edge_count(), 54);
        assert_eq!(verify_decomposition(&design_graph(&ag), &dec), Ok(()));
        let (l, r) = params.point_clique_identity();
        assert_eq!(l, r);

        assert_eq!(
            point_clique_decomposition(&stanton_design()),
            Err(DecompositionError::NotSteiner(3))
        );
    }

    #[test]
    fn verification_witnesses() {
        let k4 = Graph::complete(4);
        let bad = CliqueDecomposition {
            host_node_count: 4,
            cliques: vec![vec![0, 1, 2], vec![0, 1, 3]],
        };
        assert_eq!(
            verify_decomposition(&k4, &bad),
            Err(DecompositionViolation::SharedEdge {
                edge: (0, 1),
                first: 0,
                second: 1
            })
        );
        let k3 = CliqueDecomposition {
            host_node_count: 3,
            cliques: vec![vec![0, 1, 2]],
        };
        assert_eq!(verify_decomposition(&Graph::complete(3), &k3), Ok(()));
        let partial = CliqueDecomposition {
            host_node_count: 4,
            cliques: vec![vec![0, 1, 2]],
        };
        assert_eq!(
            verify_decomposition(&k4, &partial),
            Err(DecompositionViolation::UncoveredEdge { edge: (0, 3) })
        );
        let not_clique = CliqueDecomposition {
            host_node_count: 4,
            cliques: vec![vec![0, 1, 2, 3]],
        };
        assert_eq!(
            verify_decomposition(&Graph::cycle(4), &not_clique),
            Err(DecompositionViolation::NotAClique {
                clique: 0,
                edge: (0, 2)
            })
        );
        let tiny = CliqueDecomposition {
            host_node_count: 3,
            cliques: vec![vec![1]],
        };
        assert_eq!(
            verify_decomposition(&Graph::complete(3), &tiny),
            Err(DecompositionViolation::TooSmall { clique: 0 })
        );
    }
}
