//! Group-structured key predistribution and a single-design baseline.
//!
//! The graph-based scheme gives every group its own copy of a Steiner system
//! and links the central nodes of all groups through one more design over a
//! separate pool.

use thiserror::Error;

use crate::assignment::KeyAssignment;
use crate::design::Design;
use crate::math::Rational;
use crate::metrics::{evaluate, Apl, MetricsError, MetricsReport, NrMode};
use crate::target::TargetGraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPlan {
    /// Number of groups.
    pub s: usize,
    /// Nodes per group.
    pub b0: usize,
    /// Central nodes per group: the first `tau0` nodes of each.
    pub tau0: usize,
    pub group_design: Design,
    pub central_design: Design,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HierarchyError {
    #[error("plan needs s >= 2 and 1 <= tau0 <= b0 (got s={s}, b0={b0}, tau0={tau0})")]
    BadPlan { s: usize, b0: usize, tau0: usize },
    #[error("{role} design has {available} blocks but {needed} nodes need one each")]
    InsufficientBlocks {
        role: &'static str,
        needed: usize,
        available: usize,
    },
}

impl GroupPlan {
    pub fn node_count(&self) -> usize {
        self.s * self.b0
    }

    pub fn is_central(&self, node: usize) -> bool {
        node % self.b0 < self.tau0
    }

    pub fn check(&self) -> Result<(), HierarchyError> {
        if self.s < 2 || self.tau0 == 0 || self.tau0 > self.b0 {
            return Err(HierarchyError::BadPlan {
                s: self.s,
                b0: self.b0,
                tau0: self.tau0,
            });
        }
        if self.group_design.block_count() < self.b0 {
            return Err(HierarchyError::InsufficientBlocks {
                role: "group",
                needed: self.b0,
                available: self.group_design.block_count(),
            });
        }
        if self.central_design.block_count() < self.s * self.tau0 {
            return Err(HierarchyError::InsufficientBlocks {
                role: "central",
                needed: self.s * self.tau0,
                available: self.central_design.block_count(),
            });
        }
        Ok(())
    }
}

/// Node `j` of group `g` holds block `j` of group `g`'s pool copy. The
/// `c`-th central node overall also holds block `c` of the central design.
/// Keys in no ring are dropped from the pool.
pub fn build_group_kps(plan: &GroupPlan) -> Result<KeyAssignment, HierarchyError> {
    plan.check()?;
    let v_group = plan.group_design.point_count();
    let central_offset = plan.s * v_group;
    let rings = (0..plan.node_count())
        .map(|m| {
            let (g, j) = (m / plan.b0, m % plan.b0);
            let mut ring: Vec<usize> = plan
                .group_design
                .block(j)
                .iter()
                .map(|&p| g * v_group + p)
                .collect();
            if plan.is_central(m) {
                let c = g * plan.tau0 + j;
                ring.extend(
                    plan.central_design
                        .block(c)
                        .iter()
                        .map(|&p| central_offset + p),
                );
            }
            ring
        })
        .collect();
    Ok(KeyAssignment::compacted(rings).expect("plan has nodes and blocks have distinct points"))
}

/// Node `j` holds block `j` of a single design.
pub fn build_classical_kps(n: usize, design: &Design) -> Result<KeyAssignment, HierarchyError> {
    if design.block_count() < n || n == 0 {
        return Err(HierarchyError::InsufficientBlocks {
            role: "classical",
            needed: n,
            available: design.block_count(),
        });
    }
    let rings = design.blocks()[..n].to_vec();
    Ok(KeyAssignment::compacted(rings).expect("n > 0 and blocks have distinct points"))
}

/// `graph_based − classical` for each metric. APL is `None` when either side is infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricDeltas {
    pub dcc: Rational,
    pub apl: Option<Rational>,
    pub so_max: i64,
    pub so_mean: Rational,
    pub ns: i64,
    pub nr: Vec<(usize, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonReport {
    pub graph_based: MetricsReport,
    pub classical: MetricsReport,
    pub deltas: MetricDeltas,
}

pub fn compare(
    graph_based: &KeyAssignment,
    classical: &KeyAssignment,
    t: &TargetGraph,
    captures: &[usize],
    mode: NrMode,
) -> Result<ComparisonReport, MetricsError> {
    if graph_based.node_count() != classical.node_count() {
        return Err(MetricsError::NodeCountMismatch {
            assignment: classical.node_count(),
            target: graph_based.node_count(),
        });
    }
    let g = evaluate(graph_based, t, captures, mode)?;
    let c = evaluate(classical, t, captures, mode)?;
    let apl = match (&g.apl, &c.apl) {
        (Apl::Finite(a), Apl::Finite(b)) => Some(a - b),
        _ => None,
    };
    let deltas = MetricDeltas {
        dcc: &g.dcc - &c.dcc,
        apl,
        so_max: g.so_max as i64 - c.so_max as i64,
        so_mean: &g.so_mean - &c.so_mean,
        ns: g.ns as i64 - c.ns as i64,
        nr: g
            .nr
            .iter()
            .zip(&c.nr)
            .map(|((x, a), (_, b))| (*x, a - b))
            .collect(),
    };
    Ok(ComparisonReport {
        graph_based: g,
        classical: c,
        deltas,
    })
}

#[cfg(test)]
mod tests {
    use num_traits::Zero;

    use super::*;
    use crate::catalog::{affine_plane, projective_plane};
    use crate::math::{int, ratio};
    use crate::metrics::{dcc, kps_design_graph, network_scalability, storage_overhead};
    use crate::target::{classical_target, hierarchical_target};

    fn fano_plan(tau0: usize) -> GroupPlan {
        let fano = projective_plane(2).unwrap();
        GroupPlan {
            s: 2,
            b0: 7,
            tau0,
            group_design: fano.clone(),
            central_design: fano,
        }
    }

    #[test]
    fn fano_groups() {
        let a = build_group_kps(&fano_plan(1)).unwrap();
        assert_eq!(a.node_count(), 14);
        // Two central blocks of the central Fano copy are used; its other points are pruned.
        assert_eq!(network_scalability(&a), 19);
        assert_eq!(storage_overhead(&a), (6, ratio(24, 7)));
        let t = hierarchical_target(2, 7, 1).unwrap();
        assert_eq!(dcc(&a, &t).unwrap(), int(1));
        let g = kps_design_graph(&a);
        assert!(g.has_edge(0, 7));
        assert!(!g.has_edge(1, 8));
    }

    #[test]
    fn full_central_use_keeps_every_pool() {
        let fano = projective_plane(2).unwrap();
        let plan = GroupPlan {
            s: 7,
            b0: 7,
            tau0: 1,
            group_design: fano.clone(),
            central_design: fano,
        };
        let a = build_group_kps(&plan).unwrap();
        assert_eq!(network_scalability(&a), 7 * 7 + 7);
    }

    #[test]
    fn plan_errors() {
        let mut plan = fano_plan(1);
        plan.b0 = 8;
        assert!(matches!(
            build_group_kps(&plan),
            Err(HierarchyError::InsufficientBlocks { role: "group", .. })
        ));
        let mut plan = fano_plan(4);
        plan.s = 2;
        assert!(matches!(
            build_group_kps(&plan),
            Err(HierarchyError::InsufficientBlocks {
                role: "central",
                ..
            })
        ));
        assert!(matches!(
            build_group_kps(&fano_plan(0)),
            Err(HierarchyError::BadPlan { .. })
        ));
    }

    #[test]
    fn classical_baselines() {
        let ag = affine_plane(3).unwrap();
        let a = build_classical_kps(12, &ag).unwrap();
        assert_eq!(network_scalability(&a), 9);
        assert_eq!(storage_overhead(&a), (3, int(3)));
        let f = build_classical_kps(7, &projective_plane(2).unwrap()).unwrap();
        assert_eq!(network_scalability(&f), 7);
        assert_eq!(dcc(&f, &classical_target(7).unwrap()).unwrap(), int(1));
        assert!(build_classical_kps(13, &ag).is_err());
    }

    #[test]
    fn comparison_deltas() {
        let a = build_classical_kps(7, &projective_plane(2).unwrap()).unwrap();
        let t = classical_target(7).unwrap();
        let r = compare(&a, &a, &t, &[1], NrMode::default()).unwrap();
        assert!(r.deltas.dcc.is_zero());
        assert_eq!(r.deltas.apl, Some(int(0)));
        assert_eq!((r.deltas.so_max, r.deltas.ns), (0, 0));
        assert!(r.deltas.nr.iter().all(|(_, d)| d.is_zero()));
        let b = build_classical_kps(12, &affine_plane(3).unwrap()).unwrap();
        assert!(compare(&a, &b, &t, &[1], NrMode::default()).is_err());
    }
}
