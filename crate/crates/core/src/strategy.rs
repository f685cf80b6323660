//! Clique-selection strategies.
//!
//! MAR leaves the choice of clique open, so each selection rule implements
//! [`CliqueSelector`] and is registered by name in a [`StrategyRegistry`].
//! Callers (the MAR driver, the CLI) pick one at runtime by name.

use std::collections::{BTreeMap, VecDeque};

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::Graph;

/// Picks a clique from a graph.
pub trait CliqueSelector {
    fn name(&self) -> &'static str;

    /// Returns a sorted clique with `min_size <= len <= max_size`, or `None`
    /// when the strategy finds none.
    fn select(&mut self, graph: &Graph, min_size: usize, max_size: usize) -> Option<Vec<usize>>;
}

/// Construction inputs shared by all registered strategies.
#[derive(Debug, Clone, Default)]
pub struct SelectorParams {
    pub seed: u64,
    /// Clique list consumed by the `guided` strategy, in order.
    pub guide: Vec<Vec<usize>>,
}

pub type SelectorFactory = fn(&SelectorParams) -> Box<dyn CliqueSelector>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown clique strategy `{name}` (available: {})", available.join(", "))]
pub struct UnknownStrategy {
    pub name: String,
    pub available: Vec<String>,
}

pub struct StrategyRegistry {
    factories: BTreeMap<String, SelectorFactory>,
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    /// Registry holding `greedy-largest`, `greedy-edge` and `guided`.
    pub fn with_builtin() -> Self {
        let mut r = Self::empty();
        r.register(GreedyLargest::NAME, |_| Box::new(GreedyLargest));
        r.register(GreedyEdge::NAME, |p| Box::new(GreedyEdge::new(p.seed)));
        r.register(Guided::NAME, |p| Box::new(Guided::new(p.guide.clone())));
        r
    }

    /// Adds or replaces the factory registered under `name`.
    pub fn register(&mut self, name: &str, factory: SelectorFactory) {
        self.factories.insert(name.to_string(), factory);
    }

    pub fn names(&self) -> Vec<String> {
        self.factories.keys().cloned().collect()
    }

    pub fn build(
        &self,
        name: &str,
        params: &SelectorParams,
    ) -> Result<Box<dyn CliqueSelector>, UnknownStrategy> {
        match self.factories.get(name) {
            Some(f) => Ok(f(params)),
            None => Err(UnknownStrategy {
                name: name.to_string(),
                available: self.names(),
            }),
        }
    }
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        Self::with_builtin()
    }
}

/// Grows `clique` inside `candidates` until it reaches `max_size` or runs out,
/// always taking the candidate chosen by `pick`.
fn grow(
    graph: &Graph,
    clique: &mut Vec<usize>,
    mut candidates: FixedBitSet,
    max_size: usize,
    pick: impl Fn(&FixedBitSet) -> Option<usize>,
) {
    while clique.len() < max_size {
        let Some(next) = pick(&candidates) else {
            break;
        };
        clique.push(next);
        candidates.intersect_with(graph.neighbor_set(next));
    }
    clique.sort_unstable();
}

/// Starts from the highest-degree node and repeatedly adds the candidate with
/// the most neighbours among the remaining candidates. Ties go to the lowest
/// index. Seed-independent.
#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyLargest;

impl GreedyLargest {
    pub const NAME: &'static str = "greedy-largest";
}

impl CliqueSelector for GreedyLargest {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn select(&mut self, graph: &Graph, min_size: usize, max_size: usize) -> Option<Vec<usize>> {
        if max_size < min_size.max(2) {
            return None;
        }
        let mut order: Vec<usize> = (0..graph.node_count())
            .filter(|&a| graph.degree(a) + 1 >= min_size.max(2))
            .collect();
        order.sort_by_key(|&a| (std::cmp::Reverse(graph.degree(a)), a));
        for start in order {
            let mut clique = vec![start];
            grow(
                graph,
                &mut clique,
                graph.neighbor_set(start).clone(),
                max_size,
                |cands| {
                    cands.ones().max_by_key(|&c| {
                        (
                            graph.neighbor_set(c).intersection_count(cands),
                            std::cmp::Reverse(c),
                        )
                    })
                },
            );
            if clique.len() >= min_size {
                return Some(clique);
            }
        }
        None
    }
}

/// Visits edges in a seeded random order and extends each by common
/// neighbours, lowest index first.
#[derive(Debug, Clone)]
pub struct GreedyEdge {
    rng: ChaCha8Rng,
}

impl GreedyEdge {
    pub const NAME: &'static str = "greedy-edge";

    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl CliqueSelector for GreedyEdge {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn select(&mut self, graph: &Graph, min_size: usize, max_size: usize) -> Option<Vec<usize>> {
        if max_size < min_size.max(2) {
            return None;
        }
        let mut edges = graph.edges();
        edges.shuffle(&mut self.rng);
        for (a, b) in edges {
            let mut common = graph.neighbor_set(a).clone();
            common.intersect_with(graph.neighbor_set(b));
            let mut clique = vec![a, b];
            grow(graph, &mut clique, common, max_size, |c| c.minimum());
            if clique.len() >= min_size {
                return Some(clique);
            }
        }
        None
    }
}

/// Pops cliques from a caller-supplied list, skipping entries that are no
/// longer cliques of the graph or fall outside the size window. Once the list
/// is exhausted it defers to [`GreedyLargest`].
#[derive(Debug, Clone, Default)]
pub struct Guided {
    queue: VecDeque<Vec<usize>>,
}

impl Guided {
    pub const NAME: &'static str = "guided";

    pub fn new(cliques: Vec<Vec<usize>>) -> Self {
        Self {
            queue: cliques.into(),
        }
    }

    pub fn remaining(&self) -> usize {
        self.queue.len()
    }
}

impl CliqueSelector for Guided {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn select(&mut self, graph: &Graph, min_size: usize, max_size: usize) -> Option<Vec<usize>> {
        while let Some(mut c) = self.queue.pop_front() {
            c.sort_unstable();
            c.dedup();
            if c.len() >= min_size.max(2) && c.len() <= max_size && graph.is_clique(&c) {
                return Some(c);
            }
        }
        GreedyLargest.select(graph, min_size, max_size)
    }
}

/// A clique with between 2 and `max_size` nodes, or `None` if the graph has no edges.
pub fn find_clique(
    graph: &Graph,
    max_size: usize,
    selector: &mut dyn CliqueSelector,
) -> Option<Vec<usize>> {
    assert!(max_size >= 2, "max_size must be at least 2");
    selector.select(graph, 2, max_size)
}
