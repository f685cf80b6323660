//! Matching-and-Reducing: build a key assignment whose design graph is exactly
//! a given graph.
//!
//! Every edge starts with its own key. Each reduction step takes a clique of
//! size `3..=c0` in the residual graph, replaces the keys on its edges with a
//! single key held by all clique members, and deletes those edges from the
//! residual graph. Size-2 cliques would swap one key for one key and are never
//! taken. The run stops when the selector finds no residual triangle.

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use num_traits::Zero;
use thiserror::Error;

use crate::assignment::{AssignmentError, KeyAssignment};
use crate::design::{validate_bibd, BibdError, Design};
use crate::graph::Graph;
use crate::math::{binomial_saturating, ceil_div, int, ratio, Rational};
use crate::metrics::{kps_design_graph, DEFAULT_EXACT_CAP, DEFAULT_SEED};
use crate::strategy::{CliqueSelector, Guided, SelectorParams, StrategyRegistry, UnknownStrategy};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarConfig {
    /// Largest clique a single key may cover.
    pub c0: usize,
    /// Registered strategy name, see [`StrategyRegistry`].
    pub strategy: String,
    pub seed: u64,
    /// Cliques handed to the `guided` strategy.
    pub guide: Vec<Vec<usize>>,
}

impl MarConfig {
    pub fn new(c0: usize, strategy: &str) -> Self {
        Self {
            c0,
            strategy: strategy.to_string(),
            seed: DEFAULT_SEED,
            guide: Vec::new(),
        }
    }

    pub fn guided(c0: usize, cliques: Vec<Vec<usize>>) -> Self {
        Self {
            guide: cliques,
            ..Self::new(c0, Guided::NAME)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// One reduction step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarStep {
    /// 1-based iteration number.
    pub iteration: usize,
    pub clique: Vec<usize>,
    /// Key kept for the clique, numbered as in the output assignment.
    pub kept_key: usize,
    /// Number of edge keys the clique's key replaced.
    pub removed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarTrace {
    /// One key per edge of the input graph.
    pub initial_key_count: usize,
    pub steps: Vec<MarStep>,
}

impl MarTrace {
    /// `|E| − Σ (|E(C)| − 1)`.
    pub fn expected_key_count(&self) -> usize {
        self.initial_key_count - self.steps.iter().map(|s| s.removed - 1).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarError {
    #[error("c0 must be at least 2, got {0}")]
    C0TooSmall(usize),
    #[error(transparent)]
    UnknownStrategy(#[from] UnknownStrategy),
    #[error("strategy `{strategy}` returned {clique:?}, which is not a residual clique of size 3..={c0}")]
    InvalidSelection {
        strategy: String,
        clique: Vec<usize>,
        c0: usize,
    },
    #[error(transparent)]
    Assignment(#[from] AssignmentError),
    #[error("the assignment's design graph differs from the given graph")]
    DesignGraphMismatch,
    #[error("worst-case search needs C(n, x) = {subsets} capture sets, above the cap of {cap}")]
    ExactModeTooLarge { subsets: u128, cap: u128 },
    #[error("cannot capture {x} of {n} nodes")]
    CaptureTooLarge { x: usize, n: usize },
}

/// Runs MAR with the strategy named in `config`, built from the default registry.
pub fn run_mar(gc: &Graph, config: &MarConfig) -> Result<(KeyAssignment, MarTrace), MarError> {
    run_mar_in(gc, config, &StrategyRegistry::with_builtin())
}

/// Runs MAR with a strategy looked up in `registry`.
pub fn run_mar_in(
    gc: &Graph,
    config: &MarConfig,
    registry: &StrategyRegistry,
) -> Result<(KeyAssignment, MarTrace), MarError> {
    let params = SelectorParams {
        seed: config.seed,
        guide: config.guide.clone(),
    };
    let mut selector = registry.build(&config.strategy, &params)?;
    run_mar_with(gc, config.c0, selector.as_mut())
}

/// Runs MAR with an explicit selector.
pub fn run_mar_with(
    gc: &Graph,
    c0: usize,
    selector: &mut dyn CliqueSelector,
) -> Result<(KeyAssignment, MarTrace), MarError> {
    if c0 < 2 {
        return Err(MarError::C0TooSmall(c0));
    }
    let edges = gc.edges();
    let key_of: HashMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    let mut rings: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); gc.node_count()];
    for (k, &(a, b)) in edges.iter().enumerate() {
        rings[a].insert(k);
        rings[b].insert(k);
    }

    let mut residual = gc.clone();
    let mut steps = Vec::new();
    while let Some(clique) = (c0 >= 3)
        .then(|| selector.select(&residual, 3, c0))
        .flatten()
    {
        if clique.len() < 3 || clique.len() > c0 || !residual.is_clique(&clique) {
            return Err(MarError::InvalidSelection {
                strategy: selector.name().to_string(),
                clique,
                c0,
            });
        }
        let clique_edges: Vec<(usize, usize)> =
            clique.iter().copied().tuple_combinations().collect();
        let keys: BTreeSet<usize> = clique_edges.iter().map(|e| key_of[e]).collect();
        let kept = *keys.first().expect("a clique of size >= 3 has edges");
        for &m in &clique {
            rings[m].retain(|k| !keys.contains(k));
            rings[m].insert(kept);
        }
        for &(a, b) in &clique_edges {
            residual.remove_edge(a, b);
        }
        steps.push(MarStep {
            iteration: steps.len() + 1,
            clique,
            kept_key: kept,
            removed: keys.len(),
        });
    }

    let surviving: Vec<usize> = rings.iter().flatten().copied().sorted().dedup().collect();
    for step in &mut steps {
        step.kept_key = surviving
            .binary_search(&step.kept_key)
            .expect("kept keys stay in some ring");
    }
    let assignment =
        KeyAssignment::compacted(rings.into_iter().map(|r| r.into_iter().collect()).collect())?;
    Ok((
        assignment,
        MarTrace {
            initial_key_count: edges.len(),
            steps,
        },
    ))
}

/// `1 − x·C(c0,2)·⌈d/(c0−1)⌉ / |E|`, clamped below at zero: the worst-case
/// resiliency of a MAR assignment on a graph with maximum degree `d`.
pub fn nr_lower_bound(d: usize, c0: usize, edge_count: usize, x: usize) -> Rational {
    assert!(c0 >= 2, "c0 must be at least 2");
    assert!(edge_count > 0, "edge_count must be positive");
    let per_node = single_capture_bound(d, c0);
    let value = int(1) - ratio((x * per_node) as i64, edge_count as i64);
    if value < Rational::zero() {
        Rational::zero()
    } else {
        value
    }
}

/// `C(c0,2)·⌈d/(c0−1)⌉`: most links one captured node can expose.
pub fn single_capture_bound(d: usize, c0: usize) -> usize {
    c0 * (c0 - 1) / 2 * ceil_div(d as u64, (c0 - 1) as u64) as usize
}

struct CaptureCounter<'a> {
    a: &'a KeyAssignment,
    edges: Vec<(usize, usize, Vec<usize>)>,
}

impl<'a> CaptureCounter<'a> {
    fn new(a: &'a KeyAssignment, gc: &Graph) -> Result<Self, MarError> {
        if a.node_count() != gc.node_count() || kps_design_graph(a) != *gc {
            return Err(MarError::DesignGraphMismatch);
        }
        let edges = gc
            .edges()
            .into_iter()
            .map(|(x, y)| (x, y, a.shared_keys(x, y)))
            .collect();
        Ok(Self { a, edges })
    }

    fn count(&self, captured: &[usize], include_incident: bool) -> usize {
        let mut held = vec![false; self.a.key_count()];
        let mut taken = vec![false; self.a.node_count()];
        for &c in captured {
            taken[c] = true;
            for &k in self.a.ring(c) {
                held[k] = true;
            }
        }
        self.edges
            .iter()
            .filter(|(x, y, _)| include_incident || !(taken[*x] || taken[*y]))
            .filter(|(_, _, shared)| shared.iter().all(|&k| held[k]))
            .count()
    }
}

/// Links of `gc` between uncaptured nodes whose shared keys are all held by
/// captured nodes.
pub fn capture_compromise_count(
    a: &KeyAssignment,
    gc: &Graph,
    captured: &BTreeSet<usize>,
) -> Result<usize, MarError> {
    let counter = CaptureCounter::new(a, gc)?;
    let captured: Vec<usize> = captured.iter().copied().collect();
    if let Some(&bad) = captured.iter().find(|&&c| c >= gc.node_count()) {
        return Err(MarError::CaptureTooLarge {
            x: bad,
            n: gc.node_count(),
        });
    }
    Ok(counter.count(&captured, false))
}

/// Largest number of compromised links over every `x`-subset of nodes. With
/// `include_incident` the captured nodes' own links are counted as well.
pub fn worst_case_capture(
    a: &KeyAssignment,
    gc: &Graph,
    x: usize,
    include_incident: bool,
) -> Result<usize, MarError> {
    worst_case_capture_with_cap(a, gc, x, include_incident, DEFAULT_EXACT_CAP)
}

pub fn worst_case_capture_with_cap(
    a: &KeyAssignment,
    gc: &Graph,
    x: usize,
    include_incident: bool,
    cap: u128,
) -> Result<usize, MarError> {
    let counter = CaptureCounter::new(a, gc)?;
    let n = gc.node_count();
    if x > n {
        return Err(MarError::CaptureTooLarge { x, n });
    }
    let subsets = binomial_saturating(n as u64, x as u64);
    if subsets > cap {
        return Err(MarError::ExactModeTooLarge { subsets, cap });
    }
    Ok((0..n)
        .combinations(x)
        .map(|set| counter.count(&set, include_incident))
        .max()
        .unwrap_or(0))
}

/// Why [`extract_design`] could not produce a design.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractFailure {
    #[error("clique size must be at least 3, got {0}")]
    CliqueSizeTooSmall(usize),
    #[error("graph is not regular")]
    Irregular,
    #[error("graph size and degree do not fit a Steiner system with r = {r}")]
    ParameterMismatch { r: usize },
    #[error("no partition of the edges into {r}-cliques exists")]
    NoCliquePartition { r: usize },
    #[error("clique partition search exhausted its budget of {0} nodes")]
    BudgetExhausted(u64),
    #[error("recovered blocks do not form a Steiner system: {0}")]
    NotSteiner(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("graph is not decomposable: {0}")]
    NotDecomposable(#[from] ExtractFailure),
    #[error(transparent)]
    Mar(#[from] MarError),
}

pub const DEFAULT_PARTITION_BUDGET: u64 = 1_000_000;

/// Splits the edge set of `g` into `r`-cliques by backtracking: the lowest
/// uncovered edge is always covered next, trying its `r`-cliques in
/// lexicographic order.
pub fn clique_partition(
    g: &Graph,
    r: usize,
    budget: u64,
) -> Result<Vec<Vec<usize>>, ExtractFailure> {
    fn cliques_through(g: &Graph, a: usize, b: usize, r: usize) -> Vec<Vec<usize>> {
        let common: Vec<usize> = g.neighbors(a).filter(|&c| g.has_edge(b, c)).collect();
        common
            .into_iter()
            .combinations(r - 2)
            .filter(|extra| g.is_clique(extra))
            .map(|extra| {
                let mut c = extra;
                c.push(a);
                c.push(b);
                c.sort_unstable();
                c
            })
            .collect()
    }

    fn go(
        g: &mut Graph,
        r: usize,
        chosen: &mut Vec<Vec<usize>>,
        nodes: &mut u64,
        budget: u64,
    ) -> Result<bool, ExtractFailure> {
        *nodes += 1;
        if *nodes > budget {
            return Err(ExtractFailure::BudgetExhausted(budget));
        }
        let Some(&(a, b)) = g.edges().first() else {
            return Ok(true);
        };
        for clique in cliques_through(g, a, b, r) {
            let edges: Vec<(usize, usize)> = clique.iter().copied().tuple_combinations().collect();
            for &(x, y) in &edges {
                g.remove_edge(x, y);
            }
            chosen.push(clique);
            if go(g, r, chosen, nodes, budget)? {
                return Ok(true);
            }
            chosen.pop();
            for &(x, y) in &edges {
                g.add_edge(x, y);
            }
        }
        Ok(false)
    }

    let mut residual = g.clone();
    let mut chosen = Vec::new();
    let mut nodes = 0;
    if go(&mut residual, r, &mut chosen, &mut nodes, budget)? {
        Ok(chosen)
    } else {
        Err(ExtractFailure::NoCliquePartition { r })
    }
}

/// Recovers a `(1, k, v)`-BIBD from a regular graph whose edges split into
/// `v` cliques of size `r`: MAR, guided by such a partition, keeps one key per
/// clique, and the resulting rings are the blocks.
pub fn extract_design(g: &Graph, r: usize) -> Result<Design, ExtractError> {
    extract_design_with_budget(g, r, DEFAULT_PARTITION_BUDGET)
}

pub fn extract_design_with_budget(
    g: &Graph,
    r: usize,
    budget: u64,
) -> Result<Design, ExtractError> {
    if r < 3 {
        return Err(ExtractFailure::CliqueSizeTooSmall(r).into());
    }
    let b = g.node_count();
    if b == 0 {
        return Err(ExtractFailure::ParameterMismatch { r }.into());
    }
    let deg = g.degree(0);
    if (1..b).any(|a| g.degree(a) != deg) {
        return Err(ExtractFailure::Irregular.into());
    }
    let twice_edges = 2 * g.edge_count();
    let per_clique = r * (r - 1);
    if twice_edges == 0 || !twice_edges.is_multiple_of(per_clique) {
        return Err(ExtractFailure::ParameterMismatch { r }.into());
    }
    let v = twice_edges / per_clique;
    if !(r * v).is_multiple_of(b) || !(v - 1).is_multiple_of(r) || r * v / b != (v - 1) / r + 1 {
        return Err(ExtractFailure::ParameterMismatch { r }.into());
    }
    let k = r * v / b;
    if deg != k * (r - 1) {
        return Err(ExtractFailure::ParameterMismatch { r }.into());
    }

    let partition = clique_partition(g, r, budget)?;
    let (assignment, trace) = run_mar_with(g, r, &mut Guided::new(partition))?;
    if trace.steps.len() != v || trace.steps.iter().any(|s| s.clique.len() != r) {
        return Err(ExtractFailure::NoCliquePartition { r }.into());
    }
    let design = Design::new(assignment.key_count(), assignment.rings().to_vec())
        .expect("assignment rings are in range and duplicate-free");
    match validate_bibd(&design) {
        Ok(p) if p.lambda == 1 && p.k == k && p.v == v => Ok(design),
        Ok(p) => Err(ExtractFailure::NotSteiner(p.to_string()).into()),
        Err(e @ BibdError::NoBlocks) | Err(e) => {
            Err(ExtractFailure::NotSteiner(e.to_string()).into())
        }
    }
}
