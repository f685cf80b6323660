//! Evaluation metrics for a key assignment against a target graph.
//!
//! Direct-link metrics (DCC, APL) are restricted to the evaluation set
//! `must ∪ may`. Resiliency counts only external links: evaluated links
//! present in the design graph whose endpoints were both left uncaptured.
//! Links in `forbid` that the key rings nevertheless create are treated as
//! eavesdropped, so the keys they share are compromised before any capture.
//! All values are exact rationals.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::assignment::KeyAssignment;
use crate::design::{derive_params, ParamsError};
use crate::graph::{all_pairs_shortest_paths, Graph};
use crate::math::{binomial, binomial_saturating, format_rational, int, ratio, Rational};
use crate::target::TargetGraph;

/// Default bound on `C(n, x)` for exact capture enumeration.
pub const DEFAULT_EXACT_CAP: u128 = 1_000_000;

/// Default seed for Monte-Carlo capture sampling.
pub const DEFAULT_SEED: u64 = 0x6b70_735f_7365_6564;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("assignment has {assignment} nodes but the target has {target}")]
    NodeCountMismatch { assignment: usize, target: usize },
    #[error("must ∪ may has no edges; nothing to evaluate")]
    EmptyEvaluationSet,
    #[error("exact enumeration needs C(n, x) = {subsets} capture sets, above the cap of {cap}")]
    ExactModeTooLarge { subsets: u128, cap: u128 },
    #[error("cannot capture {x} of {n} nodes")]
    CaptureTooLarge { x: usize, n: usize },
    #[error("captured node {0} is outside the network")]
    CapturedNodeOutOfRange(usize),
    #[error("monte-carlo mode needs at least one trial")]
    ZeroTrials,
}

/// Average path length; infinite when an evaluated pair is unreachable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Apl {
    Finite(Rational),
    Infinite,
}

impl fmt::Display for Apl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Apl::Finite(r) => f.write_str(&format_rational(r)),
            Apl::Infinite => f.write_str("inf"),
        }
    }
}

/// Direct-communication graph: an edge wherever two rings share a key.
pub fn kps_design_graph(a: &KeyAssignment) -> Graph {
    let mut g = Graph::empty(a.node_count());
    for holders in a.holders() {
        for (&x, &y) in holders.iter().tuple_combinations() {
            g.add_edge(x, y);
        }
    }
    g
}

fn check_sizes(a: &KeyAssignment, t: &TargetGraph) -> Result<(), MetricsError> {
    if a.node_count() != t.node_count() {
        return Err(MetricsError::NodeCountMismatch {
            assignment: a.node_count(),
            target: t.node_count(),
        });
    }
    Ok(())
}

/// `|E(G_D) ∩ E(must ∪ may)| / |E(must ∪ may)|`.
pub fn dcc(a: &KeyAssignment, t: &TargetGraph) -> Result<Rational, MetricsError> {
    check_sizes(a, t)?;
    let eval = t.evaluation_graph();
    if eval.edge_count() == 0 {
        return Err(MetricsError::EmptyEvaluationSet);
    }
    let hit = kps_design_graph(a).intersection(&eval).edge_count();
    Ok(ratio(hit as i64, eval.edge_count() as i64))
}

/// `|E(must) ∩ E(G_D)| / |E(must)|`, or `None` when `must` is empty.
pub fn dicc(a: &KeyAssignment, t: &TargetGraph) -> Result<Option<Rational>, MetricsError> {
    check_sizes(a, t)?;
    if t.must.edge_count() == 0 {
        return Ok(None);
    }
    let hit = kps_design_graph(a).intersection(&t.must).edge_count();
    Ok(Some(ratio(hit as i64, t.must.edge_count() as i64)))
}

/// Mean shortest-path length over the edges of `must ∪ may`, measured in the
/// graph of evaluated direct links `E(G_D) ∩ E(must ∪ may)`.
pub fn apl(a: &KeyAssignment, t: &TargetGraph) -> Result<Apl, MetricsError> {
    check_sizes(a, t)?;
    let eval = t.evaluation_graph();
    if eval.edge_count() == 0 {
        return Err(MetricsError::EmptyEvaluationSet);
    }
    let links = kps_design_graph(a).intersection(&eval);
    let dist = all_pairs_shortest_paths(&links);
    let mut total = 0usize;
    for (x, y) in eval.edges() {
        match dist.get(x, y) {
            Some(d) => total += d,
            None => return Ok(Apl::Infinite),
        }
    }
    Ok(Apl::Finite(ratio(total as i64, eval.edge_count() as i64)))
}

/// Closed-form DCC of a `(1, k, v)`-BIBD scheme: `(v−k)k² / (v(v−1) − k(k−1))`.
pub fn dcc_analytic(k: usize, v: usize) -> Result<Rational, ParamsError> {
    derive_params(1, k, v)?;
    let num = (v - k) * k * k;
    let den = v * (v - 1) - k * (k - 1);
    Ok(ratio(num as i64, den as i64))
}

/// `2 − dcc`: non-adjacent pairs sit at distance two.
pub fn apl_analytic(dcc: &Rational) -> Rational {
    int(2) - dcc
}

/// Probability that a key held by `r` of `b` nodes survives `x` random captures:
/// `C(b−r, x) / C(b, x)`. Requires `r <= b` and `x <= b`.
pub fn nr_analytic(b: usize, r: usize, x: usize) -> Rational {
    assert!(r <= b && x <= b, "nr_analytic needs r <= b and x <= b");
    Rational::new(
        binomial((b - r) as u64, x as u64),
        binomial(b as u64, x as u64),
    )
}

/// Largest and mean ring size.
pub fn storage_overhead(a: &KeyAssignment) -> (usize, Rational) {
    let sizes: Vec<usize> = a.rings().iter().map(Vec::len).collect();
    let max = sizes.iter().copied().max().unwrap_or(0);
    let total: usize = sizes.iter().sum();
    (max, ratio(total as i64, sizes.len().max(1) as i64))
}

/// Size of the key pool.
pub fn network_scalability(a: &KeyAssignment) -> usize {
    a.key_count()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CaptureMode {
    /// Average over every `x`-subset of nodes.
    Exact,
    /// Average over `trials` uniformly sampled `x`-subsets.
    MonteCarlo { trials: u64, seed: u64 },
    /// A single given capture set; its size must equal `x`.
    Explicit(BTreeSet<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaptureModel {
    pub x: usize,
    pub mode: CaptureMode,
}

impl CaptureModel {
    pub fn exact(x: usize) -> Self {
        Self {
            x,
            mode: CaptureMode::Exact,
        }
    }

    pub fn monte_carlo(x: usize, trials: u64, seed: u64) -> Self {
        Self {
            x,
            mode: CaptureMode::MonteCarlo { trials, seed },
        }
    }

    pub fn explicit(captured: BTreeSet<usize>) -> Self {
        Self {
            x: captured.len(),
            mode: CaptureMode::Explicit(captured),
        }
    }
}

/// Precomputed link data for repeated resiliency evaluations.
#[derive(Debug, Clone)]
pub struct ResiliencyEvaluator {
    node_count: usize,
    rings: Vec<FixedBitSet>,
    pre_compromised: FixedBitSet,
    /// Evaluated links `(x, y, shared keys)`.
    links: Vec<(usize, usize, FixedBitSet)>,
}

/// Running exact sum of per-set fractions, grouped by denominator.
#[derive(Debug, Default)]
struct FractionSum {
    by_denominator: BTreeMap<usize, u128>,
    vacuous: u128,
    samples: u128,
}

impl FractionSum {
    fn add(&mut self, (survived, total): (usize, usize)) {
        self.samples += 1;
        if total == 0 {
            self.vacuous += 1;
        } else {
            *self.by_denominator.entry(total).or_insert(0) += survived as u128;
        }
    }

    fn mean(&self) -> Rational {
        let mut sum = Rational::from_integer(BigInt::from(self.vacuous));
        for (&den, &num) in &self.by_denominator {
            sum += Rational::new(BigInt::from(num), BigInt::from(den));
        }
        if self.samples == 0 {
            return Rational::zero();
        }
        sum / Rational::from_integer(BigInt::from(self.samples))
    }
}

impl ResiliencyEvaluator {
    pub fn new(a: &KeyAssignment, t: &TargetGraph) -> Result<Self, MetricsError> {
        check_sizes(a, t)?;
        let keys = a.key_count();
        let to_bits = |keys_in: &[usize]| {
            let mut s = FixedBitSet::with_capacity(keys);
            s.extend(keys_in.iter().copied());
            s
        };
        let rings = a.rings().iter().map(|r| to_bits(r)).collect();
        let gd = kps_design_graph(a);
        let mut pre_compromised = FixedBitSet::with_capacity(keys);
        for (x, y) in gd.intersection(&t.forbid).edges() {
            pre_compromised.extend(a.shared_keys(x, y));
        }
        let links = gd
            .intersection(&t.evaluation_graph())
            .edges()
            .into_iter()
            .map(|(x, y)| (x, y, to_bits(&a.shared_keys(x, y))))
            .collect();
        Ok(Self {
            node_count: a.node_count(),
            rings,
            pre_compromised,
            links,
        })
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    /// Keys compromised before any capture (shared across forbidden links).
    pub fn pre_compromised(&self) -> &FixedBitSet {
        &self.pre_compromised
    }

    /// `(surviving, total)` external links for one capture set.
    pub fn surviving_links(&self, captured: &[usize]) -> (usize, usize) {
        let mut keys = self.pre_compromised.clone();
        let mut taken = FixedBitSet::with_capacity(self.node_count);
        for &c in captured {
            keys.union_with(&self.rings[c]);
            taken.insert(c);
        }
        let mut total = 0;
        let mut survived = 0;
        for (x, y, shared) in &self.links {
            if taken.contains(*x) || taken.contains(*y) {
                continue;
            }
            total += 1;
            if !shared.is_subset(&keys) {
                survived += 1;
            }
        }
        (survived, total)
    }

    /// Fraction of surviving external links for one set; 1 when none remain.
    pub fn nr_for_set(&self, captured: &[usize]) -> Rational {
        match self.surviving_links(captured) {
            (_, 0) => int(1),
            (s, t) => ratio(s as i64, t as i64),
        }
    }

    fn check_x(&self, x: usize) -> Result<(), MetricsError> {
        if x > self.node_count {
            return Err(MetricsError::CaptureTooLarge {
                x,
                n: self.node_count,
            });
        }
        Ok(())
    }

    /// Mean NR over all `C(n, x)` capture sets.
    pub fn exact(&self, x: usize, cap: u128) -> Result<Rational, MetricsError> {
        self.check_x(x)?;
        let subsets = binomial_saturating(self.node_count as u64, x as u64);
        if subsets > cap {
            return Err(MetricsError::ExactModeTooLarge { subsets, cap });
        }
        let mut sum = FractionSum::default();
        for set in (0..self.node_count).combinations(x) {
            sum.add(self.surviving_links(&set));
        }
        Ok(sum.mean())
    }

    /// Mean NR over `trials` uniformly random `x`-subsets drawn from a seeded generator.
    pub fn monte_carlo(&self, x: usize, trials: u64, seed: u64) -> Result<Rational, MetricsError> {
        self.check_x(x)?;
        if trials == 0 {
            return Err(MetricsError::ZeroTrials);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sum = FractionSum::default();
        for _ in 0..trials {
            let set = rand::seq::index::sample(&mut rng, self.node_count, x).into_vec();
            sum.add(self.surviving_links(&set));
        }
        Ok(sum.mean())
    }

    pub fn evaluate(&self, model: &CaptureModel, cap: u128) -> Result<Rational, MetricsError> {
        match &model.mode {
            CaptureMode::Exact => self.exact(model.x, cap),
            CaptureMode::MonteCarlo { trials, seed } => self.monte_carlo(model.x, *trials, *seed),
            CaptureMode::Explicit(set) => {
                if let Some(&bad) = set.iter().find(|&&c| c >= self.node_count) {
                    return Err(MetricsError::CapturedNodeOutOfRange(bad));
                }
                let set: Vec<usize> = set.iter().copied().collect();
                Ok(self.nr_for_set(&set))
            }
        }
    }
}

/// Network resiliency under `model`, with the default exact-enumeration cap.
pub fn nr_empirical(
    a: &KeyAssignment,
    t: &TargetGraph,
    model: &CaptureModel,
) -> Result<Rational, MetricsError> {
    nr_empirical_with_cap(a, t, model, DEFAULT_EXACT_CAP)
}

pub fn nr_empirical_with_cap(
    a: &KeyAssignment,
    t: &TargetGraph,
    model: &CaptureModel,
    cap: u128,
) -> Result<Rational, MetricsError> {
    ResiliencyEvaluator::new(a, t)?.evaluate(model, cap)
}

/// How the NR column of a report was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NrMode {
    Exact { cap: u128 },
    MonteCarlo { trials: u64, seed: u64 },
}

impl Default for NrMode {
    fn default() -> Self {
        NrMode::Exact {
            cap: DEFAULT_EXACT_CAP,
        }
    }
}

impl NrMode {
    pub fn label(&self) -> &'static str {
        match self {
            NrMode::Exact { .. } => "exact",
            NrMode::MonteCarlo { .. } => "monte-carlo",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            NrMode::Exact { .. } => None,
            NrMode::MonteCarlo { seed, .. } => Some(*seed),
        }
    }
}

/// Every metric for one assignment/target pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricsReport {
    pub dcc: Rational,
    pub dicc: Option<Rational>,
    pub apl: Apl,
    pub so_max: usize,
    pub so_mean: Rational,
    pub ns: usize,
    pub nr: Vec<(usize, Rational)>,
    pub nr_mode: NrMode,
}

pub fn evaluate(
    a: &KeyAssignment,
    t: &TargetGraph,
    captures: &[usize],
    mode: NrMode,
) -> Result<MetricsReport, MetricsError> {
    let dcc = dcc(a, t)?;
    let dicc = dicc(a, t)?;
    let apl = apl(a, t)?;
    let (so_max, so_mean) = storage_overhead(a);
    let evaluator = ResiliencyEvaluator::new(a, t)?;
    let nr = captures
        .iter()
        .map(|&x| {
            let value = match mode {
                NrMode::Exact { cap } => evaluator.exact(x, cap),
                NrMode::MonteCarlo { trials, seed } => evaluator.monte_carlo(x, trials, seed),
            }?;
            Ok((x, value))
        })
        .collect::<Result<_, MetricsError>>()?;
    Ok(MetricsReport {
        dcc,
        dicc,
        apl,
        so_max,
        so_mean,
        ns: network_scalability(a),
        nr,
        nr_mode: mode,
    })
}
