//! Balanced incomplete block designs and g-designs.
//!
//! Points are dense indices `0..v`; blocks are stored as sorted point lists in
//! the order they were supplied. A [`Design`] only guarantees structural
//! soundness (indices in range, no repeated point inside a block). Balance is
//! established separately by [`validate_bibd`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::math::{ratio, Rational};

/// The parameter quintuple `(λ, k, r, v, b)` of a BIBD.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DesignParams {
    pub lambda: usize,
    pub k: usize,
    pub r: usize,
    pub v: usize,
    pub b: usize,
}

impl DesignParams {
    /// `r(k−1) = λ(v−1)` and `bk(k−1) = λv(v−1)`.
    pub fn counting_identities_hold(&self) -> bool {
        self.r * (self.k - 1) == self.lambda * (self.v - 1)
            && self.b * self.k * (self.k - 1) == self.lambda * self.v * (self.v - 1)
    }

    /// Both sides of `k(k−1) = λv(v−1)/b`, the block-count relation satisfied by
    /// designs whose design graph splits into pair cliques.
    pub fn pair_clique_identity(&self) -> (Rational, Rational) {
        let lhs = ratio((self.k * (self.k - 1)) as i64, 1);
        let rhs = ratio((self.lambda * self.v * (self.v - 1)) as i64, self.b as i64);
        (lhs, rhs)
    }

    /// Both sides of `rv/b = (v−1)/r + 1`, the relation between a Steiner
    /// system and the point-clique decomposition of its design graph.
    pub fn point_clique_identity(&self) -> (Rational, Rational) {
        let lhs = ratio((self.r * self.v) as i64, self.b as i64);
        let rhs = ratio((self.v - 1) as i64, self.r as i64) + ratio(1, 1);
        (lhs, rhs)
    }
}

impl fmt::Display for DesignParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BIBD({},{},{},{},{})",
            self.lambda, self.k, self.r, self.v, self.b
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamsError {
    #[error(
        "parameters must satisfy 2 <= k < v and lambda >= 1 (got lambda={lambda}, k={k}, v={v})"
    )]
    OutOfRange { lambda: usize, k: usize, v: usize },
    #[error("non-integral parameters: r = {r_num}/{r_den}, b = {b_num}/{b_den}")]
    NonIntegralParameters {
        r_num: usize,
        r_den: usize,
        b_num: usize,
        b_den: usize,
    },
}

/// Computes `r` and `b` from `(λ, k, v)`, failing when either is not an integer.
pub fn derive_params(lambda: usize, k: usize, v: usize) -> Result<DesignParams, ParamsError> {
    if lambda == 0 || k < 2 || k >= v {
        return Err(ParamsError::OutOfRange { lambda, k, v });
    }
    let r_num = lambda * (v - 1);
    let r_den = k - 1;
    let b_num = lambda * v * (v - 1);
    let b_den = k * (k - 1);
    if !r_num.is_multiple_of(r_den) || !b_num.is_multiple_of(b_den) {
        return Err(ParamsError::NonIntegralParameters {
            r_num,
            r_den,
            b_num,
            b_den,
        });
    }
    Ok(DesignParams {
        lambda,
        k,
        r: r_num / r_den,
        v,
        b: b_num / b_den,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesignError {
    #[error("block {block} contains point {point}, outside 0..{v}")]
    PointOutOfRange {
        block: usize,
        point: usize,
        v: usize,
    },
    #[error("block {block} repeats point {point}")]
    RepeatedPoint { block: usize, point: usize },
}

/// A set system over points `0..v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Design {
    v: usize,
    blocks: Vec<Vec<usize>>,
}

impl Design {
    pub fn new(v: usize, blocks: Vec<Vec<usize>>) -> Result<Self, DesignError> {
        let mut sorted = Vec::with_capacity(blocks.len());
        for (i, mut block) in blocks.into_iter().enumerate() {
            block.sort_unstable();
            if let Some(&p) = block.iter().find(|&&p| p >= v) {
                return Err(DesignError::PointOutOfRange {
                    block: i,
                    point: p,
                    v,
                });
            }
            if let Some(w) = block.windows(2).find(|w| w[0] == w[1]) {
                return Err(DesignError::RepeatedPoint {
                    block: i,
                    point: w[0],
                });
            }
            sorted.push(block);
        }
        Ok(Self { v, blocks: sorted })
    }

    pub fn point_count(&self) -> usize {
        self.v
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &[usize] {
        &self.blocks[i]
    }

    /// Indices of the blocks that contain `point`, ascending.
    pub fn blocks_containing(&self, point: usize) -> Vec<usize> {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| b.binary_search(&point).is_ok())
            .map(|(i, _)| i)
            .collect()
    }

    /// A copy with block `index` removed.
    pub fn without_block(&self, index: usize) -> Design {
        let mut blocks = self.blocks.clone();
        blocks.remove(index);
        Design { v: self.v, blocks }
    }
}

/// Size of the intersection of two sorted point lists.
pub(crate) fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn sorted_intersection(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BibdError {
    #[error("design has no blocks")]
    NoBlocks,
    #[error("block {block} has size {found}, expected {expected}")]
    UnequalBlockSizes {
        block: usize,
        expected: usize,
        found: usize,
    },
    #[error("design is not incomplete: block size {k} with {v} points")]
    NotIncomplete { k: usize, v: usize },
    #[error("point {point} occurs in {count} blocks, expected {expected}")]
    UnequalReplication {
        point: usize,
        count: usize,
        expected: usize,
    },
    #[error("pair ({}, {}) occurs in {count} blocks, expected {expected}", pair.0, pair.1)]
    UnbalancedPair {
        pair: (usize, usize),
        count: usize,
        expected: usize,
    },
}

/// Exhaustively checks block sizes, replication and pair balance, and returns
/// the verified parameters. Each error names the first witness in index order.
pub fn validate_bibd(design: &Design) -> Result<DesignParams, BibdError> {
    let blocks = design.blocks();
    let v = design.point_count();
    let first = blocks.first().ok_or(BibdError::NoBlocks)?;
    let k = first.len();
    if let Some((i, b)) = blocks.iter().enumerate().find(|(_, b)| b.len() != k) {
        return Err(BibdError::UnequalBlockSizes {
            block: i,
            expected: k,
            found: b.len(),
        });
    }
    if k < 2 || k >= v {
        return Err(BibdError::NotIncomplete { k, v });
    }

    let mut replication = vec![0usize; v];
    let mut pairs = vec![0usize; v * v];
    for b in blocks {
        for (i, &p) in b.iter().enumerate() {
            replication[p] += 1;
            for &q in &b[i + 1..] {
                pairs[p * v + q] += 1;
            }
        }
    }
    let r = replication[0];
    if let Some((point, &count)) = replication.iter().enumerate().find(|(_, &c)| c != r) {
        return Err(BibdError::UnequalReplication {
            point,
            count,
            expected: r,
        });
    }
    let lambda = pairs[1];
    for p in 0..v {
        for q in p + 1..v {
            let count = pairs[p * v + q];
            if count != lambda {
                return Err(BibdError::UnbalancedPair {
                    pair: (p, q),
                    count,
                    expected: lambda,
                });
            }
        }
    }
    let params = DesignParams {
        lambda,
        k,
        r,
        v,
        b: blocks.len(),
    };
    debug_assert!(params.counting_identities_hold());
    Ok(params)
}

/// Intersection sizes of every unordered block pair, in `(i, j)` lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionProfile {
    pub sizes: Vec<usize>,
}

impl IntersectionProfile {
    /// Multiplicity of each intersection size.
    pub fn histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for &s in &self.sizes {
            *h.entry(s).or_insert(0) += 1;
        }
        h
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.sizes.iter().copied().collect()
    }
}

pub fn intersection_profile(design: &Design) -> IntersectionProfile {
    let blocks = design.blocks();
    let mut sizes = Vec::with_capacity(blocks.len() * blocks.len().saturating_sub(1) / 2);
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            sizes.push(sorted_intersection_len(&blocks[i], &blocks[j]));
        }
    }
    IntersectionProfile { sizes }
}

/// Returns `g` when every two blocks meet in either zero or exactly `g > 0` points.
pub fn check_g_design(design: &Design) -> Option<usize> {
    let mut positive = intersection_profile(design)
        .support()
        .into_iter()
        .filter(|&s| s > 0);
    let g = positive.next()?;
    match positive.next() {
        None => Some(g),
        Some(_) => None,
    }
}

/// Number of links compromised when the nodes in `captured` are taken, under
/// the natural block-to-ring mapping.
///
/// A link joins two blocks with a nonempty intersection; it is compromised when
/// every shared point is held by some captured block. Links incident to a
/// captured node are counted (they share only keys the captured node holds).
pub fn natural_capture_count(design: &Design, captured: &BTreeSet<usize>) -> usize {
    if captured.is_empty() {
        return 0;
    }
    let blocks = design.blocks();
    let mut held = vec![false; design.point_count()];
    for &c in captured {
        for &p in &blocks[c] {
            held[p] = true;
        }
    }
    let mut count = 0;
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            let shared = sorted_intersection(&blocks[i], &blocks[j]);
            if !shared.is_empty() && shared.iter().all(|&p| held[p]) {
                count += 1;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{affine_plane, projective_plane, stanton_design};

    #[test]
    fn derive_params_examples() {
        let p = derive_params(3, 4, 8).unwrap();
        assert_eq!((p.lambda, p.k, p.r, p.v, p.b), (3, 4, 7, 8, 14));
        let p = derive_params(1, 3, 7).unwrap();
        assert_eq!((p.lambda, p.k, p.r, p.v, p.b), (1, 3, 3, 7, 7));
        assert!(matches!(
            derive_params(1, 3, 8),
            Err(ParamsError::NonIntegralParameters { .. })
        ));
        assert!(matches!(
            derive_params(1, 8, 8),
            Err(ParamsError::OutOfRange { .. })
        ));
        assert!(matches!(
            derive_params(0, 3, 7),
            Err(ParamsError::OutOfRange { .. })
        ));
    }

    #[test]
    fn design_rejects_bad_blocks() {
        assert_eq!(
            Design::new(3, vec![vec![0, 3]]),
            Err(DesignError::PointOutOfRange {
                block: 0,
                point: 3,
                v: 3
            })
        );
        assert_eq!(
            Design::new(3, vec![vec![1, 0, 1]]),
            Err(DesignError::RepeatedPoint { block: 0, point: 1 })
        );
    }

    #[test]
    fn validate_known_designs() {
        let p = validate_bibd(&stanton_design()).unwrap();
        assert_eq!(p, derive_params(3, 4, 8).unwrap());
        let p = validate_bibd(&projective_plane(2).unwrap()).unwrap();
        assert_eq!(p, derive_params(1, 3, 7).unwrap());
    }

    #[test]
    fn removing_a_block_breaks_replication() {
        let broken = stanton_design().without_block(0);
        assert!(matches!(
            validate_bibd(&broken),
            Err(BibdError::UnequalReplication { .. })
        ));
    }

    #[test]
    fn validate_error_witnesses() {
        let d = Design::new(4, vec![vec![0, 1], vec![0, 1, 2]]).unwrap();
        assert_eq!(
            validate_bibd(&d),
            Err(BibdError::UnequalBlockSizes {
                block: 1,
                expected: 2,
                found: 3
            })
        );
        let single = Design::new(3, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(
            validate_bibd(&single),
            Err(BibdError::NotIncomplete { k: 3, v: 3 })
        );
        let empty = Design::new(3, vec![]).unwrap();
        assert_eq!(validate_bibd(&empty), Err(BibdError::NoBlocks));
        // Every point twice, but pair (0,1) three times.
        let d = Design::new(
            4,
            vec![
                vec![0, 1],
                vec![0, 1],
                vec![0, 1],
                vec![2, 3],
                vec![2, 3],
                vec![2, 3],
            ],
        )
        .unwrap();
        assert_eq!(
            validate_bibd(&d),
            Err(BibdError::UnbalancedPair {
                pair: (0, 2),
                count: 0,
                expected: 3
            })
        );
    }

    #[test]
    fn profiles() {
        let h = intersection_profile(&stanton_design()).histogram();
        assert_eq!(h, BTreeMap::from([(0, 7), (2, 84)]));
        let fano = projective_plane(2).unwrap();
        let prof = intersection_profile(&fano);
        assert_eq!(prof.sizes.len(), 21);
        assert!(prof.sizes.iter().all(|&s| s == 1));
        let dup = Design::new(4, vec![vec![0, 1, 2], vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        assert!(intersection_profile(&dup).sizes.contains(&3));
    }

    #[test]
    fn g_design_detection() {
        assert_eq!(check_g_design(&stanton_design()), Some(2));
        assert_eq!(check_g_design(&affine_plane(3).unwrap()), Some(1));
        assert_eq!(check_g_design(&projective_plane(3).unwrap()), Some(1));
        let mixed = Design::new(
            5,
            vec![vec![0, 1, 2], vec![0, 3, 4], vec![0, 1, 3], vec![1, 2, 3]],
        )
        .unwrap();
        assert_eq!(
            intersection_profile(&mixed).support(),
            BTreeSet::from([1, 2])
        );
        let with_zero = Design::new(
            6,
            vec![vec![0, 1, 2], vec![3, 4, 5], vec![0, 1, 3], vec![0, 4, 5]],
        )
        .unwrap();
        assert_eq!(
            intersection_profile(&with_zero).support(),
            BTreeSet::from([0, 1, 2])
        );
        assert_eq!(check_g_design(&with_zero), None);
    }

    #[test]
    fn natural_capture_on_stanton() {
        let d = stanton_design();
        assert_eq!(natural_capture_count(&d, &BTreeSet::new()), 0);
        for node in 0..d.block_count() {
            assert_eq!(natural_capture_count(&d, &BTreeSet::from([node])), 18);
        }
    }

    #[test]
    fn identities() {
        let p = derive_params(3, 4, 8).unwrap();
        let (l, r) = p.pair_clique_identity();
        assert_eq!(l, r);
        assert_eq!(l, ratio(12, 1));
        let p = derive_params(1, 3, 9).unwrap();
        let (l, r) = p.point_clique_identity();
        assert_eq!(l, r);
        assert_eq!(l, ratio(3, 1));
    }
}
