//! Backtracking search for small BIBDs.
//!
//! Used as an independent existence oracle. A search either finds a design,
//! exhausts the search space (no design exists), or runs out of budget.

use itertools::Itertools;
use thiserror::Error;

use crate::design::{derive_params, Design, DesignParams, ParamsError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error("search budget of {budget} nodes exhausted without finding a design")]
    BudgetExhausted { budget: u64 },
    #[error("search space exhausted without finding a design")]
    Exhausted,
}

struct Search {
    params: DesignParams,
    subsets: Vec<Vec<usize>>,
    /// Candidate subset indices containing each pair, in lexicographic order.
    by_pair: Vec<Vec<usize>>,
    pair_count: Vec<usize>,
    point_count: Vec<usize>,
    chosen: Vec<usize>,
    nodes: u64,
    budget: u64,
}

enum Outcome {
    Found,
    Dead,
    OutOfBudget,
}

impl Search {
    fn pair_index(&self, p: usize, q: usize) -> usize {
        p * self.params.v + q
    }

    fn first_deficient_pair(&self) -> Option<(usize, usize)> {
        let v = self.params.v;
        (0..v)
            .flat_map(|p| (p + 1..v).map(move |q| (p, q)))
            .find(|&(p, q)| self.pair_count[self.pair_index(p, q)] < self.params.lambda)
    }

    fn fits(&self, subset: &[usize]) -> bool {
        subset.iter().all(|&p| self.point_count[p] < self.params.r)
            && subset
                .iter()
                .tuple_combinations()
                .all(|(&p, &q)| self.pair_count[self.pair_index(p, q)] < self.params.lambda)
    }

    fn apply(&mut self, idx: usize, delta: isize) {
        let subset = std::mem::take(&mut self.subsets[idx]);
        for (i, &p) in subset.iter().enumerate() {
            self.point_count[p] = (self.point_count[p] as isize + delta) as usize;
            for &q in &subset[i + 1..] {
                let pi = self.pair_index(p, q);
                self.pair_count[pi] = (self.pair_count[pi] as isize + delta) as usize;
            }
        }
        self.subsets[idx] = subset;
    }

    /// Covers the lexicographically first deficient pair. Consecutive blocks
    /// covering the same pair are taken in nondecreasing subset order, which
    /// removes reorderings without losing solutions.
    fn descend(&mut self, last: Option<((usize, usize), usize)>) -> Outcome {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Outcome::OutOfBudget;
        }
        let Some(pair) = self.first_deficient_pair() else {
            return if self.chosen.len() == self.params.b {
                Outcome::Found
            } else {
                Outcome::Dead
            };
        };
        if self.chosen.len() == self.params.b {
            return Outcome::Dead;
        }
        let floor = match last {
            Some((prev_pair, prev_idx)) if prev_pair == pair => prev_idx,
            _ => 0,
        };
        let pi = self.pair_index(pair.0, pair.1);
        let candidates: Vec<usize> = self.by_pair[pi]
            .iter()
            .copied()
            .filter(|&c| c >= floor)
            .collect();
        for c in candidates {
            if !self.fits(&self.subsets[c]) {
                continue;
            }
            self.apply(c, 1);
            self.chosen.push(c);
            match self.descend(Some((pair, c))) {
                Outcome::Found => return Outcome::Found,
                Outcome::OutOfBudget => return Outcome::OutOfBudget,
                Outcome::Dead => {}
            }
            self.chosen.pop();
            self.apply(c, -1);
        }
        Outcome::Dead
    }
}

/// Searches for a `(λ, k, v)`-BIBD, visiting at most `node_budget` search nodes.
///
/// Deterministic: candidate blocks are tried in lexicographic order of the
/// k-subsets of `0..v`.
pub fn brute_force_search(
    lambda: usize,
    k: usize,
    v: usize,
    node_budget: u64,
) -> Result<Design, SearchError> {
    let params = derive_params(lambda, k, v)?;
    let subsets: Vec<Vec<usize>> = (0..v).combinations(k).collect();
    let mut by_pair = vec![Vec::new(); v * v];
    for (i, s) in subsets.iter().enumerate() {
        for (&p, &q) in s.iter().tuple_combinations() {
            by_pair[p * v + q].push(i);
        }
    }
    let mut search = Search {
        params,
        subsets,
        by_pair,
        pair_count: vec![0; v * v],
        point_count: vec![0; v],
        chosen: Vec::with_capacity(params.b),
        nodes: 0,
        budget: node_budget,
    };
    match search.descend(None) {
        Outcome::Found => {
            let blocks = search
                .chosen
                .iter()
                .map(|&i| search.subsets[i].clone())
                .collect();
            Ok(Design::new(v, blocks).expect("subsets are in range"))
        }
        Outcome::OutOfBudget => Err(SearchError::BudgetExhausted {
            budget: node_budget,
        }),
        Outcome::Dead => Err(SearchError::Exhausted),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::validate_bibd;

    #[test]
    fn finds_fano_parameters() {
        let d = brute_force_search(1, 3, 7, 1_000_000).unwrap();
        assert_eq!(validate_bibd(&d).unwrap(), derive_params(1, 3, 7).unwrap());
    }

    #[test]
    fn finds_three_four_eight() {
        let d = brute_force_search(3, 4, 8, 10_000_000).unwrap();
        assert_eq!(validate_bibd(&d).unwrap(), derive_params(3, 4, 8).unwrap());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            brute_force_search(1, 3, 8, 1000),
            Err(SearchError::Params(
                ParamsError::NonIntegralParameters { .. }
            ))
        ));
    }

    #[test]
    fn tiny_budget_is_reported_as_budget() {
        assert_eq!(
            brute_force_search(1, 3, 13, 3),
            Err(SearchError::BudgetExhausted { budget: 3 })
        );
    }

    #[test]
    fn deterministic() {
        assert_eq!(
            brute_force_search(1, 3, 9, 1_000_000).unwrap(),
            brute_force_search(1, 3, 9, 1_000_000).unwrap()
        );
    }
}
