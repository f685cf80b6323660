//! Key assignments: one key ring per node over a shared pool `0..key_count`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::design::Design;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssignmentError {
    #[error("an assignment needs at least one node")]
    NoNodes,
    #[error("ring of node {node} holds key {key}, outside the pool 0..{key_count}")]
    KeyOutOfPool {
        node: usize,
        key: usize,
        key_count: usize,
    },
    #[error("ring of node {node} repeats key {key}")]
    RepeatedKey { node: usize, key: usize },
    #[error("key {key} is in the pool but in no ring")]
    UnusedKey { key: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KeyAssignment {
    key_count: usize,
    rings: Vec<Vec<usize>>,
}

impl KeyAssignment {
    /// Builds an assignment, sorting each ring. Every pool key must be used.
    pub fn new(key_count: usize, rings: Vec<Vec<usize>>) -> Result<Self, AssignmentError> {
        if rings.is_empty() {
            return Err(AssignmentError::NoNodes);
        }
        let mut used = vec![false; key_count];
        let mut sorted = Vec::with_capacity(rings.len());
        for (node, mut ring) in rings.into_iter().enumerate() {
            ring.sort_unstable();
            if let Some(w) = ring.windows(2).find(|w| w[0] == w[1]) {
                return Err(AssignmentError::RepeatedKey { node, key: w[0] });
            }
            for &key in &ring {
                if key >= key_count {
                    return Err(AssignmentError::KeyOutOfPool {
                        node,
                        key,
                        key_count,
                    });
                }
                used[key] = true;
            }
            sorted.push(ring);
        }
        if let Some(key) = used.iter().position(|u| !u) {
            return Err(AssignmentError::UnusedKey { key });
        }
        Ok(Self {
            key_count,
            rings: sorted,
        })
    }

    /// Builds an assignment from rings over arbitrary key ids, renumbering the
    /// keys that occur to `0..m` in ascending id order. Unused ids are dropped.
    pub fn compacted(rings: Vec<Vec<usize>>) -> Result<Self, AssignmentError> {
        let mut ids: BTreeMap<usize, usize> = rings.iter().flatten().map(|&k| (k, 0)).collect();
        for (i, slot) in ids.values_mut().enumerate() {
            *slot = i;
        }
        let key_count = ids.len();
        let rings = rings
            .into_iter()
            .map(|r| r.into_iter().map(|k| ids[&k]).collect())
            .collect();
        Self::new(key_count, rings)
    }

    pub fn node_count(&self) -> usize {
        self.rings.len()
    }

    pub fn key_count(&self) -> usize {
        self.key_count
    }

    pub fn rings(&self) -> &[Vec<usize>] {
        &self.rings
    }

    pub fn ring(&self, node: usize) -> &[usize] {
        &self.rings[node]
    }

    /// Nodes holding each key, ascending.
    pub fn holders(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.key_count];
        for (node, ring) in self.rings.iter().enumerate() {
            for &k in ring {
                out[k].push(node);
            }
        }
        out
    }

    /// Keys shared by the rings of `a` and `b`, ascending.
    pub fn shared_keys(&self, a: usize, b: usize) -> Vec<usize> {
        let (x, y) = (&self.rings[a], &self.rings[b]);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < x.len() && j < y.len() {
            match x[i].cmp(&y[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(x[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }
}

/// Key pool = points, ring of node `i` = block `i`.
///
/// Points that occur in no block are dropped from the pool; a valid BIBD has none.
pub fn natural_kps(design: &Design) -> KeyAssignment {
    KeyAssignment::compacted(design.blocks().to_vec())
        .expect("a design with at least one block yields a valid assignment")
}
