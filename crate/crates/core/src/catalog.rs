//! Fixed designs used as building blocks: the 8-point quasi-symmetric design
//! and the prime-order projective and affine planes.

use thiserror::Error;

use crate::design::Design;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("order {0} is not prime; only prime orders are supported")]
    UnsupportedOrder(usize),
}

/// The (3,4,7,8,14) design with every two blocks meeting in 0 or 2 points.
///
/// Points `a1..a8` map to `0..7`. Block `i` and block `i + 7` are the only
/// disjoint pairs.
pub fn stanton_design() -> Design {
    const BLOCKS: [[usize; 4]; 14] = [
        [1, 2, 3, 4],
        [1, 2, 5, 6],
        [1, 2, 7, 8],
        [1, 3, 6, 8],
        [1, 3, 5, 7],
        [1, 4, 5, 8],
        [1, 4, 6, 7],
        [5, 6, 7, 8],
        [3, 4, 7, 8],
        [3, 4, 5, 6],
        [2, 4, 5, 7],
        [2, 4, 6, 8],
        [2, 3, 6, 7],
        [2, 3, 5, 8],
    ];
    let blocks = BLOCKS
        .iter()
        .map(|b| b.iter().map(|&a| a - 1).collect())
        .collect();
    Design::new(8, blocks).expect("static block list is well formed")
}

fn is_prime(q: usize) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d))
}

/// Normalized nonzero vectors of GF(q)^3: the first nonzero coordinate is 1.
/// Listed as `(0,0,1)`, then `(0,1,*)`, then `(1,*,*)`.
fn normalized_triples(q: usize) -> Vec<[usize; 3]> {
    let mut out = vec![[0, 0, 1]];
    for z in 0..q {
        out.push([0, 1, z]);
    }
    for y in 0..q {
        for z in 0..q {
            out.push([1, y, z]);
        }
    }
    out
}

/// PG(2, q) for prime `q`: a (1, q+1, q²+q+1)-BIBD.
///
/// Points and lines are both indexed by [`normalized_triples`] order; a point
/// lies on a line when their dot product vanishes mod `q`.
pub fn projective_plane(q: usize) -> Result<Design, CatalogError> {
    if !is_prime(q) {
        return Err(CatalogError::UnsupportedOrder(q));
    }
    let triples = normalized_triples(q);
    let blocks = triples
        .iter()
        .map(|line| {
            triples
                .iter()
                .enumerate()
                .filter(|(_, p)| (0..3).map(|i| line[i] * p[i]).sum::<usize>() % q == 0)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    Ok(Design::new(triples.len(), blocks).expect("plane incidence is well formed"))
}

/// AG(2, q) for prime `q`: a (1, q, q²)-BIBD.
///
/// Point `(x, y)` is index `x·q + y`. Lines are grouped by parallel class:
/// class `m < q` holds `y = m·x + c`, class `q` holds `x = c`; block index is
/// `class·q + c`.
pub fn affine_plane(q: usize) -> Result<Design, CatalogError> {
    if !is_prime(q) {
        return Err(CatalogError::UnsupportedOrder(q));
    }
    let mut blocks = Vec::with_capacity(q * (q + 1));
    for m in 0..q {
        for c in 0..q {
            blocks.push((0..q).map(|x| x * q + (m * x + c) % q).collect());
        }
    }
    for c in 0..q {
        blocks.push((0..q).map(|y| c * q + y).collect());
    }
    Ok(Design::new(q * q, blocks).expect("plane incidence is well formed"))
}

/// Resolves a catalog name: `stanton`, `fano`, `projective:<q>`, `affine:<q>`.
pub fn by_name(name: &str) -> Option<Result<Design, CatalogError>> {
    let name = name.trim();
    match name {
        "stanton" => return Some(Ok(stanton_design())),
        "fano" => return Some(projective_plane(2)),
        _ => {}
    }
    let (kind, order) = name.split_once(':')?;
    let q: usize = order.trim().parse().ok()?;
    match kind.trim() {
        "projective" => Some(projective_plane(q)),
        "affine" => Some(affine_plane(q)),
        _ => None,
    }
}
