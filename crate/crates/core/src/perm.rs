//! Exhaustive enumeration helpers for the brute-force oracles.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::instance::Matching;

/// Largest market the `n!` enumerations accept.
pub const ENUMERATION_LIMIT: usize = 8;

pub(crate) fn ensure_at_most(operation: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::SizeLimit {
            operation,
            n,
            limit,
        });
    }
    Ok(())
}

/// All `n!` matchings in lexicographic order of their assignment vectors.
pub fn all_matchings(n: usize) -> impl Iterator<Item = Matching> {
    (0..n)
        .permutations(n)
        .map(|a| Matching::new(a).expect("permutations are bijections"))
}
