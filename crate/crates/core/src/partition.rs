//! The K-fold partition of `{1, ..., N}` into contiguous blocks
//! `S_k(N) = {(k-1)*floor(N/K)+1, ..., k*floor(N/K)}` for `k < K`, with
//! the last block running to `N`.

use crate::error::{Error, Result};

/// Blocks `S_1(N), ..., S_K(N)`. Always contiguous, pairwise disjoint,
/// and covering `{1, ..., N}`; the `N mod K` remainder sits entirely in
/// the last block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPartition {
    n: usize,
    k: usize,
    base: usize,
}

impl FoldPartition {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Fold count `K`.
    pub fn k(&self) -> usize {
        self.k
    }

    /// `floor(N/K)`, the size of every block but the last.
    pub fn base_block_len(&self) -> usize {
        self.base
    }

    /// Size of 1-based block `k`.
    pub fn block_len(&self, k: usize) -> usize {
        if k < self.k {
            self.base
        } else {
            self.n - (self.k - 1) * self.base
        }
    }

    /// 1-based sample indices of 1-based block `k`.
    pub fn block(&self, k: usize) -> std::ops::RangeInclusive<usize> {
        debug_assert!((1..=self.k).contains(&k));
        let start = (k - 1) * self.base + 1;
        let end = if k < self.k { k * self.base } else { self.n };
        start..=end
    }

    /// 1-based indices of the complement of block `k`.
    pub fn complement(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        let inside = self.block(k);
        (1..=self.n).filter(move |j| !inside.contains(j))
    }

    /// Materialized blocks, mostly for tests and reports.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        (1..=self.k).map(|k| self.block(k).collect()).collect()
    }
}

/// Builds the partition. Requires `1 < K <= N`.
pub fn make_partition(n: usize, k: usize) -> Result<FoldPartition> {
    if k <= 1 || k > n {
        return Err(Error::InvalidPartition { n, k });
    }
    Ok(FoldPartition { n, k, base: n / k })
}
