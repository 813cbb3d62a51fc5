//! Estimation of the balanced penalty `psi(y) = 1/P(Y=y)`.
//!
//! The estimator on an index set S is `#S / count(y)` when `y` occurs in
//! S and `0` otherwise (the `0/0 := 0` convention), so it is a function
//! of the response counts alone and therefore symmetric in the fold
//! order. The regularized variant clips at `1/eps`, which bounds fourth
//! moments by `eps^-4` and vanishes asymptotically since the default
//! sequence `eps_N = N^(-1/4)` tends to zero.

use crate::domain::{Dataset, PenaltyVector, ResponseSpace};
use crate::error::{Error, Result};
use crate::num::Real;

/// Anything usable as a penalty weight lookup.
pub trait PenaltyFn<R: Real> {
    fn weight(&self, y: i32) -> R;
    fn space(&self) -> ResponseSpace;

    /// Weights in dense `y + m` order.
    fn dense(&self) -> Vec<R> {
        self.space().values().map(|y| self.weight(y)).collect()
    }
}

impl<R: Real> PenaltyFn<R> for PenaltyVector<R> {
    fn weight(&self, y: i32) -> R {
        PenaltyVector::weight(self, y)
    }
    fn space(&self) -> ResponseSpace {
        PenaltyVector::space(self)
    }
}

/// Fold-estimated penalty `psi_hat(y, S)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyEstimate<R: Real> {
    values: Vec<R>,
    space: ResponseSpace,
    source_fold_size: usize,
}

impl<R: Real> PenaltyEstimate<R> {
    pub fn source_fold_size(&self) -> usize {
        self.source_fold_size
    }

    pub fn values(&self) -> &[R] {
        &self.values
    }
}

impl<R: Real> PenaltyFn<R> for PenaltyEstimate<R> {
    fn weight(&self, y: i32) -> R {
        self.values[self.space.index(y)]
    }
    fn space(&self) -> ResponseSpace {
        self.space
    }
}

fn response_counts(data: &Dataset, fold: &[usize]) -> Result<Vec<usize>> {
    if fold.is_empty() {
        return Err(Error::EmptyFold);
    }
    let space = data.response_space();
    let mut counts = vec![0usize; space.card()];
    for &j in fold {
        counts[space.index(data.response(j))] += 1;
    }
    Ok(counts)
}

/// Empirical response marginal over a fold: `count(y) / #fold`.
pub fn empirical_marginal<R: Real>(data: &Dataset, fold: &[usize]) -> Result<Vec<R>> {
    let counts = response_counts(data, fold)?;
    let total = R::from_usize(fold.len());
    Ok(counts
        .iter()
        .map(|&c| R::from_usize(c) / total)
        .collect())
}

/// Builds `psi_hat` from precomputed response counts; the workhorse
/// shared with the cross-validation engine.
pub(crate) fn psi_hat_from_counts<R: Real>(
    counts: &[usize],
    fold_size: usize,
    space: ResponseSpace,
    clip_at: Option<R>,
) -> PenaltyEstimate<R> {
    let size = R::from_usize(fold_size);
    let values = counts
        .iter()
        .map(|&c| {
            if c == 0 {
                R::zero()
            } else {
                let v = size / R::from_usize(c);
                match clip_at {
                    Some(cap) if v > cap => cap,
                    _ => v,
                }
            }
        })
        .collect();
    PenaltyEstimate {
        values,
        space,
        source_fold_size: fold_size,
    }
}

/// The penalty estimator `psi_hat(y, S) = #S / count(y)`, with
/// `psi_hat(y) = 0` for `y` absent from the fold.
pub fn psi_hat<R: Real>(data: &Dataset, fold: &[usize]) -> Result<PenaltyEstimate<R>> {
    let counts = response_counts(data, fold)?;
    Ok(psi_hat_from_counts(
        &counts,
        fold.len(),
        data.response_space(),
        None,
    ))
}

/// Regularized estimator: `min(psi_hat(y), 1/eps)`, zeros preserved.
pub fn psi_hat_clipped<R: Real>(
    data: &Dataset,
    fold: &[usize],
    eps: R,
) -> Result<PenaltyEstimate<R>> {
    if eps <= R::zero() {
        return Err(Error::InvalidParameter(format!(
            "regularization eps={eps} must be positive"
        )));
    }
    let counts = response_counts(data, fold)?;
    Ok(psi_hat_from_counts(
        &counts,
        fold.len(),
        data.response_space(),
        Some(R::one() / eps),
    ))
}

/// The default regularization sequence `eps_N = N^(-1/4)`.
pub fn default_eps(n: usize) -> f64 {
    (n as f64).powf(-0.25)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{validate_dataset, FactorSpace, Spaces};

    fn dataset(responses: &[i32]) -> Dataset {
        let rows: Vec<Vec<i64>> = responses.iter().map(|&y| vec![0, y as i64]).collect();
        let spaces = Spaces::new(
            ResponseSpace::new(1).unwrap(),
            FactorSpace::new(1, 0).unwrap(),
        );
        validate_dataset(&rows, spaces).unwrap()
    }

    #[test]
    fn marginal_from_counts() {
        let d = dataset(&[1, 1, -1, 1]);
        let m: Vec<f64> = empirical_marginal(&d, &[1, 2, 3, 4]).unwrap();
        assert_eq!(m, vec![0.25, 0.0, 0.75]);

        let single: Vec<f64> = empirical_marginal(&dataset(&[0]), &[1]).unwrap();
        assert_eq!(single, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn psi_hat_worked_example() {
        let d = dataset(&[1, 1, -1, 1]);
        let psi: PenaltyEstimate<f64> = psi_hat(&d, &[1, 2, 3, 4]).unwrap();
        assert_eq!(psi.weight(1), 4.0 / 3.0);
        assert_eq!(psi.weight(-1), 4.0);
        assert_eq!(psi.weight(0), 0.0);
        assert_eq!(psi.source_fold_size(), 4);
    }

    #[test]
    fn psi_hat_single_valued_fold() {
        let d = dataset(&[1, 1, 1]);
        let psi: PenaltyEstimate<f64> = psi_hat(&d, &[1, 2, 3]).unwrap();
        assert_eq!(psi.weight(1), 1.0);
        assert_eq!(psi.weight(-1), 0.0);
        assert_eq!(psi.weight(0), 0.0);
    }

    #[test]
    fn clipping() {
        let d = dataset(&[1, 1, -1, 1]);
        let psi: PenaltyEstimate<f64> = psi_hat_clipped(&d, &[1, 2, 3, 4], 0.5).unwrap();
        assert_eq!(psi.weight(-1), 2.0);
        assert_eq!(psi.weight(1), 4.0 / 3.0); // below the cap

        // cap above fold size: identical to the plain estimator
        let loose: PenaltyEstimate<f64> = psi_hat_clipped(&d, &[1, 2, 3, 4], 0.1).unwrap();
        let plain: PenaltyEstimate<f64> = psi_hat(&d, &[1, 2, 3, 4]).unwrap();
        assert_eq!(loose.values(), plain.values());

        // [1,1,1,-1] with eps = 4^(-1/4): psi_hat(-1) = min(4, 4^(1/4))
        let d = dataset(&[1, 1, 1, -1]);
        let eps = 0.25f64.powf(0.25); // 4^(-1/4)
        let psi: PenaltyEstimate<f64> = psi_hat_clipped(&d, &[1, 2, 3, 4], eps).unwrap();
        assert!((psi.weight(-1) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn empty_fold_rejected() {
        let d = dataset(&[1]);
        assert!(matches!(
            psi_hat::<f64>(&d, &[]),
            Err(Error::EmptyFold)
        ));
    }

    #[test]
    fn count_identity_and_bound() {
        // psi_hat(y) * count(y) = #fold whenever count(y) > 0, and
        // psi_hat(y) <= #fold always.
        let d = dataset(&[1, -1, -1, 0, 1, 1, -1, 0]);
        let fold: Vec<usize> = (1..=8).collect();
        let psi: PenaltyEstimate<f64> = psi_hat(&d, &fold).unwrap();
        let counts = [3.0, 2.0, 3.0]; // y = -1, 0, 1
        for (idx, y) in [(-1, 0usize), (0, 1), (1, 2)].map(|(y, i)| (i, y)) {
            let w = psi.weight(y);
            assert!(w <= 8.0);
            if counts[idx] > 0.0 {
                assert_eq!(w * counts[idx], 8.0);
            }
        }
    }

    #[test]
    fn permutation_invariance() {
        let d = dataset(&[1, -1, 0, 1, 1, -1]);
        let a: PenaltyEstimate<f64> = psi_hat(&d, &[1, 2, 3, 4, 5, 6]).unwrap();
        let b: PenaltyEstimate<f64> = psi_hat(&d, &[6, 4, 2, 5, 3, 1]).unwrap();
        assert_eq!(a.values(), b.values());
    }
}
