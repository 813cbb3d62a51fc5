//! The empirical prediction algorithm: fit a per-cell predictor on a
//! training index set, predict on held-out points.
//!
//! The fitted rule is the plug-in of the cost-minimizing predictor:
//! response counts replace probabilities cell by cell. Cells unseen in
//! training fall back to the best constant predictor of the training
//! marginal, so the table stays total.

use crate::domain::{Dataset, FactorSubset, ResponseSpace, Spaces};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::penalty::PenaltyFn;

/// A fitted per-cell prediction table on a factor subset.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionTable {
    beta: FactorSubset,
    predictions: Vec<i8>,
    seen: Vec<bool>,
    fallback: i8,
    train_size: usize,
    spaces: Spaces,
}

impl PredictionTable {
    pub fn beta(&self) -> &FactorSubset {
        &self.beta
    }

    /// Prediction used for cells with no training occurrences.
    pub fn fallback(&self) -> i32 {
        self.fallback as i32
    }

    pub fn train_size(&self) -> usize {
        self.train_size
    }

    /// Whether a cell code was observed during training.
    pub fn cell_seen(&self, code: usize) -> bool {
        self.seen[code]
    }

    /// Prediction at a dense cell code of the subset's alphabet.
    pub fn prediction_at_code(&self, code: usize) -> i32 {
        self.predictions[code] as i32
    }

    /// Dense prediction table (fallback already applied to unseen cells).
    pub fn predictions(&self) -> &[i8] {
        &self.predictions
    }
}

/// The `z` minimizing `sum_y psi(y) |y - z| counts(y)`, ties broken by
/// the smallest `z`. `psi_dense` and `counts` are in `y + m` order.
pub(crate) fn weighted_argmin<R: Real>(space: ResponseSpace, psi_dense: &[R], counts: &[R]) -> i32 {
    let mut best_z = -(space.m() as i32);
    let mut best_cost = R::infinity();
    for z in space.values() {
        let mut cost = R::zero();
        for y in space.values() {
            let dist = R::from_usize((y - z).unsigned_abs() as usize);
            cost = cost + psi_dense[space.index(y)] * dist * counts[space.index(y)];
        }
        if cost < best_cost {
            best_cost = cost;
            best_z = z;
        }
    }
    best_z
}

/// Fits the table on the rows named by `train` (1-based indices).
pub fn fit<R: Real>(
    data: &Dataset,
    train: &[usize],
    beta: &FactorSubset,
    psi: &impl PenaltyFn<R>,
) -> Result<PredictionTable> {
    if train.is_empty() {
        return Err(Error::EmptyFold);
    }
    let space = data.response_space();
    if psi.space() != space {
        return Err(Error::SpaceMismatch("penalty response space".into()));
    }
    if beta.indices().last().copied().unwrap_or(0) > data.factor_space().n() {
        return Err(Error::InvalidSubset(format!(
            "subset {beta} exceeds the dataset's {} factors",
            data.factor_space().n()
        )));
    }
    let alphabet = data.factor_space().alphabet();
    let cells = data.factor_space().cell_count(beta.len())?;
    let card = space.card();

    let mut cell_counts = vec![0usize; cells * card];
    let mut marginal = vec![0usize; card];
    for &j in train {
        let mut code = 0usize;
        for c in beta.columns() {
            code = code * alphabet + data.factor(j, c + 1) as usize;
        }
        cell_counts[code * card + space.index(data.response(j))] += 1;
        marginal[space.index(data.response(j))] += 1;
    }

    let psi_dense: Vec<R> = psi.dense();
    let to_r = |c: &[usize]| -> Vec<R> { c.iter().map(|&v| R::from_usize(v)).collect() };
    let fallback = weighted_argmin(space, &psi_dense, &to_r(&marginal)) as i8;

    let mut predictions = vec![fallback; cells];
    let mut seen = vec![false; cells];
    for code in 0..cells {
        let counts = &cell_counts[code * card..(code + 1) * card];
        if counts.iter().any(|&c| c > 0) {
            seen[code] = true;
            predictions[code] = weighted_argmin(space, &psi_dense, &to_r(counts)) as i8;
        }
    }

    Ok(PredictionTable {
        beta: beta.clone(),
        predictions,
        seen,
        fallback,
        train_size: train.len(),
        spaces: *data.spaces(),
    })
}

/// Predicts the response for a full factor row; a total function.
pub fn predict(table: &PredictionTable, x: &[u8]) -> i32 {
    let alphabet = table.spaces.factor.alphabet();
    let code = table
        .beta
        .columns()
        .fold(0usize, |acc, c| acc * alphabet + x[c] as usize);
    table.predictions[code] as i32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{validate_dataset, FactorSpace, PenaltyVector};

    fn spaces(n: usize, s: u8, m: u32) -> Spaces {
        Spaces::new(ResponseSpace::new(m).unwrap(), FactorSpace::new(n, s).unwrap())
    }

    fn dataset(rows: &[(u8, u8, i32)]) -> Dataset {
        let raw: Vec<Vec<i64>> = rows
            .iter()
            .map(|&(a, b, y)| vec![a as i64, b as i64, y as i64])
            .collect();
        validate_dataset(&raw, spaces(2, 1, 1)).unwrap()
    }

    fn ones() -> PenaltyVector<f64> {
        PenaltyVector::ones(ResponseSpace::new(1).unwrap())
    }

    #[test]
    fn majority_with_weights_worked_example() {
        // cell (0,0): counts {1:3, -1:1} -> costs z=1:2, z=0:4, z=-1:6
        let d = dataset(&[
            (0, 0, 1),
            (0, 0, 1),
            (0, 0, 1),
            (0, 0, -1),
            (1, 1, -1),
        ]);
        let beta = FactorSubset::new(vec![1, 2], 2).unwrap();
        let t = fit(&d, &[1, 2, 3, 4, 5], &beta, &ones()).unwrap();
        assert_eq!(t.prediction_at_code(0), 1);
        assert_eq!(predict(&t, &[0, 0]), 1);
    }

    #[test]
    fn deterministic_relationship_reproduced() {
        // y = +1 iff x1 == x2, on all four cells, any penalty
        let d = dataset(&[
            (0, 0, 1),
            (0, 1, -1),
            (1, 0, -1),
            (1, 1, 1),
            (0, 0, 1),
            (1, 0, -1),
        ]);
        let beta = FactorSubset::new(vec![1, 2], 2).unwrap();
        for psi in [
            PenaltyVector::new(vec![1.0, 1.0, 1.0], ResponseSpace::new(1).unwrap()).unwrap(),
            PenaltyVector::new(vec![3.0, 0.5, 1.0], ResponseSpace::new(1).unwrap()).unwrap(),
        ] {
            let t = fit(&d, &[1, 2, 3, 4, 5, 6], &beta, &psi).unwrap();
            assert_eq!(predict(&t, &[0, 0]), 1);
            assert_eq!(predict(&t, &[0, 1]), -1);
            assert_eq!(predict(&t, &[1, 0]), -1);
            assert_eq!(predict(&t, &[1, 1]), 1);
        }
    }

    #[test]
    fn tie_rule_picks_smallest_z_for_fallback() {
        // marginal counts {1:5, -1:5}: all three costs equal 10 -> -1
        let rows: Vec<(u8, u8, i32)> = (0..10).map(|i| (0, 0, if i < 5 { 1 } else { -1 })).collect();
        let d = dataset(&rows);
        let beta = FactorSubset::new(vec![1], 2).unwrap();
        let t = fit(&d, &(1..=10).collect::<Vec<_>>(), &beta, &ones()).unwrap();
        assert_eq!(t.fallback(), -1);
        // cell x1=1 never trained: falls back
        assert!(!t.cell_seen(1));
        assert_eq!(predict(&t, &[1, 0]), -1);
    }

    #[test]
    fn prediction_ignores_factors_outside_beta() {
        let d = dataset(&[(0, 0, 1), (0, 1, 1), (1, 0, -1)]);
        let beta = FactorSubset::new(vec![1], 2).unwrap();
        let t = fit(&d, &[1, 2, 3], &beta, &ones()).unwrap();
        assert_eq!(predict(&t, &[0, 0]), predict(&t, &[0, 1]));
        assert_eq!(predict(&t, &[1, 0]), predict(&t, &[1, 1]));
    }

    #[test]
    fn train_order_is_irrelevant() {
        let d = dataset(&[(0, 0, 1), (0, 1, -1), (1, 0, 1), (1, 1, -1), (0, 0, -1)]);
        let beta = FactorSubset::new(vec![1, 2], 2).unwrap();
        let a = fit(&d, &[1, 2, 3, 4, 5], &beta, &ones()).unwrap();
        let b = fit(&d, &[5, 3, 1, 4, 2], &beta, &ones()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scaling_penalty_leaves_table_unchanged() {
        let d = dataset(&[(0, 0, 1), (0, 0, -1), (0, 0, -1), (1, 1, 1)]);
        let beta = FactorSubset::new(vec![1, 2], 2).unwrap();
        let psi = PenaltyVector::new(vec![2.0, 0.0, 1.0], ResponseSpace::new(1).unwrap()).unwrap();
        let a = fit(&d, &[1, 2, 3, 4], &beta, &psi).unwrap();
        let b = fit(&d, &[1, 2, 3, 4], &beta, &psi.scaled(7.5)).unwrap();
        assert_eq!(a.predictions(), b.predictions());
        assert_eq!(a.fallback(), b.fallback());
    }

    #[test]
    fn empty_train_rejected() {
        let d = dataset(&[(0, 0, 1)]);
        let beta = FactorSubset::new(vec![1], 2).unwrap();
        assert!(matches!(
            fit(&d, &[], &beta, &ones()),
            Err(Error::EmptyFold)
        ));
    }
}
