//! The K-fold cross-validated prediction-error estimate.
//!
//! Per fold k the predictor is fitted on the complement of the block
//! S_k; the penalty estimate is taken either on S_k itself (`Fold`, the
//! estimator as displayed) or on the complement (`Complement`, the
//! variant used for the limit theorem). The double sum over i and y is
//! evaluated literally; the inner sample sums are exact integer counts,
//! so the result is independent of iteration order over samples and
//! bit-stable under any parallel schedule.
//!
//! When a fold lacks some response value, its penalty estimate is zero
//! and those terms drop out silently (the 0/0 := 0 convention); no error
//! is raised.

use crate::domain::{Dataset, FactorSubset, PenaltyVector};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::partition::{make_partition, FoldPartition};
use crate::penalty::{psi_hat_from_counts, PenaltyFn};
use crate::predictor::weighted_argmin;

/// Which index set the penalty is estimated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiScope {
    /// `psi_hat(y, S_k)`: the fold itself, as in the estimator display.
    Fold,
    /// `psi_hat(y, complement of S_k)`, the renaming used ahead of the
    /// central limit theorem.
    Complement,
}

impl std::fmt::Display for PsiScope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PsiScope::Fold => write!(f, "fold"),
            PsiScope::Complement => write!(f, "complement"),
        }
    }
}

/// How the regularization level is chosen from the sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsRule {
    /// `eps_N = N^(-1/4)`, the simulation default.
    NQuarter,
    /// A fixed value.
    Fixed(f64),
}

impl EpsRule {
    pub fn eval(&self, n: usize) -> f64 {
        match self {
            EpsRule::NQuarter => (n as f64).powf(-0.25),
            EpsRule::Fixed(e) => *e,
        }
    }
}

/// A cross-validated error estimate together with the configuration
/// that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrEstimate<R: Real> {
    pub value: R,
    pub beta: FactorSubset,
    pub k_folds: usize,
    pub n_samples: usize,
    pub scope: PsiScope,
}

/// Penalty weighting used by the engine: estimated from counts (the
/// balanced estimator, clipped) or a fixed user-supplied vector.
enum Weighting<'a, R: Real> {
    Estimated { clip_at: R },
    Fixed(&'a PenaltyVector<R>),
}

/// Precomputed per-(dataset, K) state shared across subset evaluations.
/// Everything here is independent of the factor subset.
pub(crate) struct CvContext<'a, R: Real> {
    data: &'a Dataset,
    partition: FoldPartition,
    /// 0-based fold id per sample.
    fold_of: Vec<u16>,
    /// dense response index per sample.
    yidx: Vec<u8>,
    /// `psi` weights used inside the per-fold fit (training complement).
    psi_train: Vec<Vec<R>>,
    /// `psi` weights applied to the fold averages (scope-dependent).
    psi_scope: Vec<Vec<R>>,
    /// prediction for cells never seen in a fold's training complement.
    fallback_z: Vec<i32>,
}

impl<'a, R: Real> CvContext<'a, R> {
    /// Context with balanced penalty estimates clipped at `clip_at`.
    pub(crate) fn new_estimated(
        data: &'a Dataset,
        k_folds: usize,
        scope: PsiScope,
        clip_at: R,
    ) -> Result<Self> {
        Self::new(data, k_folds, scope, Weighting::Estimated { clip_at })
    }

    fn new(
        data: &'a Dataset,
        k_folds: usize,
        scope: PsiScope,
        weighting: Weighting<'_, R>,
    ) -> Result<Self> {
        let n = data.n_samples();
        let partition = make_partition(n, k_folds)?;
        let space = data.response_space();
        let card = space.card();

        let mut fold_of = vec![0u16; n];
        for k in 1..=k_folds {
            for j in partition.block(k) {
                fold_of[j - 1] = (k - 1) as u16;
            }
        }
        let yidx: Vec<u8> = data
            .responses()
            .iter()
            .map(|&y| space.index(y as i32) as u8)
            .collect();

        let mut fold_y = vec![vec![0usize; card]; k_folds];
        let mut total_y = vec![0usize; card];
        for j in 0..n {
            fold_y[fold_of[j] as usize][yidx[j] as usize] += 1;
            total_y[yidx[j] as usize] += 1;
        }

        let mut psi_train = Vec::with_capacity(k_folds);
        let mut psi_scope = Vec::with_capacity(k_folds);
        let mut fallback_z = Vec::with_capacity(k_folds);
        let mut comp_counts_r = vec![R::zero(); card];
        for k in 0..k_folds {
            let comp_size = n - partition.block_len(k + 1);
            let comp_counts: Vec<usize> = (0..card).map(|yi| total_y[yi] - fold_y[k][yi]).collect();
            let (train, scoped) = match weighting {
                Weighting::Estimated { clip_at } => {
                    let train =
                        psi_hat_from_counts::<R>(&comp_counts, comp_size, space, Some(clip_at));
                    let scoped = match scope {
                        PsiScope::Fold => psi_hat_from_counts::<R>(
                            &fold_y[k],
                            partition.block_len(k + 1),
                            space,
                            Some(clip_at),
                        ),
                        PsiScope::Complement => train.clone(),
                    };
                    (train.values().to_vec(), scoped.values().to_vec())
                }
                Weighting::Fixed(psi) => (psi.dense(), psi.dense()),
            };
            for yi in 0..card {
                comp_counts_r[yi] = R::from_usize(comp_counts[yi]);
            }
            fallback_z.push(weighted_argmin(space, &train, &comp_counts_r));
            psi_train.push(train);
            psi_scope.push(scoped);
        }

        Ok(Self {
            data,
            partition,
            fold_of,
            yidx,
            psi_train,
            psi_scope,
            fallback_z,
        })
    }

    /// Evaluates the estimator for one subset. `prefix` limits the inner
    /// sample sum of each fold to its first `p` samples (the
    /// truncated-column statistic); `None` uses the whole fold and the
    /// fold-size division of the display.
    pub(crate) fn eval(
        &self,
        beta: &FactorSubset,
        prefix: Option<usize>,
        scratch: &mut CvScratch<R>,
    ) -> Result<R> {
        let data = self.data;
        let n = data.n_samples();
        let space = data.response_space();
        let card = space.card();
        let m = space.m() as usize;
        let k_folds = self.partition.k();
        let alphabet = data.factor_space().alphabet();
        let cells = data.factor_space().cell_count(beta.len())?;
        if beta.indices().last().copied().unwrap_or(0) > data.factor_space().n() {
            return Err(Error::InvalidSubset(format!(
                "subset {beta} exceeds the dataset's {} factors",
                data.factor_space().n()
            )));
        }
        scratch.resize(n, cells, k_folds, card, m);

        // cell code per sample, column by column
        let codes = &mut scratch.codes;
        codes[..n].fill(0);
        for c in beta.columns() {
            let col = data.column(c);
            for j in 0..n {
                codes[j] = codes[j] * alphabet as u32 + col[j] as u32;
            }
        }

        // per-fold and total (cell, y) occurrence counts; the big count
        // tables are all-zero between evals and only touched entries are
        // cleared afterwards, tracked by the occupied-pair list
        let fold_counts = &mut scratch.fold_counts;
        let total_counts = &mut scratch.total_counts;
        let occupied = &mut scratch.occupied;
        occupied.clear();
        for j in 0..n {
            let k = self.fold_of[j] as usize;
            let code = codes[j] as usize;
            let base = code * card + self.yidx[j] as usize;
            let fold_base = k * cells * card + code * card;
            if fold_counts[fold_base..fold_base + card].iter().all(|&c| c == 0) {
                occupied.push((k as u32, code as u32));
            }
            fold_counts[k * cells * card + base] += 1;
            total_counts[base] += 1;
        }

        // misprediction counts n_k(y, i), accumulated per occupied
        // (fold, cell) pair; integer counts, so order-independent
        let mis = &mut scratch.mis;
        mis[..k_folds * card * 2 * m].fill(0);
        let counts_r = &mut scratch.counts_r;
        for &(k, code) in occupied.iter() {
            let (k, code) = (k as usize, code as usize);
            let fold_base = k * cells * card + code * card;
            let test = &fold_counts[fold_base..fold_base + card];
            let z = {
                let mut any = false;
                for yi in 0..card {
                    let train = total_counts[code * card + yi] - test[yi];
                    counts_r[yi] = R::from_usize(train as usize);
                    any |= train > 0;
                }
                if any {
                    weighted_argmin(space, &self.psi_train[k], counts_r)
                } else {
                    self.fallback_z[k]
                }
            };
            match prefix {
                None => {
                    for yi in 0..card {
                        let cnt = test[yi];
                        if cnt == 0 {
                            continue;
                        }
                        let d = (space.value_at(yi) - z).unsigned_abs() as usize;
                        for i in 0..d.min(2 * m) {
                            mis[(k * card + yi) * 2 * m + i] += cnt;
                        }
                    }
                }
                Some(p) => {
                    // per-sample pass restricted to the fold prefix
                    let block_start = *self.partition.block(k + 1).start();
                    for off in 0..p {
                        let j = block_start - 1 + off;
                        if codes[j] as usize != code {
                            continue;
                        }
                        let yi = self.yidx[j] as usize;
                        let d = (space.value_at(yi) - z).unsigned_abs() as usize;
                        for i in 0..d.min(2 * m) {
                            mis[(k * card + yi) * 2 * m + i] += 1;
                        }
                    }
                }
            }
        }

        // restore the all-zero invariant of the count tables
        for &(k, code) in occupied.iter() {
            let (k, code) = (k as usize, code as usize);
            let fold_base = k * cells * card + code * card;
            fold_counts[fold_base..fold_base + card].fill(0);
            total_counts[code * card..(code + 1) * card].fill(0);
        }

        // the literal double sum over i and y, fold average inside
        let k_r = R::from_usize(k_folds);
        let mut acc = R::zero();
        for i in 0..2 * m {
            for y in space.values() {
                if y.abs() as usize + m <= i {
                    continue; // |y| <= i - m contributes nothing
                }
                let yi = space.index(y);
                let mut inner = R::zero();
                for k in 0..k_folds {
                    let denom = match prefix {
                        None => self.partition.block_len(k + 1),
                        Some(p) => p,
                    };
                    let cnt = mis[(k * card + yi) * 2 * m + i];
                    if cnt > 0 {
                        inner = inner
                            + self.psi_scope[k][yi] * R::from_usize(cnt as usize)
                                / R::from_usize(denom);
                    }
                }
                acc = acc + inner / k_r;
            }
        }
        Ok(acc)
    }
}

/// Reusable per-worker buffers for [`CvContext::eval`]. The two count
/// tables hold the invariant of being all-zero between evals.
pub(crate) struct CvScratch<R: Real> {
    codes: Vec<u32>,
    fold_counts: Vec<u32>,
    total_counts: Vec<u32>,
    mis: Vec<u32>,
    counts_r: Vec<R>,
    occupied: Vec<(u32, u32)>,
}

impl<R: Real> CvScratch<R> {
    pub(crate) fn new() -> Self {
        Self {
            codes: Vec::new(),
            fold_counts: Vec::new(),
            total_counts: Vec::new(),
            mis: Vec::new(),
            counts_r: Vec::new(),
            occupied: Vec::new(),
        }
    }

    fn resize(&mut self, n: usize, cells: usize, k_folds: usize, card: usize, m: usize) {
        if self.codes.len() < n {
            self.codes.resize(n, 0);
        }
        if self.fold_counts.len() < k_folds * cells * card {
            self.fold_counts.resize(k_folds * cells * card, 0);
        }
        if self.total_counts.len() < cells * card {
            self.total_counts.resize(cells * card, 0);
        }
        if self.mis.len() < k_folds * card * 2 * m {
            self.mis.resize(k_folds * card * 2 * m, 0);
        }
        if self.counts_r.len() < card {
            self.counts_r.resize(card, R::zero());
        }
        debug_assert!(self.fold_counts.iter().all(|&c| c == 0));
        debug_assert!(self.total_counts.iter().all(|&c| c == 0));
    }
}

fn check_eps<R: Real>(eps: R) -> Result<R> {
    if eps <= R::zero() || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "regularization eps={eps} must be positive and finite"
        )));
    }
    Ok(R::one() / eps)
}

/// The K-fold cross-validated error estimate for the subset `beta`,
/// with balanced penalty estimates clipped at `1/eps`.
pub fn err_hat_k<R: Real>(
    data: &Dataset,
    beta: &FactorSubset,
    k_folds: usize,
    eps: R,
    scope: PsiScope,
) -> Result<ErrEstimate<R>> {
    let clip_at = check_eps(eps)?;
    let ctx = CvContext::new(data, k_folds, scope, Weighting::Estimated { clip_at })?;
    let mut scratch = CvScratch::new();
    let value = ctx.eval(beta, None, &mut scratch)?;
    Ok(ErrEstimate {
        value,
        beta: beta.clone(),
        k_folds,
        n_samples: data.n_samples(),
        scope,
    })
}

/// Same estimator with a fixed user-supplied penalty instead of the
/// balanced estimate; used when the penalty is known a priori.
pub fn err_hat_k_fixed_penalty<R: Real>(
    data: &Dataset,
    beta: &FactorSubset,
    k_folds: usize,
    psi: &PenaltyVector<R>,
    scope: PsiScope,
) -> Result<ErrEstimate<R>> {
    let ctx = CvContext::new(data, k_folds, scope, Weighting::Fixed(psi))?;
    let mut scratch = CvScratch::new();
    let value = ctx.eval(beta, None, &mut scratch)?;
    Ok(ErrEstimate {
        value,
        beta: beta.clone(),
        k_folds,
        n_samples: data.n_samples(),
        scope,
    })
}

/// The truncated-column statistic: the inner sample average of each
/// fold runs over its first `m_n` samples only. Requires `K | N`.
pub fn err_hat_partial<R: Real>(
    data: &Dataset,
    beta: &FactorSubset,
    k_folds: usize,
    m_n: usize,
    eps: R,
    scope: PsiScope,
) -> Result<R> {
    let n = data.n_samples();
    if k_folds == 0 || n % k_folds != 0 {
        return Err(Error::FoldsDoNotDivide { n, k: k_folds });
    }
    let q = n / k_folds;
    if m_n == 0 || m_n > q {
        return Err(Error::InvalidPrefix { m_n, q });
    }
    let clip_at = check_eps(eps)?;
    let ctx = CvContext::new(data, k_folds, scope, Weighting::Estimated { clip_at })?;
    let mut scratch = CvScratch::new();
    ctx.eval(beta, Some(m_n), &mut scratch)
}


#[cfg(test)]
mod bench_probe {
    use super::*;
    use crate::simgen::{generate, ExampleId, GeneratorSpec};

    #[test]
    #[ignore]
    fn stage_bisect() {
        let spec = GeneratorSpec {
            example: ExampleId::Ex2,
            n_factors: 50,
            gamma: 0.1,
            n_samples: 500,
            seed: 7,
        };
        let data = generate(&spec).unwrap();
        let beta = FactorSubset::new(vec![4, 9, 23, 41], 50).unwrap();
        let ctx = CvContext::<f64>::new_estimated(&data, 10, PsiScope::Fold, 4.7287).unwrap();
        let mut scratch = CvScratch::new();
        // warm
        let mut acc = 0.0;
        for _ in 0..100 {
            acc += ctx.eval(&beta, None, &mut scratch).unwrap();
        }
        let reps = 20000u32;
        let t0 = std::time::Instant::now();
        for _ in 0..reps {
            acc += ctx.eval(&beta, None, &mut scratch).unwrap();
        }
        println!("shared-ctx eval: {:?} (acc {acc})", t0.elapsed() / reps);

        // occupancy statistics
        let n = data.n_samples();
        let alphabet = 3u32;
        let mut codes = vec![0u32; n];
        for c in beta.columns() {
            let col = data.column(c);
            for j in 0..n {
                codes[j] = codes[j] * alphabet + col[j] as u32;
            }
        }
        let mut occ = std::collections::HashSet::new();
        for j in 0..n {
            occ.insert((ctx.fold_of[j], codes[j]));
        }
        println!("occupied pairs: {}", occ.len());
    }
}
