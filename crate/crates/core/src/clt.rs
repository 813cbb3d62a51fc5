//! Variance estimation, confidence intervals and Monte Carlo validation
//! of the limit behavior of the cross-validated estimates.
//!
//! Two statistics are validated:
//!
//! - the full estimator, centered at the oracle error and scaled by
//!   `sqrt(N)`, standardized by the plug-in estimate of the variance of
//!   the centered conditional-indicator sum `V`;
//! - the truncated-column statistic, scaled by `sqrt(m_N)` and
//!   standardized by the pointwise-loss variance over `K` (the columns
//!   of the fold array are independent across folds, so the column mean
//!   carries a `1/K` variance factor).
//!
//! Oracle centering always comes from the exact law; the estimates never
//! standardize against themselves.

use rayon::prelude::*;

use crate::cv::{err_hat_k, err_hat_partial, EpsRule, ErrEstimate, PsiScope};
use crate::domain::{Dataset, FactorSubset, ResponseSpace};
use crate::error::{Error, Result};
use crate::normal::{inv_phi, ks_distance_to_std_normal};
use crate::num::Real;
use crate::oracle::{err_exact_def, optimal_predictor, JointLaw, PredictorFn};
use crate::penalty::{psi_hat_clipped, PenaltyFn};
use crate::predictor::{fit, predict, PredictionTable};
use crate::simgen::{exact_law, generate_stream, GeneratorSpec, SeededStream};

/// A plug-in variance estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceEstimate<R: Real> {
    pub sigma2_hat: R,
    pub n_samples: usize,
    pub method: &'static str,
}

/// Response marginals and conditional exceedance probabilities
/// `P(|f(X) - y| > i | Y = y)`, either exact (from a law) or plug-in
/// (from a sample).
#[derive(Debug, Clone)]
pub struct ConditionalErrorModel<R: Real> {
    marginals: Vec<R>,
    exceed: Vec<R>,
    space: ResponseSpace,
}

impl<R: Real> ConditionalErrorModel<R> {
    pub fn from_law(law: &JointLaw<R>, f: &PredictorFn) -> Result<Self> {
        let space = law.spaces().response;
        let m = space.m() as usize;
        let marginals = law.response_marginals();
        let mut exceed = vec![R::zero(); space.card() * 2 * m];
        let positions = crate::oracle::projection_positions(law.factors(), f.beta())?;
        let alphabet = law.spaces().factor.alphabet();
        for e in law.entries() {
            let code = positions
                .iter()
                .fold(0usize, |acc, &t| acc * alphabet + e.cell[t] as usize);
            let z = f.table()[code] as i32;
            let yi = space.index(e.y);
            for i in 0..2 * m {
                if (z - e.y).unsigned_abs() as usize > i {
                    exceed[yi * 2 * m + i] = exceed[yi * 2 * m + i] + e.p;
                }
            }
        }
        for yi in 0..space.card() {
            if marginals[yi] > R::zero() {
                for i in 0..2 * m {
                    exceed[yi * 2 * m + i] = exceed[yi * 2 * m + i] / marginals[yi];
                }
            }
        }
        Ok(Self {
            marginals,
            exceed,
            space,
        })
    }

    /// Plug-in model: empirical marginals and exceedance frequencies of
    /// a fitted table over the whole sample.
    pub fn from_dataset(data: &Dataset, table: &PredictionTable) -> Self {
        let space = data.response_space();
        let m = space.m() as usize;
        let n = data.n_samples();
        let mut counts = vec![0usize; space.card()];
        let mut exceed_counts = vec![0usize; space.card() * 2 * m];
        for j in 1..=n {
            let y = data.response(j);
            let yi = space.index(y);
            counts[yi] += 1;
            let z = predict(table, &data.row(j));
            for i in 0..2 * m {
                if (z - y).unsigned_abs() as usize > i {
                    exceed_counts[yi * 2 * m + i] += 1;
                }
            }
        }
        let marginals = counts
            .iter()
            .map(|&c| R::from_usize(c) / R::from_usize(n))
            .collect();
        let exceed = (0..space.card() * 2 * m)
            .map(|t| {
                let yi = t / (2 * m);
                if counts[yi] == 0 {
                    R::zero()
                } else {
                    R::from_usize(exceed_counts[t]) / R::from_usize(counts[yi])
                }
            })
            .collect();
        Self {
            marginals,
            exceed,
            space,
        }
    }

    pub fn marginal(&self, y: i32) -> R {
        self.marginals[self.space.index(y)]
    }
}

/// One realization of the centered conditional-indicator sum `V` at an
/// observed response `y` and prediction `predicted`.
pub fn v_realization<R: Real>(
    model: &ConditionalErrorModel<R>,
    y: i32,
    predicted: i32,
) -> Result<R> {
    let space = model.space;
    let m = space.m() as i32;
    let p_y = model.marginal(y);
    if p_y <= R::zero() {
        return Err(Error::ZeroMarginal { y });
    }
    let yi = space.index(y);
    let inv = R::one() / p_y;
    let mut v = R::zero();
    for i in 0..2 * m {
        if y.abs() <= i - m {
            continue;
        }
        let ind = if (predicted - y).abs() > i {
            R::one()
        } else {
            R::zero()
        };
        v = v + inv * (ind - model.exceed[yi * 2 * m as usize + i as usize]);
    }
    Ok(v)
}

/// `V` evaluated on every row of a dataset under a fitted table.
pub fn v_over_dataset<R: Real>(
    model: &ConditionalErrorModel<R>,
    data: &Dataset,
    table: &PredictionTable,
) -> Result<Vec<R>> {
    (1..=data.n_samples())
        .map(|j| v_realization(model, data.response(j), predict(table, &data.row(j))))
        .collect()
}

fn all_indices(data: &Dataset) -> Vec<usize> {
    (1..=data.n_samples()).collect()
}

/// Plug-in estimate of the variance of `V`: fit on the full sample,
/// estimate marginals and conditionals empirically, take the variance
/// of the per-row realizations (their mean is identically zero).
pub fn sigma2_hat<R: Real>(
    data: &Dataset,
    beta: &FactorSubset,
    eps: R,
) -> Result<VarianceEstimate<R>> {
    let idx = all_indices(data);
    let psi = psi_hat_clipped(data, &idx, eps)?;
    let table = fit(data, &idx, beta, &psi)?;
    let model = ConditionalErrorModel::from_dataset(data, &table);
    let vs = v_over_dataset(&model, data, &table)?;
    let n = R::from_usize(vs.len());
    let mean = vs.iter().fold(R::zero(), |a, &v| a + v) / n;
    let second = vs.iter().fold(R::zero(), |a, &v| a + v * v) / n;
    let var = second - mean * mean;
    Ok(VarianceEstimate {
        sigma2_hat: if var > R::zero() { var } else { R::zero() },
        n_samples: data.n_samples(),
        method: "plug-in conditional-indicator variance",
    })
}

/// Plug-in estimate of the pointwise-loss variance
/// `Var(psi(Y) |f(X) - Y|)` under the full-sample fit.
pub fn loss_variance_hat<R: Real>(
    data: &Dataset,
    beta: &FactorSubset,
    eps: R,
) -> Result<VarianceEstimate<R>> {
    let idx = all_indices(data);
    let psi = psi_hat_clipped(data, &idx, eps)?;
    let table = fit(data, &idx, beta, &psi)?;
    let n = R::from_usize(data.n_samples());
    let mut mean = R::zero();
    let mut second = R::zero();
    for j in 1..=data.n_samples() {
        let y = data.response(j);
        let z = predict(&table, &data.row(j));
        // the i-sum of the indicator telescopes to the absolute deviation
        let loss = psi.weight(y) * R::from_usize((z - y).unsigned_abs() as usize);
        mean = mean + loss;
        second = second + loss * loss;
    }
    mean = mean / n;
    second = second / n;
    let var = second - mean * mean;
    Ok(VarianceEstimate {
        sigma2_hat: if var > R::zero() { var } else { R::zero() },
        n_samples: data.n_samples(),
        method: "plug-in pointwise-loss variance",
    })
}

/// A two-sided confidence interval for the prediction error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CiInterval<R: Real> {
    pub lo: R,
    pub hi: R,
    /// True when the variance estimate was zero and the interval
    /// degenerated to a point.
    pub degenerate: bool,
}

/// `estimate +- z_((1+level)/2) * sigma_hat / sqrt(N)`.
pub fn confidence_interval<R: Real>(
    epe: &ErrEstimate<R>,
    var: &VarianceEstimate<R>,
    level: f64,
) -> Result<CiInterval<R>> {
    if !(0.0..1.0).contains(&level) || level <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "confidence level {level} outside (0, 1)"
        )));
    }
    if var.sigma2_hat < R::zero() {
        return Err(Error::InvalidParameter("negative variance".into()));
    }
    if var.sigma2_hat == R::zero() {
        return Ok(CiInterval {
            lo: epe.value,
            hi: epe.value,
            degenerate: true,
        });
    }
    let z = R::from_f64(inv_phi((1.0 + level) / 2.0));
    let half = z * var.sigma2_hat.sqrt() / R::from_usize(epe.n_samples).sqrt();
    Ok(CiInterval {
        lo: epe.value - half,
        hi: epe.value + half,
        degenerate: false,
    })
}

/// Which limit statistic a Monte Carlo run exercises.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CltVariant {
    /// `sqrt(N) (err_hat_K - Err) / sigma_hat`.
    FullEstimator,
    /// `sqrt(m_N) (L_hat_{m_N} - Err) / sigma_hat` with
    /// `m_N = floor(sqrt(N/K))` unless overridden.
    TruncatedColumns { m_n: Option<usize> },
}

/// Per-replicate Monte Carlo record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepStat<R: Real> {
    pub estimate: R,
    pub sigma2_hat: R,
    pub stat: R,
}

/// Distributional diagnostics of a standardized statistic over
/// independent replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct MCReport<R: Real> {
    pub replicates: Vec<RepStat<R>>,
    pub err_oracle: R,
    /// `N` for the full estimator, `m_N` for the truncated variant,
    /// `m_n` for the exchangeable-array harness.
    pub scale: usize,
    pub mean: f64,
    pub variance: f64,
    pub ks: f64,
    pub degenerate_replicates: usize,
}

impl<R: Real> MCReport<R> {
    fn from_stats(replicates: Vec<RepStat<R>>, err_oracle: R, scale: usize) -> Self {
        let n = replicates.len();
        let degenerate_replicates = replicates
            .iter()
            .filter(|r| r.sigma2_hat == R::zero())
            .count();
        let stats: Vec<f64> = replicates.iter().map(|r| r.stat.as_f64()).collect();
        let mean = stats.iter().sum::<f64>() / n as f64;
        let variance = if n > 1 {
            stats.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        let ks = ks_distance_to_std_normal(&stats);
        Self {
            replicates,
            err_oracle,
            scale,
            mean,
            variance,
            ks,
            degenerate_replicates,
        }
    }

    /// True when every replicate had zero estimated variance.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate_replicates == self.replicates.len()
    }
}

/// Oracle ingredients for centering: exact law, optimal predictor on
/// `beta`, balanced penalty, exact error.
pub fn oracle_center<R: Real>(
    spec: &GeneratorSpec,
    beta: &FactorSubset,
) -> Result<(JointLaw<R>, PredictorFn, R)> {
    let law64 = exact_law(spec)?;
    // the laws are computed in f64 and cast at the boundary
    let entries = law64
        .entries()
        .iter()
        .map(|e| crate::oracle::LawEntry {
            cell: e.cell.clone(),
            y: e.y,
            p: R::from_f64(e.p),
        })
        .collect();
    let law = JointLaw::new(*law64.spaces(), law64.factors().clone(), entries)?;
    let psi = law.balanced_penalty()?;
    let f = optimal_predictor(&law, beta, &psi)?;
    let err = err_exact_def(&law, &f, &psi)?;
    Ok((law, f, err))
}

/// Simulates independent datasets and reports distributional
/// diagnostics of the standardized statistic against the standard
/// normal. Replicate `i` draws from substream `i`.
pub fn mc_normality<R: Real>(
    spec: &GeneratorSpec,
    beta: &FactorSubset,
    k_folds: usize,
    eps: R,
    scope: PsiScope,
    replicates: usize,
    variant: CltVariant,
) -> Result<MCReport<R>> {
    if replicates == 0 {
        return Err(Error::InvalidParameter("replicates must be >= 1".into()));
    }
    spec.validate()?;
    let n = spec.n_samples;
    let (_, _, err_oracle) = oracle_center::<R>(spec, beta)?;

    let (scale, m_n) = match variant {
        CltVariant::FullEstimator => (n, None),
        CltVariant::TruncatedColumns { m_n } => {
            if k_folds == 0 || n % k_folds != 0 {
                return Err(Error::FoldsDoNotDivide { n, k: k_folds });
            }
            let q = n / k_folds;
            let m = m_n.unwrap_or_else(|| ((q as f64).sqrt().floor() as usize).max(1));
            if m == 0 || m > q {
                return Err(Error::InvalidPrefix { m_n: m, q });
            }
            (m, Some(m))
        }
    };
    let scale_r = R::from_usize(scale).sqrt();

    let runs: Vec<Result<RepStat<R>>> = (0..replicates)
        .into_par_iter()
        .map(|rep| {
            let data = generate_stream(spec, rep as u64)?;
            let (estimate, sigma2) = match m_n {
                None => {
                    let e = err_hat_k(&data, beta, k_folds, eps, scope)?;
                    let v = sigma2_hat(&data, beta, eps)?;
                    (e.value, v.sigma2_hat)
                }
                Some(m) => {
                    let e = err_hat_partial(&data, beta, k_folds, m, eps, scope)?;
                    let v = loss_variance_hat(&data, beta, eps)?;
                    (e, v.sigma2_hat / R::from_usize(k_folds))
                }
            };
            let stat = if sigma2 > R::zero() {
                scale_r * (estimate - err_oracle) / sigma2.sqrt()
            } else {
                R::zero()
            };
            Ok(RepStat {
                estimate,
                sigma2_hat: sigma2,
                stat,
            })
        })
        .collect();

    let mut replicate_stats = Vec::with_capacity(replicates);
    for r in runs {
        replicate_stats.push(r?);
    }
    Ok(MCReport::from_stats(replicate_stats, err_oracle, scale))
}

/// Built-in row-wise exchangeable constructions for the array CLT
/// harness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RowConstruction {
    /// Independent standard normals; limiting variance parameter 1.
    IidNormal,
    /// `X_i = A + xi_i` with a shared centered row effect `A`; the
    /// effect cancels in the centered partial sums and the limiting
    /// variance parameter is `Var(xi) = noise_sd^2`.
    SharedEffect { row_effect_sd: f64, noise_sd: f64 },
}

impl RowConstruction {
    fn theory_sigma2(&self) -> f64 {
        match self {
            RowConstruction::IidNormal => 1.0,
            RowConstruction::SharedEffect { noise_sd, .. } => noise_sd * noise_sd,
        }
    }
}

/// Configuration of one harness run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Config {
    pub construction: RowConstruction,
    /// Row length `k_n`.
    pub row_len: usize,
    /// Target ratio `alpha = lim m_n / k_n`, in `[0, 1)`. With
    /// `alpha = 0` the prefix is `floor(sqrt(k_n))`.
    pub alpha: f64,
    pub replicates: usize,
    pub seed: u64,
}

/// Empirically validates the exchangeable-array CLT: builds rows,
/// computes `(1/sqrt(m_n)) sum_{i<=m_n} (X_i - mean_row)` and checks the
/// standardized law against `N(0, (1-alpha) sigma^2)`.
pub fn lemma1_harness(cfg: &Lemma1Config) -> Result<MCReport<f64>> {
    if cfg.replicates == 0 {
        return Err(Error::InvalidParameter("replicates must be >= 1".into()));
    }
    if !(0.0..1.0).contains(&cfg.alpha) {
        return Err(Error::InvalidParameter(format!(
            "alpha {} outside [0, 1)",
            cfg.alpha
        )));
    }
    if cfg.row_len < 4 {
        return Err(Error::InvalidParameter("row length must be >= 4".into()));
    }
    if let RowConstruction::SharedEffect {
        row_effect_sd,
        noise_sd,
    } = cfg.construction
    {
        if !(row_effect_sd.is_finite() && noise_sd.is_finite())
            || row_effect_sd < 0.0
            || noise_sd <= 0.0
        {
            return Err(Error::InvalidParameter(
                "shared-effect construction needs finite sds, noise_sd > 0".into(),
            ));
        }
    }
    let k_n = cfg.row_len;
    let m_n = if cfg.alpha > 0.0 {
        ((cfg.alpha * k_n as f64).round() as usize).clamp(1, k_n)
    } else {
        ((k_n as f64).sqrt().floor() as usize).max(1)
    };
    let target_sd = ((1.0 - cfg.alpha) * cfg.construction.theory_sigma2()).sqrt();

    let stats: Vec<RepStat<f64>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|rep| {
            let mut rng = SeededStream::new(cfg.seed, rep as u64);
            let shared = match cfg.construction {
                RowConstruction::IidNormal => 0.0,
                RowConstruction::SharedEffect { row_effect_sd, .. } => {
                    rng.normal() * row_effect_sd
                }
            };
            let noise_sd = match cfg.construction {
                RowConstruction::IidNormal => 1.0,
                RowConstruction::SharedEffect { noise_sd, .. } => noise_sd,
            };
            let mut sum_all = 0.0f64;
            let mut sum_prefix = 0.0f64;
            for i in 0..k_n {
                let x = shared + rng.normal() * noise_sd;
                sum_all += x;
                if i < m_n {
                    sum_prefix += x;
                }
            }
            let mean_row = sum_all / k_n as f64;
            let t = (sum_prefix - m_n as f64 * mean_row) / (m_n as f64).sqrt();
            RepStat {
                estimate: t,
                sigma2_hat: target_sd * target_sd,
                stat: t / target_sd,
            }
        })
        .collect();

    Ok(MCReport::from_stats(stats, 0.0, m_n))
}

/// One point of a stabilization trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint<R: Real> {
    pub n_samples: usize,
    pub err_hat: R,
    pub err_oracle: R,
    pub sigma2_hat: R,
    pub ci_lo: R,
    pub ci_hi: R,
    pub degenerate: bool,
}

/// Estimates along an ascending sample-size grid, one substream per
/// grid point, with confidence bounds for plotting.
pub fn stabilization_trace<R: Real>(
    spec: &GeneratorSpec,
    beta: &FactorSubset,
    k_folds: usize,
    eps_rule: EpsRule,
    scope: PsiScope,
    grid: &[usize],
    level: f64,
) -> Result<Vec<TracePoint<R>>> {
    if grid.is_empty() || !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter(
            "grid must be nonempty and strictly ascending".into(),
        ));
    }
    let (_, _, err_oracle) = oracle_center::<R>(spec, beta)?;
    let points: Vec<Result<TracePoint<R>>> = grid
        .par_iter()
        .enumerate()
        .map(|(g, &n)| {
            let mut point_spec = *spec;
            point_spec.n_samples = n;
            let data = generate_stream(&point_spec, g as u64)?;
            let eps = R::from_f64(eps_rule.eval(n));
            let e = err_hat_k(&data, beta, k_folds, eps, scope)?;
            let v = sigma2_hat(&data, beta, eps)?;
            let ci = confidence_interval(&e, &v, level)?;
            Ok(TracePoint {
                n_samples: n,
                err_hat: e.value,
                err_oracle,
                sigma2_hat: v.sigma2_hat,
                ci_lo: ci.lo,
                ci_hi: ci.hi,
                degenerate: ci.degenerate,
            })
        })
        .collect();
    points.into_iter().collect()
}
