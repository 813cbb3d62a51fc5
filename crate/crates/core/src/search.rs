//! Exhaustive enumeration and ranking of all r-subsets of n factors by
//! their cross-validated error estimate.
//!
//! Subsets are enumerated in lexicographic order and scored in fixed
//! chunks of ranks; per-chunk partial rankings are merged by a final
//! deterministic sort, so the report is identical for any worker count.
//! No pruning: the estimator admits no useful bound, so the win comes
//! from sharing the per-fold penalty estimates and fallbacks across all
//! subsets and keeping the per-subset kernel allocation-free.

use rayon::prelude::*;

use crate::cv::{CvContext, CvScratch, PsiScope};
use crate::domain::{Dataset, FactorSubset};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::simgen::{generate_stream, GeneratorSpec};

/// One scored subset.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedResult<R: Real> {
    pub beta: FactorSubset,
    pub epe: R,
}

/// Echo of the parameters a search ran with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig<R: Real> {
    pub subset_size: usize,
    pub k_folds: usize,
    pub eps: R,
    pub scope: PsiScope,
    pub top_len: usize,
}

/// The `top_len` best subsets in ascending (epe, beta) order.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport<R: Real> {
    pub top: Vec<RankedResult<R>>,
    pub total_evaluated: u128,
    pub n_factors: usize,
    pub config: SearchConfig<R>,
}

/// Binomial coefficient, overflow-checked.
pub fn binomial(n: usize, r: usize) -> Result<u128> {
    if r > n {
        return Ok(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for t in 0..r {
        acc = acc
            .checked_mul((n - t) as u128)
            .ok_or_else(|| Error::InvalidParameter("binomial overflow".into()))?;
        acc /= (t + 1) as u128;
    }
    Ok(acc)
}

/// The `rank`-th (0-based) r-subset of `1..=n` in lexicographic order.
pub fn subset_at_rank(n: usize, r: usize, rank: u128) -> Result<Vec<usize>> {
    if r == 0 || r > n {
        return Err(Error::InvalidParameter(format!(
            "subset size {r} outside 1..={n}"
        )));
    }
    let total = binomial(n, r)?;
    if rank >= total {
        return Err(Error::InvalidParameter(format!(
            "rank {rank} >= C({n},{r}) = {total}"
        )));
    }
    let mut rem = rank;
    let mut out = Vec::with_capacity(r);
    let mut prev = 0usize;
    for pos in 0..r {
        for cand in prev + 1..=n {
            let with_cand = binomial(n - cand, r - 1 - pos)?;
            if rem < with_cand {
                out.push(cand);
                prev = cand;
                break;
            }
            rem -= with_cand;
        }
    }
    Ok(out)
}

/// Advances `ix` to the next r-subset in lexicographic order; returns
/// false past the last one.
pub fn next_subset(ix: &mut [usize], n: usize) -> bool {
    let r = ix.len();
    let mut t = r;
    while t > 0 {
        t -= 1;
        if ix[t] < n - (r - 1 - t) {
            ix[t] += 1;
            for u in t + 1..r {
                ix[u] = ix[u - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn cmp_ranked<R: Real>(a: &RankedResult<R>, b: &RankedResult<R>) -> std::cmp::Ordering {
    a.epe
        .partial_cmp(&b.epe)
        .unwrap_or(std::cmp::Ordering::Equal)
        .then_with(|| a.beta.cmp(&b.beta))
}

/// Ranks per chunk of at most this many subsets; fixed so the chunk
/// layout (and therefore the merge) never depends on the worker count.
const CHUNK: u128 = 4096;

/// Evaluates the estimator for every r-subset of the dataset's factors
/// and reports the `top_len` lowest.
pub fn search_all<R: Real>(
    data: &Dataset,
    subset_size: usize,
    k_folds: usize,
    eps: R,
    scope: PsiScope,
    top_len: usize,
) -> Result<SearchReport<R>> {
    if top_len == 0 {
        return Err(Error::InvalidParameter("report size must be >= 1".into()));
    }
    let n = data.factor_space().n();
    if subset_size == 0 || subset_size > n {
        return Err(Error::InvalidParameter(format!(
            "subset size {subset_size} outside 1..={n}"
        )));
    }
    if eps <= R::zero() || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "regularization eps={eps} must be positive and finite"
        )));
    }
    let clip_at = R::one() / eps;
    let ctx = CvContext::<R>::new_estimated(data, k_folds, scope, clip_at)?;
    let total = binomial(n, subset_size)?;
    let n_chunks = ((total + CHUNK - 1) / CHUNK) as usize;

    let chunk_tops: Vec<Result<Vec<RankedResult<R>>>> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk as u128 * CHUNK;
            let end = (start + CHUNK).min(total);
            let mut scratch = CvScratch::new();
            let mut ix = subset_at_rank(n, subset_size, start)?;
            let mut local: Vec<RankedResult<R>> = Vec::with_capacity(top_len + 1);
            let mut rank = start;
            loop {
                let beta = FactorSubset::new(ix.clone(), n)?;
                let epe = ctx.eval(&beta, None, &mut scratch)?;
                let cand = RankedResult { beta, epe };
                let pos = local
                    .binary_search_by(|probe| cmp_ranked(probe, &cand))
                    .unwrap_or_else(|p| p);
                if pos < top_len {
                    local.insert(pos, cand);
                    local.truncate(top_len);
                }
                rank += 1;
                if rank == end || !next_subset(&mut ix, n) {
                    break;
                }
            }
            Ok(local)
        })
        .collect();

    let mut merged: Vec<RankedResult<R>> = Vec::new();
    for chunk in chunk_tops {
        merged.extend(chunk?);
    }
    merged.sort_by(cmp_ranked);
    merged.truncate(top_len);

    Ok(SearchReport {
        top: merged,
        total_evaluated: total,
        n_factors: n,
        config: SearchConfig {
            subset_size,
            k_folds,
            eps,
            scope,
            top_len,
        },
    })
}

/// Outcome of one replicate of the identification experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RepOutcome<R: Real> {
    pub best: RankedResult<R>,
    pub runner_up_epe: Option<R>,
    pub significant_epe: R,
    /// True when the significant subset is the unique minimizer.
    pub hit: bool,
}

/// Aggregate of the identification experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentificationReport<R: Real> {
    pub replicates: Vec<RepOutcome<R>>,
    pub hits: usize,
}

impl<R: Real> IdentificationReport<R> {
    /// Fraction of replicates identifying the significant subset as the
    /// unique minimizer.
    pub fn rate(&self) -> f64 {
        self.hits as f64 / self.replicates.len() as f64
    }
}

/// Single sequential pass over all subsets keeping the two best plus the
/// significant subset's own estimate.
fn best_two_and_significant<R: Real>(
    ctx: &CvContext<'_, R>,
    n: usize,
    subset_size: usize,
    significant: &FactorSubset,
    scratch: &mut CvScratch<R>,
) -> Result<(RankedResult<R>, Option<R>, R)> {
    let mut ix: Vec<usize> = (1..=subset_size).collect();
    let mut best: Option<RankedResult<R>> = None;
    let mut second: Option<R> = None;
    let mut sig_epe: Option<R> = None;
    loop {
        let beta = FactorSubset::new(ix.clone(), n)?;
        let epe = ctx.eval(&beta, None, scratch)?;
        if &beta == significant {
            sig_epe = Some(epe);
        }
        let cand = RankedResult { beta, epe };
        match &mut best {
            None => best = Some(cand),
            Some(b) => {
                if cmp_ranked(&cand, b) == std::cmp::Ordering::Less {
                    second = Some(b.epe);
                    *b = cand;
                } else {
                    second = Some(match second {
                        None => cand.epe,
                        Some(s) if cand.epe < s => cand.epe,
                        Some(s) => s,
                    });
                }
            }
        }
        if !next_subset(&mut ix, n) {
            break;
        }
    }
    let sig_epe = sig_epe.ok_or_else(|| {
        Error::InvalidParameter(format!(
            "significant subset {significant} has size {} != searched size {subset_size}",
            significant.len()
        ))
    })?;
    Ok((best.expect("at least one subset"), second, sig_epe))
}

/// Runs `reps` independent simulations (substream = replicate index) and
/// counts how often the known significant subset is the unique argmin of
/// the estimator over all subsets of its size.
pub fn identification_report<R: Real>(
    spec: &GeneratorSpec,
    k_folds: usize,
    eps: R,
    scope: PsiScope,
    reps: usize,
) -> Result<IdentificationReport<R>> {
    if reps == 0 {
        return Err(Error::InvalidParameter("reps must be >= 1".into()));
    }
    spec.validate()?;
    if eps <= R::zero() || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "regularization eps={eps} must be positive and finite"
        )));
    }
    let clip_at = R::one() / eps;
    let significant = spec.significant_subset();
    let subset_size = significant.len();
    let n = spec.n_factors;

    let outcomes: Vec<Result<RepOutcome<R>>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let data = generate_stream(spec, rep as u64)?;
            let ctx = CvContext::<R>::new_estimated(&data, k_folds, scope, clip_at)?;
            let mut scratch = CvScratch::new();
            let (best, runner_up, significant_epe) =
                best_two_and_significant(&ctx, n, subset_size, &significant, &mut scratch)?;
            let hit = best.beta == significant
                && match runner_up {
                    Some(s) => best.epe < s,
                    None => true,
                };
            Ok(RepOutcome {
                best,
                runner_up_epe: runner_up,
                significant_epe,
                hit,
            })
        })
        .collect();

    let mut replicates = Vec::with_capacity(reps);
    for o in outcomes {
        replicates.push(o?);
    }
    let hits = replicates.iter().filter(|o| o.hit).count();
    Ok(IdentificationReport { replicates, hits })
}

/// The identification frequency alone.
pub fn identification_rate<R: Real>(
    spec: &GeneratorSpec,
    k_folds: usize,
    eps: R,
    scope: PsiScope,
    reps: usize,
) -> Result<f64> {
    Ok(identification_report::<R>(spec, k_folds, eps, scope, reps)?.rate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{validate_dataset, FactorSpace, ResponseSpace, Spaces};

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(50, 3).unwrap(), 19_600);
        assert_eq!(binomial(50, 4).unwrap(), 230_300);
        assert_eq!(binomial(5, 5).unwrap(), 1);
        assert_eq!(binomial(4, 6).unwrap(), 0);
    }

    #[test]
    fn unranking_agrees_with_iteration() {
        let (n, r) = (7, 3);
        let total = binomial(n, r).unwrap();
        let mut ix: Vec<usize> = (1..=r).collect();
        for rank in 0..total {
            assert_eq!(subset_at_rank(n, r, rank).unwrap(), ix, "rank {rank}");
            next_subset(&mut ix, n);
        }
        assert!(subset_at_rank(n, r, total).is_err());
    }

    #[test]
    fn enumeration_is_exhaustive_without_duplicates() {
        let (n, r) = (9, 4);
        let mut seen = std::collections::HashSet::new();
        let mut ix: Vec<usize> = (1..=r).collect();
        loop {
            assert!(seen.insert(ix.clone()));
            assert!(ix.windows(2).all(|w| w[0] < w[1]));
            if !next_subset(&mut ix, n) {
                break;
            }
        }
        assert_eq!(seen.len() as u128, binomial(n, r).unwrap());
    }

    fn planted_dataset() -> Dataset {
        // y = +1 iff x1 = 1, deterministic; other 3 factors noise-ish
        let mut rows = Vec::new();
        for i in 0..48 {
            let x1 = (i % 2) as i64;
            let x2 = ((i / 2) % 2) as i64;
            let x3 = ((i / 4) % 2) as i64;
            let x4 = ((i / 8) % 2) as i64;
            rows.push(vec![x1, x2, x3, x4, if x1 == 1 { 1 } else { -1 }]);
        }
        let spaces = Spaces::new(
            ResponseSpace::new(1).unwrap(),
            FactorSpace::new(4, 1).unwrap(),
        );
        validate_dataset(&rows, spaces).unwrap()
    }

    #[test]
    fn planted_factor_is_found_with_zero_epe() {
        let d = planted_dataset();
        let report = search_all::<f64>(&d, 2, 4, 0.1, PsiScope::Fold, 6).unwrap();
        assert_eq!(report.total_evaluated, 6);
        assert_eq!(report.top.len(), 6);
        assert!(report.top[0].beta.contains(1));
        assert_eq!(report.top[0].epe, 0.0);
        // all three pairs containing factor 1 predict perfectly and are
        // ranked first by the lexicographic tie-break
        assert_eq!(report.top[0].beta.indices(), &[1, 2]);
        assert_eq!(report.top[1].beta.indices(), &[1, 3]);
        assert_eq!(report.top[2].beta.indices(), &[1, 4]);
        // ascending epe
        for w in report.top.windows(2) {
            assert!(w[0].epe <= w[1].epe);
        }
    }

    #[test]
    fn n_equals_r_gives_single_row() {
        let d = planted_dataset();
        let report = search_all::<f64>(&d, 4, 4, 0.1, PsiScope::Fold, 10).unwrap();
        assert_eq!(report.total_evaluated, 1);
        assert_eq!(report.top.len(), 1);
        assert_eq!(report.top[0].beta.indices(), &[1, 2, 3, 4]);
    }

    #[test]
    fn oversized_top_len_is_clamped_to_total() {
        let d = planted_dataset();
        let report = search_all::<f64>(&d, 2, 4, 0.1, PsiScope::Fold, 100).unwrap();
        assert_eq!(report.top.len(), 6);
    }

    #[test]
    fn usage_errors() {
        let d = planted_dataset();
        assert!(search_all::<f64>(&d, 0, 4, 0.1, PsiScope::Fold, 5).is_err());
        assert!(search_all::<f64>(&d, 5, 4, 0.1, PsiScope::Fold, 5).is_err());
        assert!(search_all::<f64>(&d, 2, 4, 0.1, PsiScope::Fold, 0).is_err());
        assert!(search_all::<f64>(&d, 2, 4, -1.0, PsiScope::Fold, 5).is_err());
    }

    #[test]
    fn report_matches_direct_estimates() {
        // the report's epe values are exactly err_hat_k's
        let d = planted_dataset();
        let report = search_all::<f64>(&d, 2, 4, 0.3, PsiScope::Complement, 6).unwrap();
        for row in &report.top {
            let direct =
                crate::cv::err_hat_k::<f64>(&d, &row.beta, 4, 0.3, PsiScope::Complement)
                    .unwrap();
            assert_eq!(row.epe, direct.value);
        }
    }

    #[test]
    fn noiseless_identification_is_certain() {
        let spec = GeneratorSpec {
            example: crate::simgen::ExampleId::Ex1,
            n_factors: 6,
            gamma: 0.0,
            n_samples: 400,
            seed: 9,
        };
        let rate = identification_rate::<f64>(&spec, 5, 0.1, PsiScope::Fold, 4).unwrap();
        assert_eq!(rate, 1.0);
    }
}
