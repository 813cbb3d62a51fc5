//! Exact computations on explicitly enumerated discrete laws: the
//! ground truth for the error function, optimal predictors and the
//! limiting variances. Real data never has a known law; these exist for
//! generators, tests and Monte Carlo centering.

use crate::domain::{FactorSubset, PenaltyVector, Spaces};
use crate::error::{Error, Result};
use crate::num::Real;

/// One atom of a joint law: a factor cell, a response, a probability.
#[derive(Debug, Clone, PartialEq)]
pub struct LawEntry<R: Real> {
    pub cell: Vec<u8>,
    pub y: i32,
    pub p: R,
}

/// An explicit discrete probability table over `(X_beta, Y)`.
///
/// `factors` names the coordinates the cells live on (all of `1..=n` or
/// a subset); entries may include zero-probability atoms.
#[derive(Debug, Clone)]
pub struct JointLaw<R: Real> {
    spaces: Spaces,
    factors: FactorSubset,
    entries: Vec<LawEntry<R>>,
}

impl<R: Real> JointLaw<R> {
    pub fn new(spaces: Spaces, factors: FactorSubset, entries: Vec<LawEntry<R>>) -> Result<Self> {
        let alphabet = spaces.factor.alphabet();
        let mut total = R::zero();
        for e in &entries {
            if e.cell.len() != factors.len() {
                return Err(Error::InvalidLaw(format!(
                    "cell {:?} has {} coordinates, expected {}",
                    e.cell,
                    e.cell.len(),
                    factors.len()
                )));
            }
            if e.cell.iter().any(|&c| c as usize >= alphabet) {
                return Err(Error::InvalidLaw(format!(
                    "cell {:?} outside alphabet 0..={}",
                    e.cell,
                    alphabet - 1
                )));
            }
            if !spaces.response.contains(e.y) {
                return Err(Error::InvalidLaw(format!("response {} out of range", e.y)));
            }
            if e.p < R::zero() || !e.p.is_finite() {
                return Err(Error::InvalidLaw(format!(
                    "probability {} must be finite and nonnegative",
                    e.p
                )));
            }
            total = total + e.p;
        }
        let tol = normalization_tol::<R>(entries.len());
        if (total - R::one()).abs() > tol {
            return Err(Error::InvalidLaw(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self {
            spaces,
            factors,
            entries,
        })
    }

    pub fn spaces(&self) -> &Spaces {
        &self.spaces
    }

    pub fn factors(&self) -> &FactorSubset {
        &self.factors
    }

    pub fn entries(&self) -> &[LawEntry<R>] {
        &self.entries
    }

    /// Response marginals `P(Y = y)` in dense `y + m` order.
    pub fn response_marginals(&self) -> Vec<R> {
        let mut out = vec![R::zero(); self.spaces.response.card()];
        for e in &self.entries {
            out[self.spaces.response.index(e.y)] = out[self.spaces.response.index(e.y)] + e.p;
        }
        out
    }

    /// The joint law of `(X_beta, Y)` for `beta` a subset of this law's
    /// factor coordinates.
    pub fn marginal_onto(&self, beta: &FactorSubset) -> Result<JointLaw<R>> {
        let positions = projection_positions(&self.factors, beta)?;
        let alphabet = self.spaces.factor.alphabet();
        let cells = self.spaces.factor.cell_count(beta.len())?;
        let card = self.spaces.response.card();
        let mut mass = vec![R::zero(); cells * card];
        for e in &self.entries {
            let sub: Vec<u8> = positions.iter().map(|&t| e.cell[t]).collect();
            let idx = cell_code(&sub, alphabet) * card + self.spaces.response.index(e.y);
            mass[idx] = mass[idx] + e.p;
        }
        let mut entries = Vec::with_capacity(cells * card);
        for code in 0..cells {
            let cell = decode_cell(code, beta.len(), alphabet);
            for yi in 0..card {
                entries.push(LawEntry {
                    cell: cell.clone(),
                    y: self.spaces.response.value_at(yi),
                    p: mass[code * card + yi],
                });
            }
        }
        JointLaw::new(self.spaces, beta.clone(), entries)
    }

    /// The balanced penalty `psi(y) = 1/P(Y=y)` of this law, with
    /// `psi(y) = 0` on zero-mass responses.
    pub fn balanced_penalty(&self) -> Result<PenaltyVector<R>> {
        let values = self
            .response_marginals()
            .iter()
            .map(|&p| if p > R::zero() { R::one() / p } else { R::zero() })
            .collect();
        PenaltyVector::new(values, self.spaces.response)
    }
}

fn normalization_tol<R: Real>(entries: usize) -> R {
    let machine = R::epsilon() * R::from_usize(16 * (entries + 1));
    let spec = R::from_f64(1e-12);
    if machine > spec {
        machine
    } else {
        spec
    }
}

/// Mixed-radix cell code, first coordinate most significant.
pub fn cell_code(cell: &[u8], alphabet: usize) -> usize {
    cell.iter()
        .fold(0usize, |acc, &c| acc * alphabet + c as usize)
}

/// Inverse of [`cell_code`].
pub fn decode_cell(mut code: usize, r: usize, alphabet: usize) -> Vec<u8> {
    let mut cell = vec![0u8; r];
    for t in (0..r).rev() {
        cell[t] = (code % alphabet) as u8;
        code /= alphabet;
    }
    cell
}

/// Positions of `inner`'s indices inside `outer`'s index list.
pub(crate) fn projection_positions(
    outer: &FactorSubset,
    inner: &FactorSubset,
) -> Result<Vec<usize>> {
    inner
        .indices()
        .iter()
        .map(|&i| {
            outer
                .indices()
                .iter()
                .position(|&o| o == i)
                .ok_or_else(|| {
                    Error::SpaceMismatch(format!(
                        "factor {i} of {inner} not among the law's factors {outer}"
                    ))
                })
        })
        .collect()
}

/// A total map from factor-subset cells to predicted responses.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictorFn {
    beta: FactorSubset,
    table: Vec<i8>,
    spaces: Spaces,
}

impl PredictorFn {
    pub fn new(spaces: Spaces, beta: FactorSubset, table: Vec<i8>) -> Result<Self> {
        let cells = spaces.factor.cell_count(beta.len())?;
        if table.len() != cells {
            return Err(Error::InvalidParameter(format!(
                "predictor table has {} cells, expected {cells}",
                table.len()
            )));
        }
        if table.iter().any(|&z| !spaces.response.contains(z as i32)) {
            return Err(Error::InvalidParameter(
                "predictor table contains out-of-range responses".into(),
            ));
        }
        Ok(Self {
            beta,
            table,
            spaces,
        })
    }

    /// Builds the table by evaluating `f` on every cell of the subset's
    /// product alphabet.
    pub fn from_fn(
        spaces: Spaces,
        beta: FactorSubset,
        f: impl Fn(&[u8]) -> i32,
    ) -> Result<Self> {
        let alphabet = spaces.factor.alphabet();
        let cells = spaces.factor.cell_count(beta.len())?;
        let table = (0..cells)
            .map(|code| f(&decode_cell(code, beta.len(), alphabet)) as i8)
            .collect();
        Self::new(spaces, beta, table)
    }

    /// The constant predictor `f == z`.
    pub fn constant(spaces: Spaces, beta: FactorSubset, z: i32) -> Result<Self> {
        Self::from_fn(spaces, beta, |_| z)
    }

    pub fn beta(&self) -> &FactorSubset {
        &self.beta
    }

    pub fn table(&self) -> &[i8] {
        &self.table
    }

    /// Prediction at a cell already expressed over this predictor's own
    /// subset coordinates.
    pub fn at_own_cell(&self, cell: &[u8]) -> i32 {
        self.table[cell_code(cell, self.spaces.factor.alphabet())] as i32
    }

    /// Prediction at a cell expressed over `law_factors` coordinates;
    /// `beta` must be a subset of them.
    fn at_projected(&self, positions: &[usize], cell: &[u8]) -> i32 {
        let alphabet = self.spaces.factor.alphabet();
        let code = positions
            .iter()
            .fold(0usize, |acc, &t| acc * alphabet + cell[t] as usize);
        self.table[code] as i32
    }
}

fn check_spaces<R: Real>(law: &JointLaw<R>, f: &PredictorFn) -> Result<Vec<usize>> {
    if law.spaces != f.spaces {
        return Err(Error::SpaceMismatch(
            "law and predictor disagree on alphabets".into(),
        ));
    }
    projection_positions(&law.factors, &f.beta)
}

/// The error function by its definition:
/// `Err(f) = E |Y - f(X)| psi(Y) = sum |y-z| psi(y) P(Y=y, f(X)=z)`.
pub fn err_exact_def<R: Real>(
    law: &JointLaw<R>,
    f: &PredictorFn,
    psi: &PenaltyVector<R>,
) -> Result<R> {
    if psi.space() != law.spaces.response {
        return Err(Error::SpaceMismatch("penalty response space".into()));
    }
    let positions = check_spaces(law, f)?;
    let mut acc = R::zero();
    for e in law.entries() {
        let z = f.at_projected(&positions, &e.cell);
        let dist = R::from_usize((e.y - z).unsigned_abs() as usize);
        acc = acc + e.p * psi.weight(e.y) * dist;
    }
    Ok(acc)
}

/// The error function by its telescoped form: the double sum over
/// `i = 0..2m-1` and `i-m < |y| <= m` of `psi(y) P(Y=y, |f(X)-y| > i)`,
/// evaluated literally.
pub fn err_exact_telescoped<R: Real>(
    law: &JointLaw<R>,
    f: &PredictorFn,
    psi: &PenaltyVector<R>,
) -> Result<R> {
    if psi.space() != law.spaces.response {
        return Err(Error::SpaceMismatch("penalty response space".into()));
    }
    let positions = check_spaces(law, f)?;
    let m = law.spaces.response.m() as i32;
    let mut acc = R::zero();
    for i in 0..2 * m {
        for y in law.spaces.response.values() {
            if y.abs() <= i - m {
                continue;
            }
            let mut exceed = R::zero();
            for e in law.entries() {
                if e.y == y && (f.at_projected(&positions, &e.cell) - y).abs() > i {
                    exceed = exceed + e.p;
                }
            }
            acc = acc + psi.weight(y) * exceed;
        }
    }
    Ok(acc)
}

/// The cost-minimizing predictor on `beta`: per cell, the `z` minimizing
/// `sum_y |y-z| psi(y) P(Y=y, X_beta = cell)`, ties to the smallest `z`.
pub fn optimal_predictor<R: Real>(
    law: &JointLaw<R>,
    beta: &FactorSubset,
    psi: &PenaltyVector<R>,
) -> Result<PredictorFn> {
    if psi.space() != law.spaces.response {
        return Err(Error::SpaceMismatch("penalty response space".into()));
    }
    let marginal = law.marginal_onto(beta)?;
    let space = law.spaces.response;
    let card = space.card();
    let alphabet = law.spaces.factor.alphabet();
    let cells = law.spaces.factor.cell_count(beta.len())?;

    // joint mass per (cell, y)
    let mut mass = vec![R::zero(); cells * card];
    for e in marginal.entries() {
        let idx = cell_code(&e.cell, alphabet) * card + space.index(e.y);
        mass[idx] = mass[idx] + e.p;
    }

    let mut table = vec![0i8; cells];
    for code in 0..cells {
        let mut best_z = -(space.m() as i32);
        let mut best_cost = R::infinity();
        for z in space.values() {
            let mut cost = R::zero();
            for y in space.values() {
                let dist = R::from_usize((y - z).unsigned_abs() as usize);
                cost = cost + dist * psi.weight(y) * mass[code * card + space.index(y)];
            }
            if cost < best_cost {
                best_cost = cost;
                best_z = z;
            }
        }
        table[code] = best_z as i8;
    }
    PredictorFn::new(law.spaces, beta.clone(), table)
}

/// Variance of the centered conditional-indicator statistic
/// `V = sum_i sum_y I{Y=y}/P(Y=y) (I{|f(X)-y|>i} - P(|f(X)-y|>i | Y=y))`,
/// the limiting variance of the full cross-validated estimator.
///
/// Responses with zero marginal mass cannot appear in a positive-mass
/// atom of a consistent law, so they simply drop out of the sum.
pub fn sigma2_exact<R: Real>(law: &JointLaw<R>, f: &PredictorFn) -> Result<R> {
    let positions = check_spaces(law, f)?;
    let space = law.spaces.response;
    let m = space.m() as i32;
    let marginals = law.response_marginals();

    // P(|f(X)-y| > i | Y=y) for each y with positive mass
    let mut exceed = vec![R::zero(); space.card() * 2 * m as usize];
    for e in law.entries() {
        let yi = space.index(e.y);
        let z = f.at_projected(&positions, &e.cell);
        for i in 0..2 * m {
            if (z - e.y).abs() > i {
                exceed[yi * 2 * m as usize + i as usize] =
                    exceed[yi * 2 * m as usize + i as usize] + e.p;
            }
        }
    }
    for yi in 0..space.card() {
        if marginals[yi] > R::zero() {
            for i in 0..2 * m as usize {
                exceed[yi * 2 * m as usize + i] = exceed[yi * 2 * m as usize + i] / marginals[yi];
            }
        }
    }

    let mut mean = R::zero();
    let mut second = R::zero();
    for e in law.entries() {
        if e.p == R::zero() {
            continue;
        }
        let yi = space.index(e.y);
        let z = f.at_projected(&positions, &e.cell);
        let inv = R::one() / marginals[yi];
        let mut v = R::zero();
        for i in 0..2 * m {
            if e.y.abs() <= i - m {
                continue;
            }
            let ind = if (z - e.y).abs() > i { R::one() } else { R::zero() };
            v = v + inv * (ind - exceed[yi * 2 * m as usize + i as usize]);
        }
        mean = mean + e.p * v;
        second = second + e.p * v * v;
    }
    let var = second - mean * mean;
    Ok(if var > R::zero() { var } else { R::zero() })
}

/// Variance of the pointwise loss `psi(Y) |f(X) - Y|`, the limiting
/// variance (before the `1/K` column scaling) of the truncated-column
/// statistic.
pub fn loss_variance_exact<R: Real>(
    law: &JointLaw<R>,
    f: &PredictorFn,
    psi: &PenaltyVector<R>,
) -> Result<R> {
    let positions = check_spaces(law, f)?;
    let mut mean = R::zero();
    let mut second = R::zero();
    for e in law.entries() {
        let z = f.at_projected(&positions, &e.cell);
        let loss = psi.weight(e.y) * R::from_usize((e.y - z).unsigned_abs() as usize);
        mean = mean + e.p * loss;
        second = second + e.p * loss * loss;
    }
    let var = second - mean * mean;
    Ok(if var > R::zero() { var } else { R::zero() })
}

/// Brute-force references used by the test and acceptance suites. These
/// deliberately re-derive results by full enumeration instead of calling
/// the functions they are meant to check.
pub mod brute {
    use super::*;

    /// Minimum of [`err_exact_def`] over every one of the
    /// `(2m+1)^(cells)` predictor tables on `beta`. Exponential; only
    /// for tiny spaces.
    pub fn min_err_over_all_tables<R: Real>(
        law: &JointLaw<R>,
        beta: &FactorSubset,
        psi: &PenaltyVector<R>,
    ) -> Result<(R, Vec<i8>)> {
        let cells = law.spaces().factor.cell_count(beta.len())?;
        let card = law.spaces().response.card();
        let total = (card as u128)
            .checked_pow(cells as u32)
            .ok_or(Error::CellTableTooLarge {
                cells: u128::MAX,
                max: crate::domain::MAX_CELLS,
            })?;
        let space = law.spaces().response;
        let mut best: Option<(R, Vec<i8>)> = None;
        for t in 0..total {
            let mut code = t;
            let mut table = vec![0i8; cells];
            for slot in table.iter_mut() {
                *slot = space.value_at((code % card as u128) as usize) as i8;
                code /= card as u128;
            }
            let f = PredictorFn::new(*law.spaces(), beta.clone(), table.clone())?;
            let err = err_exact_def(law, &f, psi)?;
            match &best {
                Some((b, _)) if err >= *b => {}
                _ => best = Some((err, table)),
            }
        }
        Ok(best.expect("at least one table"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{FactorSpace, ResponseSpace};

    fn spaces(n: usize, s: u8, m: u32) -> Spaces {
        Spaces::new(ResponseSpace::new(m).unwrap(), FactorSpace::new(n, s).unwrap())
    }

    fn subset(ix: &[usize], n: usize) -> FactorSubset {
        FactorSubset::new(ix.to_vec(), n).unwrap()
    }

    /// Y uniform on {-1, 1}, single factor cell.
    fn binary_uniform_law() -> JointLaw<f64> {
        let sp = spaces(1, 0, 1);
        JointLaw::new(
            sp,
            subset(&[1], 1),
            vec![
                LawEntry { cell: vec![0], y: -1, p: 0.5 },
                LawEntry { cell: vec![0], y: 1, p: 0.5 },
            ],
        )
        .unwrap()
    }

    /// Y uniform on {-1, 0, 1}, single factor cell.
    fn ternary_uniform_law() -> JointLaw<f64> {
        let sp = spaces(1, 0, 1);
        let third = 1.0 / 3.0;
        JointLaw::new(
            sp,
            subset(&[1], 1),
            vec![
                LawEntry { cell: vec![0], y: -1, p: third },
                LawEntry { cell: vec![0], y: 0, p: third },
                LawEntry { cell: vec![0], y: 1, p: third },
            ],
        )
        .unwrap()
    }

    #[test]
    fn err_def_worked_examples() {
        let ones = PenaltyVector::ones(ResponseSpace::new(1).unwrap());

        let law = binary_uniform_law();
        let f1 = PredictorFn::constant(*law.spaces(), subset(&[1], 1), 1).unwrap();
        assert!((err_exact_def(&law, &f1, &ones).unwrap() - 1.0).abs() < 1e-15);

        let law3 = ternary_uniform_law();
        let f0 = PredictorFn::constant(*law3.spaces(), subset(&[1], 1), 0).unwrap();
        assert!((err_exact_def(&law3, &f0, &ones).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn err_zero_for_perfect_predictor() {
        // Y deterministic given the cell
        let sp = spaces(1, 1, 1);
        let law = JointLaw::new(
            sp,
            subset(&[1], 1),
            vec![
                LawEntry { cell: vec![0], y: -1, p: 0.4 },
                LawEntry { cell: vec![1], y: 1, p: 0.6 },
            ],
        )
        .unwrap();
        let f = PredictorFn::new(sp, subset(&[1], 1), vec![-1, 1]).unwrap();
        let ones = PenaltyVector::ones(sp.response);
        assert_eq!(err_exact_def(&law, &f, &ones).unwrap(), 0.0);
        assert_eq!(err_exact_telescoped(&law, &f, &ones).unwrap(), 0.0);
        assert_eq!(sigma2_exact(&law, &f).unwrap(), 0.0);
        assert_eq!(loss_variance_exact(&law, &f, &ones).unwrap(), 0.0);
    }

    #[test]
    fn telescoped_matches_hand_walk() {
        // m=1, Y uniform on {-1,0,1}, psi == 1, f == 1:
        // i=0 catches y in {-1,0}: 2/3; i=1 catches y=-1 again: 1/3.
        let law3 = ternary_uniform_law();
        let ones = PenaltyVector::ones(ResponseSpace::new(1).unwrap());
        let f1 = PredictorFn::constant(*law3.spaces(), subset(&[1], 1), 1).unwrap();
        let t = err_exact_telescoped(&law3, &f1, &ones).unwrap();
        assert!((t - 1.0).abs() < 1e-15);
        let d = err_exact_def(&law3, &f1, &ones).unwrap();
        assert!((t - d).abs() < 1e-12);
    }

    #[test]
    fn optimal_predictor_worked_cell() {
        // cell 0: P(Y=1)=0.3, P(Y=-1)=0.1 -> predict 1 (costs 0.2 / 0.4 / 0.6)
        let sp = spaces(1, 1, 1);
        let law = JointLaw::new(
            sp,
            subset(&[1], 1),
            vec![
                LawEntry { cell: vec![0], y: 1, p: 0.3 },
                LawEntry { cell: vec![0], y: -1, p: 0.1 },
                LawEntry { cell: vec![1], y: -1, p: 0.6 },
            ],
        )
        .unwrap();
        let ones = PenaltyVector::ones(sp.response);
        let f = optimal_predictor(&law, &subset(&[1], 1), &ones).unwrap();
        assert_eq!(f.table(), &[1, -1]);
    }

    #[test]
    fn optimal_predictor_constant_law() {
        let sp = spaces(2, 1, 1);
        // P(Y=1 | cell) = 1 for every cell
        let entries = (0..4)
            .map(|code| LawEntry {
                cell: decode_cell(code, 2, 2),
                y: 1,
                p: 0.25,
            })
            .collect();
        let law = JointLaw::new(sp, subset(&[1, 2], 2), entries).unwrap();
        let ones = PenaltyVector::ones(sp.response);
        let f = optimal_predictor(&law, &subset(&[1, 2], 2), &ones).unwrap();
        assert!(f.table().iter().all(|&z| z == 1));
    }

    #[test]
    fn optimal_predictor_attains_brute_force_min() {
        // one small instance here; the acceptance suite randomizes 100
        let sp = spaces(2, 1, 1);
        let probs: [f64; 12] = [0.05, 0.1, 0.0, 0.15, 0.2, 0.05, 0.1, 0.0, 0.05, 0.1, 0.15, 0.05];
        let mut entries = Vec::new();
        let mut t = 0;
        for code in 0..4 {
            for y in [-1, 0, 1] {
                entries.push(LawEntry {
                    cell: decode_cell(code, 2, 2),
                    y,
                    p: probs[t],
                });
                t += 1;
            }
        }
        let law = JointLaw::new(sp, subset(&[1, 2], 2), entries).unwrap();
        let psi = PenaltyVector::new(vec![1.0, 0.5, 2.0], sp.response).unwrap();
        let beta = subset(&[1, 2], 2);
        let f = optimal_predictor(&law, &beta, &psi).unwrap();
        let ours = err_exact_def(&law, &f, &psi).unwrap();
        let (best, _) = brute::min_err_over_all_tables(&law, &beta, &psi).unwrap();
        assert!((ours - best).abs() < 1e-14, "ours={ours} brute={best}");
    }

    #[test]
    fn sigma2_zero_when_error_deterministic_given_y() {
        // m=1, P(Y=0)=0, f == 1: given Y the event |f-y|>i is
        // deterministic, so every centered term vanishes.
        let law = binary_uniform_law();
        let f = PredictorFn::constant(*law.spaces(), subset(&[1], 1), 1).unwrap();
        assert_eq!(sigma2_exact(&law, &f).unwrap(), 0.0);
    }

    #[test]
    fn penalty_scaling_scales_error() {
        let law3 = ternary_uniform_law();
        let f = PredictorFn::constant(*law3.spaces(), subset(&[1], 1), 1).unwrap();
        let ones = PenaltyVector::ones(ResponseSpace::new(1).unwrap());
        let tripled = ones.scaled(3.0);
        let a = err_exact_def(&law3, &f, &ones).unwrap();
        let b = err_exact_def(&law3, &f, &tripled).unwrap();
        assert!((b - 3.0 * a).abs() < 1e-12);
    }

    #[test]
    fn marginal_onto_projects_mass() {
        let sp = spaces(2, 1, 1);
        let law = JointLaw::new(
            sp,
            subset(&[1, 2], 2),
            vec![
                LawEntry { cell: vec![0, 0], y: 1, p: 0.25 },
                LawEntry { cell: vec![0, 1], y: 1, p: 0.25 },
                LawEntry { cell: vec![1, 0], y: -1, p: 0.25 },
                LawEntry { cell: vec![1, 1], y: 1, p: 0.25 },
            ],
        )
        .unwrap();
        let onto_first = law.marginal_onto(&subset(&[1], 2)).unwrap();
        let m: f64 = onto_first
            .entries()
            .iter()
            .filter(|e| e.cell == vec![0] && e.y == 1)
            .map(|e| e.p)
            .sum();
        assert!((m - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_unnormalized_law() {
        let sp = spaces(1, 0, 1);
        assert!(JointLaw::new(
            sp,
            subset(&[1], 1),
            vec![LawEntry { cell: vec![0], y: 1, p: 0.9 }],
        )
        .is_err());
    }

    #[test]
    fn balanced_penalty_inverts_marginals() {
        let law = binary_uniform_law();
        let psi = law.balanced_penalty().unwrap();
        assert_eq!(psi.weight(1), 2.0);
        assert_eq!(psi.weight(-1), 2.0);
        assert_eq!(psi.weight(0), 0.0);
    }
}
