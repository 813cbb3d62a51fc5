//! Shared domain types: response/factor alphabets, datasets, factor
//! subsets and penalty vectors.
//!
//! Sample indices and factor indices are 1-based everywhere in the public
//! API; the 0-based storage behind them is an implementation detail.

use crate::error::{CellDiagnostic, Error, Result};
use crate::num::Real;

/// Response alphabet `{-m, ..., m}`.
///
/// Binary problems use `m = 1` with zero mass at `y = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResponseSpace {
    m: u32,
}

impl ResponseSpace {
    /// Largest supported `m`; responses are stored as `i8`.
    pub const MAX_M: u32 = 127;

    pub fn new(m: u32) -> Result<Self> {
        if m == 0 || m > Self::MAX_M {
            return Err(Error::InvalidParameter(format!(
                "response bound m={m} outside 1..={}",
                Self::MAX_M
            )));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Cardinality `2m + 1`.
    pub fn card(&self) -> usize {
        2 * self.m as usize + 1
    }

    pub fn contains(&self, y: i32) -> bool {
        y.unsigned_abs() <= self.m
    }

    /// Values `-m ..= m` in increasing order.
    pub fn values(&self) -> impl Iterator<Item = i32> + Clone {
        -(self.m as i32)..=self.m as i32
    }

    /// Dense index of `y`: `y + m`.
    pub fn index(&self, y: i32) -> usize {
        debug_assert!(self.contains(y));
        (y + self.m as i32) as usize
    }

    /// Inverse of [`ResponseSpace::index`].
    pub fn value_at(&self, idx: usize) -> i32 {
        idx as i32 - self.m as i32
    }
}

/// Factor alphabet `{0, ..., s}` shared by all `n` factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorSpace {
    n: usize,
    s: u8,
}

impl FactorSpace {
    pub fn new(n: usize, s: u8) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "factor count n must be positive".into(),
            ));
        }
        Ok(Self { n, s })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> u8 {
        self.s
    }

    /// Alphabet size `s + 1`.
    pub fn alphabet(&self) -> usize {
        self.s as usize + 1
    }

    /// Number of cells `(s+1)^r` of an `r`-factor table, overflow-checked.
    pub fn cell_count(&self, r: usize) -> Result<usize> {
        let mut cells: u128 = 1;
        for _ in 0..r {
            cells = cells.checked_mul(self.alphabet() as u128).ok_or(
                Error::CellTableTooLarge {
                    cells: u128::MAX,
                    max: MAX_CELLS,
                },
            )?;
        }
        if cells > MAX_CELLS as u128 {
            return Err(Error::CellTableTooLarge {
                cells,
                max: MAX_CELLS,
            });
        }
        Ok(cells as usize)
    }
}

/// Hard cap on dense per-subset cell tables.
pub const MAX_CELLS: usize = 1 << 22;

/// Both alphabets together; every estimator input carries one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Spaces {
    pub response: ResponseSpace,
    pub factor: FactorSpace,
}

impl Spaces {
    pub fn new(response: ResponseSpace, factor: FactorSpace) -> Self {
        Self { response, factor }
    }
}

/// A strictly increasing collection of 1-based factor indices
/// `beta = (k_1, ..., k_r)` with `1 <= k_1 < ... < k_r <= n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FactorSubset {
    indices: Vec<usize>,
}

impl FactorSubset {
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidSubset("subset is empty".into()));
        }
        if !indices.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidSubset(format!(
                "indices {indices:?} are not strictly increasing"
            )));
        }
        if indices[0] < 1 || *indices.last().unwrap() > n {
            return Err(Error::InvalidSubset(format!(
                "indices {indices:?} outside 1..={n}"
            )));
        }
        Ok(Self { indices })
    }

    /// Subset size `r`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees non-emptiness
    }

    /// 1-based factor indices in increasing order.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// 0-based column offsets for storage access.
    pub fn columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().map(|&i| i - 1)
    }

    pub fn contains(&self, index_1based: usize) -> bool {
        self.indices.binary_search(&index_1based).is_ok()
    }
}

impl std::fmt::Display for FactorSubset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Penalty function `psi: Y -> R+`, user supplied. Nonnegative and not
/// identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyVector<R: Real> {
    values: Vec<R>,
    space: ResponseSpace,
}

impl<R: Real> PenaltyVector<R> {
    /// `values[i]` is the weight of `space.value_at(i)`.
    pub fn new(values: Vec<R>, space: ResponseSpace) -> Result<Self> {
        if values.len() != space.card() {
            return Err(Error::InvalidParameter(format!(
                "penalty vector has {} entries, expected {}",
                values.len(),
                space.card()
            )));
        }
        if values.iter().any(|v| *v < R::zero() || !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "penalty weights must be finite and nonnegative".into(),
            ));
        }
        if values.iter().all(|v| *v == R::zero()) {
            return Err(Error::InvalidParameter(
                "penalty must not be identically zero".into(),
            ));
        }
        Ok(Self { values, space })
    }

    /// Constant penalty `psi == 1`.
    pub fn ones(space: ResponseSpace) -> Self {
        Self {
            values: vec![R::one(); space.card()],
            space,
        }
    }

    pub fn space(&self) -> ResponseSpace {
        self.space
    }

    pub fn weight(&self, y: i32) -> R {
        self.values[self.space.index(y)]
    }

    pub fn values(&self) -> &[R] {
        &self.values
    }

    /// Scaled copy `c * psi`.
    pub fn scaled(&self, c: R) -> Self {
        Self {
            values: self.values.iter().map(|&v| v * c).collect(),
            space: self.space,
        }
    }
}

/// An observed sample: `N` rows of factor codes plus a response each.
///
/// Rows are i.i.d. draws from an unknown law by contract; this is not
/// checkable and is simply assumed by every estimator.
#[derive(Debug, Clone)]
pub struct Dataset {
    /// Column-major codes: `factors[c * n_samples + j]` is factor `c+1`
    /// of sample `j+1`.
    factors: Vec<u8>,
    responses: Vec<i8>,
    n_samples: usize,
    spaces: Spaces,
}

impl Dataset {
    /// Builds a dataset from parallel columns without re-validation.
    /// Intended for generators that construct in-range codes directly.
    pub(crate) fn from_columns_unchecked(
        factors: Vec<u8>,
        responses: Vec<i8>,
        n_samples: usize,
        spaces: Spaces,
    ) -> Self {
        debug_assert_eq!(factors.len(), n_samples * spaces.factor.n());
        debug_assert_eq!(responses.len(), n_samples);
        Self {
            factors,
            responses,
            n_samples,
            spaces,
        }
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn spaces(&self) -> &Spaces {
        &self.spaces
    }

    pub fn response_space(&self) -> ResponseSpace {
        self.spaces.response
    }

    pub fn factor_space(&self) -> FactorSpace {
        self.spaces.factor
    }

    /// Factor code of 1-based sample `j`, 1-based factor `i`.
    pub fn factor(&self, j: usize, i: usize) -> u8 {
        self.factors[(i - 1) * self.n_samples + (j - 1)]
    }

    /// Contiguous storage of one 0-based factor column.
    pub fn column(&self, c: usize) -> &[u8] {
        &self.factors[c * self.n_samples..(c + 1) * self.n_samples]
    }

    /// Response of 1-based sample `j`.
    pub fn response(&self, j: usize) -> i32 {
        self.responses[j - 1] as i32
    }

    /// All responses in sample order (0-based slice).
    pub fn responses(&self) -> &[i8] {
        &self.responses
    }

    /// Full factor vector of 1-based sample `j`.
    pub fn row(&self, j: usize) -> Vec<u8> {
        (1..=self.spaces.factor.n())
            .map(|i| self.factor(j, i))
            .collect()
    }
}

/// Validates a raw rectangular table (`n` factor columns then one
/// response column) against the declared spaces.
///
/// On failure the error lists every out-of-range cell with its 1-based
/// row and column name.
pub fn validate_dataset(rows: &[Vec<i64>], spaces: Spaces) -> Result<Dataset> {
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = spaces.factor.n();
    let s = spaces.factor.s() as i64;
    let m = spaces.response.m() as i64;
    let mut diagnostics = Vec::new();

    for (j, row) in rows.iter().enumerate() {
        if row.len() != n + 1 {
            return Err(Error::Parse(format!(
                "row {} has {} fields, expected {} factors + 1 response",
                j + 1,
                row.len(),
                n
            )));
        }
        for (c, &v) in row[..n].iter().enumerate() {
            if !(0..=s).contains(&v) {
                diagnostics.push(CellDiagnostic {
                    row: j + 1,
                    column: format!("x{}", c + 1),
                    value: v,
                    bound: format!("0..={s}"),
                });
            }
        }
        let y = row[n];
        if !(-m..=m).contains(&y) {
            diagnostics.push(CellDiagnostic {
                row: j + 1,
                column: "y".into(),
                value: y,
                bound: format!("{}..={}", -m, m),
            });
        }
    }
    if !diagnostics.is_empty() {
        return Err(Error::DatasetValidation { diagnostics });
    }

    let n_samples = rows.len();
    let mut factors = vec![0u8; n_samples * n];
    let mut responses = vec![0i8; n_samples];
    for (j, row) in rows.iter().enumerate() {
        for c in 0..n {
            factors[c * n_samples + j] = row[c] as u8;
        }
        responses[j] = row[n] as i8;
    }
    Ok(Dataset::from_columns_unchecked(
        factors, responses, n_samples, spaces,
    ))
}
