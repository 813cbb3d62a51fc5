//! Seeded generators for the three simulation designs and their exact
//! joint laws.
//!
//! Randomness is pinned so datasets are byte-identical across runs,
//! platforms and worker counts:
//!
//! - generator: ChaCha12 (`rand_chacha` 0.3), seeded with
//!   `seed_from_u64(seed)` and `set_stream(stream)`; the stream id is
//!   the replicate index (single-dataset runs use stream 0);
//! - factor codes: Lemire multiply-shift, `(next_u32() * 3) >> 32`;
//! - uniforms on [0, 1): `(next_u64() >> 11) * 2^-53`;
//! - standard normals: Box-Muller, two uniforms per draw, cosine branch;
//! - per row, draws happen in column order `x1..xn`, then the row's
//!   auxiliary uniform (noise flip for the first two designs, the latent
//!   `Z` for the third).
//!
//! Factors take the conceptual values {-1, 0, 1} stored as codes
//! {0, 1, 2}; the mapping is recorded in the dataset metadata sidecar.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::domain::{Dataset, FactorSpace, FactorSubset, ResponseSpace, Spaces};
use crate::error::{Error, Result};
use crate::oracle::{decode_cell, JointLaw, LawEntry};

/// Which of the three simulation designs to draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExampleId {
    Ex1,
    Ex2,
    Ex3,
}

impl ExampleId {
    /// 1-based indices of the factors that determine the response.
    pub fn significant_indices(&self) -> &'static [usize] {
        match self {
            ExampleId::Ex1 => &[2, 3, 5],
            ExampleId::Ex2 => &[2, 3, 5, 8],
            ExampleId::Ex3 => &[1, 2, 3, 4],
        }
    }

    /// Smallest factor count the design needs.
    pub fn min_factors(&self) -> usize {
        *self.significant_indices().last().unwrap()
    }

    /// Whether the response carries the Bernoulli noise flip.
    pub fn has_noise_flip(&self) -> bool {
        matches!(self, ExampleId::Ex1 | ExampleId::Ex2)
    }
}

impl std::str::FromStr for ExampleId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ex1" | "1" => Ok(ExampleId::Ex1),
            "ex2" | "2" => Ok(ExampleId::Ex2),
            "ex3" | "3" => Ok(ExampleId::Ex3),
            other => Err(Error::InvalidSpec(format!("unknown example id {other:?}"))),
        }
    }
}

impl std::fmt::Display for ExampleId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExampleId::Ex1 => write!(f, "ex1"),
            ExampleId::Ex2 => write!(f, "ex2"),
            ExampleId::Ex3 => write!(f, "ex3"),
        }
    }
}

/// Full description of one simulated dataset draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub example: ExampleId,
    /// Total number of factors, significant and noise alike.
    pub n_factors: usize,
    /// Noise level for the first two designs; ignored by the third.
    pub gamma: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_factors < self.example.min_factors() {
            return Err(Error::InvalidSpec(format!(
                "{} needs at least {} factors, got {}",
                self.example,
                self.example.min_factors(),
                self.n_factors
            )));
        }
        if !(0.0..=1.0).contains(&self.gamma) || !self.gamma.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "noise level gamma={} outside [0, 1]",
                self.gamma
            )));
        }
        if self.n_samples == 0 {
            return Err(Error::InvalidSpec("sample count must be positive".into()));
        }
        Ok(())
    }

    pub fn spaces(&self) -> Spaces {
        Spaces::new(
            ResponseSpace::new(1).expect("m = 1"),
            FactorSpace::new(self.n_factors, 2).expect("s = 2"),
        )
    }

    /// The significant subset as a [`FactorSubset`] over `n_factors`.
    pub fn significant_subset(&self) -> FactorSubset {
        FactorSubset::new(self.example.significant_indices().to_vec(), self.n_factors)
            .expect("validated spec")
    }
}

/// Sidecar metadata written next to generated dataset files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub schema: String,
    pub example: ExampleId,
    pub n_factors: usize,
    pub s: u8,
    pub m: u32,
    pub gamma: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub stream: u64,
    /// code -> conceptual factor value
    pub coding: Vec<(u8, i8)>,
    /// note about latent randomness beyond the factors, if any
    pub latent: Option<String>,
}

impl DatasetMeta {
    pub const SCHEMA: &'static str = "mdr-dataset-meta/1";

    pub fn for_spec(spec: &GeneratorSpec, stream: u64) -> Self {
        Self {
            schema: Self::SCHEMA.into(),
            example: spec.example,
            n_factors: spec.n_factors,
            s: 2,
            m: 1,
            gamma: spec.gamma,
            n_samples: spec.n_samples,
            seed: spec.seed,
            stream,
            coding: vec![(0, -1), (1, 0), (2, 1)],
            latent: match spec.example {
                ExampleId::Ex3 => Some("one uniform [0,1) draw per row".into()),
                _ => None,
            },
        }
    }
}

/// Deterministic substream of the master seed. Stream ids index
/// replicates (or grid points); stream 0 is the default dataset.
pub struct SeededStream {
    rng: ChaCha12Rng,
}

impl SeededStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    /// Uniform code in `0..alphabet` by multiply-shift on one `u32`.
    pub fn uniform_code(&mut self, alphabet: u32) -> u8 {
        ((self.rng.next_u32() as u64 * alphabet as u64) >> 32) as u8
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform_f64(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Standard normal via Box-Muller; consumes exactly two uniforms.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform_f64();
        let u2 = self.uniform_f64();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

/// First design's noiseless response on conceptual values.
fn ex1_base(x2: i32, x3: i32, x5: i32) -> i32 {
    if (x2 == 1 && x3 >= 0) || (x2 == -1 && x3 + x5 >= 1) {
        1
    } else {
        -1
    }
}

/// Second design's noiseless response.
fn ex2_base(x2: i32, x3: i32, x5: i32, x8: i32) -> i32 {
    if x2 == 1 || x3 + x5 + x8 >= 2 {
        1
    } else {
        -1
    }
}

/// Third design's response: `1` iff
/// `3^(x1+x2+x4) * sin(x3 * z^ln(x3 - 2*x4 + 7)) > 1`.
/// The log argument lies in [4, 10], so the exponent is always defined.
fn ex3_response(x1: i32, x2: i32, x3: i32, x4: i32, z: f64) -> i32 {
    let s = x1 + x2 + x4;
    let e = ((x3 - 2 * x4 + 7) as f64).ln();
    let value = 3f64.powi(s) * (x3 as f64 * z.powf(e)).sin();
    if value > 1.0 {
        1
    } else {
        -1
    }
}

fn code_to_value(code: u8) -> i32 {
    code as i32 - 1
}

/// Draws the dataset of `spec` on substream `stream`.
pub fn generate_stream(spec: &GeneratorSpec, stream: u64) -> Result<Dataset> {
    spec.validate()?;
    let n = spec.n_samples;
    let nf = spec.n_factors;
    let mut rng = SeededStream::new(spec.seed, stream);

    let mut factors = vec![0u8; n * nf];
    let mut responses = vec![0i8; n];
    let mut row = vec![0i32; nf];
    for j in 0..n {
        for (c, slot) in row.iter_mut().enumerate() {
            let code = rng.uniform_code(3);
            factors[c * n + j] = code;
            *slot = code_to_value(code);
        }
        let aux = rng.uniform_f64();
        let y = match spec.example {
            ExampleId::Ex1 => {
                let base = ex1_base(row[1], row[2], row[4]);
                if aux < spec.gamma {
                    -base
                } else {
                    base
                }
            }
            ExampleId::Ex2 => {
                let base = ex2_base(row[1], row[2], row[4], row[7]);
                if aux < spec.gamma {
                    -base
                } else {
                    base
                }
            }
            ExampleId::Ex3 => ex3_response(row[0], row[1], row[2], row[3], aux),
        };
        responses[j] = y as i8;
    }
    Ok(Dataset::from_columns_unchecked(
        factors,
        responses,
        n,
        spec.spaces(),
    ))
}

/// Draws the dataset of `spec` on the default stream 0.
pub fn generate(spec: &GeneratorSpec) -> Result<Dataset> {
    generate_stream(spec, 0)
}

/// Bisection for the boundary of the monotone event `{z : g(z) > 0}` on
/// `[0, 1]`; returns the crossing point to ~1e-15 width. Assumes
/// `g(0) <= 0 < g(1)`.
fn event_boundary(g: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Probability of a positive response in the third design's cell,
/// integrating the indicator over the latent uniform `Z`.
pub fn ex3_cell_prob_y1(x1: i32, x2: i32, x3: i32, x4: i32) -> f64 {
    let s = x1 + x2 + x4;
    if x3 != 1 || s < 1 {
        // sin term is <= 0 for x3 <= 0; for x3 = 1, s <= 0 caps the
        // product at sin(1) < 1
        return 0.0;
    }
    let e = ((x3 - 2 * x4 + 7) as f64).ln();
    let threshold = event_boundary(|z| 3f64.powi(s) * (z.powf(e)).sin() - 1.0);
    1.0 - threshold
}

/// The exact joint law of `(X_alpha, Y)` over the significant factors,
/// ignoring the spec's sample count.
pub fn exact_law(spec: &GeneratorSpec) -> Result<JointLaw<f64>> {
    spec.validate()?;
    let sig = spec.significant_subset();
    let r = sig.len();
    let cells = 3usize.pow(r as u32);
    let cell_mass = 1.0 / cells as f64;
    let mut entries = Vec::with_capacity(cells * 3);
    for code in 0..cells {
        let cell = decode_cell(code, r, 3);
        let vals: Vec<i32> = cell.iter().map(|&c| code_to_value(c)).collect();
        let p1 = match spec.example {
            ExampleId::Ex1 => {
                let base = ex1_base(vals[0], vals[1], vals[2]);
                if base == 1 {
                    1.0 - spec.gamma
                } else {
                    spec.gamma
                }
            }
            ExampleId::Ex2 => {
                let base = ex2_base(vals[0], vals[1], vals[2], vals[3]);
                if base == 1 {
                    1.0 - spec.gamma
                } else {
                    spec.gamma
                }
            }
            ExampleId::Ex3 => ex3_cell_prob_y1(vals[0], vals[1], vals[2], vals[3]),
        };
        entries.push(LawEntry {
            cell: cell.clone(),
            y: -1,
            p: cell_mass * (1.0 - p1),
        });
        entries.push(LawEntry {
            cell: cell.clone(),
            y: 0,
            p: 0.0,
        });
        entries.push(LawEntry {
            cell,
            y: 1,
            p: cell_mass * p1,
        });
    }
    JointLaw::new(spec.spaces(), sig, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(example: ExampleId, n_factors: usize, gamma: f64, n: usize, seed: u64) -> GeneratorSpec {
        GeneratorSpec {
            example,
            n_factors,
            gamma,
            n_samples: n,
            seed,
        }
    }

    #[test]
    fn validation_boundaries() {
        assert!(spec(ExampleId::Ex1, 4, 0.1, 10, 1).validate().is_err()); // needs 5
        assert!(spec(ExampleId::Ex2, 7, 0.1, 10, 1).validate().is_err()); // needs 8
        assert!(spec(ExampleId::Ex1, 5, 1.5, 10, 1).validate().is_err());
        assert!(spec(ExampleId::Ex1, 5, -0.1, 10, 1).validate().is_err());
        assert!(spec(ExampleId::Ex1, 5, 0.1, 0, 1).validate().is_err());
        assert!(spec(ExampleId::Ex3, 4, 0.0, 10, 1).validate().is_ok());
    }

    #[test]
    fn case_table_of_the_first_design() {
        assert_eq!(ex1_base(1, 0, -1), 1); // x2=1, x3>=0
        assert_eq!(ex1_base(1, 1, -1), 1);
        assert_eq!(ex1_base(1, -1, 1), -1); // x2=1 but x3<0
        assert_eq!(ex1_base(-1, 1, 0), 1); // x2=-1, x3+x5=1
        assert_eq!(ex1_base(-1, 0, 0), -1);
        assert_eq!(ex1_base(0, 1, 1), -1); // x2=0 is always -1
    }

    #[test]
    fn noiseless_rows_follow_the_case_table() {
        let sp = spec(ExampleId::Ex1, 6, 0.0, 500, 7);
        let d = generate(&sp).unwrap();
        for j in 1..=d.n_samples() {
            let x2 = d.factor(j, 2) as i32 - 1;
            let x3 = d.factor(j, 3) as i32 - 1;
            let x5 = d.factor(j, 5) as i32 - 1;
            assert_eq!(d.response(j), ex1_base(x2, x3, x5));
        }
    }

    #[test]
    fn determinism_and_stream_separation() {
        let sp = spec(ExampleId::Ex2, 10, 0.1, 200, 42);
        let a = generate_stream(&sp, 3).unwrap();
        let b = generate_stream(&sp, 3).unwrap();
        assert_eq!(a.responses(), b.responses());
        assert_eq!(a.row(17), b.row(17));

        let c = generate_stream(&sp, 4).unwrap();
        assert_ne!(a.responses(), c.responses());
    }

    #[test]
    fn flip_rate_within_binomial_band() {
        let sp = spec(ExampleId::Ex1, 5, 0.1, 100_000, 11);
        let d = generate(&sp).unwrap();
        let mut flips = 0usize;
        for j in 1..=d.n_samples() {
            let x2 = d.factor(j, 2) as i32 - 1;
            let x3 = d.factor(j, 3) as i32 - 1;
            let x5 = d.factor(j, 5) as i32 - 1;
            if d.response(j) != ex1_base(x2, x3, x5) {
                flips += 1;
            }
        }
        let rate = flips as f64 / 100_000.0;
        let sigma = (0.1f64 * 0.9 / 100_000.0).sqrt();
        assert!((rate - 0.1).abs() < 3.0 * sigma, "rate = {rate}");
    }

    #[test]
    fn exact_law_of_first_design() {
        // gamma = 0: P(Y=1) = 1/3 exactly
        let law = exact_law(&spec(ExampleId::Ex1, 5, 0.0, 1, 1)).unwrap();
        let marg = law.response_marginals();
        assert!((marg[2] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(marg[1], 0.0);

        // any gamma: P(Y=1) = (1-g)/3 + 2g/3
        for g in [0.05, 0.1, 0.25] {
            let law = exact_law(&spec(ExampleId::Ex1, 5, g, 1, 1)).unwrap();
            let p1 = law.response_marginals()[2];
            assert!((p1 - ((1.0 - g) / 3.0 + 2.0 * g / 3.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn ex3_cell_probability_matches_closed_form() {
        // for x3 = 1 and s >= 1 the event is {z > arcsin(3^-s)^(1/e)}
        for x1 in -1..=1 {
            for x2 in -1..=1 {
                for x4 in -1..=1 {
                    let s = x1 + x2 + x4;
                    let p = ex3_cell_prob_y1(x1, x2, 1, x4);
                    if s < 1 {
                        assert_eq!(p, 0.0);
                    } else {
                        let e = ((1 - 2 * x4 + 7) as f64).ln();
                        let closed = 1.0 - (3f64.powi(-s).asin()).powf(1.0 / e);
                        assert!(
                            (p - closed).abs() < 1e-10,
                            "s={s} x4={x4}: {p} vs {closed}"
                        );
                    }
                    // x3 <= 0 cells are always negative
                    assert_eq!(ex3_cell_prob_y1(x1, x2, 0, x4), 0.0);
                    assert_eq!(ex3_cell_prob_y1(x1, x2, -1, x4), 0.0);
                }
            }
        }
    }

    #[test]
    fn law_marginals_match_empirical_frequencies() {
        for (example, n_factors) in [
            (ExampleId::Ex1, 5),
            (ExampleId::Ex2, 8),
            (ExampleId::Ex3, 4),
        ] {
            let sp = spec(example, n_factors, 0.1, 100_000, 5);
            let law = exact_law(&sp).unwrap();
            let p1 = law.response_marginals()[2];
            let d = generate(&sp).unwrap();
            let hits = (1..=d.n_samples()).filter(|&j| d.response(j) == 1).count();
            let rate = hits as f64 / d.n_samples() as f64;
            let sigma = (p1 * (1.0 - p1) / d.n_samples() as f64).sqrt();
            assert!(
                (rate - p1).abs() < 4.0 * sigma,
                "{example}: empirical {rate} vs exact {p1}"
            );
        }
    }

    #[test]
    fn uniform_code_covers_alphabet_evenly() {
        let mut rng = SeededStream::new(1, 0);
        let mut counts = [0usize; 3];
        for _ in 0..30_000 {
            counts[rng.uniform_code(3) as usize] += 1;
        }
        for c in counts {
            assert!((c as f64 - 10_000.0).abs() < 4.0 * (30_000f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt());
        }
    }
}
