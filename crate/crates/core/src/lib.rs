//! Identification of significant discrete factors by exhaustive subset
//! search over a penalty-weighted, K-fold cross-validated prediction
//! error, with exact oracles and Monte Carlo validation of the
//! estimator's limit behavior.
//!
//! The pipeline: simulate or load a dataset of discrete factor vectors
//! with a discrete response, score every r-subset of factors by the
//! cross-validated estimate of the error function
//! `Err(f) = E |Y - f(X)| psi(Y)` with the balanced penalty
//! `psi(y) = 1/P(Y=y)` estimated per fold, and rank subsets by the
//! estimate. Exact enumeration oracles (`oracle`), seeded generators
//! (`simgen`) and distributional diagnostics (`clt`) close the loop.
//!
//! All estimator algebra is generic over the scalar type via
//! [`num::Real`]; `f64` aliases for the main public types live at the
//! crate root. Dataset generation is always f64 so generated bytes are
//! identical regardless of the scalar used for estimation.

pub mod clt;
pub mod cv;
pub mod domain;
pub mod error;
pub mod io;
pub mod normal;
pub mod num;
pub mod oracle;
pub mod partition;
pub mod penalty;
pub mod predictor;
pub mod search;
pub mod simgen;

pub use domain::{
    validate_dataset, Dataset, FactorSpace, FactorSubset, PenaltyVector, ResponseSpace, Spaces,
};
pub use error::{CellDiagnostic, Error, Result};
pub use num::Real;
pub use partition::{make_partition, FoldPartition};

pub use cv::{err_hat_k, err_hat_k_fixed_penalty, err_hat_partial, EpsRule, ErrEstimate, PsiScope};
pub use oracle::{
    err_exact_def, err_exact_telescoped, loss_variance_exact, optimal_predictor, sigma2_exact,
    JointLaw, LawEntry, PredictorFn,
};
pub use penalty::{
    default_eps, empirical_marginal, psi_hat, psi_hat_clipped, PenaltyEstimate, PenaltyFn,
};
pub use predictor::{fit, predict, PredictionTable};
pub use search::{
    binomial, identification_rate, identification_report, search_all, IdentificationReport,
    RankedResult, SearchReport,
};
pub use simgen::{
    exact_law, generate, generate_stream, DatasetMeta, ExampleId, GeneratorSpec, SeededStream,
};

pub use clt::{
    confidence_interval, lemma1_harness, loss_variance_hat, mc_normality, sigma2_hat,
    stabilization_trace, v_realization, CltVariant, ConditionalErrorModel, Lemma1Config, MCReport,
    RowConstruction, VarianceEstimate,
};

/// `f64` instantiations of the scalar-generic public types.
pub type JointLaw64 = oracle::JointLaw<f64>;
pub type PenaltyVector64 = domain::PenaltyVector<f64>;
pub type PenaltyEstimate64 = penalty::PenaltyEstimate<f64>;
pub type ErrEstimate64 = cv::ErrEstimate<f64>;
pub type SearchReport64 = search::SearchReport<f64>;
pub type RankedResult64 = search::RankedResult<f64>;
pub type IdentificationReport64 = search::IdentificationReport<f64>;
pub type MCReport64 = clt::MCReport<f64>;
pub type VarianceEstimate64 = clt::VarianceEstimate<f64>;
