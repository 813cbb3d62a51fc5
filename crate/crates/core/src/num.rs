//! Scalar abstraction for the estimator algebra.
//!
//! Every probability, penalty weight and error value in this crate is
//! expressed in a [`Real`] scalar so the estimators can be instantiated
//! at `f32` or `f64`. Dataset generation is pinned to `f64` (see
//! [`crate::simgen`]) so generated bytes never depend on the scalar the
//! caller picked for the estimation side.

use std::fmt::{Debug, Display};

use num_traits::Float;

/// Floating-point scalar usable throughout the estimator stack.
pub trait Real: Float + Debug + Display + Send + Sync + 'static {
    /// Lossy conversion from `f64`, used at the boundary between the
    /// f64-pinned generators/quadrature and the generic algebra.
    fn from_f64(x: f64) -> Self {
        Self::from(x).expect("f64 -> Real conversion")
    }

    /// Conversion from a count.
    fn from_usize(x: usize) -> Self {
        Self::from(x).expect("usize -> Real conversion")
    }

    /// Lossy view as `f64` for reporting and for the f64-only special
    /// functions (normal CDF, quantile).
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real -> f64 conversion")
    }
}

impl<T> Real for T where T: Float + Debug + Display + Send + Sync + 'static {}
