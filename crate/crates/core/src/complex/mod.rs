//! The chain complex `𝔇_s M = Σ R_s Σ^{s-1} M`, its differentials computed through
//! `∂_s`, its homology and the structural checks run against it.

pub mod checks;
pub mod differential;
pub mod window;

use std::fmt;

use thiserror::Error;

pub use checks::{
    connectivity_bound, connectivity_check, d_squared_check, dickson_linearity_report, kernel_characterization, verify_dickson_linearity,
    stability_check, verify_ses, verify_unstable_identification, CheckReport,
};
pub use differential::Differential;
pub use window::{ComplexWindow, HomologyEntry};

use crate::fpla::FplaError;
use crate::rfunctor::RfunctorError;

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error("differential leaves R_{target} in degree {degree}: {witness}")]
    LeavesRs { target: usize, degree: i32, witness: String },
    #[error("d_{s} d_{} is nonzero in degree {degree}: {witness}", s + 1)]
    NotAComplex { s: usize, degree: i32, witness: String },
    #[error("twist too small: [(t+1)/2] = {u} exceeds p^w = {pw}")]
    TwistTooSmall { u: i64, pw: i64 },
    #[error("module is not unstable")]
    NotUnstable,
    #[error("s = {s} outside the built range 0..={s_max}")]
    OutOfRange { s: usize, s_max: usize },
    #[error(transparent)]
    Rfunctor(#[from] RfunctorError),
    #[error(transparent)]
    Fpla(#[from] FplaError),
}

/// One failed check, in the shape written to failure logs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckFailure {
    pub reason: String,
    pub s: usize,
    pub degree: i32,
    pub witness: String,
}

impl CheckFailure {
    pub fn new(reason: impl Into<String>, s: usize, degree: i32, witness: impl Into<String>) -> Self {
        CheckFailure { reason: reason.into(), s, degree, witness: witness.into() }
    }
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (s = {}, degree {}): {}", self.reason, self.s, self.degree, self.witness)
    }
}
