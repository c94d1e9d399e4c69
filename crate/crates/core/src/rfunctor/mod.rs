//! Total Steenrod powers and the functors `R_s`.

pub mod ambient;
pub mod rho;
pub mod space;
pub mod total;

use thiserror::Error;

pub use ambient::Ambient;
pub use rho::{rho_degree, rho_preimage_degree, suspension_inclusion, Rho};
pub use space::{gamma_monomials, Part, RsBasis, RsSpace};
pub use total::{st_sign, TotalPower};

#[derive(Debug, Error)]
pub enum RfunctorError {
    #[error("coaction budget {0} exceeds the window")]
    Budget(i32),
    #[error("not in R_{s} in degree {degree}: {witness}")]
    NotInImage { s: usize, degree: i32, witness: String },
    #[error("stability violation in R_{s}, degree {degree}: {witness}")]
    StabilityViolation { s: usize, degree: i32, witness: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Invariants(#[from] crate::invariants::InvariantsError),
}
