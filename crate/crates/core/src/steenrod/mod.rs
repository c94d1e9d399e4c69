//! The mod `p` Steenrod algebra and modules over it.

mod admissible;
mod algebra;
mod milnor;
mod module;

pub use admissible::{admissible_basis, AdemReducer, AdmissibleElement, AdmissibleWord, Letter};
pub use algebra::{letters_to_milnor, SteenrodAlgebra};
pub use milnor::{milnor_basis, milnor_product, MilnorBasis, MilnorElement};
pub use module::{bv1, free, sphere, FreeModuleWindow, MilnorAction, ModuleBuilder, ModuleWindow, Side};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SteenrodError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u32),
    #[error("Milnor and admissible bases disagree in degree {0}")]
    BasisMismatch(i32),
    #[error("degree {0} outside the computed range")]
    DegreeOutOfRange(i32),
    #[error("window exceeded: result in degree {0}")]
    WindowExceeded(i32),
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("relation violated: {0}")]
    Relation(String),
    #[error("parse error at line {0}: {1}")]
    Parse(usize, String),
}

/// An odd prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OddPrime(u32);

impl OddPrime {
    pub fn new(p: u32) -> Result<Self, SteenrodError> {
        if p < 3 || p.is_multiple_of(2) || (3..).step_by(2).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(SteenrodError::NotOddPrime(p));
        }
        Ok(OddPrime(p))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}
