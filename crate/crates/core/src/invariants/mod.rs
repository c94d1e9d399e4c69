//! Dickson and Mui invariants, the localized ring `Γ_s` and its structure maps.

pub mod action;
pub mod bv;
pub mod classes;
pub mod gamma;
pub mod ks;

use thiserror::Error;

pub use action::{beta_bv, bv_to_gamma, gamma_to_bv, power_bv, GammaAction};
pub use bv::{st1, BVElement, BVMonomial};
pub use classes::{dickson, mui, rank_cap, MuiClass};
pub use gamma::{partial_s, phi_s, psi, psi_element, theta, GammaElement, GammaMonomial, GammaTensor};
pub use ks::{ks_monomials, K1Monomial, KsDecomposer, KsMonomial, Twisted};

#[derive(Debug, Error)]
pub enum InvariantsError {
    #[error("rank {s} exceeds the cap {cap} at p = {p}")]
    RankCap { p: u32, s: usize, cap: usize },
    #[error("not in the image of the Dickson algebra: {0}")]
    NotDickson(String),
    #[error("monomial has a negative power of Q_0")]
    NotPolynomial,
    #[error("polynomial is not GL-invariant: {0}")]
    NotInvariant(String),
}
