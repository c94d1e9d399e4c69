//! Computations with the derived functors of destabilization at odd primes.

pub mod complex;
pub mod fpla;
pub mod invariants;
pub mod oracle;
pub mod rfunctor;
pub mod steenrod;
