//! Exact sparse Laurent polynomials over the integers and their numeric
//! specializations.

mod multi;
mod uni;

pub use multi::{Monomial, MultiPoly, Var};
pub use uni::UniPoly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("negative exponent evaluated at zero")]
    ZeroBase,
}
