//! Riley polynomials, adjoint Reidemeister torsion and inverse-torsion sums
//! for two-bridge knots.
//!
//! The crate is organized bottom-up:
//!
//! - [`poly`]: exact sparse Laurent polynomials over big integers.
//! - [`schubert`]: Schubert normal forms, ε-sequences and the associated words.
//! - [`riley`]: representation matrices, the Riley polynomial, exact identities.
//! - [`numeric`]: root finding, generic sampling, Euler–Jacobi sums.
//! - [`torsion`]: the closed-form torsion and trace-fiber inverse sums.
//! - [`cochain`]: a first-principles torsion computed from the twisted cochain
//!   complex, used to cross-check the closed form.
//! - [`cli`]: the `twobridge` command-line surface.

pub mod cli;
pub mod cochain;
pub mod config;
pub mod numeric;
pub mod poly;
pub mod real;
pub mod riley;
pub mod schubert;
pub mod serde_complex;
pub mod torsion;

pub use config::{RunConfig, Tolerances};
pub use poly::{Monomial, MultiPoly, UniPoly, Var};
pub use real::{DoubleDouble, Precision, Real};
pub use riley::{riley_polynomial, PolyMat2, RileyData};
pub use schubert::{validate, SchubertForm, Word};
pub use torsion::{CharacterPoint, TorsionReport};
