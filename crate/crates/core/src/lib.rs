//! Numerical toolkit for Bell-type analysis in space and time.
//!
//! The crate is split along the physics:
//!
//! - [`spin`]: Pauli algebra, the singlet state, the CHSH functional and the
//!   four-operator family `A_i = M(α_i) ⊗ I`, `B_j = I ⊗ N(β_j)`.
//! - [`lhv`]: local hidden-variable models as sampleable response functions,
//!   the cosine construction for `g·cos(α−β)` and threshold classification.
//! - [`feasibility`]: linear-programming membership in the local correlation
//!   polytope with primal/dual certificates, and bisection of the critical
//!   visibility.
//! - [`spatial`]: Gaussian product wavefunctions over box detectors, the
//!   visibility factor `g(O_A, O_B)`, spreading and the product representation
//!   for separated detectors.
//! - [`vacuum`]: the free scalar field two-point function, smeared
//!   covariances, Wick n-point functions and cluster decay.
//! - [`random_field`]: a lattice-regularized complex Gaussian random field
//!   whose moments reproduce the complex free-field correlation functions.
//!
//! Monte Carlo routines share the seed-splitting contract in [`rng`], so
//! results depend only on `(inputs, seed)` and never on the worker count.

pub mod error;
pub mod feasibility;
pub mod lhv;
pub mod quad;
pub mod random_field;
pub mod rng;
pub mod spatial;
pub mod spin;
pub mod vacuum;

pub use error::{Error, Result};

/// Crate version, echoed into experiment metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
