//! Exact orbit counting on the projective line for products of CM elliptic
//! curves.
//!
//! For elliptic curves `E`, `E'` with complex multiplication by the same
//! imaginary quadratic field `K` and conductors `c`, `c'`, the number of
//! `Aut(E x E')`-orbits on `P^1(K)` depends only on `c`, `c'` and the
//! splitting behaviour of the primes dividing `c c'`. The pieces are:
//!
//! * [`arith`]: factorization, totients, the Kronecker character and class
//!   numbers of imaginary quadratic orders.
//! * [`volcano`]: the levelled isogeny-volcano graph and the count of
//!   non-backtracking walks on it, which is the local factor `r_K`.
//! * [`counts`]: the orbit-count formulas, each returning an auditable
//!   [`counts::CountReport`].
//! * [`oracles`]: brute-force ground truth used to cross-check the above.
//!
//! All counts are exact [`num_bigint::BigUint`] values.

pub mod arith;
pub mod counts;
mod error;
pub mod oracles;
pub mod volcano;

pub use arith::{Factorization, ImaginaryQuadraticField, SplittingSymbol};
pub use counts::{ConductorPair, CountReport, Gamma0Term, PairTerm};
pub use error::{Error, Result};
pub use volcano::{ClosedForm, TruncatedVolcano, WalkQuery};
