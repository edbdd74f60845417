//! Computational coarse geometry of discrete groups.
//!
//! The crate is organised bottom-up:
//!
//! * [`abelian`] exact integer linear algebra (Smith normal form, ranks,
//!   kernels) over arbitrary-precision integers;
//! * [`group`] canonical group elements, group laws and homomorphisms for the
//!   supported group kinds;
//! * [`metric`] weighted word norms computed by best-first search over the
//!   Cayley graph, closed balls, coarse-equivalence profiles and
//!   R-stabilizers;
//! * [`cover`] d-disjoint, R-bounded cover families, their verification,
//!   the coset-extension construction and an exact branch-and-bound search
//!   for minimal-diameter covers of finite balls;
//! * [`solvable`] Hirsch length and asymptotic-dimension bound derivation
//!   with replayable traces;
//! * [`workbench`] the line-oriented workbench file format.
//!
//! No floating point is used anywhere; every distance is an exact rational.

pub mod abelian;
pub mod cover;
pub mod error;
pub mod group;
pub mod metric;
pub mod rational;
pub mod solvable;
pub mod workbench;

pub use error::{Error, Result};
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
