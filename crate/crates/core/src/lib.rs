//! Classical and quantum sets of bipartite correlation vectors.
//!
//! With two ±1-valued measurements per party, a correlation vector holds the
//! four correlators `<A_a B_b>`. This crate decides whether such a vector is
//! reachable by a local variable model (the CHSH polytope C) or by quantum
//! theory (the arcsine body Q), writes any quantum-reachable vector as a
//! mixture of at most three extremal generators, and builds explicit states
//! and observables that reproduce it.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `f64` aliases
//! below are what most callers want.

// Comparisons are written as `!(a <= b)` on purpose so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod corrvec;
pub mod error;
pub mod geometry;
pub mod membership;
pub mod quantum;
pub mod scalar;

pub use corrvec::{canonicalize, CanonicalForm, SymmetryOp};
pub use error::{Error, Result};
pub use geometry::{
    angle_transport, boundary_to_generator, decompose, f_canonical, face_decompose,
};
pub use membership::{chsh_max, in_c, in_q, mu, mu_inverse, MembershipReport};
pub use quantum::{realize_generator, realize_mixture, sample_quantum};
pub use scalar::Real;

/// Double-precision correlation vector.
pub type CorrVec = corrvec::CorrelationVector<f64>;
pub type CorrVecF32 = corrvec::CorrelationVector<f32>;
pub type Generator = geometry::GeneratorPoint<f64>;
pub type AngleVec = geometry::AngleVector<f64>;
pub type Decomposition = geometry::Decomposition<f64>;
pub type Term = geometry::Term<f64>;
pub type Report = membership::MembershipReport<f64>;
pub type Matrix = quantum::ComplexMatrix<f64>;
pub type Realization = quantum::Realization<f64>;
pub type QuantumSample = quantum::QuantumSample<f64>;
