//! Quantum realizations: complex matrices, the two-qubit construction for
//! generator points, direct-sum mixing, the expectation oracle and random
//! strategy sampling.

pub mod matrix;
pub mod realization;
pub mod sampling;

pub use matrix::ComplexMatrix;
pub use realization::{realize_generator, realize_mixture, PhaseParams, Realization};
pub use sampling::{
    haar_unitary, random_observable, random_pure_state, sample_quantum, sample_quantum_indexed,
    sample_rng, QuantumSample, MAX_SAMPLE_DIM, MIN_SAMPLE_DIM,
};
