//! Quantum bound states in 1D potentials with fast spatial oscillations.
//!
//! A potential `V(x) = k·v(kx)·Φ(x) + ρ(x)` with a 2π-periodic zero-mean
//! profile `v` and a slow envelope `Φ` is, for large `k`, well described by
//! the effective potential `−<g²>Φ²(x) + ρ(x)` (plus delta terms at envelope
//! jumps), where `g` is the zero-mean antiderivative of `v`. This crate builds
//! both Hamiltonians, diagonalizes them, and provides analytic oracles and the
//! superpotential averaging machinery used to check the correspondence.

// negated comparisons are used on purpose: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod beams;
pub mod correction;
pub mod error;
pub mod experiments;
pub mod potential;
pub mod profile;
pub mod scenario;
pub mod solver;
pub mod superpotential;

pub use error::{Error, Result};
pub use potential::{
    Background, DeltaTerm, Discontinuity, EffectivePotential, Envelope, ModulatedPotential, PhaseConstraint,
};
pub use profile::{Harmonic, PeriodicProfile};
pub use solver::{Grid, Spectrum, TridiagonalHamiltonian};
