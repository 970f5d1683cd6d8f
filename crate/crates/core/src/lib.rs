//! Simulation of a nonadiabatic conditional geometric phase gate on a
//! J-coupled pair of spin-1/2 nuclei.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: spinor states, Pauli operators, su(2) exponentials and
//!   tensor products for one or two spins.
//! - [`hamiltonians`]: rotating-field, compensated and laboratory-frame
//!   Hamiltonians plus rotating-frame transformations.
//! - [`propagation`]: closed-form propagators and an independent RK4 /
//!   Magnus integrator of the Schrödinger equation.
//! - [`phases`]: total, dynamical and geometric phase of cyclic evolutions
//!   and the field settings that null the dynamical phase.
//! - [`sequences`]: the state-preparation pulse sequence, its control
//!   solver, and the full conditional gate.

pub mod error;
pub mod hamiltonians;
pub mod linalg;
pub mod phases;
pub mod propagation;
pub mod sequences;

pub use error::{Error, Result};
