//! Numerical model of a charged particle in a tilted one-dimensional
//! tight-binding band that interacts, one after the other, with thermal
//! two-level atoms.
//!
//! Particle states live in the Wannier–Stark eigenbasis `{ψ_k}` of
//! `H_p = -Δ - F X`, truncated to a [`LatticeWindow`]. In that basis the
//! translation `T` is an index shift and `H_p` is diagonal, so the reduced
//! dynamics is exact; position data is recovered with a Bessel transform.
//!
//! Module map:
//!
//! * [`model`]: parameters, Bessel tables, windows, particle operators and
//!   free (Bloch) evolution.
//! * [`single_atom`]: exact dynamics of the particle coupled to one atom.
//! * [`channel`]: the deformed reduced dynamics `L_α`, its Kraus form and the
//!   partial-trace oracle.
//! * [`statistics`]: the trinomial walk, transport coefficients and large
//!   deviations.
//! * [`fcs`]: two-time measurement statistics of energy and position.
//! * [`verify`]: the end-to-end checks behind `verify-all` and the acceptance
//!   suite.

pub mod channel;
pub mod error;
pub mod fcs;
pub mod linalg;
pub mod model;
pub mod random;
pub mod single_atom;
pub mod statistics;
pub mod tolerances;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    BandedOperator, BesselTable, BlochOffset, DerivedParams, LatticeWindow, ModelParams,
    ParticleDensityMatrix, ParticleOperator, PositionPmf,
};
pub use tolerances::Tolerances;

pub use num_complex::Complex64;
