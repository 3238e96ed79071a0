//! Particle data: physical parameters, the Wannier–Stark eigenbasis and its
//! Bessel transform, truncated windows, and the free Bloch dynamics.

mod banded;
mod bessel;
mod bloch;
mod operator;
mod params;
mod window;

pub use banded::BandedOperator;
pub use bessel::{bessel_table, BesselTable};
pub use bloch::{bloch_offset, BlochOffset};
pub use operator::{
    free_evolve, position_distribution, ParticleDensityMatrix, ParticleOperator, PositionPmf,
};
pub use params::{derive_params, DerivedParams, MixingAngle, ModelParams};
pub use window::LatticeWindow;
