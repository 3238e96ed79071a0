//! Two-time measurement statistics. Energy increments come from brute-force
//! propagation of the particle with a finite chain of atoms; position
//! increments from the reduced channel.

mod energy;
mod position;
mod reservoir;

pub use energy::{energy_cgf, run_energy_fcs, EnergyFcs, MeasurementRecord};
pub use position::{position_cgf, run_position_fcs, PositionCgf, PositionFcs};
pub use reservoir::{repeated_interaction_propagator, ReservoirConfig, MAX_ATOMS, MAX_WINDOW};
