//! Every numerical threshold used by the library and the checks, in one
//! record.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed `Σ J_ν²` mass outside a Bessel table.
    pub bessel_tail: f64,
    /// Wannier–Stark components smaller than this are treated as zero when a
    /// position eigenstate is expanded in the eigenbasis.
    pub bessel_negligible: f64,
    /// Probability allowed to fall outside the position range of a window.
    pub leakage: f64,
    /// Entries smaller than this count as "no support" in edge checks.
    pub edge_support: f64,
    pub hermiticity: f64,
    pub trace: f64,
    /// Smallest eigenvalue accepted by positivity checks.
    pub psd: f64,
    /// ω0τ/2π closer than this to a positive integer is treated as resonant.
    pub resonance: f64,
    /// Cumulative first-outcome mass that position FCS may skip.
    pub outcome_pruning: f64,
    pub newton_tolerance: f64,
    pub newton_max_iterations: usize,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        bessel_tail: 1e-14,
        bessel_negligible: 1e-40,
        leakage: 1e-8,
        edge_support: 1e-14,
        hermiticity: 1e-12,
        trace: 1e-10,
        psd: -1e-10,
        resonance: 1e-12,
        outcome_pruning: 1e-16,
        newton_tolerance: 1e-15,
        newton_max_iterations: 200,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Margin (in sites) added around the jump support when windows are sized.
pub const WINDOW_MARGIN: i64 = 8;
