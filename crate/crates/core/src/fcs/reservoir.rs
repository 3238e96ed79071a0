use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{CMatrix, ZERO};
use crate::model::{LatticeWindow, ModelParams};
use crate::single_atom::{hamiltonian_blocks, single_atom_unitary};
use crate::{Error, Result};

/// Largest atom chain propagated by brute force.
pub const MAX_ATOMS: usize = 4;
/// Largest particle window propagated by brute force.
pub const MAX_WINDOW: usize = 64;

/// Particle on a window with a chain of `m` atoms, of which the first `n`
/// interact in turn for a time `τ` each.
///
/// Joint basis: row `i·2^m + c` is `ψ_{k_i} ⊗ |c⟩`, bit `j` of `c` set when
/// atom `j` is excited.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReservoirConfig {
    pub m: usize,
    pub n: usize,
    pub params: ModelParams,
    pub window: LatticeWindow,
}

impl ReservoirConfig {
    pub fn new(m: usize, n: usize, params: ModelParams, window: LatticeWindow) -> Result<Self> {
        if n > m {
            return Err(Error::InvalidArgument(format!("n = {n} interactions need at least as many atoms, got M = {m}")));
        }
        if m > MAX_ATOMS || window.len() > MAX_WINDOW {
            return Err(Error::Budget {
                what: "brute-force reservoir",
                detail: format!(
                    "M = {m}, window = {} (limits M <= {MAX_ATOMS}, window <= {MAX_WINDOW})",
                    window.len()
                ),
            });
        }
        params.validate()?;
        Ok(Self { m, n, params, window })
    }

    pub fn configs(&self) -> usize {
        1 << self.m
    }

    pub fn dim(&self) -> usize {
        self.window.len() * self.configs()
    }

    pub fn index(&self, i: usize, config: usize) -> usize {
        i * self.configs() + config
    }

    /// Diagonal of `H_p` in the joint basis.
    pub fn particle_energy(&self, r: usize) -> f64 {
        2.0 - self.params.f * self.window.k(r / self.configs()) as f64
    }

    /// Number of excited atoms in joint row `r`.
    pub fn excitations(&self, r: usize) -> u32 {
        ((r % self.configs()) as u32).count_ones()
    }

    /// `H_env = E Σ_j b_j* b_j` in joint row `r`.
    pub fn reservoir_energy(&self, r: usize) -> f64 {
        self.params.e * self.excitations(r) as f64
    }

    /// `e^{−iτH̃_j}` for the step coupling atom `j`; idle atoms only pick up
    /// their free phase.
    pub fn step_unitary(&self, j: usize) -> CMatrix {
        let mut u = CMatrix::zeros(self.dim(), self.dim());
        self.for_each_step_entry(j, |r, c, v| u[(r, c)] += v);
        u
    }

    fn for_each_step_entry(&self, j: usize, mut put: impl FnMut(usize, usize, Complex64)) {
        let single = single_atom_unitary(&self.params, &self.window, self.params.tau);
        let blocks = hamiltonian_blocks(&self.params, &self.window);
        let bit = 1usize << j;
        for rest in (0..self.configs()).filter(|c| c & bit == 0) {
            let idle = Complex64::from_polar(1.0, -self.params.tau * self.params.e * rest.count_ones() as f64);
            let joint = |s: usize| self.index(s / 2, rest | if s % 2 == 1 { bit } else { 0 });
            for block in &blocks {
                let rows = block.rows(&self.window);
                for &a in &rows {
                    for &b in &rows {
                        let v = single[(a, b)];
                        if v != ZERO {
                            put(joint(a), joint(b), v * idle);
                        }
                    }
                }
            }
        }
    }
}

/// `U(nτ, 0) = e^{−iτH̃_n} ··· e^{−iτH̃_1}`.
pub fn repeated_interaction_propagator(cfg: &ReservoirConfig) -> CMatrix {
    let mut u = CMatrix::identity(cfg.dim(), cfg.dim());
    for j in 0..cfg.n {
        u = cfg.step_unitary(j) * u;
    }
    u
}
