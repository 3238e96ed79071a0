use nalgebra::Matrix2;
use num_complex::Complex64;

use super::joint_index;
use crate::linalg::{self, CMatrix, ZERO};
use crate::model::{LatticeWindow, ModelParams, ParticleOperator};
use crate::tolerances::Tolerances;
use crate::{Error, Result};

/// Thermal weights of the atom, `ρ_β = Z_β^{-1} e^{−βE b*b}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomGibbs {
    pub beta_e: f64,
    pub w_ground: f64,
    pub w_excited: f64,
}

impl AtomGibbs {
    pub fn new(params: &ModelParams) -> Self {
        let beta_e = params.beta_e();
        Self {
            beta_e,
            w_ground: 1.0 / (1.0 + (-beta_e).exp()),
            w_excited: 1.0 / (1.0 + beta_e.exp()),
        }
    }

    /// `ρ_β^s`, with `0^0 = 1`.
    pub fn power(&self, s: f64) -> Matrix2<f64> {
        Matrix2::new(self.w_ground.powf(s), 0.0, 0.0, self.w_excited.powf(s))
    }

    pub fn matrix(&self) -> Matrix2<f64> {
        self.power(1.0)
    }
}

/// State (or operator) of particle ⊗ atom on a window.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDensityMatrix {
    window: LatticeWindow,
    coeffs: CMatrix,
}

impl JointDensityMatrix {
    pub fn from_matrix(window: LatticeWindow, coeffs: CMatrix) -> Result<Self> {
        let n = 2 * window.len();
        if coeffs.nrows() != n || coeffs.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: coeffs.nrows().max(coeffs.ncols()),
            });
        }
        Ok(Self { window, coeffs })
    }

    /// `A ⊗ m` for a 2×2 atomic matrix `m`.
    pub fn product(particle: &ParticleOperator, atom: &Matrix2<Complex64>) -> Self {
        let w = *particle.window();
        let n = w.len();
        let p = particle.coeffs();
        let coeffs = CMatrix::from_fn(2 * n, 2 * n, |r, c| p[(r / 2, c / 2)] * atom[(r % 2, c % 2)]);
        Self { window: w, coeffs }
    }

    /// `ρ_p ⊗ ρ_β`.
    pub fn thermal(particle: &ParticleOperator, params: &ModelParams) -> Self {
        let atom = AtomGibbs::new(params).matrix().map(|v| Complex64::new(v, 0.0));
        Self::product(particle, &atom)
    }

    /// `Σ_{ab} blocks[a][b] ⊗ |a⟩⟨b|`.
    pub fn from_blocks(blocks: [[&ParticleOperator; 2]; 2]) -> Result<Self> {
        let w = *blocks[0][0].window();
        let n = w.len();
        let mut coeffs = CMatrix::zeros(2 * n, 2 * n);
        for (a, row) in blocks.iter().enumerate() {
            for (b, block) in row.iter().enumerate() {
                if block.window() != &w {
                    return Err(Error::window(&w, "blocks on different windows"));
                }
                for j in 0..n {
                    for i in 0..n {
                        coeffs[(joint_index(i, a), joint_index(j, b))] = block.coeffs()[(i, j)];
                    }
                }
            }
        }
        Ok(Self { window: w, coeffs })
    }

    pub fn window(&self) -> &LatticeWindow {
        &self.window
    }

    pub fn coeffs(&self) -> &CMatrix {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> CMatrix {
        self.coeffs
    }

    /// `⟨·, a| M |·, b⟩` as a particle operator.
    pub fn block(&self, a: usize, b: usize) -> ParticleOperator {
        let n = self.window.len();
        let m = CMatrix::from_fn(n, n, |i, j| self.coeffs[(joint_index(i, a), joint_index(j, b))]);
        ParticleOperator::from_matrix(self.window, m).expect("square by construction")
    }

    /// `Tr_atom`.
    pub fn partial_trace_atom(&self) -> ParticleOperator {
        let mut out = self.block(0, 0);
        *out.coeffs_mut() += self.block(1, 1).coeffs();
        out
    }

    /// `Tr_particle`.
    pub fn partial_trace_particle(&self) -> Matrix2<Complex64> {
        let n = self.window.len();
        let mut out = Matrix2::from_element(ZERO);
        for a in 0..2 {
            for b in 0..2 {
                out[(a, b)] = (0..n).map(|i| self.coeffs[(joint_index(i, a), joint_index(i, b))]).sum();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.coeffs)
    }

    pub fn trace_distance(&self, other: &Self) -> f64 {
        linalg::trace_distance(&self.coeffs, &other.coeffs)
    }

    pub fn max_difference(&self, other: &Self) -> f64 {
        linalg::max_abs(&(&self.coeffs - &other.coeffs))
    }

    /// Rows of the two unpaired states `ψ_{k_max} ⊗ |0⟩` and `ψ_{k_min} ⊗ |1⟩`.
    pub fn edge_rows(window: &LatticeWindow) -> [usize; 2] {
        [joint_index(window.len() - 1, 0), joint_index(0, 1)]
    }

    /// Fails if any entry in an unpaired row or column exceeds the edge
    /// threshold.
    pub fn check_edges(&self) -> Result<()> {
        let tol = Tolerances::DEFAULT.edge_support;
        let n = self.coeffs.nrows();
        for r in Self::edge_rows(&self.window) {
            let worst = (0..n)
                .map(|j| self.coeffs[(r, j)].norm().max(self.coeffs[(j, r)].norm()))
                .fold(0.0, f64::max);
            if worst > tol {
                return Err(Error::window(
                    &self.window,
                    format!("joint state has weight {worst:e} on an unpaired edge state"),
                ));
            }
        }
        Ok(())
    }

    /// `Tr((X ⊗ 1) M)` with the window-truncated position operator.
    pub fn position_mean(&self, f: f64) -> f64 {
        self.partial_trace_atom().position_mean(f)
    }
}
