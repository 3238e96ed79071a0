use nalgebra::Matrix2;
use num_complex::Complex64;

use super::{joint_index, JointDensityMatrix};
use crate::linalg::{CMatrix, ZERO};
use crate::model::{LatticeWindow, ModelParams};
use crate::Result;

/// One invariant block of the single-atom Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SectorBlock {
    /// `{ψ_k ⊗ |0⟩, ψ_{k+1} ⊗ |1⟩}` with
    /// `[[2 − Fk, λ], [λ, 2 − F(k+1) + E]]`.
    Pair { k: i64, hamiltonian: Matrix2<f64> },
    /// Unpaired edge state `ψ_k ⊗ |atom⟩` with its energy.
    Edge { k: i64, atom: usize, energy: f64 },
}

impl SectorBlock {
    /// Joint rows the block acts on.
    pub fn rows(&self, window: &LatticeWindow) -> Vec<usize> {
        match *self {
            SectorBlock::Pair { k, .. } => {
                let i = window.index(k).expect("block inside window");
                vec![joint_index(i, 0), joint_index(i + 1, 1)]
            }
            SectorBlock::Edge { k, atom, .. } => {
                vec![joint_index(window.index(k).expect("block inside window"), atom)]
            }
        }
    }

    /// Conserved sector label `k − a`.
    pub fn sector(&self) -> i64 {
        match *self {
            SectorBlock::Pair { k, .. } => k,
            SectorBlock::Edge { k, atom, .. } => k - atom as i64,
        }
    }
}

/// Sector label `k − a` of joint row `r`.
pub fn sector_number(window: &LatticeWindow, r: usize) -> i64 {
    window.k(r / 2) - (r % 2) as i64
}

pub fn hamiltonian_blocks(params: &ModelParams, window: &LatticeWindow) -> Vec<SectorBlock> {
    let level = |k: i64| 2.0 - params.f * k as f64;
    let mut blocks = Vec::with_capacity(window.len() + 1);
    blocks.push(SectorBlock::Edge {
        k: window.k_min(),
        atom: 1,
        energy: level(window.k_min()) + params.e,
    });
    for k in window.k_min()..window.k_max() {
        blocks.push(SectorBlock::Pair {
            k,
            hamiltonian: Matrix2::new(
                level(k),
                params.lambda,
                params.lambda,
                level(k + 1) + params.e,
            ),
        });
    }
    blocks.push(SectorBlock::Edge {
        k: window.k_max(),
        atom: 0,
        energy: level(window.k_max()),
    });
    blocks
}

/// `H` on the window assembled term by term from `H_p`, `E b*b` and the
/// shift couplings; unpaired edge states keep only their diagonal energy.
pub fn joint_hamiltonian(params: &ModelParams, window: &LatticeWindow) -> CMatrix {
    let n = window.len();
    let mut h = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let level = 2.0 - params.f * window.k(i) as f64;
        h[(joint_index(i, 0), joint_index(i, 0))] = Complex64::new(level, 0.0);
        h[(joint_index(i, 1), joint_index(i, 1))] = Complex64::new(level + params.e, 0.0);
    }
    let lambda = Complex64::new(params.lambda, 0.0);
    for i in 0..n.saturating_sub(1) {
        // T b* : ψ_k ⊗ |0⟩ → ψ_{k+1} ⊗ |1⟩, and its adjoint.
        h[(joint_index(i + 1, 1), joint_index(i, 0))] = lambda;
        h[(joint_index(i, 0), joint_index(i + 1, 1))] = lambda;
    }
    h
}

/// `e^{−itH}` on the window, each 2×2 block exponentiated through a numeric
/// symmetric eigendecomposition.
pub fn single_atom_unitary(params: &ModelParams, window: &LatticeWindow, t: f64) -> CMatrix {
    let n = 2 * window.len();
    let mut u = CMatrix::zeros(n, n);
    for block in hamiltonian_blocks(params, window) {
        let rows = block.rows(window);
        match block {
            SectorBlock::Edge { energy, .. } => {
                u[(rows[0], rows[0])] = Complex64::from_polar(1.0, -t * energy);
            }
            SectorBlock::Pair { hamiltonian, .. } => {
                let eig = hamiltonian.symmetric_eigen();
                for a in 0..2 {
                    for b in 0..2 {
                        let mut acc = ZERO;
                        for m in 0..2 {
                            let v = eig.eigenvectors[(a, m)] * eig.eigenvectors[(b, m)];
                            acc += Complex64::from_polar(v, -t * eig.eigenvalues[m]);
                        }
                        u[(rows[a], rows[b])] = acc;
                    }
                }
            }
        }
    }
    u
}

/// `e^{−itH} ρ e^{itH}` through dense block exponentials.
pub fn propagate_oracle(
    state: &JointDensityMatrix,
    t: f64,
    params: &ModelParams,
) -> Result<JointDensityMatrix> {
    state.check_edges()?;
    let u = single_atom_unitary(params, state.window(), t);
    JointDensityMatrix::from_matrix(*state.window(), &u * state.coeffs() * u.adjoint())
}

/// `e^{−itH} ρ e^{itH}` from the diagonalisation `H = U(H_p + ω0(b*b − ½) +
/// (E−F)/2)U*`: rotate each sector pair into the dressed basis
/// `φ_{k,−} = cos θ ψ_k⊗|0⟩ − sin θ ψ_{k+1}⊗|1⟩`,
/// `φ_{k,+} = sin θ ψ_k⊗|0⟩ + cos θ ψ_{k+1}⊗|1⟩`, apply the phases and
/// rotate back.
pub fn propagate_closed(
    state: &JointDensityMatrix,
    t: f64,
    params: &ModelParams,
) -> Result<JointDensityMatrix> {
    state.check_edges()?;
    let window = *state.window();
    let evolve = ClosedPropagator::new(params, &window, t);
    // ρ ↦ W ρ W† = (W (W ρ)†)†
    let mut m = state.coeffs().clone();
    evolve.apply_columns(&mut m);
    let mut m = m.adjoint();
    evolve.apply_columns(&mut m);
    JointDensityMatrix::from_matrix(window, m.adjoint())
}

struct ClosedPropagator {
    cos: f64,
    sin: f64,
    /// Dressed phases `(e^{−itD_{k,−}}, e^{−itD_{k,+}})` per pair.
    phases: Vec<(Complex64, Complex64)>,
    edge_low: Complex64,
    edge_high: Complex64,
}

impl ClosedPropagator {
    fn new(params: &ModelParams, window: &LatticeWindow, t: f64) -> Self {
        let d = params.derived();
        let mixing = d.mixing();
        let shift = (params.e - params.f) / 2.0;
        let level = |k: i64| 2.0 - params.f * k as f64;
        let phases = (0..window.len().saturating_sub(1))
            .map(|i| {
                let base = level(window.k(i)) + shift;
                (
                    Complex64::from_polar(1.0, -t * (base - d.omega0 / 2.0)),
                    Complex64::from_polar(1.0, -t * (base + d.omega0 / 2.0)),
                )
            })
            .collect();
        Self {
            cos: mixing.cos,
            sin: mixing.sin,
            phases,
            edge_low: Complex64::from_polar(1.0, -t * (level(window.k_min()) + params.e)),
            edge_high: Complex64::from_polar(1.0, -t * level(window.k_max())),
        }
    }

    fn apply_columns(&self, m: &mut CMatrix) {
        let n = m.nrows() / 2;
        let (c, s) = (self.cos, self.sin);
        for mut col in m.column_iter_mut() {
            col[joint_index(0, 1)] *= self.edge_low;
            col[joint_index(n - 1, 0)] *= self.edge_high;
            for (i, &(minus, plus)) in self.phases.iter().enumerate() {
                let (r0, r1) = (joint_index(i, 0), joint_index(i + 1, 1));
                let (v0, v1) = (col[r0], col[r1]);
                let cm = (v0 * c - v1 * s) * minus;
                let cp = (v0 * s + v1 * c) * plus;
                col[r0] = cm * c + cp * s;
                col[r1] = cp * c - cm * s;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::random::random_joint_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::f64::consts::PI;

    fn params() -> ModelParams {
        ModelParams::new(2.0, 1.0, 0.5, 1.0, 1.0).unwrap()
    }

    fn window() -> LatticeWindow {
        LatticeWindow::centered(16).unwrap()
    }

    #[test]
    fn block_spectrum_matches_dressed_levels() {
        for p in [params(), ModelParams::new(0.3, 1.2, -0.8, 1.0, 1.0).unwrap()] {
            let d = p.derived();
            for block in hamiltonian_blocks(&p, &window()) {
                if let SectorBlock::Pair { k, hamiltonian } = block {
                    let mut ev: Vec<f64> = hamiltonian.symmetric_eigenvalues().iter().copied().collect();
                    ev.sort_by(f64::total_cmp);
                    let centre = 2.0 - p.f * k as f64 + (p.e - p.f) / 2.0;
                    assert!((ev[0] - (centre - d.omega0 / 2.0)).abs() < 1e-12);
                    assert!((ev[1] - (centre + d.omega0 / 2.0)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn equal_frequencies_give_gap_two_lambda() {
        let p = ModelParams::new(1.3, 1.3, 0.4, 1.0, 1.0).unwrap();
        for block in hamiltonian_blocks(&p, &window()) {
            if let SectorBlock::Pair { k, hamiltonian } = block {
                assert!((hamiltonian.trace() - 2.0 * (2.0 - p.f * k as f64)).abs() < 1e-13);
                let ev = hamiltonian.symmetric_eigenvalues();
                assert!(((ev[0] - ev[1]).abs() - 0.8).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn blocks_reproduce_the_full_hamiltonian_and_conserve_sectors() {
        let w = window();
        let h = joint_hamiltonian(&params(), &w);
        let mut from_blocks = CMatrix::zeros(h.nrows(), h.ncols());
        for block in hamiltonian_blocks(&params(), &w) {
            let rows = block.rows(&w);
            for &r in &rows {
                assert_eq!(sector_number(&w, r), block.sector());
            }
            match block {
                SectorBlock::Edge { energy, .. } => from_blocks[(rows[0], rows[0])] = energy.into(),
                SectorBlock::Pair { hamiltonian, .. } => {
                    for a in 0..2 {
                        for b in 0..2 {
                            from_blocks[(rows[a], rows[b])] = hamiltonian[(a, b)].into();
                        }
                    }
                }
            }
        }
        assert_eq!(h, from_blocks);
        let number = CMatrix::from_fn(h.nrows(), h.ncols(), |r, c| {
            if r == c {
                Complex64::new(sector_number(&w, r) as f64, 0.0)
            } else {
                ZERO
            }
        });
        assert_eq!(linalg::commutator_norm(&h, &number), 0.0);
    }

    #[test]
    fn zero_coupling_blocks_are_diagonal() {
        let p = ModelParams::new(2.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        for block in hamiltonian_blocks(&p, &window()) {
            if let SectorBlock::Pair { k, hamiltonian } = block {
                assert_eq!(hamiltonian[(0, 1)], 0.0);
                assert_eq!(hamiltonian[(0, 0)], 2.0 - k as f64);
                assert_eq!(hamiltonian[(1, 1)], 2.0 - (k + 1) as f64 + 2.0);
            }
        }
    }

    #[test]
    fn closed_form_matches_oracle() {
        let w = window();
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for p in [
            params(),
            ModelParams::new(0.4, 1.0, 0.7, 0.6, 2.0).unwrap(),
            ModelParams::new(0.4, 1.0, -0.7, 0.6, 2.0).unwrap(),
            ModelParams::new(1.0, 1.0, 0.0, 1.0, 1.0).unwrap(),
        ] {
            for &t in &[0.0, 0.1, 1.0, 3.0, 17.5] {
                let rho = random_joint_state(w, 1, &mut rng);
                let a = propagate_closed(&rho, t, &p).unwrap();
                let b = propagate_oracle(&rho, t, &p).unwrap();
                assert!(a.trace_distance(&b) < 1e-10, "{p:?} t={t}");
                assert!((a.trace() - 1.0).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn time_zero_is_identity() {
        let w = window();
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let rho = random_joint_state(w, 1, &mut rng);
        assert!(propagate_closed(&rho, 0.0, &params()).unwrap().max_difference(&rho) < 1e-15);
        assert!(propagate_oracle(&rho, 0.0, &params()).unwrap().max_difference(&rho) < 1e-15);
    }

    #[test]
    fn dressed_eigenstate_only_gains_a_phase() {
        let p = params();
        let w = window();
        let m = p.derived().mixing();
        let k = 2;
        let i = w.index(k).unwrap();
        let mut v = nalgebra::DVector::from_element(2 * w.len(), ZERO);
        v[joint_index(i, 0)] = m.cos.into();
        v[joint_index(i + 1, 1)] = (-m.sin).into();
        let rho = JointDensityMatrix::from_matrix(w, &v * v.adjoint()).unwrap();
        let t = 2.3;
        let out = propagate_closed(&rho, t, &p).unwrap();
        assert!(out.max_difference(&rho) < 1e-14);
        // The global phase shows on a coherence with a fixed reference vector.
        let mut r = nalgebra::DVector::from_element(2 * w.len(), ZERO);
        r[joint_index(0, 0)] = Complex64::new(1.0, 0.0);
        let coherence = JointDensityMatrix::from_matrix(w, &v * r.adjoint()).unwrap();
        let u = single_atom_unitary(&p, &w, t);
        let moved = &u * coherence.coeffs();
        let energy = 2.0 - p.f * k as f64 + (p.e - p.f) / 2.0 - p.derived().omega0 / 2.0;
        let phase = Complex64::from_polar(1.0, -t * energy);
        assert!(linalg::max_abs(&(moved - coherence.coeffs() * phase)) < 1e-13);
    }

    #[test]
    fn edge_support_is_rejected() {
        let w = window();
        let n = 2 * w.len();
        let mut m = CMatrix::zeros(n, n);
        let [r, _] = JointDensityMatrix::edge_rows(&w);
        m[(r, r)] = Complex64::new(1.0, 0.0);
        let rho = JointDensityMatrix::from_matrix(w, m).unwrap();
        assert!(propagate_closed(&rho, 1.0, &params()).is_err());
        assert!(propagate_oracle(&rho, 1.0, &params()).is_err());
    }

    #[test]
    fn rabi_resonance_factorises() {
        // ω0 τ = 2π with E − F = 1.
        let lambda = (4.0 * PI * PI - 1.0).sqrt() / 2.0;
        let p = ModelParams::new(2.0, 1.0, lambda, 1.0, 1.0).unwrap();
        assert!(p.derived().resonant);
        let w = window();
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        let rho = random_joint_state(w, 1, &mut rng);
        let out = propagate_closed(&rho, p.tau, &p).unwrap();
        // Free particle evolution and atomic phase e^{−iτF b*b}; the global
        // factor drops out under conjugation.
        for a in 0..2 {
            for b in 0..2 {
                let atom_phase = Complex64::from_polar(1.0, -p.tau * p.f * (a as f64 - b as f64));
                let expected = rho.block(a, b).free_evolve(p.f, p.tau).scale(atom_phase);
                let got = out.block(a, b);
                assert!(linalg::max_abs(&(got.coeffs() - expected.coeffs())) < 1e-12);
            }
        }
    }
}
