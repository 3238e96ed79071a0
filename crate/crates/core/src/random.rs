//! Random operators for tests and checks.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::CMatrix;
use crate::model::{LatticeWindow, ParticleDensityMatrix, ParticleOperator};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Complex Ginibre matrix `n × n`.
pub fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| gaussian(rng))
}

/// `G G† / Tr(G G†)` for a Ginibre `G`, a full-rank random state.
pub fn random_state_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(n, rng);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho.map(|z| z / tr.re)
}

/// Random density matrix supported on the window minus `margin` sites at each
/// edge.
pub fn random_density_matrix<R: Rng + ?Sized>(
    window: LatticeWindow,
    margin: usize,
    rng: &mut R,
) -> ParticleDensityMatrix {
    let n = window.len();
    let inner = n.saturating_sub(2 * margin).max(1);
    let block = random_state_matrix(inner, rng);
    let mut out = ParticleOperator::zeros(window);
    out.coeffs_mut()
        .view_mut((margin, margin), (inner, inner))
        .copy_from(&block);
    out
}

/// Random complex operator with entries on the same interior block.
pub fn random_operator<R: Rng + ?Sized>(
    window: LatticeWindow,
    margin: usize,
    rng: &mut R,
) -> ParticleOperator {
    let n = window.len();
    let inner = n.saturating_sub(2 * margin).max(1);
    let block = ginibre(inner, rng);
    let mut out = ParticleOperator::zeros(window);
    out.coeffs_mut()
        .view_mut((margin, margin), (inner, inner))
        .copy_from(&block);
    out
}

/// Random positive semidefinite operator (not normalised).
pub fn random_positive<R: Rng + ?Sized>(
    window: LatticeWindow,
    margin: usize,
    rng: &mut R,
) -> ParticleOperator {
    let g = random_operator(window, margin, rng);
    let m = g.coeffs() * g.coeffs().adjoint();
    ParticleOperator::from_matrix(window, m).expect("square by construction")
}

/// Random joint particle ⊗ atom state supported on `ψ_k ⊗ |a⟩` with `k` at
/// least `margin` sites from either edge.
pub fn random_joint_state<R: Rng + ?Sized>(
    window: LatticeWindow,
    margin: usize,
    rng: &mut R,
) -> crate::single_atom::JointDensityMatrix {
    let n = window.len();
    let inner = n.saturating_sub(2 * margin).max(1);
    let block = random_state_matrix(2 * inner, rng);
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    m.view_mut((2 * margin, 2 * margin), (2 * inner, 2 * inner))
        .copy_from(&block);
    crate::single_atom::JointDensityMatrix::from_matrix(window, m).expect("square by construction")
}

/// [`random_joint_state`] drawn from a ChaCha20 stream seeded with `seed`.
pub fn seeded_joint_state(
    window: LatticeWindow,
    margin: usize,
    seed: u64,
) -> crate::single_atom::JointDensityMatrix {
    use rand::SeedableRng;
    random_joint_state(window, margin, &mut rand_chacha::ChaCha20Rng::seed_from_u64(seed))
}
