use num_complex::Complex64;

use super::{joint_index, AtomGibbs, JointDensityMatrix};
use crate::model::{BlochOffset, ModelParams, ParticleOperator};
use crate::Result;

/// The four particle operators in
/// `e^{−itH}(A ⊗ ρ_β)e^{itH} = 𝒜 ⊗ b*b + ℬ ⊗ b + ℬ' ⊗ b* + 𝒞 ⊗ bb*`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeisenbergComponents {
    /// `𝒜_{β,t}(A_t)`, the `|1⟩⟨1|` block.
    pub excited: ParticleOperator,
    /// `ℬ_{β,t}(A_t)`, the `|0⟩⟨1|` block.
    pub lowering: ParticleOperator,
    /// `ℬ_{β,t}(A_t*)*`, the `|1⟩⟨0|` block.
    pub raising: ParticleOperator,
    /// `𝒞_{β,t}(A_t)`, the `|0⟩⟨0|` block.
    pub ground: ParticleOperator,
}

impl HeisenbergComponents {
    pub fn reconstruct(&self) -> JointDensityMatrix {
        JointDensityMatrix::from_blocks([
            [&self.ground, &self.lowering],
            [&self.raising, &self.excited],
        ])
        .expect("components share a window")
    }

    /// Partial trace over the atom, `𝒜 + 𝒞`.
    pub fn reduced(&self) -> ParticleOperator {
        let mut out = self.excited.clone();
        *out.coeffs_mut() += self.ground.coeffs();
        out
    }
}

/// `(A T*)_{kk′} = A_{k,k′−1}`.
fn right_t_star(a: &ParticleOperator) -> ParticleOperator {
    let n = a.dim();
    let mut out = ParticleOperator::zeros(*a.window());
    for j in 1..n {
        for i in 0..n {
            out.coeffs_mut()[(i, j)] = a.coeffs()[(i, j - 1)];
        }
    }
    out
}

/// `(T* A)_{kk′} = A_{k+1,k′}`.
fn left_t_star(a: &ParticleOperator) -> ParticleOperator {
    let n = a.dim();
    let mut out = ParticleOperator::zeros(*a.window());
    for j in 0..n {
        for i in 0..n - 1 {
            out.coeffs_mut()[(i, j)] = a.coeffs()[(i + 1, j)];
        }
    }
    out
}

/// `(T A T*)_{kk′} = A_{k−1,k′−1}`.
fn conj_t(a: &ParticleOperator) -> ParticleOperator {
    let n = a.dim();
    let mut out = ParticleOperator::zeros(*a.window());
    for j in 1..n {
        for i in 1..n {
            out.coeffs_mut()[(i, j)] = a.coeffs()[(i - 1, j - 1)];
        }
    }
    out
}

/// `(T* A T)_{kk′} = A_{k+1,k′+1}`.
fn conj_t_star(a: &ParticleOperator) -> ParticleOperator {
    let n = a.dim();
    let mut out = ParticleOperator::zeros(*a.window());
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            out.coeffs_mut()[(i, j)] = a.coeffs()[(i + 1, j + 1)];
        }
    }
    out
}

fn combine(terms: &[(Complex64, &ParticleOperator)]) -> ParticleOperator {
    let mut out = ParticleOperator::zeros(*terms[0].1.window());
    for (c, op) in terms {
        *out.coeffs_mut() += op.coeffs() * *c;
    }
    out
}

/// Closed-form Heisenberg components of `A ⊗ ρ_β` after time `t`. Shifts are
/// truncated at the window edges, so `A` should be interior-supported.
pub fn heisenberg_maps(a: &ParticleOperator, t: f64, params: &ModelParams) -> HeisenbergComponents {
    let d = params.derived();
    let gibbs = AtomGibbs::new(params);
    let boltzmann = (-gibbs.beta_e).exp();
    let (flip, mix) = if d.omega0 > 0.0 {
        let s2 = (d.omega0 * t / 2.0).sin().powi(2);
        let flip = d.sin2theta * d.sin2theta * s2;
        let mix = Complex64::new(-d.cos2theta * s2, 0.5 * (d.omega0 * t).sin()) * d.sin2theta;
        (flip, mix)
    } else {
        (0.0, Complex64::new(0.0, 0.0))
    };
    let re = |x: f64| Complex64::new(x, 0.0);

    let b_map = |x: &ParticleOperator| {
        combine(&[
            (mix * gibbs.w_ground, &right_t_star(x)),
            (-mix * gibbs.w_ground * boltzmann, &left_t_star(x)),
        ])
    };

    let at = a.free_evolve(params.f, t);
    let excited = combine(&[
        (re(gibbs.w_excited * (1.0 - flip)), &at),
        (re(gibbs.w_ground * flip), &conj_t(&at)),
    ]);
    let ground = combine(&[
        (re(gibbs.w_ground * (1.0 - flip)), &at),
        (re(gibbs.w_excited * flip), &conj_t_star(&at)),
    ]);
    let lowering = b_map(&at);
    let raising = b_map(&at.adjoint()).adjoint();
    HeisenbergComponents {
        excited,
        lowering,
        raising,
        ground,
    }
}

/// `⟨X(t)⟩` from the closed Heisenberg evolution of `X`: the free Bloch
/// displacement plus the atom-dressed terms oscillating at `ω0`.
pub fn position_expectation(t: f64, initial: &JointDensityMatrix, params: &ModelParams) -> Result<f64> {
    initial.check_edges()?;
    let d = params.derived();
    let reduced = initial.partial_trace_atom();
    let mut value = reduced.position_mean(params.f) + BlochOffset::at_time(t, params.f).expectation(&reduced).re;
    if d.omega0 > 0.0 {
        let m = initial.coeffs();
        let n = initial.window().len();
        let population = initial.block(0, 0).trace().re - initial.block(1, 1).trace().re;
        // g = Tr(ρ T b*), h = Tr(ρ T* b)
        let mut g = Complex64::new(0.0, 0.0);
        let mut h = Complex64::new(0.0, 0.0);
        for i in 0..n - 1 {
            g += m[(joint_index(i, 0), joint_index(i + 1, 1))];
            h += m[(joint_index(i + 1, 1), joint_index(i, 0))];
        }
        let w2 = d.omega0 * d.omega0;
        let s2 = (d.omega0 * t / 2.0).sin().powi(2);
        let l = params.lambda;
        value += 4.0 * l * l / w2 * population * s2;
        value += 2.0 * l * (params.e - params.f) / w2 * (g + h).re * s2;
        value += (Complex64::new(0.0, -l / d.omega0) * (g - h)).re * (d.omega0 * t).sin();
    }
    Ok(value)
}

/// Uniform bound on `|⟨X(t)⟩ − ⟨X(0)⟩|` for a normalised state.
pub fn position_expectation_bound(params: &ModelParams) -> f64 {
    let d = params.derived();
    let bloch = 4.0 / params.f;
    if d.omega0 == 0.0 {
        return bloch;
    }
    let w2 = d.omega0 * d.omega0;
    let l = params.lambda.abs();
    bloch + 4.0 * l * l / w2 + 2.0 * l * ((params.e - params.f).abs() + d.omega0) / w2
}
