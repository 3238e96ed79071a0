use num_complex::Complex64;

use super::{ModelParams, ParticleOperator};

/// The Bloch displacement `B_t = (4/F) sin(tF/2) sin(ξ + tF/2)`, a
/// trigonometric polynomial in the quasi-momentum `ξ`:
/// `B_t = c e^{iξ} + c̄ e^{−iξ}`.
///
/// In the eigenbasis `e^{iξ}` acts as `T*`, so `B_t = c T* + c̄ T` with
/// entries `(k, k+1) = c` and `(k+1, k) = c̄`. Free evolution shifts the mean
/// position by `Tr(B_t ρ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochOffset {
    pub time: f64,
    pub force: f64,
    /// Coefficient `c` of `e^{iξ}`.
    pub coefficient: Complex64,
}

impl BlochOffset {
    pub fn at_time(t: f64, f: f64) -> Self {
        let half = t * f / 2.0;
        let amplitude = 4.0 / f * half.sin();
        // A e^{iφ} / (2i)
        let coefficient = Complex64::from_polar(amplitude, half) / Complex64::new(0.0, 2.0);
        Self {
            time: t,
            force: f,
            coefficient,
        }
    }

    /// Coefficient of `e^{−iξ}`.
    pub fn conjugate_coefficient(&self) -> Complex64 {
        self.coefficient.conj()
    }

    /// `B_t(ξ)`.
    pub fn eval(&self, xi: f64) -> f64 {
        2.0 * (self.coefficient * Complex64::from_polar(1.0, xi)).re
    }

    /// `sup_ξ |B_t(ξ)| = 2|c|`.
    pub fn operator_norm(&self) -> f64 {
        2.0 * self.coefficient.norm()
    }

    /// `Tr(B_t A)`.
    pub fn expectation(&self, op: &ParticleOperator) -> Complex64 {
        let m = op.coeffs();
        let n = op.dim();
        let c = self.coefficient;
        (0..n.saturating_sub(1))
            .map(|i| c * m[(i + 1, i)] + c.conj() * m[(i, i + 1)])
            .sum()
    }

    /// `B_t` as a matrix on the window of `like`.
    pub fn to_operator(&self, like: &ParticleOperator) -> ParticleOperator {
        let mut out = ParticleOperator::zeros(*like.window());
        let n = out.dim();
        for i in 0..n.saturating_sub(1) {
            out.coeffs_mut()[(i, i + 1)] = self.coefficient;
            out.coeffs_mut()[(i + 1, i)] = self.coefficient.conj();
        }
        out
    }
}

/// `B_n` after `n` interactions, i.e. at time `nτ`.
pub fn bloch_offset(n: u64, params: &ModelParams) -> BlochOffset {
    BlochOffset::at_time(n as f64 * params.tau, params.f)
}
