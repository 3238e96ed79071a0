//! The reduced dynamics after one interaction,
//! `L_α(A) = Tr_atom[(1 ⊗ ρ_β^α) e^{−iτH}(A ⊗ ρ_β^{1−α})e^{iτH}]`,
//! in its Kraus form `L_α = L̃_α ∘ U` with
//! `L̃_α(A) = e^{αβE}p₋ T*AT + p₀ A + e^{−αβE}p₊ TAT*`.

mod master;
mod oracle;

pub use master::{master_matrix, master_step, stationarity_gap};
pub use oracle::channel_oracle;

use serde::{Deserialize, Serialize};

use crate::model::{BandedOperator, ModelParams, ParticleOperator};
use crate::{Error, Result};

/// Jump probabilities per interaction: left, stay, right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KrausTriple {
    pub p_minus: f64,
    pub p_zero: f64,
    pub p_plus: f64,
}

impl KrausTriple {
    pub fn p(&self) -> f64 {
        self.p_minus + self.p_plus
    }
}

pub fn kraus_weights(params: &ModelParams) -> KrausTriple {
    let p = params.derived().p;
    let be = params.beta_e();
    KrausTriple {
        p_minus: p / (1.0 + be.exp()),
        p_zero: 1.0 - p,
        p_plus: p / (1.0 + (-be).exp()),
    }
}

/// `cosh(a)/cosh(b)` without overflow.
pub(crate) fn cosh_ratio(a: f64, b: f64) -> f64 {
    let (a, b) = (a.abs(), b.abs());
    (a - b).exp() * (1.0 + (-2.0 * a).exp()) / (1.0 + (-2.0 * b).exp())
}

/// Spectral radius of `L_α`: `(1−p) + p cosh((½−α)βE)/cosh(βE/2)`.
pub fn theta(alpha: f64, params: &ModelParams) -> f64 {
    let p = params.derived().p;
    let be = params.beta_e();
    (1.0 - p) + p * cosh_ratio((0.5 - alpha) * be, 0.5 * be)
}

/// `L_α` for a fixed real `α`, or the position-tilted variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformedChannel {
    pub params: ModelParams,
    pub triple: KrausTriple,
    /// Deformation; for a tilted channel `−η/βE` (infinite when `βE = 0`).
    pub alpha: f64,
    /// Weight of `T*AT` (a step to the left).
    pub w_minus: f64,
    pub w_zero: f64,
    /// Weight of `TAT*` (a step to the right).
    pub w_plus: f64,
}

impl DeformedChannel {
    pub fn new(params: &ModelParams, alpha: f64) -> Self {
        let triple = kraus_weights(params);
        let be = params.beta_e();
        Self {
            params: *params,
            triple,
            alpha,
            w_minus: (alpha * be).exp() * triple.p_minus,
            w_zero: triple.p_zero,
            w_plus: (-alpha * be).exp() * triple.p_plus,
        }
    }

    /// `e^{ηX/2} L̃_0(e^{−ηX/2} · e^{−ηX/2}) e^{ηX/2}`: right steps weighted by
    /// `e^{η}`, left steps by `e^{−η}`. Equals `α = −η/βE` whenever `βE > 0`.
    pub fn position_tilted(params: &ModelParams, eta: f64) -> Self {
        let triple = kraus_weights(params);
        Self {
            params: *params,
            triple,
            alpha: -eta / params.beta_e(),
            w_minus: (-eta).exp() * triple.p_minus,
            w_zero: triple.p_zero,
            w_plus: eta.exp() * triple.p_plus,
        }
    }

    /// `Tr L̃(A) / Tr A`, equal to `θ(α)` for a plain deformation.
    pub fn trace_factor(&self) -> f64 {
        self.w_minus + self.w_zero + self.w_plus
    }

    fn check(&self, op: &ParticleOperator) -> Result<()> {
        op.check_margin(1)
    }

    /// `L̃_α(A)`. Fails if `A` touches the outermost sites.
    pub fn apply_deformed(&self, op: &ParticleOperator) -> Result<ParticleOperator> {
        self.check(op)?;
        let n = op.dim();
        let a = op.coeffs();
        let mut out = ParticleOperator::zeros(*op.window());
        let m = out.coeffs_mut();
        for j in 0..n {
            for i in 0..n {
                let mut v = a[(i, j)] * self.w_zero;
                if i + 1 < n && j + 1 < n {
                    v += a[(i + 1, j + 1)] * self.w_minus;
                }
                if i > 0 && j > 0 {
                    v += a[(i - 1, j - 1)] * self.w_plus;
                }
                m[(i, j)] = v;
            }
        }
        Ok(out)
    }

    /// `L_α(A) = L̃_α(e^{−iτH_p} A e^{iτH_p})`.
    pub fn apply(&self, op: &ParticleOperator) -> Result<ParticleOperator> {
        self.apply_deformed(&op.free_evolve(self.params.f, self.params.tau))
    }

    /// `L_α^n(A)`.
    pub fn apply_n(&self, op: &ParticleOperator, n: usize) -> Result<ParticleOperator> {
        let mut state = op.clone();
        for _ in 0..n {
            state = self.apply(&state)?;
        }
        Ok(state)
    }

    /// `L̃*_α(B) = e^{αβE}p₋ TBT* + p₀ B + e^{−αβE}p₊ T*BT`, truncated at the
    /// window edges: entries one site in from the boundary are exact.
    pub fn adjoint_apply_deformed(&self, op: &ParticleOperator) -> ParticleOperator {
        let n = op.dim();
        let b = op.coeffs();
        let mut out = ParticleOperator::zeros(*op.window());
        let m = out.coeffs_mut();
        for j in 0..n {
            for i in 0..n {
                let mut v = b[(i, j)] * self.w_zero;
                if i > 0 && j > 0 {
                    v += b[(i - 1, j - 1)] * self.w_minus;
                }
                if i + 1 < n && j + 1 < n {
                    v += b[(i + 1, j + 1)] * self.w_plus;
                }
                m[(i, j)] = v;
            }
        }
        out
    }

    /// `L*_α(B) = U*(L̃*_α(B))`, the Heisenberg-picture dual of [`apply`].
    ///
    /// [`apply`]: DeformedChannel::apply
    pub fn adjoint_apply(&self, op: &ParticleOperator) -> ParticleOperator {
        self.adjoint_apply_deformed(op).free_evolve(self.params.f, -self.params.tau)
    }

    /// In-place `L̃_α` on gauge-sector storage.
    pub fn apply_deformed_banded(&self, op: &mut BandedOperator) -> Result<()> {
        op.check_margin(1)?;
        let offsets = op.offsets();
        for d in offsets {
            let diag = op.diag_mut(d);
            let n = diag.len();
            let mut prev = diag[0];
            diag[0] = diag[0] * self.w_zero + diag.get(1).copied().unwrap_or_default() * self.w_minus;
            for i in 1..n {
                let here = diag[i];
                let next = if i + 1 < n { diag[i + 1] } else { Default::default() };
                diag[i] = prev * self.w_plus + here * self.w_zero + next * self.w_minus;
                prev = here;
            }
        }
        Ok(())
    }

    /// In-place `L_α` on gauge-sector storage.
    pub fn apply_banded(&self, op: &mut BandedOperator) -> Result<()> {
        op.free_evolve(self.params.f, self.params.tau);
        self.apply_deformed_banded(op)
    }
}

/// Complex conjugation in the position basis. `ψ_k` is real, so in the
/// eigenbasis it is entrywise conjugation.
pub fn time_reversal_conjugate(op: &ParticleOperator) -> ParticleOperator {
    op.conj()
}

/// Reject `α` that is not finite.
pub fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("alpha = {alpha} is not finite")))
    }
}
