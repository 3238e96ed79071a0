use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::tolerances::Tolerances;
use crate::{Error, Result};

/// The five physical inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Atomic Bohr frequency `E ≥ 0`.
    pub e: f64,
    /// Static force `F > 0`.
    pub f: f64,
    /// Coupling constant `λ`.
    pub lambda: f64,
    /// Interaction time `τ > 0`.
    pub tau: f64,
    /// Inverse temperature `β ≥ 0`.
    pub beta: f64,
}

impl ModelParams {
    pub fn new(e: f64, f: f64, lambda: f64, tau: f64, beta: f64) -> Result<Self> {
        let params = Self {
            e,
            f,
            lambda,
            tau,
            beta,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name, value: f64, ok: bool, reason| {
            if value.is_finite() && ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    value,
                    reason,
                })
            }
        };
        check("E", self.e, self.e >= 0.0, "must be finite and >= 0")?;
        check(
            "F",
            self.f,
            self.f > 0.0,
            "must be finite and > 0 (the F = 0 ballistic case is not supported)",
        )?;
        check("lambda", self.lambda, true, "must be finite")?;
        check("tau", self.tau, self.tau > 0.0, "must be finite and > 0")?;
        check("beta", self.beta, self.beta >= 0.0, "must be finite and >= 0")?;
        Ok(())
    }

    pub fn derived(&self) -> DerivedParams {
        derive_params(self)
    }

    /// `βE`, the only combination of `β` and `E` entering the statistics.
    pub fn beta_e(&self) -> f64 {
        self.beta * self.e
    }
}

/// `cos θ`, `sin θ` and the double-angle values of the atom–particle mixing
/// angle. `θ` itself is never formed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingAngle {
    pub cos: f64,
    pub sin: f64,
    pub cos2: f64,
    pub sin2: f64,
}

impl MixingAngle {
    /// Half-angle values from `(cos 2θ, sin 2θ)`, with `cos θ ≥ 0`.
    ///
    /// For `cos 2θ ≥ 0` (`E ≥ F`) `cos θ = √((1 + cos 2θ)/2)` is well away from
    /// zero and `sin θ = sin 2θ / (2 cos θ)`. For `E < F` the roles swap and
    /// `sin θ` carries the sign of `λ` (`+1` when `λ = 0`).
    pub fn from_double(cos2: f64, sin2: f64) -> Self {
        if cos2 >= 0.0 {
            let cos = ((1.0 + cos2) / 2.0).sqrt();
            Self {
                cos,
                sin: sin2 / (2.0 * cos),
                cos2,
                sin2,
            }
        } else {
            let magnitude = ((1.0 - cos2) / 2.0).sqrt();
            let sin = if sin2 < 0.0 { -magnitude } else { magnitude };
            Self {
                cos: sin2 / (2.0 * sin),
                sin,
                cos2,
                sin2,
            }
        }
    }
}

/// Scalars derived from [`ModelParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// Rabi frequency `ω0 = √((E−F)² + 4λ²)`.
    pub omega0: f64,
    /// Jump probability per interaction.
    pub p: f64,
    pub cos2theta: f64,
    pub sin2theta: f64,
    /// Atomic partition function `1 + e^{−βE}`.
    pub zbeta: f64,
    pub gibbs_ground: f64,
    pub gibbs_excited: f64,
    pub bloch_freq: f64,
    /// `p = 0` because `λ = 0` or `ω0τ ∈ 2πℤ`.
    pub resonant: bool,
}

impl DerivedParams {
    pub fn mixing(&self) -> MixingAngle {
        MixingAngle::from_double(self.cos2theta, self.sin2theta)
    }
}

pub fn derive_params(raw: &ModelParams) -> DerivedParams {
    let detuning = raw.e - raw.f;
    let omega0 = detuning.hypot(2.0 * raw.lambda);
    let (cos2theta, sin2theta) = if omega0 > 0.0 {
        (detuning / omega0, 2.0 * raw.lambda / omega0)
    } else {
        (1.0, 0.0)
    };

    let turns = omega0 * raw.tau / (2.0 * PI);
    let rabi_resonance =
        turns.round() >= 1.0 && (turns - turns.round()).abs() <= Tolerances::DEFAULT.resonance;
    let resonant = raw.lambda == 0.0 || rabi_resonance;
    let p = if resonant {
        0.0
    } else {
        let s = (omega0 * raw.tau / 2.0).sin();
        (sin2theta * sin2theta * s * s).clamp(0.0, 1.0)
    };

    let be = raw.beta_e();
    let zbeta = 1.0 + (-be).exp();
    DerivedParams {
        omega0,
        p,
        cos2theta,
        sin2theta,
        zbeta,
        gibbs_ground: 1.0 / zbeta,
        gibbs_excited: 1.0 / (1.0 + be.exp()),
        bloch_freq: raw.f,
        resonant,
    }
}
