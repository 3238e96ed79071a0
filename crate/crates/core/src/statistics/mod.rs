//! The classical walk `S_n` on eigenbasis indices induced by the reduced
//! dynamics on diagonal states, its transport coefficients and large
//! deviations.

mod ldp;
mod sampling;
mod walk;

pub use ldp::{
    legendre_sup, rate_function, rate_function_entropy, rate_function_numeric, scgf,
    scgf_derivatives, RateFunction,
};
pub use sampling::{sample_walk, WalkSample, TRIALS_PER_STREAM};
pub use walk::{walk_pmf_exact, WalkLaw};

use serde::{Deserialize, Serialize};

use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transport {
    /// Drift velocity `v_d = (p/τ) tanh(βE/2)`.
    pub drift: f64,
    /// Diffusion constant `D = (p/2τ)(1 − p tanh²(βE/2))`.
    pub diffusion: f64,
    /// Mobility `β sin²(λτ)/(2τ)`; set only when `E = F`.
    pub mobility: Option<f64>,
}

pub fn transport_coefficients(params: &ModelParams) -> Transport {
    let p = params.derived().p;
    let th = (params.beta_e() / 2.0).tanh();
    let tau = params.tau;
    Transport {
        drift: p / tau * th,
        diffusion: p / (2.0 * tau) * (1.0 - p * th * th),
        mobility: (params.e == params.f)
            .then(|| params.beta * (params.lambda * tau).sin().powi(2) / (2.0 * tau)),
    }
}
