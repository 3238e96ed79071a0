use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::energy::MeasurementRecord;
use crate::channel::DeformedChannel;
use crate::linalg::log_sum_exp;
use crate::model::{BandedOperator, BesselTable, LatticeWindow, ModelParams, ParticleOperator};
use crate::tolerances::{Tolerances, WINDOW_MARGIN};
use crate::{Error, Result};

/// Largest `|η·x|` allowed in an exponential weight.
const EXPONENT_GUARD: f64 = 600.0;

/// Law of `ΔX = x′ − x` for the two-time position measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionFcs {
    pub n: usize,
    pub tau: f64,
    pub records: Vec<MeasurementRecord<i64>>,
    pub distribution: BTreeMap<i64, f64>,
    /// First-measurement mass skipped as negligible.
    pub pruned_mass: f64,
}

impl PositionFcs {
    pub fn total(&self) -> f64 {
        self.distribution.values().sum()
    }

    pub fn mean(&self) -> f64 {
        self.distribution.iter().map(|(&d, &p)| d as f64 * p).sum::<f64>() / self.total()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.distribution.iter().map(|(&d, &p)| (d as f64 - m).powi(2) * p).sum::<f64>() / self.total()
    }

    /// `ln E[e^{ηΔX}]`.
    pub fn cgf(&self, eta: f64) -> f64 {
        let terms: Vec<f64> = self
            .distribution
            .iter()
            .map(|(&d, &p)| eta * d as f64 + p.ln())
            .collect();
        log_sum_exp(&terms)
    }

    /// `P[ΔX/(nτ) ∈ [lo, hi]]`.
    pub fn velocity_mass(&self, lo: f64, hi: f64) -> f64 {
        let scale = self.n as f64 * self.tau;
        self.distribution
            .iter()
            .filter(|(&d, _)| {
                let v = d as f64 / scale;
                v >= lo && v <= hi
            })
            .map(|(_, p)| p)
            .sum()
    }

    /// `(1/n) ln(P[ΔX/(nτ) ∈ −v ± δ] / P[ΔX/(nτ) ∈ v ± δ])`.
    pub fn fluctuation_ratio(&self, v: f64, delta: f64) -> f64 {
        let back = self.velocity_mass(-v - delta, -v + delta);
        let forth = self.velocity_mass(v - delta, v + delta);
        (back / forth).ln() / self.n as f64
    }
}

/// First-measurement outcomes kept after pruning, in increasing `x`.
fn first_outcomes(rho_p: &ParticleOperator, table: &BesselTable) -> Result<(Vec<(i64, f64)>, f64)> {
    rho_p.validate_state()?;
    let pmf = rho_p.position_distribution(table)?;
    let mut by_mass: Vec<(i64, f64)> = pmf.iter().filter(|&(_, q)| q > 0.0).collect();
    by_mass.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let mut pruned = 0.0;
    let mut skip = 0;
    for &(_, q) in &by_mass {
        if pruned + q > Tolerances::DEFAULT.outcome_pruning {
            break;
        }
        pruned += q;
        skip += 1;
    }
    let mut kept = by_mass.split_off(skip);
    kept.sort_by_key(|&(x, _)| x);
    Ok((kept, pruned))
}

/// Conditional law of `x′` after `n` interactions from `|x⟩⟨x|`.
fn conditional_law(x: i64, n: usize, channel: &DeformedChannel, table: &BesselTable) -> Result<Vec<(i64, f64)>> {
    let r = table.range() as i64;
    let window = LatticeWindow::for_interactions(x - r, x + r, n, table)?;
    let mut state = BandedOperator::position_eigenstate(window, table, x)?;
    for _ in 0..n {
        channel.apply_banded(&mut state)?;
    }
    let pmf = state.position_distribution(table)?;
    Ok(pmf.iter().filter(|&(_, p)| p > 0.0).collect())
}

/// Two-time measurement of `X` around `n` interactions, through the reduced
/// channel. `rho_p` is dephased in the position basis; each first outcome is
/// evolved independently.
pub fn run_position_fcs(n: usize, rho_p: &ParticleOperator, params: &ModelParams, table: &BesselTable) -> Result<PositionFcs> {
    params.validate()?;
    let (outcomes, pruned_mass) = first_outcomes(rho_p, table)?;
    let channel = DeformedChannel::new(params, 0.0);
    let laws = outcomes
        .par_iter()
        .map(|&(x, _)| conditional_law(x, n, &channel, table))
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::new();
    let mut distribution = BTreeMap::new();
    for (&(x, q), law) in outcomes.iter().zip(&laws) {
        for &(xp, p) in law {
            let rec = MeasurementRecord { first: x, second: xp, weight: q * p };
            *distribution.entry(rec.increment()).or_insert(0.0) += rec.weight;
            records.push(rec);
        }
    }
    Ok(PositionFcs {
        n,
        tau: params.tau,
        records,
        distribution,
        pruned_mass,
    })
}

/// `g_n(η) = ln E[e^{ηΔX_n}]` and its limit `ln θ(−η/βE)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionCgf {
    pub n: usize,
    pub eta: f64,
    pub value: f64,
    pub limit: f64,
}

impl PositionCgf {
    /// `|g_n/n − limit|`.
    pub fn rate_gap(&self) -> f64 {
        (self.value / self.n as f64 - self.limit).abs()
    }
}

/// `g_n(η)` without the two-time sampling:
/// `g_n = ln Tr[L̃_η^n(ρ̃) · e^{−ηX/2} U^{−n}(e^{ηX}) e^{−ηX/2}]`, where `L̃_η`
/// weights right steps by `e^{η}` and `U^{−n}` undoes `n` free evolutions.
/// Exact on the window up to the Bessel tail.
pub fn position_cgf(n: usize, eta: f64, rho_p: &ParticleOperator, params: &ModelParams, table: &BesselTable) -> Result<PositionCgf> {
    params.validate()?;
    let tilted = DeformedChannel::position_tilted(params, eta);
    let limit = tilted.trace_factor().ln();
    let (outcomes, _) = first_outcomes(rho_p, table)?;
    let (Some(&(x_lo, _)), Some(&(x_hi, _))) = (outcomes.first(), outcomes.last()) else {
        return Err(Error::InvalidArgument("initial state has no position support".into()));
    };

    let r = table.range() as i64;
    let pad = n as i64 + 3 * r + WINDOW_MARGIN;
    let window = LatticeWindow::covering(x_lo - pad, x_hi + pad, table)?;
    let reach = window.x_min().abs().max(window.x_max().abs()) as f64;
    if eta.abs() * reach > EXPONENT_GUARD {
        return Err(Error::Budget {
            what: "position exponential",
            detail: format!("|eta| * |x| = {:e} on [{}, {}]", eta.abs() * reach, window.x_min(), window.x_max()),
        });
    }

    let mut state = BandedOperator::zeros(window, 2 * table.range());
    for &(x, q) in &outcomes {
        let projector = BandedOperator::position_eigenstate(window, table, x)?;
        for d in state.offsets() {
            for (a, b) in state.diag_mut(d).iter_mut().zip(projector.diag(d)) {
                *a += b * q;
            }
        }
    }
    for _ in 0..n {
        tilted.apply_deformed_banded(&mut state)?;
    }

    let half = BandedOperator::position_exponential(window, table, -eta / 2.0);
    let mut weight = BandedOperator::position_exponential(window, table, eta);
    weight.free_evolve(params.f, -(n as f64) * params.tau);
    let dressed = half.mul(&weight).mul(&half);

    let value = state.pair(&dressed);
    Ok(PositionCgf {
        n,
        eta,
        value: value.re.ln(),
        limit,
    })
}
