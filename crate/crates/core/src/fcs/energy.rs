use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::reservoir::{repeated_interaction_propagator, ReservoirConfig};
use crate::channel::theta;
use crate::model::{ModelParams, ParticleOperator};
use crate::single_atom::AtomGibbs;
use crate::{Error, Result};

/// One pair of outcomes of the two-time measurement with its probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord<A> {
    pub first: A,
    pub second: A,
    pub weight: f64,
}

/// Energy levels seen by the measurement: Wannier–Stark index and number of
/// excited atoms.
pub type EnergyLevel = (i64, u32);

impl MeasurementRecord<EnergyLevel> {
    /// `(Δk, Δm)`.
    pub fn increment(&self) -> (i64, i64) {
        (
            self.second.0 - self.first.0,
            self.second.1 as i64 - self.first.1 as i64,
        )
    }
}

impl MeasurementRecord<i64> {
    pub fn increment(&self) -> i64 {
        self.second - self.first
    }
}

/// Joint law of `(ΔS_p, ΔS_env)`, stored by `(Δk, Δm)`. With `β* = βE/F`
/// the entropies are `ΔS_p = −βE·Δk` and `ΔS_env = −βE·Δm`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyFcs {
    pub n: usize,
    pub beta_e: f64,
    pub records: Vec<MeasurementRecord<EnergyLevel>>,
    pub distribution: BTreeMap<(i64, i64), f64>,
}

impl EnergyFcs {
    pub fn total(&self) -> f64 {
        self.distribution.values().sum()
    }

    /// `(ΔS_p, ΔS_env, P)` rows.
    pub fn entropy_rows(&self) -> Vec<(f64, f64, f64)> {
        self.distribution
            .iter()
            .map(|(&(dk, dm), &p)| (-self.beta_e * dk as f64, -self.beta_e * dm as f64, p))
            .collect()
    }

    /// Probability outside `Δk = Δm`, summed exactly.
    pub fn off_diagonal_mass(&self) -> f64 {
        self.distribution.iter().filter(|((dk, dm), _)| dk != dm).map(|(_, p)| p).sum()
    }

    /// Law of `Δm`, keyed by `Δm`.
    pub fn entropy_law(&self) -> BTreeMap<i64, f64> {
        let mut out = BTreeMap::new();
        for (&(_, dm), &p) in &self.distribution {
            *out.entry(dm).or_insert(0.0) += p;
        }
        out
    }

    /// `E[e^{αΔS}]` with `ΔS = ΔS_env`.
    pub fn moment(&self, alpha: f64) -> f64 {
        self.entropy_law()
            .iter()
            .map(|(&dm, &p)| p * (-alpha * self.beta_e * dm as f64).exp())
            .sum()
    }

    pub fn mean_entropy(&self) -> f64 {
        self.entropy_law().iter().map(|(&dm, &p)| -self.beta_e * dm as f64 * p).sum()
    }

    /// Mean of `Δ(H_p + H_env) = −F·Δk + E·Δm`.
    pub fn mean_energy_change(&self, params: &ModelParams) -> f64 {
        self.distribution
            .iter()
            .map(|(&(dk, dm), &p)| (-params.f * dk as f64 + params.e * dm as f64) * p)
            .sum()
    }

    /// Largest relative violation of `P[ΔS = −s] = e^{s} P[ΔS = s]` over the
    /// support.
    pub fn fluctuation_defect(&self) -> f64 {
        let law = self.entropy_law();
        let mut worst: f64 = 0.0;
        for (&dm, &p) in law.range(1..) {
            let mirror = law.get(&-dm).copied().unwrap_or(0.0);
            let expected = (-self.beta_e * dm as f64).exp() * p;
            let scale = mirror.max(expected);
            if scale > 0.0 {
                worst = worst.max((mirror - expected).abs() / scale);
            }
        }
        worst
    }
}

/// Two-time measurement of `(β* H_p, −β H_env)` around `n` interactions.
///
/// `rho_p` lives on `cfg.window` and is dephased in the `H_p` eigenbasis.
/// The atoms start in the product Gibbs state; degenerate reservoir levels
/// are grouped by excitation number.
pub fn run_energy_fcs(cfg: &ReservoirConfig, rho_p: &ParticleOperator) -> Result<EnergyFcs> {
    if *rho_p.window() != cfg.window {
        return Err(Error::InvalidArgument("particle state must live on the reservoir window".into()));
    }
    rho_p.validate_state()?;
    rho_p.check_margin(cfg.n + 1)?;

    let u = repeated_interaction_propagator(cfg);
    let gibbs = AtomGibbs::new(&cfg.params);
    let q = cfg.configs();
    let config_weight = |c: usize| {
        (0..cfg.m)
            .map(|j| if c >> j & 1 == 1 { gibbs.w_excited } else { gibbs.w_ground })
            .product::<f64>()
    };
    let level = |r: usize| (cfg.window.k(r / q), cfg.excitations(r));

    let mut joint: BTreeMap<(EnergyLevel, EnergyLevel), f64> = BTreeMap::new();
    for i in 0..cfg.window.len() {
        let qk = rho_p.coeffs()[(i, i)].re;
        if qk <= 0.0 {
            continue;
        }
        for c in 0..q {
            let col = cfg.index(i, c);
            let w0 = qk * config_weight(c);
            for r in 0..cfg.dim() {
                let amp = u[(r, col)].norm_sqr();
                if amp > 0.0 {
                    *joint.entry((level(col), level(r))).or_insert(0.0) += w0 * amp;
                }
            }
        }
    }

    let records: Vec<_> = joint
        .into_iter()
        .map(|((first, second), weight)| MeasurementRecord { first, second, weight })
        .collect();
    let mut distribution = BTreeMap::new();
    for rec in &records {
        *distribution.entry(rec.increment()).or_insert(0.0) += rec.weight;
    }
    Ok(EnergyFcs {
        n: cfg.n,
        beta_e: cfg.params.beta_e(),
        records,
        distribution,
    })
}

/// `ln E[e^{αΔS_n}] = n ln θ(α)`.
pub fn energy_cgf(n: usize, alpha: f64, params: &ModelParams) -> f64 {
    n as f64 * theta(alpha, params).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LatticeWindow;
    use crate::statistics::transport_coefficients;
    use num_complex::Complex64;

    fn reference() -> ModelParams {
        ModelParams::new(2.0, 1.0, 0.5, 1.0, 1.0).unwrap()
    }

    fn run(m: usize, n: usize, p: ModelParams) -> EnergyFcs {
        let w = LatticeWindow::centered(16).unwrap();
        let cfg = ReservoirConfig::new(m, n, p, w).unwrap();
        let rho = ParticleOperator::diagonal(
            w,
            &w.ks().map(|k| if k.abs() <= 1 { 1.0 / 3.0 } else { 0.0 }).collect::<Vec<_>>(),
        )
        .unwrap();
        run_energy_fcs(&cfg, &rho).unwrap()
    }

    #[test]
    fn zero_interactions_is_a_point_mass() {
        let fcs = run(2, 0, reference());
        assert_eq!(fcs.distribution.len(), 1);
        assert!((fcs.distribution[&(0, 0)] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_support_and_normalization() {
        let fcs = run(2, 2, reference());
        assert_eq!(fcs.off_diagonal_mass(), 0.0);
        assert!((fcs.total() - 1.0).abs() < 1e-12);
        for rec in &fcs.records {
            assert!(rec.weight >= 0.0);
        }
    }

    #[test]
    fn moments_match_theta_power() {
        let p = reference();
        let fcs = run(2, 2, p);
        for alpha in [-1.0, 0.0, 0.5, 1.0, 2.0] {
            let expected = energy_cgf(2, alpha, &p).exp();
            assert!((fcs.moment(alpha) / expected - 1.0).abs() < 1e-10, "alpha {alpha}");
        }
    }

    #[test]
    fn mean_entropy_follows_drift() {
        let p = reference();
        let fcs = run(2, 2, p);
        let v = transport_coefficients(&p).drift;
        assert!((fcs.mean_entropy() + p.beta_e() * v * 2.0 * p.tau).abs() < 1e-10);
    }

    #[test]
    fn transient_fluctuation_theorem() {
        assert!(run(3, 3, reference()).fluctuation_defect() < 1e-10);
    }

    #[test]
    fn coherences_are_dephased() {
        let p = reference();
        let w = LatticeWindow::centered(16).unwrap();
        let cfg = ReservoirConfig::new(2, 2, p, w).unwrap();
        let h = Complex64::new(0.5, 0.0);
        let amps: Vec<_> = w.ks().map(|k| if k == 0 || k == 1 { h.sqrt() } else { Complex64::default() }).collect();
        let pure = ParticleOperator::pure(w, &amps).unwrap();
        let mixed = ParticleOperator::diagonal(
            w,
            &w.ks().map(|k| if k == 0 || k == 1 { 0.5 } else { 0.0 }).collect::<Vec<_>>(),
        )
        .unwrap();
        let a = run_energy_fcs(&cfg, &pure).unwrap();
        let b = run_energy_fcs(&cfg, &mixed).unwrap();
        for (k, v) in &a.distribution {
            assert!((v - b.distribution[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn idle_atoms_do_not_matter() {
        let p = reference();
        let a = run(2, 2, p);
        let b = run(3, 2, p);
        assert_eq!(a.distribution.len(), b.distribution.len());
        for (k, v) in &a.distribution {
            assert!((v - b.distribution[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn cgf_symmetry_and_variance() {
        let p = reference();
        for alpha in [-1.3, -0.2, 0.4, 0.9, 2.5] {
            assert!((energy_cgf(3, alpha, &p) - energy_cgf(3, 1.0 - alpha, &p)).abs() < 1e-12);
        }
        assert_eq!(energy_cgf(5, 0.0, &p), 0.0);
        let h = 1e-4;
        let n = 7;
        let second = (energy_cgf(n, h, &p) - 2.0 * energy_cgf(n, 0.0, &p) + energy_cgf(n, -h, &p)) / (h * h);
        let t = transport_coefficients(&p);
        let expected = p.beta_e().powi(2) * 2.0 * t.diffusion * p.tau * n as f64;
        assert!((second / expected - 1.0).abs() < 1e-5);
    }

    #[test]
    fn rejects_edge_support() {
        let p = reference();
        let w = LatticeWindow::centered(16).unwrap();
        let cfg = ReservoirConfig::new(3, 3, p, w).unwrap();
        let rho = ParticleOperator::eigenstate(w, w.k_min() + 2).unwrap();
        assert!(run_energy_fcs(&cfg, &rho).is_err());
    }
}
