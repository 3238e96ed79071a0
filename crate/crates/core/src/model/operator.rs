use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BesselTable, LatticeWindow, ModelParams};
use crate::linalg::{self, CMatrix, ONE, ZERO};
use crate::tolerances::Tolerances;
use crate::{Error, Result};

/// Particle operator in the Wannier–Stark eigenbasis of a window:
/// `A = Σ A_{kk′} |ψ_k⟩⟨ψ_{k′}|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleOperator {
    window: LatticeWindow,
    coeffs: CMatrix,
}

/// A particle state. The invariants (Hermitian, positive, unit trace) are
/// checked on demand with [`ParticleOperator::validate_state`].
pub type ParticleDensityMatrix = ParticleOperator;

impl ParticleOperator {
    pub fn zeros(window: LatticeWindow) -> Self {
        let n = window.len();
        Self {
            window,
            coeffs: CMatrix::zeros(n, n),
        }
    }

    pub fn identity(window: LatticeWindow) -> Self {
        let n = window.len();
        Self {
            window,
            coeffs: CMatrix::identity(n, n),
        }
    }

    pub fn from_matrix(window: LatticeWindow, coeffs: CMatrix) -> Result<Self> {
        let n = window.len();
        if coeffs.nrows() != n || coeffs.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: coeffs.nrows().max(coeffs.ncols()),
            });
        }
        Ok(Self { window, coeffs })
    }

    /// `|ψ_k⟩⟨ψ_{k′}|`.
    pub fn coherence(window: LatticeWindow, k: i64, kp: i64) -> Result<Self> {
        let (i, j) = match (window.index(k), window.index(kp)) {
            (Some(i), Some(j)) => (i, j),
            _ => return Err(Error::window(&window, format!("label ({k}, {kp}) outside"))),
        };
        let mut op = Self::zeros(window);
        op.coeffs[(i, j)] = ONE;
        Ok(op)
    }

    /// `|ψ_k⟩⟨ψ_k|`.
    pub fn eigenstate(window: LatticeWindow, k: i64) -> Result<Self> {
        Self::coherence(window, k, k)
    }

    /// `|v⟩⟨v|` for eigenbasis amplitudes `v` (not normalised here).
    pub fn pure(window: LatticeWindow, amplitudes: &[Complex64]) -> Result<Self> {
        if amplitudes.len() != window.len() {
            return Err(Error::DimensionMismatch {
                expected: window.len(),
                got: amplitudes.len(),
            });
        }
        let v = nalgebra::DVector::from_column_slice(amplitudes);
        Self::from_matrix(window, &v * v.adjoint())
    }

    /// Classical mixture `Σ_k w_k |ψ_k⟩⟨ψ_k|`.
    pub fn diagonal(window: LatticeWindow, weights: &[f64]) -> Result<Self> {
        if weights.len() != window.len() {
            return Err(Error::DimensionMismatch {
                expected: window.len(),
                got: weights.len(),
            });
        }
        let mut op = Self::zeros(window);
        for (i, &w) in weights.iter().enumerate() {
            op.coeffs[(i, i)] = Complex64::new(w, 0.0);
        }
        Ok(op)
    }

    /// Eigenbasis amplitudes `⟨ψ_k|x⟩ = ψ_k(x)` of the position eigenstate
    /// `|x⟩`, dropping components below the negligible threshold. Fails if a
    /// non-negligible component falls outside the window.
    pub fn position_amplitudes(
        window: &LatticeWindow,
        table: &BesselTable,
        x: i64,
    ) -> Result<Vec<f64>> {
        let r = table.range() as i64;
        let negligible = Tolerances::DEFAULT.bessel_negligible;
        let mut amps = vec![0.0; window.len()];
        for k in x - r..=x + r {
            let value = table.psi(k, x);
            if value.abs() < negligible {
                continue;
            }
            match window.index(k) {
                Some(i) => amps[i] = value,
                None => {
                    return Err(Error::window(
                        window,
                        format!("|x = {x}> has component {value:e} on ψ_{k} outside the window"),
                    ))
                }
            }
        }
        Ok(amps)
    }

    /// `|x⟩⟨x|` in the eigenbasis.
    pub fn position_eigenstate(window: LatticeWindow, table: &BesselTable, x: i64) -> Result<Self> {
        let amps = Self::position_amplitudes(&window, table, x)?;
        let amps: Vec<Complex64> = amps.iter().map(|&a| Complex64::new(a, 0.0)).collect();
        Self::pure(window, &amps)
    }

    /// The position operator: `X_{kk} = k`, `X_{k,k±1} = −1/F`.
    pub fn position_operator(window: LatticeWindow, f: f64) -> Self {
        let mut op = Self::zeros(window);
        let n = window.len();
        let hop = Complex64::new(-1.0 / f, 0.0);
        for i in 0..n {
            op.coeffs[(i, i)] = Complex64::new(window.k(i) as f64, 0.0);
            if i + 1 < n {
                op.coeffs[(i, i + 1)] = hop;
                op.coeffs[(i + 1, i)] = hop;
            }
        }
        op
    }

    /// `e^{cX}` with entries `Σ_x ψ_k(x) e^{cx} ψ_{k′}(x)` over the window's
    /// position range.
    pub fn position_exponential(window: LatticeWindow, table: &BesselTable, c: f64) -> Self {
        let mut op = Self::zeros(window);
        let r = table.range() as i64;
        for x in window.xs() {
            let lo = (x - r).max(window.k_min());
            let hi = (x + r).min(window.k_max());
            let weight = (c * x as f64).exp();
            for k in lo..=hi {
                let a = table.psi(k, x) * weight;
                if a == 0.0 {
                    continue;
                }
                let i = (k - window.k_min()) as usize;
                for kp in lo..=hi {
                    let j = (kp - window.k_min()) as usize;
                    op.coeffs[(i, j)] += Complex64::new(a * table.psi(kp, x), 0.0);
                }
            }
        }
        op
    }

    pub fn window(&self) -> &LatticeWindow {
        &self.window
    }

    pub fn coeffs(&self) -> &CMatrix {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut CMatrix {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> CMatrix {
        self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.window.len()
    }

    /// `A_{kk′}`, zero outside the window.
    pub fn get(&self, k: i64, kp: i64) -> Complex64 {
        match (self.window.index(k), self.window.index(kp)) {
            (Some(i), Some(j)) => self.coeffs[(i, j)],
            _ => ZERO,
        }
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.coeffs)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            window: self.window,
            coeffs: self.coeffs.adjoint(),
        }
    }

    /// Entrywise conjugate. `ψ_k` is real, so this is complex conjugation in
    /// the position basis as well.
    pub fn conj(&self) -> Self {
        Self {
            window: self.window,
            coeffs: self.coeffs.map(|z| z.conj()),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            window: self.window,
            coeffs: self.coeffs.map(|z| z * s),
        }
    }

    /// `Tr(A B)`.
    pub fn pair(&self, other: &Self) -> Complex64 {
        linalg::trace_of_product(&self.coeffs, &other.coeffs)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.coeffs)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.coeffs)
    }

    pub fn trace_distance(&self, other: &Self) -> f64 {
        linalg::trace_distance(&self.coeffs, &other.coeffs)
    }

    /// Hermitian, positive and of unit trace within the default tolerances.
    pub fn validate_state(&self) -> Result<()> {
        let tol = Tolerances::DEFAULT;
        let defect = self.hermiticity_defect();
        if defect > tol.hermiticity {
            return Err(Error::Domain(format!("state with Hermiticity defect {defect:e}")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::Domain(format!("state with trace {tr}")));
        }
        let lowest = self.min_eigenvalue();
        if lowest < tol.psd {
            return Err(Error::Domain(format!("state with eigenvalue {lowest:e}")));
        }
        Ok(())
    }

    /// Smallest and largest `k` touched by an entry above `tol`.
    pub fn support(&self, tol: f64) -> Option<(i64, i64)> {
        let n = self.dim();
        let touched = |i: usize| (0..n).any(|j| self.coeffs[(i, j)].norm() > tol || self.coeffs[(j, i)].norm() > tol);
        let lo = (0..n).find(|&i| touched(i))?;
        let hi = (0..n).rev().find(|&i| touched(i))?;
        Some((self.window.k(lo), self.window.k(hi)))
    }

    /// Fails if any entry within `margin` sites of the boundary exceeds the
    /// edge-support threshold.
    pub fn check_margin(&self, margin: usize) -> Result<()> {
        if let Some((lo, hi)) = self.support(Tolerances::DEFAULT.edge_support) {
            let w = &self.window;
            if lo - w.k_min() < margin as i64 || w.k_max() - hi < margin as i64 {
                return Err(Error::window(
                    w,
                    format!("support [{lo}, {hi}] closer than {margin} sites to the edge"),
                ));
            }
        }
        Ok(())
    }

    /// Free evolution `e^{−itH_p} A e^{itH_p}`: `A_{kk′} ↦ e^{itF(k−k′)} A_{kk′}`.
    pub fn free_evolve(&self, f: f64, t: f64) -> Self {
        let n = self.dim();
        let mut out = self.coeffs.clone();
        for j in 0..n {
            for i in 0..n {
                let d = i as f64 - j as f64;
                out[(i, j)] *= Complex64::from_polar(1.0, t * f * d);
            }
        }
        Self {
            window: self.window,
            coeffs: out,
        }
    }

    /// `Tr(X A)` with the window-truncated position operator.
    pub fn position_mean(&self, f: f64) -> f64 {
        let n = self.dim();
        let mut acc = ZERO;
        for i in 0..n {
            acc += self.coeffs[(i, i)] * self.window.k(i) as f64;
            if i + 1 < n {
                acc -= (self.coeffs[(i, i + 1)] + self.coeffs[(i + 1, i)]) / f;
            }
        }
        acc.re
    }

    /// `x ↦ Σ_{kk′} ψ_k(x) A_{kk′} ψ_{k′}(x)` over the window's position
    /// range. Fails if more than the leakage budget of `Tr A` lands outside.
    pub fn position_distribution(&self, table: &BesselTable) -> Result<PositionPmf> {
        let w = self.window;
        let r = table.range() as i64;
        let mut probs = Vec::with_capacity(w.positions());
        for x in w.xs() {
            let lo = (x - r).max(w.k_min());
            let hi = (x + r).min(w.k_max());
            let mut acc = ZERO;
            for kp in lo..=hi {
                let b = table.psi(kp, x);
                if b == 0.0 {
                    continue;
                }
                let j = (kp - w.k_min()) as usize;
                let mut col = ZERO;
                for k in lo..=hi {
                    col += self.coeffs[((k - w.k_min()) as usize, j)] * table.psi(k, x);
                }
                acc += col * b;
            }
            probs.push(acc.re);
        }
        let total: f64 = probs.iter().sum();
        let leaked = (self.trace().re - total).abs();
        let budget = Tolerances::DEFAULT.leakage;
        if leaked > budget {
            return Err(Error::Leakage {
                x_min: w.x_min(),
                x_max: w.x_max(),
                leaked,
                budget,
            });
        }
        Ok(PositionPmf {
            x_min: w.x_min(),
            probs,
            leaked,
        })
    }
}

/// Free-function form of [`ParticleOperator::free_evolve`].
pub fn free_evolve(dm: &ParticleDensityMatrix, t: f64, params: &ModelParams) -> ParticleDensityMatrix {
    dm.free_evolve(params.f, t)
}

/// Free-function form of [`ParticleOperator::position_distribution`].
pub fn position_distribution(dm: &ParticleDensityMatrix, table: &BesselTable) -> Result<PositionPmf> {
    dm.position_distribution(table)
}

/// Probability mass function on consecutive integer positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionPmf {
    pub x_min: i64,
    pub probs: Vec<f64>,
    /// `|Tr ρ − Σ pmf|`.
    pub leaked: f64,
}

impl PositionPmf {
    pub fn get(&self, x: i64) -> f64 {
        usize::try_from(x - self.x_min)
            .ok()
            .and_then(|i| self.probs.get(i).copied())
            .unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.x_min + i as i64, p))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(x, p)| x as f64 * p).sum::<f64>() / self.total()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.iter().map(|(x, p)| (x as f64 - m).powi(2) * p).sum::<f64>() / self.total()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_density_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::f64::consts::PI;

    fn setup() -> (BesselTable, LatticeWindow) {
        let table = BesselTable::for_force(1.0).unwrap();
        let window = LatticeWindow::covering(-10, 10, &table).unwrap();
        (table, window)
    }

    fn interior_state(window: LatticeWindow, seed: u64) -> ParticleDensityMatrix {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        random_density_matrix(window, 4, &mut rng)
    }

    #[test]
    fn diagonal_states_are_invariant() {
        let (_, w) = setup();
        let weights: Vec<f64> = (0..w.len()).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let dm = ParticleOperator::diagonal(w, &weights).unwrap();
        assert_eq!(dm.free_evolve(1.0, 3.7), dm);
    }

    #[test]
    fn bloch_period_returns_the_state() {
        let (_, w) = setup();
        let dm = interior_state(w, 1);
        let f = 0.7;
        let back = dm.free_evolve(f, 2.0 * PI / f);
        assert!(linalg::max_abs(&(back.coeffs() - dm.coeffs())) < 1e-12);
    }

    #[test]
    fn single_coherence_picks_up_force_phase() {
        let (_, w) = setup();
        let t = 0.83;
        let op = ParticleOperator::coherence(w, 0, 1).unwrap().free_evolve(1.3, t);
        let expected = Complex64::from_polar(1.0, -t * 1.3);
        assert!((op.get(0, 1) - expected).norm() < 1e-15);
    }

    #[test]
    fn eigenstate_distribution_is_bessel_squared() {
        let (table, w) = setup();
        let pmf = ParticleOperator::eigenstate(w, 3).unwrap().position_distribution(&table).unwrap();
        for x in -20..=20 {
            assert!((pmf.get(x) - table.psi(3, x).powi(2)).abs() < 1e-15);
        }
        assert!((pmf.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ground_mean_matches_direct_sum() {
        let (table, w) = setup();
        let dm = ParticleOperator::eigenstate(w, 0).unwrap();
        let pmf = dm.position_distribution(&table).unwrap();
        let r = table.range() as i64;
        let direct: f64 = (-r..=r).map(|x| x as f64 * table.get(-x).powi(2)).sum();
        assert!((pmf.mean() - direct).abs() < 1e-14);
        assert!((dm.position_mean(1.0) - direct).abs() < 1e-14);
    }

    #[test]
    fn narrow_position_range_reports_leakage() {
        let table = BesselTable::for_force(1.0).unwrap();
        let w = LatticeWindow::new(-5, 5).unwrap();
        let dm = ParticleOperator::eigenstate(w, 5).unwrap();
        assert!(matches!(dm.position_distribution(&table), Err(Error::Leakage { .. })));
    }

    #[test]
    fn position_operator_matches_bessel_transform() {
        let (table, w) = setup();
        let dm = interior_state(w, 9);
        let pmf = dm.position_distribution(&table).unwrap();
        assert!((pmf.mean() - dm.position_mean(1.0)).abs() < 1e-12);
    }

    #[test]
    fn position_eigenstate_is_localised() {
        let table = BesselTable::for_force(1.0).unwrap();
        let w = LatticeWindow::covering(-45, 45, &table).unwrap();
        let dm = ParticleOperator::position_eigenstate(w, &table, 2).unwrap();
        let pmf = dm.position_distribution(&table).unwrap();
        assert!((pmf.get(2) - 1.0).abs() < 1e-13);
        assert!(pmf.iter().filter(|&(x, _)| x != 2).all(|(_, p)| p.abs() < 1e-13));
        let far = ParticleOperator::position_eigenstate(w, &table, 30);
        assert!(far.is_err());
    }

    #[test]
    fn exponential_of_zero_is_identity() {
        let (table, w) = setup();
        let e = ParticleOperator::position_exponential(w, &table, 0.0);
        // Rows near the edge lose Bessel tails beyond the position range only.
        assert!(linalg::max_abs(&(e.coeffs() - CMatrix::identity(w.len(), w.len()))) < 1e-13);
    }

    #[test]
    fn margin_check_flags_edge_support() {
        let (_, w) = setup();
        let edge = ParticleOperator::eigenstate(w, w.k_max()).unwrap();
        assert!(edge.check_margin(1).is_err());
        let inner = ParticleOperator::eigenstate(w, 0).unwrap();
        assert!(inner.check_margin(8).is_ok());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]

        #[test]
        fn free_evolution_is_unitary(seed in 0u64..1000, t in -20.0f64..20.0, f in 0.1f64..3.0) {
            let (_, w) = setup();
            let dm = interior_state(w, seed);
            let out = dm.free_evolve(f, t);
            proptest::prop_assert!(out.hermiticity_defect() < 1e-12);
            proptest::prop_assert!((out.trace() - dm.trace()).norm() < 1e-12);
            let a = linalg::hermitian_eigenvalues(dm.coeffs());
            let b = linalg::hermitian_eigenvalues(out.coeffs());
            for (x, y) in a.iter().zip(&b) {
                proptest::prop_assert!((x - y).abs() < 1e-12);
            }
        }

        #[test]
        fn mean_oscillation_is_bounded(seed in 0u64..1000, t in 0.0f64..30.0) {
            let table = BesselTable::for_force(1.0).unwrap();
            let w = LatticeWindow::covering(-10, 10, &table).unwrap();
            let dm = interior_state(w, seed);
            let m0 = dm.position_distribution(&table).unwrap().mean();
            let mt = dm.free_evolve(1.0, t).position_distribution(&table).unwrap().mean();
            proptest::prop_assert!((mt - m0).abs() <= 8.0);
        }
    }
}
