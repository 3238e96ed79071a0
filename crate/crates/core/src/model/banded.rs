use num_complex::Complex64;

use super::{BesselTable, LatticeWindow, ParticleOperator, PositionPmf};
use crate::linalg::ZERO;
use crate::tolerances::Tolerances;
use crate::{Error, Result};

/// Operator stored by gauge sector: diagonal `d` holds `A_{k,k+d}` for
/// `|d| ≤ bandwidth`. The channel maps each sector into itself, so long
/// evolutions never need the full matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedOperator {
    window: LatticeWindow,
    bandwidth: usize,
    /// `diags[d + bandwidth][i] = A_{k_i, k_i + d}`; zero where `k_i + d`
    /// leaves the window.
    diags: Vec<Vec<Complex64>>,
}

impl BandedOperator {
    pub fn zeros(window: LatticeWindow, bandwidth: usize) -> Self {
        let n = window.len();
        Self {
            window,
            bandwidth,
            diags: vec![vec![ZERO; n]; 2 * bandwidth + 1],
        }
    }

    /// Band of a dense operator; entries farther from the diagonal are
    /// dropped.
    pub fn from_dense(op: &ParticleOperator, bandwidth: usize) -> Self {
        let mut out = Self::zeros(*op.window(), bandwidth);
        let n = op.dim() as i64;
        for d in -(bandwidth as i64)..=bandwidth as i64 {
            let diag = out.diag_mut(d);
            for (i, slot) in diag.iter_mut().enumerate() {
                let j = i as i64 + d;
                if (0..n).contains(&j) {
                    *slot = op.coeffs()[(i, j as usize)];
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> ParticleOperator {
        let mut op = ParticleOperator::zeros(self.window);
        let n = self.window.len() as i64;
        for d in self.offsets() {
            for (i, &v) in self.diag(d).iter().enumerate() {
                let j = i as i64 + d;
                if (0..n).contains(&j) {
                    op.coeffs_mut()[(i, j as usize)] = v;
                }
            }
        }
        op
    }

    /// `|x⟩⟨x|` with bandwidth twice the Bessel range.
    pub fn position_eigenstate(window: LatticeWindow, table: &BesselTable, x: i64) -> Result<Self> {
        let amps = ParticleOperator::position_amplitudes(&window, table, x)?;
        let b = 2 * table.range();
        let mut out = Self::zeros(window, b);
        let nz: Vec<usize> = (0..amps.len()).filter(|&i| amps[i] != 0.0).collect();
        for &i in &nz {
            for &j in &nz {
                let d = j as i64 - i as i64;
                out.diag_mut(d)[i] = Complex64::new(amps[i] * amps[j], 0.0);
            }
        }
        Ok(out)
    }

    /// `e^{cX}` restricted to the window, entries `Σ_x ψ_k(x) e^{cx} ψ_{k′}(x)`
    /// over the window's positions.
    pub fn position_exponential(window: LatticeWindow, table: &BesselTable, c: f64) -> Self {
        let r = table.range() as i64;
        let mut out = Self::zeros(window, 2 * table.range());
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
                    out.diag_mut(kp - k)[i] += Complex64::new(a * table.psi(kp, x), 0.0);
                }
            }
        }
        out
    }

    pub fn window(&self) -> &LatticeWindow {
        &self.window
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn offsets(&self) -> std::ops::RangeInclusive<i64> {
        -(self.bandwidth as i64)..=self.bandwidth as i64
    }

    pub fn diag(&self, d: i64) -> &[Complex64] {
        &self.diags[(d + self.bandwidth as i64) as usize]
    }

    pub fn diag_mut(&mut self, d: i64) -> &mut [Complex64] {
        &mut self.diags[(d + self.bandwidth as i64) as usize]
    }

    /// `A_{kk′}`, zero outside the window or band.
    pub fn get(&self, k: i64, kp: i64) -> Complex64 {
        let d = kp - k;
        match (self.window.index(k), self.window.contains(kp)) {
            (Some(i), true) if d.unsigned_abs() as usize <= self.bandwidth => self.diag(d)[i],
            _ => ZERO,
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.diag(0).iter().sum()
    }

    /// `Tr(A B)`.
    pub fn pair(&self, other: &Self) -> Complex64 {
        let n = self.window.len() as i64;
        let b = self.bandwidth.min(other.bandwidth) as i64;
        let mut acc = ZERO;
        for d in -b..=b {
            let a = self.diag(d);
            let o = other.diag(-d);
            for i in 0..n {
                let j = i + d;
                if (0..n).contains(&j) {
                    acc += a[i as usize] * o[j as usize];
                }
            }
        }
        acc
    }

    /// Product on the window, bandwidth the sum of both.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.window.len() as i64;
        let mut out = Self::zeros(self.window, self.bandwidth + other.bandwidth);
        for d1 in self.offsets() {
            let a = self.diag(d1);
            for d2 in other.offsets() {
                let b = other.diag(d2);
                let target = &mut out.diags[(d1 + d2 + (out.bandwidth as i64)) as usize];
                for i in 0..n {
                    let j = i + d1;
                    if (0..n).contains(&j) && (0..n).contains(&(j + d2)) {
                        target[i as usize] += a[i as usize] * b[j as usize];
                    }
                }
            }
        }
        out
    }

    /// `e^{−itH_p} A e^{itH_p}`: sector `d` picks up `e^{−itFd}`.
    pub fn free_evolve(&mut self, f: f64, t: f64) {
        for d in self.offsets() {
            let phase = Complex64::from_polar(1.0, -t * f * d as f64);
            for v in self.diag_mut(d) {
                *v *= phase;
            }
        }
    }

    /// Smallest and largest row touched by an entry above `tol`.
    pub fn support(&self, tol: f64) -> Option<(i64, i64)> {
        let mut lo: Option<i64> = None;
        let mut hi: Option<i64> = None;
        for d in self.offsets() {
            for (i, v) in self.diag(d).iter().enumerate() {
                if v.norm() > tol {
                    let k = self.window.k(i);
                    let (a, b) = (k.min(k + d), k.max(k + d));
                    lo = Some(lo.map_or(a, |l| l.min(a)));
                    hi = Some(hi.map_or(b, |h| h.max(b)));
                }
            }
        }
        lo.zip(hi)
    }

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

    /// As [`ParticleOperator::position_distribution`].
    pub fn position_distribution(&self, table: &BesselTable) -> Result<PositionPmf> {
        let w = self.window;
        let r = table.range() as i64;
        let b = self.bandwidth as i64;
        let mut probs = Vec::with_capacity(w.positions());
        for x in w.xs() {
            let lo = (x - r).max(w.k_min());
            let hi = (x + r).min(w.k_max());
            let mut acc = ZERO;
            for k in lo..=hi {
                let a = table.psi(k, x);
                if a == 0.0 {
                    continue;
                }
                let i = (k - w.k_min()) as usize;
                let dlo = (lo - k).max(-b);
                let dhi = (hi - k).min(b);
                let mut row = ZERO;
                for d in dlo..=dhi {
                    row += self.diag(d)[i] * table.psi(k + d, x);
                }
                acc += row * a;
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::random::random_operator;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn window() -> (BesselTable, LatticeWindow) {
        let table = BesselTable::for_force(1.5).unwrap();
        let w = LatticeWindow::covering(-12, 12, &table).unwrap();
        (table, w)
    }

    #[test]
    fn dense_round_trip() {
        let (_, w) = window();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let dense = random_operator(w, 0, &mut rng);
        let back = BandedOperator::from_dense(&dense, w.len()).to_dense();
        assert_eq!(back, dense);
    }

    #[test]
    fn products_and_pairings_match_dense() {
        let (_, w) = window();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let a = BandedOperator::from_dense(&random_operator(w, 0, &mut rng), 3);
        let b = BandedOperator::from_dense(&random_operator(w, 0, &mut rng), 5);
        let (da, db) = (a.to_dense(), b.to_dense());
        let prod = a.mul(&b).to_dense();
        assert!(linalg::max_abs(&(prod.coeffs() - da.coeffs() * db.coeffs())) < 1e-12);
        assert!((a.pair(&b) - da.pair(&db)).norm() < 1e-12);
    }

    #[test]
    fn free_evolution_matches_dense() {
        let (_, w) = window();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let dense = random_operator(w, 0, &mut rng);
        let mut banded = BandedOperator::from_dense(&dense, w.len());
        banded.free_evolve(1.5, 0.77);
        let expected = dense.free_evolve(1.5, 0.77);
        assert!(linalg::max_abs(&(banded.to_dense().coeffs() - expected.coeffs())) < 1e-13);
    }

    #[test]
    fn position_data_match_dense() {
        let table = BesselTable::for_force(1.5).unwrap();
        let w = LatticeWindow::covering(-40, 40, &table).unwrap();
        let banded = BandedOperator::position_eigenstate(w, &table, 1).unwrap();
        let dense = ParticleOperator::position_eigenstate(w, &table, 1).unwrap();
        assert!(linalg::max_abs(&(banded.to_dense().coeffs() - dense.coeffs())) < 1e-15);
        let pb = banded.position_distribution(&table).unwrap();
        let pd = dense.position_distribution(&table).unwrap();
        for (a, b) in pb.probs.iter().zip(&pd.probs) {
            assert!((a - b).abs() < 1e-14);
        }
        let eb = BandedOperator::position_exponential(w, &table, 0.3).to_dense();
        let ed = ParticleOperator::position_exponential(w, &table, 0.3);
        assert!(linalg::max_abs(&(eb.coeffs() - ed.coeffs())) < 1e-12);
    }
}
