//! Integer-order Bessel functions `J_ν(2/F)` by Miller's downward recurrence.

use crate::tolerances::Tolerances;
use crate::{Error, Result};

/// `J_ν(z)` for `|ν| ≤ range` at the fixed argument `z = 2/F`.
///
/// Reading `psi(k, x)` gives the Wannier–Stark component `ψ_k(x) = J_{k−x}(2/F)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselTable {
    argument: f64,
    /// `J_0 ..= J_range`; negative orders come from parity.
    values: Vec<f64>,
    /// `2 Σ_{ν > range} J_ν²`, as seen by the recurrence.
    tail_mass: f64,
}

impl BesselTable {
    /// Table for force `f` covering `|ν| ≤ range`.
    pub fn new(f: f64, range: usize) -> Result<Self> {
        let argument = argument_for(f)?;
        let start = start_order(argument, range);
        let full = miller(argument, start);
        let tail_mass = 2.0 * full[range + 1..].iter().map(|v| v * v).sum::<f64>();
        let tolerance = Tolerances::DEFAULT.bessel_tail;
        if tail_mass > tolerance {
            return Err(Error::BesselRange {
                range,
                argument,
                tail_mass,
                tolerance,
            });
        }
        Ok(Self {
            argument,
            values: full[..=range].to_vec(),
            tail_mass,
        })
    }

    /// Table for force `f` whose range ends where `|J_ν|` drops below the
    /// negligible threshold.
    pub fn for_force(f: f64) -> Result<Self> {
        let argument = argument_for(f)?;
        let negligible = Tolerances::DEFAULT.bessel_negligible;
        let mut guess = argument.ceil() as usize + 16;
        loop {
            let start = start_order(argument, guess);
            let full = miller(argument, start);
            if let Some(last) = full.iter().rposition(|v| v.abs() >= negligible) {
                if last + 8 < start {
                    let range = last.max(1);
                    let tail_mass = 2.0 * full[range + 1..].iter().map(|v| v * v).sum::<f64>();
                    return Ok(Self {
                        argument,
                        values: full[..=range].to_vec(),
                        tail_mass,
                    });
                }
            }
            guess *= 2;
        }
    }

    pub fn argument(&self) -> f64 {
        self.argument
    }

    /// Largest order held.
    pub fn range(&self) -> usize {
        self.values.len() - 1
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// `J_ν(z)`, zero outside the table.
    #[inline]
    pub fn get(&self, nu: i64) -> f64 {
        let m = nu.unsigned_abs() as usize;
        match self.values.get(m) {
            Some(&v) if nu < 0 && m % 2 == 1 => -v,
            Some(&v) => v,
            None => 0.0,
        }
    }

    /// `ψ_k(x) = J_{k−x}(2/F)`.
    #[inline]
    pub fn psi(&self, k: i64, x: i64) -> f64 {
        self.get(k - x)
    }

    /// `J_0² + 2 Σ_{ν ≥ 1} J_ν²` over the table.
    pub fn norm_sum(&self) -> f64 {
        self.values[0] * self.values[0]
            + 2.0 * self.values[1..].iter().map(|v| v * v).sum::<f64>()
    }

    /// Non-negative orders, `J_0 ..= J_range`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Free-function form of [`BesselTable::new`].
pub fn bessel_table(f: f64, range: usize) -> Result<BesselTable> {
    BesselTable::new(f, range)
}

fn argument_for(f: f64) -> Result<f64> {
    if !(f.is_finite() && f > 0.0) {
        return Err(Error::InvalidParameter {
            name: "F",
            value: f,
            reason: "must be finite and > 0",
        });
    }
    Ok(2.0 / f)
}

fn start_order(z: f64, range: usize) -> usize {
    let top = (range as f64).max(z);
    (top + 30.0 + (40.0 * top).sqrt()).ceil() as usize
}

/// Normalised `J_0 ..= J_start` from a downward run seeded at `start`.
fn miller(z: f64, start: usize) -> Vec<f64> {
    const BIG: f64 = 1e200;
    let mut f = vec![0.0; start + 2];
    f[start] = 1e-30;
    for nu in (1..=start).rev() {
        let next = (2.0 * nu as f64 / z) * f[nu] - f[nu + 1];
        f[nu - 1] = next;
        if next.abs() > BIG {
            for v in f[nu - 1..].iter_mut() {
                *v /= BIG;
            }
        }
    }
    f.truncate(start + 1);
    let peak = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for v in f.iter_mut() {
        *v /= peak;
    }

    // Σ J_ν² = 1 fixes the magnitude, J_0 + 2 Σ J_{2k} = 1 the sign.
    let norm = f[0] * f[0] + 2.0 * f[1..].iter().map(|v| v * v).sum::<f64>();
    let even = f[0] + 2.0 * f[2..].iter().step_by(2).sum::<f64>();
    let scale = even.signum() / norm.sqrt();
    for v in f.iter_mut() {
        *v *= scale;
    }
    f
}
