use serde::{Deserialize, Serialize};

use super::BesselTable;
use crate::tolerances::WINDOW_MARGIN;
use crate::{Error, Result};

/// Finite range of Wannier–Stark indices `k_min ..= k_max` and of positions
/// `x_min ..= x_max` used for Bessel transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeWindow {
    k_min: i64,
    k_max: i64,
    x_min: i64,
    x_max: i64,
}

impl LatticeWindow {
    /// Index window with the same position range.
    pub fn new(k_min: i64, k_max: i64) -> Result<Self> {
        Self::with_positions(k_min, k_max, k_min, k_max)
    }

    pub fn with_positions(k_min: i64, k_max: i64, x_min: i64, x_max: i64) -> Result<Self> {
        if k_max < k_min || x_max < x_min {
            return Err(Error::Window {
                k_min,
                k_max,
                reason: format!("empty range (x in [{x_min}, {x_max}])"),
            });
        }
        Ok(Self {
            k_min,
            k_max,
            x_min,
            x_max,
        })
    }

    /// `size` consecutive indices, as centred on 0 as possible.
    pub fn centered(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidArgument("window size must be positive".into()));
        }
        let k_min = -((size as i64) / 2);
        Self::new(k_min, k_min + size as i64 - 1)
    }

    /// Index window `k_min ..= k_max` whose position range covers the
    /// Bessel support of every `ψ_k` in it.
    pub fn covering(k_min: i64, k_max: i64, table: &BesselTable) -> Result<Self> {
        let r = table.range() as i64;
        Self::with_positions(k_min, k_max, k_min - r, k_max + r)
    }

    /// Window for `n` interactions starting from support in `lo ..= hi`:
    /// jumps move support by at most one site per interaction, plus the
    /// fixed margin.
    pub fn for_interactions(lo: i64, hi: i64, n: usize, table: &BesselTable) -> Result<Self> {
        let pad = n as i64 + WINDOW_MARGIN;
        Self::covering(lo - pad, hi + pad, table)
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_max
    }

    pub fn x_min(&self) -> i64 {
        self.x_min
    }

    pub fn x_max(&self) -> i64 {
        self.x_max
    }

    /// Number of eigenbasis states.
    pub fn len(&self) -> usize {
        (self.k_max - self.k_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn positions(&self) -> usize {
        (self.x_max - self.x_min + 1) as usize
    }

    pub fn contains(&self, k: i64) -> bool {
        (self.k_min..=self.k_max).contains(&k)
    }

    /// Row index of `ψ_k`.
    pub fn index(&self, k: i64) -> Option<usize> {
        self.contains(k).then(|| (k - self.k_min) as usize)
    }

    /// Eigenbasis label of row `i`.
    pub fn k(&self, i: usize) -> i64 {
        self.k_min + i as i64
    }

    pub fn ks(&self) -> impl Iterator<Item = i64> {
        self.k_min..=self.k_max
    }

    pub fn xs(&self) -> impl Iterator<Item = i64> {
        self.x_min..=self.x_max
    }
}
