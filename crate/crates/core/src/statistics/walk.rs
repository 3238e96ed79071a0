use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::channel::{kraus_weights, KrausTriple};
use crate::linalg::log_sum_exp;
use crate::model::ModelParams;

/// Exact law of `S_n`, the sum of `n` i.i.d. steps in `{−1, 0, 1}` with
/// probabilities `(p₋, p₀, p₊)`. Stored as natural logarithms so that tails
/// far below the smallest normal double keep full relative accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkLaw {
    pub triple: KrausTriple,
    pub n: usize,
    /// `ln P[S_n = k]` for `k = −n ..= n`.
    pub log_pmf: Vec<f64>,
}

/// Three-term `ln(e^a + e^b + e^c)`.
#[inline]
fn lse3(a: f64, b: f64, c: f64) -> f64 {
    let m = a.max(b).max(c);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp() + (c - m).exp()).ln()
}

/// `n`-fold convolution of the step law, carried out in log space.
pub fn walk_pmf_exact(n: usize, params: &ModelParams) -> WalkLaw {
    WalkLaw::new(n, kraus_weights(params))
}

impl WalkLaw {
    pub fn new(n: usize, triple: KrausTriple) -> Self {
        let (lm, l0, lp) = (triple.p_minus.ln(), triple.p_zero.ln(), triple.p_plus.ln());
        let mut cur = vec![0.0];
        for step in 1..=n {
            // cur covers −(step−1) ..= step−1; next covers −step ..= step.
            let width = 2 * step + 1;
            let prev = &cur;
            let at = |j: isize| -> f64 {
                if j < 0 || j as usize >= prev.len() {
                    f64::NEG_INFINITY
                } else {
                    prev[j as usize]
                }
            };
            let next: Vec<f64> = (0..width as isize)
                .map(|i| {
                    // Entry i of next is k = i − step; of prev, j = k + step − 1.
                    let j = i - 1;
                    lse3(at(j - 1) + lp, at(j) + l0, at(j + 1) + lm)
                })
                .collect();
            cur = next;
        }
        Self {
            triple,
            n,
            log_pmf: cur,
        }
    }

    pub fn support(&self) -> std::ops::RangeInclusive<i64> {
        -(self.n as i64)..=self.n as i64
    }

    pub fn ln_prob(&self, k: i64) -> f64 {
        let i = k + self.n as i64;
        if i < 0 || i as usize >= self.log_pmf.len() {
            f64::NEG_INFINITY
        } else {
            self.log_pmf[i as usize]
        }
    }

    pub fn prob(&self, k: i64) -> f64 {
        self.ln_prob(k).exp()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.support().map(move |k| (k, self.prob(k)))
    }

    pub fn total(&self) -> f64 {
        log_sum_exp(&self.log_pmf).exp()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(k, p)| k as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.iter().map(|(k, p)| (k as f64 - m).powi(2) * p).sum()
    }

    /// `ln E[e^{ηS_n}]`.
    pub fn cgf(&self, eta: f64) -> f64 {
        let terms: Vec<f64> = self
            .support()
            .map(|k| self.ln_prob(k) + eta * k as f64)
            .collect();
        log_sum_exp(&terms)
    }

    /// `sup_s |F(s) − Φ((s − m)/σ)|` for the given centring and scale,
    /// checked on both sides of every jump.
    pub fn kolmogorov_distance(&self, mean: f64, std_dev: f64) -> f64 {
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        let mut cdf = 0.0;
        let mut worst: f64 = 0.0;
        for (k, p) in self.iter() {
            let phi = normal.cdf((k as f64 - mean) / std_dev);
            worst = worst.max((cdf - phi).abs());
            cdf += p;
            worst = worst.max((cdf - phi).abs());
        }
        worst
    }
}
