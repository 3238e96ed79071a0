use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{kraus_weights, KrausTriple};
use crate::model::ModelParams;
use crate::{Error, Result};

/// Trials drawn from one ChaCha20 stream. Stream `b` of seed `s` produces
/// trials `b·1024 ..`, independent of the number of threads.
pub const TRIALS_PER_STREAM: usize = 1024;

/// Empirical law of `S_n` over independent trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkSample {
    pub n: u64,
    pub trials: u64,
    pub seed: u64,
    /// Exact integer sums, so the reduction is order independent.
    pub sum: i128,
    pub sum_sq: i128,
    pub counts: BTreeMap<i64, u64>,
}

impl WalkSample {
    pub fn mean(&self) -> f64 {
        self.sum as f64 / self.trials as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.trials < 2 {
            return 0.0;
        }
        let t = self.trials as f64;
        let m = self.sum as f64 / t;
        (self.sum_sq as f64 - t * m * m) / (t - 1.0)
    }
}

/// One draw of `S_n`: the number of moves is `Bin(n, p)` and each move goes
/// right with probability `p₊/p`, so `S_n = 2·Bin(moves, p₊/p) − moves`.
fn draw<R: Rng>(n: u64, triple: &KrausTriple, moves: &Option<Binomial>, rng: &mut R) -> i64 {
    let Some(moves) = moves else { return 0 };
    let m = moves.sample(rng);
    if m == 0 {
        return 0;
    }
    let right_share = triple.p_plus / triple.p();
    let right = Binomial::new(m, right_share).expect("probability in [0, 1]").sample(rng);
    debug_assert!(m <= n);
    2 * right as i64 - m as i64
}

/// `trials` independent copies of `S_n`, reproducible from `seed`.
pub fn sample_walk(n: u64, trials: u64, seed: u64, params: &ModelParams) -> Result<WalkSample> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let triple = kraus_weights(params);
    let p = triple.p();
    let moves = (p > 0.0).then(|| Binomial::new(n, p.min(1.0)).expect("probability in [0, 1]"));
    let streams = trials.div_ceil(TRIALS_PER_STREAM as u64);

    let blocks: Vec<(i128, i128, BTreeMap<i64, u64>)> = (0..streams)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let start = b * TRIALS_PER_STREAM as u64;
            let count = (trials - start).min(TRIALS_PER_STREAM as u64);
            let mut sum = 0i128;
            let mut sum_sq = 0i128;
            let mut counts = BTreeMap::new();
            for _ in 0..count {
                let s = draw(n, &triple, &moves, &mut rng);
                sum += s as i128;
                sum_sq += (s as i128) * (s as i128);
                *counts.entry(s).or_insert(0) += 1;
            }
            (sum, sum_sq, counts)
        })
        .collect();

    let mut out = WalkSample {
        n,
        trials,
        seed,
        sum: 0,
        sum_sq: 0,
        counts: BTreeMap::new(),
    };
    for (sum, sum_sq, counts) in blocks {
        out.sum += sum;
        out.sum_sq += sum_sq;
        for (k, c) in counts {
            *out.counts.entry(k).or_insert(0) += c;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statistics::transport_coefficients;

    #[test]
    fn identical_seeds_give_identical_samples() {
        let params = ModelParams::new(2.0, 1.0, 0.5, 1.0, 1.0).unwrap();
        let a = sample_walk(300, 5000, 7, &params).unwrap();
        let b = sample_walk(300, 5000, 7, &params).unwrap();
        assert_eq!(a, b);
        let c = sample_walk(300, 5000, 8, &params).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_trials_is_an_error() {
        let params = ModelParams::new(2.0, 1.0, 0.5, 1.0, 1.0).unwrap();
        assert!(matches!(sample_walk(10, 0, 1, &params), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn no_jumps_means_no_displacement() {
        let params = ModelParams::new(2.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        let s = sample_walk(1000, 3000, 3, &params).unwrap();
        assert_eq!(s.counts.len(), 1);
        assert_eq!(s.counts[&0], 3000);
    }

    #[test]
    fn mean_within_four_sigma() {
        for beta in [0.0, 1.0] {
            let params = ModelParams::new(2.0, 1.0, 0.5, 1.0, beta).unwrap();
            let t = transport_coefficients(&params);
            let (n, trials) = (2000u64, 20_000u64);
            let s = sample_walk(n, trials, 11, &params).unwrap();
            let sigma = (2.0 * t.diffusion * params.tau * n as f64 / trials as f64).sqrt();
            let expected = t.drift * params.tau * n as f64;
            assert!((s.mean() - expected).abs() <= 4.0 * sigma, "beta={beta}");
        }
    }

    #[test]
    fn counts_add_up() {
        let params = ModelParams::new(2.0, 1.0, 0.5, 1.0, 1.0).unwrap();
        let s = sample_walk(50, 3001, 2, &params).unwrap();
        assert_eq!(s.counts.values().sum::<u64>(), 3001);
        assert!(s.counts.keys().all(|k| k.abs() <= 50));
    }
}
