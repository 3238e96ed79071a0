use nalgebra::DMatrix;

use super::KrausTriple;
use crate::{Error, Result};

/// `p_k ↦ p₊ p_{k−1} + p₀ p_k + p₋ p_{k+1}` on a window. Fails if the first
/// or last site carries mass.
pub fn master_step(pmf: &[f64], triple: &KrausTriple) -> Result<Vec<f64>> {
    let n = pmf.len();
    if n < 3 || pmf[0] != 0.0 || pmf[n - 1] != 0.0 {
        return Err(Error::Window {
            k_min: 0,
            k_max: n as i64 - 1,
            reason: "master equation needs an empty site at each edge".into(),
        });
    }
    let mut out = vec![0.0; n];
    for k in 0..n {
        let mut v = triple.p_zero * pmf[k];
        if k > 0 {
            v += triple.p_plus * pmf[k - 1];
        }
        if k + 1 < n {
            v += triple.p_minus * pmf[k + 1];
        }
        out[k] = v;
    }
    Ok(out)
}

/// Transition matrix of [`master_step`] on `size` sites (mass leaving the
/// window is lost).
pub fn master_matrix(size: usize, triple: &KrausTriple) -> DMatrix<f64> {
    DMatrix::from_fn(size, size, |r, c| {
        if r == c {
            triple.p_zero
        } else if r == c + 1 {
            triple.p_plus
        } else if c == r + 1 {
            triple.p_minus
        } else {
            0.0
        }
    })
}

/// Smallest singular value of `M − 1`. Positive means `M p = p` has no
/// nonzero solution, so there is no stationary distribution on the window.
pub fn stationarity_gap(size: usize, triple: &KrausTriple) -> f64 {
    let m = master_matrix(size, triple) - DMatrix::identity(size, size);
    m.singular_values().min()
}
