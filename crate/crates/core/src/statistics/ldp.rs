use std::f64::consts::LN_2;

use crate::channel::kraus_weights;
use crate::model::ModelParams;
use crate::tolerances::Tolerances;
use crate::{Error, Result};

fn ln_cosh(y: f64) -> f64 {
    let y = y.abs();
    y + (-2.0 * y).exp().ln_1p() - LN_2
}

/// `t ln t`, zero at `t = 0`.
fn xlnx(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * t.ln()
    }
}

/// `e(η) = ln E[e^{ηY}]` for one step, with its first two derivatives:
/// `e(η) = ln[(1−p) + p cosh(βE/2 + η)/cosh(βE/2)] = ln θ(−η/βE)`.
pub fn scgf_derivatives(eta: f64, params: &ModelParams) -> (f64, f64, f64) {
    let p = params.derived().p;
    let half = params.beta_e() / 2.0;
    let a = half + eta;
    let ln_ratio = ln_cosh(a) - ln_cosh(half);
    let jump = p.ln() + ln_ratio;
    let stay = (1.0 - p).ln();
    let m = jump.max(stay);
    let e = if ln_ratio < 700.0 {
        // ln(1 + p(r − 1)), exactly zero at η = 0
        (p * ln_ratio.exp_m1()).ln_1p()
    } else {
        m + ((jump - m).exp() + (stay - m).exp()).ln()
    };
    let q = (jump - e).exp();
    let e1 = q * a.tanh();
    (e, e1, q - e1 * e1)
}

pub fn scgf(eta: f64, params: &ModelParams) -> f64 {
    scgf_derivatives(eta, params).0
}

/// `sup_η [ηx − f(η)]` for a smooth convex `f` given with its first two
/// derivatives. Newton on `f′(η) = x`, falling back to bisection on the
/// bracket whenever a step leaves it. Returns `(value, maximiser)`.
pub fn legendre_sup<F>(x: f64, f: F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> (f64, f64, f64),
{
    let tol = Tolerances::DEFAULT;
    let slope = |eta: f64| f(eta).1;
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    let mut widen = 0;
    while slope(lo) > x || slope(hi) < x {
        if slope(lo) > x {
            lo *= 2.0;
        }
        if slope(hi) < x {
            hi *= 2.0;
        }
        widen += 1;
        if widen > 60 {
            return Err(Error::NonConvergence {
                what: "Legendre bracket",
                iterations: widen,
            });
        }
    }
    let mut eta = 0.0f64.clamp(lo, hi);
    for _ in 0..tol.newton_max_iterations {
        let (_, d1, d2) = f(eta);
        let g = d1 - x;
        if g.abs() <= tol.newton_tolerance {
            return Ok((eta * x - f(eta).0, eta));
        }
        if g < 0.0 {
            lo = eta;
        } else {
            hi = eta;
        }
        if hi - lo <= 4.0 * f64::EPSILON * (1.0 + eta.abs()) {
            return Ok((eta * x - f(eta).0, eta));
        }
        let newton = eta - g / d2;
        eta = if d2 > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::NonConvergence {
        what: "Legendre transform",
        iterations: tol.newton_max_iterations,
    })
}

/// Closed-form rate function of `S_n / n`.
///
/// With `a = p/((1−p) cosh(βE/2))` and `R = √(x² + a²(1−x²))`, and for
/// `x ≥ 0`,
/// `I(x) = −x(βE/2 + ln a − ln(R+x)) + (1−x)ln(1−x) + ln(1+x) − ln(1−p) − ln(R+1)`;
/// negative `x` follows from `I(x) = −βEx + I(−x)`. The limits are
/// `I(1) = −ln p₊` and `I(−1) = −ln p₋`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFunction {
    pub params: ModelParams,
    pub p: f64,
    /// `a = p/((1−p) cosh(βE/2))`.
    pub a: f64,
    ln_a: f64,
}

impl RateFunction {
    pub fn new(params: &ModelParams) -> Self {
        let p = params.derived().p;
        let ln_a = p.ln() - (1.0 - p).ln() - ln_cosh(params.beta_e() / 2.0);
        Self {
            params: *params,
            p,
            a: ln_a.exp(),
            ln_a,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if !(-1.0..=1.0).contains(&x) {
            return f64::INFINITY;
        }
        let p = self.p;
        if p == 0.0 {
            return if x == 0.0 { 0.0 } else { f64::INFINITY };
        }
        if p == 1.0 {
            // Every step moves: a binary walk.
            let t = kraus_weights(&self.params);
            let part = |share: f64, q: f64| {
                if share == 0.0 {
                    0.0
                } else if q == 0.0 {
                    f64::INFINITY
                } else {
                    share * (share / q).ln()
                }
            };
            return part((1.0 + x) / 2.0, t.p_plus) + part((1.0 - x) / 2.0, t.p_minus);
        }
        let half = self.params.beta_e() / 2.0;
        let r = x.hypot(self.a * (1.0 - x * x).max(0.0).sqrt());
        let common = -(1.0 - p).ln() - (r + 1.0).ln();
        if x >= 0.0 {
            let drift = if x == 0.0 {
                0.0
            } else {
                -x * (half + self.ln_a - (r + x).ln())
            };
            drift + xlnx(1.0 - x) + (1.0 + x).ln() + common
        } else {
            -x * (half - self.ln_a + (r - x).ln()) + (1.0 - x).ln() + xlnx(1.0 + x) + common
        }
    }
}

pub fn rate_function(x: f64, params: &ModelParams) -> f64 {
    RateFunction::new(params).eval(x)
}

/// `sup_η [ηx − e(η)]` computed numerically, for `|x| < 1`.
pub fn rate_function_numeric(x: f64, params: &ModelParams) -> Result<f64> {
    if !(x.abs() < 1.0) {
        return Err(Error::Domain(format!("x = {x} (numeric rate needs |x| < 1)")));
    }
    if params.derived().p == 0.0 {
        return Ok(if x == 0.0 { 0.0 } else { f64::INFINITY });
    }
    legendre_sup(x, |eta| scgf_derivatives(eta, params)).map(|(v, _)| v)
}

/// Entropy rate function `φ(s) = sup_α [αs − ln θ(α)]`, computed
/// numerically in `α`. It coincides with `I(−s/βE)`.
pub fn rate_function_entropy(s: f64, params: &ModelParams) -> Result<f64> {
    let be = params.beta_e();
    if be == 0.0 || params.derived().p == 0.0 {
        return Ok(if s == 0.0 { 0.0 } else { f64::INFINITY });
    }
    if s.abs() > be {
        return Ok(f64::INFINITY);
    }
    if s.abs() == be {
        return Ok(rate_function(-s / be, params));
    }
    // ln θ(α) = e(−αβE), so d/dα = −βE e′ and d²/dα² = βE² e″.
    legendre_sup(s, |alpha| {
        let (e, e1, e2) = scgf_derivatives(-alpha * be, params);
        (e, -be * e1, be * be * e2)
    })
    .map(|(v, _)| v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::theta;
    use crate::statistics::transport_coefficients;

    fn reference() -> ModelParams {
        ModelParams::new(2.0, 1.0, 0.5, 1.0, 1.0).unwrap()
    }

    fn grid() -> Vec<f64> {
        (-999..=999).step_by(37).map(|i| i as f64 / 1000.0).chain([-0.999, 0.999]).collect()
    }

    #[test]
    fn scgf_basics() {
        let p = reference();
        let be = p.beta_e();
        let t = transport_coefficients(&p);
        assert_eq!(scgf(0.0, &p), 0.0);
        for &eta in &[-3.0, -0.4, 0.0, 0.7, 2.5] {
            assert!((scgf(-be - eta, &p) - scgf(eta, &p)).abs() < 1e-12);
            assert!((scgf(eta, &p) - theta(-eta / be, &p).ln()).abs() < 1e-14);
        }
        let h = 1e-5;
        let d1 = (scgf(h, &p) - scgf(-h, &p)) / (2.0 * h);
        let d2 = (scgf(h, &p) - 2.0 * scgf(0.0, &p) + scgf(-h, &p)) / (h * h);
        assert!((d1 - t.drift * p.tau).abs() < 1e-8);
        assert!((d2 - 2.0 * t.diffusion * p.tau).abs() < 1e-6);
        let (_, e1, e2) = scgf_derivatives(0.0, &p);
        assert!((e1 - t.drift * p.tau).abs() < 1e-15);
        assert!((e2 - 2.0 * t.diffusion * p.tau).abs() < 1e-15);
    }

    #[test]
    fn closed_form_reference_values() {
        let p = reference();
        let rf = RateFunction::new(&p);
        let t = transport_coefficients(&p);
        assert!(rf.eval(t.drift * p.tau).abs() < 1e-15);
        // mpmath: −ln θ(1/2)
        assert!((rf.eval(0.0) - 0.077_167_805_052_195_589).abs() < 1e-15);
        assert!((rf.eval(0.0) + theta(0.5, &p).ln()).abs() < 1e-15);
        let k = kraus_weights(&p);
        assert!((rf.eval(1.0) + k.p_plus.ln()).abs() < 1e-14);
        assert!((rf.eval(-1.0) + k.p_minus.ln()).abs() < 1e-14);
        assert_eq!(rf.eval(1.5), f64::INFINITY);
    }

    #[test]
    fn fluctuation_symmetry() {
        let p = reference();
        let be = p.beta_e();
        for x in grid() {
            let lhs = rate_function(x, &p) - rate_function(-x, &p);
            assert!((lhs + be * x).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn closed_form_matches_numeric() {
        for params in [
            reference(),
            ModelParams::new(0.3, 1.0, 0.8, 1.7, 2.5).unwrap(),
            ModelParams::new(2.0, 1.0, 0.5, 1.0, 0.0).unwrap(),
        ] {
            for x in grid() {
                let closed = rate_function(x, &params);
                let numeric = rate_function_numeric(x, &params).unwrap();
                assert!((closed - numeric).abs() <= 1e-8, "x={x}: {closed} vs {numeric}");
            }
        }
    }

    #[test]
    fn numeric_rate_zero_at_the_mean() {
        let p = reference();
        let v = transport_coefficients(&p).drift * p.tau;
        assert!(rate_function_numeric(v, &p).unwrap().abs() < 1e-15);
        assert!((rate_function_numeric(0.0, &p).unwrap() + theta(0.5, &p).ln()).abs() < 1e-8);
        assert!(rate_function_numeric(1.0, &p).is_err());
    }

    #[test]
    fn binary_walk_when_every_step_moves() {
        // λτ = π/2 at E = F gives p = 1.
        let params = ModelParams::new(1.0, 1.0, std::f64::consts::FRAC_PI_2, 1.0, 0.8).unwrap();
        assert!((params.derived().p - 1.0).abs() < 1e-15);
        let rf = RateFunction::new(&params);
        let v = transport_coefficients(&params).drift;
        assert!(rf.eval(v).abs() < 1e-12);
    }

    #[test]
    fn entropy_rate_function() {
        let p = reference();
        let be = p.beta_e();
        let v = transport_coefficients(&p).drift * p.tau;
        assert!(rate_function_entropy(-be * v, &p).unwrap().abs() < 1e-12);
        assert!((rate_function_entropy(0.0, &p).unwrap() + theta(0.5, &p).ln()).abs() < 1e-12);
        for i in -19..=19 {
            let s = be * i as f64 / 20.0;
            let phi = rate_function_entropy(s, &p).unwrap();
            assert!((phi - rate_function(-s / be, &p)).abs() < 1e-8, "s={s}");
            let mirror = rate_function_entropy(-s, &p).unwrap();
            assert!((phi - mirror - s).abs() < 1e-8, "s={s}");
        }
    }

    #[test]
    fn double_legendre_returns_scgf() {
        let p = reference();
        // e(η) = sup_x [ηx − I(x)] over a fine grid of x.
        let xs: Vec<f64> = (-20000..=20000).map(|i| i as f64 / 20000.0).collect();
        for &eta in &[-1.5, -0.3, 0.0, 0.4, 1.2] {
            let best = xs
                .iter()
                .map(|&x| eta * x - rate_function(x, &p))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((best - scgf(eta, &p)).abs() < 1e-6, "eta={eta}");
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]

        #[test]
        fn rate_function_invariants(
            x in -0.99f64..0.99, l in 0.05f64..1.5, beta in 0.0f64..3.0, e in 0.0f64..3.0,
        ) {
            let params = ModelParams::new(e, 1.0, l, 1.0, beta).unwrap();
            let d = params.derived();
            proptest::prop_assume!(d.p > 1e-6 && d.p < 1.0 - 1e-6);
            let rf = RateFunction::new(&params);
            let i = rf.eval(x);
            proptest::prop_assert!(i >= -1e-12);
            proptest::prop_assert!((i - rf.eval(-x) + params.beta_e() * x).abs() < 1e-9);
            // strict convexity via a second difference
            let h = 1e-3;
            proptest::prop_assert!(rf.eval(x + h) + rf.eval(x - h) - 2.0 * i > 0.0);
        }
    }
}
