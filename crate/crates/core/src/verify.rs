//! End-to-end checks shared by `verify-all` and the acceptance suite. Each
//! check reports its worst measured error against a fixed tolerance.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{channel_oracle, kraus_weights, theta, DeformedChannel};
use crate::fcs::{position_cgf, run_energy_fcs, run_position_fcs, ReservoirConfig};
use crate::linalg::{self, CMatrix, ZERO};
use crate::model::{BesselTable, LatticeWindow, ModelParams, ParticleOperator};
use crate::random::{random_density_matrix, random_joint_state};
use crate::single_atom::{position_expectation, position_expectation_bound, propagate_closed, propagate_oracle};
use crate::statistics::{rate_function, rate_function_numeric, sample_walk, transport_coefficients, walk_pmf_exact};
use crate::Result;

/// Seed of every random draw made by the checks.
pub const SEED: u64 = 20_240_601;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckOutcome {
    fn new(id: u32, name: &str, measured: f64, tolerance: f64, detail: String) -> Self {
        Self {
            id,
            name: name.to_string(),
            passed: measured <= tolerance,
            measured,
            tolerance,
            detail,
        }
    }

    fn failed(id: u32, name: &str, tolerance: f64, detail: String) -> Self {
        Self {
            id,
            name: name.to_string(),
            passed: false,
            measured: f64::NAN,
            tolerance,
            detail,
        }
    }
}

pub const CHECK_COUNT: u32 = 12;

pub fn check_name(id: u32) -> &'static str {
    match id {
        1 => "channel matches partial-trace oracle",
        2 => "closed propagator matches oracle",
        3 => "theta identities",
        4 => "walk moments and Monte Carlo transport",
        5 => "central limit theorem",
        6 => "large deviations",
        7 => "fluctuation identities",
        8 => "energy counting statistics",
        9 => "position counting statistics",
        10 => "Einstein relation",
        11 => "energy bookkeeping",
        12 => "bounded single-atom motion",
        _ => "unknown check",
    }
}

fn tolerance(id: u32) -> f64 {
    match id {
        1 | 2 => 1e-10,
        3 => 1e-12,
        4 => 1e-10,
        5 | 9 => 0.02,
        6 => 0.05,
        7 => 1e-10,
        8 => 1e-8,
        10 | 11 => 1e-6,
        12 => 1e-9,
        _ => 0.0,
    }
}

/// Runs check `id` (1 to 12) for `params`. Check 10 always uses its own
/// parameters.
pub fn run_check(id: u32, params: &ModelParams) -> CheckOutcome {
    let name = check_name(id);
    let tol = tolerance(id);
    let result = match id {
        1 => channel_oracle_check(params),
        2 => propagator_check(params),
        3 => theta_check(params),
        4 => transport_check(params),
        5 => clt_check(params),
        6 => ldp_check(params),
        7 => fluctuation_check(params),
        8 => energy_fcs_check(params),
        9 => position_fcs_check(params),
        10 => einstein_check(),
        11 => bookkeeping_check(params),
        12 => bounded_motion_check(params),
        _ => return CheckOutcome::failed(id, name, tol, "no such check".into()),
    };
    match result {
        Ok(Verdict::Measured(measured, detail)) => CheckOutcome::new(id, name, measured, tol, detail),
        Ok(Verdict::Failed(measured, detail)) => CheckOutcome {
            passed: false,
            ..CheckOutcome::new(id, name, measured, tol, detail)
        },
        Err(e) => CheckOutcome::failed(id, name, tol, e.to_string()),
    }
}

pub fn run_all(params: &ModelParams) -> Vec<CheckOutcome> {
    (1..=CHECK_COUNT).map(|id| run_check(id, params)).collect()
}

enum Verdict {
    /// Passes iff the measured error is within tolerance.
    Measured(f64, String),
    /// A qualitative requirement failed; the measured error is reported.
    Failed(f64, String),
}

fn rng() -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(SEED)
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn channel_oracle_check(params: &ModelParams) -> Result<Verdict> {
    let window = LatticeWindow::centered(64)?;
    let mut rng = rng();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let rho = random_density_matrix(window, 2, &mut rng);
        for alpha in [0.0, 0.3, 1.0] {
            let fast = DeformedChannel::new(params, alpha).apply(&rho)?;
            let slow = channel_oracle(&rho, alpha, params)?;
            worst = worst.max(fast.trace_distance(&slow));
        }
    }
    Ok(Verdict::Measured(worst, "20 states, alpha in {0, 0.3, 1}, window 64, trace norm".into()))
}

fn propagator_check(params: &ModelParams) -> Result<Verdict> {
    let window = LatticeWindow::centered(32)?;
    let mut rng = rng();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let state = random_joint_state(window, 2, &mut rng);
        for t in [0.1, params.tau, 3.0 * params.tau] {
            let a = propagate_closed(&state, t, params)?;
            let b = propagate_oracle(&state, t, params)?;
            worst = worst.max(a.trace_distance(&b));
        }
    }
    Ok(Verdict::Measured(worst, "20 joint states, t in {0.1, tau, 3 tau}, trace norm".into()))
}

fn theta_check(params: &ModelParams) -> Result<Verdict> {
    let triple = kraus_weights(params);
    let be = params.beta_e();
    let mut symmetry: f64 = (theta(0.0, params) - 1.0).abs().max((theta(1.0, params) - 1.0).abs());
    let mut explicit: f64 = 0.0;
    for i in 0..=50 {
        let alpha = -2.0 + 0.1 * i as f64;
        symmetry = symmetry.max((theta(1.0 - alpha, params) - theta(alpha, params)).abs());
        let sum = (alpha * be).exp() * triple.p_minus + triple.p_zero + (-alpha * be).exp() * triple.p_plus;
        explicit = explicit.max((theta(alpha, params) - sum).abs());
    }
    let detail = format!("symmetry {symmetry:.3e}, explicit sum {explicit:.3e} (limit 1e-13)");
    if explicit > 1e-13 {
        return Ok(Verdict::Failed(symmetry.max(explicit), detail));
    }
    Ok(Verdict::Measured(symmetry, detail))
}

fn transport_check(params: &ModelParams) -> Result<Verdict> {
    let t = transport_coefficients(params);
    let mut worst: f64 = 0.0;
    for n in [1usize, 50] {
        let law = walk_pmf_exact(n, params);
        let mean = n as f64 * t.drift * params.tau;
        let var = n as f64 * 2.0 * t.diffusion * params.tau;
        worst = worst.max(if mean == 0.0 { law.mean().abs() } else { relative(law.mean(), mean) });
        worst = worst.max(relative(law.variance(), var));
    }
    let n = 10_000u64;
    let trials = 100_000u64;
    let sample = sample_walk(n, trials, SEED, params)?;
    let mean = n as f64 * t.drift * params.tau;
    let var = n as f64 * 2.0 * t.diffusion * params.tau;
    let z_mean = (sample.mean() - mean).abs() / (var / trials as f64).sqrt();
    let z_var = (sample.variance() - var).abs() / (var * (2.0 / (trials - 1) as f64).sqrt());
    let detail = format!(
        "exact moments rel {worst:.3e}; Monte Carlo n={n}, trials={trials}: mean {:.2} sigma, variance {:.2} sigma (limit 4)",
        z_mean, z_var
    );
    if z_mean > 4.0 || z_var > 4.0 {
        return Ok(Verdict::Failed(worst, detail));
    }
    Ok(Verdict::Measured(worst, detail))
}

fn clt_check(params: &ModelParams) -> Result<Verdict> {
    let n = 10_000;
    let t = transport_coefficients(params);
    let law = walk_pmf_exact(n, params);
    let mean = n as f64 * t.drift * params.tau;
    let sd = (n as f64 * 2.0 * t.diffusion * params.tau).sqrt();
    let d = law.kolmogorov_distance(mean, sd);
    Ok(Verdict::Measured(d, format!("Kolmogorov distance at n={n}")))
}

fn ldp_check(params: &ModelParams) -> Result<Verdict> {
    let v = transport_coefficients(params).drift * params.tau;
    let mut worst: f64 = 0.0;
    let mut monotone = true;
    let mut notes = Vec::new();
    let laws: Vec<_> = [200usize, 400, 800].iter().map(|&n| walk_pmf_exact(n, params)).collect();
    for x in [-0.3, 0.0, 0.3, v] {
        let target = rate_function(x, params);
        let errs: Vec<f64> = laws
            .iter()
            .map(|law| {
                let k = (x * law.n as f64).round() as i64;
                (-law.ln_prob(k) / law.n as f64 - target).abs()
            })
            .collect();
        monotone &= errs.windows(2).all(|w| w[1] < w[0]);
        worst = worst.max(errs[2]);
        notes.push(format!("x={x:.4}: {:.4}/{:.4}/{:.4}", errs[0], errs[1], errs[2]));
    }
    let mut closed_vs_numeric: f64 = 0.0;
    for i in 0..=1998 {
        let x = -0.999 + 0.001 * i as f64;
        closed_vs_numeric = closed_vs_numeric.max((rate_function(x, params) - rate_function_numeric(x, params)?).abs());
    }
    let detail = format!(
        "errors at n=200/400/800 {}; closed vs numeric {closed_vs_numeric:.3e} (limit 1e-8)",
        notes.join(", ")
    );
    if !monotone || closed_vs_numeric > 1e-8 {
        return Ok(Verdict::Failed(worst, detail));
    }
    Ok(Verdict::Measured(worst, detail))
}

/// Particle state spread over Wannier–Stark levels `-1, 0, 1`.
fn energy_initial(window: LatticeWindow) -> Result<ParticleOperator> {
    let weights: Vec<f64> = window
        .ks()
        .map(|k| match k {
            -1 => 0.25,
            0 => 0.5,
            1 => 0.25,
            _ => 0.0,
        })
        .collect();
    ParticleOperator::diagonal(window, &weights)
}

fn fluctuation_check(params: &ModelParams) -> Result<Verdict> {
    let be = params.beta_e();
    let mut walk: f64 = 0.0;
    for n in 1..=200 {
        let law = walk_pmf_exact(n, params);
        for k in 1..=n as i64 {
            let (lp, lm) = (law.ln_prob(k), law.ln_prob(-k));
            if lp.is_finite() || lm.is_finite() {
                // relative error of P[-k] against e^{-βEk} P[k]
                walk = walk.max((lm - (lp - be * k as f64)).exp_m1().abs());
            }
        }
    }
    let window = LatticeWindow::centered(32)?;
    let mut energy: f64 = 0.0;
    for n in 1..=3 {
        let cfg = ReservoirConfig::new(n, n, *params, window)?;
        energy = energy.max(run_energy_fcs(&cfg, &energy_initial(window)?)?.fluctuation_defect());
    }
    Ok(Verdict::Measured(
        walk.max(energy),
        format!("walk n<=200 rel {walk:.3e}; energy counting n<=3 rel {energy:.3e}"),
    ))
}

fn energy_fcs_check(params: &ModelParams) -> Result<Verdict> {
    let window = LatticeWindow::centered(32)?;
    let n = 3;
    let cfg = ReservoirConfig::new(n, n, *params, window)?;
    let fcs = run_energy_fcs(&cfg, &energy_initial(window)?)?;
    let off = fcs.off_diagonal_mass().abs();
    let mut worst: f64 = 0.0;
    for alpha in [-1.0, 0.0, 0.5, 1.0, 2.0] {
        worst = worst.max(relative(fcs.moment(alpha), theta(alpha, params).powi(n as i32)));
    }
    let detail = format!("off-diagonal mass {off:e}; moments rel {worst:.3e}; M=n=3, window 32");
    if off != 0.0 {
        return Ok(Verdict::Failed(worst, detail));
    }
    Ok(Verdict::Measured(worst, detail))
}

fn position_fcs_check(params: &ModelParams) -> Result<Verdict> {
    let table = BesselTable::for_force(params.f)?;
    let r = table.range() as i64;
    let window = LatticeWindow::covering(-r - 2, r + 2, &table)?;
    let rho = ParticleOperator::position_eigenstate(window, &table, 0)?;
    let n = 500;
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for eta in [-0.5, 0.5] {
        let g = position_cgf(n, eta, &rho, params, &table)?;
        worst = worst.max(g.rate_gap());
        notes.push(format!("eta={eta}: g_n/n={:.5}, limit {:.5}", g.value / n as f64, g.limit));
    }
    let fcs = run_position_fcs(n, &rho, params, &table)?;
    let (v, delta) = (0.1, 0.02);
    let ratio = fcs.fluctuation_ratio(v, delta);
    let be = params.beta_e();
    let (lo, hi) = (-be * params.tau * (v + delta), -be * params.tau * (v - delta));
    let inside = ratio >= lo && ratio <= hi;
    let speed = fcs.mean() / (n as f64 * params.tau);
    let drift = transport_coefficients(params).drift;
    let speed_ok = (speed - drift).abs() <= 0.01;
    let detail = format!(
        "n={n}; {}; FT ratio {ratio:.5} in [{lo:.5}, {hi:.5}]: {inside}; mean speed {speed:.5} vs drift {drift:.5}",
        notes.join(", ")
    );
    if !inside || !speed_ok {
        return Ok(Verdict::Failed(worst, detail));
    }
    Ok(Verdict::Measured(worst, detail))
}

/// Parameters of the Einstein-relation check: `E = F = 10⁻³`, `λ = 0.3`.
pub fn einstein_params() -> ModelParams {
    ModelParams::new(1e-3, 1e-3, 0.3, 1.0, 1.0).expect("valid parameters")
}

fn einstein_check() -> Result<Verdict> {
    let params = einstein_params();
    let t = transport_coefficients(&params);
    let mobility = t.mobility.expect("E = F");
    let ratio = t.diffusion * params.beta / mobility;
    Ok(Verdict::Measured((ratio - 1.0).abs(), format!("D beta / mu = {ratio:.10}")))
}

fn bookkeeping_check(params: &ModelParams) -> Result<Verdict> {
    let window = LatticeWindow::centered(32)?;
    let n = 3;
    let cfg = ReservoirConfig::new(n, n, *params, window)?;
    let fcs = run_energy_fcs(&cfg, &energy_initial(window)?)?;
    let per_step = fcs.mean_energy_change(params) / n as f64;
    let v = transport_coefficients(params).drift;
    let expected = (params.e - params.f) * v * params.tau;
    let drift_err = (per_step - expected).abs();

    let resonant = ModelParams { e: params.f, ..*params };
    let cfg = ReservoirConfig::new(n, n, resonant, window)?;
    let u = crate::fcs::repeated_interaction_propagator(&cfg);
    let energy = CMatrix::from_fn(cfg.dim(), cfg.dim(), |r, c| {
        if r == c {
            (cfg.particle_energy(r) + cfg.reservoir_energy(r)).into()
        } else {
            ZERO
        }
    });
    let conserved = linalg::commutator_norm(&u, &energy);
    let detail = format!(
        "E-F: per-interaction change {per_step:.10} vs {expected:.10}; E=F: [H_p + H_env, U] = {conserved:.3e} (limit 1e-12)"
    );
    if conserved > 1e-12 {
        return Ok(Verdict::Failed(drift_err, detail));
    }
    Ok(Verdict::Measured(drift_err, detail))
}

fn bounded_motion_check(params: &ModelParams) -> Result<Verdict> {
    let window = LatticeWindow::centered(24)?;
    let bound = position_expectation_bound(params);
    let mut rng = rng();
    let mut worst: f64 = 0.0;
    let mut excursion: f64 = 0.0;
    for _ in 0..5 {
        let state = random_joint_state(window, 2, &mut rng);
        let x0 = state.position_mean(params.f);
        for i in 0..=200 {
            let t = 50.0 * params.tau * i as f64 / 200.0;
            let closed = position_expectation(t, &state, params)?;
            let oracle = propagate_oracle(&state, t, params)?.position_mean(params.f);
            worst = worst.max((closed - oracle).abs());
            excursion = excursion.max((closed - x0).abs());
        }
    }
    let detail = format!("max excursion {excursion:.5} vs bound {bound:.5}; t in [0, 50 tau]");
    if excursion > bound {
        return Ok(Verdict::Failed(worst, detail));
    }
    Ok(Verdict::Measured(worst, detail))
}
