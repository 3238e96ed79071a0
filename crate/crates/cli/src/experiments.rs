//! Dispatch from a [`RunConfig`] to the library.

use stark_walk::channel::DeformedChannel;
use stark_walk::fcs::{position_cgf, run_energy_fcs, run_position_fcs, ReservoirConfig};
use stark_walk::random::seeded_joint_state;
use stark_walk::single_atom::{position_expectation, position_expectation_bound, propagate_oracle};
use stark_walk::statistics::{rate_function, rate_function_numeric, sample_walk, walk_pmf_exact};
use stark_walk::tolerances::WINDOW_MARGIN;
use stark_walk::verify::run_all;
use stark_walk::{BesselTable, LatticeWindow, ParticleOperator, Tolerances};

use crate::config::{Experiment, RunConfig};
use crate::table::ResultTable;

/// Largest `n` for which `walk` also tabulates the exact law.
const EXACT_WALK_LIMIT: usize = 50_000;

pub struct Outcome {
    pub table: ResultTable,
    /// False when `verify-all` saw a failing check.
    pub success: bool,
}

fn context(cfg: &RunConfig) -> impl Fn(stark_walk::Error) -> String + '_ {
    move |e| format!("{}: {e}", cfg.experiment.name())
}

pub fn run_experiment(cfg: &RunConfig) -> Result<Outcome, String> {
    let mut success = true;
    let mut table = match cfg.experiment {
        Experiment::Spectrum => spectrum(cfg)?,
        Experiment::SingleAtom => single_atom(cfg)?,
        Experiment::ChannelEvolve => channel_evolve(cfg)?,
        Experiment::Walk => walk(cfg)?,
        Experiment::Rate => rate(cfg)?,
        Experiment::FcsEnergy => fcs_energy(cfg)?,
        Experiment::FcsPosition => fcs_position(cfg)?,
        Experiment::VerifyAll => {
            let (t, ok) = verify_all(cfg);
            success = ok;
            t
        }
    };
    stamp(&mut table, cfg);
    Ok(Outcome { table, success })
}

fn stamp(table: &mut ResultTable, cfg: &RunConfig) {
    let p = &cfg.params;
    table.meta("experiment", cfg.experiment.name());
    table.meta("version", env!("CARGO_PKG_VERSION"));
    table.meta("E", p.e);
    table.meta("F", p.f);
    table.meta("lambda", p.lambda);
    table.meta("tau", p.tau);
    table.meta("beta", p.beta);
    table.meta("seed", cfg.seed);
    table.meta(
        "tolerances",
        serde_json::to_string(&Tolerances::DEFAULT).expect("tolerances serialize"),
    );
    let optional: [(&str, Option<String>); 9] = [
        ("n", cfg.n.map(|v| v.to_string())),
        ("m", cfg.m.map(|v| v.to_string())),
        ("trials", cfg.trials.map(|v| v.to_string())),
        ("window", cfg.window.map(|v| v.to_string())),
        ("alpha", cfg.alpha.map(|v| v.to_string())),
        ("eta", cfg.eta.map(|v| v.to_string())),
        ("points", cfg.points.map(|v| v.to_string())),
        ("t_max", cfg.t_max.map(|v| v.to_string())),
        ("steps", cfg.steps.map(|v| v.to_string())),
    ];
    for (k, v) in optional {
        if let Some(v) = v {
            table.meta(k, v);
        }
    }
}

fn spectrum(cfg: &RunConfig) -> Result<ResultTable, String> {
    let p = &cfg.params;
    let table = BesselTable::for_force(p.f).map_err(context(cfg))?;
    let window = LatticeWindow::centered(cfg.window.unwrap_or(21)).map_err(context(cfg))?;
    let r = table.range() as i64;
    let width = (-r..=r).map(|nu| (nu * nu) as f64 * table.get(nu).powi(2)).sum::<f64>().sqrt();
    let mut out = ResultTable::new(&["k", "energy", "localization"]);
    for k in window.ks() {
        out.push(vec![k as f64, 2.0 - p.f * k as f64, width]);
    }
    out.meta("bessel_range", table.range());
    out.meta("bessel_tail_mass", format!("{:e}", table.tail_mass()));
    Ok(out)
}

fn single_atom(cfg: &RunConfig) -> Result<ResultTable, String> {
    let p = &cfg.params;
    let window = LatticeWindow::centered(cfg.window.unwrap_or(24)).map_err(context(cfg))?;
    let state = seeded_joint_state(window, 2, cfg.seed);
    let t_max = cfg.t_max.unwrap_or(50.0 * p.tau);
    let steps = cfg.steps.unwrap_or(200).max(1);
    let bound = position_expectation_bound(p);
    let mut out = ResultTable::new(&["t", "x_closed", "x_oracle", "bound"]);
    for i in 0..=steps {
        let t = t_max * i as f64 / steps as f64;
        let closed = position_expectation(t, &state, p).map_err(context(cfg))?;
        let oracle = propagate_oracle(&state, t, p).map_err(context(cfg))?.position_mean(p.f);
        out.push(vec![t, closed, oracle, bound]);
    }
    out.meta("initial_position", state.position_mean(p.f));
    Ok(out)
}

fn channel_evolve(cfg: &RunConfig) -> Result<ResultTable, String> {
    let p = &cfg.params;
    let n = cfg.require_n()?;
    let size = cfg.window.unwrap_or(2 * (n + WINDOW_MARGIN as usize) + 1);
    let window = LatticeWindow::centered(size).map_err(context(cfg))?;
    let alpha = cfg.alpha.unwrap_or(0.0);
    let channel = DeformedChannel::new(p, alpha);
    let mut rho = ParticleOperator::eigenstate(window, 0).map_err(context(cfg))?;
    let mut out = ResultTable::new(&["step", "trace", "mean_k", "variance_k", "mean_x"]);
    for step in 0..=n {
        if step > 0 {
            rho = channel.apply(&rho).map_err(context(cfg))?;
        }
        let tr = rho.trace().re;
        let (mut m1, mut m2) = (0.0, 0.0);
        for (i, k) in window.ks().enumerate() {
            let w = rho.coeffs()[(i, i)].re;
            m1 += k as f64 * w;
            m2 += (k * k) as f64 * w;
        }
        let mean = m1 / tr;
        out.push(vec![step as f64, tr, mean, m2 / tr - mean * mean, rho.position_mean(p.f) / tr]);
    }
    Ok(out)
}

fn walk(cfg: &RunConfig) -> Result<ResultTable, String> {
    let p = &cfg.params;
    let n = cfg.require_n()?;
    let trials = cfg.trials.unwrap_or(0);
    let sample = sample_walk(n as u64, trials, cfg.seed, p).map_err(context(cfg))?;
    let exact = (n <= EXACT_WALK_LIMIT).then(|| walk_pmf_exact(n, p));
    let mut out = ResultTable::new(&["displacement", "count", "frequency", "exact_probability"]);
    for (&k, &c) in &sample.counts {
        let prob = exact.as_ref().map_or(f64::NAN, |law| law.prob(k));
        out.push(vec![k as f64, c as f64, c as f64 / trials as f64, prob]);
    }
    out.meta("sample_mean", sample.mean());
    out.meta("sample_variance", sample.variance());
    Ok(out)
}

fn rate(cfg: &RunConfig) -> Result<ResultTable, String> {
    let p = &cfg.params;
    let points = cfg.points.unwrap_or(201).max(2);
    let mut out = ResultTable::new(&["x", "I_closed", "I_numeric", "abs_diff"]);
    let mut worst: f64 = 0.0;
    for i in 0..points {
        let x = -0.999 + 1.998 * i as f64 / (points - 1) as f64;
        let closed = rate_function(x, p);
        let numeric = rate_function_numeric(x, p).map_err(context(cfg))?;
        worst = worst.max((closed - numeric).abs());
        out.push(vec![x, closed, numeric, (closed - numeric).abs()]);
    }
    out.meta("max_abs_diff", format!("{worst:e}"));
    Ok(out)
}

fn fcs_energy(cfg: &RunConfig) -> Result<ResultTable, String> {
    let p = &cfg.params;
    let n = cfg.require_n()?;
    let window = LatticeWindow::centered(cfg.window.unwrap_or(32)).map_err(context(cfg))?;
    let reservoir = ReservoirConfig::new(cfg.m.unwrap_or(n), n, *p, window).map_err(context(cfg))?;
    let rho = ParticleOperator::eigenstate(window, 0).map_err(context(cfg))?;
    let fcs = run_energy_fcs(&reservoir, &rho).map_err(context(cfg))?;
    let mut out = ResultTable::new(&["dS_p", "dS_env", "probability"]);
    for (sp, se, prob) in fcs.entropy_rows() {
        out.push(vec![sp, se, prob]);
    }
    out.meta("off_diagonal_mass", fcs.off_diagonal_mass().abs());
    out.meta("mean_entropy", fcs.mean_entropy());
    out.meta("mean_energy_change", fcs.mean_energy_change(p));
    Ok(out)
}

fn fcs_position(cfg: &RunConfig) -> Result<ResultTable, String> {
    let p = &cfg.params;
    let n = cfg.require_n()?;
    let table = BesselTable::for_force(p.f).map_err(context(cfg))?;
    let r = table.range() as i64;
    let window = LatticeWindow::covering(-r - 2, r + 2, &table).map_err(context(cfg))?;
    let rho = ParticleOperator::position_eigenstate(window, &table, 0).map_err(context(cfg))?;
    let fcs = run_position_fcs(n, &rho, p, &table).map_err(context(cfg))?;
    let mut out = ResultTable::new(&["dx", "probability"]);
    for (&d, &prob) in &fcs.distribution {
        out.push(vec![d as f64, prob]);
    }
    out.meta("mean", fcs.mean());
    out.meta("variance", fcs.variance());
    out.meta("pruned_mass", fcs.pruned_mass);
    if let Some(eta) = cfg.eta {
        let g = position_cgf(n, eta, &rho, p, &table).map_err(context(cfg))?;
        out.meta("cgf", g.value);
        out.meta("cgf_counting", fcs.cgf(eta));
        out.meta("cgf_limit_per_step", g.limit);
    }
    Ok(out)
}

fn verify_all(cfg: &RunConfig) -> (ResultTable, bool) {
    let outcomes = run_all(&cfg.params);
    let mut out = ResultTable::new(&["id", "passed", "measured", "tolerance"]);
    for c in &outcomes {
        out.push(vec![c.id as f64, if c.passed { 1.0 } else { 0.0 }, c.measured, c.tolerance]);
        out.meta(
            &format!("check.{:02}", c.id),
            format!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail),
        );
    }
    (out, outcomes.iter().all(|c| c.passed))
}
