//! One function per subcommand. Each turns a validated [`RunConfig`] into an
//! [`Outcome`]; nothing here writes to disk.

use anyhow::{Context, Result};
use serde_json::json;

use fwbesov::experiments::{
    es_norm, nonuniform_experiment, peakon_propagation, peakon_residual, spatial_derivatives,
    taylor_time_series, Check, DecayFit, NonuniformConfig, Verdict,
};
use fwbesov::littlewood_paley::{sobolev_norm, SOBOLEV_RATIO_BRACKET};
use fwbesov::solver::{
    blowup_monitor, calibrate, evolve, existence_iteration, lifespan_estimate, random_suite,
    CALIBRATION_CANDIDATES,
};
use fwbesov::{BesovParams, DyadicSystem, SolverConfig, Summability, Trajectory};

use crate::config::{Command, RunConfig};
use crate::plot::Plot;
use crate::report::{num, Outcome, Table};

/// Off-crest sample points for the traveling-wave residual.
pub const PEAKON_SAMPLES: [f64; 8] = [-10.0, -3.0, -1.0, -0.5, 0.5, 1.0, 3.0, 10.0];

/// Samples kept per trajectory in `simulate`.
const SIMULATE_SAMPLES: usize = 200;

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        Command::Simulate => simulate(cfg),
        Command::BesovNorm => besov_norm(cfg),
        Command::Iterate => iterate(cfg),
        Command::Nonuniform => nonuniform(cfg),
        Command::Peakon => peakon(cfg),
        Command::Taylor => taylor(cfg),
        Command::Blowup => blowup(cfg),
        Command::Calibrate => calibrate_cmd(cfg),
    }
}

fn params(cfg: &RunConfig) -> Result<BesovParams> {
    BesovParams::new(cfg.s, cfg.r).context("invalid `s`/`r`")
}

fn t_end(cfg: &RunConfig) -> f64 {
    cfg.t_end.expect("only iterate accepts auto")
}

fn fit_json(fit: &Option<DecayFit>) -> serde_json::Value {
    match fit {
        Some(f) => json!({
            "fitted_exponent": f.fitted_exponent,
            "intercept": f.intercept,
            "r_squared": f.r_squared,
            "n": f.ns,
            "values": f.values,
        }),
        None => serde_json::Value::Null,
    }
}

fn diagnostics_table(name: &str, traj: &Trajectory) -> Table {
    let mut t = Table::new(name, &["t", "besov_norm", "sup_abs", "min_slope", "max_abs_slope", "breaking_integral"]);
    for (i, d) in traj.diagnostics.iter().enumerate() {
        t.push(vec![
            num(traj.times[i]),
            num(d.besov_norm),
            num(d.sup_abs),
            num(d.min_slope),
            num(d.max_abs_slope),
            num(traj.breaking_integral[i]),
        ]);
    }
    t
}

fn simulate(cfg: &RunConfig) -> Result<Outcome> {
    let grid = cfg.grid();
    let u0 = cfg.initial.build(grid, cfg.extras());
    let base = SolverConfig::new(grid, cfg.dt, t_end(cfg))?.with_norm(params(cfg)?);
    let every = (base.steps().0 / SIMULATE_SAMPLES).max(1);
    let traj = evolve(&u0, &base.with_store_every(every))?;
    let last = traj.diagnostics.last().expect("initial sample");
    let mean_drift = (traj.final_state().mean() - u0.mean()).abs();

    let measurements = json!({
        "status": traj.status.as_str(),
        "final_time": traj.final_time(),
        "steps": base.steps().0,
        "dt": base.steps().1,
        "initial": traj.diagnostics[0],
        "final": last,
        "sup_besov_norm": traj.sup_besov(),
        "breaking_integral": traj.breaking_integral.last(),
        "mean_drift": mean_drift,
    });
    let verdicts = vec![
        Verdict::flag("run_completed", traj.completed()),
        Verdict::new("mean_drift", mean_drift, Check::AtMost { bound: 1e-10 }),
    ];
    let plot = Plot::new("norm_vs_time.svg", "Besov norm along the solution", "t", "norm").with(
        &format!("B^{}_{{2,{}}}", cfg.s, cfg.r),
        traj.times.iter().zip(&traj.diagnostics).map(|(t, d)| (*t, d.besov_norm)).collect(),
    );
    Ok(Outcome {
        measurements,
        fits: json!({}),
        verdicts,
        tables: vec![diagnostics_table("simulate.csv", &traj)],
        plots: vec![plot],
    })
}

fn besov_norm(cfg: &RunConfig) -> Result<Outcome> {
    let grid = cfg.grid();
    let u = cfg.initial.build(grid, cfg.extras());
    let sys = DyadicSystem::shared();
    let p = params(cfg)?;
    let blocks = sys.block_norms(&u);
    let norm = sys.besov_norm(&u, p);
    let sobolev = sobolev_norm(&u, cfg.s);
    let mut verdicts = Vec::new();
    let mut ratio = None;
    if cfg.r == Summability::Finite(2.0) && sobolev > 0.0 {
        let q = norm / sobolev;
        ratio = Some(q);
        let (lo, hi) = SOBOLEV_RATIO_BRACKET;
        verdicts.push(Verdict::new("besov_sobolev_ratio", q, Check::Within { lo, hi }));
    }
    let mut table = Table::new("blocks.csv", &["q", "block_norm"]);
    for (i, b) in blocks.iter().enumerate() {
        table.push(vec![(i as i64 - 1).to_string(), num(*b)]);
    }
    let plot = Plot::new("blocks.svg", "Dyadic block norms", "2^q", "‖Δ_q u‖")
        .log_log()
        .with("blocks", blocks.iter().enumerate().map(|(i, b)| ((i as f64 - 1.0).exp2(), *b)).collect());
    Ok(Outcome {
        measurements: json!({
            "besov_norm": norm,
            "sobolev_norm": sobolev,
            "ratio": ratio,
            "block_norms": blocks,
        }),
        fits: json!({}),
        verdicts,
        tables: vec![table],
        plots: vec![plot],
    })
}

fn iterate(cfg: &RunConfig) -> Result<Outcome> {
    let grid = cfg.grid();
    let norm = params(cfg)?;
    let lower = norm.with_s(cfg.s - 1.0);
    let u0 = cfg.initial.build(grid, cfg.extras());
    let life = lifespan_estimate(&u0, norm, cfg.c_star)?;
    let horizon = cfg.t_end.unwrap_or(0.5 * life.t);
    let solver = SolverConfig::new(grid, cfg.dt, horizon)?.with_norm(norm);
    let iterates = existence_iteration(&u0, cfg.iterations, &solver, cfg.c_star)?;
    let sys = DyadicSystem::shared();
    let sup_dist = |a: &Trajectory, b: Option<&Trajectory>| {
        (0..a.len())
            .map(|i| match b {
                Some(b) => sys.besov_norm(&(&a.states[i] - &b.states[i]), lower),
                None => sys.besov_norm(&a.states[i], lower),
            })
            .fold(0.0, f64::max)
    };
    let mut dists = vec![sup_dist(&iterates[0], None)];
    for w in iterates.windows(2) {
        dists.push(sup_dist(&w[1], Some(&w[0])));
    }
    let direct = evolve(&u0, &solver)?;
    let gap = sys.besov_norm(&(iterates.last().unwrap().final_state() - direct.final_state()), lower);
    // ratio of consecutive distances; a value below 1 at every step is strict decrease
    let worst_ratio = dists.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);

    let mut table = Table::new("iterate.csv", &["iterate", "sup_distance"]);
    for (i, d) in dists.iter().enumerate() {
        table.push(vec![(i + 1).to_string(), num(*d)]);
    }
    let plot = Plot::new("iterate.svg", "Successive iterate distances", "iterate", "sup_t distance")
        .log_y()
        .with("distance", dists.iter().enumerate().map(|(i, d)| ((i + 1) as f64, *d)).collect());
    let mut verdicts = vec![Verdict::flag(
        "all_runs_completed",
        iterates.iter().all(|t| t.completed()) && direct.completed(),
    )];
    if dists.len() > 1 {
        verdicts.push(Verdict::new("distance_ratio_max", worst_ratio, Check::LessThan { bound: 1.0 }));
    }
    verdicts.push(Verdict::new("final_gap", gap, Check::AtMost { bound: 1e-4 }));
    Ok(Outcome {
        measurements: json!({
            "lifespan": life.t,
            "norm0": life.norm0,
            "t_end": horizon,
            "distances": dists,
            "final_gap": gap,
            "statuses": iterates.iter().map(|t| t.status.as_str()).collect::<Vec<_>>(),
        }),
        fits: json!({}),
        verdicts,
        tables: vec![table],
        plots: vec![plot],
    })
}

fn nonuniform(cfg: &RunConfig) -> Result<Outcome> {
    let mut nc = NonuniformConfig::new(cfg.n_list.clone(), cfg.s);
    nc.r = cfg.r;
    nc.t_end = t_end(cfg);
    nc.dt = cfg.dt;
    nc.c_star = cfg.c_star;
    let rep = nonuniform_experiment(&nc)?;

    let mut table = Table::new(
        "nonuniform.csv",
        &["n", "init_dist", "sup_norm_u", "sup_norm_v", "err_u", "err_v", "final_dist"],
    );
    for r in &rep.rows {
        table.push(vec![
            r.n.to_string(),
            num(r.init_dist),
            num(r.sup_norm_u),
            num(r.sup_norm_v),
            num(r.err_u),
            num(r.err_v),
            num(r.final_dist),
        ]);
    }
    let series = |f: fn(&fwbesov::experiments::NonuniformRow) -> f64| {
        rep.rows.iter().map(|r| (r.n as f64, f(r))).collect::<Vec<_>>()
    };
    let plot = Plot::new("nonuniform.svg", "Non-uniform dependence sweep", "n", "distance")
        .log_log()
        .with("init_dist", series(|r| r.init_dist))
        .with("err_u", series(|r| r.err_u))
        .with("err_v", series(|r| r.err_v))
        .with("final_dist", series(|r| r.final_dist));
    Ok(Outcome {
        measurements: json!({
            "lifespan": rep.lifespan,
            "alpha": rep.alpha,
            "beta": rep.beta,
            "rows": rep.rows,
        }),
        fits: json!({
            "initial_distance": fit_json(&rep.init_fit),
            "error": fit_json(&rep.error_fit),
        }),
        verdicts: rep.verdicts,
        tables: vec![table],
        plots: vec![plot],
    })
}

fn peakon(cfg: &RunConfig) -> Result<Outcome> {
    let residual = peakon_residual(cfg.a, cfg.c, &PEAKON_SAMPLES)?;
    let run = peakon_propagation(cfg.a, cfg.c, cfg.grid(), cfg.dt, t_end(cfg))?;
    let mut table = Table::new("peakon.csv", &["t", "crest"]);
    for (t, x) in run.times.iter().zip(&run.crest) {
        table.push(vec![num(*t), num(*x)]);
    }
    let plot = Plot::new("peakon.svg", "Crest position", "t", "x").with(
        "crest",
        run.times.iter().copied().zip(run.crest.iter().copied()).collect(),
    );
    Ok(Outcome {
        measurements: json!({
            "max_residual": residual,
            "residual_samples": PEAKON_SAMPLES,
            "measured_speed": run.measured_speed,
            "expected_speed": run.expected_speed,
            "relative_error": run.relative_error,
            "status": run.status.as_str(),
        }),
        fits: json!({ "crest_speed": run.measured_speed }),
        verdicts: vec![
            Verdict::new("max_residual", residual, Check::LessThan { bound: 1e-10 }),
            Verdict::flag("run_completed", run.status == fwbesov::RunStatus::Completed),
            Verdict::new("crest_speed_relative_error", run.relative_error, Check::AtMost { bound: 0.02 }),
        ],
        tables: vec![table],
        plots: vec![plot],
    })
}

fn taylor(cfg: &RunConfig) -> Result<Outcome> {
    let grid = cfg.grid();
    let u0 = cfg.initial.build(grid, cfg.extras());
    let t = t_end(cfg);
    let series = taylor_time_series(&u0, cfg.k)?;
    let traj = evolve(&u0, &SolverConfig::new(grid, cfg.dt, t)?)?;
    let gap = series.evaluate(t).sup_distance(traj.final_state());
    let defect = series.recursion_defect();
    let derivs = spatial_derivatives(&u0, cfg.k.max(1));
    let s_values = [0.25, 0.5, 0.75];
    let es = s_values
        .iter()
        .map(|&s| es_norm(&derivs, s))
        .collect::<fwbesov::Result<Vec<f64>>>()?;
    let es_ok = es.iter().all(|v| v.is_finite()) && es.windows(2).all(|w| w[0] <= w[1]);

    let mut table = Table::new("taylor.csv", &["k", "coeff_sup"]);
    for (k, c) in series.coeffs.iter().enumerate() {
        table.push(vec![k.to_string(), num(c.sup_norm())]);
    }
    let plot = Plot::new("taylor.svg", "Time-Taylor coefficients", "k", "sup |u_k|").log_y().with(
        "coefficients",
        series.coeffs.iter().enumerate().map(|(k, c)| (k as f64, c.sup_norm())).collect(),
    );
    Ok(Outcome {
        measurements: json!({
            "series_vs_solver": gap,
            "recursion_defect": defect,
            "es_s": s_values,
            "es_norm": es,
            "solver_status": traj.status.as_str(),
        }),
        fits: json!({}),
        verdicts: vec![
            Verdict::new("series_vs_solver", gap, Check::LessThan { bound: 1e-8 }),
            Verdict::new("recursion_defect", defect, Check::AtMost { bound: 1e-13 }),
            Verdict::flag("es_norm_finite_monotone", es_ok),
        ],
        tables: vec![table],
        plots: vec![plot],
    })
}

fn blowup(cfg: &RunConfig) -> Result<Outcome> {
    let grid = cfg.grid();
    let u0 = cfg.initial.build(grid, cfg.extras());
    let base = SolverConfig::new(grid, cfg.dt, t_end(cfg))?.with_norm(params(cfg)?);
    let dt = cfg.dt.min(base.stable_dt(2.0 * u0.sup_norm()));
    let traj = evolve(&u0, &base.with_dt(dt))?;
    let rep = blowup_monitor(&traj);
    let plot = Plot::new("blowup.svg", "Slope and amplitude", "t", "value")
        .with("min u_x", rep.times.iter().copied().zip(rep.min_slope.iter().copied()).collect())
        .with("sup |u|", rep.times.iter().copied().zip(rep.sup_abs.iter().copied()).collect());
    Ok(Outcome {
        measurements: json!({
            "status": traj.status.as_str(),
            "dt": base.with_dt(dt).steps().1,
            "steepening": rep.steepening,
            "amplitude_growth": rep.amplitude_growth,
            "flag_time": rep.flag_time,
            "wave_breaking_suspected": rep.wave_breaking_suspected,
            "breaking_integral": rep.breaking_integral.last(),
        }),
        fits: json!({}),
        verdicts: vec![
            Verdict::new("steepening", rep.steepening, Check::AtLeast { bound: 5.0 }),
            Verdict::new("amplitude_growth", rep.amplitude_growth, Check::LessThan { bound: 2.0 }),
            Verdict::flag("wave_breaking_suspected", rep.wave_breaking_suspected),
        ],
        tables: vec![diagnostics_table("blowup.csv", &traj)],
        plots: vec![plot],
    })
}

/// Calibrates over the configured `(s, r)` and the endpoint `(3/2, 1)`.
fn calibrate_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let grid = cfg.grid();
    let suite = random_suite(grid, cfg.count, cfg.kmax, cfg.amplitude, cfg.seed);
    let mut pairs = vec![params(cfg)?];
    let endpoint = BesovParams::new(1.5, Summability::Finite(1.0))?;
    if pairs[0] != endpoint {
        pairs.push(endpoint);
    }
    let base = SolverConfig::new(grid, cfg.dt, 1.0)?;
    let rep = calibrate(&suite, &pairs, &CALIBRATION_CANDIDATES, &base)?;
    let mut table = Table::new("calibrate.csv", &["c", "passed", "total", "worst_growth"]);
    for c in &rep.candidates {
        table.push(vec![num(c.c), c.passed.to_string(), c.total.to_string(), num(c.worst_growth)]);
    }
    let plot = Plot::new("calibrate.svg", "Worst norm growth per candidate", "C", "growth")
        .log_log()
        .with("worst growth", rep.candidates.iter().map(|c| (c.c, c.worst_growth)).collect())
        .with("bound", rep.candidates.iter().map(|c| (c.c, 2.0)).collect());
    Ok(Outcome {
        measurements: json!({
            "params": rep.params,
            "candidates": rep.candidates,
        }),
        fits: json!({ "c_star": rep.c_star }),
        verdicts: vec![Verdict::flag("c_star_found", rep.c_star.is_some())],
        tables: vec![table],
        plots: vec![plot],
    })
}
