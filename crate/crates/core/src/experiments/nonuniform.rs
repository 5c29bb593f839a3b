//! Sweep over frequencies `n`: evolve from `u^n(0)` and `v^n(0)` and measure how
//! the actual solutions track the approximate ones while staying apart.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::experiments::approx::{approximate_solution, beta_exponent, alpha_exponent, ApproxSolutionSpec, Branch};
use crate::experiments::fit::{fit_decay_exponent, DecayFit};
use crate::experiments::verdict::{Check, Verdict};
use crate::littlewood_paley::{BesovParams, DyadicSystem, Summability};
use crate::solver::{evolve, lifespan_estimate, RunStatus, SolverConfig};
use crate::spectral::{SpectralField, TorusGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonuniformConfig {
    pub n_list: Vec<usize>,
    pub s: f64,
    pub r: Summability,
    pub t_end: f64,
    /// Upper bound on the step; each run also respects its CFL limit.
    pub dt: f64,
    /// Smallest grid used; each `n` gets at least the next power of two `>= 6n`.
    pub min_points: usize,
    pub c_star: f64,
    /// Weak index `γ` entering the `β` exponent.
    pub gamma: f64,
    /// Strong index `s2 > s` entering the `β` exponent.
    pub s2: f64,
    /// Error norms are sampled every `store_every` steps.
    pub store_every: usize,
}

impl NonuniformConfig {
    pub fn new(n_list: Vec<usize>, s: f64) -> Self {
        Self {
            n_list,
            s,
            r: Summability::Infinite,
            t_end: 1.0,
            dt: 1e-3,
            min_points: 64,
            c_star: crate::solver::CALIBRATED_C_STAR,
            gamma: 0.5,
            s2: s + 0.5,
            store_every: 10,
        }
    }

    pub fn params(&self) -> Result<BesovParams> {
        BesovParams::new(self.s, self.r)
    }

    pub fn grid_for(&self, n: usize) -> Result<TorusGrid> {
        let points = (6 * n).next_power_of_two().max(self.min_points).max(8);
        TorusGrid::periodic(points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonuniformRow {
    pub n: usize,
    pub grid_points: usize,
    pub init_dist: f64,
    pub sup_norm_u: f64,
    pub sup_norm_v: f64,
    pub err_u: f64,
    pub err_v: f64,
    pub final_dist: f64,
    pub status_u: RunStatus,
    pub status_v: RunStatus,
}

impl NonuniformRow {
    pub fn failed(&self) -> bool {
        self.status_u != RunStatus::Completed || self.status_v != RunStatus::Completed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonuniformReport {
    pub config: NonuniformConfig,
    /// Smallest `1 / (4 C ‖u0‖)` over all data; exceeding it is reported, not fatal.
    pub lifespan: f64,
    pub alpha: f64,
    pub beta: f64,
    pub rows: Vec<NonuniformRow>,
    pub init_fit: Option<DecayFit>,
    pub error_fit: Option<DecayFit>,
    pub verdicts: Vec<Verdict>,
}

impl NonuniformReport {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

struct BranchRun {
    sup_norm: f64,
    err: f64,
    final_state: SpectralField,
    status: RunStatus,
}

fn run_branch(cfg: &NonuniformConfig, n: usize, branch: Branch) -> Result<BranchRun> {
    let params = cfg.params()?;
    let grid = cfg.grid_for(n)?;
    let spec = ApproxSolutionSpec::new(n, cfg.s, branch)?;
    let u0 = approximate_solution(spec, 0.0, grid)?;
    let base = SolverConfig::new(grid, cfg.dt, cfg.t_end)?;
    let dt = cfg.dt.min(base.stable_dt(2.0 * u0.sup_norm()));
    let solver_cfg = base
        .with_dt(dt)
        .with_norm(params)
        .with_store_every(cfg.store_every);
    let traj = evolve(&u0, &solver_cfg)?;
    let sys = DyadicSystem::shared();
    let mut err = 0.0_f64;
    for (t, state) in traj.times.iter().zip(&traj.states) {
        let approx = approximate_solution(spec, *t, grid)?;
        err = err.max(sys.besov_norm(&(state - &approx), params));
    }
    Ok(BranchRun {
        sup_norm: traj.sup_besov(),
        err,
        final_state: traj.final_state().clone(),
        status: traj.status,
    })
}

/// Run the sweep. Failed runs are kept as rows and excluded from the fits.
pub fn nonuniform_experiment(cfg: &NonuniformConfig) -> Result<NonuniformReport> {
    if cfg.n_list.is_empty() {
        return Err(invalid("n_list", "empty"));
    }
    if cfg.n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("n_list", "must be strictly increasing"));
    }
    if cfg.store_every == 0 {
        return Err(invalid("store_every", "must be at least 1"));
    }
    let params = cfg.params()?;
    let alpha = alpha_exponent(cfg.s, cfg.gamma)?;
    let beta = beta_exponent(cfg.s, cfg.gamma, cfg.s2)?;

    let sys = DyadicSystem::shared();
    let mut lifespan = f64::INFINITY;
    for &n in &cfg.n_list {
        let grid = cfg.grid_for(n)?;
        for branch in [Branch::U, Branch::V] {
            let u0 = approximate_solution(ApproxSolutionSpec::new(n, cfg.s, branch)?, 0.0, grid)?;
            lifespan = lifespan.min(lifespan_estimate(&u0, params, cfg.c_star)?.t);
        }
    }

    let tasks: Vec<(usize, Branch)> = cfg
        .n_list
        .iter()
        .flat_map(|&n| [(n, Branch::U), (n, Branch::V)])
        .collect();
    let runs: Vec<BranchRun> = tasks
        .par_iter()
        .map(|&(n, b)| run_branch(cfg, n, b))
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(cfg.n_list.len());
    for (i, &n) in cfg.n_list.iter().enumerate() {
        let (ru, rv) = (&runs[2 * i], &runs[2 * i + 1]);
        let grid = cfg.grid_for(n)?;
        let u0 = approximate_solution(ApproxSolutionSpec::new(n, cfg.s, Branch::U)?, 0.0, grid)?;
        let v0 = approximate_solution(ApproxSolutionSpec::new(n, cfg.s, Branch::V)?, 0.0, grid)?;
        rows.push(NonuniformRow {
            n,
            grid_points: grid.n(),
            init_dist: sys.besov_norm(&(&u0 - &v0), params),
            sup_norm_u: ru.sup_norm,
            sup_norm_v: rv.sup_norm,
            err_u: ru.err,
            err_v: rv.err,
            final_dist: sys.besov_norm(&(&ru.final_state - &rv.final_state), params),
            status_u: ru.status,
            status_v: rv.status,
        });
    }

    let good: Vec<&NonuniformRow> = rows.iter().filter(|r| !r.failed()).collect();
    let ns: Vec<f64> = good.iter().map(|r| r.n as f64).collect();
    let init_fit = fit_decay_exponent(&ns, &good.iter().map(|r| r.init_dist).collect::<Vec<_>>()).ok();
    let error_fit = fit_decay_exponent(&ns, &good.iter().map(|r| r.err_u + r.err_v).collect::<Vec<_>>()).ok();

    let mut verdicts = vec![
        Verdict::new("t_end_within_lifespan", cfg.t_end, Check::AtMost { bound: lifespan }),
        Verdict::flag("all_runs_completed", good.len() == rows.len()),
        Verdict::new(
            "initial_distance_exponent",
            init_fit.as_ref().map_or(f64::NAN, |f| f.fitted_exponent),
            Check::Within { lo: 0.95, hi: 1.05 },
        ),
        Verdict::new(
            "error_exponent",
            error_fit.as_ref().map_or(f64::NAN, |f| f.fitted_exponent),
            Check::AtLeast { bound: 0.5 * beta },
        ),
    ];
    let floor = 0.5 * cfg.t_end.sin().abs();
    for r in rows.iter().filter(|r| r.n >= 32) {
        verdicts.push(Verdict::new(
            format!("final_distance_n{}", r.n),
            r.final_dist,
            Check::AtLeast { bound: floor },
        ));
    }

    Ok(NonuniformReport {
        config: cfg.clone(),
        lifespan,
        alpha,
        beta,
        rows,
        init_fit,
        error_fit,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_choice() {
        let cfg = NonuniformConfig::new(vec![4, 16, 100], 2.0);
        assert_eq!(cfg.grid_for(4).unwrap().n(), 64);
        assert_eq!(cfg.grid_for(16).unwrap().n(), 128);
        assert_eq!(cfg.grid_for(100).unwrap().n(), 1024);
    }

    #[test]
    fn rejects_bad_lists() {
        assert!(nonuniform_experiment(&NonuniformConfig::new(vec![], 2.0)).is_err());
        assert!(nonuniform_experiment(&NonuniformConfig::new(vec![8, 4], 2.0)).is_err());
    }

    #[test]
    fn initial_distance_is_exact() {
        let mut cfg = NonuniformConfig::new(vec![8, 16, 32, 64], 2.0);
        cfg.t_end = 0.05;
        let rep = nonuniform_experiment(&cfg).unwrap();
        for r in &rep.rows {
            // only the mean differs: (4/3) n⁻¹ √(2π) in block -1 with weight 2^{-s}
            let expect = 4.0 / (3.0 * r.n as f64) * (2.0 * std::f64::consts::PI).sqrt() * 0.25;
            assert!((r.init_dist - expect).abs() < 1e-12 * expect.max(1.0));
        }
        assert!(rep.verdicts[0].pass);
        let fit = rep.init_fit.unwrap();
        assert!((fit.fitted_exponent - 1.0).abs() < 1e-10);
    }

    #[test]
    fn deterministic() {
        let mut cfg = NonuniformConfig::new(vec![4, 8, 16, 32], 2.0);
        cfg.t_end = 0.1;
        let a = nonuniform_experiment(&cfg).unwrap();
        let b = nonuniform_experiment(&cfg).unwrap();
        assert_eq!(a, b);
    }
}
