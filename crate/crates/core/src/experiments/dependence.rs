//! Paired runs from `u0` and `u0 + δ w`: Lipschitz ratios one derivative below
//! the data and Hölder-1/2 ratios half a derivative below.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::experiments::verdict::{Check, Verdict};
use crate::littlewood_paley::{BesovParams, DyadicSystem};
use crate::solver::{evolve, RunStatus, SolverConfig, Trajectory};
use crate::spectral::SpectralField;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DependenceReport {
    pub params: BesovParams,
    pub deltas: Vec<f64>,
    /// `sup_t ‖u - v‖_{B^{s-1}} / ‖u0 - v0‖_{B^{s-1}}` per δ.
    pub lipschitz_ratios: Vec<f64>,
    /// `sup_t ‖u - v‖_{B^{s-1/2}} / ‖u0 - v0‖_{B^{s-1/2}}^{1/2}` per δ.
    pub holder_ratios: Vec<f64>,
    /// `max / min` of the Lipschitz ratios.
    pub lipschitz_spread: f64,
    /// Largest Hölder ratio over the one at the largest δ.
    pub holder_growth: f64,
    pub statuses: Vec<RunStatus>,
    pub verdicts: Vec<Verdict>,
}

fn sup_distance_norm(a: &Trajectory, b: &Trajectory, params: BesovParams) -> f64 {
    let sys = DyadicSystem::shared();
    a.states
        .iter()
        .zip(&b.states)
        .map(|(x, y)| sys.besov_norm(&(x - y), params))
        .fold(0.0, f64::max)
}

/// Evolve `u0` and each `u0 + δ w` under `cfg` and compare.
///
/// `deltas` is ordered from largest to smallest; the Hölder reference is the first.
pub fn dependence_probe(
    u0: &SpectralField,
    direction: &SpectralField,
    deltas: &[f64],
    params: BesovParams,
    cfg: &SolverConfig,
) -> Result<DependenceReport> {
    if deltas.is_empty() || deltas.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(invalid("deltas", "need positive finite perturbation sizes"));
    }
    let lower = params.with_s(params.s - 1.0);
    let middle = params.with_s(params.s - 0.5);
    let sys = DyadicSystem::shared();
    if sys.besov_norm(direction, lower) == 0.0 {
        return Err(invalid("direction", "zero perturbation"));
    }

    let mut data = vec![u0.clone()];
    data.extend(deltas.iter().map(|d| u0.axpy(*d, direction)));
    let runs: Vec<Trajectory> = data.par_iter().map(|v0| evolve(v0, cfg)).collect::<Result<_>>()?;
    let base = &runs[0];

    let mut lipschitz_ratios = Vec::new();
    let mut holder_ratios = Vec::new();
    for (v0, run) in data[1..].iter().zip(&runs[1..]) {
        let diff0 = u0 - v0;
        lipschitz_ratios.push(sup_distance_norm(base, run, lower) / sys.besov_norm(&diff0, lower));
        holder_ratios.push(sup_distance_norm(base, run, middle) / sys.besov_norm(&diff0, middle).sqrt());
    }
    let lo = lipschitz_ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = lipschitz_ratios.iter().copied().fold(0.0, f64::max);
    let lipschitz_spread = hi / lo;
    let holder_growth = holder_ratios.iter().copied().fold(0.0, f64::max) / holder_ratios[0];
    let statuses: Vec<RunStatus> = runs.iter().map(|r| r.status).collect();

    let verdicts = vec![
        Verdict::flag("all_runs_completed", statuses.iter().all(|s| *s == RunStatus::Completed)),
        Verdict::new("lipschitz_ratio_spread", lipschitz_spread, Check::AtMost { bound: 3.0 }),
        Verdict::new("holder_ratio_growth", holder_growth, Check::AtMost { bound: 3.0 }),
    ];
    Ok(DependenceReport {
        params,
        deltas: deltas.to_vec(),
        lipschitz_ratios,
        holder_ratios,
        lipschitz_spread,
        holder_growth,
        statuses,
        verdicts,
    })
}
