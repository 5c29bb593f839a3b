use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::solver::{blowup_monitor, evolve, BreakingReport, RunStatus, SolverConfig};
use crate::spectral::{SpectralField, TorusGrid};

/// Steepening run from `u0 = -a sin x`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SteepRun {
    pub amplitude: f64,
    pub grid_points: usize,
    pub dt: f64,
    pub t_end: f64,
    pub status: RunStatus,
    pub report: BreakingReport,
}

impl SteepRun {
    /// `min u_x(t) / min u_x(0)` while `sup|u|` has not doubled.
    pub fn steepening(&self) -> f64 {
        self.report.steepening
    }

    pub fn amplitude_growth(&self) -> f64 {
        self.report.amplitude_growth
    }
}

/// Run `-a sin x` on the 2π torus to `t_end` and hand the trajectory to the
/// blow-up monitor. Every step is stored.
pub fn steep_data_run(grid: TorusGrid, amplitude: f64, t_end: f64) -> Result<SteepRun> {
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(invalid("amplitude", format!("{amplitude} must be positive")));
    }
    let u0 = SpectralField::from_fn(grid, |x| -amplitude * x.sin());
    let base = SolverConfig::new(grid, 1.0, t_end)?;
    let dt = base.stable_dt(2.0 * amplitude);
    let cfg = base.with_dt(dt);
    let traj = evolve(&u0, &cfg)?;
    Ok(SteepRun {
        amplitude,
        grid_points: grid.n(),
        dt: cfg.steps().1,
        t_end,
        status: traj.status,
        report: blowup_monitor(&traj),
    })
}
