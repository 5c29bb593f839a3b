//! Time integration of `u_t = -(3/2) u u_x + (1 - ∂²)⁻¹ ∂_x u` on the torus.
//!
//! Classical fixed-step RK4. Every accepted step is checked against the CFL guard
//! `dt · max(1, sup|u|) · (3/2) · N/L <= cfl_guard` and for non-finite or runaway
//! values; a violation truncates the trajectory and sets [`RunStatus`].

mod blowup;
mod lifespan;
mod trajectory;
mod transport;

pub use blowup::{blowup_monitor, BreakingReport};
pub use lifespan::{
    calibrate, energy_run, lifespan_estimate, CalibrationReport, CandidateResult, EnergyRun,
    LifespanEstimate, pilot_suite, random_suite, CALIBRATION_CANDIDATES, CALIBRATED_C_STAR, PILOT_AMPLITUDE, PILOT_COUNT, PILOT_KMAX, PILOT_POINTS, PILOT_SEED,
};
pub use trajectory::{Diagnostics, Trajectory};
pub use transport::{
    existence_iteration, mollifier_profile, mollify, transport_evolve, ConstantSource,
    FieldSource, SampledSource, ZeroSource,
};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::littlewood_paley::{BesovParams, Summability};
use crate::spectral::{dealiased_product, dx, helmholtz_inverse_dx, product, SpectralField, TorusGrid};

/// Amplitude beyond which a run is declared runaway.
pub const AMPLITUDE_LIMIT: f64 = 1e6;

/// Exponential spectral filter `exp(-strength (|k| / (N/2))^order)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralFilter {
    pub strength: f64,
    pub order: i32,
}

impl SpectralFilter {
    /// The mild filter used for peaked data.
    pub const PEAKON: SpectralFilter = SpectralFilter {
        strength: 36.0,
        order: 36,
    };

    pub fn apply(&self, u: &SpectralField) -> SpectralField {
        let g = *u.grid();
        let half = (g.n() / 2) as f64;
        let mut coeffs = u.coeffs().to_vec();
        for (j, c) in coeffs.iter_mut().enumerate() {
            let k = g.wavenumber(j).abs() as f64 / half;
            *c *= (-self.strength * k.powi(self.order)).exp();
        }
        SpectralField::from_coeffs(g, coeffs).expect("same length")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub grid: TorusGrid,
    pub dt: f64,
    pub t_end: f64,
    pub dealias: bool,
    pub cfl_guard: f64,
    /// Norm tracked in the diagnostics.
    pub norm: BesovParams,
    pub filter: Option<SpectralFilter>,
    /// Keep every `store_every`-th step (the final step is always kept).
    pub store_every: usize,
}

impl SolverConfig {
    pub fn new(grid: TorusGrid, dt: f64, t_end: f64) -> Result<Self> {
        let cfg = Self {
            grid,
            dt,
            t_end,
            dealias: true,
            cfl_guard: 0.5,
            norm: BesovParams {
                s: 2.0,
                r: Summability::Finite(2.0),
            },
            filter: None,
            store_every: 1,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid("dt", format!("{} must be positive", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(invalid("t_end", format!("{} must be non-negative", self.t_end)));
        }
        if !(self.cfl_guard > 0.0 && self.cfl_guard <= 1.0) {
            return Err(invalid("cfl_guard", format!("{} not in (0, 1]", self.cfl_guard)));
        }
        if self.store_every == 0 {
            return Err(invalid("store_every", "must be at least 1"));
        }
        BesovParams::new(self.norm.s, self.norm.r)?;
        Ok(())
    }

    pub fn with_dt(self, dt: f64) -> Self {
        Self { dt, ..self }
    }

    pub fn with_t_end(self, t_end: f64) -> Self {
        Self { t_end, ..self }
    }

    pub fn with_norm(self, norm: BesovParams) -> Self {
        Self { norm, ..self }
    }

    pub fn with_filter(self, filter: Option<SpectralFilter>) -> Self {
        Self { filter, ..self }
    }

    pub fn with_store_every(self, store_every: usize) -> Self {
        Self {
            store_every,
            ..self
        }
    }

    pub fn with_dealias(self, dealias: bool) -> Self {
        Self { dealias, ..self }
    }

    /// Largest step accepted by the guard for amplitude `sup`, times a 0.9 margin.
    pub fn stable_dt(&self, sup: f64) -> f64 {
        0.9 * self.cfl_guard * (2.0 / 3.0) * self.grid.spacing() / sup.max(1.0)
    }

    /// Number of steps and the uniform step that lands exactly on `t_end`.
    pub fn steps(&self) -> (usize, f64) {
        if self.t_end == 0.0 {
            return (0, self.dt);
        }
        let n = (self.t_end / self.dt - 1e-9).ceil().max(1.0) as usize;
        (n, self.t_end / n as f64)
    }

    fn multiply(&self, a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
        if self.dealias {
            dealiased_product(a, b)
        } else {
            product(a, b)
        }
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    CflHalt,
    NanHalt,
    AmplitudeHalt,
}

impl RunStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunStatus::Completed => "completed",
            RunStatus::CflHalt => "cfl_halt",
            RunStatus::NanHalt => "nan_halt",
            RunStatus::AmplitudeHalt => "amplitude_halt",
        }
    }
}

/// Right-hand side `-(3/2) u u_x + (1 - ∂²)⁻¹ ∂_x u` with the 2/3 rule.
pub fn fw_rhs(u: &SpectralField) -> SpectralField {
    let adv = dealiased_product(u, &dx(u)).expect("same grid");
    helmholtz_inverse_dx(u).axpy(-1.5, &adv)
}

fn fw_rhs_with(cfg: &SolverConfig, u: &SpectralField) -> Result<SpectralField> {
    let adv = cfg.multiply(u, &dx(u))?;
    Ok(helmholtz_inverse_dx(u).axpy(-1.5, &adv))
}

/// Integrate the Fornberg–Whitham equation from `u0`.
pub fn evolve(u0: &SpectralField, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    check_grid(u0, cfg)?;
    let factor = 1.5 * cfg.grid.n() as f64 / cfg.grid.length();
    integrate(
        u0,
        cfg,
        |u, _| fw_rhs_with(cfg, u),
        |sup_u, h, _| Ok(h * sup_u.max(1.0) * factor),
    )
}

pub(crate) fn check_grid(u: &SpectralField, cfg: &SolverConfig) -> Result<()> {
    if *u.grid() != cfg.grid {
        return Err(crate::Error::GridMismatch);
    }
    Ok(())
}

/// Shared RK4 driver.
///
/// `rhs(u, t)` gives `∂_t u`; `cfl(sup|u|, h, t)` gives the CFL number of the
/// step starting at `t`.
pub(crate) fn integrate<F, C>(
    u0: &SpectralField,
    cfg: &SolverConfig,
    mut rhs: F,
    mut cfl: C,
) -> Result<Trajectory>
where
    F: FnMut(&SpectralField, f64) -> Result<SpectralField>,
    C: FnMut(f64, f64, f64) -> Result<f64>,
{
    let (n_steps, h) = cfg.steps();
    let mut u = u0.clone();
    let mut rate = rhs(&u, 0.0)?;
    let mut diag = Diagnostics::of(&u, cfg.norm);
    let mut traj = Trajectory::start(cfg.norm, u.clone(), rate.clone(), diag);
    let mut running = 0.0;

    for step in 1..=n_steps {
        let t = (step - 1) as f64 * h;
        if cfl(diag.sup_abs, h, t)? > cfg.cfl_guard {
            traj.status = RunStatus::CflHalt;
            break;
        }
        let k1 = &rate;
        let k2 = rhs(&u.axpy(0.5 * h, k1), t + 0.5 * h)?;
        let k3 = rhs(&u.axpy(0.5 * h, &k2), t + 0.5 * h)?;
        let k4 = rhs(&u.axpy(h, &k3), t + h)?;
        let incr = k1.axpy(2.0, &k2).axpy(2.0, &k3).axpy(1.0, &k4);
        let mut next = u.axpy(h / 6.0, &incr);
        if let Some(filter) = cfg.filter {
            next = filter.apply(&next);
        }
        if !next.is_finite() {
            traj.status = RunStatus::NanHalt;
            break;
        }
        let next_diag = Diagnostics::of(&next, cfg.norm);
        if !next_diag.is_finite() {
            traj.status = RunStatus::NanHalt;
            break;
        }
        let t_next = if step == n_steps { cfg.t_end } else { step as f64 * h };
        running += 0.5 * h * (diag.max_abs_slope + next_diag.max_abs_slope);
        u = next;
        diag = next_diag;
        rate = rhs(&u, t_next)?;

        let runaway = diag.sup_abs > AMPLITUDE_LIMIT;
        if step % cfg.store_every == 0 || step == n_steps || runaway {
            traj.push(t_next, u.clone(), rate.clone(), diag, running);
        }
        if runaway {
            traj.status = RunStatus::AmplitudeHalt;
            break;
        }
    }
    Ok(traj)
}
