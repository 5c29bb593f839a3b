use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::littlewood_paley::{BesovParams, DyadicSystem};
use crate::solver::RunStatus;
use crate::spectral::{dx, SpectralField, TorusGrid};

/// Per-sample scalar diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub besov_norm: f64,
    pub sup_abs: f64,
    pub min_slope: f64,
    pub max_abs_slope: f64,
}

impl Diagnostics {
    pub fn of(u: &SpectralField, norm: BesovParams) -> Self {
        let sup_abs = u.to_samples().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let slope = dx(u).to_samples();
        let (min_slope, max_abs_slope) = slope
            .iter()
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &v| (lo.min(v), hi.max(v.abs())));
        Self {
            besov_norm: DyadicSystem::shared().besov_norm(u, norm),
            sup_abs,
            min_slope,
            max_abs_slope,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.besov_norm.is_finite()
            && self.sup_abs.is_finite()
            && self.min_slope.is_finite()
            && self.max_abs_slope.is_finite()
    }
}

/// Time-stamped states with running diagnostics.
///
/// `rates[i]` holds `∂_t u` at `times[i]` when known (empty otherwise).
/// `breaking_integral[i]` is the running value of `∫_0^t ‖u_x‖_∞ dτ`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: BesovParams,
    pub times: Vec<f64>,
    pub states: Vec<SpectralField>,
    pub rates: Vec<SpectralField>,
    pub diagnostics: Vec<Diagnostics>,
    pub breaking_integral: Vec<f64>,
    pub status: RunStatus,
}

impl Trajectory {
    pub(crate) fn start(
        params: BesovParams,
        u0: SpectralField,
        rate: SpectralField,
        diag: Diagnostics,
    ) -> Self {
        Self {
            params,
            times: vec![0.0],
            states: vec![u0],
            rates: vec![rate],
            diagnostics: vec![diag],
            breaking_integral: vec![0.0],
            status: RunStatus::Completed,
        }
    }

    pub(crate) fn push(
        &mut self,
        t: f64,
        u: SpectralField,
        rate: SpectralField,
        diag: Diagnostics,
        breaking: f64,
    ) {
        self.times.push(t);
        self.states.push(u);
        self.rates.push(rate);
        self.diagnostics.push(diag);
        self.breaking_integral.push(breaking);
    }

    /// Assemble a trajectory from externally produced samples (no rates).
    ///
    /// The breaking integral is the trapezoid rule over the sampled `max |u_x|`.
    pub fn from_samples(
        params: BesovParams,
        times: Vec<f64>,
        states: Vec<SpectralField>,
    ) -> Result<Self> {
        if times.len() != states.len() || times.is_empty() {
            return Err(invalid("states", "need one state per time, at least one"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("times", "must be strictly increasing"));
        }
        let grid = *states[0].grid();
        if states.iter().any(|s| *s.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        let diagnostics: Vec<Diagnostics> =
            states.iter().map(|s| Diagnostics::of(s, params)).collect();
        let breaking_integral = trapezoid_running(&times, &diagnostics);
        Ok(Self {
            params,
            times,
            states,
            rates: Vec::new(),
            diagnostics,
            breaking_integral,
            status: RunStatus::Completed,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn grid(&self) -> &TorusGrid {
        self.states[0].grid()
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    pub fn final_state(&self) -> &SpectralField {
        self.states.last().expect("non-empty")
    }

    /// `sup_t` of an arbitrary functional over the stored states.
    pub fn sup_over<F: Fn(&SpectralField) -> f64>(&self, f: F) -> f64 {
        self.states.iter().map(f).fold(0.0, f64::max)
    }

    /// `sup_t ‖u(t)‖` in the tracked norm.
    pub fn sup_besov(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.besov_norm).fold(0.0, f64::max)
    }

    pub fn completed(&self) -> bool {
        self.status == RunStatus::Completed
    }
}

pub(crate) fn trapezoid_running(times: &[f64], diags: &[Diagnostics]) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..times.len() {
        acc += 0.5 * (times[i] - times[i - 1]) * (diags[i].max_abs_slope + diags[i - 1].max_abs_slope);
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::littlewood_paley::Summability;

    #[test]
    fn from_samples_validates() {
        let g = TorusGrid::periodic(16).unwrap();
        let p = BesovParams::new(1.0, Summability::Finite(2.0)).unwrap();
        let z = SpectralField::zeros(g);
        assert!(Trajectory::from_samples(p, vec![], vec![]).is_err());
        assert!(Trajectory::from_samples(p, vec![0.0, 0.0], vec![z.clone(), z.clone()]).is_err());
        let other = SpectralField::zeros(TorusGrid::periodic(32).unwrap());
        assert_eq!(
            Trajectory::from_samples(p, vec![0.0, 1.0], vec![z.clone(), other]).unwrap_err(),
            Error::GridMismatch
        );
        let t = Trajectory::from_samples(p, vec![0.0, 1.0], vec![z.clone(), z]).unwrap();
        assert_eq!(t.breaking_integral, vec![0.0, 0.0]);
    }

    #[test]
    fn diagnostics_of_cosine() {
        let g = TorusGrid::periodic(64).unwrap();
        let p = BesovParams::new(0.0, Summability::Finite(2.0)).unwrap();
        let d = Diagnostics::of(&SpectralField::from_fn(g, |x| 2.0 * x.cos()), p);
        assert!((d.sup_abs - 2.0).abs() < 1e-14);
        assert!((d.min_slope + 2.0).abs() < 1e-2);
        assert!((d.max_abs_slope - 2.0).abs() < 1e-2);
    }
}
