use serde::{Deserialize, Serialize};

use crate::solver::trajectory::trapezoid_running;
use crate::solver::Trajectory;

/// Slope-driven breakdown diagnostics of a trajectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BreakingReport {
    pub times: Vec<f64>,
    /// Trapezoid rule over the sampled `‖u_x‖_∞`.
    pub breaking_integral: Vec<f64>,
    pub min_slope: Vec<f64>,
    pub sup_abs: Vec<f64>,
    /// Largest `min u_x(t) / min u_x(0)` over samples where `sup|u|` has not doubled.
    pub steepening: f64,
    /// `max_t sup|u(t)| / sup|u(0)|` over the same samples.
    pub amplitude_growth: f64,
    /// First sample at which the flag condition held.
    pub flag_time: Option<f64>,
    pub wave_breaking_suspected: bool,
}

/// The flag fires at the first sample with `min u_x < -10 |min u_x(0)|` while
/// `sup|u| < 2 sup|u(0)|`.
pub fn blowup_monitor(traj: &Trajectory) -> BreakingReport {
    let breaking_integral = trapezoid_running(&traj.times, &traj.diagnostics);
    let min_slope: Vec<f64> = traj.diagnostics.iter().map(|d| d.min_slope).collect();
    let sup_abs: Vec<f64> = traj.diagnostics.iter().map(|d| d.sup_abs).collect();

    let m0 = min_slope[0];
    let a0 = sup_abs[0];
    let threshold = -10.0 * m0.abs();
    let below_doubling = |i: usize| sup_abs[i] < 2.0 * a0;

    let mut steepening = if m0 < 0.0 { 1.0 } else { 0.0 };
    let mut amplitude_growth = if a0 > 0.0 { 1.0 } else { 0.0 };
    let mut flag_time = None;
    for i in 0..traj.len() {
        if !below_doubling(i) {
            continue;
        }
        if m0 < 0.0 {
            steepening = f64::max(steepening, min_slope[i] / m0);
        }
        if a0 > 0.0 {
            amplitude_growth = f64::max(amplitude_growth, sup_abs[i] / a0);
        }
        if flag_time.is_none() && min_slope[i] < threshold {
            flag_time = Some(traj.times[i]);
        }
    }
    BreakingReport {
        times: traj.times.clone(),
        breaking_integral,
        min_slope,
        sup_abs,
        steepening,
        amplitude_growth,
        flag_time,
        wave_breaking_suspected: flag_time.is_some(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::littlewood_paley::{BesovParams, Summability};
    use crate::spectral::{SpectralField, TorusGrid};

    fn params() -> BesovParams {
        BesovParams::new(2.0, Summability::Finite(2.0)).unwrap()
    }

    #[test]
    fn zero_trajectory() {
        let g = TorusGrid::periodic(32).unwrap();
        let z = SpectralField::zeros(g);
        let traj = Trajectory::from_samples(params(), vec![0.0, 0.5, 1.0], vec![z.clone(), z.clone(), z]).unwrap();
        let r = blowup_monitor(&traj);
        assert!(r.breaking_integral.iter().all(|&b| b == 0.0));
        assert!(!r.wave_breaking_suspected);
    }

    #[test]
    fn frozen_cosine_integrates_exactly() {
        let g = TorusGrid::periodic(64).unwrap();
        let c = SpectralField::from_fn(g, f64::cos);
        let times: Vec<f64> = (0..=20).map(|i| 0.05 * i as f64 + 0.01 * (i % 3) as f64).collect();
        let states = vec![c; times.len()];
        let traj = Trajectory::from_samples(params(), times.clone(), states).unwrap();
        let r = blowup_monitor(&traj);
        for (t, b) in times.iter().zip(&r.breaking_integral) {
            assert!((b - t).abs() < 1e-10);
        }
        assert!(!r.wave_breaking_suspected);
    }

    #[test]
    fn synthetic_steepening_fires() {
        let g = TorusGrid::periodic(256).unwrap();
        let smooth = SpectralField::from_fn(g, |x| -x.sin());
        let steep = SpectralField::from_fn(g, |x| -x.sin() - 0.5 * (20.0 * x).sin());
        let tall = SpectralField::from_fn(g, |x| -3.0 * x.sin() - 0.5 * (40.0 * x).sin());
        let traj = Trajectory::from_samples(params(), vec![0.0, 0.1, 0.2], vec![smooth, steep, tall]).unwrap();
        let r = blowup_monitor(&traj);
        assert!(r.wave_breaking_suspected);
        assert_eq!(r.flag_time, Some(0.1));
        assert!((r.steepening - 11.0).abs() < 1e-9);
        assert!(r.amplitude_growth < 2.0);
    }
}
