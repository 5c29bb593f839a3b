//! Linear transport `∂_t f + v ∂_x f = F`, the Friedrichs mollifier and the
//! iteration scheme built from them.

use crate::error::{invalid, Error, Result};
use crate::smooth::plateau;
use crate::solver::{check_grid, integrate, lifespan_estimate, SolverConfig, Trajectory};
use crate::spectral::{dx, helmholtz_inverse_dx, SpectralField, TorusGrid};

/// A time-dependent field, e.g. a transport velocity or forcing.
pub trait FieldSource: Sync {
    fn grid(&self) -> TorusGrid;
    fn at(&self, t: f64) -> Result<SpectralField>;
}

#[derive(Debug, Clone, Copy)]
pub struct ZeroSource(pub TorusGrid);

impl FieldSource for ZeroSource {
    fn grid(&self) -> TorusGrid {
        self.0
    }

    fn at(&self, _t: f64) -> Result<SpectralField> {
        Ok(SpectralField::zeros(self.0))
    }
}

#[derive(Debug, Clone)]
pub struct ConstantSource(pub SpectralField);

impl FieldSource for ConstantSource {
    fn grid(&self) -> TorusGrid {
        *self.0.grid()
    }

    fn at(&self, _t: f64) -> Result<SpectralField> {
        Ok(self.0.clone())
    }
}

/// Cubic Hermite interpolation between stored samples and their time derivatives.
#[derive(Debug, Clone)]
pub struct SampledSource {
    times: Vec<f64>,
    values: Vec<SpectralField>,
    rates: Vec<SpectralField>,
}

impl SampledSource {
    pub fn new(times: Vec<f64>, values: Vec<SpectralField>, rates: Vec<SpectralField>) -> Result<Self> {
        if times.is_empty() || values.len() != times.len() || rates.len() != times.len() {
            return Err(invalid("source", "need matching, non-empty times/values/rates"));
        }
        Ok(Self { times, values, rates })
    }

    /// Sample `map(u(t))` for a linear `map`, reusing the stored `∂_t u`.
    pub fn from_trajectory(
        traj: &Trajectory,
        map: impl Fn(&SpectralField) -> SpectralField,
    ) -> Result<Self> {
        if traj.rates.len() != traj.len() {
            return Err(invalid("source", "trajectory carries no time derivatives"));
        }
        Self::new(
            traj.times.clone(),
            traj.states.iter().map(&map).collect(),
            traj.rates.iter().map(&map).collect(),
        )
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }
}

impl FieldSource for SampledSource {
    fn grid(&self) -> TorusGrid {
        *self.values[0].grid()
    }

    fn at(&self, t: f64) -> Result<SpectralField> {
        let first = self.times[0];
        let last = self.final_time();
        let slack = 1e-9 * (1.0 + last.abs());
        if t < first - slack || t > last + slack {
            return Err(Error::SourceCoverage(t));
        }
        if self.times.len() == 1 {
            return Ok(self.values[0].clone());
        }
        let i = self
            .times
            .partition_point(|&x| x <= t)
            .saturating_sub(1)
            .min(self.times.len() - 2);
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let h = t1 - t0;
        let s = ((t - t0) / h).clamp(0.0, 1.0);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        Ok(self.values[i]
            .scale(h00)
            .axpy(h10 * h, &self.rates[i])
            .axpy(h01, &self.values[i + 1])
            .axpy(h11 * h, &self.rates[i + 1]))
    }
}

/// Integrate `∂_t f + v ∂_x f = F` from `f0` with the RK4 core.
///
/// The CFL number of a step is `dt · max(1, sup|v|) · N/L`.
pub fn transport_evolve(
    velocity: &dyn FieldSource,
    f0: &SpectralField,
    forcing: &dyn FieldSource,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    check_grid(f0, cfg)?;
    if velocity.grid() != cfg.grid || forcing.grid() != cfg.grid {
        return Err(Error::GridMismatch);
    }
    let density = cfg.grid.n() as f64 / cfg.grid.length();
    integrate(
        f0,
        cfg,
        |f, t| {
            let v = velocity.at(t)?;
            let adv = cfg.multiply(&v, &dx(f))?;
            Ok(forcing.at(t)?.axpy(-1.0, &adv))
        },
        |_, h, t| {
            let sup_v = velocity.at(t)?.sup_norm();
            Ok(h * sup_v.max(1.0) * density)
        },
    )
}

/// Fourier profile of the mollifier: 1 on `|ξ| <= 1/2`, 0 on `|ξ| >= 1`.
pub fn mollifier_profile(xi: f64) -> f64 {
    plateau(xi, 0.5, 1.0)
}

/// `J_n u0`, the multiplier `ĵ(κ/n)`.
pub fn mollify(u0: &SpectralField, n: usize) -> Result<SpectralField> {
    if n == 0 {
        return Err(invalid("n", "mollifier index must be positive"));
    }
    let inv = 1.0 / n as f64;
    Ok(u0.apply_multiplier(|kappa| mollifier_profile(kappa * inv)))
}

/// Iterates `u_1 … u_{n_iters}` of
/// `∂_t u_{n+1} + (3/2) u_n ∂_x u_{n+1} = (1 - ∂²)⁻¹ ∂_x u_n`, `u_{n+1}(0) = J_{n+1} u0`,
/// seeded with `u_0 ≡ 0`.
///
/// `cfg.t_end` must not exceed the lifespan `1 / (4 c ‖u0‖)` in `cfg.norm`.
pub fn existence_iteration(
    u0: &SpectralField,
    n_iters: usize,
    cfg: &SolverConfig,
    c: f64,
) -> Result<Vec<Trajectory>> {
    if n_iters == 0 {
        return Err(invalid("n_iters", "need at least one iterate"));
    }
    check_grid(u0, cfg)?;
    let life = lifespan_estimate(u0, cfg.norm, c)?;
    if cfg.t_end > life.t * (1.0 + 1e-12) {
        return Err(invalid(
            "t_end",
            format!("{} exceeds the lifespan estimate {}", cfg.t_end, life.t),
        ));
    }
    let cfg = cfg.with_store_every(1);
    let grid = cfg.grid;
    let mut iterates: Vec<Trajectory> = Vec::with_capacity(n_iters);
    for n in 0..n_iters {
        let data = mollify(u0, n + 1)?;
        let next = match iterates.last() {
            None => transport_evolve(&ZeroSource(grid), &data, &ZeroSource(grid), &cfg)?,
            Some(prev) => {
                let velocity = SampledSource::from_trajectory(prev, |u| u.scale(1.5))?;
                let forcing = SampledSource::from_trajectory(prev, helmholtz_inverse_dx)?;
                transport_evolve(&velocity, &data, &forcing, &cfg)?
            }
        };
        iterates.push(next);
    }
    Ok(iterates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::littlewood_paley::{BesovParams, DyadicSystem, Summability};
    use crate::solver::RunStatus;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> TorusGrid {
        TorusGrid::periodic(n).unwrap()
    }

    #[test]
    fn mollifier_examples() {
        let g = grid(256);
        let c = SpectralField::from_fn(g, f64::cos);
        for n in 2..6 {
            assert!(mollify(&c, n).unwrap().coeff_distance(&c) < 1e-15);
        }
        let hi = SpectralField::from_fn(g, |x| (64.0 * x).cos());
        assert!(mollify(&hi, 16).unwrap().l2_norm() < 1e-14);
        assert!(mollify(&c, 0).is_err());
        assert_eq!(mollifier_profile(0.0), 1.0);
    }

    #[test]
    fn mollifier_converges_monotonically() {
        let g = grid(256);
        let sys = DyadicSystem::shared();
        let p = BesovParams::new(1.5, Summability::Finite(2.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let u = SpectralField::random_band_limited(g, 100, 1.0, &mut rng);
        let full = sys.besov_norm(&u, p);
        let mut prev = f64::INFINITY;
        for n in [1usize, 2, 4, 8, 16, 32, 64, 128, 256] {
            let j = mollify(&u, n).unwrap();
            assert!(sys.besov_norm(&j, p) <= full + 1e-12);
            let d = sys.besov_norm(&(&j - &u), p);
            assert!(d <= prev);
            prev = d;
        }
        assert!(prev < 1e-14);
    }

    #[test]
    fn transport_trivial_cases() {
        let g = grid(32);
        let cfg = SolverConfig::new(g, 0.01, 1.0).unwrap();
        let f0 = SpectralField::from_fn(g, |x| x.sin() + 0.3);
        let zero = ZeroSource(g);
        let traj = transport_evolve(&zero, &f0, &zero, &cfg).unwrap();
        for s in &traj.states {
            assert!(s.coeff_distance(&f0) < 1e-15);
        }

        let gsrc = SpectralField::from_fn(g, |x| (2.0 * x).cos());
        let traj = transport_evolve(&zero, &f0, &ConstantSource(gsrc.clone()), &cfg).unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states) {
            assert!(s.coeff_distance(&f0.axpy(*t, &gsrc)) < 1e-13);
        }
    }

    #[test]
    fn constant_advection_matches_characteristics() {
        let g = grid(32);
        let c = 0.7;
        let cfg = SolverConfig::new(g, 0.005, 1.0).unwrap();
        let v = ConstantSource(SpectralField::constant(g, c));
        let f0 = SpectralField::from_fn(g, f64::cos);
        let traj = transport_evolve(&v, &f0, &ZeroSource(g), &cfg).unwrap();
        assert_eq!(traj.status, RunStatus::Completed);
        let exact = SpectralField::from_fn(g, |x| (x - c).cos());
        assert!(traj.final_state().sup_distance(&exact) < 1e-8);
    }

    #[test]
    fn transport_is_linear() {
        let g = grid(64);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let v = ConstantSource(SpectralField::random_band_limited(g, 4, 0.5, &mut rng));
        let f1 = SpectralField::random_band_limited(g, 6, 1.0, &mut rng);
        let f2 = SpectralField::random_band_limited(g, 6, 1.0, &mut rng);
        let g1 = SpectralField::random_band_limited(g, 6, 1.0, &mut rng);
        let g2 = SpectralField::random_band_limited(g, 6, 1.0, &mut rng);
        let cfg = SolverConfig::new(g, 0.01, 0.5).unwrap();
        let (a, b) = (0.7, -1.3);
        let run = |f: &SpectralField, h: &SpectralField| {
            transport_evolve(&v, f, &ConstantSource(h.clone()), &cfg).unwrap()
        };
        let t1 = run(&f1, &g1);
        let t2 = run(&f2, &g2);
        let tc = run(&f1.scale(a).axpy(b, &f2), &g1.scale(a).axpy(b, &g2));
        let combo = t1.final_state().scale(a).axpy(b, t2.final_state());
        assert!(tc.final_state().coeff_distance(&combo) < 1e-10);
    }

    #[test]
    fn hermite_source_reproduces_cubics() {
        let g = grid(16);
        let base = SpectralField::from_fn(g, f64::cos);
        let poly = |t: f64| 1.0 + 2.0 * t - t * t + 0.5 * t * t * t;
        let dpoly = |t: f64| 2.0 - 2.0 * t + 1.5 * t * t;
        let times = vec![0.0, 0.4, 1.0];
        let values = times.iter().map(|&t| base.scale(poly(t))).collect();
        let rates = times.iter().map(|&t| base.scale(dpoly(t))).collect();
        let src = SampledSource::new(times, values, rates).unwrap();
        for t in [0.0, 0.1, 0.33, 0.4, 0.77, 1.0] {
            let v = src.at(t).unwrap();
            assert!(v.coeff_distance(&base.scale(poly(t))) < 1e-14, "t = {t}");
        }
        assert!(matches!(src.at(1.5), Err(Error::SourceCoverage(_))));
    }

    #[test]
    fn first_iterate_is_mollified_data() {
        let g = grid(32);
        let u0 = SpectralField::from_fn(g, |x| 0.5 + 0.1 * x.cos());
        let p = BesovParams::new(2.0, Summability::Finite(2.0)).unwrap();
        let cfg = SolverConfig::new(g, 0.01, 0.1).unwrap().with_norm(p);
        let its = existence_iteration(&u0, 2, &cfg, 0.25).unwrap();
        let j1 = mollify(&u0, 1).unwrap();
        assert!((j1.mean() - 0.5).abs() < 1e-15);
        for s in &its[0].states {
            assert!(s.coeff_distance(&j1) < 1e-15);
        }
        // second iterate: the cosine is advected at speed 3/2 · 0.5
        let exact = SpectralField::from_fn(g, |x| 0.5 + 0.1 * (x - 0.075).cos());
        assert!(its[1].final_state().sup_distance(&exact) < 1e-10);
    }

    #[test]
    fn iteration_rejects_long_horizon() {
        let g = grid(32);
        let u0 = SpectralField::from_fn(g, |x| x.cos());
        let cfg = SolverConfig::new(g, 0.01, 10.0).unwrap();
        assert!(existence_iteration(&u0, 3, &cfg, 1.0).is_err());
        assert!(existence_iteration(&u0, 0, &cfg.with_t_end(0.01), 1.0).is_err());
    }
}
