//! The high-frequency approximate solutions
//! `u^n = (2/3) n⁻¹ + n^{-s} cos(nx - t)`, `v^n = -(2/3) n⁻¹ + n^{-s} cos(nx + t)`
//! and their residue in the equation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spectral::{dealiased_product, dx, helmholtz_inverse_dx, SpectralField, TorusGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `+(2/3) n⁻¹`, phase `nx - t`.
    U,
    /// `-(2/3) n⁻¹`, phase `nx + t`.
    V,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::U => 1.0,
            Branch::V => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxSolutionSpec {
    pub n: usize,
    pub s: f64,
    pub branch: Branch,
}

impl ApproxSolutionSpec {
    pub fn new(n: usize, s: f64, branch: Branch) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "frequency must be at least 1"));
        }
        if !s.is_finite() {
            return Err(invalid("s", "must be finite"));
        }
        Ok(Self { n, s, branch })
    }

    fn amplitude(&self) -> f64 {
        (self.n as f64).powf(-self.s)
    }

    fn offset(&self) -> f64 {
        self.branch.sign() * 2.0 / (3.0 * self.n as f64)
    }
}

fn check_grid(spec: &ApproxSolutionSpec, grid: &TorusGrid, harmonic: usize) -> Result<()> {
    if (grid.length() - 2.0 * PI).abs() > 1e-12 {
        return Err(invalid("L", "approximate solutions live on the 2π torus"));
    }
    let top = spec.n * harmonic;
    if top as i64 > grid.dealias_cutoff() {
        return Err(Error::Unresolved {
            n: spec.n,
            points: grid.n(),
            need: format!("{harmonic}·n <= N/3"),
        });
    }
    Ok(())
}

/// Exact samples of `u^n(·, t)` (or `v^n`).
pub fn approximate_solution(spec: ApproxSolutionSpec, t: f64, grid: TorusGrid) -> Result<SpectralField> {
    check_grid(&spec, &grid, 1)?;
    let (n, a, c, sign) = (spec.n as f64, spec.amplitude(), spec.offset(), spec.branch.sign());
    Ok(SpectralField::from_fn(grid, |x| c + a * (n * x - sign * t).cos()))
}

/// Residue in closed form: `-(3/4) n^{1-2s} sin(2(nx ∓ t)) - (1 - ∂²)⁻¹ ∂_x u^n`.
///
/// Requires `2n <= N/3` so the doubled harmonic survives dealiasing.
pub fn residue_field(spec: ApproxSolutionSpec, t: f64, grid: TorusGrid) -> Result<SpectralField> {
    check_grid(&spec, &grid, 2)?;
    let n = spec.n as f64;
    let sign = spec.branch.sign();
    let quad = 0.75 * n.powf(1.0 - 2.0 * spec.s);
    let u = approximate_solution(spec, t, grid)?;
    let first = SpectralField::from_fn(grid, |x| -quad * (2.0 * (n * x - sign * t)).sin());
    Ok(first.axpy(-1.0, &helmholtz_inverse_dx(&u)))
}

/// Residue assembled from its definition
/// `∂_t u^n + (3/2) u^n ∂_x u^n - (1 - ∂²)⁻¹ ∂_x u^n`, products dealiased.
pub fn residue_by_terms(spec: ApproxSolutionSpec, t: f64, grid: TorusGrid) -> Result<SpectralField> {
    check_grid(&spec, &grid, 2)?;
    let n = spec.n as f64;
    let sign = spec.branch.sign();
    let a = spec.amplitude();
    let u = approximate_solution(spec, t, grid)?;
    let u_t = SpectralField::from_fn(grid, |x| sign * a * (n * x - sign * t).sin());
    let adv = dealiased_product(&u, &dx(&u))?;
    Ok(u_t.axpy(1.5, &adv).axpy(-1.0, &helmholtz_inverse_dx(&u)))
}

/// Residue decay exponent: `s + 1 - γ` for `s >= 2`, `2s - 1 - γ` otherwise.
pub fn alpha_exponent(s: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < s) {
        return Err(invalid("gamma", format!("need 0 < γ < s, got γ = {gamma}, s = {s}")));
    }
    Ok(if s >= 2.0 { s + 1.0 - gamma } else { 2.0 * s - 1.0 - gamma })
}

/// Error decay exponent after interpolation between `γ` and `s2`:
/// `(s2 - s)/(s2 - γ)` for `s >= 2`, `(s2 - s)(s - 1)/(s2 - γ)` otherwise.
pub fn beta_exponent(s: f64, gamma: f64, s2: f64) -> Result<f64> {
    if !(gamma < s && s < s2) {
        return Err(invalid("s2", format!("need γ < s < s2, got ({gamma}, {s}, {s2})")));
    }
    let base = (s2 - s) / (s2 - gamma);
    Ok(if s >= 2.0 { base } else { base * (s - 1.0) })
}
