//! Periodic grid, discrete Fourier transforms and Fourier multipliers.
//!
//! Coefficients are stored in FFT order: index `j < N/2` holds wavenumber `k = j`,
//! index `j >= N/2` holds `k = j - N`. The normalisation is
//! `coeff(k) = (1/N) Σ_j u(x_j) e^{-i k x_j 2π/L}`, so `coeff(0)` is the mean and
//! `∫ |u|² dx = L Σ_k |coeff(k)|²`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Error, Result};

/// Points per period and period length of the periodic grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrid {
    n: usize,
    length: f64,
}

impl TorusGrid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "N = {n} must be a power of two and at least 8"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "L = {length} must be positive and finite"
            )));
        }
        Ok(Self { n, length })
    }

    /// Grid on the standard torus `[0, 2π)`.
    pub fn periodic(n: usize) -> Result<Self> {
        Self::new(n, 2.0 * PI)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.length
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n).map(|j| j as f64 * h).collect()
    }

    /// Integer wavenumber stored at FFT index `j`.
    #[inline]
    pub fn wavenumber(&self, j: usize) -> i64 {
        if j < self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// FFT index holding integer wavenumber `k`, if represented.
    pub fn index_of(&self, k: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if k >= half || k < -half {
            None
        } else if k >= 0 {
            Some(k as usize)
        } else {
            Some((k + self.n as i64) as usize)
        }
    }

    /// Scaled frequency `κ = k 2π / L` at FFT index `j`.
    #[inline]
    pub fn kappa(&self, j: usize) -> f64 {
        self.wavenumber(j) as f64 * 2.0 * PI / self.length
    }

    /// Largest `|κ|` on the grid (the Nyquist frequency).
    pub fn kappa_max(&self) -> f64 {
        (self.n / 2) as f64 * 2.0 * PI / self.length
    }

    #[inline]
    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    /// Largest integer `|k|` kept by the 2/3 rule.
    #[inline]
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }
}

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<usize, PlanPair>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plans(n: usize) -> PlanPair {
    PLANS.with(|cell| {
        let mut guard = cell.borrow_mut();
        let (planner, cache) = &mut *guard;
        cache
            .entry(n)
            .or_insert_with(|| (planner.plan_fft_forward(n), planner.plan_fft_inverse(n)))
            .clone()
    })
}

/// A real periodic function stored through its Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.n()],
        }
    }

    pub fn constant(grid: TorusGrid, value: f64) -> Self {
        let mut f = Self::zeros(grid);
        f.coeffs[0] = Complex64::new(value, 0.0);
        f
    }

    /// Build from raw coefficients in FFT order.
    pub fn from_coeffs(grid: TorusGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n() {
            return Err(Error::LengthMismatch {
                expected: grid.n(),
                got: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    /// Sample `f` at the grid nodes and transform.
    pub fn from_fn(grid: TorusGrid, f: impl Fn(f64) -> f64) -> Self {
        let samples: Vec<f64> = grid.nodes().into_iter().map(f).collect();
        transform_forward(grid, &samples).expect("length matches by construction")
    }

    /// Random real field with modes `1 ≤ |k| ≤ kmax`, coefficients decaying like `1/k²`,
    /// and a mean drawn from `[-amplitude/4, amplitude/4]`.
    pub fn random_band_limited<R: Rng + ?Sized>(
        grid: TorusGrid,
        kmax: usize,
        amplitude: f64,
        rng: &mut R,
    ) -> Self {
        let mut f = Self::zeros(grid);
        let top = (kmax as i64).min(grid.n() as i64 / 2 - 1);
        for k in 1..=top {
            let decay = amplitude / (k * k) as f64;
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * decay;
            f.set_mode(k, c);
        }
        f.coeffs[0] = Complex64::new(rng.gen_range(-0.25..0.25) * amplitude, 0.0);
        f
    }

    #[inline]
    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of integer wavenumber `k` (zero if not represented).
    pub fn coeff(&self, k: i64) -> Complex64 {
        self.grid
            .index_of(k)
            .map(|j| self.coeffs[j])
            .unwrap_or_default()
    }

    /// Set the `±k` pair so the field stays real: `coeff(-k) = conj(coeff(k))`.
    pub fn set_mode(&mut self, k: i64, value: Complex64) {
        if k == 0 {
            self.coeffs[0] = Complex64::new(value.re, 0.0);
            return;
        }
        if let (Some(p), Some(m)) = (self.grid.index_of(k), self.grid.index_of(-k)) {
            self.coeffs[p] = value;
            self.coeffs[m] = value.conj();
        }
    }

    #[inline]
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Physical samples at the grid nodes (`transform_inverse`).
    pub fn to_samples(&self) -> Vec<f64> {
        transform_inverse(self)
    }

    /// Evaluate the trigonometric interpolant at an arbitrary point.
    pub fn eval_at(&self, x: f64) -> f64 {
        let mut acc = self.coeffs[0].re;
        let half = self.grid.n() / 2;
        for j in 1..half {
            let phase = self.grid.kappa(j) * x;
            let c = self.coeffs[j];
            acc += 2.0 * (c.re * phase.cos() - c.im * phase.sin());
        }
        let nyq = self.coeffs[half];
        acc + nyq.re * (self.grid.kappa(half) * x).cos()
    }

    /// `L²` norm through Parseval.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.length() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Maximum absolute value over the grid nodes.
    pub fn sup_norm(&self) -> f64 {
        self.to_samples().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n();
        let mut worst = self.coeffs[0].im.abs();
        for j in 1..n {
            let partner = self.coeffs[n - j].conj();
            worst = worst.max((self.coeffs[j] - partner).norm());
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest `|k|` whose coefficient exceeds `tol` times the largest coefficient.
    pub fn bandwidth(&self, tol: f64) -> i64 {
        let peak = self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
        if peak == 0.0 {
            return 0;
        }
        (0..self.grid.n())
            .filter(|&j| self.coeffs[j].norm() > tol * peak)
            .map(|j| self.grid.wavenumber(j).abs())
            .max()
            .unwrap_or(0)
    }

    /// Multiply each coefficient by `symbol(κ)`; optionally zero the Nyquist mode.
    pub fn apply_symbol(&self, symbol: impl Fn(f64) -> Complex64, zero_nyquist: bool) -> Self {
        let mut coeffs: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * symbol(self.grid.kappa(j)))
            .collect();
        if zero_nyquist {
            coeffs[self.grid.nyquist_index()] = Complex64::new(0.0, 0.0);
        }
        Self {
            grid: self.grid,
            coeffs,
        }
    }

    /// Multiply by a real even multiplier `m(|κ|)`.
    pub fn apply_multiplier(&self, multiplier: impl Fn(f64) -> f64) -> Self {
        self.apply_symbol(|kappa| Complex64::new(multiplier(kappa.abs()), 0.0), false)
    }

    /// Zero every mode with `|k| > kmax`.
    pub fn truncate(&self, kmax: i64) -> Self {
        let mut out = self.clone();
        for j in 0..self.grid.n() {
            if self.grid.wavenumber(j).abs() > kmax {
                out.coeffs[j] = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &Self) -> Self {
        assert_eq!(self.grid, other.grid, "axpy across grids");
        Self {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(x, y)| x + y * a)
                .collect(),
        }
    }

    /// Max-abs difference of the coefficient vectors.
    pub fn coeff_distance(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// Max-abs difference of physical samples.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        (self - other).sup_norm()
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: Self) -> SpectralField {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: Self) -> SpectralField {
        self.axpy(-1.0, rhs)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scale(-1.0)
    }
}

impl Mul<&SpectralField> for f64 {
    type Output = SpectralField;
    fn mul(self, rhs: &SpectralField) -> SpectralField {
        rhs.scale(self)
    }
}

/// Physical samples to Fourier coefficients.
pub fn transform_forward(grid: TorusGrid, samples: &[f64]) -> Result<SpectralField> {
    if samples.len() != grid.n() {
        return Err(Error::LengthMismatch {
            expected: grid.n(),
            got: samples.len(),
        });
    }
    let (fwd, _) = plans(grid.n());
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fwd.process(&mut buf);
    let inv_n = 1.0 / grid.n() as f64;
    for c in &mut buf {
        *c *= inv_n;
    }
    Ok(SpectralField { grid, coeffs: buf })
}

/// Fourier coefficients to physical samples (real part).
pub fn transform_inverse(u: &SpectralField) -> Vec<f64> {
    let (_, inv) = plans(u.grid.n());
    let mut buf = u.coeffs.clone();
    inv.process(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

/// `∂_x^order u` with symbol `(iκ)^order`; the Nyquist mode is zeroed for odd orders.
pub fn differentiate(u: &SpectralField, order: u32) -> Result<SpectralField> {
    if order > 4 {
        return Err(invalid("order", format!("{order} exceeds 4")));
    }
    if order == 0 {
        return Ok(u.clone());
    }
    let odd = order % 2 == 1;
    Ok(u.apply_symbol(|kappa| Complex64::new(0.0, kappa).powu(order), odd))
}

/// First derivative; infallible shorthand.
pub fn dx(u: &SpectralField) -> SpectralField {
    u.apply_symbol(|kappa| Complex64::new(0.0, kappa), true)
}

/// `(1 - ∂²)⁻¹ ∂_x u`, symbol `iκ / (1 + κ²)`.
pub fn helmholtz_inverse_dx(u: &SpectralField) -> SpectralField {
    u.apply_symbol(|kappa| Complex64::new(0.0, kappa / (1.0 + kappa * kappa)), true)
}

/// Pointwise product computed on the grid, without truncation.
pub fn product(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    if u.grid != v.grid {
        return Err(Error::GridMismatch);
    }
    let a = u.to_samples();
    let b = v.to_samples();
    let w: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    transform_forward(u.grid, &w)
}

/// Pointwise product with every mode `|k| > N/3` removed (2/3 rule).
pub fn dealiased_product(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    let w = product(u, v)?;
    Ok(w.truncate(u.grid.dealias_cutoff()))
}
