//! Time-Taylor coefficients at `t = 0` and the `E_s` weighted derivative norm.

use num_complex::Complex64;
use crate::error::{invalid, Result};
use crate::littlewood_paley::{BesovParams, DyadicSystem, Summability};
use crate::spectral::{dealiased_product, dx, helmholtz_inverse_dx, SpectralField};

/// Largest supported truncation order.
pub const MAX_ORDER: usize = 30;

#[derive(Debug, Clone)]
pub struct TaylorSeries {
    /// `u^{(0)} … u^{(K)}`; `u^{(0)}` is the datum.
    pub coeffs: Vec<SpectralField>,
}

impl TaylorSeries {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `Σ_k u^{(k)} t^k` by Horner's rule.
    pub fn evaluate(&self, t: f64) -> SpectralField {
        let mut acc = self.coeffs.last().expect("non-empty").clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = c.axpy(t, &acc);
        }
        acc
    }

    /// Largest sup-norm gap between each stored `u^{(k+1)}` and the same
    /// coefficient rebuilt from the conservative form
    /// `(k+1) u^{(k+1)} = -(3/4) ∂_x Σ_j u^{(j)} u^{(k-j)} + (1 - ∂²)⁻¹ ∂_x u^{(k)}`.
    pub fn recursion_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for k in 0..self.order() {
            let mut quad = SpectralField::zeros(*self.coeffs[0].grid());
            for j in 0..=k {
                let p = dealiased_product(&self.coeffs[j], &self.coeffs[k - j]).expect("same grid");
                quad = quad.axpy(1.0, &p);
            }
            let rebuilt = helmholtz_inverse_dx(&self.coeffs[k])
                .axpy(-0.75, &dx(&quad))
                .scale(1.0 / (k + 1) as f64);
            worst = worst.max(rebuilt.sup_distance(&self.coeffs[k + 1]));
        }
        worst
    }
}

/// Coefficients from
/// `u^{(k+1)} = [-(3/2) Σ_j u^{(j)} ∂_x u^{(k-j)} + (1 - ∂²)⁻¹ ∂_x u^{(k)}] / (k+1)`.
pub fn taylor_time_series(u0: &SpectralField, order: usize) -> Result<TaylorSeries> {
    if order > MAX_ORDER {
        return Err(invalid("K", format!("{order} exceeds {MAX_ORDER}")));
    }
    let limit = u0.grid().n() as i64 / 6;
    if u0.bandwidth(1e-13) >= limit {
        return Err(invalid(
            "u0",
            format!("bandwidth {} is not below N/6 = {limit}", u0.bandwidth(1e-13)),
        ));
    }
    let mut coeffs = vec![u0.clone()];
    let mut slopes = vec![dx(u0)];
    for k in 0..order {
        let mut adv = SpectralField::zeros(*u0.grid());
        for j in 0..=k {
            adv = adv.axpy(1.0, &dealiased_product(&coeffs[j], &slopes[k - j])?);
        }
        let next = helmholtz_inverse_dx(&coeffs[k])
            .axpy(-1.5, &adv)
            .scale(1.0 / (k + 1) as f64);
        slopes.push(dx(&next));
        coeffs.push(next);
    }
    Ok(TaylorSeries { coeffs })
}

/// `∂_x^k u` for `k = 1..=order`, each from the exact symbol `(iκ)^k`.
pub fn spatial_derivatives(u: &SpectralField, order: usize) -> Vec<SpectralField> {
    (1..=order as u32)
        .map(|k| u.apply_symbol(|kappa| Complex64::new(0.0, kappa).powu(k), k % 2 == 1))
        .collect()
}

/// `max_{k>=1} ‖∂_x^k u‖_{B^{3/2}_{2,1}} s^k (k+1)² / k!` over the supplied
/// derivatives (`derivs[k-1] = ∂_x^k u`). A finite-`K` lower bound of the full sup.
pub fn es_norm(derivs: &[SpectralField], s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(invalid("s", format!("{s} not in (0, 1)")));
    }
    let params = BesovParams::new(1.5, Summability::Finite(1.0))?;
    let sys = DyadicSystem::shared();
    let mut weight = 1.0;
    let mut best = 0.0_f64;
    for (i, d) in derivs.iter().enumerate() {
        let k = (i + 1) as f64;
        weight *= s / k;
        best = best.max(sys.besov_norm(d, params) * weight * (k + 1.0).powi(2));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{differentiate, TorusGrid};

    fn g() -> TorusGrid {
        TorusGrid::periodic(64).unwrap()
    }

    #[test]
    fn trivial_series() {
        let z = taylor_time_series(&SpectralField::zeros(g()), 5).unwrap();
        assert!(z.coeffs.iter().all(|c| c.l2_norm() == 0.0));
        let c = taylor_time_series(&SpectralField::constant(g(), 0.3), 5).unwrap();
        assert!(c.coeffs[1..].iter().all(|c| c.l2_norm() < 1e-16));
        assert!((c.evaluate(0.7).mean() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn preconditions() {
        let u = SpectralField::from_fn(g(), |x| (11.0 * x).cos());
        assert!(taylor_time_series(&u, 3).is_err());
        let v = SpectralField::from_fn(g(), f64::cos);
        assert!(taylor_time_series(&v, 31).is_err());
    }

    #[test]
    fn first_coefficient_is_the_rhs() {
        let u = SpectralField::from_fn(g(), |x| 0.4 * x.cos() + 0.1 * (2.0 * x).sin());
        let ts = taylor_time_series(&u, 2).unwrap();
        assert!(ts.coeffs[1].sup_distance(&crate::solver::fw_rhs(&u)) < 1e-15);
        assert!(ts.recursion_defect() < 1e-15);
    }

    #[test]
    fn derivatives_match_repeated_dx() {
        let u = SpectralField::from_fn(g(), |x| (3.0 * x).sin() + 0.2 * (7.0 * x).cos());
        let ds = spatial_derivatives(&u, 4);
        for (k, d) in ds.iter().enumerate() {
            let oracle = differentiate(&u, (k + 1) as u32).unwrap();
            assert!(d.sup_distance(&oracle) < 1e-10);
        }
    }

    #[test]
    fn es_norm_examples() {
        let z = spatial_derivatives(&SpectralField::zeros(g()), 6);
        assert_eq!(es_norm(&z, 0.5).unwrap(), 0.0);
        let c = spatial_derivatives(&SpectralField::from_fn(g(), f64::cos), 20);
        let mut prev = 0.0;
        for s in [0.1, 0.3, 0.5, 0.9] {
            let v = es_norm(&c, s).unwrap();
            assert!(v.is_finite() && v >= prev);
            prev = v;
        }
        // every derivative of cos has the same norm; at s = 1/2 the k = 1 term 4s = 2 wins
        let n1 = DyadicSystem::shared().besov_norm(&c[0], BesovParams::new(1.5, Summability::Finite(1.0)).unwrap());
        assert!((es_norm(&c, 0.5).unwrap() - 2.0 * n1).abs() < 1e-12 * n1);
        assert!(es_norm(&c, 1.0).is_err());
    }
}
