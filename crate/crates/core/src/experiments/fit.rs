use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Log-log least-squares fit `value ≈ b · n^{-exponent}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub ns: Vec<f64>,
    pub values: Vec<f64>,
    pub fitted_exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Minimise `Σ (log v_i + e log n_i - b)²` over `(e, b)`.
///
/// A constant sequence has `r² = 1` by convention (zero total variance).
pub fn fit_decay_exponent(ns: &[f64], values: &[f64]) -> Result<DecayFit> {
    if ns.len() != values.len() {
        return Err(invalid("values", "length differs from ns"));
    }
    if ns.len() < 4 {
        return Err(invalid("ns", format!("need at least 4 points, got {}", ns.len())));
    }
    if ns.windows(2).any(|w| w[1] <= w[0]) || ns[0] <= 0.0 {
        return Err(invalid("ns", "must be positive and strictly increasing"));
    }
    if values.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(invalid("values", "must be positive and finite"));
    }
    let xs: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let m = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ss_tot: f64 = ys.iter().map(|y| (y - ybar).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if ss_tot <= f64::EPSILON * m * (1.0 + ybar * ybar) {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(DecayFit {
        ns: ns.to_vec(),
        values: values.to_vec(),
        fitted_exponent: -slope,
        intercept,
        r_squared,
    })
}
