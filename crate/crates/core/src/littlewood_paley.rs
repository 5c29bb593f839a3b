//! Littlewood–Paley dyadic decomposition and Besov norms `B^s_{2,r}`.
//!
//! The low-frequency profile `χ` equals 1 on `|ξ| <= 1` and ramps smoothly to 0 at
//! `|ξ| = 4/3`; the ring profile is `φ(ξ) = χ(ξ/2) - χ(ξ)`, supported in
//! `1 <= |ξ| <= 8/3`. Summing the blocks telescopes, so the partition of unity
//! holds to rounding error on every grid.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::smooth::plateau;
use crate::spectral::{SpectralField, TorusGrid};

/// Summability index `r` of `B^s_{2,r}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Summability {
    Finite(f64),
    Infinite,
}

impl Summability {
    pub fn finite(r: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 1.0) {
            return Err(invalid("r", format!("{r} is not in [1, ∞)")));
        }
        Ok(Self::Finite(r))
    }
}

impl fmt::Display for Summability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Summability::Finite(r) => write!(f, "{r}"),
            Summability::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Summability {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Self::Infinite),
            other => {
                let r: f64 = other
                    .parse()
                    .map_err(|_| invalid("r", format!("cannot parse `{s}`")))?;
                Self::finite(r)
            }
        }
    }
}

/// Exponent pair `(s, r)` with `p = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub s: f64,
    pub r: Summability,
}

impl BesovParams {
    pub fn new(s: f64, r: Summability) -> Result<Self> {
        if !s.is_finite() {
            return Err(invalid("s", "must be finite"));
        }
        if let Summability::Finite(v) = r {
            Summability::finite(v)?;
        }
        Ok(Self { s, r })
    }

    pub fn with_s(self, s: f64) -> Self {
        Self { s, ..self }
    }

    /// Parameter range in which the Cauchy problem is locally well posed.
    pub fn well_posed(&self) -> bool {
        match self.r {
            Summability::Finite(1.0) => self.s >= 1.5,
            Summability::Finite(_) => self.s > 1.5,
            Summability::Infinite => false,
        }
    }
}

/// Sparse table of block multipliers for one grid.
///
/// `entries[q + 1]` lists `(fft index, weight)` for block `q >= -1`.
#[derive(Debug)]
pub struct BlockTable {
    entries: Vec<Vec<(usize, f64)>>,
}

impl BlockTable {
    pub fn q_max(&self) -> i32 {
        self.entries.len() as i32 - 2
    }

    pub fn block(&self, q: i32) -> &[(usize, f64)] {
        if q < -1 || q > self.q_max() {
            &[]
        } else {
            &self.entries[(q + 1) as usize]
        }
    }
}

type GridKey = (usize, u64);

/// The cutoff pair `(χ, φ)` plus a per-grid cache of block tables.
#[derive(Debug, Default)]
pub struct DyadicSystem {
    tables: RwLock<HashMap<GridKey, Arc<BlockTable>>>,
}

/// Construct the dyadic system. Profiles are fixed, so every call agrees.
pub fn build_dyadic_system() -> DyadicSystem {
    DyadicSystem::default()
}

impl DyadicSystem {
    /// Process-wide instance.
    pub fn shared() -> &'static DyadicSystem {
        static SHARED: OnceLock<DyadicSystem> = OnceLock::new();
        SHARED.get_or_init(build_dyadic_system)
    }

    /// Low-frequency profile `χ`.
    #[inline]
    pub fn chi(&self, xi: f64) -> f64 {
        plateau(xi, 1.0, 4.0 / 3.0)
    }

    /// Ring profile `φ(ξ) = χ(ξ/2) - χ(ξ)`.
    #[inline]
    pub fn phi(&self, xi: f64) -> f64 {
        self.chi(0.5 * xi) - self.chi(xi)
    }

    /// Multiplier of block `q` at frequency `κ`.
    pub fn block_multiplier(&self, q: i32, kappa: f64) -> f64 {
        match q {
            q if q < -1 => 0.0,
            -1 => self.chi(kappa),
            q => self.phi(kappa * (-(q as f64)).exp2()),
        }
    }

    /// Highest block index considered on `grid`; all higher blocks vanish there.
    pub fn q_max(&self, grid: &TorusGrid) -> i32 {
        (grid.kappa_max().log2().ceil() as i32 + 1).max(0)
    }

    pub fn table(&self, grid: &TorusGrid) -> Arc<BlockTable> {
        let key = (grid.n(), grid.length().to_bits());
        if let Some(t) = self.tables.read().expect("poisoned").get(&key) {
            return Arc::clone(t);
        }
        let q_max = self.q_max(grid);
        let entries = (-1..=q_max)
            .map(|q| {
                (0..grid.n())
                    .filter_map(|j| {
                        let w = self.block_multiplier(q, grid.kappa(j).abs());
                        (w > 0.0).then_some((j, w))
                    })
                    .collect()
            })
            .collect();
        let table = Arc::new(BlockTable { entries });
        self.tables
            .write()
            .expect("poisoned")
            .entry(key)
            .or_insert(table)
            .clone()
    }

    /// `Δ_q u`.
    pub fn dyadic_block(&self, u: &SpectralField, q: i32) -> SpectralField {
        if q < -1 {
            return SpectralField::zeros(*u.grid());
        }
        u.apply_multiplier(|kappa| self.block_multiplier(q, kappa))
    }

    /// `S_q u = χ(2^{-q} D) u` for `q >= 0`.
    pub fn low_freq_cutoff(&self, u: &SpectralField, q: i32) -> Result<SpectralField> {
        if q < 0 {
            return Err(invalid("q", format!("{q} must be non-negative")));
        }
        let scale = (-(q as f64)).exp2();
        Ok(u.apply_multiplier(|kappa| self.chi(kappa * scale)))
    }

    /// `‖Δ_q u‖_{L²}` for `q = -1, 0, …, q_max` (index `q + 1`).
    pub fn block_norms(&self, u: &SpectralField) -> Vec<f64> {
        let table = self.table(u.grid());
        let length = u.grid().length();
        let coeffs = u.coeffs();
        (-1..=table.q_max())
            .map(|q| {
                let sum: f64 = table
                    .block(q)
                    .iter()
                    .map(|&(j, w)| w * w * coeffs[j].norm_sqr())
                    .sum();
                (length * sum).sqrt()
            })
            .collect()
    }

    /// `‖u‖_{B^s_{2,r}}`.
    pub fn besov_norm(&self, u: &SpectralField, params: BesovParams) -> f64 {
        let weighted = self
            .block_norms(u)
            .into_iter()
            .enumerate()
            .map(|(i, b)| (params.s * (i as f64 - 1.0)).exp2() * b);
        match params.r {
            Summability::Infinite => weighted.fold(0.0, f64::max),
            Summability::Finite(1.0) => weighted.sum(),
            Summability::Finite(2.0) => weighted.map(|x| x * x).sum::<f64>().sqrt(),
            Summability::Finite(r) => weighted.map(|x| x.powf(r)).sum::<f64>().powf(1.0 / r),
        }
    }
}

/// Bracket for `besov_norm(u, s, 2) / sobolev_norm(u, s)`, frozen from a
/// per-mode scan over `0 <= k <= 4096`, `s ∈ {1, 3/2, 2}` (minimum 0.125,
/// maximum 0.7763).
pub const SOBOLEV_RATIO_BRACKET: (f64, f64) = (0.12, 0.78);

/// Sobolev norm `(Σ_k (1+κ²)^s |coeff(k)|² L)^{1/2}`.
pub fn sobolev_norm(u: &SpectralField, s: f64) -> f64 {
    let g = u.grid();
    let sum: f64 = u
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let kappa = g.kappa(j);
            (1.0 + kappa * kappa).powf(s) * c.norm_sqr()
        })
        .sum();
    (g.length() * sum).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn sys() -> DyadicSystem {
        build_dyadic_system()
    }

    fn p(s: f64, r: Summability) -> BesovParams {
        BesovParams::new(s, r).unwrap()
    }

    #[test]
    fn profile_values() {
        let d = sys();
        assert_eq!(d.chi(0.0), 1.0);
        assert_eq!(d.phi(0.5), 0.0);
        assert_eq!(d.chi(4.0 / 3.0), 0.0);
        assert_eq!(d.phi(2.0), 1.0);
        assert_eq!(d.phi(8.0 / 3.0), 0.0);
        assert_eq!(d.phi(0.75), 0.0);
        let xi = 17.3;
        let total: f64 = d.chi(xi) + (0..12).map(|q| d.phi(xi * (-(q as f64)).exp2())).sum::<f64>();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn profiles_bounded() {
        let d = sys();
        for i in 0..4000 {
            let xi = i as f64 * 0.001;
            for v in [d.chi(xi), d.phi(xi)] {
                assert!((0.0..=1.0).contains(&v), "ξ = {xi}");
            }
        }
    }

    #[test]
    fn summability_parsing() {
        assert_eq!("inf".parse::<Summability>().unwrap(), Summability::Infinite);
        assert_eq!("2".parse::<Summability>().unwrap(), Summability::Finite(2.0));
        assert!("0.5".parse::<Summability>().is_err());
        assert!("abc".parse::<Summability>().is_err());
    }

    #[test]
    fn well_posed_regime() {
        assert!(p(1.5, Summability::Finite(1.0)).well_posed());
        assert!(!p(1.5, Summability::Finite(2.0)).well_posed());
        assert!(p(1.6, Summability::Finite(2.0)).well_posed());
        assert!(!p(3.0, Summability::Infinite).well_posed());
        assert!(!p(1.4, Summability::Finite(1.0)).well_posed());
    }

    #[test]
    fn block_examples() {
        let d = sys();
        let g = TorusGrid::periodic(64).unwrap();
        let c = SpectralField::constant(g, 2.5);
        assert!(d.dyadic_block(&c, -1).coeff_distance(&c) < 1e-15);
        assert!(d.dyadic_block(&c, -2).l2_norm() == 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = SpectralField::random_band_limited(g, 31, 1.0, &mut rng);
        let mut sum = SpectralField::zeros(g);
        for q in -1..=d.q_max(&g) {
            sum = &sum + &d.dyadic_block(&u, q);
        }
        assert!(sum.coeff_distance(&u) < 1e-12);
        for pq in -1i32..=5 {
            for qq in -1..=5 {
                if (pq - qq).abs() >= 2 {
                    let w = d.dyadic_block(&d.dyadic_block(&u, qq), pq);
                    assert_eq!(w.l2_norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn low_freq_cutoff_examples() {
        let d = sys();
        let g = TorusGrid::periodic(64).unwrap();
        let c = SpectralField::constant(g, -1.0);
        assert!(d.low_freq_cutoff(&c, 3).unwrap().coeff_distance(&c) < 1e-15);
        assert!(d.low_freq_cutoff(&c, -1).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = SpectralField::random_band_limited(g, 31, 1.0, &mut rng);
        assert!(d.low_freq_cutoff(&u, 0).unwrap().coeff_distance(&d.dyadic_block(&u, -1)) < 1e-15);
        for q in 0..6 {
            let s = d.low_freq_cutoff(&u, q).unwrap();
            let mut partial = SpectralField::zeros(g);
            for pq in -1..q {
                partial = &partial + &d.dyadic_block(&u, pq);
            }
            assert!(s.coeff_distance(&partial) < 1e-12);
            assert!(s.l2_norm() <= u.l2_norm() + 1e-14);
        }
    }

    #[test]
    fn besov_zero_field() {
        let d = sys();
        let z = SpectralField::zeros(TorusGrid::periodic(32).unwrap());
        for r in [Summability::Finite(1.0), Summability::Finite(2.5), Summability::Infinite] {
            assert_eq!(d.besov_norm(&z, p(1.7, r)), 0.0);
        }
    }

    #[test]
    fn besov_of_cos8_is_l2() {
        let d = sys();
        let g = TorusGrid::periodic(64).unwrap();
        let u = SpectralField::from_fn(g, |x| (8.0 * x).cos());
        // oracle: sum of squared multipliers over every block touching κ = 8
        let weight: f64 = (-1..=8).map(|q| d.block_multiplier(q, 8.0).powi(2)).sum();
        let oracle = (PI * weight).sqrt();
        let b = d.besov_norm(&u, p(0.0, Summability::Finite(2.0)));
        assert!((b - oracle).abs() < 1e-10);
        assert!((b - u.l2_norm()).abs() < 1e-10);
    }

    #[test]
    fn besov_scaling_of_normalised_cosines() {
        let d = sys();
        let (s, gamma) = (2.0, 0.5);
        let g = TorusGrid::periodic(2048).unwrap();
        let norm = |n: f64| {
            let u = SpectralField::from_fn(g, |x| n.powf(-s) * (n * x).cos());
            d.besov_norm(&u, p(gamma, Summability::Infinite))
        };
        let target = (gamma - s).exp2();
        for n in [16.0, 32.0, 64.0, 128.0, 256.0] {
            let ratio = norm(2.0 * n) / norm(n);
            assert!(ratio > 0.8 * target && ratio < 1.2 * target, "n = {n}: {ratio}");
        }
    }

    #[test]
    fn sobolev_examples() {
        let g = TorusGrid::periodic(32).unwrap();
        let c = SpectralField::constant(g, -3.0);
        assert!((sobolev_norm(&c, 2.7) - 3.0 * (2.0 * PI).sqrt()).abs() < 1e-13);
        let u = SpectralField::from_fn(g, f64::cos);
        assert!((sobolev_norm(&u, 1.0) - (2.0 * PI).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn r_monotonicity() {
        let d = sys();
        let g = TorusGrid::periodic(128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let u = SpectralField::random_band_limited(g, 40, 1.0, &mut rng);
            let inf = d.besov_norm(&u, p(1.0, Summability::Infinite));
            let one = d.besov_norm(&u, p(1.0, Summability::Finite(1.0)));
            let two = d.besov_norm(&u, p(1.0, Summability::Finite(2.0)));
            assert!(inf <= two + 1e-12 && two <= one + 1e-12);
        }
    }

    #[test]
    fn table_cache_is_reused() {
        let d = sys();
        let g = TorusGrid::periodic(256).unwrap();
        let a = d.table(&g);
        let b = d.table(&g);
        assert!(Arc::ptr_eq(&a, &b));
        let other = TorusGrid::new(256, 10.0).unwrap();
        assert!(!Arc::ptr_eq(&a, &d.table(&other)));
    }
}
