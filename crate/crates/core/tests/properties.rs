use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fwbesov::experiments::*;
use fwbesov::solver::*;
use fwbesov::spectral::*;
use fwbesov::*;

fn field(n: usize, kmax: usize, amp: f64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SpectralField::random_band_limited(TorusGrid::periodic(n).unwrap(), kmax, amp, &mut rng)
}

/// Random field with no content at `|κ| < 2`, so every block has `q >= 0`.
fn high_field(n: usize, kmax: usize, seed: u64) -> SpectralField {
    let u = field(n, kmax, 1.0, seed);
    u.apply_multiplier(|k| if k < 2.0 { 0.0 } else { 1.0 })
}

fn besov(s: f64, r: Summability) -> BesovParams {
    BesovParams::new(s, r).unwrap()
}

fn summability() -> impl Strategy<Value = Summability> {
    prop_oneof![
        Just(Summability::Finite(1.0)),
        Just(Summability::Finite(2.0)),
        (1.0f64..6.0).prop_map(Summability::Finite),
        Just(Summability::Infinite),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transform_round_trip(e in 3u32..11, seed in any::<u64>()) {
        let n = 1usize << e;
        let u = field(n, n / 2 - 1, 1.0, seed);
        let back = transform_forward(*u.grid(), &transform_inverse(&u)).unwrap();
        prop_assert!(back.coeff_distance(&u) < 1e-14);
    }

    #[test]
    fn second_derivative_is_derivative_squared(seed in any::<u64>(), kmax in 1usize..20) {
        let u = field(64, kmax, 1.0, seed);
        let twice = dx(&dx(&u));
        let direct = differentiate(&u, 2).unwrap();
        prop_assert!(twice.coeff_distance(&direct) < 1e-11);
    }

    #[test]
    fn partition_of_unity_on_reals(xi in 0.0f64..5000.0) {
        let sys = DyadicSystem::shared();
        let total: f64 = sys.chi(xi) + (0..16).map(|q| sys.phi(xi / f64::powi(2.0, q))).sum::<f64>();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn norm_is_homogeneous_and_subadditive(
        s in -1.0f64..3.0, r in summability(), a in -3.0f64..3.0, seed in any::<u64>()
    ) {
        let sys = DyadicSystem::shared();
        let p = besov(s, r);
        let u = field(128, 40, 1.0, seed);
        let v = field(128, 40, 1.0, seed.wrapping_add(1));
        let nu = sys.besov_norm(&u, p);
        prop_assert!((sys.besov_norm(&u.scale(a), p) - a.abs() * nu).abs() <= 1e-12 * nu.max(1.0));
        prop_assert!(sys.besov_norm(&(&u + &v), p) <= nu + sys.besov_norm(&v, p) + 1e-12);
    }

    #[test]
    fn interpolation_inequality(
        s1 in 0.0f64..2.0, gap in 0.1f64..2.0, r in summability(), seed in any::<u64>(), kmax in 2usize..60
    ) {
        let sys = DyadicSystem::shared();
        let u = field(256, kmax, 1.0, seed);
        let s2 = s1 + gap;
        for theta in [0.25, 0.5, 0.75] {
            let mid = sys.besov_norm(&u, besov(theta * s1 + (1.0 - theta) * s2, r));
            let bound = sys.besov_norm(&u, besov(s1, r)).powf(theta) * sys.besov_norm(&u, besov(s2, r)).powf(1.0 - theta);
            prop_assert!(mid <= bound * (1.0 + 1e-9));
        }
    }

    #[test]
    fn monotone_in_s_without_low_modes(
        s in -1.0f64..3.0, ds in 0.0f64..1.0, r in summability(), seed in any::<u64>(), kmax in 2usize..60
    ) {
        let sys = DyadicSystem::shared();
        let u = high_field(256, kmax, seed);
        prop_assert!(sys.besov_norm(&u, besov(s, r)) <= sys.besov_norm(&u, besov(s + ds, r)) + 1e-12);
    }

    #[test]
    fn norm_nonincreasing_in_r(s in -1.0f64..3.0, r in 1.0f64..8.0, dr in 0.0f64..4.0, seed in any::<u64>()) {
        let sys = DyadicSystem::shared();
        let u = field(256, 100, 1.0, seed);
        let a = sys.besov_norm(&u, besov(s, Summability::Finite(r)));
        let b = sys.besov_norm(&u, besov(s, Summability::Finite(r + dr)));
        let c = sys.besov_norm(&u, besov(s, Summability::Infinite));
        prop_assert!(b <= a * (1.0 + 1e-12) && c <= b * (1.0 + 1e-12));
    }

    #[test]
    fn mollifier_never_increases_norm(n in 1usize..64, s in 0.0f64..3.0, seed in any::<u64>()) {
        let sys = DyadicSystem::shared();
        let u = field(128, 60, 1.0, seed);
        let p = besov(s, Summability::Finite(2.0));
        prop_assert!(sys.besov_norm(&mollify(&u, n).unwrap(), p) <= sys.besov_norm(&u, p) + 1e-12);
    }

    #[test]
    fn dealiased_product_is_real_and_symmetric(seed in any::<u64>()) {
        let u = field(64, 20, 1.0, seed);
        let v = field(64, 20, 1.0, seed ^ 0x5555);
        let uv = dealiased_product(&u, &v).unwrap();
        prop_assert!(uv.hermitian_defect() < 1e-15);
        prop_assert!(uv.coeff_distance(&dealiased_product(&v, &u).unwrap()) < 1e-15);
    }

    #[test]
    fn residue_forms_agree(n in 1usize..40, s in 1.2f64..3.0, t in 0.0f64..5.0, v_branch in any::<bool>()) {
        let branch = if v_branch { Branch::V } else { Branch::U };
        let grid = TorusGrid::periodic((6 * n).next_power_of_two().max(8)).unwrap();
        let spec = ApproxSolutionSpec::new(n, s, branch).unwrap();
        let a = residue_field(spec, t, grid).unwrap();
        let b = residue_by_terms(spec, t, grid).unwrap();
        prop_assert!(a.sup_distance(&b) < 1e-12);
    }

    #[test]
    fn exponents_meet_at_the_seam(gamma in 0.01f64..1.9, extra in 0.01f64..3.0) {
        let s2 = 2.0 + extra;
        let below = 2.0 * 2.0 - 1.0 - gamma;
        prop_assert!((alpha_exponent(2.0, gamma).unwrap() - below).abs() < 1e-14);
        let below_beta = (s2 - 2.0) * (2.0 - 1.0) / (s2 - gamma);
        prop_assert!((beta_exponent(2.0, gamma, s2).unwrap() - below_beta).abs() < 1e-14);
    }

    #[test]
    fn exact_power_laws_are_recovered(e in -4.0f64..4.0, b in -5.0f64..5.0) {
        let ns: Vec<f64> = (3..9).map(|k| f64::powi(2.0, k)).collect();
        let vals: Vec<f64> = ns.iter().map(|n| (b - e * n.ln()).exp()).collect();
        let fit = fit_decay_exponent(&ns, &vals).unwrap();
        prop_assert!((fit.fitted_exponent - e).abs() < 1e-10);
        prop_assert!(fit.r_squared > 1.0 - 1e-10);
    }

    #[test]
    fn es_norm_nondecreasing_in_order(seed in any::<u64>(), s in 0.05f64..0.95) {
        let u = field(64, 8, 1.0, seed);
        let d = spatial_derivatives(&u, 16);
        let mut prev = 0.0;
        for k in 1..=16 {
            let v = es_norm(&d[..k], s).unwrap();
            prop_assert!(v >= prev);
            prev = v;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn transport_is_linear(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let g = TorusGrid::periodic(32).unwrap();
        let cfg = SolverConfig::new(g, 0.01, 0.3).unwrap();
        let vel = ConstantSource(field(32, 4, 0.5, seed));
        let (f1, f2) = (field(32, 8, 1.0, seed ^ 1), field(32, 8, 1.0, seed ^ 2));
        let (g1, g2) = (field(32, 8, 1.0, seed ^ 3), field(32, 8, 1.0, seed ^ 4));
        let run = |f0: &SpectralField, force: &SpectralField| {
            transport_evolve(&vel, f0, &ConstantSource(force.clone()), &cfg).unwrap()
        };
        let combo = run(&f1.scale(a).axpy(b, &f2), &g1.scale(a).axpy(b, &g2));
        let (r1, r2) = (run(&f1, &g1), run(&f2, &g2));
        let expect = r1.final_state().scale(a).axpy(b, r2.final_state());
        prop_assert!(combo.final_state().sup_distance(&expect) < 1e-10);
    }

    #[test]
    fn mean_is_conserved(seed in any::<u64>()) {
        let u0 = field(64, 10, 0.5, seed);
        let cfg = SolverConfig::new(*u0.grid(), 5e-3, 0.5).unwrap();
        let traj = evolve(&u0, &cfg).unwrap();
        for s in &traj.states {
            prop_assert!((s.mean() - u0.mean()).abs() < 1e-10);
        }
    }

    #[test]
    fn taylor_recursion_self_consistent(seed in any::<u64>(), k in 1usize..20) {
        // bandwidth 3 (k + 1) stays below N/3, so no product is truncated
        let u0 = field(256, 3, 0.2, seed);
        let series = taylor_time_series(&u0, k).unwrap();
        prop_assert!(series.recursion_defect() < 1e-13);
        prop_assert!(series.coeffs[0].coeff_distance(&u0) == 0.0);
    }
}
