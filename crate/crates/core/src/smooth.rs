//! C^∞ ramp used to build compactly supported cutoffs.

/// `exp(-1/t)` for `t > 0`, zero otherwise.
#[inline]
fn flat(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth step `ψ(t) = f(t) / (f(t) + f(1 - t))`.
///
/// Identically 0 for `t <= 0`, identically 1 for `t >= 1`, and C^∞ everywhere.
#[inline]
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = flat(t);
    let b = flat(1.0 - t);
    a / (a + b)
}

/// Even plateau profile: 1 on `|x| <= inner`, 0 on `|x| >= outer`.
#[inline]
pub fn plateau(x: f64, inner: f64, outer: f64) -> f64 {
    debug_assert!(outer > inner);
    smooth_step((outer - x.abs()) / (outer - inner))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_endpoints_and_symmetry() {
        assert_eq!(smooth_step(-1.0), 0.0);
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert_eq!(smooth_step(2.0), 1.0);
        for i in 1..100 {
            let t = i as f64 / 100.0;
            let v = smooth_step(t);
            assert!((0.0..=1.0).contains(&v));
            assert!((v + smooth_step(1.0 - t) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn step_is_monotone() {
        let mut prev = 0.0;
        for i in 0..=1000 {
            let v = smooth_step(i as f64 / 1000.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn plateau_support() {
        assert_eq!(plateau(0.0, 1.0, 2.0), 1.0);
        assert_eq!(plateau(-1.0, 1.0, 2.0), 1.0);
        assert_eq!(plateau(2.0, 1.0, 2.0), 0.0);
        assert!(plateau(1.5, 1.0, 2.0) > 0.0 && plateau(1.5, 1.0, 2.0) < 1.0);
    }
}
