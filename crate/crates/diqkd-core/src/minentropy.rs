//! Guessing-probability and min-entropy bounds in terms of S_alpha, and
//! the Tsirelson bounds for the family I_alpha^beta = beta <A1> + S_alpha.
//!
//! The stitch point used here, 1 + alpha^2 + sqrt(1 - alpha^4), is a
//! different quantity from the tangent-range endpoint
//! 2 sqrt(1 + alpha^2 - alpha^4) of the entropy bound; the two are kept
//! apart by name (`guessing_stitch_point` vs `find_s_star`'s bracket).

use crate::entropy::BellValue;
use crate::error::{Error, Result};
use crate::math;

/// Bell value where the guessing-probability bound switches from its
/// analytic piece to the tangent line, for |alpha| < 1:
/// S_* = 1 + alpha^2 + sqrt(1 - alpha^4).
pub fn guessing_stitch_point(alpha: f64) -> f64 {
    let a2 = alpha * alpha;
    1.0 + a2 + math::sqrt((1.0 - a2 * a2).max(0.0))
}

/// Slope parameter of the tangent piece, for |alpha| < 1:
/// beta_* = (2/alpha^2)(1 - sqrt(1 - alpha^4)).
pub fn tsirelson_beta_star(alpha: f64) -> f64 {
    let a2 = alpha * alpha;
    2.0 / a2 * (1.0 - math::sqrt((1.0 - a2 * a2).max(0.0)))
}

/// Tight upper bound on Eve's guessing probability P_g(A1|E) given the
/// Bell value s.
pub fn guessing_probability_bound(alpha: f64, s: BellValue) -> Result<f64> {
    let a = math::abs(alpha);
    let sv = math::abs(s.value());
    let quantum = BellValue::quantum_bound(alpha);
    if sv < 2.0 - 1e-9 || sv > quantum + 1e-9 {
        return Err(Error::Domain {
            what: "guessing probability requires 2 <= |s| <= quantum bound",
            value: s.value(),
        });
    }
    let sv = sv.min(quantum).max(2.0);
    // below the classical bound (possible for |alpha| > 1) guessing is free
    let analytic = (0.5 + 0.5 * math::sqrt((1.0 + a * a - sv * sv / 4.0).max(0.0))).min(1.0);
    if a >= 1.0 {
        return Ok(analytic);
    }
    if a == 0.0 {
        return Err(Error::Domain {
            what: "guessing probability requires alpha != 0 for |alpha| < 1",
            value: alpha,
        });
    }
    let stitch = guessing_stitch_point(alpha);
    if sv >= stitch {
        Ok(analytic)
    } else {
        Ok(1.0 - (sv / 2.0 - 1.0) / tsirelson_beta_star(alpha))
    }
}

/// H_min(A1|E) = -log2 P_g.
pub fn min_entropy_bound(alpha: f64, s: BellValue) -> Result<f64> {
    Ok(-math::log2(guessing_probability_bound(alpha, s)?))
}

/// Quantum (Tsirelson) bound on I_alpha^beta = beta <A1> + S_alpha.
pub fn tsirelson_i_alpha_beta(alpha: f64, beta: f64) -> f64 {
    let a = math::abs(alpha);
    let b = math::abs(beta);
    let curved = 2.0 * math::sqrt((1.0 + a * a) * (1.0 + b * b / 4.0));
    if a >= 1.0 {
        if b <= 2.0 / a {
            curved
        } else {
            b + 2.0 * a
        }
    } else if b <= tsirelson_beta_star(alpha) {
        curved
    } else {
        b + 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT_8: f64 = 2.828_427_124_746_190_3;

    #[test]
    fn guessing_probability_anchors() {
        assert!((guessing_probability_bound(1.0, BellValue(SQRT_8)).unwrap() - 0.5).abs() < 1e-12);
        assert!((guessing_probability_bound(1.0, BellValue(2.0)).unwrap() - 1.0).abs() < 1e-12);
        // deterministic anchor for |alpha| < 1 sits at s = 2
        assert!((guessing_probability_bound(0.7, BellValue(2.0)).unwrap() - 1.0).abs() < 1e-12);
        // and for |alpha| > 1 at s = 2|alpha|
        assert!((guessing_probability_bound(1.4, BellValue(2.8)).unwrap() - 1.0).abs() < 1e-12);
        assert!(guessing_probability_bound(1.0, BellValue(1.9)).is_err());
        assert!(guessing_probability_bound(1.0, BellValue(2.9)).is_err());
    }

    #[test]
    fn stitch_continuity() {
        for &a in &[0.3, 0.5, 0.8, 0.95, 0.999] {
            let s = guessing_stitch_point(a);
            let lo = guessing_probability_bound(a, BellValue(s * (1.0 - 1e-13))).unwrap();
            let hi = guessing_probability_bound(a, BellValue(s * (1.0 + 1e-13))).unwrap();
            assert!((lo - hi).abs() < 1e-10, "alpha={a}: {lo} vs {hi}");
        }
        // spot value for alpha = 0.8
        let s = guessing_stitch_point(0.8);
        assert!((s - (1.64 + 0.5904f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn linear_piece_is_tangent_at_stitch() {
        // analytic slope d/ds [1/2 + 1/2 sqrt(1+a^2-s^2/4)] at S_* equals
        // the linear slope -1/(2 beta_*); shown exactly by
        // (1 + a^2 + w)^2 = 2 (1 + a^2)(1 + w) with w = sqrt(1 - a^4)
        for &a in &[0.3, 0.5, 0.8, 0.95] {
            let s = guessing_stitch_point(a);
            let root = (1.0 + a * a - s * s / 4.0f64).sqrt();
            let analytic_slope = -s / (8.0 * root);
            let linear_slope = -1.0 / (2.0 * tsirelson_beta_star(a));
            assert!(
                (analytic_slope - linear_slope).abs() < 1e-8,
                "alpha={a}: {analytic_slope} vs {linear_slope}"
            );
        }
    }

    #[test]
    fn min_entropy_values() {
        assert!((min_entropy_bound(1.0, BellValue(SQRT_8)).unwrap() - 1.0).abs() < 1e-12);
        assert!(min_entropy_bound(1.0, BellValue(2.0)).unwrap().abs() < 1e-12);
        // direct arithmetic: -log2(1/2 + 1/2 sqrt(2 - 2.5^2/4))
        let expect = -(0.5 + 0.5 * (2.0f64 - 1.5625).sqrt()).log2();
        let got = min_entropy_bound(1.0, BellValue(2.5)).unwrap();
        assert!((got - expect).abs() < 1e-14);
        assert!((got - 0.267_567_7).abs() < 1e-6);
    }

    #[test]
    fn tsirelson_continuity_and_anchors() {
        assert!((tsirelson_i_alpha_beta(1.0, 0.0) - SQRT_8).abs() < 1e-14);
        // boundary |beta| = 2/|alpha|: both pieces give 4 at alpha = 1
        assert!((tsirelson_i_alpha_beta(1.0, 2.0) - 4.0).abs() < 1e-12);
        for &a in &[0.3, 0.6, 0.8, 0.95] {
            let bs = tsirelson_beta_star(a);
            let lo = tsirelson_i_alpha_beta(a, bs * (1.0 - 1e-13));
            let hi = tsirelson_i_alpha_beta(a, bs * (1.0 + 1e-13));
            assert!((lo - hi).abs() < 1e-10, "alpha={a}");
        }
    }

    #[test]
    fn min_entropy_below_von_neumann_bound() {
        // the certified min-entropy floor never exceeds the von Neumann
        // floor at the same Bell value
        use crate::entropy::{BoundParams, EntropyBound};
        for i in 0..=20 {
            let alpha = 0.3 + 1.2 * i as f64 / 20.0;
            let params = BoundParams::new(0.0, alpha).unwrap();
            let bound = EntropyBound::new(params).unwrap();
            let lo = BellValue::classical_bound(alpha);
            let hi = BellValue::quantum_bound(alpha);
            for j in 0..=40 {
                let s = lo + (hi - lo) * j as f64 / 40.0;
                let hmin = min_entropy_bound(alpha, BellValue(s)).unwrap();
                let hvn = bound.evaluate(BellValue(s)).unwrap().value;
                assert!(hmin <= hvn + 1e-9, "alpha={alpha} s={s}: {hmin} > {hvn}");
            }
        }
    }
}
