//! Invariant suites for the entropy bound family and its limits.

use diqkd_core::*;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn bound_at(q: f64, alpha: f64, s: f64) -> f64 {
    entropy_bound(&BoundParams::new(q, alpha).unwrap(), BellValue(s))
        .unwrap()
        .value
}

proptest! {
    #[test]
    fn bound_is_even_in_s(
        q in 0.0..0.5f64,
        alpha in 0.3..1.5f64,
        frac in 0.0..1.0f64,
    ) {
        let s = frac * BellValue::quantum_bound(alpha);
        let plus = bound_at(q, alpha, s);
        let minus = bound_at(q, alpha, -s);
        prop_assert!((plus - minus).abs() < 1e-14);
    }

    #[test]
    fn convexity_chord_condition(
        q in 0.0..0.5f64,
        alpha in 0.3..1.5f64,
        f1 in 0.0..1.0f64,
        f2 in 0.0..1.0f64,
        f3 in 0.0..1.0f64,
    ) {
        // for s1 < s2 < s3 in [2, Q_alpha] the curve lies below the chord
        let lo = 2.0;
        let hi = BellValue::quantum_bound(alpha);
        let mut ss = [
            lo + (hi - lo) * f1,
            lo + (hi - lo) * f2,
            lo + (hi - lo) * f3,
        ];
        ss.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        let [s1, s2, s3] = ss;
        prop_assume!(s3 - s1 > 1e-9);
        let lam = (s3 - s2) / (s3 - s1);
        let chord = lam * bound_at(q, alpha, s1) + (1.0 - lam) * bound_at(q, alpha, s3);
        prop_assert!(bound_at(q, alpha, s2) <= chord + 1e-9);
    }

    #[test]
    fn flip_composition(
        q1 in 0.0..0.5f64,
        q2 in 0.0..0.5f64,
        eta in 0.5..1.0f64,
    ) {
        let d = loss_maxent_distribution(eta);
        let twice = preprocess_flip(&preprocess_flip(&d, q1).unwrap(), q2).unwrap();
        let once = preprocess_flip(&d, q1 + q2 - 2.0 * q1 * q2).unwrap();
        for j in 0..3 {
            prop_assert!((twice.prob(0, j) - once.prob(0, j)).abs() < 1e-14);
            prop_assert!((twice.prob(1, j) - once.prob(1, j)).abs() < 1e-14);
        }
    }

    #[test]
    fn feasible_points_pass_the_eigen_test(
        lambda in 0.0..1.0f64,
        mu in 0.0..1.0f64,
        z in 0.0..core::f64::consts::PI,
        x in 0.0..core::f64::consts::PI,
    ) {
        // polar points with the determinant constraint satisfied must pass
        // feasibility_check, and the Sylvester form must agree with the
        // sign of the minimum eigenvalue of I - E E^T
        let p = OracleSearchPoint { lambda, mu, z_angle: z, x_angle: x };
        let m = p.to_correlations();
        let g00 = 1.0 - m.e_zz * m.e_zz - m.e_zx * m.e_zx;
        let g11 = 1.0 - m.e_xz * m.e_xz - m.e_xx * m.e_xx;
        let g01 = -(m.e_zz * m.e_xz + m.e_zx * m.e_xx);
        let half_tr = 0.5 * (g00 + g11);
        let det = g00 * g11 - g01 * g01;
        let min_eig = half_tr - (half_tr * half_tr - det).max(0.0).sqrt();
        prop_assert_eq!(feasibility_check(&m), min_eig >= -1e-9);
    }
}

#[test]
fn classical_and_quantum_anchors() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..200 {
        let q = rng.gen_range(0.0..0.5);
        let alpha = rng.gen_range(0.3..1.5);
        let hq = binary_entropy(q).unwrap();
        let classical = BellValue::classical_bound(alpha);
        let quantum = BellValue::quantum_bound(alpha);
        assert!(
            (bound_at(q, alpha, classical) - hq).abs() < 1e-10,
            "classical anchor q={q} alpha={alpha}"
        );
        assert!(
            (bound_at(q, alpha, quantum) - 1.0).abs() < 1e-10,
            "quantum anchor q={q} alpha={alpha}"
        );
        if alpha < 1.0 {
            assert!((bound_at(q, alpha, 2.0) - hq).abs() < 1e-10);
        }
        // range invariant: h(q) floor above the classical bound, 1 ceiling
        let s = rng.gen_range(2.0..quantum);
        let v = bound_at(q, alpha, s);
        assert!(
            v >= hq - 1e-12 && v <= 1.0 + 1e-12,
            "q={q} alpha={alpha} s={s}"
        );
    }
}

#[test]
fn bound_nondecreasing_in_q() {
    for ai in 0..8 {
        let alpha = 0.4 + 1.0 * ai as f64 / 7.0;
        for si in 0..12 {
            let s = 2.0 + (BellValue::quantum_bound(alpha) - 2.0) * si as f64 / 11.0;
            let mut prev = f64::NEG_INFINITY;
            for qi in 0..=24 {
                let q = 0.5 * qi as f64 / 24.0;
                let v = bound_at(q, alpha, s);
                assert!(v >= prev - 1e-12, "alpha={alpha} s={s} q={q}");
                prev = v;
            }
        }
    }
}

#[test]
fn lemma_convex_increasing() {
    // f(x) = 1 + phi(sqrt(Q + (1-Q)x)) - phi(sqrt(x)) has nonnegative
    // first and second finite differences on x in [0.01, 0.99]
    let f = |big_q: f64, x: f64| {
        1.0 + phi((big_q + (1.0 - big_q) * x).sqrt()).unwrap() - phi(x.sqrt()).unwrap()
    };
    let h = 1e-4;
    for qi in 0..=10 {
        let big_q = qi as f64 / 10.0;
        for xi in 0..=98 {
            let x = 0.01 + 0.98 * xi as f64 / 98.0;
            let first = f(big_q, x + h) - f(big_q, x - h);
            let second = f(big_q, x + h) - 2.0 * f(big_q, x) + f(big_q, x - h);
            assert!(first >= -1e-7, "Q={big_q} x={x}: first {first}");
            assert!(second >= -1e-7 * h, "Q={big_q} x={x}: second {second}");
        }
    }
}

#[test]
fn lemma_concave_decreasing() {
    // f(x) = 1 + phi(sqrt(Q + (1-Q)(1-x^2))) - phi(sqrt(1-x^2)) has
    // nonpositive first and second finite differences
    let f = |big_q: f64, x: f64| {
        let u = 1.0 - x * x;
        1.0 + phi((big_q + (1.0 - big_q) * u).sqrt()).unwrap() - phi(u.sqrt()).unwrap()
    };
    let h = 1e-4;
    for qi in 0..=10 {
        let big_q = qi as f64 / 10.0;
        for xi in 0..=98 {
            let x = 0.01 + 0.98 * xi as f64 / 98.0;
            let first = f(big_q, x + h) - f(big_q, x - h);
            let second = f(big_q, x + h) - 2.0 * f(big_q, x) + f(big_q, x - h);
            assert!(first <= 1e-7, "Q={big_q} x={x}: first {first}");
            assert!(second <= 1e-7 * h, "Q={big_q} x={x}: second {second}");
        }
    }
}

#[test]
fn epsilon_expansion_matches_exact_rates() {
    // exact Devetak-Winter rate at q = (1 - eps)/2 approaches
    // coefficient * eps^2: 10% at eps = 1e-2, 1% at eps = 1e-3
    let mut rng = StdRng::seed_from_u64(42);
    let mut checked = 0;
    while checked < 50 {
        let alpha = rng.gen_range(0.5..1.4);
        let model = match rng.gen_range(0..3) {
            0 => ChannelModel::Depolarizing {
                delta: rng.gen_range(0.0..0.06),
                bob_optimal: rng.gen::<bool>(),
            },
            1 => ChannelModel::LossMaxEntangled {
                eta: rng.gen_range(0.92..1.0),
                bob_optimal: rng.gen::<bool>(),
                visibility: rng.gen_range(0.97..1.0),
            },
            _ => ChannelModel::LossPartialEntangled {
                eta: rng.gen_range(0.92..1.0),
                theta: rng.gen_range(0.3..1.5),
                phi_a: rng.gen_range(0.3..1.5),
                visibility: rng.gen_range(0.97..1.0),
            },
        };
        let coeff = maxq_rate_coeff(&model, alpha).unwrap().coefficient;
        if coeff.abs() < 1e-3 {
            // avoid relative comparisons across a sign change
            continue;
        }
        checked += 1;
        for (eps, tol) in [(1e-2, 0.10), (1e-3, 0.01)] {
            let q = (1.0 - eps) / 2.0;
            let exact = devetak_winter(&model, q, alpha).unwrap().rate;
            let approx = coeff * eps * eps;
            assert!(
                ((exact - approx) / approx).abs() < tol,
                "model {model:?} alpha={alpha} eps={eps}: exact {exact:e} vs {approx:e}"
            );
        }
    }
}

#[test]
fn maxq_partial_small_angle_consistency() {
    // at theta = 1e-4 the full coefficient matches the small-angle closed
    // form to 0.1% relative
    for eta in [0.84, 0.9, 0.96] {
        // the expansion needs theta << phi_a << 1; phi_a ~ 2e-2 balances
        // the (theta/phi_a)^2 and phi_a^2 correction terms at theta = 1e-4
        let model = ChannelModel::LossPartialEntangled {
            eta,
            theta: 1e-4,
            phi_a: 2e-2,
            visibility: 1.0,
        };
        let full = maxq_rate_coeff(&model, 1.0).unwrap().coefficient / 1e-8;
        let closed = eta * (3.0 * eta * eta + 6.0 * eta - 7.0) / (6.0 * core::f64::consts::LN_2);
        assert!(
            ((full - closed) / closed).abs() < 1e-3,
            "eta={eta}: {full} vs {closed}"
        );
    }
}

#[test]
fn tightness_against_explicit_attack() {
    // on the analytic branch the bound equals the attack entropy at
    // F = sqrt(s^2/4 - alpha^2)
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..300 {
        let q = rng.gen_range(0.0..0.5);
        let alpha = rng.gen_range(0.3..1.5);
        let params = BoundParams::new(q, alpha).unwrap();
        let bound = EntropyBound::new(params).unwrap();
        let lo = if alpha < 1.0 {
            match find_s_star(&params) {
                Ok(s) => s,
                Err(_) => continue,
            }
        } else {
            2.0 * alpha
        };
        let hi = BellValue::quantum_bound(alpha);
        if hi - lo < 1e-9 {
            continue;
        }
        let s = rng.gen_range(lo..hi);
        let ev = bound.evaluate(BellValue(s)).unwrap();
        assert_eq!(ev.branch, Branch::Analytic);
        let f = (s * s / 4.0 - alpha * alpha).max(0.0).sqrt();
        let attack = attack_entropy_closed_form(q, f.min(1.0)).unwrap();
        assert!(
            (ev.value - attack).abs() < 1e-10,
            "q={q} alpha={alpha} s={s}: {} vs {attack}",
            ev.value
        );
    }
}

#[test]
fn best_alpha_recovers_unity_at_the_edges() {
    // optimal alpha tends to 1 at both ends of the symmetric-correlation
    // range
    let (a_low, _) = best_alpha_bound(0.0, 1.0 + 1e-6, 1.0 + 1e-6).unwrap();
    assert!((a_low - 1.0).abs() < 1e-2, "S -> 2: alpha {a_low}");
    let s = 2.0 * core::f64::consts::SQRT_2 - 1e-9;
    let (a_high, v) = best_alpha_bound(0.0, s / 2.0, s / 2.0).unwrap();
    assert!((a_high - 1.0).abs() < 1e-2, "S -> 2 sqrt 2: alpha {a_high}");
    assert!(v > 0.999);
}
