//! Independent verification machinery for the analytic bounds.
//!
//! Nothing here reuses the closed-form branch logic it is meant to check:
//! the correlator bound is minimized by brute force over the feasible
//! region of Pauli correlations, and the attack entropies are computed
//! spectrally from explicit state representations.

use alloc::vec::Vec;

use crate::entropy::BellValue;
use crate::error::{Error, Result};
use crate::linalg;
use crate::math;

/// 2x2 matrix of ZX-plane Pauli correlators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationMatrix {
    pub e_zz: f64,
    pub e_zx: f64,
    pub e_xz: f64,
    pub e_xx: f64,
}

const FEAS_SLACK: f64 = 1e-9;

/// True iff the correlations are realizable by a quantum state, i.e.
/// I - E E^T is positive semidefinite (Sylvester form), within slack.
pub fn feasibility_check(m: &CorrelationMatrix) -> bool {
    let row_z = m.e_zz * m.e_zz + m.e_zx * m.e_zx;
    let row_x = m.e_xz * m.e_xz + m.e_xx * m.e_xx;
    if row_z > 1.0 + FEAS_SLACK || row_x > 1.0 + FEAS_SLACK {
        return false;
    }
    let cross = m.e_zz * m.e_xz + m.e_zx * m.e_xx;
    (1.0 - row_z) * (1.0 - row_x) >= cross * cross - FEAS_SLACK
}

/// Polar parametrization of a correlation matrix:
/// E_zz = lambda cos z, E_zx = lambda sin z, E_xz = mu cos x,
/// E_xx = mu sin x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSearchPoint {
    pub lambda: f64,
    pub mu: f64,
    pub z_angle: f64,
    pub x_angle: f64,
}

impl OracleSearchPoint {
    pub fn to_correlations(&self) -> CorrelationMatrix {
        CorrelationMatrix {
            e_zz: self.lambda * math::cos(self.z_angle),
            e_zx: self.lambda * math::sin(self.z_angle),
            e_xz: self.mu * math::cos(self.x_angle),
            e_xx: self.mu * math::sin(self.x_angle),
        }
    }
}

/// Minimal mu^2 admissible at fixed angles (z, x), minimizing jointly
/// over lambda, or None if the column cannot satisfy the constraints.
///
/// Constraint set, in polar coordinates (l = lambda^2):
///   alpha^2 l cos^2 z + l sin^2 z + mu^2 sin^2 x >= s^2/4,
///   l <= 1, mu^2 <= 1,
///   (1 - l)(1 - mu^2) >= l mu^2 cos^2(z - x).
/// The Bell constraint gives mu^2(l) = (s^2/4 - l A)/sin^2 x, decreasing
/// in l; substituting it, the determinant constraint times sin^2 x is a
/// concave quadratic in l, so the largest feasible l (hence the smallest
/// mu) is closed-form.
fn column_min_mu_sq(alpha: f64, s_sq_quarter: f64, z: f64, x: f64) -> Option<(f64, f64)> {
    let cz = math::cos(z);
    let sz = math::sin(z);
    let a_zz = alpha * alpha * cz * cz + sz * sz;
    let sx = math::sin(x);
    let sx2 = sx * sx;
    if sx2 <= 1e-12 {
        // mu cannot contribute to the Bell value and l A < s^2/4 for s > 2
        return None;
    }
    let cd = math::cos(z - x);
    let cd2 = cd * cd;
    let t = s_sq_quarter;
    // det constraint scaled by sin^2 x: c2 l^2 + c1 l + c0 >= 0
    let c0 = sx2 - t;
    let c1 = a_zz - sx2 + t * (1.0 - cd2);
    let c2 = -a_zz * (1.0 - cd2);
    let l_best = if math::abs(c2) < 1e-14 {
        // cos^2(z - x) ~ 1: constraint is linear in l
        if c1 <= 0.0 {
            return None;
        }
        (-c0 / c1).min(1.0)
    } else {
        let disc = c1 * c1 - 4.0 * c2 * c0;
        if disc < 0.0 {
            return None;
        }
        ((c1 + math::sqrt(disc)) / (-2.0 * c2)).min(1.0)
    };
    if !(0.0..=1.0).contains(&l_best) {
        return None;
    }
    let need = t - l_best * a_zz;
    let mu2 = if need <= 0.0 { 0.0 } else { need / sx2 };
    if mu2 > 1.0 + 1e-12 {
        return None;
    }
    // validate directly, with slack, to absorb quadratic-formula rounding
    if (1.0 - l_best) * (1.0 - mu2) - l_best * mu2 * cd2 < -FEAS_SLACK {
        return None;
    }
    Some((mu2.min(1.0), math::sqrt(l_best)))
}

/// Brute-force minimum of sqrt(E_xz^2 + E_xx^2) subject to the Bell-value
/// and feasibility constraints: exhaustive grid over (lambda, z, x) with
/// mu minimized per point in closed form, then local coordinate-descent
/// refinement from the best grid candidates.
///
/// Serves as the independent check of `qubit_correlator_bound`; agreement
/// is within 2e-3 above and never more than 1e-6 below at `grid_n` = 120.
pub fn oracle_min_correlator(
    alpha: f64,
    s: BellValue,
    grid_n: usize,
    refine_iters: usize,
) -> Result<f64> {
    if grid_n < 40 {
        return Err(Error::Domain {
            what: "oracle grid_n must be at least 40",
            value: grid_n as f64,
        });
    }
    let sv = math::abs(s.value());
    if sv < 2.0 - 1e-9 {
        return Err(Error::Domain {
            what: "oracle requires |s| >= 2",
            value: s.value(),
        });
    }
    let target = sv * sv / 4.0;

    // exhaustive angle grid with lambda (and then mu) minimized in closed
    // form per column
    let mut candidates: Vec<(f64, [f64; 2])> = Vec::new();
    for i in 0..grid_n {
        let z = core::f64::consts::PI * i as f64 / grid_n as f64;
        for j in 0..grid_n {
            let x = core::f64::consts::PI * j as f64 / grid_n as f64;
            if let Some((mu2, _)) = column_min_mu_sq(alpha, target, z, x) {
                candidates.push((mu2, [z, x]));
            }
        }
    }
    if candidates.is_empty() {
        return Err(Error::Infeasible {
            what: "no grid point satisfies the Bell-value constraint",
        });
    }
    candidates.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    candidates.truncate(6);

    // compass search over the angles with per-coordinate step adaptation:
    // an improving step doubles, a failing one halves, which tracks the
    // curved valleys the constraint intersections produce (worst near
    // |s| -> 2 with alpha -> 1)
    let base = core::f64::consts::PI / grid_n as f64;
    let sweeps = refine_iters.max(1) * 60;
    let mut best = candidates[0].0;
    for &(val0, pt0) in &candidates {
        let mut val = val0;
        let mut pt = pt0;
        let mut step = [base, base];
        for _ in 0..sweeps {
            for coord in 0..2 {
                let mut improved = false;
                for sign in [-1.0, 1.0] {
                    let mut trial = pt;
                    trial[coord] += sign * step[coord];
                    if let Some((v, _)) = column_min_mu_sq(alpha, target, trial[0], trial[1]) {
                        if v < val {
                            val = v;
                            pt = trial;
                            improved = true;
                        }
                    }
                }
                if improved {
                    step[coord] = (step[coord] * 2.0).min(4.0 * base);
                } else {
                    step[coord] *= 0.5;
                }
            }
            if step.iter().all(|s| *s < 1e-12) {
                break;
            }
        }
        if val < best {
            best = val;
        }
    }
    Ok(math::sqrt(best.max(0.0)))
}

/// Explicit attack family saturating the BB84 bound: the four-Bell-state
/// purification with weights built from (E_zz, E_xx). The two-dimensional
/// family of the S_alpha attack is the special case E_zz = 1 with
/// E_xx = F.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackState {
    pub e_zz: f64,
    pub e_xx: f64,
}

impl AttackState {
    pub fn new(e_zz: f64, e_xx: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&e_zz) || !(-1.0..=1.0).contains(&e_xx) {
            return Err(Error::Domain {
                what: "attack correlators must lie in [-1, 1]",
                value: if (-1.0..=1.0).contains(&e_zz) {
                    e_xx
                } else {
                    e_zz
                },
            });
        }
        Ok(Self { e_zz, e_xx })
    }

    /// The overlap-F family: E_zz = 1, <psi0|psi1> = F.
    pub fn from_overlap(f: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::Domain {
                what: "overlap must lie in [0, 1]",
                value: f,
            });
        }
        Self::new(1.0, f)
    }

    /// Eve-state overlap of the E_zz = 1 family.
    pub fn overlap_f(&self) -> f64 {
        self.e_xx
    }

    /// Bell-basis weights (phi+, phi-, psi+, psi-), each nonnegative.
    pub fn bell_weights(&self) -> [f64; 4] {
        let zp = 1.0 + self.e_zz;
        let zm = 1.0 - self.e_zz;
        let xp = 1.0 + self.e_xx;
        let xm = 1.0 - self.e_xx;
        [zp * xp / 4.0, zp * xm / 4.0, zm * xp / 4.0, zm * xm / 4.0]
    }
}

/// Conditional entropy of the overlap-F attack in closed form:
/// 1 + phi(sqrt((1-2q)^2 + 4q(1-q) F^2)) - phi(F).
pub fn attack_entropy_closed_form(q: f64, f: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain {
            what: "q must lie in [0, 1]",
            value: q,
        });
    }
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::Domain {
            what: "overlap must lie in [0, 1]",
            value: f,
        });
    }
    let q = q.min(1.0 - q);
    Ok(crate::entropy::bound_from_correlator_sq(q, f * f))
}

/// Spectral evaluation of the same quantity: explicit 2-dimensional
/// representations psi0 = (1, 0), psi1 = (F, sqrt(1-F^2)), the
/// classical-quantum state after the q-flip, and H(A|E) = S(tau_AE) -
/// S(tau_E) from 2x2 eigenvalues.
pub fn attack_entropy_spectral(q: f64, f: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) || !(0.0..=1.0).contains(&f) {
        return Err(Error::Domain {
            what: "attack_entropy_spectral arguments must lie in [0, 1]",
            value: if (0.0..=1.0).contains(&q) { f } else { q },
        });
    }
    let s = math::sqrt((1.0 - f * f).max(0.0));
    // rho_E^a = |psi_a><psi_a| / 2
    let r0 = [[0.5, 0.0], [0.0, 0.0]];
    let r1 = [[0.5 * f * f, 0.5 * f * s], [0.5 * f * s, 0.5 * s * s]];
    let qb = 1.0 - q;
    let mix = |w0: f64, w1: f64| -> [[f64; 2]; 2] {
        let mut m = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = w0 * r0[i][j] + w1 * r1[i][j];
            }
        }
        m
    };
    // tau_AE is block diagonal in Alice's register
    let s_ae = spectral_entropy_2(mix(qb, q)) + spectral_entropy_2(mix(q, qb));
    let s_e = spectral_entropy_2(mix(1.0, 1.0));
    Ok(s_ae - s_e)
}

fn spectral_entropy_2(m: [[f64; 2]; 2]) -> f64 {
    let mut h = 0.0;
    for lam in linalg::sym2_eigenvalues(m) {
        if lam > 1e-15 {
            h += math::entropy_term(lam);
        }
    }
    h
}

/// Conditional entropy H(Z|E) of the four-dimensional BB84 attack state,
/// by eigendecomposition of Eve's 4x4 conditional blocks.
///
/// Equals `bb84_bound(q, |e_xx|)` for every value of `e_zz`: the attack
/// saturates the bound independently of the preprocessing level.
pub fn bb84_attack_entropy(q: f64, st: &AttackState) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain {
            what: "q must lie in [0, 1]",
            value: q,
        });
    }
    for w in st.bell_weights() {
        if w < -1e-12 {
            return Err(Error::InvalidDistribution {
                what: "attack state has a negative Bell-basis weight",
            });
        }
    }
    // |Psi> = (1/2)[ a phi+ |++> + b phi- |+-> + c psi+ |-+> + d psi- |--> ]
    let a = math::sqrt(((1.0 + st.e_zz) * (1.0 + st.e_xx)).max(0.0));
    let b = math::sqrt(((1.0 + st.e_zz) * (1.0 - st.e_xx)).max(0.0));
    let c = math::sqrt(((1.0 - st.e_zz) * (1.0 + st.e_xx)).max(0.0));
    let d = math::sqrt(((1.0 - st.e_zz) * (1.0 - st.e_xx)).max(0.0));
    let norm = 1.0 / (2.0 * math::sqrt(2.0));
    // Eve vectors attached to the AB computational components
    let v00 = [a * norm, b * norm, 0.0, 0.0];
    let v11 = [a * norm, -b * norm, 0.0, 0.0];
    let v01 = [0.0, 0.0, c * norm, d * norm];
    let v10 = [0.0, 0.0, c * norm, -d * norm];
    let outer_sum = |u: [f64; 4], v: [f64; 4]| -> [[f64; 4]; 4] {
        let mut m = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = u[i] * u[j] + v[i] * v[j];
            }
        }
        m
    };
    // Alice outcome 0 collects |00> and |01>; outcome 1 collects |11>, |10>.
    let r0 = outer_sum(v00, v01);
    let r1 = outer_sum(v11, v10);
    let qb = 1.0 - q;
    let mix = |w0: f64, w1: f64| -> [[f64; 4]; 4] {
        let mut m = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = w0 * r0[i][j] + w1 * r1[i][j];
            }
        }
        m
    };
    let s_ae = linalg::block_entropy(mix(qb, q)) + linalg::block_entropy(mix(q, qb));
    let s_e = linalg::block_entropy(mix(1.0, 1.0));
    Ok(s_ae - s_e)
}

/// Alice-Bob marginal of the attack state, as a real 4x4 density matrix in
/// the computational basis (the state's Pauli expansion is real).
pub fn attack_marginal(st: &AttackState) -> [[f64; 4]; 4] {
    let a = math::sqrt(((1.0 + st.e_zz) * (1.0 + st.e_xx)).max(0.0));
    let b = math::sqrt(((1.0 + st.e_zz) * (1.0 - st.e_xx)).max(0.0));
    let c = math::sqrt(((1.0 - st.e_zz) * (1.0 + st.e_xx)).max(0.0));
    let d = math::sqrt(((1.0 - st.e_zz) * (1.0 - st.e_xx)).max(0.0));
    let s2 = math::sqrt(0.5);
    // Bell vectors in the computational basis |00>,|01>,|10>,|11>
    let phi_p = [s2, 0.0, 0.0, s2];
    let phi_m = [s2, 0.0, 0.0, -s2];
    let psi_p = [0.0, s2, s2, 0.0];
    let psi_m = [0.0, s2, -s2, 0.0];
    let comps = [(a, phi_p), (b, phi_m), (c, psi_p), (d, psi_m)];
    let mut rho = [[0.0; 4]; 4];
    for (w, v) in comps {
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] += w * w / 4.0 * v[i] * v[j];
            }
        }
    }
    rho
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feasibility_examples() {
        let ok = CorrelationMatrix {
            e_zz: 1.0,
            e_zx: 0.0,
            e_xz: 0.0,
            e_xx: 1.0,
        };
        assert!(feasibility_check(&ok));
        let bad = CorrelationMatrix {
            e_zz: 1.0,
            e_zx: 0.0,
            e_xz: 1.0,
            e_xx: 0.0,
        };
        assert!(!feasibility_check(&bad));
    }

    #[test]
    fn feasibility_matches_eigenvalue_sign() {
        // independent route: min eigenvalue of I - E E^T
        let cases = [
            (0.6, 0.5, 0.3, 0.4),
            (0.9, 0.4, 0.2, 0.1),
            (0.7, 0.7, 0.7, 0.7),
            (0.0, 1.0, 1.0, 0.0),
        ];
        for (e_zz, e_zx, e_xz, e_xx) in cases {
            let m = CorrelationMatrix {
                e_zz,
                e_zx,
                e_xz,
                e_xx,
            };
            let g = [
                [
                    1.0 - e_zz * e_zz - e_zx * e_zx,
                    -(e_zz * e_xz + e_zx * e_xx),
                ],
                [
                    -(e_zz * e_xz + e_zx * e_xx),
                    1.0 - e_xz * e_xz - e_xx * e_xx,
                ],
            ];
            let min_eig = crate::linalg::sym2_eigenvalues(g)[0];
            assert_eq!(
                feasibility_check(&m),
                min_eig >= -1e-9,
                "case {e_zz} {e_zx} {e_xz} {e_xx}"
            );
        }
    }

    #[test]
    fn search_point_roundtrip_is_feasible() {
        let p = OracleSearchPoint {
            lambda: 0.8,
            mu: 0.5,
            z_angle: 0.3,
            x_angle: 1.9,
        };
        let m = p.to_correlations();
        assert!((m.e_zz * m.e_zz + m.e_zx * m.e_zx - 0.64).abs() < 1e-12);
        assert!((m.e_xz * m.e_xz + m.e_xx * m.e_xx - 0.25).abs() < 1e-12);
    }

    #[test]
    fn oracle_at_quantum_bound_needs_maximal_correlations() {
        let v = oracle_min_correlator(1.0, BellValue(2.0 * 2.0f64.sqrt()), 60, 3).unwrap();
        assert!((v - 1.0).abs() < 2e-3, "v = {v}");
    }

    #[test]
    fn oracle_matches_first_branch() {
        // alpha >= 1: bound is sqrt(s^2/4 - alpha^2)
        let v = oracle_min_correlator(1.5, BellValue(3.2), 60, 3).unwrap();
        let expect = (3.2f64 * 3.2 / 4.0 - 2.25).sqrt();
        assert!((v - expect).abs() < 2e-3, "{v} vs {expect}");
        assert!(v >= expect - 1e-6);
    }

    #[test]
    fn oracle_matches_branch_point() {
        // branch-point value sqrt(1 - 0.9^4) = 0.58643
        let v = oracle_min_correlator(0.9, BellValue(2.1484), 80, 4).unwrap();
        assert!((v - 0.5864).abs() < 2e-3, "v = {v}");
    }

    #[test]
    fn oracle_rejects_above_quantum_bound() {
        assert!(matches!(
            oracle_min_correlator(0.9, BellValue(2.8), 60, 3),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn attack_entropy_trivial_points() {
        assert!((attack_entropy_closed_form(0.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(attack_entropy_closed_form(0.0, 0.0).unwrap().abs() < 1e-12);
        assert!(attack_entropy_spectral(0.0, 0.0).unwrap().abs() < 1e-12);
        // q = 1/2: Alice's bit is uniform and independent of Eve
        for f in [0.0, 0.3, 0.8, 1.0] {
            assert!((attack_entropy_spectral(0.5, f).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_equals_closed_form() {
        let v1 = attack_entropy_spectral(0.2, 0.5).unwrap();
        let v2 = attack_entropy_closed_form(0.2, 0.5).unwrap();
        assert!((v1 - v2).abs() < 1e-10, "{v1} vs {v2}");
    }

    #[test]
    fn bb84_attack_entropy_examples() {
        let st = AttackState::new(1.0, 1.0).unwrap();
        assert!((bb84_attack_entropy(0.0, &st).unwrap() - 1.0).abs() < 1e-10);
        let st = AttackState::new(1.0, 0.0).unwrap();
        assert!(bb84_attack_entropy(0.0, &st).unwrap().abs() < 1e-10);
        let st = AttackState::new(0.3, 0.6).unwrap();
        let v = bb84_attack_entropy(0.1, &st).unwrap();
        let bound = crate::entropy::bb84_bound(0.1, 0.6).unwrap();
        assert!((v - bound).abs() < 1e-8, "{v} vs {bound}");
    }

    #[test]
    fn attack_marginal_matches_pauli_expansion() {
        // Psi_AB = (1/4)[I + Exx XX - Exx Ezz YY + Ezz ZZ]
        for (ezz, exx) in [(0.3, 0.6), (0.9, -0.2), (-0.5, 0.5), (1.0, 1.0)] {
            let st = AttackState::new(ezz, exx).unwrap();
            let rho = attack_marginal(&st);
            let xx = [
                [0.0, 0.0, 0.0, 1.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [1.0, 0.0, 0.0, 0.0],
            ];
            let yy = [
                [0.0, 0.0, 0.0, -1.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [-1.0, 0.0, 0.0, 0.0],
            ];
            let zz = [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, -1.0, 0.0, 0.0],
                [0.0, 0.0, -1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ];
            for i in 0..4 {
                for j in 0..4 {
                    let id = if i == j { 1.0 } else { 0.0 };
                    let expect =
                        (id + exx * xx[i][j] - exx * ezz * yy[i][j] + ezz * zz[i][j]) / 4.0;
                    assert!(
                        (rho[i][j] - expect).abs() < 1e-12,
                        "ezz={ezz} exx={exx} ({i},{j}): {} vs {expect}",
                        rho[i][j]
                    );
                }
            }
        }
    }

    #[test]
    fn optimal_attack_correlators_are_feasible() {
        // E_zz = 1 family at the first-branch optimum
        let m = CorrelationMatrix {
            e_zz: 1.0,
            e_zx: 0.0,
            e_xz: 0.0,
            e_xx: 0.7,
        };
        assert!(feasibility_check(&m));
    }
}
