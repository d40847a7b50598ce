//! Channel models and the Devetak-Winter rate.
//!
//! Key generation measures A1 = B3 = Z. Alice's nondetection outcome is
//! always binned to +1 (the entropy bound needs a binary key bit); Bob's
//! key-generation outcome keeps its nondetection column, which is what
//! makes the loss tables 2x3.

use crate::entropy::{BellValue, BoundEvaluation, BoundParams, EntropyBound};
use crate::error::{Error, Result};
use crate::math;

/// Joint outcome table for the key-generation pair, rows = Alice {+, -}
/// after binning, columns = Bob {+, -} or {+, -, nondetect}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDistribution {
    rows: [[f64; 3]; 2],
    cols: usize,
}

impl JointDistribution {
    pub fn new(rows: [[f64; 3]; 2], cols: usize) -> Result<Self> {
        if !(2..=3).contains(&cols) {
            return Err(Error::InvalidDistribution {
                what: "Bob must have 2 or 3 outcome columns",
            });
        }
        let mut total = 0.0;
        for row in &rows {
            for (j, &p) in row.iter().enumerate() {
                if j >= cols {
                    continue;
                }
                if p.is_nan() || p < -1e-12 {
                    return Err(Error::InvalidDistribution {
                        what: "negative probability entry",
                    });
                }
                total += p;
            }
        }
        if math::abs(total - 1.0) > 1e-12 {
            return Err(Error::InvalidDistribution {
                what: "probabilities must sum to 1",
            });
        }
        Ok(Self { rows, cols })
    }

    pub fn two_by_two(rows: [[f64; 2]; 2]) -> Result<Self> {
        Self::new(
            [[rows[0][0], rows[0][1], 0.0], [rows[1][0], rows[1][1], 0.0]],
            2,
        )
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn prob(&self, row: usize, col: usize) -> f64 {
        self.rows[row][col]
    }

    /// Column marginals p_b.
    pub fn bob_marginals(&self) -> [f64; 3] {
        let mut m = [0.0; 3];
        for (j, slot) in m.iter_mut().enumerate().take(self.cols) {
            *slot = self.rows[0][j] + self.rows[1][j];
        }
        m
    }
}

/// Alice flips her (binned) key bit with probability q: rows are mixed,
/// column marginals are unchanged.
pub fn preprocess_flip(d: &JointDistribution, q: f64) -> Result<JointDistribution> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain {
            what: "flip probability must lie in [0, 1]",
            value: q,
        });
    }
    let mut rows = [[0.0; 3]; 2];
    for j in 0..d.cols {
        rows[0][j] = (1.0 - q) * d.rows[0][j] + q * d.rows[1][j];
        rows[1][j] = q * d.rows[0][j] + (1.0 - q) * d.rows[1][j];
    }
    JointDistribution::new(rows, d.cols)
}

/// Conditional Shannon entropy H(A|B) = H(AB) - H(B) in bits.
pub fn conditional_shannon(d: &JointDistribution) -> f64 {
    let mut h_ab = 0.0;
    let mut h_b = 0.0;
    for j in 0..d.cols {
        let mut pb = 0.0;
        for row in &d.rows {
            h_ab += math::entropy_term(row[j]);
            pb += row[j];
        }
        h_b += math::entropy_term(pb);
    }
    h_ab - h_b
}

/// Imperfection models for the entangled source and detectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelModel {
    /// Bell state mixed with white noise at visibility 1 - 2 delta;
    /// `bob_optimal` selects Bob's Bell-test measurements maximizing
    /// S_alpha instead of the CHSH-diagonal ones.
    Depolarizing { delta: f64, bob_optimal: bool },
    /// Maximally entangled state (attenuated to visibility v) with global
    /// detection efficiency eta and nondetections binned for the Bell test.
    LossMaxEntangled {
        eta: f64,
        bob_optimal: bool,
        visibility: f64,
    },
    /// Partially entangled state cos(theta/2)|00> + sin(theta/2)|11>,
    /// attenuated to visibility v, with detection efficiency eta; Alice's
    /// Bell-test measurement angle is phi_a and Bob's are optimized out.
    LossPartialEntangled {
        eta: f64,
        theta: f64,
        phi_a: f64,
        visibility: f64,
    },
}

impl ChannelModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelModel::Depolarizing { delta, .. } => {
                if !(0.0..=0.5).contains(&delta) {
                    return Err(Error::Domain {
                        what: "delta must lie in [0, 1/2]",
                        value: delta,
                    });
                }
            }
            ChannelModel::LossMaxEntangled {
                eta, visibility, ..
            } => {
                if !(eta > 0.0 && eta <= 1.0) {
                    return Err(Error::Domain {
                        what: "eta must lie in (0, 1]",
                        value: eta,
                    });
                }
                if !(0.0..=1.0).contains(&visibility) {
                    return Err(Error::Domain {
                        what: "visibility must lie in [0, 1]",
                        value: visibility,
                    });
                }
            }
            ChannelModel::LossPartialEntangled {
                eta,
                theta,
                visibility,
                ..
            } => {
                if !(eta > 0.0 && eta <= 1.0) {
                    return Err(Error::Domain {
                        what: "eta must lie in (0, 1]",
                        value: eta,
                    });
                }
                if !(0.0..=core::f64::consts::FRAC_PI_2).contains(&theta) {
                    return Err(Error::Domain {
                        what: "theta must lie in [0, pi/2]",
                        value: theta,
                    });
                }
                if !(0.0..=1.0).contains(&visibility) {
                    return Err(Error::Domain {
                        what: "visibility must lie in [0, 1]",
                        value: visibility,
                    });
                }
            }
        }
        Ok(())
    }

    /// Bell expectation value of S_alpha under this model.
    pub fn s_alpha(&self, alpha: f64) -> BellValue {
        match *self {
            ChannelModel::Depolarizing { delta, bob_optimal } => {
                depolarizing_s_alpha(delta, alpha, bob_optimal)
            }
            ChannelModel::LossMaxEntangled {
                eta,
                bob_optimal,
                visibility,
            } => loss_maxent_s_alpha_attenuated(eta, alpha, bob_optimal, visibility),
            ChannelModel::LossPartialEntangled {
                eta,
                theta,
                phi_a,
                visibility,
            } => loss_partial_s_alpha_attenuated(eta, theta, phi_a, alpha, visibility),
        }
    }

    /// Key-generation outcome table before noise preprocessing.
    pub fn distribution(&self) -> JointDistribution {
        match *self {
            ChannelModel::Depolarizing { delta, .. } => depolarizing_distribution(delta),
            ChannelModel::LossMaxEntangled {
                eta, visibility, ..
            } => loss_maxent_distribution_attenuated(eta, visibility),
            ChannelModel::LossPartialEntangled {
                eta,
                theta,
                visibility,
                ..
            } => loss_partial_distribution(eta, theta, visibility),
        }
    }
}

/// Key rate assembled from one bound evaluation and one Shannon term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    /// Devetak-Winter rate in bits per round; may be negative.
    pub rate: f64,
    pub s_alpha: BellValue,
    pub h_a_given_b: f64,
    pub entropy_bound: BoundEvaluation,
}

pub fn depolarizing_distribution(delta: f64) -> JointDistribution {
    JointDistribution::two_by_two([
        [(1.0 - delta) / 2.0, delta / 2.0],
        [delta / 2.0, (1.0 - delta) / 2.0],
    ])
    .expect("depolarizing table is normalized")
}

/// S_alpha for the depolarized Bell state: sqrt(2)(1+alpha)(1-2 delta)
/// with CHSH-diagonal measurements, 2 sqrt(1+alpha^2)(1-2 delta) with
/// Bob's optimal ones.
pub fn depolarizing_s_alpha(delta: f64, alpha: f64, bob_optimal: bool) -> BellValue {
    let vis = 1.0 - 2.0 * delta;
    let base = if bob_optimal {
        BellValue::quantum_bound(alpha)
    } else {
        core::f64::consts::SQRT_2 * (1.0 + alpha)
    };
    BellValue(base * vis)
}

pub fn depolarizing_rate(delta: f64, q: f64, alpha: f64, bob_optimal: bool) -> Result<RateResult> {
    devetak_winter(&ChannelModel::Depolarizing { delta, bob_optimal }, q, alpha)
}

/// S_alpha for the lossy maximally entangled state with both parties'
/// nondetections binned in the Bell test.
pub fn loss_maxent_s_alpha(eta: f64, alpha: f64, bob_optimal: bool) -> BellValue {
    loss_maxent_s_alpha_attenuated(eta, alpha, bob_optimal, 1.0)
}

/// Same with the state attenuated to visibility v: the two-body terms
/// scale by v, the binning term does not depend on the state.
pub fn loss_maxent_s_alpha_attenuated(
    eta: f64,
    alpha: f64,
    bob_optimal: bool,
    visibility: f64,
) -> BellValue {
    let eta_bar = 1.0 - eta;
    let base = if bob_optimal {
        BellValue::quantum_bound(alpha)
    } else {
        core::f64::consts::SQRT_2 * (1.0 + alpha)
    };
    BellValue(visibility * base * eta * eta + 2.0 * math::abs(alpha).max(1.0) * eta_bar * eta_bar)
}

/// 2x3 key-generation table for the lossy maximally entangled state,
/// Alice's nondetection row merged into her + row.
pub fn loss_maxent_distribution(eta: f64) -> JointDistribution {
    loss_maxent_distribution_attenuated(eta, 1.0)
}

/// Same from the attenuated state v phi+ + (1-v) I/4, whose Z x Z
/// outcomes carry the error rate delta = (1 - v)/2.
pub fn loss_maxent_distribution_attenuated(eta: f64, visibility: f64) -> JointDistribution {
    let delta = 0.5 * (1.0 - visibility);
    let (p_same, p_diff) = ((1.0 - delta) / 2.0, delta / 2.0);
    let e = eta;
    let eb = 1.0 - eta;
    // qubit marginals are 1/2 regardless of v
    JointDistribution::new(
        [
            [
                e * e * p_same + e * eb * 0.5,
                e * e * p_diff + e * eb * 0.5,
                e * eb * 0.5 + eb * eb,
            ],
            [e * e * p_diff, e * e * p_same, e * eb * 0.5],
        ],
        3,
    )
    .expect("binned loss table is normalized")
}

fn partial_s_alpha_terms(eta: f64, theta: f64, phi_a: f64, alpha: f64) -> (f64, f64) {
    let eb = 1.0 - eta;
    let r = eta * math::sin(phi_a) * math::sin(theta);
    let p = alpha * eta + alpha * eb * math::cos(theta);
    let q = eta * math::cos(phi_a) + eb * math::cos(theta);
    let state_terms = eta * math::sqrt(r * r + (p + q) * (p + q))
        + eta * math::sqrt(r * r + (p - q) * (p - q))
        + 2.0 * eta * eb * alpha * math::cos(theta);
    (state_terms, 2.0 * eb * eb * alpha)
}

/// S_alpha for the lossy partially entangled strategy with Bob's
/// measurements optimized out (visibility 1).
pub fn loss_partial_s_alpha(eta: f64, theta: f64, phi_a: f64, alpha: f64) -> BellValue {
    loss_partial_s_alpha_attenuated(eta, theta, phi_a, alpha, 1.0)
}

/// Same with the attenuated state v psi_theta + (1-v) I/4. Every term of
/// the optimized expression is an expectation value of a traceless
/// observable on the state except the constant binning term 2 eta_bar^2
/// alpha, so attenuation scales all state terms uniformly by v.
pub fn loss_partial_s_alpha_attenuated(
    eta: f64,
    theta: f64,
    phi_a: f64,
    alpha: f64,
    visibility: f64,
) -> BellValue {
    let (state_terms, binning_term) = partial_s_alpha_terms(eta, theta, phi_a, alpha);
    BellValue(visibility * state_terms + binning_term)
}

/// 2x3 key-generation table for the attenuated partially entangled state,
/// from the Born rule on rho = v psi_theta + (1-v) I/4 followed by loss
/// mixing and Alice's nondetection row merged into +.
pub fn loss_partial_distribution(eta: f64, theta: f64, visibility: f64) -> JointDistribution {
    let c2 = {
        let c = math::cos(theta / 2.0);
        c * c
    };
    let s2 = 1.0 - c2;
    let v = visibility;
    let cross = (1.0 - v) / 4.0;
    // qubit-level Z x Z outcome probabilities of the attenuated state
    let p_pp = v * c2 + cross;
    let p_mm = v * s2 + cross;
    let p_pm = cross;
    let p_mp = cross;
    let pa_p = p_pp + p_pm;
    let pa_m = p_mp + p_mm;
    let pb_p = p_pp + p_mp;
    let pb_m = p_pm + p_mm;
    let e = eta;
    let eb = 1.0 - eta;
    JointDistribution::new(
        [
            [
                e * e * p_pp + e * eb * pb_p,
                e * e * p_pm + e * eb * pb_m,
                e * eb * pa_p + eb * eb,
            ],
            [e * e * p_mp, e * e * p_mm, e * eb * pa_m],
        ],
        3,
    )
    .expect("binned partial-entangled table is normalized")
}

/// Small-theta expansion of the CHSH (alpha = 1) expectation value of the
/// partially entangled strategy:
/// S ~ 2 + eta [3 eta - 2 - eta etabar (1-cos phi_a) / (2 - eta (1-cos phi_a))] theta^2.
///
/// Valid for |theta| small compared to |phi_a|.
pub fn chsh_small_theta_approx(eta: f64, phi_a: f64, theta: f64) -> f64 {
    let eb = 1.0 - eta;
    let w = 1.0 - math::cos(phi_a);
    let coeff = 3.0 * eta - 2.0 - eta * eb * w / (2.0 - eta * w);
    2.0 + eta * coeff * theta * theta
}

/// Devetak-Winter rate r = gbar_{q,alpha}(S_alpha) - H(A1|B3) for the
/// given model, with noise preprocessing applied to the outcome table.
pub fn devetak_winter(model: &ChannelModel, q: f64, alpha: f64) -> Result<RateResult> {
    model.validate()?;
    let params = BoundParams::new(q, alpha)?;
    let bound = EntropyBound::new(params)?;
    devetak_winter_prepared(model, &bound)
}

/// Rate evaluation with a pre-built bound family; the hot path for
/// parameter sweeps.
pub fn devetak_winter_prepared(model: &ChannelModel, bound: &EntropyBound) -> Result<RateResult> {
    let s = model.s_alpha(bound.params().alpha());
    let ev = bound.evaluate(s)?;
    let flipped = preprocess_flip(&model.distribution(), bound.params().q())?;
    let h_ab = conditional_shannon(&flipped);
    Ok(RateResult {
        rate: ev.value - h_ab,
        s_alpha: s,
        h_a_given_b: h_ab,
        entropy_bound: ev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math;

    const SQRT_8: f64 = 2.828_427_124_746_190_3;

    #[test]
    fn preprocess_flip_identity_and_uniform() {
        let d = depolarizing_distribution(0.1);
        let d0 = preprocess_flip(&d, 0.0).unwrap();
        assert_eq!(d, d0);
        let dh = preprocess_flip(&d, 0.5).unwrap();
        for j in 0..2 {
            let pb = d.bob_marginals()[j];
            assert!((dh.prob(0, j) - pb / 2.0).abs() < 1e-15);
            assert!((dh.prob(1, j) - pb / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn preprocess_flip_composes() {
        // flipping q then q' equals a single flip at q + q' - 2 q q'
        let d = loss_maxent_distribution(0.9);
        let (q1, q2) = (0.15, 0.3);
        let lhs = preprocess_flip(&preprocess_flip(&d, q1).unwrap(), q2).unwrap();
        let rhs = preprocess_flip(&d, q1 + q2 - 2.0 * q1 * q2).unwrap();
        for j in 0..3 {
            assert!((lhs.prob(0, j) - rhs.prob(0, j)).abs() < 1e-15);
            assert!((lhs.prob(1, j) - rhs.prob(1, j)).abs() < 1e-15);
        }
    }

    #[test]
    fn flipped_depolarizing_error_rate() {
        // error rate becomes q + (1 - 2q) delta
        let (delta, q) = (0.07, 0.2);
        let flipped = preprocess_flip(&depolarizing_distribution(delta), q).unwrap();
        let dq = q + (1.0 - 2.0 * q) * delta;
        assert!((conditional_shannon(&flipped) - math::binary_entropy_raw(dq)).abs() < 1e-12);
    }

    #[test]
    fn conditional_shannon_examples() {
        let perfect = JointDistribution::two_by_two([[0.5, 0.0], [0.0, 0.5]]).unwrap();
        assert!(conditional_shannon(&perfect).abs() < 1e-15);
        let product = JointDistribution::two_by_two([[0.25, 0.25], [0.25, 0.25]]).unwrap();
        assert!((conditional_shannon(&product) - 1.0).abs() < 1e-15);
        let dep = depolarizing_distribution(0.07);
        assert!((conditional_shannon(&dep) - 0.365_923_650_900_223).abs() < 1e-12);
    }

    #[test]
    fn depolarizing_s_values() {
        assert!((depolarizing_s_alpha(0.0, 1.0, false).value() - SQRT_8).abs() < 1e-14);
        assert!(depolarizing_s_alpha(0.5, 1.3, true).value().abs() < 1e-14);
        let v = depolarizing_s_alpha(0.05, 0.9, true).value();
        assert!((v - 2.0 * 1.81f64.sqrt() * 0.9).abs() < 1e-12);
    }

    #[test]
    fn loss_maxent_values() {
        assert!((loss_maxent_s_alpha(1.0, 1.0, false).value() - SQRT_8).abs() < 1e-14);
        // eta -> 0: deterministic binned outcomes sit at the classical bound
        assert!((loss_maxent_s_alpha(1e-15, 1.0, false).value() - 2.0).abs() < 1e-12);
        let v = loss_maxent_s_alpha(0.95, 1.1, true).value();
        let expect = 2.0 * 2.21f64.sqrt() * 0.9025 + 2.0 * 1.1 * 0.0025;
        assert!((v - expect).abs() < 1e-12);
    }

    #[test]
    fn loss_maxent_table() {
        let d = loss_maxent_distribution(1.0);
        assert!((d.prob(0, 0) - 0.5).abs() < 1e-15);
        assert!((d.prob(1, 1) - 0.5).abs() < 1e-15);
        assert!(d.prob(0, 2).abs() < 1e-15);

        let d = loss_maxent_distribution(0.9);
        // entry (+, nondetect) = etabar (1 + etabar) / 2
        assert!((d.prob(0, 2) - 0.055).abs() < 1e-15);
        // nondetection column mass is exactly etabar
        assert!((d.bob_marginals()[2] - 0.1).abs() < 1e-15);
        // Alice's + row collects her nondetections: eta/2 + etabar
        let row0: f64 = (0..3).map(|j| d.prob(0, j)).sum();
        assert!((row0 - (0.45 + 0.1)).abs() < 1e-15);
    }

    #[test]
    fn loss_partial_recovers_chsh_at_ideal_point() {
        let v = loss_partial_s_alpha(
            1.0,
            core::f64::consts::FRAC_PI_2,
            core::f64::consts::FRAC_PI_2,
            1.0,
        );
        assert!((v.value() - SQRT_8).abs() < 1e-12);
    }

    #[test]
    fn loss_partial_separable_stays_classical() {
        // theta = 0 is a product state: no violation for any settings
        for &(eta, phi_a, alpha) in &[
            (0.9, 0.4, 1.0),
            (0.8, 1.2, 0.7),
            (1.0, 0.3, 1.4),
            (0.7, 2.0, 1.0),
        ] {
            let s = loss_partial_s_alpha(eta, 0.0, phi_a, alpha).value();
            assert!(
                s <= BellValue::classical_bound(alpha) + 1e-9,
                "eta={eta} phi={phi_a} alpha={alpha}: s = {s}"
            );
        }
    }

    #[test]
    fn loss_partial_matches_bob_angle_grid() {
        // independent route: maximize over Bob's two measurement angles
        let (eta, theta, phi_a, alpha, vis) = (0.9, 0.4, 0.35, 1.0, 1.0);
        let closed = loss_partial_s_alpha_attenuated(eta, theta, phi_a, alpha, vis).value();
        let grid = bob_angle_grid_max(eta, theta, phi_a, alpha, vis);
        assert!((closed - grid).abs() < 1e-6, "{closed} vs {grid}");

        // attenuated variant against the same oracle
        let (eta, theta, phi_a, alpha, vis) = (0.88, 0.45, 0.5, 0.95, 0.99);
        let closed = loss_partial_s_alpha_attenuated(eta, theta, phi_a, alpha, vis).value();
        let grid = bob_angle_grid_max(eta, theta, phi_a, alpha, vis);
        assert!((closed - grid).abs() < 1e-6, "{closed} vs {grid}");
    }

    /// Direct maximization of the binned S_alpha over Bob's measurement
    /// angles on rho = v psi_theta + (1-v) I/4, using raw correlators.
    fn bob_angle_grid_max(eta: f64, theta: f64, phi_a: f64, alpha: f64, vis: f64) -> f64 {
        let eb = 1.0 - eta;
        let corr = |ax_z: f64, ax_x: f64, b_ang: f64| -> f64 {
            // <(az Z + ax X) x B(b)> on rho; psi_theta has ZZ=1, XX=sin,
            // ZX=XZ=0, marginals cos(theta) on Z.
            vis * (ax_z * math::cos(b_ang) + ax_x * math::sin(b_ang) * math::sin(theta))
        };
        let marg_a = |ax_z: f64| vis * ax_z * math::cos(theta);
        let marg_b = |b_ang: f64| vis * math::cos(b_ang) * math::cos(theta);
        let eff = |ax_z: f64, ax_x: f64, b_ang: f64| -> f64 {
            eta * eta * corr(ax_z, ax_x, b_ang)
                + eta * eb * (marg_a(ax_z) + marg_b(b_ang))
                + eb * eb
        };
        // the two Bob angles appear in separate terms, so maximize each
        let n = 400_000;
        let mut best1 = f64::NEG_INFINITY;
        let mut best2 = f64::NEG_INFINITY;
        for i in 0..n {
            let b = 2.0 * core::f64::consts::PI * i as f64 / n as f64;
            let s1 = alpha * eff(1.0, 0.0, b) + eff(math::cos(phi_a), math::sin(phi_a), b);
            let s2 = alpha * eff(1.0, 0.0, b) - eff(math::cos(phi_a), math::sin(phi_a), b);
            best1 = best1.max(s1);
            best2 = best2.max(s2);
        }
        best1 + best2
    }

    #[test]
    fn loss_partial_table_against_born_rule() {
        let (eta, theta, vis) = (0.9, 0.4, 0.99);
        let d = loss_partial_distribution(eta, theta, vis);
        let oracle = born_rule_table(eta, theta, vis);
        for i in 0..2 {
            for j in 0..3 {
                assert!(
                    (d.prob(i, j) - oracle[i][j]).abs() < 1e-12,
                    "entry ({i},{j})"
                );
            }
        }
        // trivial anchors
        let d = loss_partial_distribution(1.0, core::f64::consts::FRAC_PI_2, 1.0);
        assert!((d.prob(0, 0) - 0.5).abs() < 1e-12);
        assert!((d.prob(1, 1) - 0.5).abs() < 1e-12);
        let d = loss_partial_distribution(1.0, 0.0, 1.0);
        assert!((d.prob(0, 0) - 1.0).abs() < 1e-12);
    }

    /// Density-matrix oracle: build rho = v psi_theta + (1-v) I/4 in the
    /// computational basis, measure Z x Z by projectors, apply loss
    /// mixing, and bin Alice's nondetection row into +.
    fn born_rule_table(eta: f64, theta: f64, vis: f64) -> [[f64; 3]; 2] {
        let c = math::cos(theta / 2.0);
        let s = math::sin(theta / 2.0);
        let psi = [c, 0.0, 0.0, s];
        let mut rho = [[0.0f64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] = vis * psi[i] * psi[j] + if i == j { (1.0 - vis) / 4.0 } else { 0.0 };
            }
        }
        // Z x Z projector outcomes: |00>, |01>, |10>, |11> diagonal entries
        let p = [rho[0][0], rho[1][1], rho[2][2], rho[3][3]];
        let (p_pp, p_pm, p_mp, p_mm) = (p[0], p[1], p[2], p[3]);
        let eb = 1.0 - eta;
        let three = [
            [eta * eta * p_pp, eta * eta * p_pm, eta * eb * (p_pp + p_pm)],
            [eta * eta * p_mp, eta * eta * p_mm, eta * eb * (p_mp + p_mm)],
            [eta * eb * (p_pp + p_mp), eta * eb * (p_pm + p_mm), eb * eb],
        ];
        [
            [
                three[0][0] + three[2][0],
                three[0][1] + three[2][1],
                three[0][2] + three[2][2],
            ],
            three[1],
        ]
    }

    #[test]
    fn small_theta_approx_examples() {
        // eta = 1 kills the quotient term: S = 2 + theta^2
        let v = chsh_small_theta_approx(1.0, 0.7, 0.05);
        assert!((v - (2.0 + 0.0025)).abs() < 1e-15);
        // matches the exact expression to O(theta^4)
        let (eta, phi_a, theta) = (0.9, 0.3, 1e-3);
        let exact = loss_partial_s_alpha(eta, theta, phi_a, 1.0).value();
        let approx = chsh_small_theta_approx(eta, phi_a, theta);
        assert!((exact - approx).abs() < 1e-9, "{exact} vs {approx}");
        // threshold efficiency 2/3: the theta^2 coefficient vanishes
        let coeff = |eta: f64| (chsh_small_theta_approx(eta, 1e-6, 1e-3) - 2.0) / 1e-6;
        assert!(coeff(2.0 / 3.0 + 1e-9) > 0.0);
        assert!(coeff(2.0 / 3.0 - 1e-9) < 0.0);
    }

    #[test]
    fn small_angle_coefficient_consistency() {
        // quotient form reduces to eta(3 eta - 2 - eta etabar phi^2/4)
        for &eta in &[0.7, 0.85, 0.95] {
            for &phi in &[0.01, 0.03, 0.05] {
                let full = (chsh_small_theta_approx(eta, phi, 1e-3) - 2.0) / 1e-6;
                let eb = 1.0 - eta;
                let small = eta * (3.0 * eta - 2.0 - 0.25 * eta * eb * phi * phi);
                assert!(
                    ((full - small) / small).abs() < 0.01,
                    "eta={eta} phi={phi}: {full} vs {small}"
                );
            }
        }
    }

    #[test]
    fn devetak_winter_perfect_state() {
        let r = depolarizing_rate(0.0, 0.0, 1.0, false).unwrap();
        assert!((r.rate - 1.0).abs() < 1e-12);
        assert_eq!(r.rate, r.entropy_bound.value - r.h_a_given_b);
    }

    #[test]
    fn devetak_winter_chsh_threshold_bracket() {
        // rate crosses zero near the CHSH depolarizing threshold 7.1492%
        let lo = depolarizing_rate(0.0714, 0.0, 1.0, false).unwrap();
        let hi = depolarizing_rate(0.0716, 0.0, 1.0, false).unwrap();
        assert!(lo.rate > 0.0 && hi.rate < 0.0, "{} {}", lo.rate, hi.rate);
    }

    #[test]
    fn devetak_winter_loss_threshold_bracket() {
        // Table anchor: maxent, alpha = 1, q = 0 crosses near 90.7768%
        let lo = devetak_winter(
            &ChannelModel::LossMaxEntangled {
                eta: 0.9076,
                bob_optimal: false,
                visibility: 1.0,
            },
            0.0,
            1.0,
        )
        .unwrap();
        let hi = devetak_winter(
            &ChannelModel::LossMaxEntangled {
                eta: 0.9080,
                bob_optimal: false,
                visibility: 1.0,
            },
            0.0,
            1.0,
        )
        .unwrap();
        assert!(lo.rate < 0.0 && hi.rate > 0.0, "{} {}", lo.rate, hi.rate);
    }

    #[test]
    fn rate_monotone_in_delta() {
        let mut prev = f64::INFINITY;
        for i in 0..=25 {
            let delta = 0.25 * i as f64 / 25.0;
            let r = depolarizing_rate(delta, 0.0, 1.0, false).unwrap().rate;
            assert!(r < prev, "delta={delta}");
            prev = r;
        }
    }
}
