//! Maximal-noise-preprocessing limit q -> 1/2.
//!
//! With q = (1 - eps)/2 both the entropy bound and the conditional Shannon
//! entropy expand as 1 + c eps^2 + O(eps^4); key-rate thresholds in the
//! limit are roots of the difference of the eps^2 coefficients. The
//! entropy-side coefficient inherits the tangent construction: the tangent
//! root-find is re-run on the coefficient function itself, which is the
//! eps -> 0 limit of the exact construction.

use crate::entropy::BellValue;
use crate::error::{Error, Result};
use crate::math;
use crate::models::{ChannelModel, JointDistribution};
use crate::solve;

/// eps^2 coefficient of the key rate near q = 1/2; the threshold
/// condition is coefficient = 0 and positive means positive rate for
/// small eps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonRate {
    pub coefficient: f64,
}

/// eps^2 coefficient of h((1-eps)/2) - 1.
pub const SHANNON_FLAT_COEFF: f64 = -0.721_347_520_444_481_7; // -1/(2 ln 2)

#[inline]
fn c_h() -> f64 {
    -1.0 / (2.0 * math::LN_2)
}

/// eps^2 coefficient of the BB84 bound minus 1, as a function of the
/// correlator E: -(1 - E^2)/(4E) log2((1+E)/(1-E)).
///
/// The formula is 0/0 at E = 0 but the limit is finite, -1/(2 ln 2);
/// a series is used for tiny E. Vanishes at E = 1.
pub(crate) fn gamma_coeff(e: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&e));
    if e >= 1.0 {
        return 0.0;
    }
    if e <= 1e-7 {
        // -(1 - E^2)(1 + E^2/3 + E^4/5)/(2 ln 2)
        let e2 = e * e;
        return -(1.0 - e2) * (1.0 + e2 / 3.0 + e2 * e2 / 5.0) / (2.0 * math::LN_2);
    }
    -(1.0 - e * e) / (4.0 * e) * math::log_ratio(e) / math::LN_2
}

#[inline]
fn corr(alpha: f64, s: f64) -> f64 {
    math::sqrt((s * s / 4.0 - alpha * alpha).max(0.0))
}

fn coeff_curve(alpha: f64, s: f64) -> f64 {
    gamma_coeff(corr(alpha, s).min(1.0))
}

/// (s, coefficient, slope) at the complement coordinate t = 1 - E; same
/// reparametrization as the finite-q tangent construction, since the root
/// crowds the quantum bound as alpha decreases.
fn coeff_eval(alpha: f64, t: f64) -> (f64, f64, f64) {
    let e = 1.0 - t;
    let s = 2.0 * math::sqrt(alpha * alpha + e * e);
    let l = (math::ln(2.0 - t) - math::ln(t)) / math::LN_2;
    // gamma = -(1 - E^2)/(4E) * L with 1 - E^2 = t (2 - t)
    let val = -t * (2.0 - t) / (4.0 * e) * l;
    let slope_e = if e <= 1e-5 {
        // series; the two closed-form terms cancel as E -> 0
        (2.0 * e / 3.0 + 4.0 * e * e * e / 15.0) / math::LN_2
    } else {
        (1.0 + e * e) / (4.0 * e * e) * l - 1.0 / (2.0 * e * math::LN_2)
    };
    (s, val, slope_e * s / (4.0 * e))
}

/// Prepared eps^2-coefficient bound for one alpha, mirroring
/// `EntropyBound`: tangent anchor found once, evaluations cheap.
#[derive(Debug, Clone)]
pub struct MaxqBound {
    alpha: f64,
    quantum: f64,
    tangent: Option<(f64, f64)>, // (s_star, slope)
}

impl MaxqBound {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha == 0.0 {
            return Err(Error::Domain {
                what: "alpha must be finite and nonzero",
                value: alpha,
            });
        }
        let a = math::abs(alpha);
        let quantum = BellValue::quantum_bound(alpha);
        let tangent = if a < 1.0 {
            let a2 = a * a;
            let quantum_minus_2 = 2.0 * a2 / (1.0 + math::sqrt(1.0 + a2));
            let chord = (quantum, -c_h() / quantum_minus_2);
            let residual = |ln_t: f64| {
                let (s, val, slope) = coeff_eval(alpha, libm::exp(ln_t));
                c_h() + slope * (s - 2.0) - val
            };
            let t_lo = a2 * a2 / (1.0 + math::sqrt((1.0 - a2 * a2).max(0.0)));
            if t_lo <= 1e-300 {
                Some(chord)
            } else {
                let y_lo = math::ln(t_lo);
                let y_min = -690.0;
                if residual(y_lo) >= 0.0 {
                    let (s, _, slope) = coeff_eval(alpha, t_lo);
                    Some((s, slope.max(0.0)))
                } else if residual(y_min) <= 0.0 {
                    Some(chord)
                } else {
                    let y = solve::bisect_root(residual, y_min, y_lo, 1e-12, "maxq tangent root")?;
                    let (s, _, slope) = coeff_eval(alpha, libm::exp(y));
                    Some((s, slope.max(0.0)))
                }
            }
        } else {
            None
        };
        Ok(Self {
            alpha,
            quantum,
            tangent,
        })
    }

    /// eps^2 coefficient of the device-independent bound minus 1 at `s`;
    /// sub-classical values clamp to the flat h(q) coefficient.
    pub fn evaluate(&self, s: BellValue) -> Result<f64> {
        let a = math::abs(s.value());
        if !a.is_finite() || a > self.quantum + 1e-9 {
            return Err(Error::Domain {
                what: "s exceeds the quantum bound",
                value: s.value(),
            });
        }
        let a = a.min(self.quantum);
        match self.tangent {
            None => {
                if a < 2.0 * math::abs(self.alpha) {
                    Ok(c_h())
                } else {
                    Ok(coeff_curve(self.alpha, a))
                }
            }
            Some((s_star, slope)) => {
                if a >= s_star {
                    Ok(coeff_curve(self.alpha, a))
                } else {
                    Ok(c_h() + slope * (a - 2.0).max(0.0))
                }
            }
        }
    }
}

/// eps^2 coefficient of the entropy bound minus 1 at (alpha, s).
pub fn entropy_eps2_coeff(alpha: f64, s: BellValue) -> Result<f64> {
    MaxqBound::new(alpha)?.evaluate(s)
}

/// Magnitude of the eps^2 deficit of H(A|B) from 1:
/// (1/(2 ln 2)) sum_b (p_{+b} - p_{-b})^2 / p_b, computed on the joint
/// distribution before noise preprocessing. Empty columns contribute 0.
pub fn shannon_eps2_coeff(d: &JointDistribution) -> f64 {
    let mut total = 0.0;
    for j in 0..d.cols() {
        let pb = d.prob(0, j) + d.prob(1, j);
        if pb <= 0.0 {
            continue;
        }
        let diff = d.prob(0, j) - d.prob(1, j);
        total += diff * diff / pb;
    }
    total / (2.0 * math::LN_2)
}

/// Signed eps^2 coefficient of the Devetak-Winter rate at q -> 1/2:
/// Shannon deficit plus (negative) entropy deficit; positive means
/// positive key rate for small eps.
pub fn maxq_rate_coeff(model: &ChannelModel, alpha: f64) -> Result<EpsilonRate> {
    model.validate()?;
    let bound = MaxqBound::new(alpha)?;
    maxq_rate_coeff_prepared(model, &bound)
}

pub fn maxq_rate_coeff_prepared(model: &ChannelModel, bound: &MaxqBound) -> Result<EpsilonRate> {
    let s = model.s_alpha(bound.alpha);
    let entropy_deficit = bound.evaluate(s)?;
    let shannon_deficit = shannon_eps2_coeff(&model.distribution());
    Ok(EpsilonRate {
        coefficient: shannon_deficit + entropy_deficit,
    })
}

/// theta -> 0 limit of the partially entangled maxq coefficient per
/// theta^2, at v = 1 with phi_a -> 0 and alpha = 1 (the optimal corner):
/// eta (3 eta^2 + 6 eta - 7) / (6 ln 2). Its positive root is the
/// analytic threshold sqrt(10/3) - 1.
pub fn partial_boundary_coeff(eta: f64) -> f64 {
    eta * (3.0 * eta * eta + 6.0 * eta - 7.0) / (6.0 * math::LN_2)
}

/// Root of `partial_boundary_coeff` in (0, 1).
pub fn partial_boundary_threshold() -> f64 {
    math::sqrt(10.0 / 3.0) - 1.0
}
