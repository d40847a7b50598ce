//! Closed-form conditional-entropy bounds for the asymmetric CHSH family.
//!
//! The central object is the device-independent lower bound on H(A1|E) as a
//! function of the Bell expectation value `s` of
//! S_alpha = alpha <A1B1> + alpha <A1B2> + <A2B1> - <A2B2>, with noise
//! preprocessing at flip rate `q`. The bound is the convex function
//! obtained from the explicit-attack curve `g` by replacing its non-convex
//! part (present for |alpha| < 1) with the tangent line through the
//! classical anchor (s = 2, h(q)).

use crate::error::{Error, Result};
use crate::math;
use crate::solve;

const DOMAIN_SLACK: f64 = 1e-9;

/// Expectation value of the asymmetric CHSH expression S_alpha.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellValue(pub f64);

impl BellValue {
    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Classical (local) bound C_alpha = max(2, 2|alpha|).
    #[inline]
    pub fn classical_bound(alpha: f64) -> f64 {
        2.0 * math::abs(alpha).max(1.0)
    }

    /// Quantum (Tsirelson) bound Q_alpha = 2 sqrt(1 + alpha^2).
    #[inline]
    pub fn quantum_bound(alpha: f64) -> f64 {
        2.0 * math::sqrt(1.0 + alpha * alpha)
    }
}

/// Parameters (q, alpha) selecting one member of the bound family.
///
/// `q` is the noise-preprocessing flip rate. Values above 1/2 are mapped to
/// 1 - q at construction; every formula depends on q only through q(1-q)
/// and (1-2q)^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    q: f64,
    alpha: f64,
}

impl BoundParams {
    pub fn new(q: f64, alpha: f64) -> Result<Self> {
        if !q.is_finite() || !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&q) {
            return Err(Error::Domain {
                what: "q must lie in [0, 1]",
                value: q,
            });
        }
        if !alpha.is_finite() || alpha == 0.0 {
            return Err(Error::Domain {
                what: "alpha must be finite and nonzero",
                value: alpha,
            });
        }
        let q = q.clamp(0.0, 1.0);
        let q = q.min(1.0 - q);
        Ok(Self { q, alpha })
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// h(q): the bound's value at the classical anchor.
    #[inline]
    pub fn hq(&self) -> f64 {
        math::binary_entropy_raw(self.q)
    }
}

/// Which piece of the piecewise bound produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// The explicit-attack curve g itself.
    Analytic,
    /// The tangent line through (s = 2, h(q)).
    Tangent,
}

/// Result of evaluating the entropy bound at one Bell value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundEvaluation {
    /// Bound on H(A1|E) in bits.
    pub value: f64,
    pub branch: Branch,
    /// Tangent anchor s*, present when the tangent construction applies.
    pub s_star: Option<f64>,
}

/// phi(x) = 1 - (1+x)/2 log2(1+x) - (1-x)/2 log2(1-x).
pub fn phi(x: f64) -> Result<f64> {
    if !x.is_finite() || !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&x) {
        return Err(Error::Domain {
            what: "phi argument must lie in [0, 1]",
            value: x,
        });
    }
    Ok(math::phi_raw(x))
}

/// Binary entropy h(p) in bits.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !p.is_finite() || !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&p) {
        return Err(Error::Domain {
            what: "binary_entropy argument must lie in [0, 1]",
            value: p,
        });
    }
    Ok(math::binary_entropy_raw(p))
}

/// 1 + phi(sqrt(Q + (1-Q) u)) - phi(sqrt(u)) with Q = (1-2q)^2.
///
/// `u` is the squared correlator; this shape is shared by the S_alpha
/// bound (u = s^2/4 - alpha^2), the BB84 bound (u = E_xx^2) and the
/// explicit-attack entropy (u = F^2).
pub(crate) fn bound_from_correlator_sq(q: f64, u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    let big_q = (1.0 - 2.0 * q) * (1.0 - 2.0 * q);
    1.0 + math::phi_raw(math::sqrt(big_q + (1.0 - big_q) * u)) - math::phi_raw(math::sqrt(u))
}

/// d/du of `bound_from_correlator_sq` for u in (0, 1).
pub(crate) fn dbound_du(q: f64, u: f64) -> f64 {
    let big_q = (1.0 - 2.0 * q) * (1.0 - 2.0 * q);
    let r = math::sqrt(u);
    let cap_r = math::sqrt(big_q + (1.0 - big_q) * u);
    // phi'(R) (1-Q) / (2R) vanishes identically at q = 0 (R constant).
    let t1 = if 1.0 - big_q == 0.0 || cap_r >= 1.0 {
        0.0
    } else {
        math::phi_prime_raw(cap_r) * (1.0 - big_q) / (2.0 * cap_r)
    };
    // phi'(r)/(2r) -> -1/(2 ln 2) as r -> 0.
    let t2 = if r > 0.0 {
        math::phi_prime_raw(r) / (2.0 * r)
    } else {
        -1.0 / (2.0 * math::LN_2)
    };
    t1 - t2
}

#[inline]
fn correlator_sq(alpha: f64, s: f64) -> f64 {
    s * s / 4.0 - alpha * alpha
}

/// The explicit-attack entropy curve g_{q,alpha}(s).
pub fn g(params: &BoundParams, s: BellValue) -> Result<f64> {
    let u = correlator_sq(params.alpha, s.0);
    if u < -DOMAIN_SLACK {
        return Err(Error::Domain {
            what: "g requires s^2/4 >= alpha^2",
            value: s.0,
        });
    }
    if u > 1.0 + DOMAIN_SLACK {
        return Err(Error::Domain {
            what: "g requires s within the quantum bound",
            value: s.0,
        });
    }
    Ok(bound_from_correlator_sq(params.q, u))
}

/// Analytic first derivative g'_{q,alpha}(s).
///
/// Singular at s = 2|alpha| and at the quantum bound; callers in the
/// tangent construction only evaluate it strictly inside.
pub fn g_prime(params: &BoundParams, s: BellValue) -> Result<f64> {
    let u = correlator_sq(params.alpha, s.0);
    if u <= 0.0 || u >= 1.0 {
        return Err(Error::Domain {
            what: "g' requires 2|alpha| < s < quantum bound",
            value: s.0,
        });
    }
    Ok(dbound_du(params.q, u) * s.0 / 2.0)
}

#[derive(Debug, Clone, Copy)]
struct TangentLine {
    s_star: f64,
    slope: f64,
}

/// Tangent data at the complement coordinate t = 1 - sqrt(s^2/4 - alpha^2).
///
/// The root of the tangent problem approaches the quantum bound
/// double-exponentially fast as alpha decreases (the needed slope grows
/// like 1/(Q_alpha - 2) while g' diverges only logarithmically), so the
/// root-find runs in ln t, where the whole approach region is resolved.
fn tangent_eval(q: f64, alpha: f64, t: f64) -> (f64, f64, f64) {
    let a2 = alpha * alpha;
    let big_q = (1.0 - 2.0 * q) * (1.0 - 2.0 * q);
    let r = 1.0 - t;
    let u = r * r;
    let s = 2.0 * math::sqrt(a2 + u);
    // 1 - R^2 = (1 - Q)(1 - u) exactly, in complement form
    let one_minus_r2 = (1.0 - big_q) * t * (2.0 - t);
    let cap_r = math::sqrt((1.0 - one_minus_r2).max(0.0));
    let t_r = one_minus_r2 / (1.0 + cap_r);
    let g = 1.0 + math::phi_from_complement(t_r) - math::phi_from_complement(t);
    let r_term = if 1.0 - big_q == 0.0 {
        0.0
    } else {
        math::phi_prime_from_complement(t_r) * (1.0 - big_q) / (2.0 * cap_r)
    };
    let dgdu = r_term - math::phi_prime_from_complement(t) / (2.0 * r);
    let gp = dgdu * s / 2.0;
    (s, g, gp)
}

fn tangent_anchor(params: &BoundParams) -> Result<TangentLine> {
    let a = math::abs(params.alpha);
    let a2 = a * a;
    let hq = params.hq();
    let quantum = 2.0 * math::sqrt(1.0 + a2);
    // stable Q_alpha - 2 for the chord fallback
    let quantum_minus_2 = 2.0 * a2 / (1.0 + math::sqrt(1.0 + a2));
    let chord = TangentLine {
        s_star: quantum,
        slope: (1.0 - hq) / quantum_minus_2,
    };
    let residual = |ln_t: f64| {
        let t = libm::exp(ln_t);
        let (s, g, gp) = tangent_eval(params.q, params.alpha, t);
        hq + gp * (s - 2.0) - g
    };
    // t at the bracket's lower-s end u = 1 - alpha^4, complement form
    let t_lo = a2 * a2 / (1.0 + math::sqrt((1.0 - a2 * a2).max(0.0)));
    if t_lo <= 1e-300 {
        // alpha so small that the entire bracket is beyond resolution
        return Ok(chord);
    }
    let y_lo = math::ln(t_lo);
    let y_min = -690.0; // t ~ 1e-300
    let f_lo = residual(y_lo);
    if f_lo >= 0.0 {
        // degenerate q -> 1/2: the curve is the constant 1 = h(q) and the
        // residual has no sign change; anchor at the bracket's lower end
        let (s, _, gp) = tangent_eval(params.q, params.alpha, t_lo);
        return Ok(TangentLine {
            s_star: s,
            slope: gp.max(0.0),
        });
    }
    if residual(y_min) <= 0.0 {
        // root closer to the quantum bound than t ~ 1e-300: the tangent
        // point is numerically the bound itself; use the exact chord
        return Ok(chord);
    }
    let y = solve::bisect_root(residual, y_min, y_lo, 1e-12, "find_s_star")?;
    let (s, _, gp) = tangent_eval(params.q, params.alpha, libm::exp(y));
    Ok(TangentLine {
        s_star: s,
        slope: gp.max(0.0),
    })
}

/// Root s* of h(q) + g'(s*)(s* - 2) = g(s*), the Bell value where the
/// tangent of g through the classical anchor touches the curve.
///
/// Defined for |alpha| < 1. The root lies in
/// [2 sqrt(1 + alpha^2 - alpha^4), 2 sqrt(1 + alpha^2)] and is located by
/// bisection (in the log of the distance to the quantum bound) well below
/// 1e-10 absolute in s. In the degenerate limit q -> 1/2 the residual is
/// identically zero (g and h(q) are both 1); the bracket's lower end is
/// returned and the bound is the constant h(q).
pub fn find_s_star(params: &BoundParams) -> Result<f64> {
    if math::abs(params.alpha) >= 1.0 {
        return Err(Error::Domain {
            what: "s* is defined for |alpha| < 1",
            value: params.alpha,
        });
    }
    Ok(tangent_anchor(params)?.s_star)
}

/// Prepared evaluator for one member of the bound family.
///
/// Construction performs the tangent root-find once (for |alpha| < 1);
/// evaluation is then cheap, which matters inside parameter sweeps.
#[derive(Debug, Clone)]
pub struct EntropyBound {
    params: BoundParams,
    hq: f64,
    quantum: f64,
    tangent: Option<TangentLine>,
}

impl EntropyBound {
    pub fn new(params: BoundParams) -> Result<Self> {
        let hq = params.hq();
        let quantum = BellValue::quantum_bound(params.alpha);
        let tangent = if math::abs(params.alpha) < 1.0 {
            Some(tangent_anchor(&params)?)
        } else {
            None
        };
        Ok(Self {
            params,
            hq,
            quantum,
            tangent,
        })
    }

    #[inline]
    pub fn params(&self) -> &BoundParams {
        &self.params
    }

    /// Tangent anchor s* when the |alpha| < 1 construction applies.
    #[inline]
    pub fn s_star(&self) -> Option<f64> {
        self.tangent.map(|t| t.s_star)
    }

    /// Evaluate the device-independent bound at `s`.
    ///
    /// The bound is even in s. Values below the classical bound carry no
    /// certifiable secrecy and return h(q) with the slope clamped to zero;
    /// values above the quantum bound (beyond slack) are rejected.
    pub fn evaluate(&self, s: BellValue) -> Result<BoundEvaluation> {
        let a = math::abs(s.0);
        if !a.is_finite() || a > self.quantum + DOMAIN_SLACK {
            return Err(Error::Domain {
                what: "s exceeds the quantum bound",
                value: s.0,
            });
        }
        let a = a.min(self.quantum);
        match self.tangent {
            None => {
                // |alpha| >= 1: g applies from the classical bound 2|alpha| up.
                if a < 2.0 * math::abs(self.params.alpha) {
                    Ok(BoundEvaluation {
                        value: self.hq,
                        branch: Branch::Tangent,
                        s_star: None,
                    })
                } else {
                    Ok(BoundEvaluation {
                        value: bound_from_correlator_sq(
                            self.params.q,
                            correlator_sq(self.params.alpha, a),
                        ),
                        branch: Branch::Analytic,
                        s_star: None,
                    })
                }
            }
            Some(t) => {
                if a >= t.s_star {
                    Ok(BoundEvaluation {
                        value: bound_from_correlator_sq(
                            self.params.q,
                            correlator_sq(self.params.alpha, a),
                        ),
                        branch: Branch::Analytic,
                        s_star: Some(t.s_star),
                    })
                } else {
                    let run = (a - 2.0).max(0.0);
                    Ok(BoundEvaluation {
                        value: self.hq + t.slope * run,
                        branch: Branch::Tangent,
                        s_star: Some(t.s_star),
                    })
                }
            }
        }
    }
}

/// One-shot evaluation of the device-independent entropy bound
/// H(A1|E) >= gbar_{q,alpha}(s).
pub fn entropy_bound(params: &BoundParams, s: BellValue) -> Result<BoundEvaluation> {
    EntropyBound::new(*params)?.evaluate(s)
}

/// Tight qubit lower bound E_alpha(s) on the correlator |<X x B>|.
///
/// Two branches meeting at s = 2 sqrt(1 + alpha^2 - alpha^4) with equal
/// values sqrt(1 - alpha^4) and equal first derivatives.
pub fn qubit_correlator_bound(alpha: f64, s: BellValue) -> Result<f64> {
    let a = math::abs(alpha);
    let sv = math::abs(s.0);
    let quantum = BellValue::quantum_bound(alpha);
    if sv < 2.0 - DOMAIN_SLACK || sv > quantum + DOMAIN_SLACK {
        return Err(Error::Domain {
            what: "qubit correlator bound requires 2 <= |s| <= quantum bound",
            value: s.0,
        });
    }
    let sv = sv.min(quantum);
    let a2 = a * a;
    if a >= 1.0 || sv >= 2.0 * math::sqrt(1.0 + a2 - a2 * a2) {
        Ok(math::sqrt((sv * sv / 4.0 - a2).max(0.0)))
    } else {
        if a == 0.0 {
            return Err(Error::Domain {
                what: "qubit correlator bound tangent branch requires alpha != 0",
                value: alpha,
            });
        }
        let inner = 1.0 - math::sqrt((1.0 - a2) * (sv * sv / 4.0 - 1.0).max(0.0)) / a;
        Ok(math::sqrt((1.0 - inner * inner).max(0.0)))
    }
}

/// BB84 entropy bound with noise preprocessing,
/// H(Z|E) >= 1 + phi(sqrt((1-2q)^2 + 4q(1-q) E^2)) - phi(E),
/// where `exx` plays the role of |<X x B>|.
pub fn bb84_bound(q: f64, exx: f64) -> Result<f64> {
    if !q.is_finite() || !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&q) {
        return Err(Error::Domain {
            what: "q must lie in [0, 1]",
            value: q,
        });
    }
    if !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&exx) {
        return Err(Error::Domain {
            what: "correlator must lie in [0, 1]",
            value: exx,
        });
    }
    let q = q.clamp(0.0, 1.0);
    let q = q.min(1.0 - q);
    let e = exx.clamp(0.0, 1.0);
    Ok(bound_from_correlator_sq(q, e * e))
}

/// Search range for the alpha maximization, chosen generously around the
/// optima the bound family exhibits (roughly 0.8 to 1.2).
pub const ALPHA_RANGE: (f64, f64) = (1e-3, 3.0);
const ALPHA_COARSE_POINTS: usize = 64;

/// Best entropy bound over the S_alpha family, for correlations with
/// c1 = <A1B1> + <A1B2> and c2 = <A2B1> - <A2B2> treated as independent,
/// so that S_alpha = alpha c1 + c2.
///
/// Returns (alpha_opt, value). When no alpha certifies a Bell violation
/// the bound is h(q) everywhere and (1, h(q)) is returned.
pub fn best_alpha_bound(q: f64, c1: f64, c2: f64) -> Result<(f64, f64)> {
    if math::abs(c1) > 2.0 + DOMAIN_SLACK || math::abs(c2) > 2.0 + DOMAIN_SLACK {
        return Err(Error::Domain {
            what: "correlator combinations must lie in [-2, 2]",
            value: if math::abs(c1) > 2.0 { c1 } else { c2 },
        });
    }
    let eval = |alpha: f64| -> f64 {
        let params = match BoundParams::new(q, alpha) {
            Ok(p) => p,
            Err(_) => return f64::NEG_INFINITY,
        };
        let bound = match EntropyBound::new(params) {
            Ok(b) => b,
            Err(_) => return f64::NEG_INFINITY,
        };
        match bound.evaluate(BellValue(alpha * c1 + c2)) {
            Ok(ev) => ev.value,
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let (lo, hi) = ALPHA_RANGE;
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..ALPHA_COARSE_POINTS {
        let a = solve::grid_point(lo, hi, i, ALPHA_COARSE_POINTS);
        let v = eval(a);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let bracket_lo = solve::grid_point(lo, hi, best_i.saturating_sub(1), ALPHA_COARSE_POINTS);
    let bracket_hi = solve::grid_point(
        lo,
        hi,
        (best_i + 1).min(ALPHA_COARSE_POINTS - 1),
        ALPHA_COARSE_POINTS,
    );
    let (alpha_opt, value) = solve::golden_max(eval, bracket_lo, bracket_hi, 1e-9);
    let hq = math::binary_entropy_raw(q.min(1.0 - q));
    if value <= hq + 1e-12 {
        // no Bell violation anywhere in the family
        return Ok((1.0, hq));
    }
    Ok((alpha_opt, value))
}
