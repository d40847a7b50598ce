//! Numerically stable special functions.
//!
//! All transcendental math is routed through `libm` so that results are
//! bit-identical between `std` and `no_std` builds.

pub(crate) const LN_2: f64 = core::f64::consts::LN_2;

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub(crate) fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub(crate) fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

/// ln((1+x)/(1-x)) without cancellation near x = 0.
///
/// Equal to 2 atanh(x); valid for |x| < 1.
#[inline]
pub(crate) fn log_ratio(x: f64) -> f64 {
    ln_1p(x) - ln_1p(-x)
}

/// phi(x) = 1 - (1+x)/2 log2(1+x) - (1-x)/2 log2(1-x) on [0, 1].
///
/// Inputs are clamped to [0, 1]; the endpoint limits phi(0) = 1 and
/// phi(1) = 0 are exact (0 log 0 = 0).
pub(crate) fn phi_raw(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    if x >= 1.0 {
        return 0.0;
    }
    // (1+x) ln(1+x) + (1-x) ln(1-x) via log1p keeps full precision near 0.
    let s = (1.0 + x) * ln_1p(x) + (1.0 - x) * ln_1p(-x);
    1.0 - s / (2.0 * LN_2)
}

/// phi'(x) = -1/2 log2((1+x)/(1-x)); diverges to -inf as x -> 1.
#[inline]
pub(crate) fn phi_prime_raw(x: f64) -> f64 {
    -log_ratio(x) / (2.0 * LN_2)
}

/// phi(1 - t), accurate for complements t far below f64 resolution of
/// the argument itself (t down to ~1e-300).
pub(crate) fn phi_from_complement(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    // (2-t) ln(2-t) = 2 ln 2 - t ln 2 + (2-t) ln(1 - t/2); the constant
    // cancels against the leading 1, leaving terms all of order t ln t
    (t * LN_2 - (2.0 - t) * ln_1p(-0.5 * t) - t * ln(t)) / (2.0 * LN_2)
}

/// phi'(1 - t) = -(ln(2 - t) - ln t) / (2 ln 2).
#[inline]
pub(crate) fn phi_prime_from_complement(t: f64) -> f64 {
    -(ln(2.0 - t) - ln(t)) / (2.0 * LN_2)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

/// Binary entropy h(p) in bits, with h(0) = h(1) = 0.
pub(crate) fn binary_entropy_raw(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -(p * log2(p) + (1.0 - p) * ln_1p(-p) / LN_2)
}

/// -w log2(w) with the 0 log 0 = 0 convention; used for entropy sums.
#[inline]
pub(crate) fn entropy_term(w: f64) -> f64 {
    if w > 0.0 {
        -w * log2(w)
    } else {
        0.0
    }
}
