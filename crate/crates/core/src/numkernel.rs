//! Numerically stable scalar kernels shared by every density evaluation:
//! the standard normal pdf/cdf pair, the scaled Mills tail
//! `exp(x²/2)·Φ(−x)`, and signed log-domain combination of exponential
//! terms.
//!
//! The cdf is routed through the complementary error function so that the
//! *tail* keeps full relative accuracy; `1 − Φ(x)` style subtraction never
//! appears.

use crate::error::{Error, Result};

/// 1/√(2π).
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
/// ln√(2π).
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;
/// √(2π).
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Switch point between the erfc product and the Laplace continued
/// fraction for the scaled Mills tail. Below it `exp(x²/2)` and
/// `erfc(x/√2)` are both representable; above it erfc underflows before
/// the product can be formed.
const MILLS_CF_CUTOFF: f64 = 26.0;
const MILLS_CF_DEPTH: u32 = 48;

#[inline]
pub(crate) fn pdf_raw(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

#[inline]
pub(crate) fn cdf_raw(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// ln Φ(x), stable on both sides. The left tail goes through the scaled
/// Mills form so it stays finite down to arbitrarily negative `x`.
pub(crate) fn log_cdf_raw(x: f64) -> f64 {
    if x >= 0.0 {
        (-cdf_raw(-x)).ln_1p()
    } else {
        scaled_mills_raw(-x).ln() - 0.5 * x * x
    }
}

/// Tail piece `t₁` of the Laplace continued fraction
/// `Φ(−x)/φ(x) = 1/(x + t₁)` with `t₁ = 1/(x + 2/(x + 3/(x + …)))`.
fn mills_cf_tail(x: f64) -> f64 {
    let mut t = 0.0;
    for k in (2..=MILLS_CF_DEPTH).rev() {
        t = f64::from(k) / (x + t);
    }
    1.0 / (x + t)
}

pub(crate) fn scaled_mills_raw(x: f64) -> f64 {
    if x <= 0.0 {
        // Direct product; Φ(−x) is O(1) here and exp(x²/2) holds to x ≈ −37.
        (0.5 * x * x).exp() * cdf_raw(-x)
    } else if x < MILLS_CF_CUTOFF {
        (0.5 * x * x).exp() * 0.5 * libm::erfc(x * FRAC_1_SQRT_2)
    } else {
        1.0 / (SQRT_2PI * (x + mills_cf_tail(x)))
    }
}

/// `1 − √(2π)·x·scaled_mills(x)` for `x ≥ 0`, the remainder that survives
/// the cancellation `φ(x)/√ℓ − μΦ(−μ√ℓ)` in the closed-form length
/// density. Decays like `1/x²`; always in `(0, 1]`.
pub(crate) fn mills_gap_raw(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < MILLS_CF_CUTOFF {
        1.0 - SQRT_2PI * x * scaled_mills_raw(x)
    } else {
        // 1 − x/(x + t₁) = t₁/(x + t₁): no subtraction at all.
        let t1 = mills_cf_tail(x);
        t1 / (x + t1)
    }
}

fn require_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} requires a finite argument, got {x}"
        )))
    }
}

/// Standard normal density φ(x) = exp(−x²/2)/√(2π).
pub fn std_normal_pdf(x: f64) -> Result<f64> {
    require_finite("std_normal_pdf", x)?;
    Ok(pdf_raw(x))
}

/// Standard normal cdf Φ(x), evaluated as `erfc(−x/√2)/2` so the smaller
/// of the two tails keeps relative accuracy.
pub fn std_normal_cdf(x: f64) -> Result<f64> {
    require_finite("std_normal_cdf", x)?;
    Ok(cdf_raw(x))
}

/// Scaled Mills tail `exp(x²/2)·Φ(−x)`.
///
/// For positive arguments the naive product cancels catastrophically;
/// here it is formed from `erfc` up to the point where that underflows
/// and from the Laplace continued fraction beyond.
pub fn scaled_mills(x: f64) -> Result<f64> {
    require_finite("scaled_mills", x)?;
    Ok(scaled_mills_raw(x))
}

/// One standard-normal evaluation with every derived quantity the
/// densities consume.
#[derive(Clone, Copy, Debug)]
pub struct StdNormalEval {
    pub x: f64,
    /// φ(x)
    pub phi: f64,
    /// Φ(x)
    pub cdf: f64,
    /// ln Φ(x)
    pub log_cdf: f64,
    /// exp(x²/2)·Φ(−x)
    pub scaled_tail: f64,
}

impl StdNormalEval {
    pub fn at(x: f64) -> Result<Self> {
        require_finite("StdNormalEval::at", x)?;
        Ok(Self {
            x,
            phi: pdf_raw(x),
            cdf: cdf_raw(x),
            log_cdf: log_cdf_raw(x),
            scaled_tail: scaled_mills_raw(x),
        })
    }
}

/// Sign of a log-domain term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

/// A signed magnitude kept as `sign · exp(log_abs)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedLog {
    pub sign: Sign,
    pub log_abs: f64,
}

impl SignedLog {
    pub fn positive(log_abs: f64) -> Self {
        Self {
            sign: Sign::Positive,
            log_abs,
        }
    }

    pub fn negative(log_abs: f64) -> Self {
        Self {
            sign: Sign::Negative,
            log_abs,
        }
    }

    pub fn zero() -> Self {
        Self {
            sign: Sign::Zero,
            log_abs: f64::NEG_INFINITY,
        }
    }

    /// Back to linear scale (may overflow/underflow, by intent).
    pub fn value(&self) -> f64 {
        match self.sign {
            Sign::Positive => self.log_abs.exp(),
            Sign::Negative => -self.log_abs.exp(),
            Sign::Zero => 0.0,
        }
    }
}

/// Combine signed exponential terms without leaving the log domain:
/// `Σ signᵢ·exp(logᵢ)` returned as a `SignedLog`.
///
/// Factoring out the largest magnitude keeps the partial sums of order
/// one, so terms near `exp(±700)` combine without overflow. Exact
/// cancellation is reported as [`SignedLog::zero`], never as a garbage
/// logarithm.
pub fn log_sum_exp_combine(terms: &[SignedLog]) -> Result<SignedLog> {
    if terms.is_empty() {
        return Err(Error::Domain(
            "log_sum_exp_combine requires at least one term".to_string(),
        ));
    }
    let max_log = terms
        .iter()
        .filter(|t| t.sign != Sign::Zero)
        .map(|t| t.log_abs)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_log == f64::NEG_INFINITY {
        return Ok(SignedLog::zero());
    }
    let mut sum = 0.0;
    for t in terms {
        match t.sign {
            Sign::Positive => sum += (t.log_abs - max_log).exp(),
            Sign::Negative => sum -= (t.log_abs - max_log).exp(),
            Sign::Zero => {}
        }
    }
    if sum == 0.0 {
        Ok(SignedLog::zero())
    } else if sum > 0.0 {
        Ok(SignedLog::positive(max_log + sum.ln()))
    } else {
        Ok(SignedLog::negative(max_log + (-sum).ln()))
    }
}
