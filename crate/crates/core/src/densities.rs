//! Probability densities of the last drawdown of a drifted Brownian
//! motion over a finite horizon: the length marginal ρ(ℓ), the depth
//! marginal ψ(d), the joint (d, ℓ) density with the maximum integrated
//! out, and their tail integrals.
//!
//! Everything reduces to one scalar factor
//!
//! ```text
//! A(μ, t) = φ(μ√t)/√t + μ·Φ(μ√t)
//! ```
//!
//! The length density is `ρ(ℓ) = 2·A(μ, T−ℓ)·A(−μ, ℓ)`, and the joint
//! density, after the maximum-value integral is done in closed form and
//! all exponents are merged analytically, is
//!
//! ```text
//! g(d, ℓ) = √(2/π)·d·ℓ^{−3/2}·exp(−(d+μℓ)²/(2ℓ))·A(μ, T−ℓ)
//! ```
//!
//! The merged exponent is never positive, so nothing overflows no matter
//! how large μ²T grows; each value is assembled in the log domain and
//! exponentiated once at the end. `A(−μ, t)` for μ > 0 hides the
//! cancellation `φ(x)/√t − μΦ(−x)` and is routed through the scaled
//! Mills remainder instead.
//!
//! Both ρ and the tail integrands diverge like an inverse square root at
//! the interval ends; every integral over ℓ therefore runs in the
//! variable θ with `ℓ = T·sin²θ`, which renders the integrands analytic.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkernel::{log_cdf_raw, log_sum_exp_combine, mills_gap_raw, SignedLog, LN_SQRT_2PI};
use crate::quad::{self, Tolerance, DEFAULT_MAX_SUBDIVISIONS};

/// ln √(2/π).
const LN_SQRT_2_OVER_PI: f64 = -0.225_791_352_644_727_45;

/// The model under test: an annualized Sharpe ratio (the drift once risk
/// is normalized to σ = 1) and a horizon in years.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProcessSpec {
    sharpe: f64,
    horizon: f64,
}

impl ProcessSpec {
    /// Negative and zero Sharpe ratios are accepted here — the formulas
    /// stay valid for any drift; whether they are *meaningful* is the
    /// inference layer's call.
    pub fn new(sharpe: f64, horizon: f64) -> Result<Self> {
        if !sharpe.is_finite() {
            return Err(Error::Domain(format!(
                "sharpe must be finite, got {sharpe}"
            )));
        }
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::Domain(format!(
                "horizon must be a positive number of years, got {horizon}"
            )));
        }
        Ok(Self { sharpe, horizon })
    }

    pub fn sharpe(&self) -> f64 {
        self.sharpe
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }
}

/// A point of the joint drawdown law; `max_value` is carried only when
/// the un-marginalized three-variable density is being addressed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointPoint {
    pub depth: f64,
    pub length: f64,
    pub max_value: Option<f64>,
}

impl JointPoint {
    pub fn new(spec: &ProcessSpec, depth: f64, length: f64) -> Result<Self> {
        check_depth_positive(depth)?;
        check_length_interior(spec, length)?;
        Ok(Self {
            depth,
            length,
            max_value: None,
        })
    }

    pub fn with_max(spec: &ProcessSpec, depth: f64, length: f64, max_value: f64) -> Result<Self> {
        let mut point = Self::new(spec, depth, length)?;
        if !max_value.is_finite() || max_value < 0.0 {
            return Err(Error::Domain(format!(
                "max_value must be nonnegative, got {max_value}"
            )));
        }
        point.max_value = Some(max_value);
        Ok(point)
    }
}

fn check_depth_positive(depth: f64) -> Result<()> {
    if !depth.is_finite() || depth <= 0.0 {
        return Err(Error::Domain(format!(
            "depth must be strictly positive (the d = 0 limit is rejected), got {depth}"
        )));
    }
    Ok(())
}

fn check_length_interior(spec: &ProcessSpec, length: f64) -> Result<()> {
    if !length.is_finite() || length <= 0.0 || length >= spec.horizon {
        return Err(Error::Domain(format!(
            "length must lie strictly inside (0, {}), got {length}",
            spec.horizon
        )));
    }
    Ok(())
}

/// ln A(μ, t) with `A(μ, t) = φ(μ√t)/√t + μ·Φ(μ√t)`, valid for any drift
/// sign and t > 0.
///
/// For μ > 0 both summands are positive and bounded, combined in the log
/// domain. For μ < 0 the naive difference cancels to the Mills remainder,
/// so it is rewritten as `φ(x)/√t · (1 − √(2π)·x·m(x))` with x = |μ|√t.
fn log_drift_factor(mu: f64, t: f64) -> f64 {
    debug_assert!(t > 0.0);
    let x = mu * t.sqrt();
    if mu > 0.0 {
        let phi_part = SignedLog::positive(-0.5 * x * x - LN_SQRT_2PI - 0.5 * t.ln());
        let cdf_part = SignedLog::positive(mu.ln() + log_cdf_raw(x));
        log_sum_exp_combine(&[phi_part, cdf_part])
            .expect("two terms")
            .log_abs
    } else if mu == 0.0 {
        -LN_SQRT_2PI - 0.5 * t.ln()
    } else {
        -0.5 * x * x - LN_SQRT_2PI - 0.5 * t.ln() + mills_gap_raw(-x).ln()
    }
}

/// ln ρ(ℓ) assembled from both drift factors; `complement` is T − ℓ,
/// passed separately so substitution-based callers can supply it without
/// cancellation near the right endpoint.
fn log_rho(mu: f64, length: f64, complement: f64) -> f64 {
    std::f64::consts::LN_2 + log_drift_factor(mu, complement) + log_drift_factor(-mu, length)
}

/// ln g(d, ℓ): the joint density with the maximum integrated out.
/// The exponent −μd − d²/(2ℓ) − μ²ℓ/2 is kept as the complete square
/// −(d+μℓ)²/(2ℓ), which can never overflow.
fn log_joint(mu: f64, depth: f64, length: f64, complement: f64) -> f64 {
    let s = depth + mu * length;
    LN_SQRT_2_OVER_PI + depth.ln() - 1.5 * length.ln() - s * s / (2.0 * length)
        + log_drift_factor(mu, complement)
}

/// ln ∫_{d₀}^∞ u·exp(−(u+μℓ)²/(2ℓ)) du. Closed form of the inner depth
/// integral; with z = d₀/√ℓ + μ√ℓ it is
///
/// ```text
/// ℓ·e^{−z²/2} − μℓ·√(2πℓ)·Φ(−z)
/// ```
///
/// For μ > 0 the subtraction is regrouped into the all-positive form
/// `(ℓ/z)·e^{−z²/2}·(d₀/√ℓ + μ√ℓ·(1 − √(2π)·z·m(z)))`; for μ < 0 both
/// terms are already positive.
fn log_upper_depth_integral(mu: f64, depth: f64, length: f64) -> f64 {
    let sqrt_len = length.sqrt();
    let z = depth / sqrt_len + mu * sqrt_len;
    if mu > 0.0 {
        let bracket = log_sum_exp_combine(&[
            SignedLog::positive(depth.ln() - 0.5 * length.ln()),
            SignedLog::positive(mu.ln() + 0.5 * length.ln() + mills_gap_raw(z).ln()),
        ])
        .expect("two terms")
        .log_abs;
        length.ln() - z.ln() - 0.5 * z * z + bracket
    } else if mu == 0.0 {
        length.ln() - 0.5 * z * z
    } else {
        log_sum_exp_combine(&[
            SignedLog::positive(length.ln() - 0.5 * z * z),
            SignedLog::positive((-mu).ln() + 1.5 * length.ln() + LN_SQRT_2PI + log_cdf_raw(-z)),
        ])
        .expect("two terms")
        .log_abs
    }
}

/// ∫ f(ℓ, T−ℓ) dℓ over (lo, hi) ⊆ (0, T) in the substituted variable
/// ℓ = T·sin²θ, which absorbs the inverse-square-root endpoint behavior.
/// The complement T·cos²θ is formed directly, never as T − ℓ.
fn integrate_over_length<F>(horizon: f64, lo: f64, hi: f64, f: F) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    let theta_lo = (lo / horizon).clamp(0.0, 1.0).sqrt().asin();
    let theta_hi = (hi / horizon).clamp(0.0, 1.0).sqrt().asin();
    let q = quad::integrate(
        |theta| {
            let (s, co) = theta.sin_cos();
            let length = horizon * s * s;
            let complement = horizon * co * co;
            if length <= 0.0 || complement <= 0.0 {
                return 0.0;
            }
            f(length, complement) * horizon * 2.0 * s * co
        },
        theta_lo,
        theta_hi,
        Tolerance::default(),
        DEFAULT_MAX_SUBDIVISIONS,
    )?;
    Ok(q.value)
}

/// Density of the last-drawdown length, `ρ(ℓ | SR, T)`, per year.
///
/// Exact endpoints are rejected: the density has integrable singularities
/// there and no caller legitimately needs the boundary values.
pub fn rho_length(spec: &ProcessSpec, length: f64) -> Result<f64> {
    check_length_interior(spec, length)?;
    Ok(log_rho(spec.sharpe, length, spec.horizon - length).exp())
}

/// Joint density `g(d, ℓ)` of depth and length, per (σ·year): the
/// integrand of ψ before the ℓ-integration.
pub fn joint_dl_density(spec: &ProcessSpec, depth: f64, length: f64) -> Result<f64> {
    check_depth_positive(depth)?;
    check_length_interior(spec, length)?;
    Ok(log_joint(spec.sharpe, depth, length, spec.horizon - length).exp())
}

/// Density of the last-drawdown depth, `ψ(d | SR, T)`, per σ-unit:
/// the single ℓ-integral of the joint density.
pub fn psi_depth(spec: &ProcessSpec, depth: f64) -> Result<f64> {
    check_depth_positive(depth)?;
    let mu = spec.sharpe;
    integrate_over_length(spec.horizon, 0.0, spec.horizon, |length, complement| {
        log_joint(mu, depth, length, complement).exp()
    })
}

/// P(ℓ_last ≥ length). Returns exactly 1 at zero and 0 at the horizon.
pub fn length_tail_prob(spec: &ProcessSpec, length: f64) -> Result<f64> {
    if !length.is_finite() || length < 0.0 || length > spec.horizon {
        return Err(Error::Domain(format!(
            "length must lie in [0, {}], got {length}",
            spec.horizon
        )));
    }
    if length == 0.0 {
        return Ok(1.0);
    }
    if length == spec.horizon {
        return Ok(0.0);
    }
    let mu = spec.sharpe;
    let v = integrate_over_length(spec.horizon, length, spec.horizon, |ell, complement| {
        log_rho(mu, ell, complement).exp()
    })?;
    Ok(v.clamp(0.0, 1.0))
}

/// P(d_last ≥ depth). The depth direction is integrated in closed form,
/// leaving one ℓ-quadrature. Returns exactly 1 at zero depth.
pub fn depth_tail_prob(spec: &ProcessSpec, depth: f64) -> Result<f64> {
    if !depth.is_finite() || depth < 0.0 {
        return Err(Error::Domain(format!(
            "depth must be nonnegative, got {depth}"
        )));
    }
    if depth == 0.0 {
        return Ok(1.0);
    }
    let mu = spec.sharpe;
    let v = integrate_over_length(spec.horizon, 0.0, spec.horizon, |length, complement| {
        (LN_SQRT_2_OVER_PI - 1.5 * length.ln()
            + log_drift_factor(mu, complement)
            + log_upper_depth_integral(mu, depth, length))
        .exp()
    })?;
    Ok(v.clamp(0.0, 1.0))
}

/// ∫₀ˣ g(depth, ℓ) dℓ — the unnormalized conditional length CDF given a
/// depth. Used by the corridor solver.
pub(crate) fn joint_partial_length_integral(
    spec: &ProcessSpec,
    depth: f64,
    upto: f64,
) -> Result<f64> {
    check_depth_positive(depth)?;
    if !upto.is_finite() || upto < 0.0 || upto > spec.horizon {
        return Err(Error::Domain(format!(
            "upper limit must lie in [0, {}], got {upto}",
            spec.horizon
        )));
    }
    if upto == 0.0 {
        return Ok(0.0);
    }
    let mu = spec.sharpe;
    integrate_over_length(spec.horizon, 0.0, upto, |length, complement| {
        log_joint(mu, depth, length, complement).exp()
    })
}
