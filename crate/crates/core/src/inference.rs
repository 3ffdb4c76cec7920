//! Turning the densities into decisions: tail quantiles (the 5% length
//! and depth thresholds), Sharpe-ratio updates that restore consistency
//! with an observed drawdown, the conditional length corridor given a
//! depth, power-law fits of the quantile curves, and the three-scenario
//! test verdict.

use serde::Serialize;

use crate::densities::{
    depth_tail_prob, joint_partial_length_integral, length_tail_prob, psi_depth, ProcessSpec,
};
use crate::error::{Error, Result};
use crate::roots::{brent, RootConfig};
use crate::Dimension;

/// Upper end of the Sharpe search bracket for updates. Anything beyond is
/// outside what a real strategy produces; hitting the cap is reported,
/// never silently truncated.
pub const SHARPE_SEARCH_CAP: f64 = 20.0;

/// Where an observation came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservationSource {
    Manual,
    Extracted,
}

/// An observed last drawdown: elapsed time since the high-water mark and
/// the gap below it, in years and annualized σ-units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DrawdownObservation {
    length: f64,
    depth: f64,
    source: ObservationSource,
}

impl DrawdownObservation {
    pub fn new(length: f64, depth: f64, source: ObservationSource) -> Result<Self> {
        if !length.is_finite() || length < 0.0 {
            return Err(Error::Domain(format!(
                "observed length must be nonnegative, got {length}"
            )));
        }
        if !depth.is_finite() || depth < 0.0 {
            return Err(Error::Domain(format!(
                "observed depth must be nonnegative, got {depth}"
            )));
        }
        if (length == 0.0) != (depth == 0.0) {
            return Err(Error::Domain(format!(
                "length and depth are zero together or positive together \
                 (a path at its running maximum has both zero); got length {length}, depth {depth}"
            )));
        }
        Ok(Self {
            length,
            depth,
            source,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn source(&self) -> ObservationSource {
        self.source
    }
}

/// Result of a Sharpe update. The floor marks an observation so extreme
/// that even zero drift cannot make it a `tail_prob` event: the
/// mathematical solution would need negative drift.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SharpeUpdate {
    Revised(f64),
    ZeroDriftFloor,
}

impl SharpeUpdate {
    pub fn value(&self) -> f64 {
        match self {
            SharpeUpdate::Revised(v) => *v,
            SharpeUpdate::ZeroDriftFloor => 0.0,
        }
    }
}

/// Outcome of testing an observed drawdown against an assumed Sharpe
/// ratio.
#[derive(Clone, Debug, Serialize)]
pub struct TestReport {
    pub spec: ProcessSpec,
    pub observation: DrawdownObservation,
    pub significance: f64,
    pub length_p_value: f64,
    pub depth_p_value: f64,
    pub length_flagged: bool,
    pub depth_flagged: bool,
    pub sharpe_from_length: Option<SharpeUpdate>,
    pub sharpe_from_depth: Option<SharpeUpdate>,
    pub verdict: String,
}

impl TestReport {
    pub fn any_flag(&self) -> bool {
        self.length_flagged || self.depth_flagged
    }
}

/// The 90% (by default) conditional corridor for the length of a drawdown
/// of observed depth `depth_star`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CorridorResult {
    pub depth_star: f64,
    /// Years; P(ℓ ≤ lower | d*) equals the requested lower tail.
    pub lower: f64,
    /// Years; P(ℓ ≥ upper | d*) equals the requested upper tail.
    pub upper: f64,
    pub coverage: f64,
}

/// A fixed-exponent power-law fit `c·SR^exponent` of a quantile curve.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PowerLawFit {
    pub coefficient: f64,
    pub exponent: f64,
    pub max_rel_residual: f64,
}

fn check_tail_prob(tail_prob: f64) -> Result<()> {
    if !(tail_prob > 0.0 && tail_prob < 1.0) {
        return Err(Error::Domain(format!(
            "tail probability must lie in (0, 1), got {tail_prob}"
        )));
    }
    Ok(())
}

fn require_positive_sharpe(spec: &ProcessSpec) -> Result<()> {
    if spec.sharpe() <= 0.0 {
        return Err(Error::NonPositiveSharpe(spec.sharpe()));
    }
    Ok(())
}

fn length_root_config(horizon: f64) -> RootConfig {
    RootConfig {
        x_tolerance: 1e-10 * horizon,
        f_tolerance: 1e-9,
        max_iterations: 200,
    }
}

/// The length ℓ_p with P(ℓ ≥ ℓ_p) = tail_prob. Requires a positive
/// Sharpe ratio: the workflow tests profitable strategies, even though
/// the quantile exists mathematically for any drift.
pub fn length_quantile(spec: &ProcessSpec, tail_prob: f64) -> Result<f64> {
    require_positive_sharpe(spec)?;
    length_quantile_any_drift(spec, tail_prob)
}

pub(crate) fn length_quantile_any_drift(spec: &ProcessSpec, tail_prob: f64) -> Result<f64> {
    check_tail_prob(tail_prob)?;
    // The tail falls monotonically from 1 at 0 to 0 at T, so [0, T]
    // always brackets.
    brent(
        |x| Ok(length_tail_prob(spec, x)? - tail_prob),
        0.0,
        spec.horizon(),
        length_root_config(spec.horizon()),
    )
}

/// The depth d_p with P(d ≥ d_p) = tail_prob. Same positive-Sharpe
/// gate as [`length_quantile`].
pub fn depth_quantile(spec: &ProcessSpec, tail_prob: f64) -> Result<f64> {
    require_positive_sharpe(spec)?;
    depth_quantile_any_drift(spec, tail_prob)
}

pub(crate) fn depth_quantile_any_drift(spec: &ProcessSpec, tail_prob: f64) -> Result<f64> {
    check_tail_prob(tail_prob)?;
    let mut lo = 0.0;
    let mut hi = spec.horizon().sqrt();
    let limit = 1e9 * hi;
    while depth_tail_prob(spec, hi)? >= tail_prob {
        lo = hi;
        hi *= 2.0;
        if hi > limit {
            return Err(Error::Domain(format!(
                "depth quantile bracket grew past {limit:e} without straddling the tail"
            )));
        }
    }
    let cfg = RootConfig {
        x_tolerance: 1e-10 * spec.horizon().sqrt().max(1.0),
        f_tolerance: 1e-9,
        max_iterations: 200,
    };
    brent(|d| Ok(depth_tail_prob(spec, d)? - tail_prob), lo, hi, cfg)
}

fn sharpe_root_config() -> RootConfig {
    RootConfig {
        x_tolerance: 1e-10,
        f_tolerance: 1e-9,
        max_iterations: 200,
    }
}

/// The Sharpe ratio under which the observed depth sits exactly at the
/// `tail_prob` point. Monotone in SR, so a bracketing search on
/// [0, [`SHARPE_SEARCH_CAP`]] settles it; observations extreme even under
/// zero drift return the floor.
pub fn update_sharpe_from_depth(
    depth_obs: f64,
    horizon: f64,
    tail_prob: f64,
) -> Result<SharpeUpdate> {
    if !depth_obs.is_finite() || depth_obs <= 0.0 {
        return Err(Error::Domain(format!(
            "observed depth must be strictly positive, got {depth_obs}"
        )));
    }
    check_tail_prob(tail_prob)?;
    let tail_at = |sr: f64| depth_tail_prob(&ProcessSpec::new(sr, horizon)?, depth_obs);
    solve_sharpe(tail_at, tail_prob)
}

/// Length analogue of [`update_sharpe_from_depth`].
pub fn update_sharpe_from_length(
    length_obs: f64,
    horizon: f64,
    tail_prob: f64,
) -> Result<SharpeUpdate> {
    if !horizon.is_finite() || horizon <= 0.0 {
        return Err(Error::Domain(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    if !length_obs.is_finite() || length_obs <= 0.0 || length_obs >= horizon {
        return Err(Error::Domain(format!(
            "observed length must lie strictly inside (0, {horizon}), got {length_obs}"
        )));
    }
    check_tail_prob(tail_prob)?;
    let tail_at = |sr: f64| length_tail_prob(&ProcessSpec::new(sr, horizon)?, length_obs);
    solve_sharpe(tail_at, tail_prob)
}

fn solve_sharpe<F>(tail_at: F, tail_prob: f64) -> Result<SharpeUpdate>
where
    F: Fn(f64) -> Result<f64>,
{
    let at_zero = tail_at(0.0)?;
    if at_zero < tail_prob {
        // Even a driftless strategy would see something this bad less
        // often than tail_prob: the root lies below zero drift.
        return Ok(SharpeUpdate::ZeroDriftFloor);
    }
    let at_cap = tail_at(SHARPE_SEARCH_CAP)?;
    if at_cap > tail_prob {
        return Err(Error::SharpeAboveCap {
            cap: SHARPE_SEARCH_CAP,
        });
    }
    let root = brent(
        |sr| Ok(tail_at(sr)? - tail_prob),
        0.0,
        SHARPE_SEARCH_CAP,
        sharpe_root_config(),
    )?;
    Ok(SharpeUpdate::Revised(root))
}

/// Quantiles of the conditional law of ℓ given an observed depth d*,
/// `g(d*, ℓ)/ψ(d*)`: the interval [lower, upper] holds the length with
/// probability `1 − lower_tail − upper_tail`.
pub fn conditional_corridor(
    spec: &ProcessSpec,
    depth_star: f64,
    lower_tail: f64,
    upper_tail: f64,
) -> Result<CorridorResult> {
    if !depth_star.is_finite() || depth_star <= 0.0 {
        return Err(Error::Domain(format!(
            "depth_star must be strictly positive, got {depth_star}"
        )));
    }
    for (name, tail) in [("lower_tail", lower_tail), ("upper_tail", upper_tail)] {
        if !(tail > 0.0 && tail < 0.5) {
            return Err(Error::Domain(format!(
                "{name} must lie in (0, 0.5), got {tail}"
            )));
        }
    }
    let normalization = psi_depth(spec, depth_star)?;
    if normalization <= 0.0 || !normalization.is_finite() {
        return Err(Error::Domain(format!(
            "conditional law is numerically degenerate at depth {depth_star} (psi = {normalization:e})"
        )));
    }
    let cfg = length_root_config(spec.horizon());
    let conditional_cdf =
        |x: f64| Ok(joint_partial_length_integral(spec, depth_star, x)? / normalization);
    let lower = brent(
        |x| Ok(conditional_cdf(x)? - lower_tail),
        0.0,
        spec.horizon(),
        cfg,
    )?;
    let upper = brent(
        |x| Ok(conditional_cdf(x)? - (1.0 - upper_tail)),
        0.0,
        spec.horizon(),
        cfg,
    )?;
    Ok(CorridorResult {
        depth_star,
        lower,
        upper,
        coverage: 1.0 - lower_tail - upper_tail,
    })
}

/// Test an observed drawdown against an assumed Sharpe ratio: tail
/// p-values for length and depth, flags at the chosen significance, and
/// a revised Sharpe estimate for each flagged dimension.
pub fn run_test(
    spec: &ProcessSpec,
    observation: &DrawdownObservation,
    significance: f64,
) -> Result<TestReport> {
    if !(significance > 0.0 && significance < 0.5) {
        return Err(Error::Domain(format!(
            "significance must lie in (0, 0.5), got {significance}"
        )));
    }
    if observation.length() > spec.horizon() {
        return Err(Error::Domain(format!(
            "observed length {} exceeds the horizon {}",
            observation.length(),
            spec.horizon()
        )));
    }
    let length_p_value = length_tail_prob(spec, observation.length())?;
    let depth_p_value = depth_tail_prob(spec, observation.depth())?;
    let length_flagged = length_p_value < significance;
    let depth_flagged = depth_p_value < significance;

    let sharpe_from_length = if length_flagged {
        Some(if observation.length() < spec.horizon() {
            update_sharpe_from_length(observation.length(), spec.horizon(), significance)?
        } else {
            // A drawdown spanning the whole window is beyond any
            // nonnegative drift.
            SharpeUpdate::ZeroDriftFloor
        })
    } else {
        None
    };
    let sharpe_from_depth = if depth_flagged {
        Some(update_sharpe_from_depth(
            observation.depth(),
            spec.horizon(),
            significance,
        )?)
    } else {
        None
    };

    let verdict = verdict_text(spec, significance, length_flagged, depth_flagged);
    Ok(TestReport {
        spec: *spec,
        observation: *observation,
        significance,
        length_p_value,
        depth_p_value,
        length_flagged,
        depth_flagged,
        sharpe_from_length,
        sharpe_from_depth,
        verdict,
    })
}

fn verdict_text(
    spec: &ProcessSpec,
    significance: f64,
    length_flagged: bool,
    depth_flagged: bool,
) -> String {
    let pct = 100.0 * significance;
    if !length_flagged && !depth_flagged {
        return format!(
            "Scenario 1: both the Brownian model and the assumed Sharpe ratio {:.4} remain \
             acceptable — the observed drawdown sits inside its {pct:.1}% range and calls for \
             no revision.",
            spec.sharpe()
        );
    }
    let what = match (length_flagged, depth_flagged) {
        (true, true) => "length and depth",
        (true, false) => "length",
        (false, true) => "depth",
        (false, false) => unreachable!(),
    };
    format!(
        "Flagged on {what} at the {pct:.1}% level. Three readings are possible. \
         Scenario 1: the Brownian model and the Sharpe ratio {:.4} are both fine and this is \
         simply a {pct:.1}% unlucky streak. \
         Scenario 2: the model is fine but the Sharpe ratio was overestimated; the revised \
         values in this report restore consistency with the observation. \
         Scenario 3: the Brownian model itself understates drawdowns (heavier-than-Gaussian \
         returns, shifting volatility, or positively autocorrelated returns). \
         This test cannot distinguish Scenario 1 from Scenario 2, so treat the flag as a \
         caution signal rather than proof of a broken strategy.",
        spec.sharpe()
    )
}

/// Least-squares fit of `log q = log c + exponent·log SR` with the
/// exponent pinned to −2 for lengths and −1 for depths. Returns the
/// coefficient and the worst relative residual over the grid.
pub fn fit_quantile_power_law(
    horizon: f64,
    tail_prob: f64,
    sr_grid: &[f64],
    mode: Dimension,
) -> Result<PowerLawFit> {
    if sr_grid.len() < 4 {
        return Err(Error::Domain(format!(
            "power-law fit needs at least 4 grid points, got {}",
            sr_grid.len()
        )));
    }
    let (min, max) = sr_grid
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let spread_ok = min > 0.0 && max.is_finite() && min != max;
    if !spread_ok {
        return Err(Error::Domain(
            "power-law fit needs a non-degenerate grid of positive Sharpe ratios".to_string(),
        ));
    }
    let exponent = match mode {
        Dimension::Length => -2.0,
        Dimension::Depth => -1.0,
    };
    let mut quantiles = Vec::with_capacity(sr_grid.len());
    for &sr in sr_grid {
        let spec = ProcessSpec::new(sr, horizon)?;
        let q = match mode {
            Dimension::Length => length_quantile(&spec, tail_prob)?,
            Dimension::Depth => depth_quantile(&spec, tail_prob)?,
        };
        quantiles.push(q);
    }
    let log_c = sr_grid
        .iter()
        .zip(&quantiles)
        .map(|(&sr, &q)| q.ln() - exponent * sr.ln())
        .sum::<f64>()
        / sr_grid.len() as f64;
    let coefficient = log_c.exp();
    let max_rel_residual = sr_grid
        .iter()
        .zip(&quantiles)
        .map(|(&sr, &q)| (coefficient * sr.powf(exponent) / q - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(PowerLawFit {
        coefficient,
        exponent,
        max_rel_residual,
    })
}
