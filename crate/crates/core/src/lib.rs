//! Exact distributions of the *last* drawdown of an upward-drifting
//! Brownian PnL over a finite horizon, and the hypothesis test they
//! support: is an observed drawdown — its length in years, its depth in
//! annualized σ-units — consistent with an assumed Sharpe ratio?
//!
//! The layers, bottom up:
//!
//! - [`numkernel`]: stable normal pdf/cdf, the scaled Mills tail, and
//!   signed log-domain combination.
//! - [`quad`] / [`roots`]: adaptive Gauss–Kronrod integration and a
//!   bracketing root finder.
//! - [`densities`]: the length density ρ(ℓ), the depth density ψ(d), the
//!   joint law with the maximum integrated out, and their tails.
//! - [`inference`]: 5% quantiles, Sharpe updates from an observed
//!   drawdown, the conditional length corridor, power-law fits, and the
//!   three-scenario verdict.
//! - [`montecarlo`]: a reproducible path-simulation oracle for validating
//!   all of the above.
//! - [`pnl`]: CSV ingestion, σ = 1 normalization, drawdown extraction.

pub mod densities;
pub mod error;
pub mod inference;
pub mod montecarlo;
pub mod numkernel;
pub mod pnl;
pub mod quad;
pub mod roots;

pub use densities::{
    depth_tail_prob, joint_dl_density, length_tail_prob, psi_depth, rho_length, JointPoint,
    ProcessSpec,
};
pub use error::{Error, Result};
pub use inference::{
    conditional_corridor, depth_quantile, fit_quantile_power_law, length_quantile, run_test,
    update_sharpe_from_depth, update_sharpe_from_length, CorridorResult, DrawdownObservation,
    ObservationSource, PowerLawFit, SharpeUpdate, TestReport, SHARPE_SEARCH_CAP,
};
pub use montecarlo::{
    conditional_slice, empirical_tail, ks_distance, simulate, EmpiricalSample, SimConfig,
    DEFAULT_STEPS_PER_YEAR,
};
pub use pnl::{ExtractedDrawdown, PnlSeries, DEFAULT_TRADING_DAYS_PER_YEAR};

use serde::Serialize;

/// Which marginal of the drawdown law an operation addresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Length,
    Depth,
}
