//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error(
        "quadrature did not converge within {max_subdivisions} subdivisions \
         (estimated error {error:.3e}, target {target:.3e})"
    )]
    QuadratureDidNotConverge {
        max_subdivisions: usize,
        error: f64,
        target: f64,
    },

    /// The root finder was handed an interval without a sign change.
    #[error("root not bracketed on [{lo:.6e}, {hi:.6e}]: f(lo)={f_lo:.6e}, f(hi)={f_hi:.6e}")]
    RootNotBracketed {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// The root finder ran out of iterations.
    #[error("root finder did not converge within {max_iterations} iterations")]
    RootDidNotConverge { max_iterations: usize },

    /// Quantile inversion presumes a profitable strategy.
    #[error(
        "sharpe ratio must be positive for quantile inversion (got {0}); \
         the test presumes a profitable strategy"
    )]
    NonPositiveSharpe(f64),

    /// The observation is so mild that every Sharpe ratio up to the search
    /// cap remains consistent with it.
    #[error("observation is consistent with every Sharpe ratio up to the search cap {cap}")]
    SharpeAboveCap { cap: f64 },

    /// CSV ingestion failure with the offending line (1-based, header = 1).
    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },

    /// Input held a header but no data rows.
    #[error("empty series: no data rows")]
    EmptySeries,

    /// Too little history to estimate volatility.
    #[error("insufficient history for volatility normalization: {rows} rows < {min} required")]
    InsufficientHistory { rows: usize, min: usize },

    /// The PnL differences carry no variation at all.
    #[error("zero volatility: PnL differences have no variation to normalize by")]
    ZeroVolatility,

    /// Drawdown extraction requires a risk-normalized series.
    #[error("series must be normalized (sigma = 1) before drawdown extraction")]
    NotNormalized,

    /// A conditional slice selected no paths.
    #[error("insufficient sample: {found} paths fall inside the requested depth band")]
    InsufficientSample { found: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
