//! Daily PnL ingestion: CSV parsing, risk normalization to σ = 1, and
//! extraction of the current last drawdown in the units the densities
//! expect (years and annualized σ).
//!
//! Time is counted in *rows* — calendar gaps between trading days carry
//! no diffusion — at a default grid of 257 trading days per year.

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::inference::{DrawdownObservation, ObservationSource};

/// Default trading calendar density.
pub const DEFAULT_TRADING_DAYS_PER_YEAR: f64 = 257.0;

/// Fewer rows than this leave the volatility estimate too noisy for the
/// test to mean anything.
pub const MIN_NORMALIZATION_ROWS: usize = 30;

/// A dated cumulative PnL series.
#[derive(Clone, Debug, Serialize)]
pub struct PnlSeries {
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
    /// Trading days per year.
    frequency: f64,
    /// Realized daily standard deviation of PnL differences, in the
    /// original PnL units; set by normalization.
    vol_estimate: Option<f64>,
    normalized: bool,
}

/// A drawdown observation pulled out of a series, with the horizon the
/// series spans.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExtractedDrawdown {
    pub observation: DrawdownObservation,
    /// Years covered by the series: (rows − 1) / frequency.
    pub horizon: f64,
}

impl PnlSeries {
    /// Parse a `date,pnl` CSV: ISO-8601 dates, one row per trading day,
    /// strictly increasing. Assumes the default 257-day calendar.
    pub fn parse_csv(bytes: &[u8]) -> Result<Self> {
        Self::parse_csv_with_frequency(bytes, DEFAULT_TRADING_DAYS_PER_YEAR)
    }

    pub fn parse_csv_with_frequency(bytes: &[u8], frequency: f64) -> Result<Self> {
        if !frequency.is_finite() || frequency < 1.0 {
            return Err(Error::Domain(format!(
                "frequency must be at least 1 trading day per year, got {frequency}"
            )));
        }
        let text = std::str::from_utf8(bytes).map_err(|e| Error::Csv {
            line: 0,
            message: format!("not valid UTF-8: {e}"),
        })?;
        let text = text.strip_prefix('\u{feff}').unwrap_or(text);

        let mut dates = Vec::new();
        let mut values = Vec::new();
        let mut lines = text.lines().enumerate();

        match lines.next() {
            Some((_, header)) if header.trim() == "date,pnl" => {}
            Some((_, header)) => {
                return Err(Error::Csv {
                    line: 1,
                    message: format!("expected header `date,pnl`, got `{}`", header.trim()),
                })
            }
            None => return Err(Error::EmptySeries),
        }

        for (idx, raw) in lines {
            let line_no = idx + 1;
            let row = raw.trim();
            if row.is_empty() {
                continue;
            }
            let (date_str, pnl_str) = row.split_once(',').ok_or_else(|| Error::Csv {
                line: line_no,
                message: format!("expected `date,pnl`, got `{row}`"),
            })?;
            if pnl_str.contains(',') {
                return Err(Error::Csv {
                    line: line_no,
                    message: "too many fields; expected exactly two".to_string(),
                });
            }
            let date =
                NaiveDate::parse_from_str(date_str.trim(), "%Y-%m-%d").map_err(|e| Error::Csv {
                    line: line_no,
                    message: format!("bad ISO-8601 date `{}`: {e}", date_str.trim()),
                })?;
            let pnl: f64 = pnl_str.trim().parse().map_err(|e| Error::Csv {
                line: line_no,
                message: format!("bad PnL value `{}`: {e}", pnl_str.trim()),
            })?;
            if !pnl.is_finite() {
                return Err(Error::Csv {
                    line: line_no,
                    message: format!("PnL value must be finite, got {pnl}"),
                });
            }
            if let Some(&prev) = dates.last() {
                if date <= prev {
                    return Err(Error::Csv {
                        line: line_no,
                        message: format!(
                            "dates must be strictly increasing: {date} follows {prev}"
                        ),
                    });
                }
            }
            dates.push(date);
            values.push(pnl);
        }

        if dates.is_empty() {
            return Err(Error::EmptySeries);
        }
        if dates.len() < 2 {
            return Err(Error::Csv {
                line: 2,
                message: "a series needs at least 2 rows".to_string(),
            });
        }
        Ok(Self {
            dates,
            values,
            frequency,
            vol_estimate: None,
            normalized: false,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn vol_estimate(&self) -> Option<f64> {
        self.vol_estimate
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Rescale so daily PnL differences have unit sample standard
    /// deviation, rebuilding the cumulative series from zero. Full-history
    /// estimator with the n−1 denominator.
    pub fn normalize(&self) -> Result<Self> {
        self.normalize_with(MIN_NORMALIZATION_ROWS, None)
    }

    /// Normalization with an explicit row minimum and an optional window:
    /// when `vol_window` is set, only the most recent `w` differences feed
    /// the volatility estimate (the rescaling still applies everywhere).
    pub fn normalize_with(&self, min_rows: usize, vol_window: Option<usize>) -> Result<Self> {
        if self.len() < min_rows.max(2) {
            return Err(Error::InsufficientHistory {
                rows: self.len(),
                min: min_rows,
            });
        }
        let diffs: Vec<f64> = self.values.windows(2).map(|w| w[1] - w[0]).collect();
        let window = match vol_window {
            Some(w) if w < 2 => {
                return Err(Error::Domain(format!(
                    "volatility window must cover at least 2 differences, got {w}"
                )))
            }
            Some(w) => &diffs[diffs.len().saturating_sub(w)..],
            None => &diffs[..],
        };
        let n = window.len() as f64;
        let mean = window.iter().sum::<f64>() / n;
        let var = window.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1.0);
        let std = var.sqrt();
        let scale_floor = window.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
        if std <= scale_floor * 1e-12 || std == 0.0 {
            return Err(Error::ZeroVolatility);
        }
        let mut values = Vec::with_capacity(self.len());
        let mut acc = 0.0;
        values.push(0.0);
        for d in &diffs {
            acc += d / std;
            values.push(acc);
        }
        Ok(Self {
            dates: self.dates.clone(),
            values,
            frequency: self.frequency,
            vol_estimate: Some(std),
            normalized: true,
        })
    }

    /// Running maximum and its *last* row in one pass, then
    /// ℓ = rows-since-peak / frequency and d = (max − final)/√frequency,
    /// the annualized σ-units the densities work in.
    pub fn extract_drawdown(&self) -> Result<ExtractedDrawdown> {
        if !self.normalized {
            return Err(Error::NotNormalized);
        }
        let mut max = f64::NEG_INFINITY;
        let mut last_max_row = 0usize;
        for (row, &v) in self.values.iter().enumerate() {
            // Ties break toward the later row: the last visit of the max.
            if v >= max {
                max = v;
                last_max_row = row;
            }
        }
        let last_row = self.len() - 1;
        let length = (last_row - last_max_row) as f64 / self.frequency;
        let depth = (max - self.values[last_row]) / self.frequency.sqrt();
        let observation = DrawdownObservation::new(length, depth, ObservationSource::Extracted)?;
        Ok(ExtractedDrawdown {
            observation,
            horizon: last_row as f64 / self.frequency,
        })
    }
}
