//! Monte Carlo validation of the analytic layer: million-path ensembles
//! against densities, tails, and the conditional corridor.
//!
//! Tolerances combine binomial noise (4 standard errors) with a
//! discretization allowance: daily sampling under-reads the continuous
//! maximum by ≈ 0.5826·√Δt in value, which shifts depth statistics left
//! and thins both tails slightly. The bias is absorbed here, not
//! corrected.

use std::sync::OnceLock;

use drawdown_core::{
    conditional_corridor, conditional_slice, depth_tail_prob, empirical_tail, length_tail_prob,
    psi_depth, simulate, Dimension, EmpiricalSample, ProcessSpec, SimConfig,
};

const N_PATHS: usize = 1_000_000;
const STEPS_PER_YEAR: u32 = 257;
const HORIZON: f64 = 10.0;

fn sr1_sample() -> &'static EmpiricalSample {
    static SAMPLE: OnceLock<EmpiricalSample> = OnceLock::new();
    SAMPLE.get_or_init(|| {
        let spec = ProcessSpec::new(1.0, HORIZON).unwrap();
        simulate(&SimConfig::new(spec, N_PATHS, 0x5EED_0001)).unwrap()
    })
}

fn sr16_sample() -> &'static EmpiricalSample {
    static SAMPLE: OnceLock<EmpiricalSample> = OnceLock::new();
    SAMPLE.get_or_init(|| {
        let spec = ProcessSpec::new(1.6, HORIZON).unwrap();
        simulate(&SimConfig::new(spec, N_PATHS, 0x5EED_0002)).unwrap()
    })
}

/// Maximum-underread offset at this grid, the Broadie–Glasserman constant.
fn max_shift() -> f64 {
    0.5826 / f64::from(STEPS_PER_YEAR).sqrt()
}

fn nearest_rank_quantile(sorted: &[f64], q: f64) -> f64 {
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

#[test]
fn length_density_matches_histogram_at_two_years() {
    // ρ(2 | SR=1, T=10) against a 0.05y histogram bin, edges snapped to
    // half-lattice points so bin membership is unambiguous.
    let sample = sr1_sample();
    let spec = ProcessSpec::new(1.0, HORIZON).unwrap();
    let dt = 1.0 / f64::from(STEPS_PER_YEAR);
    let center = 2.0;
    let half_width = 0.025;
    let lo = ((center - half_width) / dt).round() - 0.5;
    let hi = ((center + half_width) / dt).round() + 0.5;
    let (lo, hi) = (lo * dt, hi * dt);

    let expected = length_tail_prob(&spec, lo).unwrap() - length_tail_prob(&spec, hi).unwrap();
    let count = sample
        .pairs()
        .iter()
        .filter(|(l, _)| (lo..hi).contains(l))
        .count();
    let freq = count as f64 / sample.len() as f64;
    let se = (expected * (1.0 - expected) / sample.len() as f64).sqrt();

    // Lattice distortion of the interior density: shift-scale times the
    // density change across the bin.
    let rho_lo = drawdown_core::rho_length(&spec, lo).unwrap();
    let rho_hi = drawdown_core::rho_length(&spec, hi).unwrap();
    let allowance = max_shift() * (rho_lo - rho_hi).abs() + 0.01 * expected;
    assert!(
        (freq - expected).abs() <= 4.0 * se + allowance,
        "length bin at 2y: freq {freq:.6} vs analytic {expected:.6} (4se {:.2e}, allowance {allowance:.2e})",
        4.0 * se
    );
}

#[test]
fn depth_density_matches_histogram_at_one_and_a_half() {
    // ψ(1.5 | SR=1, T=10) against the [1.45, 1.55) histogram bin.
    let sample = sr1_sample();
    let spec = ProcessSpec::new(1.0, HORIZON).unwrap();
    let (lo, hi) = (1.45, 1.55);
    let expected = depth_tail_prob(&spec, lo).unwrap() - depth_tail_prob(&spec, hi).unwrap();
    let count = sample
        .pairs()
        .iter()
        .filter(|(_, d)| (lo..hi).contains(d))
        .count();
    let freq = count as f64 / sample.len() as f64;
    let se = (expected * (1.0 - expected) / sample.len() as f64).sqrt();
    // The sampled maximum sits ≈ max_shift lower, sliding mass across the
    // bin edges by shift × density difference.
    let psi_lo = psi_depth(&spec, lo).unwrap();
    let psi_hi = psi_depth(&spec, hi).unwrap();
    let allowance = max_shift() * (psi_lo - psi_hi).abs() + 0.01 * expected;
    assert!(
        (freq - expected).abs() <= 4.0 * se + allowance,
        "depth bin at 1.5σ: freq {freq:.6} vs analytic {expected:.6} (4se {:.2e}, allowance {allowance:.2e})",
        4.0 * se
    );
}

#[test]
fn length_tail_concordance_on_grid() {
    // Analytic P(ℓ ≥ x) against empirical frequencies at SR=1, T=10,
    // within 4 binomial standard errors plus 0.005 absolute.
    let sample = sr1_sample();
    let spec = ProcessSpec::new(1.0, HORIZON).unwrap();
    for &x in &[0.5, 1.0, 2.0, 2.14, 4.0] {
        let analytic = length_tail_prob(&spec, x).unwrap();
        let (freq, se) = empirical_tail(sample, Dimension::Length, x).unwrap();
        assert!(
            (freq - analytic).abs() <= 4.0 * se + 0.005,
            "length tail at {x}: empirical {freq:.5} vs analytic {analytic:.5} (se {se:.2e})"
        );
    }
}

#[test]
fn depth_tail_concordance_on_grid() {
    // The sampled maximum under-reads by ≈ max_shift, so the empirical
    // depth tail sits below the analytic one by ≈ max_shift·ψ(d) to first
    // order — steep where ψ is large. That term joins the allowance; at
    // the 5% threshold it is already inside the flat 0.005.
    let sample = sr1_sample();
    let spec = ProcessSpec::new(1.0, HORIZON).unwrap();
    for &d in &[0.5, 1.0, 1.4974573, 2.5] {
        let analytic = depth_tail_prob(&spec, d).unwrap();
        let (freq, se) = empirical_tail(sample, Dimension::Depth, d).unwrap();
        let bias = max_shift() * psi_depth(&spec, d).unwrap();
        assert!(
            (freq - analytic).abs() <= 4.0 * se + 0.005 + bias,
            "depth tail at {d}: empirical {freq:.5} vs analytic {analytic:.5} \
             (se {se:.2e}, bias term {bias:.2e})"
        );
        // And the signed direction is the documented one: empirical low.
        assert!(
            freq <= analytic + 4.0 * se + 0.005,
            "depth tail biased the wrong way at {d}"
        );
    }
}

#[test]
fn corridor_matches_conditional_slice_quantiles() {
    // Conditional corridor at (SR=1, T=10, d* = 1.0) against the 5%/95%
    // quantiles of the depth-sliced ensemble, 10% relative.
    let sample = sr1_sample();
    let spec = ProcessSpec::new(1.0, HORIZON).unwrap();
    let corridor = conditional_corridor(&spec, 1.0, 0.05, 0.05).unwrap();
    let mut lengths = conditional_slice(sample, 1.0, 0.05).unwrap();
    assert!(lengths.len() > 5_000, "slice too thin: {}", lengths.len());
    lengths.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let emp_lower = nearest_rank_quantile(&lengths, 0.05);
    let emp_upper = nearest_rank_quantile(&lengths, 0.95);
    assert!(
        ((emp_lower - corridor.lower) / corridor.lower).abs() < 0.10,
        "lower: empirical {emp_lower:.4} vs analytic {:.4}",
        corridor.lower
    );
    assert!(
        ((emp_upper - corridor.upper) / corridor.upper).abs() < 0.10,
        "upper: empirical {emp_upper:.4} vs analytic {:.4}",
        corridor.upper
    );
}

#[test]
fn two_month_floor_for_deep_drawdowns_at_sr16() {
    // A drawdown as deep as the 5% point at SR=1.6 is very unlikely to be
    // short: the empirical 5th percentile of the sliced lengths sits near
    // the two-month mark, within 25% relative.
    let sample = sr16_sample();
    let mut lengths = conditional_slice(sample, 0.95, 0.05).unwrap();
    assert!(lengths.len() > 3_000, "slice too thin: {}", lengths.len());
    lengths.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let emp_lower = nearest_rank_quantile(&lengths, 0.05);
    let two_months = 0.167;
    assert!(
        ((emp_lower - two_months) / two_months).abs() < 0.25,
        "5th percentile of sliced lengths {emp_lower:.4} vs two-month figure"
    );
}
