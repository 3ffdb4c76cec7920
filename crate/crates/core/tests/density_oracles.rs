//! Independent-route verification of the density layer: the closed forms
//! are re-derived here in their naive textbook shapes (valid at benign
//! drifts) and checked against the production code, and both are checked
//! against brute-force quadrature of the raw three-variable density.

use drawdown_core::{depth_tail_prob, joint_dl_density, psi_depth, rho_length, ProcessSpec};

const PI: f64 = std::f64::consts::PI;
const SQRT_2PI: f64 = 2.5066282746310005;

/// Composite Simpson on a fixed grid; `panels` must be even.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    assert!(panels.is_multiple_of(2));
    let h = (b - a) / panels as f64;
    let mut sum = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + h * i as f64);
    }
    sum * h / 3.0
}

/// Simpson over θ ∈ [lo, hi] of an integrand given (ℓ, T−ℓ) as the exact
/// pair (T·sin²θ, T·cos²θ), with the Jacobian T·sin2θ applied.
fn simpson_theta<F: Fn(f64, f64) -> f64>(
    f: &F,
    horizon: f64,
    lo: f64,
    hi: f64,
    panels: usize,
) -> f64 {
    simpson(
        |theta| {
            // The integrand limits at both ends are finite; nudge the
            // exact endpoints inward so 0·∞ never forms.
            let theta = theta.clamp(1e-12, std::f64::consts::FRAC_PI_2 - 1e-12);
            let (s, c) = theta.sin_cos();
            f(horizon * s * s, horizon * c * c) * horizon * 2.0 * s * c
        },
        lo,
        hi,
        panels,
    )
}

/// Same, but on a logarithmic θ grid — resolves the exp(−d²/(2Tθ²))
/// turn-on flank near θ = 0 that defeats a uniform grid.
fn simpson_log_theta<F: Fn(f64, f64) -> f64>(
    f: &F,
    horizon: f64,
    lo: f64,
    hi: f64,
    panels: usize,
) -> f64 {
    simpson(
        |u| {
            let theta = u.exp();
            let (s, c) = theta.sin_cos();
            f(horizon * s * s, horizon * c * c) * horizon * 2.0 * s * c * theta
        },
        lo.ln(),
        hi.ln(),
        panels,
    )
}

fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Textbook length density, assembled exactly as printed: fine for the
/// moderate drifts used here, no stabilization anywhere.
fn rho_textbook(mu: f64, ell: f64, c: f64) -> f64 {
    2.0 * (phi(mu * c.sqrt()) / c.sqrt() + mu * norm_cdf(mu * c.sqrt()))
        * (phi(mu * ell.sqrt()) / ell.sqrt() - mu * norm_cdf(-mu * ell.sqrt()))
}

/// Textbook single-integral integrand for ψ: the depth-and-length joint
/// with the maximum already integrated out, naive exponent layout.
fn joint_textbook(mu: f64, horizon: f64, d: f64, ell: f64, c: f64) -> f64 {
    let bracket =
        c + SQRT_2PI * mu * c.powf(1.5) * (mu * mu * c / 2.0).exp() * norm_cdf(mu * c.sqrt());
    d / PI * (-mu * d - mu * mu * horizon / 2.0 - d * d / (2.0 * ell)).exp() / (ell * c).powf(1.5)
        * bracket
}

/// The three-variable joint density of (depth, max, length) before any
/// marginalization — the raw object everything integrates.
fn unmarginalized_joint(mu: f64, horizon: f64, d: f64, b: f64, ell: f64) -> f64 {
    let c = horizon - ell;
    b * d / (PI * (ell * c).powf(1.5))
        * (mu * (b - d) - mu * mu * horizon / 2.0 - d * d / (2.0 * ell) - b * b / (2.0 * c)).exp()
}

#[test]
fn joint_density_matches_bruteforce_max_integral() {
    // g(d, ℓ) must equal ∫₀^∞ F̃(d, b, ℓ) db done numerically.
    for &(sharpe, horizon, d, ell) in &[
        (1.0f64, 10.0f64, 0.5f64, 0.5f64),
        (1.0, 10.0, 1.5, 4.0),
        (0.5, 10.0, 2.0, 8.0),
        (2.0, 10.0, 0.3, 1.0),
        (0.0, 10.0, 1.0, 5.0),
        (-0.7, 10.0, 1.0, 3.0),
        (1.0, 1.0, 0.4, 0.6),
    ] {
        let spec = ProcessSpec::new(sharpe, horizon).unwrap();
        let c = horizon - ell;
        let b_max = (sharpe * c).max(0.0) + 14.0 * c.sqrt();
        let oracle = simpson(
            |b| unmarginalized_joint(sharpe, horizon, d, b, ell),
            0.0,
            b_max,
            40_000,
        );
        let got = joint_dl_density(&spec, d, ell).unwrap();
        assert!(
            ((got - oracle) / oracle).abs() < 1e-9,
            "joint({sharpe}, {horizon}, d={d}, ℓ={ell}): {got:e} vs oracle {oracle:e}"
        );
        // And the stabilized assembly agrees with the naive layout.
        let naive = joint_textbook(sharpe, horizon, d, ell, c);
        assert!(((got - naive) / naive).abs() < 1e-11);
    }
}

#[test]
fn inner_depth_integral_identity_holds() {
    // The claimed closed form of ∫_d^∞ u·exp(−μu − u²/(2ℓ)) du:
    //   exp(μ²ℓ/2)·[ℓ·exp(−(d+μℓ)²/(2ℓ)) − μℓ·√(2πℓ)·Φ(−(d+μℓ)/√ℓ)]
    // It is derived, not quoted, so it must survive a numerical check
    // before anything relies on it.
    for &(mu, d, ell) in &[
        (1.0f64, 0.7f64, 2.0f64),
        (0.0, 1.0, 3.0),
        (-0.8, 1.2, 3.0),
        (2.5, 0.1, 0.5),
        (0.3, 4.0, 9.0),
        (-2.0, 0.5, 1.0),
    ] {
        let z = (d + mu * ell) / ell.sqrt();
        let closed = (mu * mu * ell / 2.0).exp()
            * (ell * (-(d + mu * ell) * (d + mu * ell) / (2.0 * ell)).exp()
                - mu * ell * (2.0 * PI * ell).sqrt() * norm_cdf(-z));
        let u_max = d.max(-mu * ell) + 14.0 * ell.sqrt();
        let numeric = simpson(
            |u| u * (-mu * u - u * u / (2.0 * ell)).exp(),
            d,
            u_max,
            40_000,
        );
        assert!(
            ((closed - numeric) / numeric).abs() < 1e-10,
            "identity broke at mu={mu}, d={d}, ℓ={ell}: {closed:e} vs {numeric:e}"
        );
    }
}

#[test]
fn depth_tail_matches_nested_two_dimensional_quadrature() {
    // The production path integrates a closed-form inner integral once
    // over ℓ; the oracle integrates the textbook joint numerically in
    // both directions.
    for &(sharpe, horizon, d0) in &[(1.0f64, 10.0f64, 1.5f64), (2.0, 10.0, 0.5), (0.5, 1.0, 0.3)] {
        let spec = ProcessSpec::new(sharpe, horizon).unwrap();
        let f = |ell: f64, c: f64| {
            let u_max = d0 + (-sharpe * ell).max(0.0) + 12.0 * ell.sqrt() + 0.1;
            simpson(
                |u| joint_textbook(sharpe, horizon, u, ell, c),
                d0,
                u_max,
                1000,
            )
        };
        let split = 0.3;
        let theta_on = (d0 / (23.0 * horizon.sqrt())).min(0.05);
        let oracle = simpson_log_theta(&f, horizon, theta_on, split, 4000)
            + simpson_theta(&f, horizon, split, PI / 2.0, 2000);
        let got = depth_tail_prob(&spec, d0).unwrap();
        assert!(
            ((got - oracle) / oracle).abs() < 1e-6,
            "depth tail({sharpe}, {horizon}, {d0}): {got:e} vs 2-D oracle {oracle:e}"
        );
    }
}

#[test]
fn psi_is_the_length_marginal_of_the_joint() {
    // |∫₀ᵀ g(d, ℓ) dℓ − ψ(d)| below 1e−9, the ℓ-integral done by an
    // independent rule on the textbook integrand.
    let horizon = 10.0;
    for &sharpe in &[0.5, 1.0, 2.0] {
        let spec = ProcessSpec::new(sharpe, horizon).unwrap();
        for &d in &[0.1, 0.5, 1.0, 2.0, 5.0] {
            let f = |ell: f64, c: f64| joint_textbook(sharpe, horizon, d, ell, c);
            // Below theta_on the integrand is under exp(−250) of scale.
            let theta_on = (d / (23.0 * horizon.sqrt())).min(0.05);
            let split = 0.3;
            let marginal = simpson_log_theta(&f, horizon, theta_on, split, 20_000)
                + simpson_theta(&f, horizon, split, PI / 2.0, 10_000);
            let psi = psi_depth(&spec, d).unwrap();
            assert!(
                (marginal - psi).abs() < 1e-9,
                "marginal consistency at SR={sharpe}, d={d}: {marginal:e} vs {psi:e}"
            );
        }
    }
}

#[test]
fn rho_normalizes_against_independent_rule() {
    // ∫₀ᵀ ρ = 1 with both the density and the integral assembled here.
    for &(sharpe, horizon) in &[(0.0f64, 10.0f64), (1.0, 10.0), (3.0, 2.0), (-0.5, 5.0)] {
        let f = |ell: f64, c: f64| rho_textbook(sharpe, ell, c);
        let total = simpson_theta(&f, horizon, 0.0, PI / 2.0, 8000);
        assert!(
            (total - 1.0).abs() < 1e-9,
            "∫ρ at SR={sharpe}, T={horizon}: {total}"
        );
    }
}

#[test]
fn rho_agrees_with_textbook_assembly_pointwise() {
    // Production ρ (log-domain, Mills-remainder form) against the naive
    // layout across the interior, at drifts where the naive form is safe.
    for &(sharpe, horizon) in &[(0.0f64, 10.0f64), (0.5, 10.0), (2.0, 10.0), (-1.0, 4.0)] {
        let spec = ProcessSpec::new(sharpe, horizon).unwrap();
        for i in 1..30 {
            let ell = horizon * i as f64 / 30.0;
            let got = rho_length(&spec, ell).unwrap();
            let naive = rho_textbook(sharpe, ell, horizon - ell);
            assert!(
                ((got - naive) / naive).abs() < 1e-10,
                "rho mismatch at SR={sharpe}, ℓ={ell}: {got:e} vs {naive:e}"
            );
        }
    }
}

#[test]
fn rho_closed_form_against_raw_double_integral() {
    // ρ(ℓ) = ∫∫ F̃(u, b, ℓ) du db over u, b > 0: the full brute-force route
    // down to the three-variable density.
    let sharpe = 0.8;
    let horizon = 4.0;
    let ell = 1.5;
    let spec = ProcessSpec::new(sharpe, horizon).unwrap();
    let c = horizon - ell;
    let b_max = (sharpe * c).max(0.0) + 13.0 * c.sqrt();
    let u_max = 13.0 * ell.sqrt();
    let oracle = simpson(
        |b| {
            simpson(
                |u| unmarginalized_joint(sharpe, horizon, u, b, ell),
                1e-12,
                u_max,
                2000,
            )
        },
        1e-12,
        b_max,
        2000,
    );
    let got = rho_length(&spec, ell).unwrap();
    assert!(
        ((got - oracle) / oracle).abs() < 1e-8,
        "rho({ell}) = {got:e} vs double-integral oracle {oracle:e}"
    );
}
