//! Independent numerical oracles for the closed forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use xva_core::analytic::{
    bivariate_normal_cdf, black_scholes_price, compound_call_plus_digital, CompoundQuery, EquityOptionSpec,
    OptionKind,
};
use xva_core::collateral::CollateralTerms;
use xva_core::credit::PartyCredit;
use xva_core::cva::cva_equity;
use xva_core::fixtures::{forward_curve, ois_curve};
use xva_core::lattice::{build_tree, tree_price_and_delta};
use xva_core::market::MarketEnvironment;
use xva_core::math::norm_cdf;
use xva_core::swap::{annuity, black_swaption, forward_swap_rate};

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

fn std_normal() -> Normal {
    Normal::standard()
}

fn bvn_by_quadrature(x: f64, y: f64, rho: f64) -> f64 {
    let n = std_normal();
    let c = (1.0 - rho * rho).sqrt();
    simpson(|t| n.pdf(t) * n.cdf((y - rho * t) / c), -12.0, x, 20_000)
}

#[test]
fn univariate_normal_matches_references() {
    // 40-digit reference values.
    let refs = [
        (-7.0, 1.279812543885835e-12),
        (-5.0, 2.866_515_718_791_939e-7),
        (-3.66, 0.00012610762413848667),
        (-2.0, 0.022_750_131_948_179_21),
        (-1.0, 0.15865525393145705),
        (-0.5, 0.3085375387259869),
        (0.0, 0.5),
        (0.25, 0.598_706_325_682_923_7),
        (0.75, 0.7733726476231318),
        (1.5, 0.933_192_798_731_141_9),
        (3.0, 0.998_650_101_968_369_9),
        (6.0, 0.999_999_999_013_412_3),
    ];
    for (x, want) in refs {
        let got: f64 = norm_cdf(x);
        assert!((got - want).abs() < 2e-16, "x = {x}: {got}");
        if x >= -5.0 {
            assert!(((got - want) / want).abs() < 1e-10, "x = {x}: {got}");
        }
    }
    let n = std_normal();
    for i in -400..=400 {
        let x = i as f64 * 0.02;
        assert!((norm_cdf(x) - n.cdf(x)).abs() < 1e-10, "x = {x}");
    }
}

#[test]
fn bivariate_normal_matches_quadrature() {
    assert!((bivariate_normal_cdf(1.0_f64, 1.0, 0.5).unwrap() - 0.7452035868467497).abs() < 1e-14);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let x = rng.random_range(-4.0..4.0);
        let y = rng.random_range(-4.0..4.0);
        let rho = rng.random_range(-0.99..0.99);
        let got = bivariate_normal_cdf(x, y, rho).unwrap();
        let want = bvn_by_quadrature(x, y, rho);
        assert!((got - want).abs() < 1e-10, "({x}, {y}, {rho}): {got} vs {want}");
    }
}

fn example_call() -> (EquityOptionSpec<f64>, MarketEnvironment<f64>) {
    (EquityOptionSpec::call(100.0, 100.0, 1.0).unwrap(), MarketEnvironment::flat(0.03, 0.0, 0.2).unwrap())
}

fn bs(kind: OptionKind, s: f64, k: f64, r: f64, sigma: f64, tau: f64) -> f64 {
    let n = std_normal();
    let sd = sigma * tau.sqrt();
    let d1 = ((s / k).ln() + r * tau) / sd + 0.5 * sd;
    let d2 = d1 - sd;
    match kind {
        OptionKind::Call => s * n.cdf(d1) - k * (-r * tau).exp() * n.cdf(d2),
        OptionKind::Put => k * (-r * tau).exp() * n.cdf(-d2) - s * n.cdf(-d1),
    }
}

#[test]
fn compound_exposure_matches_density_integration() {
    let (spec, env) = example_call();
    let (u, h, x) = (0.5, 4.0, 2.0);
    let closed = compound_call_plus_digital(&CompoundQuery::new(spec, u, h, x).unwrap(), &env).unwrap();
    let n = std_normal();
    let drift = (0.03 - 0.02) * u;
    let vol = 0.2 * u.sqrt();
    let df = (-0.03 * u).exp();
    let integrand = |z: f64| {
        let s = 100.0 * (drift + vol * z).exp();
        let v = bs(OptionKind::Call, s, 100.0, 0.03, 0.2, 1.0 - u);
        n.pdf(z) * if v > h { df * (v - h + x) } else { 0.0 }
    };
    // The payoff jumps by X at the critical spot; integrate from there.
    let (mut lo, mut hi) = (-10.0, 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let s = 100.0 * (drift + vol * mid).exp();
        if bs(OptionKind::Call, s, 100.0, 0.03, 0.2, 1.0 - u) > h {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let want = simpson(integrand, hi, 10.0, 200_000);
    assert!((closed - want).abs() < 1e-6, "{closed} vs {want}");
}

#[test]
fn zero_threshold_exposure_is_the_option_value() {
    let (spec, env) = example_call();
    let cc = compound_call_plus_digital(&CompoundQuery::new(spec, 0.5, 0.0, 0.0).unwrap(), &env).unwrap();
    assert!((cc - 9.413403383853017).abs() < 1e-10);
}

#[test]
fn csa_cva_matches_monte_carlo() {
    let (spec, env) = example_call();
    let b = PartyCredit::constant(0.02, 0.4).unwrap();
    let c = PartyCredit::constant(0.015, 0.4).unwrap();
    let (h, x) = (4.0, 2.0);
    let got = cva_equity(&spec, &env, &b, &c, &CollateralTerms::threshold(h, x).unwrap()).unwrap();
    assert_eq!(got.cva_c, 0.0);

    // Default time uniform on (0, T) reweighted by the first-default density.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let paths = 400_000;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..paths {
        let u: f64 = rng.random_range(0.0..1.0);
        let z: f64 = rng.sample(StandardNormal);
        let s = 100.0 * ((0.03 - 0.02) * u + 0.2 * u.sqrt() * z).exp();
        let v = bs(OptionKind::Call, s, 100.0, 0.03, 0.2, 1.0 - u);
        let uncovered = if v > h { h - x } else { v };
        let w = 0.02 * (-0.035 * u).exp() * (-0.03 * u).exp();
        let loss = -w * uncovered;
        sum += loss;
        sum_sq += loss * loss;
    }
    let n = paths as f64;
    let mean = sum / n;
    let se = ((sum_sq / n - mean * mean) / n).sqrt();
    assert!((got.cva_b - mean).abs() < 4.0 * se, "{} vs {mean} +- {se}", got.cva_b);
    // Collateral can only reduce the loss.
    let bare = cva_equity(&spec, &env, &b, &c, &CollateralTerms::uncollateralized()).unwrap();
    assert!(got.cva_b > bare.cva_b);
}

#[test]
fn closed_form_cva_frozen() {
    let (spec, env) = example_call();
    let b = PartyCredit::constant(0.02, 0.4).unwrap();
    let c = PartyCredit::constant(0.015, 0.4).unwrap();
    let got = cva_equity(&spec, &env, &b, &c, &CollateralTerms::uncollateralized()).unwrap();
    let prob_b = 0.02 / 0.035 * (1.0 - (-0.035f64).exp());
    let want = -prob_b * 0.6 * 9.413403383853017;
    assert!((got.cva_b - want).abs() < 1e-9);
    assert!((got.cva_b + 0.1110).abs() < 1e-4);
}

#[test]
fn swaption_matches_lognormal_integration() {
    let (d, f) = (ois_curve::<f64>().unwrap(), forward_curve::<f64>().unwrap());
    let grid: Vec<f64> = (0..=20).map(|j| j as f64 * 0.5).collect();
    let (m, n, vol) = (2, 20, 0.2);
    let a = annuity(&d, &grid, m, n).unwrap();
    let s = forward_swap_rate(&d, &f, &grid, m, n).unwrap();
    let t = grid[m];
    let normal = std_normal();
    for strike in [0.01, 0.0145, 0.02] {
        let rate = |z: f64| s * (vol * t.sqrt() * z - 0.5 * vol * vol * t).exp();
        let kink = ((strike / s).ln() + 0.5 * vol * vol * t) / (vol * t.sqrt());
        let payer = a * simpson(|z| normal.pdf(z) * (rate(z) - strike), kink, 10.0, 100_000);
        let receiver = a * simpson(|z| normal.pdf(z) * (strike - rate(z)), -10.0, kink, 100_000);
        let bc = black_swaption(OptionKind::Call, &d, &f, &grid, m, n, strike, vol).unwrap();
        let bp = black_swaption(OptionKind::Put, &d, &f, &grid, m, n, strike, vol).unwrap();
        assert!((bc - payer).abs() < 1e-12, "{bc} vs {payer}");
        assert!((bp - receiver).abs() < 1e-12, "{bp} vs {receiver}");
    }
}

#[test]
fn tree_converges_for_puts_with_dividends() {
    let spec = EquityOptionSpec::<f64>::put(95.0, 105.0, 2.0).unwrap();
    let env = MarketEnvironment::flat(0.04, 0.02, 0.3).unwrap();
    let exact = black_scholes_price(&spec, &env);
    let mut prev = f64::INFINITY;
    // First-order convergence: the error falls about fourfold per fourfold refinement.
    for steps in [100.0, 400.0, 1600.0] {
        let tree = build_tree(&env, &spec, 2.0 / steps).unwrap();
        let err = (tree_price_and_delta(&tree, &spec, &env).root_value() - exact).abs();
        assert!(err < 0.3 * prev, "{steps} steps: {err} after {prev}");
        prev = err;
    }
    assert!(prev < 1e-3, "{prev}");
}
