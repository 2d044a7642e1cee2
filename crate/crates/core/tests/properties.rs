use proptest::prelude::*;

use xva_core::analytic::{black_scholes_price, bs_delta, EquityOptionSpec, OptionKind, Position};
use xva_core::collateral::{collateral_value, CollateralTerms};
use xva_core::credit::{
    default_in_interval_prob, first_default_probability, survival_probability, Party, PartyCredit,
};
use xva_core::cva::cva_equity;
use xva_core::market::{DiscountCurve, ForwardCurve, MarketEnvironment};
use xva_core::math::{bivariate_normal_cdf, norm_cdf, PiecewiseConstant};
use xva_core::swap::{annuity, forward_swap_rate, swap_dva_cva, swap_value, SwapDirection, SwapSpec};

fn option_inputs() -> impl Strategy<Value = (f64, f64, f64, f64, f64, f64)> {
    (50.0..150.0, 50.0..150.0, 0.1..3.0, 0.0..0.08, 0.0..0.05, 0.05..0.6)
}

fn curves(periods: usize) -> impl Strategy<Value = (Vec<f64>, DiscountCurve<f64>, ForwardCurve<f64>)> {
    (
        prop::collection::vec(0.0..0.06, periods),
        prop::collection::vec(0.001..0.08, periods),
    )
        .prop_map(|(rates, fwds): (Vec<f64>, Vec<f64>)| {
            let grid: Vec<f64> = (0..=rates.len()).map(|j| j as f64 * 0.5).collect();
            let mut df = 1.0f64;
            let pillars: Vec<(f64, f64)> = rates
                .iter()
                .enumerate()
                .map(|(j, r)| {
                    df *= (-r * 0.5f64).exp();
                    (grid[j + 1], df)
                })
                .collect();
            let periods = fwds.iter().enumerate().map(|(j, &f)| (grid[j], grid[j + 1], f)).collect();
            (grid, DiscountCurve::new(&pillars).unwrap(), ForwardCurve::new(periods).unwrap())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn put_call_parity((s, k, t, r, q, sigma) in option_inputs()) {
        let env = MarketEnvironment::flat(r, q, sigma).unwrap();
        let c = black_scholes_price(&EquityOptionSpec::call(s, k, t).unwrap(), &env);
        let p = black_scholes_price(&EquityOptionSpec::put(s, k, t).unwrap(), &env);
        let fwd = s * (-q * t).exp() - k * (-r * t).exp();
        prop_assert!((c - p - fwd).abs() <= 1e-10 * s);
        prop_assert!(c >= 0.0 && p >= 0.0);
    }

    #[test]
    fn short_is_negated_long((s, k, t, r, q, sigma) in option_inputs()) {
        let env = MarketEnvironment::flat(r, q, sigma).unwrap();
        let long = EquityOptionSpec::call(s, k, t).unwrap();
        let short = long.with_position(Position::Short);
        prop_assert_eq!(black_scholes_price(&short, &env), -black_scholes_price(&long, &env));
        prop_assert_eq!(bs_delta(&short, &env), -bs_delta(&long, &env));
    }

    #[test]
    fn normal_symmetry(x in -8.0f64..8.0) {
        prop_assert!((norm_cdf(x) + norm_cdf(-x) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bivariate_within_frechet_bounds(x in -5.0f64..5.0, y in -5.0f64..5.0, rho in -1.0f64..=1.0) {
        let v = bivariate_normal_cdf(x, y, rho).unwrap();
        let (a, b) = (norm_cdf(x), norm_cdf(y));
        prop_assert!(v >= (a + b - 1.0).max(0.0) - 1e-15);
        prop_assert!(v <= a.min(b) + 1e-15);
        let swapped = bivariate_normal_cdf(y, x, rho).unwrap();
        prop_assert!((v - swapped).abs() < 1e-15);
    }

    #[test]
    fn default_probabilities_telescope(lb in 0.0f64..0.2, lc in 0.0f64..0.2, t in 0.0f64..30.0) {
        let b = PartyCredit::constant(lb, 0.4).unwrap();
        let c = PartyCredit::constant(lc, 0.4).unwrap();
        let total = first_default_probability(Party::B, &b, &c, t)
            + first_default_probability(Party::C, &b, &c, t)
            + survival_probability(&b, &c, t);
        prop_assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn interval_probabilities_sum_below_one(
        lb in prop::collection::vec(0.0f64..0.3, 1..4),
        lc in 0.0f64..0.3,
        periods in 1usize..60,
    ) {
        let breaks: Vec<f64> = (1..lb.len()).map(|i| i as f64 * 2.5).collect();
        let b = PartyCredit::new(PiecewiseConstant::new(breaks, lb).unwrap(), 0.4).unwrap();
        let c = PartyCredit::constant(lc, 0.4).unwrap();
        for party in [Party::B, Party::C] {
            let mut total = 0.0;
            for j in 1..=periods {
                let (t0, t1) = ((j - 1) as f64 * 0.5, j as f64 * 0.5);
                total += default_in_interval_prob(party, &b, &c, t0, t1).unwrap();
            }
            prop_assert!(total <= 1.0 + 1e-14);
        }
    }

    #[test]
    fn collateral_rule(m in -50.0f64..50.0, h in 0.0f64..10.0, frac in 0.0f64..=1.0) {
        let x = h * frac;
        let c = collateral_value(m, h, x);
        if m.abs() < h {
            prop_assert_eq!(c, 0.0);
        } else {
            prop_assert!((c - (m - m.signum() * (h - x))).abs() < 1e-12);
            prop_assert!(c.abs() <= m.abs() + 1e-12);
        }
    }

    #[test]
    fn cva_signs((s, k, t, r, q, sigma) in option_inputs(), lb in 0.0f64..0.1, lc in 0.0f64..0.1, put in any::<bool>(), short in any::<bool>()) {
        let kind = if put { OptionKind::Put } else { OptionKind::Call };
        let position = if short { Position::Short } else { Position::Long };
        let spec = EquityOptionSpec::new(s, k, t, kind).unwrap().with_position(position);
        let env = MarketEnvironment::flat(r, q, sigma).unwrap();
        let b = PartyCredit::constant(lb, 0.4).unwrap();
        let c = PartyCredit::constant(lc, 0.4).unwrap();
        let cva = cva_equity(&spec, &env, &b, &c, &CollateralTerms::uncollateralized()).unwrap();
        if short {
            prop_assert_eq!(cva.cva_b, 0.0);
            prop_assert!(cva.cva_c >= 0.0);
        } else {
            prop_assert!(cva.cva_b <= 0.0);
            prop_assert_eq!(cva.cva_c, 0.0);
        }
    }

    #[test]
    fn discount_curve_csv_round_trip(rates in prop::collection::vec(0.0f64..0.1, 1..30)) {
        let mut df = 1.0;
        let pillars: Vec<(f64, f64)> = rates
            .iter()
            .enumerate()
            .map(|(i, r)| {
                df *= (-r * 0.5f64).exp();
                ((i + 1) as f64 * 0.5, df)
            })
            .collect();
        let curve = DiscountCurve::new(&pillars).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ois.csv");
        curve.save(&path).unwrap();
        prop_assert_eq!(DiscountCurve::<f64>::load(&path).unwrap(), curve);
    }

    #[test]
    fn forward_curve_csv_round_trip((_, _, f) in curves(12)) {
        let mut buf = Vec::new();
        f.write_to(&mut buf).unwrap();
        prop_assert_eq!(ForwardCurve::<f64>::from_reader(buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn swap_value_is_cash_flow_sum((grid, d, f) in curves(20), s in 0.0f64..0.08) {
        let spec = SwapSpec::new(grid.clone(), s, SwapDirection::Payer, 1.0).unwrap();
        let direct: f64 = (0..20)
            .map(|j| {
                let dt = grid[j + 1] - grid[j];
                d.discount_factor(grid[j + 1]) * dt * (f.forward(grid[j], grid[j + 1]).unwrap() - s)
            })
            .sum();
        prop_assert!((swap_value(&spec, &d, &f).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn swap_rate_within_forward_range((grid, d, f) in curves(16), m in 0usize..15) {
        let s = forward_swap_rate(&d, &f, &grid, m, 16).unwrap();
        let rates: Vec<f64> = f.periods()[m..].iter().map(|p| p.2).collect();
        let lo = rates.iter().cloned().fold(f64::MAX, f64::min);
        let hi = rates.iter().cloned().fold(f64::MIN, f64::max);
        prop_assert!(s >= lo - 1e-15 && s <= hi + 1e-15);
        prop_assert!(annuity(&d, &grid, m, 16).unwrap() > 0.0);
    }

    #[test]
    fn swap_adjustment_signs((grid, d, f) in curves(20), s in 0.005f64..0.06, lb in 0.0f64..0.05, lc in 0.0f64..0.05, payer in any::<bool>()) {
        let dir = if payer { SwapDirection::Payer } else { SwapDirection::Receiver };
        let spec = SwapSpec::new(grid, s, dir, 1.0).unwrap();
        let adj = swap_dva_cva(&spec, &d, &f, 0.25, &PartyCredit::constant(lb, 0.4).unwrap(), &PartyCredit::constant(lc, 0.4).unwrap()).unwrap();
        prop_assert!(adj.dva <= 0.0 && adj.cva >= 0.0);
        let full = swap_dva_cva(&spec, &d, &f, 0.25, &PartyCredit::constant(lb, 1.0).unwrap(), &PartyCredit::constant(lc, 1.0).unwrap()).unwrap();
        prop_assert_eq!((full.dva, full.cva), (0.0, 0.0));
    }
}

#[test]
fn single_precision_tracks_double() {
    let spec32 = EquityOptionSpec::<f32>::call(100.0, 100.0, 1.0).unwrap();
    let env32 = MarketEnvironment::<f32>::flat(0.03, 0.0, 0.2).unwrap();
    let spec64 = EquityOptionSpec::<f64>::call(100.0, 100.0, 1.0).unwrap();
    let env64 = MarketEnvironment::<f64>::flat(0.03, 0.0, 0.2).unwrap();
    let v32 = black_scholes_price(&spec32, &env32) as f64;
    let v64 = black_scholes_price(&spec64, &env64);
    assert!(((v32 - v64) / v64).abs() < 1e-5);
    let b = PartyCredit::<f32>::constant(0.02, 0.4).unwrap();
    let c = PartyCredit::<f32>::constant(0.015, 0.4).unwrap();
    let cva32 = cva_equity(&spec32, &env32, &b, &c, &CollateralTerms::uncollateralized()).unwrap();
    assert!((cva32.cva_b as f64 + 0.1110068883).abs() < 1e-4);
}
