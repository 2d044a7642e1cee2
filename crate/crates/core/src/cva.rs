//! Credit valuation adjustments for the equity trade.
//!
//! ```text
//! CVA_B = -∫_0^T f_B(u) [CC(u, 0, 0) - R_B CC(u, H, X)] du
//! CVA_C = -∫_0^T f_C(u) [CP(u, 0, 0) - R_C CP(u, H, X)] du
//! ```
//!
//! with `f_i` the first-default densities. Without a CSA the recoveries are
//! the parties' own and `H = X = 0`; under a CSA the recoveries are one.

use crate::analytic::{compound_exposure, CompoundExposure, EquityOptionSpec};
use crate::collateral::{CollateralTerms, MtmConvention};
use crate::credit::{breakpoints_in, first_default_density, first_default_probability, Party, PartyCredit};
use crate::lattice::{BinomialTree, NodeField};
use crate::market::MarketEnvironment;
use crate::math::{adaptive_simpson, PiecewiseConstant};
use crate::{Error, Real, Result};

const MAX_DEPTH: usize = 30;
const REL_TOL: f64 = 1e-8;

/// Both CVAs, from the buyer's side: `cva_b <= 0 <= cva_c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CvaResult<T> {
    pub cva_b: T,
    pub cva_c: T,
    pub quadrature_error_estimate: T,
}

/// Discounted exposures `CC` / `CP` at default time `u`.
pub trait ExposureModel<T: Real> {
    fn exposure(&self, u: T, threshold: T, min_transfer: T) -> Result<CompoundExposure<T>>;

    fn maturity(&self) -> T;

    /// Scale used for absolute tolerances.
    fn scale(&self) -> T;
}

/// Closed-form exposures of a vanilla option.
#[derive(Clone, Copy, Debug)]
pub struct GeskeExposure<'a, T> {
    pub option: &'a EquityOptionSpec<T>,
    pub env: &'a MarketEnvironment<T>,
}

impl<T: Real> ExposureModel<T> for GeskeExposure<'_, T> {
    fn exposure(&self, u: T, threshold: T, min_transfer: T) -> Result<CompoundExposure<T>> {
        compound_exposure(self.option, self.env, u, threshold, min_transfer)
    }

    fn maturity(&self) -> T {
        self.option.maturity
    }

    fn scale(&self) -> T {
        self.option.spot
    }
}

/// Exposures read off a priced tree with discounted state prices, linear in
/// `u` between time levels. Works for any payoff the tree can price.
#[derive(Clone, Debug)]
pub struct LatticeExposure<T> {
    dt: T,
    scale: T,
    values: Vec<Vec<T>>,
    state_prices: Vec<Vec<T>>,
}

impl<T: Real> LatticeExposure<T> {
    pub fn new(tree: &BinomialTree<T>, field: &NodeField<T>, scale: T) -> Self {
        Self {
            dt: tree.dt(),
            scale,
            values: field.values.clone(),
            state_prices: tree.state_prices(),
        }
    }

    fn at_level(&self, k: usize, h: T, x: T) -> CompoundExposure<T> {
        let mut asset = T::zero();
        let mut liability = T::zero();
        for (&v, &a) in self.values[k].iter().zip(&self.state_prices[k]) {
            if v > h {
                asset += a * (v - h + x);
            }
            if v <= -h && v < T::zero() {
                liability += a * (v + h - x);
            }
        }
        CompoundExposure { asset, liability }
    }
}

impl<T: Real> ExposureModel<T> for LatticeExposure<T> {
    fn exposure(&self, u: T, threshold: T, min_transfer: T) -> Result<CompoundExposure<T>> {
        let n = self.values.len() - 1;
        let pos = (u / self.dt).max(T::zero());
        let k = (pos.floor().as_f64() as usize).min(n);
        let lo = self.at_level(k, threshold, min_transfer);
        if k == n {
            return Ok(lo);
        }
        let w = pos - T::from_count(k);
        let hi = self.at_level(k + 1, threshold, min_transfer);
        Ok(CompoundExposure {
            asset: lo.asset + w * (hi.asset - lo.asset),
            liability: lo.liability + w * (hi.liability - lo.liability),
        })
    }

    fn maturity(&self) -> T {
        self.dt * T::from_count(self.values.len() - 1)
    }

    fn scale(&self) -> T {
        self.scale
    }
}

/// CVAs of an equity option with closed-form exposures.
pub fn cva_equity<T: Real>(
    spec: &EquityOptionSpec<T>,
    env: &MarketEnvironment<T>,
    credit_b: &PartyCredit<T>,
    credit_c: &PartyCredit<T>,
    terms: &CollateralTerms<T>,
) -> Result<CvaResult<T>> {
    if terms.mtm_convention() == MtmConvention::PreDefault {
        return Err(Error::Argument(
            "closed-form exposures assume the risk-free MTM; use the pre-default solver".into(),
        ));
    }
    cva_with_exposure(&GeskeExposure { option: spec, env }, credit_b, credit_c, terms)
}

/// CVAs for any exposure model, by adaptive Simpson quadrature with
/// absolute tolerance `1e-8 · scale` split over the smooth pieces.
pub fn cva_with_exposure<T: Real, E: ExposureModel<T>>(
    model: &E,
    credit_b: &PartyCredit<T>,
    credit_c: &PartyCredit<T>,
    terms: &CollateralTerms<T>,
) -> Result<CvaResult<T>> {
    let big_t = model.maturity();
    let (rb, rc) = terms.effective_recoveries(credit_b.recovery(), credit_c.recovery());
    let mut cuts = breakpoints_in(
        &[
            credit_b.intensity(),
            credit_c.intensity(),
            terms.threshold_schedule(),
            terms.min_transfer_schedule(),
        ],
        T::zero(),
        big_t,
    );
    cuts.insert(0, T::zero());
    cuts.push(big_t);
    let tol = T::lit(REL_TOL) * model.scale();

    let loss_at = |u: T| -> Result<(T, T)> {
        let (h, x) = terms.effective_threshold(u);
        let bare = model.exposure(u, T::zero(), T::zero())?;
        let held = if h == T::zero() && x == T::zero() {
            bare
        } else {
            model.exposure(u, h, x)?
        };
        Ok((bare.asset - rb * held.asset, bare.liability - rc * held.liability))
    };

    let mut total = CvaResult { cva_b: T::zero(), cva_c: T::zero(), quadrature_error_estimate: T::zero() };
    for (party, credit) in [(Party::B, credit_b), (Party::C, credit_c)] {
        if credit.intensity().all(|l| l == T::zero()) {
            continue;
        }
        let mut sum = T::zero();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            // Nudge evaluation points inside the piece so step functions are
            // sampled on the correct side of their breakpoints.
            let eps = (b - a) * T::epsilon() * T::lit(4.0);
            let integral = adaptive_simpson(
                |u| {
                    let v = u.max(a + eps).min(b - eps);
                    let (lb, lc) = loss_at(v)?;
                    let f = first_default_density(party, credit_b, credit_c, v);
                    Ok(match party {
                        Party::B => -f * lb,
                        Party::C => -f * lc,
                    })
                },
                a,
                b,
                tol * (b - a) / big_t,
                MAX_DEPTH,
            )?;
            sum += integral.value;
            total.quadrature_error_estimate += integral.error_estimate;
        }
        match party {
            Party::B => total.cva_b = sum + T::zero(),
            Party::C => total.cva_c = sum + T::zero(),
        }
    }
    Ok(total)
}

/// Closed form for a sign-definite trade with constant intensities, no CSA
/// and proportional recovery:
/// `CVA_B = -P(τ = τ_B <= T) L_B V_e⁺(0)`, `CVA_C = -P(τ = τ_C <= T) L_C V_e⁻(0)`.
pub fn cva_closed_form<T: Real>(
    ve_plus: T,
    ve_minus: T,
    credit_b: &PartyCredit<T>,
    credit_c: &PartyCredit<T>,
    maturity: T,
) -> Result<CvaResult<T>> {
    if !(credit_b.has_constant_intensity() && credit_c.has_constant_intensity()) {
        return Err(Error::Argument("closed-form CVA needs constant intensities".into()));
    }
    if ve_plus < T::zero() || ve_minus > T::zero() {
        return Err(Error::Argument("expected V_e⁺ >= 0 and V_e⁻ <= 0".into()));
    }
    let pb = first_default_probability(Party::B, credit_b, credit_c, maturity);
    let pc = first_default_probability(Party::C, credit_b, credit_c, maturity);
    Ok(CvaResult {
        cva_b: -pb * credit_b.loss_rate() * ve_plus + T::zero(),
        cva_c: -pc * credit_c.loss_rate() * ve_minus + T::zero(),
        quadrature_error_estimate: T::zero(),
    })
}

/// Funding spread `x_i(t) = λ_i(t) L_i + λ_M`, unless overridden.
pub fn funding_spread<T: Real>(credit: &PartyCredit<T>, env: &MarketEnvironment<T>) -> PiecewiseConstant<T> {
    match credit.funding_spread_override() {
        Some(x) => PiecewiseConstant::constant(x),
        None => {
            let (loss, lm) = (credit.loss_rate(), env.market_funding_spread());
            credit.intensity().map(|l| l * loss + lm)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{black_scholes_price, Position};
    use crate::lattice::{build_tree, tree_price_and_delta};

    fn env() -> MarketEnvironment<f64> {
        MarketEnvironment::flat(0.03, 0.0, 0.2).unwrap()
    }

    fn call() -> EquityOptionSpec<f64> {
        EquityOptionSpec::call(100.0, 100.0, 1.0).unwrap()
    }

    #[test]
    fn closed_form_example() {
        let b = PartyCredit::constant(0.02, 0.4).unwrap();
        let c = PartyCredit::constant(0.015, 0.4).unwrap();
        let r = cva_closed_form(9.4134, 0.0, &b, &c, 1.0).unwrap();
        let expected = -0.02 / 0.035 * (1.0 - (-0.035f64).exp()) * 0.6 * 9.4134;
        assert!((r.cva_b - expected).abs() < 1e-15);
        assert!((r.cva_b + 0.1110).abs() < 5e-5);
        assert_eq!(r.cva_c, 0.0);
        let full = PartyCredit::constant(0.02, 1.0).unwrap();
        assert_eq!(cva_closed_form(9.4134, 0.0, &full, &c, 1.0).unwrap().cva_b, 0.0);
        let none = PartyCredit::constant(0.0, 0.4).unwrap();
        let r = cva_closed_form(9.4134, -3.0, &none, &none, 1.0).unwrap();
        assert_eq!((r.cva_b, r.cva_c), (0.0, 0.0));
    }

    #[test]
    fn unilateral_limit() {
        let b = PartyCredit::constant(0.0, 0.4).unwrap();
        let c = PartyCredit::constant(0.015, 0.4).unwrap();
        let r = cva_closed_form(0.0, -5.0, &b, &c, 2.0).unwrap();
        let expected = (1.0 - (-0.03f64).exp()) * 0.6 * 5.0;
        assert!((r.cva_c - expected).abs() < 1e-14);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let env = env();
        let b = PartyCredit::constant(0.02, 0.4).unwrap();
        let c = PartyCredit::constant(0.015, 0.4).unwrap();
        let terms = CollateralTerms::uncollateralized();
        let q = cva_equity(&call(), &env, &b, &c, &terms).unwrap();
        let ve = black_scholes_price(&call(), &env);
        let cf = cva_closed_form(ve, 0.0, &b, &c, 1.0).unwrap();
        assert!((q.cva_b / cf.cva_b - 1.0).abs() < 1e-6);
        assert_eq!(q.cva_c, 0.0);
        assert!(q.cva_c.is_sign_positive());

        let short = call().with_position(Position::Short);
        let q = cva_equity(&short, &env, &b, &c, &terms).unwrap();
        let cf = cva_closed_form(0.0, -ve, &b, &c, 1.0).unwrap();
        assert_eq!(q.cva_b, 0.0);
        assert!((q.cva_c / cf.cva_c - 1.0).abs() < 1e-6);
    }

    #[test]
    fn riskless_seller_has_no_cva() {
        let b = PartyCredit::constant(0.0, 0.4).unwrap();
        let c = PartyCredit::constant(0.015, 0.4).unwrap();
        let terms = CollateralTerms::threshold(4.0, 2.0).unwrap();
        let r = cva_equity(&call(), &env(), &b, &c, &terms).unwrap();
        assert_eq!(r.cva_b, 0.0);
    }

    #[test]
    fn lattice_hook_agrees_with_closed_form_exposures() {
        let env = env();
        let spec = call();
        let tree = build_tree(&env, &spec, 1.0 / 400.0).unwrap();
        let field = tree_price_and_delta(&tree, &spec, &env);
        let lattice = LatticeExposure::new(&tree, &field, spec.spot);
        let b = PartyCredit::constant(0.02, 0.4).unwrap();
        let c = PartyCredit::constant(0.015, 0.4).unwrap();
        let terms = CollateralTerms::threshold(4.0, 2.0).unwrap();
        let via_tree = cva_with_exposure(&lattice, &b, &c, &terms).unwrap();
        let closed = cva_equity(&spec, &env, &b, &c, &terms).unwrap();
        assert!((via_tree.cva_b - closed.cva_b).abs() < 2e-3, "{} vs {}", via_tree.cva_b, closed.cva_b);
    }

    #[test]
    fn funding_spread_examples() {
        let env = env();
        let b = PartyCredit::constant(0.02, 0.4).unwrap();
        assert!((funding_spread(&b, &env).value_at(0.0) - 0.012).abs() < 1e-16);
        let env_m = env.clone().with_market_funding_spread(0.005).unwrap();
        let zero = PartyCredit::constant(0.0, 0.4).unwrap();
        assert_eq!(funding_spread(&zero, &env_m).value_at(0.3), 0.005);
        assert_eq!(funding_spread(&zero, &env).value_at(0.3), 0.0);
        let fixed = b.with_funding_spread(0.03).unwrap();
        assert_eq!(funding_spread(&fixed, &env).value_at(0.3), 0.03);
    }
}
