use super::{EquityOptionSpec, OptionKind};
use crate::market::MarketEnvironment;
use crate::math::norm_cdf;
use crate::Real;

/// Unsigned Black-Scholes price and spot delta.
///
/// `df` is the risk-free discount to expiry, `carry` the dividend discount
/// `e^{-q τ}`, `total_vol` is `σ √τ`.
pub(crate) fn black_scholes_raw<T: Real>(
    kind: OptionKind,
    spot: T,
    strike: T,
    df: T,
    carry: T,
    total_vol: T,
) -> (T, T) {
    let fwd_s = spot * carry;
    let fwd_k = strike * df;
    if total_vol <= T::zero() || spot <= T::zero() {
        let itm = match kind {
            OptionKind::Call => fwd_s > fwd_k,
            OptionKind::Put => fwd_s < fwd_k,
        };
        return match (kind, itm) {
            (OptionKind::Call, true) => (fwd_s - fwd_k, carry),
            (OptionKind::Put, true) => (fwd_k - fwd_s, -carry),
            _ => (T::zero(), T::zero()),
        };
    }
    let d1 = (fwd_s / fwd_k).ln() / total_vol + total_vol * T::lit(0.5);
    let d2 = d1 - total_vol;
    match kind {
        OptionKind::Call => {
            let nd1 = norm_cdf(d1);
            ((fwd_s * nd1 - fwd_k * norm_cdf(d2)).pos(), carry * nd1)
        }
        OptionKind::Put => {
            let nd1 = norm_cdf(-d1);
            ((fwd_k * norm_cdf(-d2) - fwd_s * nd1).pos(), -carry * nd1)
        }
    }
}

/// Unsigned value and delta at time `t` for spot `s`, in time-`t` currency.
pub(crate) fn raw_at<T: Real>(spec: &EquityOptionSpec<T>, env: &MarketEnvironment<T>, t: T, s: T) -> (T, T) {
    let tau = (spec.maturity - t).pos();
    black_scholes_raw(
        spec.kind,
        s,
        spec.strike,
        env.discount_between(t, spec.maturity),
        env.carry_between(t, spec.maturity),
        env.volatility() * tau.sqrt(),
    )
}

/// Risk-free value of the option to the buyer, at time `t` and spot `s`.
pub fn black_scholes_value_at<T: Real>(spec: &EquityOptionSpec<T>, env: &MarketEnvironment<T>, t: T, s: T) -> T {
    spec.position.sign::<T>() * raw_at(spec, env, t, s).0
}

/// `∂V/∂S` at time `t` and spot `s`, signed by the buyer's position.
pub fn bs_delta_at<T: Real>(spec: &EquityOptionSpec<T>, env: &MarketEnvironment<T>, t: T, s: T) -> T {
    spec.position.sign::<T>() * raw_at(spec, env, t, s).1
}

/// Risk-free value `V_e(0)` seen by the buyer.
pub fn black_scholes_price<T: Real>(spec: &EquityOptionSpec<T>, env: &MarketEnvironment<T>) -> T {
    black_scholes_value_at(spec, env, T::zero(), spec.spot)
}

/// Spot delta at inception; `e^{-qT} Φ(d₁)` for a long call.
pub fn bs_delta<T: Real>(spec: &EquityOptionSpec<T>, env: &MarketEnvironment<T>) -> T {
    bs_delta_at(spec, env, T::zero(), spec.spot)
}

/// Value `V_s(0)` under the measure where the repo-financed discounted
/// asset is a martingale.
///
/// Hedging through repo at spread `λ_S` shifts the asset's drift by `+λ_S`,
/// so this is Black-Scholes with dividend yield `q - λ_S`. It is the
/// funding-only solution of the pre-default valuation equation.
pub fn repo_adjusted_value<T: Real>(spec: &EquityOptionSpec<T>, env: &MarketEnvironment<T>) -> T {
    let shifted = env.with_dividend_yield(env.dividend_yield() - env.repo_spread());
    black_scholes_price(spec, &shifted)
}
