//! Exposures at a default time `u` in closed form.
//!
//! With `V_u` the risk-free value of the trade at `u`,
//!
//! ```text
//! CC(S0, u, H, X) = E[P(0,u) (V_u - H + X) 1{V_u > H}]
//! CP(S0, u, H, X) = E[P(0,u) (V_u + H - X) 1{V_u <= -H}]
//! ```
//!
//! For a vanilla inner option each is a compound option on the option plus
//! a digital paying `X - H`, priced with the bivariate normal distribution.
//! A short position is the mirrored long exposure with the sign flipped.

use super::black_scholes::raw_at;
use super::{CompoundQuery, EquityOptionSpec, OptionKind, Position};
use crate::market::MarketEnvironment;
use crate::math::{newton_bisect, norm_cdf, normal::phi2};
use crate::{Error, Real, Result};

/// Asset-side and liability-side exposures at one default time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompoundExposure<T> {
    /// `CC >= 0`.
    pub asset: T,
    /// `CP <= 0`.
    pub liability: T,
}

/// Spot `S*` at which the unsigned inner option is worth `h` at time `u`.
///
/// A call is worth more than `h` above `S*`, a put below it. `h <= 0` gives
/// `0` for a call and `+inf` for a put (every state qualifies); a put whose
/// supremum `K P(u,T)` does not exceed `h` gives `0` (no state qualifies).
pub fn critical_stock<T: Real>(option: &EquityOptionSpec<T>, env: &MarketEnvironment<T>, u: T, h: T) -> Result<T> {
    let k = option.strike;
    let kind = option.kind;
    if h <= T::zero() {
        return Ok(match kind {
            OptionKind::Call => T::zero(),
            OptionKind::Put => T::infinity(),
        });
    }
    if u >= option.maturity {
        return Ok(match kind {
            OptionKind::Call => k + h,
            OptionKind::Put => (k - h).pos(),
        });
    }
    let lo = T::lit(1e-8);
    let spread = env.volatility() * u.sqrt() * T::lit(10.0);
    let mut hi = T::lit(10.0) * option.spot.max(k) * spread.exp();
    let value = |s: T| raw_at(option, env, u, s);
    if kind == OptionKind::Call {
        for _ in 0..64 {
            if value(hi).0 >= h {
                break;
            }
            hi *= T::lit(2.0);
        }
    }
    let f_tol = T::lit(1e-10).max(T::epsilon() * T::lit(64.0) * h);
    match kind {
        OptionKind::Call => {
            if value(hi).0 < h {
                return Err(Error::NoBracket(format!(
                    "inner call stays below threshold {h} up to spot {hi}"
                )));
            }
            let at_k = value(k).0;
            let guess = if at_k > T::zero() { k * h / at_k } else { k };
            let root = newton_bisect(
                |s| {
                    let (v, d) = value(s);
                    (v - h, d)
                },
                lo,
                hi,
                guess,
                f_tol,
                200,
            )?;
            Ok(root.x)
        }
        OptionKind::Put => {
            if value(lo).0 <= h {
                return Ok(T::zero());
            }
            let at_k = value(k).0;
            let guess = if at_k > T::zero() { k * at_k / h } else { k };
            let root = newton_bisect(
                |s| {
                    let (v, d) = value(s);
                    (v - h, d)
                },
                lo,
                hi,
                guess,
                f_tol,
                200,
            )?;
            Ok(root.x)
        }
    }
}

/// `CC` and `CP` at default time `u in [0, T]` with threshold `h` and
/// minimum transfer `x`, both discounted to time 0.
pub(crate) fn compound_exposure<T: Real>(
    option: &EquityOptionSpec<T>,
    env: &MarketEnvironment<T>,
    u: T,
    h: T,
    x: T,
) -> Result<CompoundExposure<T>> {
    let long = if u <= T::zero() {
        let v = raw_at(option, env, T::zero(), option.spot).0;
        if v > h {
            v - h + x
        } else {
            T::zero()
        }
    } else {
        long_exposure(option, env, u.min(option.maturity), h, x)?
    };
    Ok(match option.position {
        Position::Long => CompoundExposure { asset: long.pos(), liability: T::zero() },
        Position::Short => CompoundExposure { asset: T::zero(), liability: -long.pos() },
    })
}

fn long_exposure<T: Real>(
    option: &EquityOptionSpec<T>,
    env: &MarketEnvironment<T>,
    u: T,
    h: T,
    x: T,
) -> Result<T> {
    let s_star = critical_stock(option, env, u, h)?;
    let big_t = option.maturity;
    let sigma = env.volatility();
    let half = T::lit(0.5);
    let p_u = env.discount(u);
    let p_t = env.discount(big_t);
    let fwd_u = option.spot * env.carry_between(T::zero(), u) / p_u;
    let spot_t = option.spot * env.carry_between(T::zero(), big_t);
    let vol_u = sigma * u.sqrt();
    let vol_t = sigma * big_t.sqrt();

    let a_plus = if s_star == T::zero() {
        T::infinity()
    } else if s_star.is_infinite() {
        T::neg_infinity()
    } else {
        (fwd_u / s_star).ln() / vol_u + vol_u * half
    };
    let a_minus = a_plus - vol_u;
    let b_plus = (spot_t / (option.strike * p_t)).ln() / vol_t + vol_t * half;
    let b_minus = b_plus - vol_t;
    let rho = (u / big_t).sqrt().min(T::one());
    let digital = (h - x) * p_u;
    let k_t = option.strike * p_t;

    Ok(match option.kind {
        OptionKind::Call => {
            spot_t * phi2(a_plus, b_plus, rho) - k_t * phi2(a_minus, b_minus, rho)
                - digital * norm_cdf(a_minus)
        }
        OptionKind::Put => {
            k_t * phi2(-a_minus, -b_minus, rho) - spot_t * phi2(-a_plus, -b_plus, rho)
                - digital * norm_cdf(-a_minus)
        }
    })
}

/// `CC(S0, u, H, X)`: value of receiving `V_u - H + X` at `u` whenever the
/// trade is worth more than `H` to the buyer. Zero for a short position.
pub fn compound_call_plus_digital<T: Real>(query: &CompoundQuery<T>, env: &MarketEnvironment<T>) -> Result<T> {
    Ok(compound_exposure(&query.option, env, query.default_time, query.threshold, query.min_transfer)?.asset)
}

/// `CP(S0, u, H, X)`: value of receiving `V_u + H - X` at `u` whenever the
/// trade is worth less than `-H` to the buyer. Zero for a long position.
pub fn compound_put_plus_digital<T: Real>(query: &CompoundQuery<T>, env: &MarketEnvironment<T>) -> Result<T> {
    Ok(compound_exposure(&query.option, env, query.default_time, query.threshold, query.min_transfer)?.liability)
}
