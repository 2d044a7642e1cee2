//! Market parameters, curves and configuration loading.

mod config;
mod curve;

pub use config::{
    load_market_config, parse_market_config, validate_market_config, ConfigIssue, MarketConfig,
    SwapTrade, TradeSpec, TradeType,
};
pub use curve::{load_curve, Curve, CurveKind, DiscountCurve, ForwardCurve};

use crate::{Error, Real, Result};

/// Source of risk-free discounting.
#[derive(Clone, Debug, PartialEq)]
pub enum RateSource<T> {
    /// Flat continuously-compounded rate.
    Flat(T),
    Curve(DiscountCurve<T>),
}

/// Risk-free rate, dividend yield, volatility and funding spreads.
#[derive(Clone, Debug, PartialEq)]
pub struct MarketEnvironment<T> {
    rate: RateSource<T>,
    dividend_yield: T,
    volatility: T,
    repo_spread: T,
    market_funding_spread: T,
}

impl<T: Real> MarketEnvironment<T> {
    pub fn new(rate: RateSource<T>, dividend_yield: T, volatility: T) -> Result<Self> {
        if let RateSource::Flat(r) = &rate {
            if !r.is_finite() {
                return Err(Error::invalid("r", "must be finite"));
            }
        }
        if !dividend_yield.is_finite() {
            return Err(Error::invalid("q", "must be finite"));
        }
        if !(volatility.is_finite() && volatility > T::zero()) {
            return Err(Error::invalid("sigma", format!("must be positive, got {volatility}")));
        }
        Ok(Self {
            rate,
            dividend_yield,
            volatility,
            repo_spread: T::zero(),
            market_funding_spread: T::zero(),
        })
    }

    pub fn flat(rate: T, dividend_yield: T, volatility: T) -> Result<Self> {
        Self::new(RateSource::Flat(rate), dividend_yield, volatility)
    }

    /// Sets the repo spread `λ_S >= 0`.
    pub fn with_repo_spread(mut self, lambda_s: T) -> Result<Self> {
        if !(lambda_s.is_finite() && lambda_s >= T::zero()) {
            return Err(Error::invalid("lambda_S", format!("must be non-negative, got {lambda_s}")));
        }
        self.repo_spread = lambda_s;
        Ok(self)
    }

    /// Sets the market-wide funding spread `λ_M >= 0`.
    pub fn with_market_funding_spread(mut self, lambda_m: T) -> Result<Self> {
        if !(lambda_m.is_finite() && lambda_m >= T::zero()) {
            return Err(Error::invalid("lambda_M", format!("must be non-negative, got {lambda_m}")));
        }
        self.market_funding_spread = lambda_m;
        Ok(self)
    }

    pub fn with_volatility(mut self, sigma: T) -> Result<Self> {
        if !(sigma.is_finite() && sigma > T::zero()) {
            return Err(Error::invalid("sigma", format!("must be positive, got {sigma}")));
        }
        self.volatility = sigma;
        Ok(self)
    }

    /// Replaces the rate source (a curve replaces any flat rate).
    pub fn with_rate(mut self, rate: RateSource<T>) -> Self {
        self.rate = rate;
        self
    }

    pub fn rate(&self) -> &RateSource<T> {
        &self.rate
    }

    pub fn dividend_yield(&self) -> T {
        self.dividend_yield
    }

    pub fn volatility(&self) -> T {
        self.volatility
    }

    pub fn repo_spread(&self) -> T {
        self.repo_spread
    }

    pub fn market_funding_spread(&self) -> T {
        self.market_funding_spread
    }

    /// `P(0, t)`.
    pub fn discount(&self, t: T) -> T {
        match &self.rate {
            RateSource::Flat(r) => (-*r * t.pos()).exp(),
            RateSource::Curve(c) => c.discount_factor(t),
        }
    }

    /// `P(t0, t1) = P(0, t1) / P(0, t0)` under deterministic rates.
    pub fn discount_between(&self, t0: T, t1: T) -> T {
        match &self.rate {
            RateSource::Flat(r) => (-*r * (t1 - t0)).exp(),
            RateSource::Curve(c) => (c.log_discount(t1) - c.log_discount(t0)).exp(),
        }
    }

    /// Dividend discount `e^{-q (t1 - t0)}`.
    pub fn carry_between(&self, t0: T, t1: T) -> T {
        (-self.dividend_yield * (t1 - t0)).exp()
    }

    /// Copy with the dividend yield replaced, used for repo-adjusted pricing.
    pub(crate) fn with_dividend_yield(&self, q: T) -> Self {
        Self { dividend_yield: q, ..self.clone() }
    }
}
