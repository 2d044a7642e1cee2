//! Closed-form pricers: Black-Scholes, repo-adjusted value, and the
//! compound-option-plus-digital exposures used by the CVA integrals.

pub(crate) mod black_scholes;
mod compound;

pub use black_scholes::{
    black_scholes_price, black_scholes_value_at, bs_delta, bs_delta_at, repo_adjusted_value,
};
pub use compound::{
    compound_call_plus_digital, compound_put_plus_digital, critical_stock, CompoundExposure,
};
pub(crate) use compound::compound_exposure;

pub use crate::math::bivariate_normal_cdf;

use crate::{Error, Real, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptionKind {
    Call,
    Put,
}

/// Side of the trade as seen by the buyer `C`.
///
/// `Long` is the conventional case where `C` holds the option (an asset
/// to `C`); `Short` flips every value so the trade is a liability.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Position {
    #[default]
    Long,
    Short,
}

impl Position {
    pub fn sign<T: Real>(self) -> T {
        match self {
            Position::Long => T::one(),
            Position::Short => -T::one(),
        }
    }
}

/// European equity option.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquityOptionSpec<T> {
    pub spot: T,
    pub strike: T,
    pub maturity: T,
    pub kind: OptionKind,
    pub position: Position,
}

impl<T: Real> EquityOptionSpec<T> {
    pub fn new(spot: T, strike: T, maturity: T, kind: OptionKind) -> Result<Self> {
        for (key, v) in [("S0", spot), ("K", strike), ("T", maturity)] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::invalid(key, format!("must be positive, got {v}")));
            }
        }
        Ok(Self { spot, strike, maturity, kind, position: Position::Long })
    }

    pub fn call(spot: T, strike: T, maturity: T) -> Result<Self> {
        Self::new(spot, strike, maturity, OptionKind::Call)
    }

    pub fn put(spot: T, strike: T, maturity: T) -> Result<Self> {
        Self::new(spot, strike, maturity, OptionKind::Put)
    }

    pub fn with_position(mut self, position: Position) -> Self {
        self.position = position;
        self
    }

    pub fn with_spot(mut self, spot: T) -> Self {
        self.spot = spot;
        self
    }

    /// Signed payoff at maturity for terminal spot `s`.
    pub fn payoff(&self, s: T) -> T {
        let raw = match self.kind {
            OptionKind::Call => (s - self.strike).pos(),
            OptionKind::Put => (self.strike - s).pos(),
        };
        self.position.sign::<T>() * raw
    }

    /// True when the buyer's value is non-negative in every state.
    pub fn is_asset(&self) -> bool {
        self.position == Position::Long
    }
}

/// Default-time query for the compound exposures `CC` and `CP`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompoundQuery<T> {
    pub option: EquityOptionSpec<T>,
    pub default_time: T,
    pub threshold: T,
    pub min_transfer: T,
}

impl<T: Real> CompoundQuery<T> {
    pub fn new(option: EquityOptionSpec<T>, default_time: T, threshold: T, min_transfer: T) -> Result<Self> {
        if !(default_time > T::zero() && default_time < option.maturity) {
            return Err(Error::Argument(format!(
                "default time {default_time} must lie strictly inside (0, {})",
                option.maturity
            )));
        }
        if !(min_transfer >= T::zero() && threshold >= min_transfer) {
            return Err(Error::Argument(format!(
                "need H >= X >= 0, got H = {threshold}, X = {min_transfer}"
            )));
        }
        Ok(Self { option, default_time, threshold, min_transfer })
    }
}
