//! Cash-collateral rules and default settlement payments.

use crate::credit::Party;
use crate::math::PiecewiseConstant;
use crate::{Error, Real, Result};

/// Reference value used as the mark-to-market at default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MtmConvention {
    /// Risk-free value `V_e`.
    #[default]
    RiskFree,
    /// Pre-default value `V`.
    PreDefault,
}

/// How the collateral amount is derived from the MTM value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Posting {
    /// No CSA: `c⁺ = R_B M⁺`, `c⁻ = R_C M⁻`, i.e. recovery at default.
    Proportional,
    /// CSA with threshold `H` and minimum transfer `X`; full recovery of
    /// the posted amount.
    Threshold,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollateralTerms<T> {
    threshold: PiecewiseConstant<T>,
    min_transfer: PiecewiseConstant<T>,
    mtm_convention: MtmConvention,
    posting: Posting,
}

impl<T: Real> CollateralTerms<T> {
    /// Uncollateralized trade settled with proportional recovery.
    pub fn uncollateralized() -> Self {
        Self {
            threshold: PiecewiseConstant::constant(T::zero()),
            min_transfer: PiecewiseConstant::constant(T::zero()),
            mtm_convention: MtmConvention::RiskFree,
            posting: Posting::Proportional,
        }
    }

    /// CSA with constant threshold and minimum transfer amount.
    pub fn threshold(h: T, x: T) -> Result<Self> {
        Self::time_dependent(PiecewiseConstant::constant(h), PiecewiseConstant::constant(x))
    }

    /// CSA with `H(t)` and `X(t)` as step functions of time.
    pub fn time_dependent(h: PiecewiseConstant<T>, x: PiecewiseConstant<T>) -> Result<Self> {
        let mut probes = vec![T::zero()];
        probes.extend_from_slice(h.breaks());
        probes.extend_from_slice(x.breaks());
        for t in probes {
            let (hv, xv) = (h.value_at(t), x.value_at(t));
            if xv < T::zero() {
                return Err(Error::invalid("X", format!("minimum transfer {xv} must be non-negative")));
            }
            if hv < xv {
                return Err(Error::invalid(
                    "H",
                    format!("threshold {hv} below minimum transfer {xv}; need H >= X"),
                ));
            }
        }
        Ok(Self {
            threshold: h,
            min_transfer: x,
            mtm_convention: MtmConvention::RiskFree,
            posting: Posting::Threshold,
        })
    }

    pub fn with_mtm_convention(mut self, mtm: MtmConvention) -> Self {
        self.mtm_convention = mtm;
        self
    }

    pub fn posting(&self) -> Posting {
        self.posting
    }

    pub fn mtm_convention(&self) -> MtmConvention {
        self.mtm_convention
    }

    pub fn threshold_at(&self, t: T) -> T {
        self.threshold.value_at(t)
    }

    pub fn min_transfer_at(&self, t: T) -> T {
        self.min_transfer.value_at(t)
    }

    pub fn threshold_schedule(&self) -> &PiecewiseConstant<T> {
        &self.threshold
    }

    pub fn min_transfer_schedule(&self) -> &PiecewiseConstant<T> {
        &self.min_transfer
    }

    /// Collateral held at time `t` against MTM value `m`.
    pub fn collateral_at(&self, m: T, t: T, recovery_b: T, recovery_c: T) -> T {
        match self.posting {
            Posting::Proportional => proportional_collateral(m, recovery_b, recovery_c),
            Posting::Threshold => collateral_value(m, self.threshold_at(t), self.min_transfer_at(t)),
        }
    }

    /// Recoveries applied in the CVA integrands: the parties' own under
    /// proportional posting, one under a CSA.
    pub fn effective_recoveries(&self, recovery_b: T, recovery_c: T) -> (T, T) {
        match self.posting {
            Posting::Proportional => (recovery_b, recovery_c),
            Posting::Threshold => (T::one(), T::one()),
        }
    }

    /// `(H, X)` applied in the CVA integrands at time `t`.
    pub fn effective_threshold(&self, t: T) -> (T, T) {
        match self.posting {
            Posting::Proportional => (T::zero(), T::zero()),
            Posting::Threshold => (self.threshold_at(t), self.min_transfer_at(t)),
        }
    }
}

/// Threshold rule: `c⁺ = (M - H + X) 1{M >= H}`, `c⁻ = (M + H - X) 1{M <= -H}`.
pub fn collateral_value<T: Real>(m: T, h: T, x: T) -> T {
    if m >= h && m > T::zero() {
        m - h + x
    } else if m <= -h && m < T::zero() {
        m + h - x
    } else {
        T::zero()
    }
}

/// `c⁺ = R_B M⁺`, `c⁻ = R_C M⁻`.
pub fn proportional_collateral<T: Real>(m: T, recovery_b: T, recovery_c: T) -> T {
    recovery_b * m.pos() + recovery_c * m.neg_part()
}

/// Value to the buyer just after `defaulter` defaults.
///
/// `min{c⁺, M⁺} + M⁻` when the seller defaults and `max{c⁻, M⁻} + M⁺` when
/// the buyer does.
pub fn default_payment<T: Real>(m: T, c: T, defaulter: Party) -> T {
    match defaulter {
        Party::B => c.pos().min(m.pos()) + m.neg_part(),
        Party::C => c.neg_part().max(m.neg_part()) + m.pos(),
    }
}

/// Settlement without collateral: `R_B M⁺ + M⁻` or `R_C M⁻ + M⁺`.
pub fn uncollateralized_payment<T: Real>(m: T, defaulter: Party, recovery: T) -> T {
    match defaulter {
        Party::B => recovery * m.pos() + m.neg_part(),
        Party::C => recovery * m.neg_part() + m.pos(),
    }
}
