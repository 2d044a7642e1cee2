//! Vanilla swaps under multi-curve discounting: annuities, forward swap
//! rates, Black swaptions and uncollateralized CVA/DVA.
//!
//! Grid indices follow `T_0 < T_1 < ... < T_n`; period `j` runs from `T_j`
//! to `T_{j+1}` and pays at `T_{j+1}`.

use crate::analytic::OptionKind;
use crate::credit::{default_in_interval_prob, Party, PartyCredit};
use crate::market::{DiscountCurve, ForwardCurve, SwapTrade};
use crate::math::{illinois, norm_cdf};
use crate::{Error, Real, Result};

/// Payer pays fixed and receives floating.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SwapDirection {
    #[default]
    Payer,
    Receiver,
}

impl SwapDirection {
    fn sign<T: Real>(self) -> T {
        match self {
            Self::Payer => T::one(),
            Self::Receiver => -T::one(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwapSpec<T> {
    grid: Vec<T>,
    pub fixed_rate: T,
    pub direction: SwapDirection,
    pub notional: T,
}

impl<T: Real> SwapSpec<T> {
    pub fn new(grid: Vec<T>, fixed_rate: T, direction: SwapDirection, notional: T) -> Result<Self> {
        check_grid(&grid)?;
        if !fixed_rate.is_finite() {
            return Err(Error::invalid("swap_rate", "must be finite"));
        }
        if !(notional.is_finite() && notional > T::zero()) {
            return Err(Error::invalid("notional", "must be positive"));
        }
        Ok(Self { grid, fixed_rate, direction, notional })
    }

    /// Grid `0, 1/freq, ..., tenor`.
    pub fn uniform(tenor_years: T, pay_freq: u32, fixed_rate: T, direction: SwapDirection, notional: T) -> Result<Self> {
        let trade = SwapTrade { tenor_years, pay_freq, fixed_rate: Some(fixed_rate), direction, notional };
        Self::from_trade(&trade, fixed_rate)
    }

    pub fn from_trade(trade: &SwapTrade<T>, fixed_rate: T) -> Result<Self> {
        Self::new(trade.grid(), fixed_rate, trade.direction, trade.notional)
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn periods(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn with_fixed_rate(&self, fixed_rate: T) -> Self {
        Self { fixed_rate, ..self.clone() }
    }
}

fn check_grid<T: Real>(grid: &[T]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::Argument("swap grid needs at least two dates".into()));
    }
    if !(grid[0] >= T::zero()) {
        return Err(Error::Argument(format!("swap grid starts at {} < 0", grid[0])));
    }
    for w in grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Argument(format!("swap grid not strictly ascending at {} -> {}", w[0], w[1])));
        }
    }
    Ok(())
}

fn check_range<T: Real>(grid: &[T], m: usize, n: usize) -> Result<()> {
    if !(m < n && n < grid.len()) {
        return Err(Error::Argument(format!(
            "need 0 <= m < n <= {}, got m = {m}, n = {n}",
            grid.len().saturating_sub(1)
        )));
    }
    Ok(())
}

/// `A_{m,n}(0) = Σ_{j=m}^{n-1} ΔT_j P(0, T_{j+1})`.
pub fn annuity<T: Real>(discount: &DiscountCurve<T>, grid: &[T], m: usize, n: usize) -> Result<T> {
    check_range(grid, m, n)?;
    Ok((m..n).fold(T::zero(), |acc, j| acc + (grid[j + 1] - grid[j]) * discount.discount_factor(grid[j + 1])))
}

/// `s_{m,n}(0)`: annuity-weighted average of the period forwards.
pub fn forward_swap_rate<T: Real>(
    discount: &DiscountCurve<T>,
    forwards: &ForwardCurve<T>,
    grid: &[T],
    m: usize,
    n: usize,
) -> Result<T> {
    let a = annuity(discount, grid, m, n)?;
    let mut float = T::zero();
    for j in m..n {
        let f = forwards.forward(grid[j], grid[j + 1])?;
        float += (grid[j + 1] - grid[j]) * discount.discount_factor(grid[j + 1]) * f;
    }
    Ok(float / a)
}

/// `V_e(0) = ±N A_{0,n} (s_{0,n} - s)`, positive for a payer when the
/// forward swap rate exceeds the fixed rate.
pub fn swap_value<T: Real>(spec: &SwapSpec<T>, discount: &DiscountCurve<T>, forwards: &ForwardCurve<T>) -> Result<T> {
    let n = spec.periods();
    let a = annuity(discount, &spec.grid, 0, n)?;
    let s = forward_swap_rate(discount, forwards, &spec.grid, 0, n)?;
    Ok(spec.direction.sign::<T>() * spec.notional * a * (s - spec.fixed_rate))
}

/// Black formula on a swap rate with unit annuity: `F Φ(d₁) - K Φ(d₂)` for
/// a payer (call), `K Φ(-d₂) - F Φ(-d₁)` for a receiver (put).
pub fn black_formula<T: Real>(kind: OptionKind, forward: T, strike: T, vol: T, expiry: T) -> T {
    let total = vol * expiry.pos().sqrt();
    if total <= T::zero() || forward <= T::zero() || strike <= T::zero() {
        let intrinsic = forward - strike;
        return match kind {
            OptionKind::Call => intrinsic.pos(),
            OptionKind::Put => (-intrinsic).pos(),
        };
    }
    let d1 = (forward / strike).ln() / total + total * T::lit(0.5);
    let d2 = d1 - total;
    match kind {
        OptionKind::Call => forward * norm_cdf(d1) - strike * norm_cdf(d2),
        OptionKind::Put => strike * norm_cdf(-d2) - forward * norm_cdf(-d1),
    }
}

/// Payer (`Call`) or receiver (`Put`) swaption on `(T_m, T_n)` expiring at
/// `T_m`, per unit notional.
#[allow(clippy::too_many_arguments)]
pub fn black_swaption<T: Real>(
    kind: OptionKind,
    discount: &DiscountCurve<T>,
    forwards: &ForwardCurve<T>,
    grid: &[T],
    m: usize,
    n: usize,
    strike: T,
    vol: T,
) -> Result<T> {
    if !(vol.is_finite() && vol > T::zero()) {
        return Err(Error::invalid("sigma", "swaption volatility must be positive"));
    }
    let a = annuity(discount, grid, m, n)?;
    let s = forward_swap_rate(discount, forwards, grid, m, n)?;
    Ok(a * black_formula(kind, s, strike, vol, grid[m]))
}

/// Uncollateralized default adjustments of a swap, seen by `B`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SwapAdjustments<T> {
    /// `(R_B - 1) Σ_j E[V̂_e⁺(T_j)] P(T_{j-1} <= τ = τ_B <= T_j)`, `<= 0`.
    pub dva: T,
    /// `(1 - R_C) Σ_j E[V̂_e⁻(T_j)] P(T_{j-1} <= τ = τ_C <= T_j)`, `>= 0`.
    pub cva: T,
}

/// DVA and CVA with defaults observed at the period ends. The positive
/// exposure at `T_j` is a payer swaption on `(T_j, T_n)` for a payer swap
/// and a receiver swaption for a receiver swap; the `j = n` term is zero.
pub fn swap_dva_cva<T: Real>(
    spec: &SwapSpec<T>,
    discount: &DiscountCurve<T>,
    forwards: &ForwardCurve<T>,
    vol: T,
    credit_b: &PartyCredit<T>,
    credit_c: &PartyCredit<T>,
) -> Result<SwapAdjustments<T>> {
    if !(vol.is_finite() && vol > T::zero()) {
        return Err(Error::invalid("sigma", "swaption volatility must be positive"));
    }
    let (pos_kind, neg_kind) = match spec.direction {
        SwapDirection::Payer => (OptionKind::Call, OptionKind::Put),
        SwapDirection::Receiver => (OptionKind::Put, OptionKind::Call),
    };
    let grid = &spec.grid;
    let n = spec.periods();
    let (lb, lc) = (credit_b.loss_rate(), credit_c.loss_rate());
    let (mut dva, mut cva) = (T::zero(), T::zero());
    for j in 1..n {
        let pb = if lb == T::zero() {
            T::zero()
        } else {
            default_in_interval_prob(Party::B, credit_b, credit_c, grid[j - 1], grid[j])?
        };
        let pc = if lc == T::zero() {
            T::zero()
        } else {
            default_in_interval_prob(Party::C, credit_b, credit_c, grid[j - 1], grid[j])?
        };
        if pb != T::zero() {
            dva += pb * black_swaption(pos_kind, discount, forwards, grid, j, n, spec.fixed_rate, vol)?;
        }
        if pc != T::zero() {
            cva += pc * black_swaption(neg_kind, discount, forwards, grid, j, n, spec.fixed_rate, vol)?;
        }
    }
    Ok(SwapAdjustments {
        dva: -lb * spec.notional * dva + T::zero(),
        cva: lc * spec.notional * cva + T::zero(),
    })
}

/// Result of [`adjusted_swap_rate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdjustedRate<T> {
    pub rate: T,
    /// `V_e + DVA + CVA` at `rate`.
    pub residual: T,
    pub iterations: usize,
}

/// Fixed rate making `V_e(0) + DVA + CVA = 0`, by Illinois on a bracket
/// around the forward swap rate. `template.fixed_rate` is ignored.
pub fn adjusted_swap_rate<T: Real>(
    template: &SwapSpec<T>,
    discount: &DiscountCurve<T>,
    forwards: &ForwardCurve<T>,
    vol: T,
    credit_b: &PartyCredit<T>,
    credit_c: &PartyCredit<T>,
) -> Result<AdjustedRate<T>> {
    let n = template.periods();
    let s0 = forward_swap_rate(discount, forwards, &template.grid, 0, n)?;
    let total = |s: T| -> Result<T> {
        let spec = template.with_fixed_rate(s);
        let adj = swap_dva_cva(&spec, discount, forwards, vol, credit_b, credit_c)?;
        Ok(swap_value(&spec, discount, forwards)? + adj.dva + adj.cva)
    };
    let tol = T::lit(1e-10) * template.notional;
    let f0 = total(s0)?;
    if f0.abs() <= tol {
        return Ok(AdjustedRate { rate: s0, residual: f0, iterations: 0 });
    }
    let width = s0.abs().max(T::lit(0.01));
    let (lo, hi) = (s0 - width, s0 + width);
    let (flo, fhi) = (total(lo)?, total(hi)?);
    if flo.signum() == fhi.signum() {
        return Err(Error::NoBracket(format!(
            "adjusted swap rate: V(s) has the same sign at {lo} and {hi}"
        )));
    }
    let root = illinois(total, (lo, flo), (hi, fhi), tol, 200)?;
    if !root.converged {
        return Err(Error::NoConvergence {
            what: "adjusted swap rate",
            iterations: root.iterations,
            residual: root.residual.as_f64(),
        });
    }
    Ok(AdjustedRate { rate: root.x, residual: root.residual, iterations: root.iterations })
}
