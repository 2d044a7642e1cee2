//! Default intensities, survival and first-to-default probabilities for the
//! seller `B` and the buyer `C`, assumed independent.

use crate::math::PiecewiseConstant;
use crate::{Error, Real, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Party {
    /// Seller of the derivative.
    B,
    /// Buyer; values are quoted from this party's side.
    C,
}

/// Credit terms of one party.
#[derive(Clone, Debug, PartialEq)]
pub struct PartyCredit<T> {
    intensity: PiecewiseConstant<T>,
    recovery: T,
    funding_spread: Option<T>,
}

impl<T: Real> PartyCredit<T> {
    pub fn new(intensity: PiecewiseConstant<T>, recovery: T) -> Result<Self> {
        if !intensity.all(|l| l >= T::zero()) {
            return Err(Error::Argument("default intensity must be non-negative".into()));
        }
        if !(recovery >= T::zero() && recovery <= T::one()) {
            return Err(Error::Argument(format!("recovery {recovery} outside [0, 1]")));
        }
        Ok(Self { intensity, recovery, funding_spread: None })
    }

    pub fn constant(intensity: T, recovery: T) -> Result<Self> {
        Self::new(PiecewiseConstant::constant(intensity), recovery)
    }

    /// No default risk, full recovery.
    pub fn riskless() -> Self {
        Self {
            intensity: PiecewiseConstant::constant(T::zero()),
            recovery: T::one(),
            funding_spread: None,
        }
    }

    /// Overrides the funding spread that is otherwise `λ L + λ_M`.
    pub fn with_funding_spread(mut self, x: T) -> Result<Self> {
        if !(x.is_finite() && x >= T::zero()) {
            return Err(Error::Argument(format!("funding spread {x} must be non-negative")));
        }
        self.funding_spread = Some(x);
        Ok(self)
    }

    pub fn intensity(&self) -> &PiecewiseConstant<T> {
        &self.intensity
    }

    pub fn intensity_at(&self, t: T) -> T {
        self.intensity.value_at(t)
    }

    /// `∫_0^t λ(s) ds`.
    pub fn cumulative_hazard(&self, t: T) -> T {
        self.intensity.integral(t)
    }

    pub fn recovery(&self) -> T {
        self.recovery
    }

    pub fn loss_rate(&self) -> T {
        T::one() - self.recovery
    }

    pub fn funding_spread_override(&self) -> Option<T> {
        self.funding_spread
    }

    pub fn has_constant_intensity(&self) -> bool {
        self.intensity.is_constant()
    }
}

fn pick<'a, T>(which: Party, b: &'a PartyCredit<T>, c: &'a PartyCredit<T>) -> &'a PartyCredit<T> {
    match which {
        Party::B => b,
        Party::C => c,
    }
}

/// `P(τ_B ∧ τ_C > t) = exp(-∫_0^t (λ_B + λ_C))`.
pub fn survival_probability<T: Real>(b: &PartyCredit<T>, c: &PartyCredit<T>, t: T) -> T {
    let t = t.pos();
    (-(b.cumulative_hazard(t) + c.cumulative_hazard(t))).exp()
}

/// Density of the event that `which` defaults first at `u`.
pub fn first_default_density<T: Real>(
    which: Party,
    b: &PartyCredit<T>,
    c: &PartyCredit<T>,
    u: T,
) -> T {
    let lambda = pick(which, b, c).intensity_at(u);
    if lambda == T::zero() {
        return T::zero();
    }
    lambda * survival_probability(b, c, u)
}

/// Probability that both parties survive to `t0` and `which` then defaults
/// in `(t0, t1]`, counting only its own intensity inside the interval.
pub fn default_in_interval_prob<T: Real>(
    which: Party,
    b: &PartyCredit<T>,
    c: &PartyCredit<T>,
    t0: T,
    t1: T,
) -> Result<T> {
    if !(t0 >= T::zero() && t1 >= t0) {
        return Err(Error::Argument(format!("need 0 <= t0 <= t1, got t0 = {t0}, t1 = {t1}")));
    }
    let p = pick(which, b, c);
    let inside = p.cumulative_hazard(t1) - p.cumulative_hazard(t0);
    if inside == T::zero() {
        return Ok(T::zero());
    }
    Ok(survival_probability(b, c, t0) * -(-inside).exp_m1())
}

/// `P(τ = τ_i <= t)` for the party `which`, in closed form per intensity
/// segment.
pub fn first_default_probability<T: Real>(
    which: Party,
    b: &PartyCredit<T>,
    c: &PartyCredit<T>,
    t: T,
) -> T {
    let mut total = T::zero();
    for (s0, s1, _) in merged_segments(b, c, T::zero(), t) {
        let lb = b.intensity_at(s0);
        let lc = c.intensity_at(s0);
        let li = match which {
            Party::B => lb,
            Party::C => lc,
        };
        let sum = lb + lc;
        if li == T::zero() {
            continue;
        }
        let frac = li / sum;
        total += frac * survival_probability(b, c, s0) * -(-sum * (s1 - s0)).exp_m1();
    }
    total
}

/// `∫_a^b P(τ > u) du`, exact for piecewise-constant intensities.
pub fn integrated_survival<T: Real>(b: &PartyCredit<T>, c: &PartyCredit<T>, a: T, end: T) -> T {
    let mut total = T::zero();
    for (s0, s1, _) in merged_segments(b, c, a, end) {
        let sum = b.intensity_at(s0) + c.intensity_at(s0);
        let width = s1 - s0;
        let piece = if sum == T::zero() {
            width
        } else {
            -(-sum * width).exp_m1() / sum
        };
        total += survival_probability(b, c, s0) * piece;
    }
    total
}

/// Common refinement of both intensity grids on `[a, b]`, as
/// `(start, end, ())` triples.
pub(crate) fn merged_segments<T: Real>(
    b: &PartyCredit<T>,
    c: &PartyCredit<T>,
    start: T,
    end: T,
) -> Vec<(T, T, ())> {
    let mut cuts = breakpoints_in(&[b.intensity(), c.intensity()], start, end);
    cuts.insert(0, start);
    cuts.push(end);
    cuts.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (w[0], w[1], ()))
        .collect()
}

/// Sorted, deduplicated interior breakpoints of several step functions.
pub(crate) fn breakpoints_in<T: Real>(fs: &[&PiecewiseConstant<T>], start: T, end: T) -> Vec<T> {
    let mut cuts: Vec<T> = fs
        .iter()
        .flat_map(|f| f.breaks().iter().copied())
        .filter(|&t| t > start && t < end)
        .collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    cuts.dedup();
    cuts
}
