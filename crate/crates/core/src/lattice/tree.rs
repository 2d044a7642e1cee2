use crate::analytic::black_scholes::black_scholes_raw;
use crate::analytic::EquityOptionSpec;
use crate::collateral::CollateralTerms;
use crate::credit::{survival_probability, PartyCredit};
use crate::cva::funding_spread;
use crate::market::MarketEnvironment;
use crate::{Error, Real, Result};

/// Recombining Cox-Ross-Rubinstein tree (`u d = 1`).
///
/// Drift and discounting follow the rate source step by step, so the
/// risk-neutral probability may differ between time steps.
#[derive(Clone, Debug)]
pub struct BinomialTree<T> {
    dt: T,
    steps: usize,
    up: T,
    down: T,
    probs: Vec<T>,
    discounts: Vec<T>,
    levels: Vec<Vec<T>>,
}

impl<T: Real> BinomialTree<T> {
    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn up(&self) -> T {
        self.up
    }

    pub fn down(&self) -> T {
        self.down
    }

    /// Risk-neutral up probability on step `k` (from `t_k` to `t_{k+1}`).
    pub fn probability(&self, k: usize) -> T {
        self.probs[k]
    }

    /// `P(t_k, t_{k+1})`.
    pub fn discount(&self, k: usize) -> T {
        self.discounts[k]
    }

    pub fn time(&self, k: usize) -> T {
        T::from_count(k) * self.dt
    }

    /// Spots at level `k`, ascending; node `j` has `j` up-moves.
    pub fn level(&self, k: usize) -> &[T] {
        &self.levels[k]
    }

    /// Discounted state prices: `ad[k][j]` is the time-0 value of one unit
    /// paid at node `(k, j)`.
    pub fn state_prices(&self) -> Vec<Vec<T>> {
        let mut out = Vec::with_capacity(self.steps + 1);
        out.push(vec![T::one()]);
        for k in 0..self.steps {
            let prev = &out[k];
            let (p, disc) = (self.probs[k], self.discounts[k]);
            let mut next = vec![T::zero(); k + 2];
            for (j, &a) in prev.iter().enumerate() {
                next[j + 1] += a * p * disc;
                next[j] += a * (T::one() - p) * disc;
            }
            out.push(next);
        }
        out
    }
}

/// Builds a tree with `N = round(T / dt)` steps of length `T / N`.
pub fn build_tree<T: Real>(
    env: &MarketEnvironment<T>,
    spec: &EquityOptionSpec<T>,
    dt: T,
) -> Result<BinomialTree<T>> {
    if !(dt > T::zero() && dt.is_finite()) {
        return Err(Error::Argument(format!("tree step {dt} must be positive")));
    }
    let ratio = spec.maturity / dt;
    let n = ratio.round();
    if n < T::one() || (ratio - n).abs() > T::lit(1e-6) * n.max(T::one()) {
        return Err(Error::Argument(format!(
            "maturity {} is not a whole number of steps of {dt}",
            spec.maturity
        )));
    }
    let steps = n.as_f64() as usize;
    let dt = spec.maturity / n;
    let up = (env.volatility() * dt.sqrt()).exp();
    let down = up.recip();
    let mut probs = Vec::with_capacity(steps);
    let mut discounts = Vec::with_capacity(steps);
    for k in 0..steps {
        let t0 = T::from_count(k) * dt;
        let t1 = T::from_count(k + 1) * dt;
        let disc = env.discount_between(t0, t1);
        let growth = env.carry_between(t0, t1) / disc;
        let p = (growth - down) / (up - down);
        if !(p > T::zero() && p < T::one()) {
            return Err(Error::TreeProbability { p: p.as_f64() });
        }
        probs.push(p);
        discounts.push(disc);
    }
    let levels = (0..=steps)
        .map(|k| {
            (0..=k)
                .map(|j| spec.spot * up.powi(2 * j as i32 - k as i32))
                .collect()
        })
        .collect();
    Ok(BinomialTree { dt, steps, up, down, probs, discounts, levels })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeOptions {
    /// Replace the last step by Black-Scholes values (smoothed tree). Removes
    /// the odd/even oscillation of the plain tree at the strike.
    pub terminal_smoothing: bool,
}

impl Default for TreeOptions {
    fn default() -> Self {
        Self { terminal_smoothing: true }
    }
}

/// Node values and hedge ratios from backward induction.
#[derive(Clone, Debug)]
pub struct NodeField<T> {
    /// `values[k][j]`: value to the buyer at node `(k, j)` in time-`t_k`
    /// currency.
    pub values: Vec<Vec<T>>,
    /// `deltas[k][j]` for `k < N`: `(V_up - V_down) / (S_up - S_down)`.
    pub deltas: Vec<Vec<T>>,
    /// Collateral per node, once attached.
    pub collateral: Option<Vec<Vec<T>>>,
    /// Survival-weighted margin funding accruals `(B, C)` per node, in
    /// discounted units, under the replication identity `β̂_B = V̂`.
    pub funding_accruals: Option<Vec<Vec<(T, T)>>>,
}

impl<T: Real> NodeField<T> {
    pub fn root_value(&self) -> T {
        self.values[0][0]
    }

    pub fn root_delta(&self) -> T {
        self.deltas[0][0]
    }

    /// Adds collateral and the margin funding accruals implied by
    /// `β̂_B(t) = V̂_t` and `β̂_C(t) = -V₀⁻`.
    pub fn attach_margin_accruals(
        &mut self,
        tree: &BinomialTree<T>,
        env: &MarketEnvironment<T>,
        credit_b: &PartyCredit<T>,
        credit_c: &PartyCredit<T>,
        terms: &CollateralTerms<T>,
    ) {
        let x_b = funding_spread(credit_b, env);
        let x_c = funding_spread(credit_c, env);
        let beta_c = self.root_value().neg_part().neg();
        let (rb, rc) = (credit_b.recovery(), credit_c.recovery());
        let mut coll = Vec::with_capacity(self.values.len());
        let mut acc = Vec::with_capacity(self.values.len());
        for (k, vals) in self.values.iter().enumerate() {
            let t = tree.time(k);
            let p0 = env.discount(t);
            let surv = survival_probability(credit_b, credit_c, t);
            let (xb, xc) = (x_b.value_at(t), x_c.value_at(t));
            let cs: Vec<T> = vals.iter().map(|&v| terms.collateral_at(v, t, rb, rc)).collect();
            let a = vals
                .iter()
                .zip(&cs)
                .map(|(&v, &c)| {
                    let b = xb * (p0 * (v - c)).neg_part() * surv;
                    let cc = xc * (beta_c + p0 * c).neg_part() * surv;
                    (b, cc)
                })
                .collect();
            coll.push(cs);
            acc.push(a);
        }
        self.collateral = Some(coll);
        self.funding_accruals = Some(acc);
    }
}

/// Risk-free backward induction with the default options.
pub fn tree_price_and_delta<T: Real>(
    tree: &BinomialTree<T>,
    spec: &EquityOptionSpec<T>,
    env: &MarketEnvironment<T>,
) -> NodeField<T> {
    tree_price_and_delta_with(tree, spec, env, TreeOptions::default())
}

pub fn tree_price_and_delta_with<T: Real>(
    tree: &BinomialTree<T>,
    spec: &EquityOptionSpec<T>,
    env: &MarketEnvironment<T>,
    options: TreeOptions,
) -> NodeField<T> {
    let n = tree.steps;
    let mut values: Vec<Vec<T>> = vec![Vec::new(); n + 1];
    values[n] = tree.levels[n].iter().map(|&s| spec.payoff(s)).collect();
    let sign = spec.position.sign::<T>();
    for k in (0..n).rev() {
        let level = if options.terminal_smoothing && k + 1 == n {
            let t = tree.time(k);
            let carry = env.carry_between(t, spec.maturity);
            let vol = env.volatility() * tree.dt.sqrt();
            tree.levels[k]
                .iter()
                .map(|&s| sign * black_scholes_raw(spec.kind, s, spec.strike, tree.discounts[k], carry, vol).0)
                .collect()
        } else {
            let (p, disc) = (tree.probs[k], tree.discounts[k]);
            let next = &values[k + 1];
            (0..=k)
                .map(|j| disc * (p * next[j + 1] + (T::one() - p) * next[j]))
                .collect()
        };
        values[k] = level;
    }
    let deltas = (0..n)
        .map(|k| {
            let (v, s) = (&values[k + 1], &tree.levels[k + 1]);
            (0..=k).map(|j| (v[j + 1] - v[j]) / (s[j + 1] - s[j])).collect()
        })
        .collect();
    NodeField { values, deltas, collateral: None, funding_accruals: None }
}
