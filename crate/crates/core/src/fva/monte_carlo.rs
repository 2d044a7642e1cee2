use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::margin::{HedgeAccounting, MarginState, StepGrid};
use crate::analytic::black_scholes::black_scholes_raw;
use crate::analytic::EquityOptionSpec;
use crate::collateral::{CollateralTerms, MtmConvention};
use crate::credit::PartyCredit;
use crate::cva::funding_spread;
use crate::market::MarketEnvironment;
use crate::math::pairwise_sum;
use crate::{Error, Real, Result};

/// When the collateral is re-set to the rule's value.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum MarginRevision<T> {
    /// Every path step.
    #[default]
    Continuous,
    /// On the given dates (snapped to the path grid); time 0 is implicit.
    Dates(Vec<T>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct McConfig<T> {
    pub n_paths: usize,
    pub dt: T,
    pub seed: u64,
    pub hedge: HedgeAccounting,
    pub revision: MarginRevision<T>,
}

impl<T: Real> Default for McConfig<T> {
    fn default() -> Self {
        Self {
            n_paths: 100_000,
            dt: T::lit(1.0 / 52.0),
            seed: 42,
            hedge: HedgeAccounting::Continuous,
            revision: MarginRevision::Continuous,
        }
    }
}

/// Monte Carlo estimates of the margining adjustments.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FvaEstimate<T> {
    /// `-E[∫ 1{u<=τ} x_B [β̂_B - ĉ]⁻ du] >= 0`.
    pub fva_b: T,
    /// `E[∫ 1{u<=τ} x_C [β̂_C + ĉ]⁻ du] <= 0`.
    pub fva_c: T,
    pub se_b: T,
    pub se_c: T,
}

/// Number of steps of length `dt` in `maturity`, if it divides exactly.
pub(crate) fn whole_steps<T: Real>(maturity: T, dt: T) -> Result<usize> {
    if !(dt > T::zero()) {
        return Err(Error::Argument(format!("time step {dt} must be positive")));
    }
    let ratio = maturity / dt;
    let n = ratio.round();
    if n < T::one() || (ratio - n).abs() > T::lit(1e-9) * n {
        return Err(Error::Argument(format!("time step {dt} does not divide maturity {maturity}")));
    }
    Ok(n.as_f64() as usize)
}

/// Pre-computed inputs shared by all paths.
struct Simulation<'a, T> {
    spec: &'a EquityOptionSpec<T>,
    terms: &'a CollateralTerms<T>,
    grid: StepGrid<T>,
    times: Vec<T>,
    drift: Vec<T>,
    vol_step: T,
    df_to_t: Vec<T>,
    carry_to_t: Vec<T>,
    total_vol: Vec<T>,
    revise: Vec<bool>,
    recovery: (T, T),
    hedge: HedgeAccounting,
    seed: u64,
}

impl<T: Real> Simulation<'_, T> {
    fn value_delta(&self, k: usize, s: T) -> (T, T) {
        let sign = self.spec.position.sign::<T>();
        let (v, d) = black_scholes_raw(
            self.spec.kind,
            s,
            self.spec.strike,
            self.df_to_t[k],
            self.carry_to_t[k],
            self.total_vol[k],
        );
        (sign * v, sign * d)
    }

    fn run_path(&self, path: u64, v0: T) -> (T, T) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(path);
        let n = self.times.len() - 1;
        let mut state = MarginState::initial(v0);
        let mut s = self.spec.spot;
        let (mut v, mut d) = self.value_delta(0, s);
        let (rb, rc) = self.recovery;
        let mut held = self.terms.collateral_at(v, T::zero(), rb, rc);
        for k in 0..n {
            if self.revise[k] {
                held = self.terms.collateral_at(v, self.times[k], rb, rc);
            }
            let z: f64 = rng.sample(StandardNormal);
            let s_next = s * (self.drift[k] + self.vol_step * T::lit(z)).exp();
            let (v_next, d_next) = if k + 1 == n {
                (self.spec.payoff(s_next), T::zero())
            } else {
                self.value_delta(k + 1, s_next)
            };
            self.grid.step(&mut state, k, self.hedge, (s, s_next), (v, v_next), d, held);
            s = s_next;
            v = v_next;
            d = d_next;
        }
        (state.accrued_cost_b, state.accrued_cost_c)
    }
}

fn mean_and_se<T: Real>(xs: &[T]) -> (T, T) {
    let n = T::from_count(xs.len());
    let mean = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, T::zero());
    }
    let sq: Vec<T> = xs.iter().map(|&x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (n - T::one());
    (mean, (var / n).sqrt())
}

/// Monte Carlo estimate of `FVA_B` and `FVA_C` for initial premium `v0`.
///
/// Paths are exact lognormal steps on a grid of `config.dt`; the value,
/// delta and collateral along them come from the risk-free value surface.
/// Path `i` draws from its own ChaCha stream, so the result depends only on
/// `(seed, n_paths)` and not on the number of worker threads.
pub fn fva_bc<T: Real>(
    spec: &EquityOptionSpec<T>,
    env: &MarketEnvironment<T>,
    credit_b: &PartyCredit<T>,
    credit_c: &PartyCredit<T>,
    terms: &CollateralTerms<T>,
    v0: T,
    config: &McConfig<T>,
) -> Result<FvaEstimate<T>> {
    if terms.mtm_convention() == MtmConvention::PreDefault {
        return Err(Error::Argument(
            "margining costs are simulated on the risk-free MTM; use the pre-default solver".into(),
        ));
    }
    let n = whole_steps(spec.maturity, config.dt)?;
    if config.n_paths == 0 {
        return Err(Error::Argument("need at least one path".into()));
    }
    let xb = funding_spread(credit_b, env);
    let xc = funding_spread(credit_c, env);
    if xb.all(|x| x == T::zero()) && xc.all(|x| x == T::zero()) {
        return Ok(FvaEstimate::default());
    }
    let sim = prepare(spec, env, credit_b, credit_c, terms, config, n);
    let costs: Vec<(T, T)> = (0..config.n_paths as u64)
        .into_par_iter()
        .map(|i| sim.run_path(i, v0))
        .collect();
    let (bs, cs): (Vec<T>, Vec<T>) = costs.into_iter().unzip();
    let (mb, se_b) = mean_and_se(&bs);
    let (mc, se_c) = mean_and_se(&cs);
    Ok(FvaEstimate { fva_b: -mb + T::zero(), fva_c: mc + T::zero(), se_b, se_c })
}

fn prepare<'a, T: Real>(
    spec: &'a EquityOptionSpec<T>,
    env: &MarketEnvironment<T>,
    credit_b: &PartyCredit<T>,
    credit_c: &PartyCredit<T>,
    terms: &'a CollateralTerms<T>,
    config: &McConfig<T>,
    n: usize,
) -> Simulation<'a, T> {
    let dt = spec.maturity / T::from_count(n);
    let times: Vec<T> = (0..=n).map(|k| T::from_count(k) * dt).collect();
    let sigma = env.volatility();
    let half_var = sigma * sigma * T::lit(0.5) * dt;
    let drift = (0..n)
        .map(|k| {
            let growth = env.carry_between(times[k], times[k + 1]) / env.discount_between(times[k], times[k + 1]);
            growth.ln() - half_var
        })
        .collect();
    let big_t = spec.maturity;
    let mut revise = vec![matches!(config.revision, MarginRevision::Continuous); n + 1];
    revise[0] = true;
    if let MarginRevision::Dates(dates) = &config.revision {
        for &d in dates {
            let k = (d / dt).round().as_f64();
            if k >= 0.0 && (k as usize) <= n {
                revise[k as usize] = true;
            }
        }
    }
    Simulation {
        spec,
        terms,
        grid: StepGrid::new(&times, env, credit_b, credit_c),
        drift,
        vol_step: sigma * dt.sqrt(),
        df_to_t: times.iter().map(|&t| env.discount_between(t, big_t)).collect(),
        carry_to_t: times.iter().map(|&t| env.carry_between(t, big_t)).collect(),
        total_vol: times.iter().map(|&t| sigma * (big_t - t).pos().sqrt()).collect(),
        times,
        revise,
        recovery: (credit_b.recovery(), credit_c.recovery()),
        hedge: config.hedge,
        seed: config.seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (EquityOptionSpec<f64>, MarketEnvironment<f64>, PartyCredit<f64>, PartyCredit<f64>) {
        (
            EquityOptionSpec::call(100.0, 100.0, 1.0).unwrap(),
            MarketEnvironment::flat(0.03, 0.0, 0.2).unwrap().with_repo_spread(0.0075).unwrap(),
            PartyCredit::constant(0.02, 0.4).unwrap(),
            PartyCredit::constant(0.015, 0.4).unwrap(),
        )
    }

    #[test]
    fn zero_spreads_give_zero() {
        let (spec, env, _, _) = setup();
        let b = PartyCredit::constant(0.0, 0.4).unwrap();
        let r = fva_bc(&spec, &env, &b, &b, &CollateralTerms::uncollateralized(), 9.4, &McConfig::default()).unwrap();
        assert_eq!(r, FvaEstimate::default());
    }

    #[test]
    fn rejects_non_dividing_step() {
        let (spec, env, b, c) = setup();
        let cfg = McConfig { dt: 0.3, ..McConfig::default() };
        assert!(fva_bc(&spec, &env, &b, &c, &CollateralTerms::uncollateralized(), 9.4, &cfg).is_err());
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let (spec, env, b, c) = setup();
        let terms = CollateralTerms::threshold(4.0, 2.0).unwrap();
        let cfg = McConfig { n_paths: 2000, ..McConfig::default() };
        let a = fva_bc(&spec, &env, &b, &c, &terms, 9.0, &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let single = pool.install(|| fva_bc(&spec, &env, &b, &c, &terms, 9.0, &cfg).unwrap());
        assert_eq!(a, single);
        assert_eq!(a.fva_c, 0.0);
    }

    #[test]
    fn underfunded_premium_costs_the_seller() {
        let (spec, env, b, c) = setup();
        let terms = CollateralTerms::threshold(4.0, 2.0).unwrap();
        let cfg = McConfig { n_paths: 2000, ..McConfig::default() };
        let rich = fva_bc(&spec, &env, &b, &c, &terms, 10.0, &cfg).unwrap();
        let poor = fva_bc(&spec, &env, &b, &c, &terms, 2.0, &cfg).unwrap();
        assert!(poor.fva_b > rich.fva_b);
        assert!(rich.fva_b >= 0.0);
    }
}
