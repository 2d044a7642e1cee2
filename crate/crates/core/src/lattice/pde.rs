//! Finite differences for the pre-default value of an asset-only trade.
//!
//! In discounted units and `x = ln Ŝ` the value solves
//!
//! ```text
//! V̂_t + ½σ² V̂_xx + (λ_S - ½σ²) V̂_x - λ_B L_B V̂ = 0,   V̂(T) = f̂
//! ```
//!
//! i.e. the seller's default acts as a killing rate and the repo spread as
//! a drift. Crank-Nicolson in time with Rannacher start-up (implicit half
//! steps) to damp the payoff kink.

use crate::analytic::{repo_adjusted_value, EquityOptionSpec, Position};
use crate::credit::PartyCredit;
use crate::market::MarketEnvironment;
use crate::math::solve_tridiagonal;
use crate::{Error, Real, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PdeConfig {
    pub space_points: usize,
    pub time_steps: usize,
    /// Half-width of the log-spot domain in units of `σ √T`.
    pub width_sd: f64,
    /// Largest `σ² Δt / h²` accepted before the time grid is refined.
    pub max_mesh_ratio: f64,
    /// Crank-Nicolson steps replaced by two implicit half steps each.
    pub rannacher_steps: usize,
}

impl Default for PdeConfig {
    fn default() -> Self {
        Self {
            space_points: 400,
            time_steps: 200,
            width_sd: 6.0,
            max_mesh_ratio: 10.0,
            rannacher_steps: 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PdeSolution<T> {
    pub value: T,
    pub time_steps_used: usize,
    /// True when the time grid was refined to respect `max_mesh_ratio`.
    pub regridded: bool,
}

/// Closed form for the same problem: `e^{-L_B ∫λ_B} V_s(0)`.
pub fn predefault_closed_form<T: Real>(
    spec: &EquityOptionSpec<T>,
    env: &MarketEnvironment<T>,
    credit_b: &PartyCredit<T>,
) -> T {
    let kill = credit_b.loss_rate() * credit_b.cumulative_hazard(spec.maturity);
    (-kill).exp() * repo_adjusted_value(spec, env)
}

/// Pre-default value `V̂₀` of a long option without collateral, settled with
/// proportional recovery.
pub fn solve_predefault_pde<T: Real>(
    spec: &EquityOptionSpec<T>,
    env: &MarketEnvironment<T>,
    credit_b: &PartyCredit<T>,
    config: &PdeConfig,
) -> Result<PdeSolution<T>> {
    if spec.position != Position::Long {
        return Err(Error::Argument(
            "the pre-default solver covers asset-only (long) trades".into(),
        ));
    }
    let m = config.space_points;
    if m < 5 || config.time_steps == 0 {
        return Err(Error::Argument("PDE grid needs at least 5 space points and 1 time step".into()));
    }
    let big_t = spec.maturity;
    let sigma = env.volatility();
    let var = sigma * sigma;
    let lambda_s = env.repo_spread();
    let loss = credit_b.loss_rate();
    let p_t = env.discount(big_t);
    let carry_t = env.carry_between(T::zero(), big_t);
    let half = T::lit(0.5);

    let x0 = spec.spot.ln();
    let width = T::lit(config.width_sd) * sigma * big_t.sqrt();
    let h = (width + width) / T::from_count(m - 1);
    let xs: Vec<T> = (0..m).map(|i| x0 - width + T::from_count(i) * h).collect();

    let mut steps = config.time_steps;
    let ratio = var * big_t / T::from_count(steps) / (h * h);
    let max_ratio = T::lit(config.max_mesh_ratio);
    let regridded = ratio > max_ratio;
    if regridded {
        let needed = (var * big_t / (h * h * max_ratio)).ceil().as_f64() as usize;
        log::warn!(
            "PDE mesh ratio {:.3} exceeds {}; refining time grid from {} to {} steps",
            ratio.as_f64(),
            config.max_mesh_ratio,
            steps,
            needed
        );
        steps = needed;
    }
    let dt = big_t / T::from_count(steps);

    // Deterministic (σ = 0) solution, used for the terminal and boundary values.
    let asymptote = |t: T, x: T| -> T {
        let kill = loss * (credit_b.cumulative_hazard(big_t) - credit_b.cumulative_hazard(t));
        let s_t = (x + lambda_s * (big_t - t)).exp() * carry_t / p_t;
        (-kill).exp() * spec.payoff(s_t) * p_t
    };

    let mut v: Vec<T> = xs.iter().map(|&x| asymptote(big_t, x)).collect();
    let mu = lambda_s - var * half;
    let diff = var * half / (h * h);
    let conv = mu / (h + h);
    let (a_c, c_c) = (diff - conv, diff + conv);

    let n_in = m - 2;
    let mut lower = vec![T::zero(); n_in];
    let mut diag = vec![T::zero(); n_in];
    let mut upper = vec![T::zero(); n_in];
    let mut rhs = vec![T::zero(); n_in];

    // One θ-step from `t_hi` back to `t_lo`.
    let mut step = |v: &mut Vec<T>, t_lo: T, t_hi: T, theta: T| {
        let tau = t_hi - t_lo;
        let k = loss * (credit_b.cumulative_hazard(t_hi) - credit_b.cumulative_hazard(t_lo)) / tau;
        let b_c = -(diff + diff) - k;
        let explicit = (T::one() - theta) * tau;
        let implicit = theta * tau;
        let lo_bc = asymptote(t_lo, xs[0]);
        let hi_bc = asymptote(t_lo, xs[m - 1]);
        for i in 0..n_in {
            let g = i + 1;
            let lv = a_c * v[g - 1] + b_c * v[g] + c_c * v[g + 1];
            rhs[i] = v[g] + explicit * lv;
            lower[i] = -implicit * a_c;
            diag[i] = T::one() - implicit * b_c;
            upper[i] = -implicit * c_c;
        }
        rhs[0] += implicit * a_c * lo_bc;
        rhs[n_in - 1] += implicit * c_c * hi_bc;
        solve_tridiagonal(&lower, &diag, &upper, &mut rhs);
        v[0] = lo_bc;
        v[m - 1] = hi_bc;
        v[1..m - 1].copy_from_slice(&rhs);
    };

    let damped = config.rannacher_steps.min(steps);
    for n in (0..steps).rev() {
        let t_hi = T::from_count(n + 1) * dt;
        let t_lo = T::from_count(n) * dt;
        if steps - n <= damped {
            let t_mid = (t_lo + t_hi) * half;
            step(&mut v, t_mid, t_hi, T::one());
            step(&mut v, t_lo, t_mid, T::one());
        } else {
            step(&mut v, t_lo, t_hi, half);
        }
    }

    // Quadratic interpolation at ln S0 through the three nearest nodes.
    let pos = ((x0 - xs[0]) / h).as_f64();
    let centre = (pos.round() as usize).clamp(1, m - 2);
    let (xa, xb, xc) = (xs[centre - 1], xs[centre], xs[centre + 1]);
    let (va, vb, vc) = (v[centre - 1], v[centre], v[centre + 1]);
    let la = (x0 - xb) * (x0 - xc) / ((xa - xb) * (xa - xc));
    let lb = (x0 - xa) * (x0 - xc) / ((xb - xa) * (xb - xc));
    let lc = (x0 - xa) * (x0 - xb) / ((xc - xa) * (xc - xb));
    Ok(PdeSolution { value: la * va + lb * vb + lc * vc, time_steps_used: steps, regridded })
}
