//! Funding valuation adjustments and the premium equation.

mod margin;
mod monte_carlo;
mod premium;

pub use margin::{evolve_margins, HedgeAccounting, MarginState, PathPoint};
pub use monte_carlo::{fva_bc, FvaEstimate, MarginRevision, McConfig};
pub use premium::{solve_premium, solve_premium_predefault, PremiumProblem, SolverConfig};

use crate::analytic::{bs_delta, EquityOptionSpec};
use crate::credit::{integrated_survival, PartyCredit};
use crate::lattice::{BinomialTree, NodeField};
use crate::market::MarketEnvironment;
use crate::Real;

/// Fair value and its decomposition, seen by the buyer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValuationReport<T> {
    pub v_e: T,
    pub cva_b: T,
    pub cva_c: T,
    pub fva_s: T,
    pub fva_b: T,
    pub fva_c: T,
    pub v0: T,
    pub solver_iterations: usize,
    /// Premium-equation residual at `v0`.
    pub residual: T,
    /// Monte Carlo standard errors of `(FVA_B, FVA_C)`.
    pub mc_standard_errors: (T, T),
    pub quadrature_error_estimate: T,
}

impl<T: Real> ValuationReport<T> {
    /// `V₀ - (V_e + CVA_B + CVA_C + FVA_S + FVA_B + FVA_C)`.
    pub fn identity_gap(&self) -> T {
        self.v0 - (self.v_e + self.cva_b + self.cva_c + self.fva_s + self.fva_b + self.fva_c)
    }
}

/// Repo funding cost of the delta hedge, with the risk-free delta:
/// `FVA_S ≈ λ_S ∫_0^T P(τ > u) du · S₀ ∂V_e/∂S`.
pub fn fva_s<T: Real>(
    spec: &EquityOptionSpec<T>,
    env: &MarketEnvironment<T>,
    credit_b: &PartyCredit<T>,
    credit_c: &PartyCredit<T>,
) -> T {
    let lambda_s = env.repo_spread();
    if lambda_s == T::zero() {
        return T::zero();
    }
    lambda_s * integrated_survival(credit_b, credit_c, T::zero(), spec.maturity) * spec.spot * bs_delta(spec, env)
}

/// `(FVA_B, FVA_C)` from tree accruals attached with
/// [`NodeField::attach_margin_accruals`] (replication identity `β̂_B = V̂`).
pub fn fva_bc_identity<T: Real>(
    tree: &BinomialTree<T>,
    field: &NodeField<T>,
    env: &MarketEnvironment<T>,
) -> Option<(T, T)> {
    let acc = field.funding_accruals.as_ref()?;
    let ad = tree.state_prices();
    let (mut b, mut c) = (T::zero(), T::zero());
    for k in 0..tree.steps() {
        let p0 = env.discount(tree.time(k));
        for (a, &(xb, xc)) in ad[k].iter().zip(&acc[k]) {
            let prob = *a / p0;
            b += prob * xb;
            c += prob * xc;
        }
    }
    let dt = tree.dt();
    Some((-b * dt + T::zero(), c * dt + T::zero()))
}
