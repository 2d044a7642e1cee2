use super::monte_carlo::{fva_bc, FvaEstimate, McConfig};
use super::{fva_s, ValuationReport};
use crate::analytic::{black_scholes_price, repo_adjusted_value, EquityOptionSpec};
use crate::collateral::CollateralTerms;
use crate::credit::PartyCredit;
use crate::cva::{cva_equity, CvaResult};
use crate::lattice::{solve_predefault_pde, PdeConfig};
use crate::market::MarketEnvironment;
use crate::math::illinois;
use crate::{Error, Real, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig<T> {
    pub mc: McConfig<T>,
    /// Residual tolerance as a fraction of the spot.
    pub rel_tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self { mc: McConfig::default(), rel_tol: T::lit(1e-8), max_iter: 100 }
    }
}

/// The implicit premium equation
/// `V₀ - FVA_B(V₀) - FVA_C(V₀) = V_e + CVA_B + CVA_C + FVA_S`.
///
/// The margining terms are re-simulated with the same seed at every `V₀`
/// (common random numbers), so the left side is a deterministic function.
pub struct PremiumProblem<'a, T> {
    pub spec: &'a EquityOptionSpec<T>,
    pub env: &'a MarketEnvironment<T>,
    pub credit_b: &'a PartyCredit<T>,
    pub credit_c: &'a PartyCredit<T>,
    pub terms: &'a CollateralTerms<T>,
    pub config: &'a SolverConfig<T>,
}

impl<T: Real> PremiumProblem<'_, T> {
    pub fn margining(&self, v0: T) -> Result<FvaEstimate<T>> {
        fva_bc(self.spec, self.env, self.credit_b, self.credit_c, self.terms, v0, &self.config.mc)
    }

    /// `V₀ - FVA_B(V₀) - FVA_C(V₀)`.
    pub fn lhs(&self, v0: T) -> Result<T> {
        let m = self.margining(v0)?;
        Ok(v0 - m.fva_b - m.fva_c)
    }

    pub fn solve(&self) -> Result<ValuationReport<T>> {
        let v_e = black_scholes_price(self.spec, self.env);
        let cva: CvaResult<T> = cva_equity(self.spec, self.env, self.credit_b, self.credit_c, self.terms)?;
        let fva_s = fva_s(self.spec, self.env, self.credit_b, self.credit_c);
        let rhs = v_e + cva.cva_b + cva.cva_c + fva_s;
        let s0 = self.spec.spot;
        let tol = self.config.rel_tol * s0;
        let g = |v0: T| -> Result<T> { Ok(self.lhs(v0)? - rhs) };

        let mut lo = v_e - s0;
        let mut hi = v_e + s0;
        let mut glo = g(lo)?;
        let mut ghi = g(hi)?;
        if glo.signum() == ghi.signum() && glo != T::zero() && ghi != T::zero() {
            let widen = T::lit(4.0) * s0;
            log::warn!("premium bracket [{lo}, {hi}] has no sign change; widening once");
            lo = v_e - widen;
            hi = v_e + widen;
            glo = g(lo)?;
            ghi = g(hi)?;
        }
        let root = illinois(g, (lo, glo), (hi, ghi), tol, self.config.max_iter)?;
        if !root.converged {
            return Err(Error::NoConvergence {
                what: "premium solver",
                iterations: root.iterations,
                residual: root.residual.as_f64(),
            });
        }
        let v0 = root.x;
        let m = self.margining(v0)?;
        Ok(ValuationReport {
            v_e,
            cva_b: cva.cva_b,
            cva_c: cva.cva_c,
            fva_s,
            fva_b: m.fva_b,
            fva_c: m.fva_c,
            v0,
            solver_iterations: root.iterations,
            residual: root.residual,
            mc_standard_errors: (m.se_b, m.se_c),
            quadrature_error_estimate: cva.quadrature_error_estimate,
        })
    }
}

/// Solves the premium equation with the risk-free MTM convention.
pub fn solve_premium<T: Real>(
    spec: &EquityOptionSpec<T>,
    env: &MarketEnvironment<T>,
    credit_b: &PartyCredit<T>,
    credit_c: &PartyCredit<T>,
    terms: &CollateralTerms<T>,
    config: &SolverConfig<T>,
) -> Result<ValuationReport<T>> {
    PremiumProblem { spec, env, credit_b, credit_c, terms, config }.solve()
}

/// Valuation with the pre-default MTM convention for a long option without
/// collateral: `V₀` from the finite-difference solver, split as
/// `FVA_S = V_s - V_e` and `CVA_B = V₀ - V_s`.
pub fn solve_premium_predefault<T: Real>(
    spec: &EquityOptionSpec<T>,
    env: &MarketEnvironment<T>,
    credit_b: &PartyCredit<T>,
    pde: &PdeConfig,
) -> Result<ValuationReport<T>> {
    let sol = solve_predefault_pde(spec, env, credit_b, pde)?;
    let v_e = black_scholes_price(spec, env);
    let v_s = repo_adjusted_value(spec, env);
    Ok(ValuationReport {
        v_e,
        cva_b: sol.value - v_s,
        cva_c: T::zero(),
        fva_s: v_s - v_e,
        fva_b: T::zero(),
        fva_c: T::zero(),
        v0: sol.value,
        solver_iterations: sol.time_steps_used,
        residual: T::zero(),
        mc_standard_errors: (T::zero(), T::zero()),
        quadrature_error_estimate: T::zero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_reduction() {
        let spec = EquityOptionSpec::call(100.0, 100.0, 1.0).unwrap();
        let env = MarketEnvironment::<f64>::flat(0.03, 0.0, 0.2).unwrap();
        let none = PartyCredit::constant(0.0, 0.4).unwrap();
        let r = solve_premium(&spec, &env, &none, &none, &CollateralTerms::uncollateralized(), &SolverConfig::default())
            .unwrap();
        assert!((r.v0 - r.v_e).abs() <= 1e-6);
        assert_eq!(r.solver_iterations, 1);
        assert_eq!((r.cva_b, r.cva_c, r.fva_s, r.fva_b, r.fva_c), (0.0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn report_satisfies_identity() {
        let spec = EquityOptionSpec::call(100.0, 100.0, 1.0).unwrap();
        let env = MarketEnvironment::<f64>::flat(0.03, 0.0, 0.2).unwrap().with_repo_spread(0.0075).unwrap();
        let b = PartyCredit::constant(0.02, 0.4).unwrap();
        let c = PartyCredit::constant(0.015, 0.4).unwrap();
        let cfg = SolverConfig { mc: McConfig { n_paths: 4000, ..McConfig::default() }, ..SolverConfig::default() };
        let r = solve_premium(&spec, &env, &b, &c, &CollateralTerms::uncollateralized(), &cfg).unwrap();
        assert!(r.identity_gap().abs() <= 1e-6, "{}", r.identity_gap());
        assert!(r.cva_b < 0.0 && r.fva_s > 0.0 && r.fva_b >= 0.0);
    }
}
