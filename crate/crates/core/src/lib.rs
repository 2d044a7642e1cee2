//! Valuation of derivatives under bilateral counterparty default risk and
//! funding risk.
//!
//! The fair value seen by the buyer is decomposed as
//! `V0 = V_e + CVA_B + CVA_C + FVA_S + FVA_B + FVA_C`, with the margining
//! terms depending on `V0` itself. Equity options are handled with
//! continuous margining; vanilla swaps carry CVA/DVA only.
//!
//! Every engine is generic over [`Real`] (`f32` or `f64`). The aliases at
//! the crate root fix the scalar to `f64`, which is what the tolerances in
//! the documentation assume.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod collateral;
pub mod credit;
pub mod cva;
pub mod error;
pub mod fixtures;
pub mod fva;
pub mod lattice;
pub mod market;
pub mod math;
pub mod real;
pub mod swap;

pub use error::{Error, Result};
pub use real::Real;

pub type MarketEnvironment = market::MarketEnvironment<f64>;
pub type DiscountCurve = market::DiscountCurve<f64>;
pub type ForwardCurve = market::ForwardCurve<f64>;
pub type MarketConfig = market::MarketConfig<f64>;
pub type PartyCredit = credit::PartyCredit<f64>;
pub type CollateralTerms = collateral::CollateralTerms<f64>;
pub type EquityOptionSpec = analytic::EquityOptionSpec<f64>;
pub type CompoundQuery = analytic::CompoundQuery<f64>;
pub type BinomialTree = lattice::BinomialTree<f64>;
pub type NodeField = lattice::NodeField<f64>;
pub type CvaResult = cva::CvaResult<f64>;
pub type MarginState = fva::MarginState<f64>;
pub type ValuationReport = fva::ValuationReport<f64>;
pub type SwapSpec = swap::SwapSpec<f64>;
