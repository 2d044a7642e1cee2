//! Synthetic market data for the ten-year semi-annual swap example.
//!
//! Flat 1.2% continuously compounded OIS discounting, and a linear forward
//! curve `f_j = c + 0.0011 T_j` with `c` chosen so the ten-year forward swap
//! rate is 1.45%. These curves are illustrative, not market data.

use crate::market::{DiscountCurve, ForwardCurve};
use crate::{Real, Result};

pub const OIS_CSV: &str = include_str!("../fixtures/ois.csv");
pub const FORWARDS_CSV: &str = include_str!("../fixtures/forwards.csv");

/// Ten-year forward swap rate on the fixture curves.
pub const SWAP_RATE_10Y: f64 = 0.0145;

pub fn ois_curve<T: Real>() -> Result<DiscountCurve<T>> {
    DiscountCurve::from_reader(OIS_CSV.as_bytes())
}

pub fn forward_curve<T: Real>() -> Result<ForwardCurve<T>> {
    ForwardCurve::from_reader(FORWARDS_CSV.as_bytes())
}
