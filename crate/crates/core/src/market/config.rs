//! `key = value` configuration files.
//!
//! Parsing runs in two phases so that [`validate_market_config`] can report
//! every problem at once: a syntactic pass collects key/value pairs, then a
//! semantic pass converts and checks them, accumulating errors.

use std::collections::BTreeMap;
use std::path::Path;

use super::MarketEnvironment;
use crate::analytic::{EquityOptionSpec, OptionKind, Position};
use crate::collateral::{CollateralTerms, MtmConvention};
use crate::credit::PartyCredit;
use crate::swap::SwapDirection;
use crate::{Error, Real, Result};

const KEYS: &[&str] = &[
    "S0", "K", "T", "r", "q", "sigma", "lambda_S", "lambda_M", "lambda_B", "lambda_C", "R_B",
    "R_C", "H", "X", "dt", "mtm", "trade", "swap_rate", "tenor_years", "pay_freq", "position",
    "notional",
];

const DEFAULT_RECOVERY: f64 = 0.4;
const DEFAULT_DT: f64 = 1.0 / 52.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TradeType {
    Call,
    Put,
    PayerSwap,
    ReceiverSwap,
}

impl TradeType {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "call" => Self::Call,
            "put" => Self::Put,
            "payer_swap" => Self::PayerSwap,
            "receiver_swap" => Self::ReceiverSwap,
            _ => return None,
        })
    }

    pub fn is_swap(self) -> bool {
        matches!(self, Self::PayerSwap | Self::ReceiverSwap)
    }
}

/// Vanilla swap terms; the tenor grid is `0, 1/f, 2/f, ..., tenor`.
#[derive(Clone, Debug, PartialEq)]
pub struct SwapTrade<T> {
    pub tenor_years: T,
    pub pay_freq: u32,
    /// `None` prices at the forward swap rate.
    pub fixed_rate: Option<T>,
    pub direction: SwapDirection,
    pub notional: T,
}

impl<T: Real> SwapTrade<T> {
    pub fn periods(&self) -> usize {
        (self.tenor_years * T::from_count(self.pay_freq as usize)).round().as_f64() as usize
    }

    pub fn grid(&self) -> Vec<T> {
        let f = T::from_count(self.pay_freq as usize);
        (0..=self.periods()).map(|j| T::from_count(j) / f).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TradeSpec<T> {
    Option(EquityOptionSpec<T>),
    Swap(SwapTrade<T>),
}

/// Everything a valuation run needs from the configuration file.
#[derive(Clone, Debug, PartialEq)]
pub struct MarketConfig<T> {
    pub env: MarketEnvironment<T>,
    pub credit_b: PartyCredit<T>,
    pub credit_c: PartyCredit<T>,
    pub collateral: CollateralTerms<T>,
    pub trade: TradeSpec<T>,
    /// Path / tree time step in years.
    pub dt: T,
}

/// Reads and validates a configuration file, failing on the first problem.
pub fn load_market_config<T: Real>(path: impl AsRef<Path>) -> Result<MarketConfig<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_market_config(&text)
}

pub fn parse_market_config<T: Real>(text: &str) -> Result<MarketConfig<T>> {
    let (cfg, mut errors) = build(text);
    match cfg {
        Some(cfg) if errors.is_empty() => Ok(cfg),
        _ => Err(errors.remove(0)),
    }
}

/// Every problem found in `text`; empty means the file is runnable.
pub fn validate_market_config<T: Real>(text: &str) -> Vec<Error> {
    build::<T>(text).1
}

/// One validation finding; alias kept for callers that prefer the name.
pub type ConfigIssue = Error;

struct Entry {
    line: usize,
    value: String,
}

fn tokenize(text: &str, errors: &mut Vec<Error>) -> BTreeMap<String, Entry> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            errors.push(Error::Syntax { line, reason: format!("expected `key = value`, got `{content}`") });
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            errors.push(Error::Syntax { line, reason: format!("unknown key `{key}`") });
            continue;
        }
        if value.is_empty() {
            errors.push(Error::Syntax { line, reason: format!("key `{key}` has no value") });
            continue;
        }
        if let Some(prev) = map.get::<str>(key) {
            let prev: &Entry = prev;
            errors.push(Error::Syntax {
                line,
                reason: format!("key `{key}` already set on line {}", prev.line),
            });
            continue;
        }
        map.insert(key.to_owned(), Entry { line, value: value.to_owned() });
    }
    map
}

/// Parses a decimal or a simple fraction such as `1/52`.
fn parse_number<T: Real>(s: &str) -> Option<T> {
    if let Some((num, den)) = s.split_once('/') {
        let num: T = num.trim().parse().ok()?;
        let den: T = den.trim().parse().ok()?;
        let v = num / den;
        return v.is_finite().then_some(v);
    }
    let v: T = s.parse().ok()?;
    v.is_finite().then_some(v)
}

struct Reader<'a> {
    map: &'a BTreeMap<String, Entry>,
    errors: Vec<Error>,
}

impl Reader<'_> {
    fn number<T: Real>(&mut self, key: &str) -> Option<T> {
        let entry = self.map.get(key)?;
        match parse_number(&entry.value) {
            Some(v) => Some(v),
            None => {
                self.errors.push(Error::NotANumber { key: key.into(), value: entry.value.clone() });
                None
            }
        }
    }

    fn required<T: Real>(&mut self, key: &str) -> Option<T> {
        if !self.map.contains_key(key) {
            self.errors.push(Error::MissingKey(key.into()));
            return None;
        }
        self.number(key)
    }

    fn or<T: Real>(&mut self, key: &str, default: T) -> Option<T> {
        if self.map.contains_key(key) {
            self.number(key)
        } else {
            Some(default)
        }
    }

    fn text(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|e| e.value.as_str())
    }

    fn check(&mut self, ok: bool, key: &str, reason: impl Into<String>) -> bool {
        if !ok {
            self.errors.push(Error::invalid(key, reason));
        }
        ok
    }

    fn non_negative<T: Real>(&mut self, key: &str, v: Option<T>) -> Option<T> {
        let v = v?;
        self.check(v >= T::zero(), key, format!("must be non-negative, got {v}")).then_some(v)
    }

    fn positive<T: Real>(&mut self, key: &str, v: Option<T>) -> Option<T> {
        let v = v?;
        self.check(v > T::zero(), key, format!("must be positive, got {v}")).then_some(v)
    }

    fn unit<T: Real>(&mut self, key: &str, v: Option<T>) -> Option<T> {
        let v = v?;
        self.check(v >= T::zero() && v <= T::one(), key, format!("must lie in [0, 1], got {v}"))
            .then_some(v)
    }
}

fn build<T: Real>(text: &str) -> (Option<MarketConfig<T>>, Vec<Error>) {
    let mut syntax = Vec::new();
    let map = tokenize(text, &mut syntax);
    let mut rd = Reader { map: &map, errors: syntax };

    let trade = match rd.text("trade") {
        None => Some(TradeType::Call),
        Some(s) => {
            let t = TradeType::parse(s);
            if t.is_none() {
                rd.errors.push(Error::invalid(
                    "trade",
                    format!("expected call, put, payer_swap or receiver_swap, got `{s}`"),
                ));
            }
            t
        }
    };
    let position = match rd.text("position") {
        None | Some("long") => Some(Position::Long),
        Some("short") => Some(Position::Short),
        Some(s) => {
            rd.errors.push(Error::invalid("position", format!("expected long or short, got `{s}`")));
            None
        }
    };
    let mtm = match rd.text("mtm") {
        None | Some("risk_free") => Some(MtmConvention::RiskFree),
        Some("pre_default") => Some(MtmConvention::PreDefault),
        Some(s) => {
            rd.errors.push(Error::invalid("mtm", format!("expected risk_free or pre_default, got `{s}`")));
            None
        }
    };
    let is_swap = trade.is_some_and(TradeType::is_swap);

    let sigma = rd.required::<T>("sigma");
    let sigma = rd.positive("sigma", sigma);
    let r = if is_swap { rd.or("r", T::zero()) } else { rd.required("r") };
    let q = rd.or("q", T::zero());
    let lambda_s = rd.or("lambda_S", T::zero());
    let lambda_s = rd.non_negative("lambda_S", lambda_s);
    let lambda_m = rd.or("lambda_M", T::zero());
    let lambda_m = rd.non_negative("lambda_M", lambda_m);
    let lambda_b = rd.or("lambda_B", T::zero());
    let lambda_b = rd.non_negative("lambda_B", lambda_b);
    let lambda_c = rd.or("lambda_C", T::zero());
    let lambda_c = rd.non_negative("lambda_C", lambda_c);
    let r_b = rd.or("R_B", T::lit(DEFAULT_RECOVERY));
    let r_b = rd.unit("R_B", r_b);
    let r_c = rd.or("R_C", T::lit(DEFAULT_RECOVERY));
    let r_c = rd.unit("R_C", r_c);
    let h = rd.or("H", T::zero());
    let h = rd.non_negative("H", h);
    let x = rd.or("X", T::zero());
    let x = rd.non_negative("X", x);
    if let (Some(h), Some(x)) = (h, x) {
        rd.check(h >= x, "H", format!("threshold H = {h} must be at least the minimum transfer X = {x} (H >= X)"));
    }
    let dt = rd.or("dt", T::lit(DEFAULT_DT));
    let dt = rd.positive("dt", dt);

    let trade_spec = match trade {
        Some(TradeType::Call | TradeType::Put) => {
            let s0 = rd.required("S0");
            let s0 = rd.positive("S0", s0);
            let k = rd.required("K");
            let k = rd.positive("K", k);
            let t = rd.required("T");
            let t = rd.positive("T", t);
            if let (Some(t), Some(dt)) = (t, dt) {
                rd.check(dt <= t, "dt", format!("time step {dt} exceeds maturity {t}"));
            }
            let kind = if trade == Some(TradeType::Call) { OptionKind::Call } else { OptionKind::Put };
            match (s0, k, t, position) {
                (Some(s0), Some(k), Some(t), Some(pos)) => EquityOptionSpec::new(s0, k, t, kind)
                    .map(|o| TradeSpec::Option(o.with_position(pos)))
                    .map_err(|e| rd.errors.push(e))
                    .ok(),
                _ => None,
            }
        }
        Some(dir @ (TradeType::PayerSwap | TradeType::ReceiverSwap)) => {
            let tenor = rd.required::<T>("tenor_years");
            let tenor = rd.positive("tenor_years", tenor);
            let freq = rd.or("pay_freq", T::lit(2.0));
            let freq = rd.positive("pay_freq", freq).and_then(|f| {
                let whole = f.fract() == T::zero();
                rd.check(whole, "pay_freq", format!("must be a whole number of payments per year, got {f}"))
                    .then(|| f.as_f64() as u32)
            });
            if let (Some(tenor), Some(freq)) = (tenor, freq) {
                let n = tenor * T::from_count(freq as usize);
                rd.check(
                    (n - n.round()).abs() < T::lit(1e-9),
                    "tenor_years",
                    format!("tenor {tenor} is not a whole number of {freq}-per-year periods"),
                );
            }
            let rate = if rd.map.contains_key("swap_rate") {
                rd.number("swap_rate").map(Some)
            } else {
                Some(None)
            };
            let notional = rd.or("notional", T::one());
            let notional = rd.positive("notional", notional);
            let direction = if dir == TradeType::PayerSwap { SwapDirection::Payer } else { SwapDirection::Receiver };
            match (tenor, freq, rate, notional) {
                (Some(tenor_years), Some(pay_freq), Some(fixed_rate), Some(notional)) => {
                    Some(TradeSpec::Swap(SwapTrade { tenor_years, pay_freq, fixed_rate, direction, notional }))
                }
                _ => None,
            }
        }
        None => None,
    };

    let env = match (r, q, sigma, lambda_s, lambda_m) {
        (Some(r), Some(q), Some(sigma), Some(ls), Some(lm)) => MarketEnvironment::flat(r, q, sigma)
            .and_then(|e| e.with_repo_spread(ls))
            .and_then(|e| e.with_market_funding_spread(lm))
            .map_err(|e| rd.errors.push(e))
            .ok(),
        _ => None,
    };
    let credit_b = match (lambda_b, r_b) {
        (Some(l), Some(rr)) => PartyCredit::constant(l, rr).map_err(|e| rd.errors.push(e)).ok(),
        _ => None,
    };
    let credit_c = match (lambda_c, r_c) {
        (Some(l), Some(rr)) => PartyCredit::constant(l, rr).map_err(|e| rd.errors.push(e)).ok(),
        _ => None,
    };
    let collateral = match (h, x, mtm) {
        (Some(h), Some(x), Some(mtm)) if h >= x => {
            let terms = if h > T::zero() || x > T::zero() {
                CollateralTerms::threshold(h, x).map_err(|e| rd.errors.push(e)).ok()
            } else {
                Some(CollateralTerms::uncollateralized())
            };
            terms.map(|t| t.with_mtm_convention(mtm))
        }
        _ => None,
    };

    let cfg = match (env, credit_b, credit_c, collateral, trade_spec, dt) {
        (Some(env), Some(credit_b), Some(credit_c), Some(collateral), Some(trade), Some(dt)) => {
            Some(MarketConfig { env, credit_b, credit_c, collateral, trade, dt })
        }
        _ => None,
    };
    (cfg, rd.errors)
}
