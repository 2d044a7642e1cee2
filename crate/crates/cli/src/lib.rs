//! Batch driver: loads a configuration and curves, runs the valuation over
//! a sweep of the seller's hazard rate and writes one CSV row per point.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use xva_core::collateral::{CollateralTerms, MtmConvention, Posting};
use xva_core::credit::PartyCredit;
use xva_core::fixtures;
use xva_core::fva::{solve_premium, solve_premium_predefault, McConfig, SolverConfig};
use xva_core::lattice::PdeConfig;
use xva_core::market::{
    parse_market_config, validate_market_config, DiscountCurve, ForwardCurve, MarketConfig, SwapTrade, TradeSpec,
};
use xva_core::swap::{adjusted_swap_rate, forward_swap_rate, swap_dva_cva, swap_value, SwapSpec};
use xva_core::{Error, ValuationReport};

pub const EXAMPLE1_CONFIG: &str = include_str!("../configs/example1.conf");
pub const EXAMPLE2_CONFIG: &str = include_str!("../configs/example2.conf");

pub const OPTION_HEADER: &str = "lambda_B,V_e,CVA_B,CVA_C,FVA_S,FVA_B,FVA_C,V_0";
pub const SWAP_HEADER: &str = "lambda_B,V_e,DVA,CVA,V_0,fair_rate";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            CliError::Config(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    PriceOption,
    PriceSwap,
    Example1,
    Example2,
}

/// `start:step:end`, inclusive of `end`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sweep {
    pub start: f64,
    pub step: f64,
    pub end: f64,
}

impl Sweep {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.end - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| ((self.start + i as f64 * self.step) * 1e12).round() / 1e12).collect()
    }
}

impl FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(format!("sweep `{s}` must look like start:step:end"));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("`{x}` in sweep `{s}` is not a number"));
        let sweep = Sweep { start: num(a)?, step: num(b)?, end: num(c)? };
        if !(sweep.start.is_finite() && sweep.end.is_finite() && sweep.step.is_finite()) {
            return Err(format!("sweep `{s}` has non-finite bounds"));
        }
        if sweep.step <= 0.0 {
            return Err(format!("sweep `{s}` needs a positive step"));
        }
        if sweep.end < sweep.start {
            return Err(format!("sweep `{s}` ends before it starts"));
        }
        if sweep.start < 0.0 {
            return Err(format!("sweep `{s}` has a negative hazard rate"));
        }
        Ok(sweep)
    }
}

/// Parses a year fraction such as `0.25` or `1/52`.
pub fn parse_year_fraction(s: &str) -> Result<f64, String> {
    let v = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
            let d: f64 = d.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
            n / d
        }
        None => s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?,
    };
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("`{s}` must be a positive year fraction"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRequest {
    pub command: Command,
    pub config: Option<PathBuf>,
    pub discount_curve: Option<PathBuf>,
    pub forward_curve: Option<PathBuf>,
    /// `None` writes to standard output.
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub n_paths: usize,
    /// Overrides the configuration's `dt`.
    pub dt: Option<f64>,
    /// `Some(true)` forces threshold collateral, `Some(false)` removes it.
    pub csa: Option<bool>,
    pub sweep: Option<Sweep>,
}

impl RunRequest {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            config: None,
            discount_curve: None,
            forward_curve: None,
            out: None,
            seed: 42,
            n_paths: 100_000,
            dt: None,
            csa: None,
            sweep: None,
        }
    }

    fn config_text(&self) -> Result<String, CliError> {
        match (&self.config, self.command) {
            (Some(path), _) => read(path),
            (None, Command::Example1) => Ok(EXAMPLE1_CONFIG.to_string()),
            (None, Command::Example2) => Ok(EXAMPLE2_CONFIG.to_string()),
            (None, _) => Err(CliError::Config("--config is required for this command".into())),
        }
    }

    fn sweep_points(&self, config_lambda: f64) -> Vec<f64> {
        let default = match self.command {
            Command::Example1 => Some(Sweep { start: 0.0, step: 0.0025, end: 0.03 }),
            Command::Example2 => Some(Sweep { start: 0.0, step: 0.005, end: 0.03 }),
            _ => None,
        };
        match self.sweep.or(default) {
            Some(s) => s.points(),
            None => vec![config_lambda],
        }
    }

    fn is_swap(&self) -> bool {
        matches!(self.command, Command::PriceSwap | Command::Example2)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

/// Every problem with the request's inputs; empty means runnable.
pub fn validate(request: &RunRequest) -> Vec<String> {
    let mut findings = Vec::new();
    match request.config_text() {
        Ok(text) => {
            findings.extend(validate_market_config::<f64>(&text).into_iter().map(|e| e.to_string()));
            if findings.is_empty() {
                if let Ok(cfg) = parse_market_config::<f64>(&text) {
                    findings.extend(trade_findings(request, &cfg));
                }
            }
        }
        Err(e) => findings.push(e.to_string()),
    }
    if request.is_swap() {
        if let Err(e) = load_curves(request) {
            findings.push(e.to_string());
        }
    }
    if let Some(dt) = request.dt {
        if dt.is_nan() || dt <= 0.0 {
            findings.push(format!("--dt {dt} must be positive"));
        }
    }
    if request.n_paths == 0 {
        findings.push("--paths must be at least 1".into());
    }
    findings
}

fn trade_findings(request: &RunRequest, cfg: &MarketConfig<f64>) -> Vec<String> {
    let mut out = Vec::new();
    match (&cfg.trade, request.is_swap()) {
        (TradeSpec::Option(_), true) => out.push("configuration describes an option but a swap command was given".into()),
        (TradeSpec::Swap(_), false) => out.push("configuration describes a swap but an option command was given".into()),
        (TradeSpec::Option(o), false) => {
            let pre_default = cfg.collateral.mtm_convention() == MtmConvention::PreDefault;
            let posting = collateral_for(request, cfg).map(|t| t.posting());
            if pre_default && posting.map_or(true, |p| p == Posting::Threshold) {
                out.push("mtm = pre_default is only supported without collateral".into());
            }
            if pre_default && o.position != xva_core::analytic::Position::Long {
                out.push("mtm = pre_default is only supported for long positions".into());
            }
            let dt = request.dt.unwrap_or(cfg.dt);
            let n = o.maturity / dt;
            if (n - n.round()).abs() > 1e-9 * n.round().max(1.0) {
                out.push(format!("time step {dt} does not divide maturity {}", o.maturity));
            }
        }
        (TradeSpec::Swap(_), true) => {}
    }
    out
}

fn load_curves(request: &RunRequest) -> Result<(DiscountCurve<f64>, ForwardCurve<f64>), CliError> {
    match (&request.discount_curve, &request.forward_curve, request.command) {
        (Some(d), Some(f), _) => Ok((DiscountCurve::load(d)?, ForwardCurve::load(f)?)),
        (None, None, Command::Example2) => Ok((fixtures::ois_curve()?, fixtures::forward_curve()?)),
        _ => Err(CliError::Config("swap pricing needs both --discount-curve and --forward-curve".into())),
    }
}

/// Runs the request and returns the CSV text; writes it to `request.out`
/// when set. A failed write leaves no file behind.
pub fn run(request: &RunRequest) -> Result<String, CliError> {
    let findings = validate(request);
    if !findings.is_empty() {
        return Err(CliError::Config(findings.join("; ")));
    }
    let cfg = parse_market_config::<f64>(&request.config_text()?)?;
    let csv = match &cfg.trade {
        TradeSpec::Option(_) => option_sweep(request, &cfg)?,
        TradeSpec::Swap(trade) => swap_sweep(request, &cfg, trade)?,
    };
    if let Some(path) = &request.out {
        if let Err(e) = fs::write(path, &csv) {
            let _ = fs::remove_file(path);
            return Err(CliError::Config(format!("cannot write {}: {e}", path.display())));
        }
    }
    Ok(csv)
}

fn with_hazard(credit: &PartyCredit<f64>, lambda: f64) -> Result<PartyCredit<f64>, CliError> {
    Ok(PartyCredit::constant(lambda, credit.recovery())?)
}

fn collateral_for(request: &RunRequest, cfg: &MarketConfig<f64>) -> Result<CollateralTerms<f64>, CliError> {
    let mtm = cfg.collateral.mtm_convention();
    let terms = match request.csa {
        None => cfg.collateral.clone(),
        Some(false) => CollateralTerms::uncollateralized(),
        Some(true) => {
            let (h, x) = (cfg.collateral.threshold_at(0.0), cfg.collateral.min_transfer_at(0.0));
            // Default CSA for the example call when the configuration carries none.
            if h == 0.0 && x == 0.0 && request.command == Command::Example1 {
                CollateralTerms::threshold(4.0, 2.0)?
            } else {
                CollateralTerms::threshold(h, x)?
            }
        }
    };
    Ok(terms.with_mtm_convention(mtm))
}

fn option_sweep(request: &RunRequest, cfg: &MarketConfig<f64>) -> Result<String, CliError> {
    let TradeSpec::Option(spec) = &cfg.trade else { unreachable!() };
    let terms = collateral_for(request, cfg)?;
    let solver = SolverConfig {
        mc: McConfig {
            n_paths: request.n_paths,
            dt: request.dt.unwrap_or(cfg.dt),
            seed: request.seed,
            ..McConfig::default()
        },
        ..SolverConfig::default()
    };
    let points = request.sweep_points(cfg.credit_b.intensity_at(0.0));
    let reports: Vec<Result<ValuationReport, CliError>> = points
        .par_iter()
        .map(|&lambda| {
            let credit_b = with_hazard(&cfg.credit_b, lambda)?;
            let report = if terms.mtm_convention() == MtmConvention::PreDefault {
                solve_premium_predefault(spec, &cfg.env, &credit_b, &PdeConfig::default())?
            } else {
                solve_premium(spec, &cfg.env, &credit_b, &cfg.credit_c, &terms, &solver)?
            };
            log::info!("lambda_B = {lambda}: V_0 = {} after {} iterations", report.v0, report.solver_iterations);
            Ok(report)
        })
        .collect();
    let mut csv = String::from(OPTION_HEADER);
    csv.push('\n');
    for (lambda, report) in points.iter().zip(reports) {
        let r = report?;
        writeln!(csv, "{lambda},{},{},{},{},{},{},{}", r.v_e, r.cva_b, r.cva_c, r.fva_s, r.fva_b, r.fva_c, r.v0)
            .expect("writing to a String");
    }
    Ok(csv)
}

fn swap_sweep(request: &RunRequest, cfg: &MarketConfig<f64>, trade: &SwapTrade<f64>) -> Result<String, CliError> {
    let (discount, forwards) = load_curves(request)?;
    let grid = trade.grid();
    let n = grid.len() - 1;
    let rate = match trade.fixed_rate {
        Some(s) => s,
        None => forward_swap_rate(&discount, &forwards, &grid, 0, n)?,
    };
    let spec = SwapSpec::from_trade(trade, rate)?;
    let vol = cfg.env.volatility();
    let v_e = swap_value(&spec, &discount, &forwards)?;
    let points = request.sweep_points(cfg.credit_b.intensity_at(0.0));
    let rows: Vec<Result<String, CliError>> = points
        .par_iter()
        .map(|&lambda| {
            let credit_b = with_hazard(&cfg.credit_b, lambda)?;
            let adj = swap_dva_cva(&spec, &discount, &forwards, vol, &credit_b, &cfg.credit_c)?;
            let fair = adjusted_swap_rate(&spec, &discount, &forwards, vol, &credit_b, &cfg.credit_c)?;
            Ok(format!("{lambda},{v_e},{},{},{},{}", adj.dva, adj.cva, v_e + adj.dva + adj.cva, fair.rate))
        })
        .collect();
    let mut csv = String::from(SWAP_HEADER);
    csv.push('\n');
    for row in rows {
        csv.push_str(&row?);
        csv.push('\n');
    }
    Ok(csv)
}
