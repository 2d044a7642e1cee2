use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use xva_cli::{parse_year_fraction, run, validate, Command, RunRequest, Sweep};

/// Bilateral CVA and FVA valuation of equity options and swaps.
#[derive(Parser)]
#[command(name = "xva", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Configuration file (`key = value`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Discount curve CSV (`tenor_years,discount_factor`).
    #[arg(long, global = true)]
    discount_curve: Option<PathBuf>,
    /// Forward curve CSV (`start,end,forward_rate`).
    #[arg(long, global = true)]
    forward_curve: Option<PathBuf>,
    /// Output CSV; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Monte Carlo paths.
    #[arg(long, global = true, default_value_t = 100_000)]
    paths: usize,
    /// Time step in years, e.g. `1/52`.
    #[arg(long, global = true, value_parser = parse_year_fraction)]
    dt: Option<f64>,
    /// Force threshold collateral.
    #[arg(long, global = true, conflicts_with = "no_csa")]
    csa: bool,
    /// Remove collateral.
    #[arg(long, global = true)]
    no_csa: bool,
    /// Seller hazard rates as `start:step:end`.
    #[arg(long, global = true)]
    sweep: Option<Sweep>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Price an equity option described by --config.
    PriceOption,
    /// Price a vanilla swap described by --config and the curve files.
    PriceSwap,
    /// At-the-money call, swept over the seller's hazard rate.
    Example1,
    /// Ten-year payer swap, swept over the seller's hazard rate.
    Example2,
    /// Report every problem with the inputs without pricing.
    Validate {
        #[arg(long, value_enum, default_value_t = Kind::PriceOption)]
        kind: Kind,
    },
}

#[derive(ValueEnum, Clone, Copy)]
enum Kind {
    PriceOption,
    PriceSwap,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    if let Ok(n) = std::env::var("XVA_THREADS") {
        match n.parse::<usize>() {
            Ok(n) => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("cannot size thread pool: {e}");
                }
            }
            Err(_) => log::warn!("ignoring XVA_THREADS = {n}"),
        }
    }

    let (command, validate_only) = match cli.command {
        Cmd::PriceOption => (Command::PriceOption, false),
        Cmd::PriceSwap => (Command::PriceSwap, false),
        Cmd::Example1 => (Command::Example1, false),
        Cmd::Example2 => (Command::Example2, false),
        Cmd::Validate { kind: Kind::PriceOption } => (Command::PriceOption, true),
        Cmd::Validate { kind: Kind::PriceSwap } => (Command::PriceSwap, true),
    };
    let request = RunRequest {
        command,
        config: cli.config,
        discount_curve: cli.discount_curve,
        forward_curve: cli.forward_curve,
        out: cli.out,
        seed: cli.seed,
        n_paths: cli.paths,
        dt: cli.dt,
        csa: match (cli.csa, cli.no_csa) {
            (true, _) => Some(true),
            (_, true) => Some(false),
            _ => None,
        },
        sweep: cli.sweep,
    };

    if validate_only {
        let findings = validate(&request);
        for f in &findings {
            println!("{f}");
        }
        return if findings.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(2) };
    }

    match run(&request) {
        Ok(csv) => {
            if request.out.is_none() {
                print!("{csv}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
