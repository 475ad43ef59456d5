use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use padic_transfer::campaigns::{atc_check, transfer_check, AtcParams, Regime, TransferParams};
use padic_transfer::encode::load_input;
use padic_transfer::queries::{cayley_query, fourier_query, match_query, orb_query, tree_query, QueryOutput};
use padic_transfer::{context, CampaignConfig, CliError, CliResult, Format};

/// Exact orbital integrals, Cayley reductions, tree geometry and Weil-representation checks
/// over an unramified quadratic extension of Q_p.
#[derive(Parser, Debug)]
#[command(name = "padic-transfer", version)]
struct Cli {
    /// Odd prime p.
    #[arg(long, global = true, default_value_t = 3)]
    p: u32,
    /// p-adic precision in digits (defaults to the largest supported).
    #[arg(long, global = true, env = "PADIC_TRANSFER_PREC")]
    prec: Option<u32>,
    /// Campaign seed; every case derives its own sub-seed from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Per-call enumeration budget.
    #[arg(long, global = true, default_value_t = padic_transfer_core::orbital::BUDGET)]
    budget: usize,
    /// Report format for campaigns.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Input {
    /// JSON object, a file path, or `-` for standard input.
    input: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Orbital integral of one element against a standard test function.
    Orb(Input),
    /// Derivative at s = 0 of a symmetric orbital integral, in units of log q.
    Dorb(Input),
    /// Invariants of a triple and its matching unitary pair.
    Match(Input),
    /// Cayley image of a group element, with bridge residuals.
    Cayley(Input),
    /// Queries on the Bruhat-Tits tree of the split hermitian plane.
    Tree(Input),
    /// Fourier and Weil-representation identities.
    FourierCheck(Input),
    /// Seeded campaign for the transfer identity.
    TransferCheck {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        t: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Check the group version through its Cayley reductions.
        #[arg(long)]
        group: bool,
        /// Only orbits whose matching space is the nearby space.
        #[arg(long)]
        nearby_only: bool,
    },
    /// Seeded campaign for the arithmetic transfer identities.
    AtcCheck {
        #[arg(long, value_enum, default_value_t = Regime::Rank1)]
        regime: Regime,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Vertex type; all types when omitted.
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, default_value_t = 4)]
        samples: usize,
        /// Smallest valuation drawn.
        #[arg(long, default_value_t = -2, allow_negative_numbers = true)]
        vmin: i32,
        /// Largest valuation drawn.
        #[arg(long, default_value_t = 4, allow_negative_numbers = true)]
        vmax: i32,
        /// Largest norm valuation for the tree regime.
        #[arg(long, default_value_t = 3)]
        max_m: i32,
    },
}

fn write_out(cli: &Cli, bytes: &[u8]) -> CliResult<()> {
    match &cli.out {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn query(cli: &Cli, input: &Input, run: impl FnOnce(&serde_json::Value) -> CliResult<QueryOutput>) -> CliResult<bool> {
    let v = load_input(&input.input)?;
    match run(&v)? {
        QueryOutput::Json { value, ok } => {
            let mut bytes = serde_json::to_vec_pretty(&value)?;
            bytes.push(b'\n');
            write_out(cli, &bytes)?;
            Ok(ok)
        }
        QueryOutput::Text(s) => {
            write_out(cli, s.as_bytes())?;
            Ok(true)
        }
    }
}

fn run(cli: &Cli) -> CliResult<bool> {
    let ctx = context(cli.p, cli.prec)?;
    let config = |command: &str, params: BTreeMap<String, String>| CampaignConfig {
        command: command.into(),
        p: cli.p,
        prec: ctx.prec(),
        seed: cli.seed,
        budget: cli.budget,
        format: cli.format,
        params,
    };
    let started = Instant::now();
    let report = match &cli.command {
        Command::Orb(i) => return query(cli, i, |v| orb_query(ctx, cli.budget, v, false)),
        Command::Dorb(i) => return query(cli, i, |v| orb_query(ctx, cli.budget, v, true)),
        Command::Match(i) => return query(cli, i, |v| match_query(ctx, v)),
        Command::Cayley(i) => return query(cli, i, |v| cayley_query(ctx, v)),
        Command::Tree(i) => return query(cli, i, |v| tree_query(ctx, cli.budget, v)),
        Command::FourierCheck(i) => return query(cli, i, |v| fourier_query(ctx, cli.seed, v)),
        Command::TransferCheck { n, t, samples, group, nearby_only } => {
            let params = BTreeMap::from([
                ("n".to_string(), n.to_string()),
                ("t".to_string(), t.to_string()),
                ("samples".to_string(), samples.to_string()),
                ("group".to_string(), group.to_string()),
                ("nearby_only".to_string(), nearby_only.to_string()),
            ]);
            let tp = TransferParams { n: *n, t: *t, samples: *samples, group: *group, nearby_only: *nearby_only };
            transfer_check(ctx, &config("transfer-check", params), &tp)?
        }
        Command::AtcCheck { regime, n, t, samples, vmin, vmax, max_m } => {
            if vmin > vmax {
                return Err(CliError::Input(format!("empty valuation window [{vmin}, {vmax}]")));
            }
            let regime_name = match regime {
                Regime::Rank1 => "rank1",
                Regime::Maxorder => "maxorder",
                Regime::Drinfeld => "drinfeld",
            };
            let params = BTreeMap::from([
                ("regime".to_string(), regime_name.to_string()),
                ("n".to_string(), n.to_string()),
                ("t".to_string(), t.map(|t| t.to_string()).unwrap_or_else(|| "all".into())),
                ("samples".to_string(), samples.to_string()),
                ("window".to_string(), format!("{vmin}..={vmax}")),
                ("max_m".to_string(), max_m.to_string()),
            ]);
            let ap =
                AtcParams { regime: *regime, n: *n, t: *t, samples: *samples, window: (*vmin, *vmax), max_m: *max_m };
            atc_check(ctx, &config("atc-check", params), &ap)?
        }
    };
    // Wall time goes to stderr so that reports stay byte-identical across runs.
    eprintln!(
        "{} cases, {} passed, {} failed in {:.2?}",
        report.summary.cases,
        report.summary.passed,
        report.summary.failed,
        started.elapsed()
    );
    report.emit(cli.out.as_deref())?;
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
