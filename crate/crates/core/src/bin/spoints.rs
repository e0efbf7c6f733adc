//! Batch CLI over the s-point pipelines. Subcommands mirror the library
//! commands; exit codes: 0 success, 1 convention violated, 2 input error,
//! 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spoints::cli::config::parse_alpha_range;
use spoints::cli::{self, Overrides, RunConfig};
use spoints::error::Error;

#[derive(Parser)]
#[command(
    name = "spoints",
    about = "detect and characterize s-points of compactly supported potentials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// key=value config file (potential definition + run parameters)
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// output directory (overrides `out` from the config)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// grid resolution per axis (overrides `n`)
    #[arg(long)]
    n: Option<usize>,
    /// detection orders, comma separated (overrides `m`)
    #[arg(long, value_name = "LIST")]
    m: Option<String>,
    /// coupling sweep range A:B:STEP (overrides `alpha_range`)
    #[arg(long, value_name = "A:B:STEP")]
    alpha_range: Option<String>,
    /// allow sweeps across the critical coupling
    #[arg(long)]
    allow_critical: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Invertibility check of I + K plus the radial slope proxy
    Convention(CommonArgs),
    /// Volume scans for s-point candidates (per configured order)
    Scan(CommonArgs),
    /// Radial pipeline: counts, Kram sum rules, s-spheres, Psi identity
    Radial(CommonArgs),
    /// Partial-wave Levinson checks and the S-matrix index
    Levinson(CommonArgs),
    /// Coupling sweep: counts and sphere radii per alpha
    Sweep(CommonArgs),
    /// Everything above, stitched into one report.json
    All(CommonArgs),
}

fn overrides_from(args: &CommonArgs) -> Result<Overrides, Error> {
    let orders = match &args.m {
        Some(list) => Some(
            list.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::MalformedInput(format!("bad order '{s}' in --m")))
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => None,
    };
    let alpha_range = match &args.alpha_range {
        Some(text) => Some(parse_alpha_range(text)?),
        None => None,
    };
    Ok(Overrides {
        n: args.n,
        orders,
        out_dir: args.out.clone(),
        alpha_range,
        allow_critical: args.allow_critical,
    })
}

fn run(command: &Command) -> Result<i32, Error> {
    let args = match command {
        Command::Convention(a)
        | Command::Scan(a)
        | Command::Radial(a)
        | Command::Levinson(a)
        | Command::Sweep(a)
        | Command::All(a) => a,
    };
    let overrides = overrides_from(args)?;
    let cfg = RunConfig::from_file(&args.config, &overrides)?;
    cli::report::ensure_dir(&cfg.out_dir)?;

    match command {
        Command::Convention(_) => {
            let fragment = cli::cmd_convention(&cfg)?;
            cli::report::write_json(&cfg.out_dir.join("report.json"), &fragment)?;
            println!(
                "sigma_min = {:.6e} (tau = {:.1e}) -> {}",
                fragment.sigma_min,
                fragment.tau_conv,
                if fragment.ok { "ok" } else { "violated" }
            );
            if let Some(slope) = fragment.radial_slope {
                println!("radial slope proxy A = {slope:.6e}");
            }
            Ok(if fragment.ok { 0 } else { 1 })
        }
        Command::Scan(_) => {
            let fragments = cli::cmd_scan(&cfg)?;
            cli::report::write_json(&cfg.out_dir.join("report.json"), &fragments)?;
            for f in &fragments {
                println!(
                    "order {}: {} candidates ({})",
                    f.order, f.candidate_count, f.csv
                );
            }
            Ok(0)
        }
        Command::Radial(_) => {
            let fragment = cli::cmd_radial(&cfg)?;
            cli::report::write_json(&cfg.out_dir.join("report.json"), &fragment)?;
            for rule in &fragment.sum_rules {
                println!(
                    "sum rule D^{}_{}: z = {} vs predicted {} -> {}",
                    rule.m,
                    rule.l,
                    rule.z_measured,
                    rule.z_predicted,
                    if rule.pass { "ok" } else { "FAIL" }
                );
            }
            Ok(0)
        }
        Command::Levinson(_) => {
            let report = cli::cmd_levinson(&cfg)?;
            cli::report::write_json(&cfg.out_dir.join("report.json"), &report)?;
            for ch in &report.channels {
                println!(
                    "l = {}: N = {}, delta(0+) = {:.4}, defect = {:.4e} -> {}",
                    ch.l,
                    ch.n_l,
                    ch.delta_zero,
                    ch.defect,
                    if ch.pass { "ok" } else { "FAIL" }
                );
            }
            println!("total index = {}", report.total_index);
            Ok(0)
        }
        Command::Sweep(_) => {
            let fragment = cli::cmd_sweep(&cfg)?;
            cli::report::write_json(&cfg.out_dir.join("report.json"), &fragment)?;
            println!("{} rows -> {}", fragment.rows.len(), fragment.csv);
            Ok(0)
        }
        Command::All(_) => {
            let report = cli::cmd_all(&cfg)?;
            println!(
                "report written to {}",
                cfg.out_dir.join("report.json").display()
            );
            let ok = report.convention.ok;
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
