//! Command-line front end: single-game reports, region scans, Monte Carlo
//! sampling, and payoff sweeps.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use coblotto::scan::{
    grid_scan, mc_csv, mc_summary, mc_svg, monte_carlo, scan_csv, scan_svg, sweep, sweep_csv,
    sweep_svg,
};
use coblotto::transfer::MembershipOptions;
use coblotto::{adversary_allocation, membership_with, player_payoffs, GameInstance, TransferPair};

#[derive(Parser)]
#[command(name = "coblotto", version, about = "Coalitional Blotto transfer analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GameArgs {
    /// Front-1 total valuation (> 0)
    phi1: f64,
    /// Front-2 total valuation (> 0)
    phi2: f64,
    /// Player 1 budget (> 0)
    x1: f64,
    /// Player 2 budget (> 0)
    x2: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Report case, best response, payoffs, and transfer memberships for one game
    Check {
        #[command(flatten)]
        game: GameArgs,
        /// Emit a machine-readable JSON report
        #[arg(long)]
        json: bool,
        /// Grid size of the budget-transfer membership test
        #[arg(long, default_value_t = coblotto::transfer::DEFAULT_GB_GRID)]
        gb_grid: usize,
    },
    /// Scan the budget plane at fixed valuations and write one CSV row per cell
    Scan {
        #[arg(long)]
        phi1: f64,
        #[arg(long)]
        phi2: f64,
        /// Lower edge of the x1 range (exclusive)
        #[arg(long, default_value_t = 0.0)]
        x1_min: f64,
        /// Upper edge of the x1 range (inclusive)
        #[arg(long, default_value_t = 3.0)]
        x1_max: f64,
        #[arg(long, default_value_t = 0.0)]
        x2_min: f64,
        #[arg(long, default_value_t = 3.0)]
        x2_max: f64,
        /// Grid step
        #[arg(long)]
        step: f64,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
        /// Also write a scatter SVG next to the data
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = coblotto::transfer::DEFAULT_GB_GRID)]
        gb_grid: usize,
    },
    /// Sweep valuation transfers for one game and record both payoff deltas
    Sweep {
        #[command(flatten)]
        game: GameArgs,
        /// Lower end of the transfer range (default: just above -phi2)
        #[arg(long)]
        tau_min: Option<f64>,
        /// Upper end of the transfer range (default: just below phi1)
        #[arg(long)]
        tau_max: Option<f64>,
        /// Number of interior sample points
        #[arg(short, long, default_value_t = 2001)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Sample random budget pairs and test valuation-transfer membership
    Mc {
        #[arg(long)]
        phi1: f64,
        #[arg(long)]
        phi2: f64,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 3.0)]
        x1_max: f64,
        #[arg(long, default_value_t = 3.0)]
        x2_max: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

enum CliError {
    Usage(String),
    Io(String),
}

impl From<coblotto::Error> for CliError {
    fn from(e: coblotto::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn check_report(g: &GameInstance, json: bool, gb_grid: usize) -> Result<String, CliError> {
    g.validate()?;
    let opts = MembershipOptions { gb_grid, ..Default::default() };
    let m = membership_with(g, &opts);
    let alloc = adversary_allocation(&g.zero_transfer())?;
    let payoffs = player_payoffs(g, &TransferPair::ZERO)?;
    if json {
        let certs: Vec<_> = m
            .certificates
            .iter()
            .map(|c| {
                serde_json::json!({
                    "prop": c.proposition,
                    "lo": c.interval.0,
                    "hi": c.interval.1,
                })
            })
            .collect();
        let report = serde_json::json!({
            "game": { "phi1": g.phi1, "phi2": g.phi2, "x1": g.x1, "x2": g.x2 },
            "case": m.case.to_string(),
            "region": m.region.to_string(),
            "allocation": { "xa1": alloc.xa1, "xa2": alloc.xa2 },
            "payoffs": { "u1": payoffs.u1, "u2": payoffs.u2 },
            "gv": { "member": m.in_gv, "certificates": certs },
            "gb": m.in_gb,
            "joint": m.joint_feasible,
            "measure_zero": m.in_measure_zero,
        });
        Ok(format!("{report:#}\n"))
    } else {
        let mut out = String::new();
        out.push_str(&format!(
            "game: phi1={} phi2={} x1={} x2={}\n",
            g.phi1, g.phi2, g.x1, g.x2
        ));
        out.push_str(&format!("case: {}  region: {}\n", m.case, m.region));
        out.push_str(&format!("adversary allocation: ({}, {})\n", alloc.xa1, alloc.xa2));
        out.push_str(&format!("baseline payoffs: ({}, {})\n", payoffs.u1, payoffs.u2));
        out.push_str(&format!("valuation transfers (gv): {}\n", m.in_gv));
        for c in &m.certificates {
            out.push_str(&format!(
                "  rule {} {:?}: tau_v in ({}, {}), direction {}\n",
                c.proposition, c.kind, c.interval.0, c.interval.1, c.direction
            ));
        }
        out.push_str(&format!("budget transfers (gb): {}\n", m.in_gb));
        out.push_str(&format!(
            "joint transfers: {}{}\n",
            m.joint_feasible,
            if m.in_measure_zero { " (on the exceptional set)" } else { "" }
        ));
        if let Ok(d) = coblotto::joint_beneficial_direction(g) {
            out.push_str(&format!(
                "joint direction: (d_b={}, d_v={}), verified deltas ({}, {})\n",
                d.d_b, d.d_v, d.delta1, d.delta2
            ));
        }
        Ok(out)
    }
}

fn check_gb_grid(gb_grid: usize) -> Result<(), CliError> {
    if gb_grid < 1_001 {
        return Err(CliError::Usage(format!(
            "--gb-grid must be at least 1001, got {gb_grid}"
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Check { game, json, gb_grid } => {
            check_gb_grid(gb_grid)?;
            let g = GameInstance { phi1: game.phi1, phi2: game.phi2, x1: game.x1, x2: game.x2 };
            print!("{}", check_report(&g, json, gb_grid)?);
            Ok(())
        }
        Command::Scan {
            phi1,
            phi2,
            x1_min,
            x1_max,
            x2_min,
            x2_max,
            step,
            out,
            svg,
            gb_grid,
        } => {
            check_gb_grid(gb_grid)?;
            let opts = MembershipOptions { gb_grid, ..Default::default() };
            let records = grid_scan(phi1, phi2, (x1_min, x1_max), (x2_min, x2_max), step, &opts)?;
            write_file(&out, &scan_csv(&records))?;
            if let Some(svg_path) = svg {
                write_file(&svg_path, &scan_svg(&records))?;
            }
            eprintln!("scan: {} cells -> {}", records.len(), out.display());
            Ok(())
        }
        Command::Sweep { game, tau_min, tau_max, n, out, svg } => {
            let g = GameInstance { phi1: game.phi1, phi2: game.phi2, x1: game.x1, x2: game.x2 };
            g.validate()?;
            let lo = tau_min.unwrap_or(-g.phi2);
            let hi = tau_max.unwrap_or(g.phi1);
            let records = sweep(&g, lo, hi, n)?;
            write_file(&out, &sweep_csv(&records))?;
            if let Some(svg_path) = svg {
                write_file(&svg_path, &sweep_svg(&records))?;
            }
            Ok(())
        }
        Command::Mc { phi1, phi2, samples, seed, x1_max, x2_max, out, svg } => {
            let records = monte_carlo(phi1, phi2, samples, seed, x1_max, x2_max)?;
            write_file(&out, &mc_csv(&records))?;
            if let Some(svg_path) = svg {
                write_file(&svg_path, &mc_svg(&records))?;
            }
            println!("{}", mc_summary(&records, phi1, phi2));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
