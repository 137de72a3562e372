//! `plate`: evaluate rectangular plate designs from JSON configs.
//!
//! Exit codes: 0 all criteria pass, 2 some criterion fails, 1 error.

mod commands;
mod output;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "plate", version, about = "Kirchhoff plate design checker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FieldKind {
    /// Deflection, mm
    Deflection,
    /// Largest principal extreme-fibre stress, MPa
    Stress,
    /// Bending moment Mx, N·m/m
    Moment,
    /// Bending moment My, N·m/m
    MomentY,
    /// Twisting moment Mxy, N·m/m
    MomentXy,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and check the design criteria
    Solve {
        config: PathBuf,
        /// Machine-readable report on stdout
        #[arg(long)]
        json: bool,
        /// Fixed polynomial order instead of the config's setting
        #[arg(long)]
        order: Option<usize>,
        /// Include wall times in the JSON report
        #[arg(long)]
        timings: bool,
    },
    /// Sample a result field on an N x N grid and write CSV
    Field {
        config: PathBuf,
        #[arg(long, value_enum, default_value = "deflection")]
        field: FieldKind,
        #[arg(long, default_value_t = 51)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also render a contour image
        #[arg(long)]
        png: Option<PathBuf>,
    },
    /// Re-solve for each value of one parameter
    Sweep {
        config: PathBuf,
        /// t_mm, load_kg, load_scale, Lx_mm, Ly_mm or bc:<segment index>
        #[arg(long)]
        param: String,
        /// Comma-separated values
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        values: String,
        #[arg(long)]
        json: bool,
    },
    /// Show the adaptive order trace
    Convergence { config: PathBuf },
    /// Compare against the finite-difference reference
    Oracle {
        config: PathBuf,
        /// Interior nodes per side
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { config, json, order, timings } => commands::solve(&config, json, order, timings),
        Command::Field { config, field, grid, out, png } => commands::field(&config, field, grid, &out, png.as_deref()),
        Command::Sweep { config, param, values, json } => commands::sweep(&config, &param, &values, json),
        Command::Convergence { config } => commands::convergence(&config),
        Command::Oracle { config, grid } => commands::oracle(&config, grid),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
