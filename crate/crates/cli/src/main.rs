//! `heisgb`: curve and surface curvature in the Heisenberg group, with
//! Gauss-Bonnet verification, behind five subcommands
//! (curve, surface, gauss-bonnet, verify, limit-scan).

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use heisgb_core::ErrorCategory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Parser)]
#[command(
    name = "heisgb",
    version,
    about = "Curvature and Gauss-Bonnet engine for the Heisenberg group under the Riemannian approximation scheme"
)]
struct Cli {
    /// Output format; JSON is machine-readable, table is for humans.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Curvature of an ambient curve, at finite L or in the L → ∞ limit.
    Curve(commands::CurveArgs),
    /// Surface curvature quantities at chosen points of a scene.
    Surface(commands::SurfaceArgs),
    /// Gauss-Bonnet residuals: the limit identity or the classical
    /// finite-L check.
    GaussBonnet(commands::GaussBonnetArgs),
    /// Run the seeded property suite and report per-property results.
    Verify(commands::VerifyArgs),
    /// Sweep L over a log grid for one quantity and fit the convergence
    /// exponent.
    LimitScan(commands::LimitScanArgs),
}

/// Exit codes: 0 success, 2 input error, 3 numeric-contract violation,
/// 4 property failure.
fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    let outcome = match cli.command {
        Command::Curve(args) => commands::run_curve(args, format),
        Command::Surface(args) => commands::run_surface(args, format),
        Command::GaussBonnet(args) => commands::run_gauss_bonnet(args, format),
        Command::Verify(args) => commands::run_verify(args, format),
        Command::LimitScan(args) => commands::run_limit_scan(args, format),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            let category = match err.downcast_ref::<heisgb_core::Error>() {
                Some(core_err) => core_err.category(),
                None => ErrorCategory::Input,
            };
            output::emit_error(&err, category, format);
            match category {
                ErrorCategory::Input => ExitCode::from(2),
                ErrorCategory::NumericContract => ExitCode::from(3),
            }
        }
    }
}
