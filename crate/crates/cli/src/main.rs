use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use renq_cli::{error_record, exit_code, run, CommandKind, Format, RawArgs, RunConfig};

/// Rare-earth electro-nuclear qubit analyses. Output: CSV (names row, units
/// row, `# key = value` metadata) or a JSON record.
#[derive(Parser)]
#[command(name = "renq", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Built-in material name or path to a material config.
    #[arg(long, global = true)]
    material: Option<String>,
    /// Ion separation, e.g. 10nm.
    #[arg(long, global = true)]
    r: Option<String>,
    /// Static field magnitude, e.g. 1T.
    #[arg(long = "B", global = true)]
    b: Option<String>,
    /// Drive amplitude, e.g. 1mT.
    #[arg(long = "Bac", global = true)]
    b_ac: Option<String>,
    /// Target error 1 - F.
    #[arg(long, global = true)]
    target_error: Option<String>,
    /// Error grid lo:hi:points_per_decade (speedup-curve).
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Pulse error model: full or first-order.
    #[arg(long, global = true)]
    model: Option<String>,
    /// Field polar angle in the g-tensor frame (degrees unless a unit is given).
    #[arg(long, global = true, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Field azimuth (degrees unless a unit is given).
    #[arg(long, global = true, allow_hyphen_values = true)]
    phi: Option<String>,
    /// Point group (symmetry).
    #[arg(long, global = true)]
    group: Option<String>,
    /// Number of ions (stark-budget).
    #[arg(long, global = true)]
    n: Option<String>,
    /// Activation fidelity (stark-budget).
    #[arg(long, global = true)]
    f_act: Option<String>,
    /// CNOT fidelity (stark-budget).
    #[arg(long, global = true)]
    f_cnot: Option<String>,
    /// Stark coefficient, e.g. "35 kHz/(V/cm)".
    #[arg(long, global = true)]
    stark_coef: Option<String>,
    /// Hyperfine constant A_J/h (robustness), e.g. 1GHz.
    #[arg(long = "A", global = true)]
    a_j: Option<String>,
    /// Minimal detuning dw/2pi (pi-pulse), e.g. 1MHz.
    #[arg(long, global = true)]
    delta: Option<String>,
    /// Sweep one parameter: name=lo:hi:count, e.g. r=2nm:40nm:39.
    #[arg(long, global = true)]
    sweep: Option<String>,
    /// Output file (stdout if absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Fmt,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Csv,
    Record,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Blockade speed-up versus target error.
    SpeedupCurve,
    /// Shortest truncated-Gaussian pi pulse for a target error.
    PiPulse,
    /// CNOT error budget and timing.
    CnotReport,
    /// Field-direction search for the CNOT.
    OptimizeAngles,
    /// Stark field needed to address single ions.
    StarkBudget,
    /// Spectator phase and hopping estimates.
    Robustness,
    /// Point-group selection rules.
    Symmetry,
    /// Canonical material config.
    MaterialDump,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::SpeedupCurve => CommandKind::SpeedupCurve,
        Cmd::PiPulse => CommandKind::PiPulse,
        Cmd::CnotReport => CommandKind::CnotReport,
        Cmd::OptimizeAngles => CommandKind::OptimizeAngles,
        Cmd::StarkBudget => CommandKind::StarkBudget,
        Cmd::Robustness => CommandKind::Robustness,
        Cmd::Symmetry => CommandKind::Symmetry,
        Cmd::MaterialDump => CommandKind::MaterialDump,
    };
    let raw = RawArgs {
        material: cli.material,
        r: cli.r,
        b: cli.b,
        b_ac: cli.b_ac,
        target_error: cli.target_error,
        grid: cli.grid,
        model: cli.model,
        theta: cli.theta,
        phi: cli.phi,
        group: cli.group,
        n: cli.n,
        f_act: cli.f_act,
        f_cnot: cli.f_cnot,
        stark_coef: cli.stark_coef,
        a_j: cli.a_j,
        delta: cli.delta,
        sweep: cli.sweep,
    };
    let format = match cli.format {
        Fmt::Csv => Format::Csv,
        Fmt::Record => Format::Record,
    };
    let result = RunConfig::from_raw(command, raw).and_then(|cfg| run(&cfg));
    match result {
        Ok(out) => {
            let text = out.render(format);
            match &cli.out {
                Some(p) => {
                    if let Err(e) = std::fs::write(p, text) {
                        let err = renq_core::Error::parse("--out", format!("{}: {e}", p.display()));
                        eprintln!("{}", error_record(&err));
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", error_record(&e));
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
