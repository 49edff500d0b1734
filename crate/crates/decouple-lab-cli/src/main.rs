use clap::{Args, Parser, Subcommand};
use decouple_lab_cli::{config, experiments, output};
use std::path::PathBuf;
use std::process::ExitCode;

/// Desk-scale decoupling experiments: geometric nets, extension fields,
/// wave packets, fractal measures, and their measured exponents.
#[derive(Parser)]
#[command(name = "decouple-lab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// configuration file (key=value lines, # comments)
    #[arg(long)]
    config: PathBuf,
    /// output CSV path (overrides output_path from the config)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Cap tiling of the frequency cube
    Caps(Common),
    /// Plate-net covering and counting checks
    Netcheck(Common),
    /// One extremal configuration, fully measured
    Example(Common),
    /// Extremal configuration over a scale sweep with fitted slopes
    Sweep(Common),
    /// Random-packet decoupling ratios against the theoretical ceiling
    Decouple(Common),
    /// Good/bad tube classification on a separated Cantor pair
    Distset(Common),
    /// Riesz energies of a subdivision measure over depths
    Energy(Common),
    /// Closed-form dimension threshold
    Threshold(Common),
}

impl Cmd {
    fn split(&self) -> (config::Command, &Common) {
        match self {
            Cmd::Caps(c) => (config::Command::Caps, c),
            Cmd::Netcheck(c) => (config::Command::Netcheck, c),
            Cmd::Example(c) => (config::Command::Example, c),
            Cmd::Sweep(c) => (config::Command::Sweep, c),
            Cmd::Decouple(c) => (config::Command::Decouple, c),
            Cmd::Distset(c) => (config::Command::Distset, c),
            Cmd::Energy(c) => (config::Command::Energy, c),
            Cmd::Threshold(c) => (config::Command::Threshold, c),
        }
    }
}

// exit codes: 0 success, 2 configuration/validation failure, 3 failure
// while running the experiment or writing its results
fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = cli.command.split();
    let text = match std::fs::read_to_string(&common.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", common.config.display());
            return ExitCode::from(2);
        }
    };
    let mut cfg = match config::parse_config(&text, Some(command)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(out) = &common.out {
        cfg.output_path = out.display().to_string();
    }
    let report = match experiments::run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    let csv_path = PathBuf::from(&cfg.output_path);
    if let Err(e) = output::write_report(&csv_path, &report, &cfg) {
        eprintln!("error: writing {}: {e}", csv_path.display());
        return ExitCode::from(3);
    }
    println!(
        "{}: {} metrics -> {}",
        cfg.command,
        report.metrics().len(),
        csv_path.display()
    );
    ExitCode::SUCCESS
}
