use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use muskat::io::{self, CommandOutcome, Experiment, IoError, Preset, RunConfig};

#[derive(Parser)]
#[command(name = "muskat", version, about = "One-phase Muskat simulator and verification harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the initial interface and write diagnostics.csv, snapshots and manifest.json.
    Run(Overrides),
    /// Solve the DN problem at the initial data and report convergence and sanity checks.
    DnCheck(Overrides),
    /// Compare the fixed-point and elliptic DN backends at two resolutions.
    OracleCompare(Overrides),
    /// Scan J(f) over random fields at several amplitudes.
    LyapunovScan(Overrides),
    /// Track the distance between two runs with nearby initial data.
    Contraction(Overrides),
    /// Print the norm table of the initial data.
    Norms(Overrides),
}

#[derive(Args)]
struct Overrides {
    /// JSON config file; omitted sections take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_final: Option<f64>,
    /// Grid points per dimension.
    #[arg(long)]
    n: Option<usize>,
    /// single_mode, two_mode, random_band or gaussian_bump.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    amplitude: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Overrides {
    fn resolve(&self, experiment: Option<Experiment>) -> Result<RunConfig, IoError> {
        let mut cfg: RunConfig = match &self.config {
            Some(path) => serde_json::from_str(&io::read_file(path)?).map_err(|e| IoError::Parse(format!("{}: {e}", path.display())))?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.dt {
            cfg.stepper.dt = v;
        }
        if let Some(v) = self.t_final {
            cfg.time.t_final = v;
        }
        if let Some(v) = self.n {
            cfg.grid.n = v;
        }
        if let Some(p) = &self.preset {
            cfg.init.preset = p.parse::<Preset>()?;
        }
        if let Some(v) = self.amplitude {
            cfg.init.amplitude = v;
        }
        if let Some(v) = self.seed {
            cfg.init.seed = v;
        }
        if let Some(v) = &self.out {
            cfg.output.dir = v.clone();
        }
        if let Some(e) = experiment {
            cfg.experiment = e;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn dispatch(command: &Command) -> Result<CommandOutcome, IoError> {
    match command {
        Command::Run(o) => io::run_evolution(&o.resolve(Some(Experiment::Evolve))?),
        Command::DnCheck(o) => io::dn_check(&o.resolve(Some(Experiment::DnCheck))?),
        Command::OracleCompare(o) => io::oracle_compare(&o.resolve(Some(Experiment::OracleCompare))?),
        Command::LyapunovScan(o) => io::lyapunov_scan(&o.resolve(Some(Experiment::LyapunovScan))?),
        Command::Contraction(o) => io::contraction(&o.resolve(Some(Experiment::Contraction))?),
        Command::Norms(o) => io::norms_table(&o.resolve(None)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(outcome) => {
            println!("{}", serde_json::to_string_pretty(&outcome.summary).unwrap_or_default());
            for f in &outcome.files {
                eprintln!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
