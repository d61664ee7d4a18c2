use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anisowf::experiment::{
    cmd_analyze, cmd_compose_check, cmd_evolve, cmd_generate, cmd_kernel_diagnostics, cmd_verify_propagation,
    ExperimentSpec, Outcome, Overrides,
};
use anisowf::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "anisowf", version, about = "Anisotropic Gabor wave front sets of sampled signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the spec's signal and write it as ANGB and CSV.
    Generate(Common),
    /// Estimate the wave front set of the spec's signal.
    Analyze(Common),
    /// Evolve the signal under the spec's symbol and write u(t).
    Evolve(Common),
    /// Compare the evolved wave front set with the transported initial one.
    VerifyPropagation(Common),
    /// Estimate the kernel's wave front relation and check the graph condition.
    KernelDiagnostics(Common),
    /// Compose a stored relation with a stored direction set.
    ComposeCheck(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment spec (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Output directory (overrides the spec).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long = "grid-n")]
    grid_n: Option<usize>,
    #[arg(long = "grid-L")]
    grid_l: Option<f64>,
    /// Anisotropy parameter s.
    #[arg(long)]
    s: Option<f64>,
    #[arg(long = "tolerance-deg")]
    tolerance_deg: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<ExperimentSpec, Error> {
        let mut spec = ExperimentSpec::load(&self.spec)?;
        spec.apply(&Overrides {
            out: self.out.clone(),
            grid_n: self.grid_n,
            grid_l: self.grid_l,
            s: self.s,
            tolerance_deg: self.tolerance_deg,
        });
        spec.validate()?;
        Ok(spec)
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let common = match &cli.command {
        Command::Generate(c)
        | Command::Analyze(c)
        | Command::Evolve(c)
        | Command::VerifyPropagation(c)
        | Command::KernelDiagnostics(c)
        | Command::ComposeCheck(c) => c,
    };
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(Error::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::Usage(e.to_string()))?;
    }
    let spec = common.load()?;
    let start = Instant::now();
    let outcome = match &cli.command {
        Command::Generate(_) => {
            let (o, u) = cmd_generate(&spec)?;
            println!("{}: {} samples on n = {}, L = {}", spec.name, u.values.len(), u.grid.n, u.grid.l);
            o
        }
        Command::Analyze(_) => {
            let (o, set) = cmd_analyze(&spec)?;
            println!(
                "{}: {} of {} directions classified (threshold {}, max slope {:.2})",
                spec.name,
                set.classified().count(),
                set.entries.len(),
                set.threshold,
                set.max_slope()
            );
            o
        }
        Command::Evolve(_) => {
            let (o, u) = cmd_evolve(&spec)?;
            println!("{}: evolved, |u(t)| = {:.6e}", spec.name, u.norm());
            o
        }
        Command::VerifyPropagation(_) => {
            let (o, r) = cmd_verify_propagation(&spec)?;
            println!(
                "{}: {:?} mode, {} initial / {} evolved directions, Hausdorff {} deg (tolerance {})",
                spec.name,
                r.mode,
                r.initial.classified().count(),
                r.evolved.classified().count(),
                r.hausdorff_deg.map_or("inf".into(), |h| format!("{h:.3}")),
                r.tolerance_deg
            );
            o
        }
        Command::KernelDiagnostics(_) => {
            let (o, r) = cmd_kernel_diagnostics(&spec)?;
            println!(
                "{}: {:?}, {} classified, axis margins {:.2} / {:.2} deg, distance to prediction {}",
                spec.name,
                r.regime,
                r.graph.n_classified,
                r.graph.margin_first_deg,
                r.graph.margin_second_deg,
                r.distance_to_prediction_deg.map_or("n/a".into(), |d| format!("{d:.3} deg"))
            );
            o
        }
        Command::ComposeCheck(_) => {
            let (o, r) = cmd_compose_check(&spec)?;
            println!(
                "{}: {} composed directions, expected-to-composed {}",
                spec.name,
                r.composed.entries.len(),
                r.expected_to_composed_deg.map_or("n/a".into(), |d| format!("{d:.3} deg"))
            );
            o
        }
    };
    eprintln!("elapsed {:.2?}", start.elapsed());
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) => {
            if o == Outcome::Fail {
                println!("FAIL");
            }
            ExitCode::from(o.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
