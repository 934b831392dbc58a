use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use b4nl_runner::config::ScenarioKind;
use b4nl_runner::{parse_config, run_scenario, RunError, RunOptions, ScenarioConfig};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "b4nl", version, about = "Run fourth-order NLS scenarios from JSON configs")]
struct Cli {
    /// Seed for random initial data (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: `output.directory` from the config).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate and record observables and snapshots.
    Evolve(RunArgs),
    /// Small-dispersion error study.
    Smalldisp(RunArgs),
    /// Free-flow L^∞ decay fit.
    Decay(RunArgs),
    /// Scaling exponents and measured rescaling ratios.
    Scaling(RunArgs),
    /// Exact ill-posedness parameter algebra.
    Illposed(RunArgs),
    /// Wave limit, defects and inverse wave operator.
    Scatter(RunArgs),
    /// Ensemble ratios for a functional inequality.
    Inequality(RunArgs),
    /// Parse and validate a config, print its canonical form.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load(path: &Path) -> Result<ScenarioConfig, RunError> {
    let text = fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
    parse_config(&text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let (kind, args) = match cli.command {
        Command::Validate { config } => {
            return match load(&config) {
                Ok(cfg) => {
                    print!("{}", cfg.to_canonical_json());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            };
        }
        Command::Evolve(a) => (ScenarioKind::Evolve, a),
        Command::Smalldisp(a) => (ScenarioKind::Smalldisp, a),
        Command::Decay(a) => (ScenarioKind::Decay, a),
        Command::Scaling(a) => (ScenarioKind::Scaling, a),
        Command::Illposed(a) => (ScenarioKind::Illposed, a),
        Command::Scatter(a) => (ScenarioKind::Scatter, a),
        Command::Inequality(a) => (ScenarioKind::Inequality, a),
    };
    let cfg = match load(&args.config) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if cfg.kind != kind {
        return fail(&RunError::invalid("kind", format!("config is `{}` but the subcommand is `{kind}`", cfg.kind)));
    }
    let Some(out) = args.out.or_else(|| cfg.output.directory.clone()) else {
        return fail(&RunError::invalid("output.directory", "no --out given and none in the config"));
    };
    match run_scenario(&cfg, &RunOptions { out, seed: cli.seed }) {
        Ok(summary) => {
            for f in &summary.files {
                println!("{}", summary.out.join(&f.path).display());
            }
            println!("{}", summary.out.join("manifest.json").display());
            eprintln!("done in {:.2}s", summary.wall_time_seconds);
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &RunError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}
