use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mimo_recip::config::ExperimentConfig;
use mimo_recip::exec::{RayonExecutor, WORKERS_ENV};
use mimo_recip::figures::{self, FigureOptions, FIGURE_IDS};
use mimo_recip::output::{gnuplot_script, sweep_csv, write_file, PlotSeries};
use mimo_recip::validate::{self, Level};
use mimo_recip_core::montecarlo::run_sweep;

#[derive(Parser)]
#[command(name = "mimo-recip", version, about = "Downlink SINR under TDD reciprocity errors: sweeps, figure presets, validation")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the sweep described by a JSON config and write a CSV table.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path; overrides the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Master seed; overrides the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Trials per point; overrides the config.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, env = WORKERS_ENV)]
        workers: Option<usize>,
        /// Also write a gnuplot script next to the CSV.
        #[arg(long)]
        plot: bool,
    },
    /// Run a figure preset, writing one CSV per curve and a gnuplot script.
    Figure {
        #[arg(long)]
        id: u32,
        #[arg(long, default_value = "figures")]
        out: PathBuf,
        #[arg(long, default_value_t = figures::DEFAULT_FIGURE_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = mimo_recip::config::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, env = WORKERS_ENV)]
        workers: Option<usize>,
    },
    /// Run the acceptance criteria and print a pass/fail table.
    Validate {
        #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
        level: LevelArg,
        #[arg(long, env = WORKERS_ENV)]
        workers: Option<usize>,
        /// Print per-item details under each criterion.
        #[arg(long)]
        verbose: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

fn executor(workers: Option<usize>) -> Result<RayonExecutor, Failure> {
    RayonExecutor::new(workers.unwrap_or(0)).map_err(|e| Failure::Runtime(format!("cannot start workers: {e}")))
}

fn runtime<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Runtime(e.to_string())
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    write_file(path, bytes).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn sweep(
    config: &Path,
    out: Option<PathBuf>,
    seed: Option<u64>,
    trials: Option<usize>,
    workers: Option<usize>,
    plot: bool,
) -> Result<(), Failure> {
    let mut cfg = ExperimentConfig::load(config).map_err(|e| Failure::Usage(e.to_string()))?;
    if let Some(s) = seed {
        cfg.sweep.master_seed = s;
    }
    if let Some(t) = trials {
        if t < 2 {
            return Err(Failure::Usage("--trials must be at least 2".into()));
        }
        cfg.sweep.trials = t;
    }
    let out = out.or(cfg.output.clone()).unwrap_or_else(|| PathBuf::from("sweep.csv"));
    let exec = executor(workers)?;
    eprintln!(
        "sweep {}: {} values x {} schemes, {} trials, {} workers",
        cfg.sweep.variable.name(),
        cfg.sweep.values.len(),
        cfg.sweep.schemes.len(),
        cfg.sweep.trials,
        exec.workers()
    );
    let table = run_sweep(&cfg.system, &cfg.profile, &cfg.sweep, &exec).map_err(runtime)?;
    for s in &table.skipped {
        eprintln!("skipped {} at {} = {} (needs M > K)", s.scheme.name(), cfg.sweep.variable.name(), s.value);
    }
    write(&out, &sweep_csv(&table))?;
    if plot {
        let name = out.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let schemes: Vec<&str> = cfg.sweep.schemes.iter().map(|s| s.name()).collect();
        let series = [PlotSeries { csv: &name, label: "" }];
        let script = gnuplot_script(&name, cfg.sweep.variable.name(), &series, &schemes, false);
        write(&out.with_extension("gp"), script.as_bytes())?;
    }
    Ok(())
}

fn figure(id: u32, out: &Path, trials: usize, seed: u64, workers: Option<usize>) -> Result<(), Failure> {
    let preset = figures::preset(id).ok_or_else(|| {
        Failure::Usage(format!("unknown figure id {id}; expected one of {FIGURE_IDS:?}"))
    })?;
    if trials < 2 {
        return Err(Failure::Usage("--trials must be at least 2".into()));
    }
    let exec = executor(workers)?;
    let opts = FigureOptions { trials, master_seed: seed };
    let res = figures::run_figure(&preset, opts, &exec, &mut |line| eprintln!("{line}")).map_err(runtime)?;
    for (curve, s) in &res.skipped {
        eprintln!("{curve}: skipped {} at {} = {} (needs M > K)", s.scheme.name(), preset.variable.name(), s.value);
    }
    for (name, bytes) in &res.files {
        write(&out.join(name), bytes)?;
    }
    Ok(())
}

fn run_validate(level: LevelArg, workers: Option<usize>, verbose: bool) -> Result<(), Failure> {
    let level = match level {
        LevelArg::Fast => Level::Fast,
        LevelArg::Full => Level::Full,
    };
    let exec = executor(workers)?;
    let binary = std::env::current_exe().map_err(runtime)?;
    let reports = validate::run_all(level, &exec, &binary, &mut |r| {
        println!("{r}");
        if verbose || !r.passed {
            for n in &r.notes {
                println!("    {n}");
            }
        }
    });
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("{} ({})", r.id, r.name))
        .collect();
    if failed.is_empty() {
        println!("all {} criteria passed", reports.len());
        Ok(())
    } else {
        Err(Failure::Runtime(format!("failed criteria: {}", failed.join(", "))))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Cmd::Sweep {
            config,
            out,
            seed,
            trials,
            workers,
            plot,
        } => sweep(&config, out, seed, trials, workers, plot),
        Cmd::Figure {
            id,
            out,
            trials,
            seed,
            workers,
        } => figure(id, &out, trials, seed, workers),
        Cmd::Validate { level, workers, verbose } => run_validate(level, workers, verbose),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
