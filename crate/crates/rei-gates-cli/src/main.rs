use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rei_gates::exec;
use rei_gates::sweep::{self, ComparisonConfig, PlotKind, RunOptions, Suite, SweepSpec};
use rei_gates::Error;

/// Gate-fidelity sweeps, comparison tables and validation suites.
#[derive(Debug, Parser)]
#[command(name = "reigate", version)]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Recompute outputs that are already up to date.
    #[arg(long, global = true)]
    force: bool,
    /// Directory searched for relative config paths not found in the
    /// working directory.
    #[arg(long, global = true, env = "REIGATE_CONFIG_DIR")]
    config_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a parameter sweep described by a TOML spec.
    Sweep { spec: PathBuf },
    /// Scheme comparison table and cooperativity slices.
    Compare { config: PathBuf },
    /// Run a validation suite: perturbation, md, vx, ps, pi or all.
    Validate { suite: String },
    /// Write a matplotlib script for a sweep CSV.
    Plot {
        csv: PathBuf,
        #[arg(long, default_value = "line")]
        kind: String,
    },
}

const EXIT_VALIDATION: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn resolve(path: &Path, config_dir: Option<&Path>) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    match config_dir {
        Some(dir) if dir.join(path).exists() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let opts = RunOptions { force: cli.force, workers: cli.workers };
    let cfg_dir = cli.config_dir.as_deref();
    match &cli.command {
        Command::Sweep { spec } => {
            let spec = SweepSpec::from_file(&resolve(spec, cfg_dir))?;
            let o = sweep::run_sweep(&spec, &cli.out, opts)?;
            if o.skipped {
                println!("{} is up to date ({} rows); use --force to recompute", o.path.display(), o.rows);
            } else {
                println!("wrote {} ({} rows, {} failed)", o.path.display(), o.rows, o.failed);
            }
            Ok(0)
        }
        Command::Compare { config } => {
            let cfg = ComparisonConfig::from_file(&resolve(config, cfg_dir))?;
            let cmp = exec::with_workers(cli.workers, || sweep::run_comparison(&cfg))?;
            print!("{}", cmp.to_text());
            for p in sweep::write_comparison(&cfg, &cmp, &cli.out, opts)? {
                println!("wrote {}", p.display());
            }
            Ok(0)
        }
        Command::Validate { suite } => {
            let suites: Vec<Suite> = if suite == "all" { Suite::ALL.to_vec() } else { vec![suite.parse()?] };
            let mut ok = true;
            for s in suites {
                let rep = exec::with_workers(cli.workers, || sweep::run_validation(s))?;
                print!("{}", rep.to_text());
                ok &= rep.passed();
            }
            Ok(if ok { 0 } else { EXIT_VALIDATION })
        }
        Command::Plot { csv, kind } => {
            let kind: PlotKind = kind.parse()?;
            let csv = resolve(csv, cfg_dir);
            let script = sweep::emit_plotscript(&csv, kind, &cli.out)?;
            let stem = csv.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset");
            let path = cli.out.join(format!("plot_{stem}_{kind}.py"));
            std::fs::create_dir_all(&cli.out)?;
            std::fs::write(&path, script)?;
            println!("wrote {}", path.display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) | Error::Io(_) | Error::Csv(_) | Error::InvalidParameter(_) => EXIT_CONFIG,
                _ => EXIT_VALIDATION,
            })
        }
    }
}
