use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use floquet_kitaev::cli::{
    cmd_analyze, cmd_geometry, cmd_reproduce, cmd_run, load_config, output_root, AnalyzeMode, CliError, FIGURES,
    REPRODUCE_SEED,
};

#[derive(Parser)]
#[command(name = "fkh", version, about = "Floquet Kitaev honeycomb simulator")]
struct Cli {
    /// Upper bound on parallel workers (default: available cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a geometry summary and validate it.
    Geometry {
        /// Builtin name or path to a geometry file.
        name: String,
    },
    /// Run an experiment from a TOML config and/or --key=value overrides.
    Run {
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "CONFIG | --KEY=VALUE")]
        args: Vec<String>,
    },
    /// Derive eta(N) or the momentum spectrum from a result directory.
    Analyze {
        dir: PathBuf,
        #[arg(long, default_value = "eta")]
        mode: String,
        /// Directory for the analysis CSV (default: the result directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the data behind one figure at desk scale.
    Reproduce {
        #[arg(value_name = "ID")]
        id: String,
        #[arg(long, default_value_t = REPRODUCE_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn set_workers(n: usize) -> Result<(), CliError> {
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Runtime(e.to_string()))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let mut workers = cli.workers;
    match cli.command {
        Command::Geometry { name } => print!("{}", cmd_geometry(&name)?),
        Command::Run { args } => {
            let (flags, files): (Vec<String>, Vec<String>) = args.into_iter().partition(|a| a.starts_with("--"));
            if files.len() > 1 {
                return Err(CliError::Config(format!("expected at most one config file, got {}", files.len())));
            }
            let mut overrides = Vec::new();
            for f in flags {
                match f.strip_prefix("--workers=") {
                    Some(n) => workers = Some(n.parse().map_err(|_| CliError::Config(format!("bad worker count `{n}`")))?),
                    None => overrides.push(f),
                }
            }
            let cfg = load_config(files.first().map(PathBuf::from).as_deref(), &overrides)?;
            if let Some(n) = workers {
                set_workers(n)?;
            }
            println!("{}", cmd_run(&cfg)?.display());
            return Ok(());
        }
        Command::Analyze { dir, mode, out } => {
            let (path, summary) = cmd_analyze(&dir, mode.parse::<AnalyzeMode>()?, out.as_deref())?;
            println!("{}\n{summary}", path.display());
        }
        Command::Reproduce { id, seed, out } => {
            if !FIGURES.contains(&id.as_str()) {
                return Err(CliError::Config(format!("unknown figure id `{id}`; valid ids: {}", FIGURES.join(", "))));
            }
            if let Some(n) = workers {
                set_workers(n)?;
            }
            let out = out.unwrap_or_else(|| output_root().join("reproduce"));
            for f in cmd_reproduce(&id, &out, seed)? {
                println!("{}", f.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fkh: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
