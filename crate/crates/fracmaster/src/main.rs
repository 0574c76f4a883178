use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fracmaster::{run, ExperimentConfig, ExperimentKind, RunOptions, ToleranceProfile};

#[derive(Parser)]
#[command(name = "fracmaster", version, about = "Solve and analyze fractional space-time master equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment config (TOML). Optional for `validate`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; overrides `output` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Profile::Default)]
    tolerance_profile: Profile,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    Solve,
    Kernel,
    Extend,
    Regularity,
    Halfspace,
    Validate,
}

#[derive(ValueEnum, Clone, Copy)]
enum Profile {
    Strict,
    Default,
}

fn kind_of(c: Command) -> ExperimentKind {
    match c {
        Command::Solve => ExperimentKind::Solve,
        Command::Kernel => ExperimentKind::Kernel,
        Command::Extend => ExperimentKind::Extend,
        Command::Regularity => ExperimentKind::Regularity,
        Command::Halfspace => ExperimentKind::Halfspace,
        Command::Validate => ExperimentKind::Validate,
    }
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let kind = kind_of(cli.command);
    let config = match (&cli.config, kind) {
        (Some(path), _) => match ExperimentConfig::from_path(path) {
            Ok(c) => c,
            Err(e) => return usage(e),
        },
        (None, ExperimentKind::Validate) => ExperimentConfig::validate_only(),
        (None, _) => return usage("--config is required"),
    };
    if config.kind != kind {
        return usage(format!("config kind is '{}' but the subcommand is '{}'", config.kind.name(), kind.name()));
    }
    let Some(out) = cli.out.clone().or_else(|| config.output.clone()) else {
        return usage("no output directory (use --out or set `output`)");
    };
    let opts = RunOptions {
        out,
        profile: match cli.tolerance_profile {
            Profile::Strict => ToleranceProfile::Strict,
            Profile::Default => ToleranceProfile::Default,
        },
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return usage("--threads must be positive");
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => return usage(format!("thread pool: {e}")),
    };

    match pool.install(|| run(&config, &opts)) {
        Ok(outcome) => {
            if let Some(rows) = &outcome.acceptance {
                for r in rows {
                    println!("{}", r.line());
                }
                let failed = rows.iter().filter(|r| !r.passed).count();
                println!("{} of {} criteria passed", rows.len() - failed, rows.len());
            }
            println!("wrote {} artifacts and manifest.json to {}", outcome.artifacts, opts.out.display());
            if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
