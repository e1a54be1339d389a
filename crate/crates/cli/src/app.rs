use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::{cmd_bounds, cmd_reproduce, cmd_run, cmd_sweep, Options, RunReport};
use crate::error::CliError;
use crate::recipes;

#[derive(Debug, Parser)]
#[command(name = "replicax", version, about = "Replica-exchange GD/LD optimizer experiments")]
struct Cli {
    /// Output root (default: $REPLICAX_OUT, else ./replicax-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for replications.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Base seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Snapshot stride, overriding the config.
    #[arg(long, global = true)]
    stride: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one replicated experiment.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run every cell of a sweep grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Rerun a figure from its built-in presets.
    Reproduce {
        /// fig2, fig3, fig4, fig5, fig7, fig8, fig9, fig10, fig11 or fig12.
        figure: String,
        /// Print the presets instead of running them.
        #[arg(long)]
        dump: bool,
    },
    /// Print the convergence certificate for a bounds file.
    Bounds {
        #[arg(long)]
        config: PathBuf,
    },
}

fn print_reports(reports: &[RunReport]) {
    for r in reports {
        for c in &r.cells {
            let s = &c.summary;
            let median = s.median_first_hit().map_or("none".to_string(), |m| m.to_string());
            println!(
                "{}/{}: {}/{} hits, median first hit {}, {} diverged",
                r.experiment,
                c.plan.label,
                s.hit_count(),
                s.replications.len(),
                median,
                s.diverged()
            );
        }
        println!("wrote {}", r.dir.display());
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let opts = Options {
        out: cli.out,
        seed: cli.seed,
        stride: cli.stride,
    };
    match cli.command {
        Command::Run { config } => print_reports(&[cmd_run(&config, &opts)?]),
        Command::Sweep { config } => print_reports(&[cmd_sweep(&config, &opts)?]),
        Command::Reproduce { figure, dump: true } => {
            for name in recipes::preset_names(&figure)? {
                println!("# preset {name}\n{}", recipes::preset_text(name).unwrap_or_default());
            }
        }
        Command::Reproduce { figure, dump: false } => print_reports(&cmd_reproduce(&figure, &opts)?),
        Command::Bounds { config } => {
            let report = cmd_bounds(&config)?;
            print!("{}", report.to_text());
            let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Usage(e.to_string()))?;
            println!("{json}");
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.jobs {
        Some(0) => Err(CliError::Usage("--jobs must be >= 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli)),
            Err(e) => Err(CliError::Usage(format!("cannot start {n} workers: {e}"))),
        },
        None => dispatch(cli),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
