//! The four commands. Output layout under the output root:
//!
//! ```text
//! {experiment}/manifest.json
//! {experiment}/{cell}/success.csv | hit_fraction.csv | mean_f.csv
//! {experiment}/{cell}/replications.csv
//! {experiment}/{cell}/summary.json
//! {experiment}/{cell}/trace.csv        (replication 0)
//! ```
//!
//! `{cell}` is `base` without sweep axes, else e.g. `h=0.1_gamma=2`.

use std::fs;
use std::path::{Path, PathBuf};

use replicax_core::harness::{
    run_cell, write_json, write_summary_csv, write_trace, CellPlan, CellResult, ExperimentSpec,
};
use replicax_core::objectives::TheoryParams;
use replicax_core::theory::{BoundInputs, BoundReport};
use replicax_core::{Error, Point};
use serde::{Deserialize, Serialize};

use crate::config::{ConfigFile, Format};
use crate::error::CliError;
use crate::recipes;

pub const OUT_ENV: &str = "REPLICAX_OUT";
pub const DEFAULT_OUT: &str = "replicax-out";

/// Command-line overrides shared by the experiment commands.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub stride: Option<usize>,
}

/// What one experiment produced.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub experiment: String,
    pub dir: PathBuf,
    pub cells: Vec<CellResult>,
}

impl RunReport {
    pub fn diverged(&self) -> usize {
        self.cells.iter().map(|c| c.summary.diverged()).sum()
    }

    pub fn replications(&self) -> usize {
        self.cells.iter().map(|c| c.summary.replications.len()).sum()
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a ConfigFile,
    spec: &'a ExperimentSpec,
    x_star: Option<&'a Point>,
    f_star: Option<f64>,
    cells: Vec<&'a CellPlan>,
}

/// Output root: `--out`, then the config's `output.dir`, then
/// `$REPLICAX_OUT`, then `replicax-out`.
pub fn output_root(opts: &Options, cfg: &ConfigFile) -> PathBuf {
    opts.out
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| {
        CliError::Io(Error::Io {
            path: dir.display().to_string(),
            reason: e.to_string(),
        })
    })
}

/// Runs every cell of `cfg` and writes its outputs. Divergent replications
/// are recorded, not raised; see [`check_divergence`].
pub fn execute(cfg: &ConfigFile, opts: &Options) -> Result<RunReport, CliError> {
    let cfg = cfg.clone().with_overrides(opts.seed, opts.stride);
    let spec = cfg.to_spec()?;
    let built = spec.objective.build()?;
    let plans = spec.cells()?;
    let dir = output_root(opts, &cfg).join(&spec.name);
    create_dir(&dir)?;
    write_json(
        &dir.join("manifest.json"),
        &Manifest {
            tool: "replicax",
            version: env!("CARGO_PKG_VERSION"),
            config: &cfg,
            spec: &spec,
            x_star: built.minimizer.as_ref(),
            f_star: built.min_value,
            cells: plans.iter().collect(),
        },
    )?;
    let csv = cfg.output.wants(Format::Csv);
    let mut cells = Vec::with_capacity(plans.len());
    for plan in plans {
        let (summary, trace) = run_cell(&spec, &built, &plan, cfg.output.trace && csv)?;
        let cell_dir = dir.join(&plan.label);
        create_dir(&cell_dir)?;
        if csv {
            write_summary_csv(&cell_dir, &summary)?;
        }
        if cfg.output.wants(Format::Json) {
            write_json(&cell_dir.join("summary.json"), &summary)?;
        }
        if let Some(t) = trace {
            write_trace(&cell_dir.join("trace.csv"), &t)?;
        }
        cells.push(CellResult { plan, summary });
    }
    Ok(RunReport {
        experiment: spec.name,
        dir,
        cells,
    })
}

/// Exit-code-3 error for the first report with divergent replications.
pub fn check_divergence(reports: &[RunReport]) -> Result<(), CliError> {
    match reports.iter().find(|r| r.diverged() > 0) {
        Some(r) => Err(CliError::Divergence {
            experiment: r.experiment.clone(),
            diverged: r.diverged(),
            total: r.replications(),
            dir: r.dir.display().to_string(),
        }),
        None => Ok(()),
    }
}

/// A single replicated run; sweep axes are refused.
pub fn cmd_run(config: &Path, opts: &Options) -> Result<RunReport, CliError> {
    let cfg = ConfigFile::load(config)?;
    if !cfg.experiment.axes.is_empty() {
        return Err(CliError::Validation(Error::Config {
            field: "experiment.axes".into(),
            reason: "this config sweeps; use the `sweep` command".into(),
        }));
    }
    let report = execute(&cfg, opts)?;
    check_divergence(std::slice::from_ref(&report))?;
    Ok(report)
}

/// Every cell of the config's sweep grid.
pub fn cmd_sweep(config: &Path, opts: &Options) -> Result<RunReport, CliError> {
    let cfg = ConfigFile::load(config)?;
    let report = execute(&cfg, opts)?;
    check_divergence(std::slice::from_ref(&report))?;
    Ok(report)
}

/// Runs the presets of a figure recipe.
pub fn cmd_reproduce(figure: &str, opts: &Options) -> Result<Vec<RunReport>, CliError> {
    let reports = recipes::configs(figure)?
        .iter()
        .map(|cfg| execute(cfg, opts))
        .collect::<Result<Vec<_>, _>>()?;
    check_divergence(&reports)?;
    Ok(reports)
}

/// Bound-report input: regularity constants (inline or a named preset) plus
/// the certificate inputs.
///
/// ```toml
/// preset = "quadratic"
/// d = 2
///
/// [inputs]
/// gamma = 1.0
/// h = 0.1
/// eps = 0.01
/// delta = 0.1
/// D = 1.0
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsFile {
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default)]
    pub params: Option<TheoryParams>,
    pub inputs: BoundInputs,
}

impl BoundsFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse {
            path: origin.into(),
            reason: e.to_string(),
        })
    }

    pub fn theory_params(&self) -> Result<TheoryParams, CliError> {
        let invalid = |reason: String| {
            CliError::Validation(Error::Config {
                field: "params".into(),
                reason,
            })
        };
        match (&self.preset, &self.params) {
            (Some(name), None) => {
                let d = self.d.ok_or_else(|| invalid("a preset needs `d`".into()))?;
                TheoryParams::preset(name, d).ok_or_else(|| invalid(format!("unknown preset `{name}`")))
            }
            (None, Some(p)) => Ok(*p),
            _ => Err(invalid("give exactly one of `preset` or [params]".into())),
        }
    }
}

/// The certificate for a bounds file.
pub fn cmd_bounds(path: &Path) -> Result<BoundReport, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
    let file = BoundsFile::parse(&text, &path.display().to_string())?;
    Ok(BoundReport::compute(&file.theory_params()?, &file.inputs)?)
}
