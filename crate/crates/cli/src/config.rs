//! Experiment config files (TOML).
//!
//! ```toml
//! [objective]
//! kind = "mixture"
//! weight_seed = 3866
//!
//! [run]
//! mode = "gdxld"
//! h = 0.1
//! gamma = 1.0
//! n_iter = 2000
//! x0 = [0.0, 0.0]
//! y0 = [1.0, 1.0]
//!
//! [experiment]
//! name = "fig2"
//! replications = 100
//! seed = 1
//!
//! [output]
//! stride = 1
//! ```

use std::path::{Path, PathBuf};

use replicax_core::harness::{ExperimentSpec, InitRule, ObjectiveSpec, SuccessSpec, SweepAxis};
use replicax_core::optimizers::{Mode, RunConfig};
use replicax_core::Point;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A complete experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub objective: ObjectiveSpec,
    pub run: RunSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Run fields with the names of [`RunConfig`]. Omitted optional fields take
/// the mode defaults; a missing `x0` is the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub mode: Mode,
    pub h: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub t0: Option<f64>,
    pub n_iter: usize,
    #[serde(default)]
    pub batch_size: Option<usize>,
    #[serde(default)]
    pub exchange_radius: Option<f64>,
    #[serde(default)]
    pub x0: Option<Point>,
    #[serde(default)]
    pub y0: Option<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "one")]
    pub replications: usize,
    /// Base seed of every replication stream.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub success: SuccessSpec,
    #[serde(default)]
    pub init: InitRule,
    #[serde(default)]
    pub axes: Vec<SweepAxis>,
}

fn default_name() -> String {
    "experiment".into()
}

fn one() -> usize {
    1
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            name: default_name(),
            replications: 1,
            seed: 0,
            success: SuccessSpec::default(),
            init: InitRule::default(),
            axes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// Curves, `replications.csv` and `trace.csv`.
    Csv,
    /// `summary.json`.
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Output root; the `--out` flag wins over it.
    #[serde(default)]
    pub dir: Option<PathBuf>,
    /// Snapshot stride; defaults to the run's own default.
    #[serde(default)]
    pub stride: Option<usize>,
    #[serde(default = "all_formats")]
    pub formats: Vec<Format>,
    /// Write the full trace of replication 0 of every cell.
    #[serde(default = "yes")]
    pub trace: bool,
}

fn all_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

fn yes() -> bool {
    true
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: None,
            stride: None,
            formats: all_formats(),
            trace: true,
        }
    }
}

impl OutputSection {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

impl ConfigFile {
    /// Parses and validates `text`; `origin` names the source in errors.
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let cfg: ConfigFile = toml::from_str(text).map_err(|e| CliError::Parse {
            path: origin.into(),
            reason: e.to_string(),
        })?;
        cfg.to_spec()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
        ConfigFile::parse(&text, &path.display().to_string())
    }

    /// The config with command-line overrides applied.
    pub fn with_overrides(mut self, seed: Option<u64>, stride: Option<usize>) -> Self {
        if let Some(s) = seed {
            self.experiment.seed = s;
        }
        if stride.is_some() {
            self.output.stride = stride;
        }
        self
    }

    /// The validated harness spec.
    pub fn to_spec(&self) -> Result<ExperimentSpec, CliError> {
        let r = &self.run;
        let x0 = match &r.x0 {
            Some(x) => x.clone(),
            None => Point::zeros(self.objective.dim())?,
        };
        let mut run = RunConfig::new(r.mode, r.h, r.gamma, r.n_iter, x0).with_seed(self.experiment.seed);
        run.y0 = r.y0.clone();
        if let Some(t0) = r.t0 {
            run.t0 = t0;
        }
        if r.batch_size.is_some() {
            run.batch_size = r.batch_size;
        }
        run.exchange_radius = r.exchange_radius;
        run.snapshot_stride = self.output.stride;
        let e = &self.experiment;
        let spec = ExperimentSpec {
            name: e.name.clone(),
            objective: self.objective.clone(),
            run,
            replications: e.replications,
            base_seed: e.seed,
            success: e.success.clone(),
            init: e.init.clone(),
            axes: e.axes.clone(),
        };
        spec.validate()?;
        spec.cells()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIN: &str = r#"
[objective]
kind = "quadratic"
d = 2

[run]
mode = "gd"
h = 0.1
n_iter = 10
x0 = [1.0, 1.0]
"#;

    #[test]
    fn defaults_fill_in() {
        let cfg = ConfigFile::parse(MIN, "min").unwrap();
        assert_eq!(cfg.experiment.replications, 1);
        assert_eq!(cfg.experiment.name, "experiment");
        assert!(cfg.output.trace && cfg.output.wants(Format::Csv) && cfg.output.wants(Format::Json));
        let spec = cfg.to_spec().unwrap();
        assert_eq!(spec.run.t0, 0.0);
        assert_eq!(spec.run.n_iter, 10);
    }

    #[test]
    fn online_defaults_and_overrides() {
        let text = r#"
[objective]
kind = "quadratic"
d = 1

[run]
mode = "sgld"
h = 0.1
gamma = 0.5
n_iter = 10
batch_size = 4
"#;
        let cfg = ConfigFile::parse(text, "t").unwrap().with_overrides(Some(9), Some(5));
        let spec = cfg.to_spec().unwrap();
        assert_eq!(spec.run.t0, 0.05);
        assert_eq!(spec.run.x0.coords(), &[0.0]);
        assert_eq!(spec.base_seed, 9);
        assert_eq!(spec.run.snapshot_stride, Some(5));
    }

    #[test]
    fn unknown_keys_rejected() {
        for bad in [
            MIN.replace("n_iter = 10", "n_iter = 10\nstep = 3"),
            format!("{MIN}\n[output]\nfoo = 1\n"),
            format!("{MIN}\n[extra]\n"),
            MIN.replace("d = 2", "d = 2\nsigma = 1.0"),
        ] {
            assert!(matches!(ConfigFile::parse(&bad, "x"), Err(CliError::Parse { .. })), "{bad}");
        }
    }

    #[test]
    fn run_invariants_checked_at_load() {
        let bad = MIN.replace("h = 0.1", "h = -0.1");
        match ConfigFile::parse(&bad, "x") {
            Err(CliError::Validation(replicax_core::Error::Config { field, .. })) => assert_eq!(field, "h"),
            other => panic!("{other:?}"),
        }
        let bad = MIN.replace("x0 = [1.0, 1.0]", "x0 = [1.0]");
        assert_eq!(ConfigFile::parse(&bad, "x").unwrap_err().exit_code(), 2);
        let bad = format!("{MIN}\n[[experiment.axes]]\nname = \"beta\"\nvalues = [1.0]\n");
        assert!(ConfigFile::parse(&bad, "x").unwrap_err().to_string().contains("beta"));
    }

    #[test]
    fn missing_file_names_the_path() {
        let err = ConfigFile::load(Path::new("/no/such/config.toml")).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("/no/such/config.toml"));
    }

    #[test]
    fn mixture_tables_parse() {
        let text = r#"
[objective]
kind = "mixture"
weight_seed = 7
weight_law = { law = "uniform", lo = 0.5, hi = 1.5 }

[run]
mode = "gdxld"
h = 0.1
gamma = 1.0
n_iter = 5

[experiment]
init = { rule = "uniform_on_region" }
success = { tol = 0.01 }

[[experiment.axes]]
name = "gamma"
values = [0.5, 1.0]
"#;
        let spec = ConfigFile::parse(text, "m").unwrap().to_spec().unwrap();
        assert_eq!(spec.cells().unwrap().len(), 2);
        assert_eq!(spec.success.tol, 0.01);
    }
}
