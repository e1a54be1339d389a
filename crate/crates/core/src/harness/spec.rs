use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::{
    make_gaussian_mixture, make_griewank, make_kde_objective, make_quadratic, make_rastrigin, regularize_quadratic,
    BoxPenalty, ExactOracle, GaussianMixtureSpec, KdeOracle, MixtureComponent, Objective, SharedObjective, StochasticOracle,
    WeightLaw,
};
use crate::optimizers::{RunConfig, Target};
use crate::point::{norm_sq, Point};
use crate::rng::RngStream;

/// Serializable description of an objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    Quadratic {
        d: usize,
        #[serde(default)]
        regularize: Option<f64>,
    },
    Rastrigin {
        d: usize,
        #[serde(default)]
        regularize: Option<f64>,
    },
    Griewank {
        d: usize,
        #[serde(default)]
        regularize: Option<f64>,
    },
    /// Explicit `components`, or the 25-mode grid with weights from
    /// `weight_seed` drawn from `weight_law`. `lower`/`upper` override the
    /// penalty box.
    Mixture {
        #[serde(default)]
        weight_seed: u64,
        #[serde(default)]
        weight_law: WeightLaw,
        #[serde(default)]
        components: Option<Vec<MixtureComponent>>,
        #[serde(default)]
        lower: Option<Vec<f64>>,
        #[serde(default)]
        upper: Option<Vec<f64>>,
        #[serde(default)]
        regularize: Option<f64>,
    },
    /// Mini-batch KDE over data drawn from a mixture.
    Kde {
        #[serde(default)]
        weight_seed: u64,
        #[serde(default)]
        weight_law: WeightLaw,
        #[serde(default)]
        components: Option<Vec<MixtureComponent>>,
        #[serde(default)]
        lower: Option<Vec<f64>>,
        #[serde(default)]
        upper: Option<Vec<f64>>,
        sigma: f64,
        batch_size: usize,
    },
}

/// An objective ready to run, with its resolved global minimizer.
#[derive(Clone)]
pub struct BuiltObjective {
    pub exact: SharedObjective,
    pub oracle: Arc<dyn StochasticOracle>,
    pub minimizer: Option<Point>,
    pub min_value: Option<f64>,
    kde: Option<KdeOracle>,
}

impl BuiltObjective {
    /// The same objective with its oracle drawing `batch` samples per
    /// estimate. Only KDE oracles can be resized.
    pub fn with_batch(&self, batch: Option<usize>) -> Result<BuiltObjective> {
        match (batch, &self.kde) {
            (None, _) => Ok(self.clone()),
            (Some(b), _) if b == self.oracle.batch_size() => Ok(self.clone()),
            (Some(b), Some(k)) => {
                let k = k.with_batch_size(b)?;
                Ok(BuiltObjective {
                    oracle: Arc::new(k.clone()),
                    kde: Some(k),
                    ..self.clone()
                })
            }
            (Some(b), None) => Err(Error::config(
                "batch_size",
                format!("{} draws a fixed {} sample(s) per estimate, got {b}", self.oracle.name(), self.oracle.batch_size()),
            )),
        }
    }

    pub fn dim(&self) -> usize {
        self.exact.dim()
    }

    /// The exact objective for offline configs, the oracle for online ones.
    pub fn target(&self, cfg: &RunConfig) -> Target<'_> {
        if cfg.mode.is_online() {
            Target::Stochastic(self.oracle.as_ref())
        } else {
            Target::Exact(self.exact.as_ref())
        }
    }
}

fn mixture_spec(
    weight_seed: u64,
    weight_law: WeightLaw,
    components: &Option<Vec<MixtureComponent>>,
    lower: &Option<Vec<f64>>,
    upper: &Option<Vec<f64>>,
) -> Result<GaussianMixtureSpec> {
    let mut spec = match components {
        Some(c) => {
            let d = c.first().map(|c| c.mean.len()).ok_or_else(|| Error::config("components", "empty list"))?;
            GaussianMixtureSpec {
                components: c.clone(),
                penalty: BoxPenalty::cube(d, -1.0, 5.0)?,
            }
        }
        None => GaussianMixtureSpec::grid(5, 0.1, weight_seed, weight_law)?,
    };
    match (lower, upper) {
        (Some(lo), Some(hi)) => spec.penalty = BoxPenalty::new(lo.clone(), hi.clone())?,
        (None, None) => {}
        _ => return Err(Error::config("lower", "lower and upper must be given together")),
    }
    spec.validate()?;
    Ok(spec)
}

fn regularized(base: SharedObjective, lambda: Option<f64>) -> Result<SharedObjective> {
    Ok(match lambda {
        Some(l) => Arc::new(regularize_quadratic(base, l)?),
        None => base,
    })
}

/// Gradient descent from each start until the step is below 1e-13; returns
/// the lowest point reached.
pub fn polish_minimizer(obj: &dyn Objective, starts: &[Vec<f64>], h: f64) -> Result<(Point, f64)> {
    let mut best: Option<(Point, f64)> = None;
    let mut g = vec![0.0; obj.dim()];
    for s in starts {
        let mut x = s.clone();
        for _ in 0..200_000 {
            obj.gradient_into(&x, &mut g);
            if h * h * norm_sq(&g) <= 1e-26 {
                break;
            }
            for (xi, gi) in x.iter_mut().zip(&g) {
                *xi -= h * gi;
            }
        }
        let f = obj.value(&x);
        if best.as_ref().is_none_or(|(_, b)| f < *b) {
            best = Some((Point::new(x)?, f));
        }
    }
    best.ok_or_else(|| Error::precondition("polish_minimizer", "no starting points"))
}

impl ObjectiveSpec {
    pub fn dim(&self) -> usize {
        match self {
            ObjectiveSpec::Quadratic { d, .. } | ObjectiveSpec::Rastrigin { d, .. } | ObjectiveSpec::Griewank { d, .. } => {
                *d
            }
            ObjectiveSpec::Mixture { components, .. } | ObjectiveSpec::Kde { components, .. } => components
                .as_ref()
                .and_then(|c| c.first())
                .map_or(2, |c| c.mean.len()),
        }
    }

    /// The mixture behind a `Mixture` or `Kde` objective.
    pub fn mixture(&self) -> Result<Option<GaussianMixtureSpec>> {
        match self {
            ObjectiveSpec::Mixture {
                weight_seed,
                weight_law,
                components,
                lower,
                upper,
                ..
            }
            | ObjectiveSpec::Kde {
                weight_seed,
                weight_law,
                components,
                lower,
                upper,
                ..
            } => mixture_spec(*weight_seed, *weight_law, components, lower, upper).map(Some),
            _ => Ok(None),
        }
    }

    pub fn build(&self) -> Result<BuiltObjective> {
        let mut kde = None;
        let (exact, oracle): (SharedObjective, Option<Arc<dyn StochasticOracle>>) = match self {
            ObjectiveSpec::Quadratic { d, regularize } => (regularized(Arc::new(make_quadratic(*d)?), *regularize)?, None),
            ObjectiveSpec::Rastrigin { d, regularize } => (regularized(Arc::new(make_rastrigin(*d)?), *regularize)?, None),
            ObjectiveSpec::Griewank { d, regularize } => (regularized(Arc::new(make_griewank(*d)?), *regularize)?, None),
            ObjectiveSpec::Mixture { regularize, .. } => {
                let spec = self.mixture()?.expect("mixture variant");
                (regularized(Arc::new(make_gaussian_mixture(spec)?), *regularize)?, None)
            }
            ObjectiveSpec::Kde { sigma, batch_size, .. } => {
                let spec = self.mixture()?.expect("kde variant");
                let (exact, oracle) = make_kde_objective(&spec, *sigma, *batch_size)?;
                kde = Some(oracle.clone());
                let oracle: Arc<dyn StochasticOracle> = Arc::new(oracle);
                (Arc::new(exact), Some(oracle))
            }
        };
        let (minimizer, min_value) = match self.mixture()? {
            Some(spec) => {
                let starts: Vec<_> = spec.components.into_iter().map(|c| c.mean).collect();
                let (x, f) = polish_minimizer(exact.as_ref(), &starts, 0.05)?;
                (Some(x), Some(f))
            }
            // a ridge term is minimized at the origin too
            None => {
                let x = Point::zeros(exact.dim())?;
                let f = exact.value(&x);
                (Some(x), Some(f))
            }
        };
        let oracle = oracle.unwrap_or_else(|| Arc::new(ExactOracle::new(exact.clone())));
        Ok(BuiltObjective {
            exact,
            oracle,
            minimizer,
            min_value,
            kde,
        })
    }

    /// Box the objective is explored in.
    pub fn region(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let d = self.dim();
        Ok(match self {
            ObjectiveSpec::Quadratic { .. } => (vec![-5.0; d], vec![5.0; d]),
            ObjectiveSpec::Rastrigin { .. } | ObjectiveSpec::Griewank { .. } => (vec![-5.0; d], vec![5.0; d]),
            ObjectiveSpec::Mixture { .. } | ObjectiveSpec::Kde { .. } => {
                let p = self.mixture()?.expect("mixture variant").penalty;
                (p.lower.clone(), p.upper.clone())
            }
        })
    }
}

/// How each replication's starting points are chosen.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitRule {
    /// `x0`/`y0` from the run template.
    #[default]
    Fixed,
    /// X₀ and Y₀ drawn independently and uniformly on the box.
    Uniform { lower: Vec<f64>, upper: Vec<f64> },
    /// As `Uniform`, on the objective's own box.
    UniformOnRegion,
}

impl InitRule {
    /// Replaces `UniformOnRegion` by the explicit box of `objective`.
    pub fn resolve(&self, objective: &ObjectiveSpec) -> Result<InitRule> {
        Ok(match self {
            InitRule::UniformOnRegion => {
                let (lower, upper) = objective.region()?;
                InitRule::Uniform { lower, upper }
            }
            other => other.clone(),
        })
    }

    pub(crate) fn apply(&self, cfg: &mut RunConfig, rng: &mut RngStream) -> Result<()> {
        if let InitRule::Uniform { lower, upper } = self {
            let draw = |rng: &mut RngStream| {
                Point::new(lower.iter().zip(upper).map(|(lo, hi)| rng.uniform_in(*lo, *hi)).collect())
            };
            cfg.x0 = draw(rng)?;
            if cfg.mode.is_coupled() {
                cfg.y0 = Some(draw(rng)?);
            }
        }
        Ok(())
    }

    fn validate(&self, d: usize) -> Result<()> {
        if let InitRule::Uniform { lower, upper } = self {
            if lower.len() != d || upper.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: lower.len().max(upper.len()),
                });
            }
            if lower.iter().zip(upper).any(|(l, u)| !(l < u) || !l.is_finite() || !u.is_finite()) {
                return Err(Error::config("init", "uniform box needs finite lower < upper"));
            }
        }
        Ok(())
    }
}

/// What counts as success for a replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuccessSpec {
    /// Euclidean radius around x*.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Allowed gap F(X_N) − F(x*).
    #[serde(default = "default_tol")]
    pub f_tol: f64,
    /// Overrides the resolved minimizer.
    #[serde(default)]
    pub x_star: Option<Point>,
    /// End each run at its first hit.
    #[serde(default)]
    pub stop_at_hit: bool,
}

fn default_tol() -> f64 {
    1e-3
}

impl Default for SuccessSpec {
    fn default() -> Self {
        SuccessSpec {
            tol: default_tol(),
            f_tol: default_tol(),
            x_star: None,
            stop_at_hit: false,
        }
    }
}

/// Names accepted as sweep axes.
pub const AXIS_NAMES: [&str; 7] = ["h", "gamma", "t0", "n_iter", "batch_size", "exchange_radius", "snapshot_stride"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub name: String,
    pub values: Vec<f64>,
}

fn as_count(name: &str, v: f64) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v < 1e15 {
        Ok(v as usize)
    } else {
        Err(Error::config(name, format!("must be a positive integer, got {v}")))
    }
}

/// Sets the run field `name` to `value`.
pub fn set_axis(cfg: &mut RunConfig, name: &str, value: f64) -> Result<()> {
    match name {
        "h" => cfg.h = value,
        "gamma" => cfg.gamma = value,
        "t0" => cfg.t0 = value,
        "n_iter" => cfg.n_iter = as_count(name, value)?,
        "batch_size" => cfg.batch_size = Some(as_count(name, value)?),
        "exchange_radius" => cfg.exchange_radius = (!value.is_infinite()).then_some(value),
        "snapshot_stride" => cfg.snapshot_stride = Some(as_count(name, value)?),
        _ => {
            return Err(Error::config(
                name,
                format!("unknown sweep axis `{name}`; expected one of {}", AXIS_NAMES.join(", ")),
            ))
        }
    }
    Ok(())
}

/// A replicated experiment, optionally swept over up to two run fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub objective: ObjectiveSpec,
    pub run: RunConfig,
    pub replications: usize,
    pub base_seed: u64,
    #[serde(default)]
    pub success: SuccessSpec,
    #[serde(default)]
    pub init: InitRule,
    #[serde(default)]
    pub axes: Vec<SweepAxis>,
}

/// One point of the sweep grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellPlan {
    pub index: usize,
    pub label: String,
    pub values: Vec<(String, f64)>,
    pub config: RunConfig,
}

fn fmt_axis(v: f64) -> String {
    let s = format!("{v}");
    s.replace('-', "m")
}

impl ExperimentSpec {
    pub fn new(name: impl Into<String>, objective: ObjectiveSpec, run: RunConfig, replications: usize, base_seed: u64) -> Self {
        ExperimentSpec {
            name: name.into(),
            objective,
            run,
            replications,
            base_seed,
            success: SuccessSpec::default(),
            init: InitRule::Fixed,
            axes: Vec::new(),
        }
    }

    pub fn with_axis(mut self, name: &str, values: &[f64]) -> Self {
        self.axes.push(SweepAxis {
            name: name.into(),
            values: values.to_vec(),
        });
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::config("replications", "must be >= 1"));
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::config("name", "must be a non-empty path segment"));
        }
        if self.axes.len() > 2 {
            return Err(Error::config("axes", format!("at most 2 sweep axes, got {}", self.axes.len())));
        }
        for (i, a) in self.axes.iter().enumerate() {
            if !AXIS_NAMES.contains(&a.name.as_str()) {
                return Err(Error::config(
                    a.name.clone(),
                    format!("unknown sweep axis `{}`; expected one of {}", a.name, AXIS_NAMES.join(", ")),
                ));
            }
            if a.values.is_empty() {
                return Err(Error::config(a.name.clone(), "sweep axis has no values"));
            }
            if self.axes[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::config(a.name.clone(), "duplicate sweep axis"));
            }
        }
        let d = self.objective.dim();
        if d == 0 {
            return Err(Error::ZeroDimension);
        }
        if self.run.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: self.run.dim(),
            });
        }
        self.init.validate(d)?;
        if !(self.success.tol > 0.0) || !(self.success.f_tol > 0.0) {
            return Err(Error::config("success", "tol and f_tol must be > 0"));
        }
        if let Some(x) = &self.success.x_star {
            if x.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: x.dim() });
            }
        }
        for cell in self.cells()? {
            cell.config.validate()?;
        }
        Ok(())
    }

    /// Cartesian product of the axes, first axis slowest. No axes gives one
    /// cell holding the template.
    pub fn cells(&self) -> Result<Vec<CellPlan>> {
        let mut cells = vec![CellPlan {
            index: 0,
            label: "base".into(),
            values: Vec::new(),
            config: self.run.clone(),
        }];
        for axis in &self.axes {
            let mut next = Vec::with_capacity(cells.len() * axis.values.len());
            for c in &cells {
                for &v in &axis.values {
                    let mut config = c.config.clone();
                    set_axis(&mut config, &axis.name, v)?;
                    let mut values = c.values.clone();
                    values.push((axis.name.clone(), v));
                    next.push(CellPlan {
                        index: 0,
                        label: String::new(),
                        values,
                        config,
                    });
                }
            }
            cells = next;
        }
        if !self.axes.is_empty() {
            for (i, c) in cells.iter_mut().enumerate() {
                c.index = i;
                c.label = c
                    .values
                    .iter()
                    .map(|(k, v)| format!("{k}={}", fmt_axis(*v)))
                    .collect::<Vec<_>>()
                    .join("_");
            }
        }
        Ok(cells)
    }
}
