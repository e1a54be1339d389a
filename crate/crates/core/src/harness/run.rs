use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::{BuiltObjective, CellPlan, ExperimentSpec};
use crate::error::{Error, Result};
use crate::objectives::StochasticOracle;
use crate::optimizers::{run, RunConfig};
use crate::point::Point;
use crate::rng::{derive_seed, RngStream};
use crate::trace::{EvalTally, SuccessCriterion, Trace};

/// Smallest snapshot iteration inside the ball of `crit` (0 when the run
/// starts inside it).
pub fn first_hit(trace: &Trace, crit: &SuccessCriterion) -> Option<usize> {
    if crit.within_ball(&trace.start) {
        return Some(0);
    }
    trace.snapshots.iter().find(|s| crit.within_ball(&s.x)).map(|s| s.n)
}

/// Per-replication outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replication {
    pub index: usize,
    pub seed: u64,
    /// Exact first iteration with ‖X_n − x*‖ ≤ tol.
    pub first_hit: Option<usize>,
    pub swaps: usize,
    pub final_f: f64,
    pub final_gap_ok: bool,
    /// Iterations with F(X_n) > F(X_{n−1}) among the recorded values.
    pub descent_violations: usize,
    pub iterations: usize,
    pub tally: EvalTally,
    /// Divergence or other runtime error; the replication is then left out
    /// of the curves.
    pub error: Option<String>,
}

/// Aggregates over the replications of one cell.
///
/// Curves are sampled at `n_grid` (multiples of the stride). A replication
/// stopped at its first hit contributes its final state to the later grid
/// points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub x_star: Option<Point>,
    pub f_star: Option<f64>,
    pub tol: f64,
    pub n_grid: Vec<usize>,
    /// P(‖X_n − x*‖ ≤ tol).
    pub success: Vec<f64>,
    /// P(first hit ≤ n).
    pub hit_fraction: Vec<f64>,
    /// E[F(X_n)] with the exact objective.
    pub mean_f: Vec<f64>,
    pub replications: Vec<Replication>,
    pub tally: EvalTally,
}

impl Summary {
    pub fn first_hits(&self) -> Vec<Option<usize>> {
        self.replications.iter().map(|r| r.first_hit).collect()
    }

    pub fn hit_count(&self) -> usize {
        self.replications.iter().filter(|r| r.first_hit.is_some()).count()
    }

    /// Hits at or before iteration `n`.
    pub fn hits_within(&self, n: usize) -> usize {
        self.replications.iter().filter(|r| r.first_hit.is_some_and(|h| h <= n)).count()
    }

    /// Median first hit, counting misses as +∞; `None` if the median is a miss.
    pub fn median_first_hit(&self) -> Option<f64> {
        let mut v: Vec<f64> = self
            .replications
            .iter()
            .map(|r| r.first_hit.map_or(f64::INFINITY, |h| h as f64))
            .collect();
        v.sort_by(f64::total_cmp);
        let k = v.len();
        if k == 0 {
            return None;
        }
        let m = if k % 2 == 1 { v[k / 2] } else { 0.5 * (v[k / 2 - 1] + v[k / 2]) };
        m.is_finite().then_some(m)
    }

    pub fn swap_counts(&self) -> Vec<usize> {
        self.replications.iter().map(|r| r.swaps).collect()
    }

    pub fn diverged(&self) -> usize {
        self.replications.iter().filter(|r| r.error.is_some()).count()
    }

    pub fn descent_violations(&self) -> usize {
        self.replications.iter().map(|r| r.descent_violations).sum()
    }
}

/// Result of one sweep cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub plan: CellPlan,
    pub summary: Summary,
}

struct RepData {
    rep: Replication,
    within: Vec<bool>,
    f: Vec<f64>,
    trace: Option<Trace>,
}

fn criterion(spec: &ExperimentSpec, built: &BuiltObjective) -> Result<Option<SuccessCriterion>> {
    let x_star = spec.success.x_star.clone().or_else(|| built.minimizer.clone());
    x_star
        .map(|x| {
            let f = built.exact.value(&x);
            SuccessCriterion::new(x, spec.success.tol, f, spec.success.f_tol)
        })
        .transpose()
}

fn one_replication(
    spec: &ExperimentSpec,
    built: &BuiltObjective,
    crit: Option<&SuccessCriterion>,
    template: &RunConfig,
    cell: usize,
    index: usize,
    keep: bool,
) -> Result<RepData> {
    let seed = derive_seed(spec.base_seed, &[cell as u64, index as u64]);
    let mut cfg = template.clone();
    cfg.seed = seed;
    let stream = RngStream::new(seed);
    spec.init.resolve(&spec.objective)?.apply(&mut cfg, &mut stream.split(2))?;
    if let Some(c) = crit {
        cfg = cfg.tracking(c.clone(), spec.success.stop_at_hit);
    }
    let grid = cfg.n_iter / cfg.stride();
    let exact = built.exact.as_ref();
    let mut rep = Replication {
        index,
        seed,
        first_hit: None,
        swaps: 0,
        final_f: f64::NAN,
        final_gap_ok: false,
        descent_violations: 0,
        iterations: 0,
        tally: EvalTally::default(),
        error: None,
    };
    let trace = match run(built.target(&cfg), &cfg, stream) {
        Ok(t) => t,
        Err(e @ Error::Divergence { .. }) => {
            rep.error = Some(e.to_string());
            return Ok(RepData {
                rep,
                within: Vec::new(),
                f: Vec::new(),
                trace: None,
            });
        }
        Err(e) => return Err(e),
    };
    let mut prev = trace.start_f;
    for r in &trace.records {
        if r.f_x > prev {
            rep.descent_violations += 1;
        }
        prev = r.f_x;
    }
    rep.first_hit = trace.tracked_hit;
    rep.swaps = trace.swap_count();
    rep.final_f = exact.value(&trace.terminal.x);
    rep.final_gap_ok = crit.is_some_and(|c| c.within_gap(rep.final_f));
    rep.iterations = trace.terminal.n;
    rep.tally = trace.tally;
    let mut within = Vec::with_capacity(grid);
    let mut f = Vec::with_capacity(grid);
    for k in 0..grid {
        let x = trace.snapshots.get(k).map_or(&trace.terminal.x, |s| &s.x);
        within.push(crit.is_some_and(|c| c.within_ball(x)));
        f.push(exact.value(x));
    }
    Ok(RepData {
        rep,
        within,
        f,
        trace: keep.then_some(trace),
    })
}

/// Runs every replication of one cell and aggregates them. With `keep_first`
/// the trace of replication 0 is returned too.
pub fn run_cell(
    spec: &ExperimentSpec,
    built: &BuiltObjective,
    plan: &CellPlan,
    keep_first: bool,
) -> Result<(Summary, Option<Trace>)> {
    let crit = criterion(spec, built)?;
    let cfg = &plan.config;
    let built = &built.with_batch(cfg.batch_size)?;
    let outcomes: Vec<RepData> = (0..spec.replications)
        .into_par_iter()
        .map(|i| one_replication(spec, built, crit.as_ref(), cfg, plan.index, i, keep_first && i == 0))
        .collect::<Result<_>>()?;
    let stride = cfg.stride();
    let grid = cfg.n_iter / stride;
    let n_grid: Vec<usize> = (1..=grid).map(|k| k * stride).collect();
    let ok: Vec<&RepData> = outcomes.iter().filter(|o| o.rep.error.is_none()).collect();
    let m = ok.len() as f64;
    let success = (0..grid).map(|k| ok.iter().filter(|o| o.within[k]).count() as f64 / m).collect();
    let mean_f = (0..grid).map(|k| ok.iter().map(|o| o.f[k]).sum::<f64>() / m).collect();
    let hit_fraction = n_grid
        .iter()
        .map(|&n| ok.iter().filter(|o| o.rep.first_hit.is_some_and(|h| h <= n)).count() as f64 / m)
        .collect();
    let mut tally = EvalTally::default();
    for o in &outcomes {
        tally.add(&o.rep.tally);
    }
    let mut first = None;
    let mut replications = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        if o.trace.is_some() {
            first = o.trace;
        }
        replications.push(o.rep);
    }
    let summary = Summary {
        x_star: crit.as_ref().map(|c| c.x_star.clone()),
        f_star: crit.as_ref().map(|c| c.f_star),
        tol: spec.success.tol,
        n_grid,
        success,
        hit_fraction,
        mean_f,
        replications,
        tally,
    };
    Ok((summary, first))
}

/// The template run (no axes applied), replicated `spec.replications` times.
pub fn run_replications(spec: &ExperimentSpec) -> Result<Summary> {
    let base = ExperimentSpec {
        axes: Vec::new(),
        ..spec.clone()
    };
    base.validate()?;
    let built = base.objective.build()?;
    let plan = base.cells()?.remove(0);
    Ok(run_cell(&base, &built, &plan, false)?.0)
}

/// Every cell of the sweep grid, in grid order.
pub fn sweep(spec: &ExperimentSpec) -> Result<Vec<CellResult>> {
    spec.validate()?;
    let built = spec.objective.build()?;
    spec.cells()?
        .into_iter()
        .map(|plan| {
            let (summary, _) = run_cell(spec, &built, &plan, false)?;
            Ok(CellResult { plan, summary })
        })
        .collect()
}

/// Largest empirical variance of F̂(x) − F(x) over the probes, with
/// `trials` fresh value batches per probe.
pub fn estimate_noise_scale(
    oracle: &dyn StochasticOracle,
    probes: &[Point],
    trials: usize,
    rng: &mut RngStream,
) -> Result<f64> {
    if trials < 2 {
        return Err(Error::precondition("estimate_noise_scale", "need at least 2 trials"));
    }
    let exact = oracle
        .exact()
        .ok_or_else(|| Error::precondition("estimate_noise_scale", "oracle has no exact companion"))?;
    let mut worst = 0.0f64;
    for p in probes {
        if p.dim() != oracle.dim() {
            return Err(Error::DimensionMismatch {
                expected: oracle.dim(),
                got: p.dim(),
            });
        }
        let f = exact.value(p);
        let errs: Vec<f64> = (0..trials).map(|_| oracle.sample_value(p, rng) - f).collect();
        let mean = errs.iter().sum::<f64>() / trials as f64;
        let var = errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        worst = worst.max(var);
    }
    Ok(worst)
}
