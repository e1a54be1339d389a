use super::config::RunConfig;
use super::exchange::{decide_offline, decide_online, ExchangeRule};
use super::steps::{add_noise, descend_into};
use crate::error::{Error, Result};
use crate::objectives::{Objective, StochasticOracle};
use crate::point::{norm, Point};
use crate::rng::RngStream;
use crate::trace::{guard_point, guard_value, EvalTally, Record, Snapshot, SuccessCriterion, Terminal, Trace};

/// Largest rise of F under an exact GD step that is treated as rounding.
///
/// With h ≤ 1/(2L) a GD step cannot increase F, so a rise of this size
/// only appears once the iterate has converged to machine precision; the
/// step is then discarded and X stays put. Genuine rises (step size too
/// large) are orders of magnitude above it and pass through untouched.
pub fn rounding_floor(f: f64) -> f64 {
    1e-12 * f.abs().max(1.0)
}

/// Keeps `x` in place of its exact GD proposal when the proposal is worse
/// only at rounding level.
fn settle(exact: bool, x: &[f64], f: f64, proposal: &mut [f64], f_prop: &mut f64) {
    if exact && *f_prop > f && *f_prop - f <= rounding_floor(f) {
        proposal.copy_from_slice(x);
        *f_prop = f;
    }
}

/// What a run optimizes: an exact objective (offline modes) or a mini-batch
/// oracle (online modes).
#[derive(Clone, Copy)]
pub enum Target<'a> {
    Exact(&'a dyn Objective),
    Stochastic(&'a dyn StochasticOracle),
}

impl Target<'_> {
    pub fn dim(&self) -> usize {
        match self {
            Target::Exact(o) => o.dim(),
            Target::Stochastic(o) => o.dim(),
        }
    }
}

/// Runs `cfg` with its own seed.
pub fn run_seeded(target: Target<'_>, cfg: &RunConfig) -> Result<Trace> {
    run(target, cfg, RngStream::new(cfg.seed))
}

/// Executes `cfg.n_iter` iterations of `cfg.mode`.
///
/// Langevin noise comes from `rng.split(0)`, oracle data from `rng.split(1)`,
/// so a noise-free oracle leaves the noise sequence untouched.
pub fn run(target: Target<'_>, cfg: &RunConfig, rng: RngStream) -> Result<Trace> {
    cfg.validate()?;
    match (&target, cfg.mode.is_online()) {
        (Target::Exact(_), true) => {
            return Err(Error::config("mode", format!("{} needs a stochastic oracle", cfg.mode)))
        }
        (Target::Stochastic(_), false) => {
            return Err(Error::config("mode", format!("{} needs an exact objective", cfg.mode)))
        }
        _ => {}
    }
    if target.dim() != cfg.dim() {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            got: cfg.dim(),
        });
    }
    if let (Target::Stochastic(o), Some(b)) = (&target, cfg.batch_size) {
        if o.batch_size() != b {
            return Err(Error::config(
                "batch_size",
                format!("run asks for {b} samples per batch but the oracle draws {}", o.batch_size()),
            ));
        }
    }
    let mut src = Source {
        target,
        data: rng.split(1),
        tally: EvalTally::default(),
    };
    let mut noise = rng.split(0);
    match cfg.mode.exchange_rule() {
        Some(rule) => coupled(&mut src, &mut noise, cfg, rule),
        None => single(&mut src, &mut noise, cfg),
    }
}

struct Source<'a> {
    target: Target<'a>,
    data: RngStream,
    tally: EvalTally,
}

impl Source<'_> {
    /// Whether GD proposals and their values are exact.
    fn exact(&self) -> bool {
        match self.target {
            Target::Exact(_) => true,
            Target::Stochastic(o) => o.noise_free(),
        }
    }

    fn grad(&mut self, x: &[f64], out: &mut [f64]) {
        match self.target {
            Target::Exact(o) => {
                o.gradient_into(x, out);
                self.tally.exact_gradients += 1;
            }
            Target::Stochastic(o) => {
                o.sample_grad_into(x, &mut self.data, out);
                self.tally.gradient_samples += o.samples_per_gradient_batch();
            }
        }
    }

    /// Exact values, or estimates from one shared fresh batch.
    fn values<const K: usize>(&mut self, pts: [&[f64]; K]) -> [f64; K] {
        match self.target {
            Target::Exact(o) => {
                self.tally.exact_values += K as u64;
                pts.map(|p| o.value(p))
            }
            Target::Stochastic(o) => {
                let v = o.sample_values(&pts, &mut self.data);
                self.tally.value_samples += o.samples_per_value_batch();
                std::array::from_fn(|i| v[i])
            }
        }
    }

    fn start_value(&mut self, x: &[f64]) -> f64 {
        match self.target {
            Target::Exact(o) => {
                self.tally.exact_values += 1;
                o.value(x)
            }
            Target::Stochastic(o) => match o.exact() {
                Some(e) => e.value(x),
                None => self.values([x])[0],
            },
        }
    }
}

struct Recorder<'c> {
    stride: usize,
    records: Vec<Record>,
    snapshots: Vec<Snapshot>,
    track: Option<&'c SuccessCriterion>,
    stop_at_hit: bool,
    hit: Option<usize>,
}

impl<'c> Recorder<'c> {
    fn new(cfg: &'c RunConfig, x0: &[f64]) -> Self {
        let track = cfg.track.as_ref();
        Recorder {
            stride: cfg.stride(),
            records: Vec::with_capacity(cfg.n_iter.min(1 << 20)),
            snapshots: Vec::new(),
            track,
            stop_at_hit: cfg.stop_at_hit,
            hit: track.filter(|c| c.within_ball(x0)).map(|_| 0),
        }
    }

    fn done(&self) -> bool {
        self.stop_at_hit && self.hit.is_some()
    }

    fn push(&mut self, record: Record, x: &[f64]) -> Result<()> {
        let n = record.n;
        self.records.push(record);
        if n % self.stride == 0 {
            self.snapshots.push(Snapshot {
                n,
                x: Point::new(x.to_vec())?,
            });
        }
        if self.hit.is_none() && self.track.is_some_and(|c| c.within_ball(x)) {
            self.hit = Some(n);
        }
        Ok(())
    }

    fn finish(self, start: &Point, start_f: f64, x: &[f64], y: Option<&[f64]>, tally: EvalTally) -> Result<Trace> {
        let n = self.records.last().map_or(0, |r| r.n);
        Ok(Trace {
            start: start.clone(),
            start_f,
            stride: self.stride,
            records: self.records,
            snapshots: self.snapshots,
            terminal: Terminal {
                x: Point::new(x.to_vec())?,
                y: y.map(|y| Point::new(y.to_vec())).transpose()?,
                n,
            },
            tally,
            tracked_hit: self.hit,
        })
    }
}

fn single(src: &mut Source<'_>, noise: &mut RngStream, cfg: &RunConfig) -> Result<Trace> {
    let d = cfg.dim();
    let scale = if cfg.mode.single_chain_is_langevin() {
        (2.0 * cfg.gamma * cfg.h).sqrt()
    } else {
        0.0
    };
    let start_f = src.start_value(&cfg.x0);
    let mut rec = Recorder::new(cfg, &cfg.x0);
    let mut x = cfg.x0.to_vec();
    let mut next = vec![0.0; d];
    let mut g = vec![0.0; d];
    let settles = src.exact() && scale == 0.0;
    let mut f_prev = start_f;
    for n in 1..=cfg.n_iter {
        if rec.done() {
            break;
        }
        src.grad(&x, &mut g);
        descend_into(&x, &g, cfg.h, &mut next);
        if scale > 0.0 {
            add_noise(&mut next, scale, noise);
        }
        guard_point(&next, n, "X")?;
        let [mut f] = src.values([&next]);
        guard_value(f, n, "X")?;
        settle(settles, &x, f_prev, &mut next, &mut f);
        f_prev = f;
        std::mem::swap(&mut x, &mut next);
        rec.push(
            Record {
                n,
                f_x: f,
                f_y: None,
                swapped: false,
            },
            &x,
        )?;
    }
    rec.finish(&cfg.x0, start_f, &x, None, src.tally)
}

fn coupled(src: &mut Source<'_>, noise: &mut RngStream, cfg: &RunConfig, rule: ExchangeRule) -> Result<Trace> {
    let d = cfg.dim();
    let scale = (2.0 * cfg.gamma * cfg.h).sqrt();
    let online = cfg.mode.is_online();
    let exact = src.exact();
    let start_f = src.start_value(&cfg.x0);
    let mut rec = Recorder::new(cfg, &cfg.x0);
    let mut x = cfg.x0.to_vec();
    let mut y = cfg.explorer_start().to_vec();
    let mut xp = vec![0.0; d];
    let mut yp = vec![0.0; d];
    let mut g = vec![0.0; d];
    let mut f_prev = start_f;
    for n in 1..=cfg.n_iter {
        if rec.done() {
            break;
        }
        src.grad(&x, &mut g);
        descend_into(&x, &g, cfg.h, &mut xp);
        src.grad(&y, &mut g);
        descend_into(&y, &g, cfg.h, &mut yp);
        add_noise(&mut yp, scale, noise);
        guard_point(&xp, n, "X")?;
        guard_point(&yp, n, "Y")?;

        let [mut f_x, f_y] = src.values([&xp, &yp]);
        guard_value(f_x, n, "X")?;
        guard_value(f_y, n, "Y")?;
        settle(exact, &x, f_prev, &mut xp, &mut f_x);
        let decision = if online {
            decide_online(f_x, f_y, cfg.t0, cfg.exchange_radius, norm(&xp), norm(&yp))
        } else {
            decide_offline(f_x, f_y, cfg.t0)
        };

        std::mem::swap(&mut x, &mut xp);
        std::mem::swap(&mut y, &mut yp);
        if decision.swap {
            match rule {
                ExchangeRule::Swap => std::mem::swap(&mut x, &mut y),
                ExchangeRule::Copy => x.copy_from_slice(&y),
            }
        }
        let (fx, fy) = decision.post_exchange_values(rule);
        f_prev = fx;
        rec.push(
            Record {
                n,
                f_x: fx,
                f_y: Some(fy),
                swapped: decision.swap,
            },
            &x,
        )?;
    }
    rec.finish(&cfg.x0, start_f, &x, Some(&y), src.tally)
}
