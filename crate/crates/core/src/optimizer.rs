//! Maximization of a functional over the angle torus `[0, 2π)^m`.
//!
//! Local search is a limited-memory quasi-Newton ascent with a backtracking
//! line search; every accepted step does not decrease the objective.
//! [`multi_start`] runs it from the two constant drivers and a set of random
//! drivers, and [`refine_schedule`] walks an increasing chain of partition
//! sizes, warm-starting each stage from the replicated incumbent of the
//! previous one.

use std::collections::VecDeque;
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::driver::{wrap_angle, StepDriver};
use crate::error::{Error, Result};
use crate::functionals::Functional;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentOptions {
    /// Stop when the sup-norm of the gradient falls below this.
    pub grad_tol: f64,
    pub max_iters: usize,
    /// Random starting drivers per stage.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-10,
            max_iters: 10_000,
            restarts: 64,
            seed: 0,
        }
    }
}

impl AscentOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.grad_tol > 0.0) {
            return Err(Error::InvalidOptions(format!(
                "grad_tol must be positive, got {}",
                self.grad_tol
            )));
        }
        if self.restarts < 1 {
            return Err(Error::InvalidOptions("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub driver: StepDriver,
    pub value: f64,
    pub iterations: usize,
    /// The gradient fell below `grad_tol`, or no step along steepest ascent
    /// could raise the objective at working precision.
    pub converged: bool,
    /// Sup-norm of the gradient at `driver`.
    pub grad_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub m: usize,
    pub result: OptimizationResult,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RefinementTrace {
    pub stages: Vec<Stage>,
}

impl RefinementTrace {
    pub fn values(&self) -> Vec<f64> {
        self.stages.iter().map(|s| s.result.value).collect()
    }

    pub fn last(&self) -> Option<&Stage> {
        self.stages.last()
    }
}

const HISTORY: usize = 12;
const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-14;
const STALL_LIMIT: usize = 50;

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn evaluate(spec: &Functional, angles: &[f64]) -> Result<(f64, Vec<f64>)> {
    let d = StepDriver::new(angles).map_err(|_| Error::NonFiniteObjective {
        m: angles.len(),
        value: f64::NAN,
    })?;
    let (value, grad) = spec.value_and_gradient(&d);
    if !value.is_finite() || grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFiniteObjective {
            m: angles.len(),
            value,
        });
    }
    Ok((value, grad))
}

/// Two-loop recursion: approximate inverse (negative) Hessian times `grad`.
fn ascent_direction(grad: &[f64], pairs: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = grad.to_vec();
    let mut alphas = Vec::with_capacity(pairs.len());
    for (s, y, rho) in pairs.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = pairs.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), a) in pairs.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q
}

/// Local ascent from `d0`.
///
/// The curvature pairs are built for the minimization of `-f`, so with
/// `y = -(∇f_new - ∇f_old)` the two-loop output applied to `∇f` is an
/// ascent direction.
pub fn local_maximize(
    spec: &Functional,
    d0: &StepDriver,
    opts: &AscentOptions,
) -> Result<OptimizationResult> {
    opts.validate()?;
    let mut x = d0.angles().to_vec();
    let (mut f, mut g) = evaluate(spec, &x)?;
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(HISTORY);
    let mut iterations = 0;
    let mut converged = sup_norm(&g) < opts.grad_tol;

    let mut best_grad = sup_norm(&g);
    let mut stalled = 0;
    while !converged && iterations < opts.max_iters && stalled < STALL_LIMIT {
        let mut p = ascent_direction(&g, &pairs);
        let mut slope = dot(&g, &p);
        if !(slope > 0.0) {
            pairs.clear();
            p = g.clone();
            slope = dot(&g, &g);
        }
        // first step of a fresh memory moves the largest angle by at most one radian
        let mut step = if pairs.is_empty() {
            (1.0 / sup_norm(&p)).min(1.0)
        } else {
            1.0
        };
        let accepted = loop {
            let trial: Vec<f64> = x.iter().zip(&p).map(|(xi, pi)| xi + step * pi).collect();
            let (f_new, g_new) = evaluate(spec, &trial)?;
            // Armijo with strict increase, or, once the value no longer
            // resolves the gain, a non-decreasing value whose gain estimated
            // from the gradients is positive
            let armijo = f_new > f && f_new >= f + ARMIJO * step * slope;
            let gain = 0.5 * step * (dot(&g, &p) + dot(&g_new, &p));
            if armijo || (f_new >= f && gain > 0.0) {
                break Some((trial, f_new, g_new));
            }
            step *= 0.5;
            if step < MIN_STEP {
                break None;
            }
        };
        let Some((trial, f_new, g_new)) = accepted else {
            if pairs.is_empty() {
                // steepest ascent cannot improve: stationary to working precision
                converged = true;
                break;
            }
            pairs.clear();
            continue;
        };
        iterations += 1;
        let s: Vec<f64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g.iter().zip(&g_new).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-16 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if pairs.len() == HISTORY {
                pairs.pop_front();
            }
            pairs.push_back((s, y, 1.0 / sy));
        }
        let grad_new = sup_norm(&g_new);
        if f_new > f || grad_new < best_grad {
            stalled = 0;
        } else {
            stalled += 1;
        }
        best_grad = best_grad.min(grad_new);
        x = trial.into_iter().map(wrap_angle).collect();
        f = f_new;
        g = g_new;
        converged = grad_new < opts.grad_tol;
    }
    if stalled >= STALL_LIMIT {
        // only rounding-level moves remain
        converged = true;
    }

    let driver = StepDriver::new(&x)?;
    // report the value at the stored (wrapped) angles
    let (value, grad) = spec.value_and_gradient(&driver);
    Ok(OptimizationResult {
        driver,
        value,
        iterations,
        converged,
        grad_norm: sup_norm(&grad),
    })
}

fn restart_rng(seed: u64, m: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((m as u64) << 32) ^ index as u64);
    rng
}

/// Uniform random driver for restart `index` at size `m`.
pub fn random_driver(seed: u64, m: usize, index: usize) -> StepDriver {
    let mut rng = restart_rng(seed, m, index);
    let angles: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..TAU)).collect();
    StepDriver::new(&angles).expect("random angles are finite")
}

/// Runs local ascent from every start and keeps the best, first index winning
/// ties. Starts run in parallel; the reduction is in index order.
fn best_of(
    spec: &Functional,
    starts: Vec<StepDriver>,
    opts: &AscentOptions,
) -> Result<OptimizationResult> {
    let results: Vec<Result<OptimizationResult>> = starts
        .par_iter()
        .map(|d0| local_maximize(spec, d0, opts))
        .collect();
    let mut best: Option<OptimizationResult> = None;
    for r in results {
        let r = r?;
        if best.as_ref().is_none_or(|b| r.value > b.value) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one start"))
}

fn stage_starts(m: usize, opts: &AscentOptions, stage: u64) -> Vec<StepDriver> {
    let seed = opts.seed.wrapping_add(stage.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut starts = vec![
        StepDriver::constant(m, std::f64::consts::PI).expect("m >= 1"),
        StepDriver::constant(m, 0.0).expect("m >= 1"),
    ];
    starts.extend((0..opts.restarts).map(|i| random_driver(seed, m, i)));
    starts
}

/// Best local maximum from the all-π and all-0 drivers and `opts.restarts`
/// uniform random drivers.
pub fn multi_start(spec: &Functional, m: usize, opts: &AscentOptions) -> Result<OptimizationResult> {
    if m < 1 {
        return Err(Error::EmptyDriver);
    }
    opts.validate()?;
    best_of(spec, stage_starts(m, opts, 0), opts)
}

pub fn validate_schedule(schedule: &[usize]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::InvalidSchedule("schedule is empty".into()));
    }
    if schedule[0] == 0 {
        return Err(Error::InvalidSchedule("partition sizes must be positive".into()));
    }
    for w in schedule.windows(2) {
        if w[1] <= w[0] || w[1] % w[0] != 0 {
            return Err(Error::InvalidSchedule(format!(
                "{} does not refine {}",
                w[1], w[0]
            )));
        }
    }
    Ok(())
}

/// Successive refinement over a divisibility chain of partition sizes.
///
/// `init`, when given, replaces the random multi-start of the first stage:
/// its refinement to `schedule[0]` is the only start there.
pub fn refine_schedule_from(
    spec: &Functional,
    schedule: &[usize],
    opts: &AscentOptions,
    init: Option<&StepDriver>,
) -> Result<RefinementTrace> {
    validate_schedule(schedule)?;
    opts.validate()?;
    let mut trace = RefinementTrace::default();
    let first = match init {
        Some(d) => {
            if !schedule[0].is_multiple_of(d.m()) {
                return Err(Error::InvalidSchedule(format!(
                    "initial driver with m = {} does not refine to {}",
                    d.m(),
                    schedule[0]
                )));
            }
            local_maximize(spec, &d.refine(schedule[0] / d.m())?, opts)?
        }
        None => multi_start(spec, schedule[0], opts)?,
    };
    trace.stages.push(Stage {
        m: schedule[0],
        result: first,
    });
    for (stage, w) in schedule.windows(2).enumerate() {
        let prev = &trace.stages.last().expect("nonempty").result;
        let warm = prev.driver.refine(w[1] / w[0])?;
        let mut starts = vec![warm];
        starts.extend(stage_starts(w[1], opts, stage as u64 + 1));
        let result = best_of(spec, starts, opts)?;
        trace.stages.push(Stage { m: w[1], result });
    }
    Ok(trace)
}

pub fn refine_schedule(
    spec: &Functional,
    schedule: &[usize],
    opts: &AscentOptions,
) -> Result<RefinementTrace> {
    refine_schedule_from(spec, schedule, opts, None)
}
