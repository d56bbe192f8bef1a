//! Forward-difference gradient descent over the intervention parameters:
//!
//! ```text
//! x_k <- x_k - eta * (C(x + delta e_k) - C(x)) / delta
//! ```
//!
//! for every free axis `k`, with costs evaluated at the rounded point.

use super::{rank, OptimizerReport, ParamPoint, SearchSpace, TrajectoryPoint};
use crate::error::{Error, Result};
use crate::interventions::InterventionParams;

#[derive(Debug, Clone, PartialEq)]
pub struct GradientDescentConfig {
    /// Step size (samples² per unit cost).
    pub eta: f64,
    /// Finite-difference probe (samples).
    pub delta: f64,
    pub max_iters: usize,
    /// Stop once an iteration improves the cost by less than this.
    pub tol: f64,
    pub init: InterventionParams,
    pub space: SearchSpace,
}

impl GradientDescentConfig {
    /// Defaults: `eta = 5`, `delta = 1`, 200 iterations, `tol = 1e-12`,
    /// starting from the lower corner of the space with `tau` moved to 10
    /// where the space allows.
    pub fn new(space: SearchSpace) -> Self {
        let tau = space.tau();
        let init = InterventionParams {
            tau: 10usize.clamp(tau.lo, tau.hi),
            phi: space.phi().lo,
            flip_offset: space.offset().lo,
        };
        Self {
            eta: 5.0,
            delta: 1.0,
            max_iters: 200,
            tol: 1e-12,
            init,
            space,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::config(format!(
                "eta must be positive, got {}",
                self.eta
            )));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::config(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        if self.max_iters < 1 {
            return Err(Error::config("max_iters must be at least 1"));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::config("tol must be >= 0"));
        }
        self.space.validate()?;
        if !self.space.contains(&self.init) {
            return Err(Error::config(format!(
                "initial point {} lies outside the search space",
                self.init
            )));
        }
        Ok(())
    }
}

/// Forward-difference estimate per axis; fixed axes get zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gradient {
    pub components: [f64; 3],
    /// Some probe left the search space and was clamped back.
    pub clamped: bool,
}

impl Gradient {
    pub fn tau(&self) -> f64 {
        self.components[super::TAU]
    }

    pub fn phi(&self) -> f64 {
        self.components[super::PHI]
    }

    pub fn offset(&self) -> f64 {
        self.components[super::OFFSET]
    }

    pub fn norm(&self) -> f64 {
        self.components.iter().map(|g| g * g).sum::<f64>().sqrt()
    }
}

fn gradient_at<F>(
    costfn: &F,
    point: &ParamPoint,
    base: f64,
    delta: f64,
    space: &SearchSpace,
) -> (Gradient, usize)
where
    F: Fn(&InterventionParams) -> f64,
{
    let mut components = [0.0; 3];
    let mut clamped = false;
    let mut evals = 0;
    for k in space.free_axes() {
        let mut probe = *point;
        probe.0[k] += delta;
        let (probe, moved) = space.clamp(probe);
        clamped |= moved;
        components[k] = (costfn(&space.params_at(&probe)) - base) / delta;
        evals += 1;
    }
    (
        Gradient {
            components,
            clamped,
        },
        evals,
    )
}

pub fn finite_diff_gradient<F>(
    costfn: &F,
    point: &ParamPoint,
    delta: f64,
    space: &SearchSpace,
) -> Gradient
where
    F: Fn(&InterventionParams) -> f64,
{
    let base = costfn(&space.params_at(point));
    gradient_at(costfn, point, base, delta, space).0
}

/// One update `x - eta * g`, clamped into the space.
pub fn descent_step(
    point: &ParamPoint,
    gradient: &Gradient,
    eta: f64,
    space: &SearchSpace,
) -> ParamPoint {
    let mut next = point.0;
    for (x, g) in next.iter_mut().zip(gradient.components) {
        *x -= eta * g;
    }
    space.clamp(ParamPoint(next)).0
}

/// Runs the descent and reports the best point visited, which need not be
/// the last one.
pub fn gradient_descent<F>(costfn: &F, cfg: &GradientDescentConfig) -> Result<OptimizerReport>
where
    F: Fn(&InterventionParams) -> f64,
{
    cfg.validate()?;
    let space = &cfg.space;
    let mut point = ParamPoint::from(cfg.init);
    let mut params = space.params_at(&point);
    let mut cost = costfn(&params);
    let mut evaluations = 1;
    let (mut best, mut best_cost) = (params, cost);
    let mut trajectory = vec![TrajectoryPoint {
        iteration: 0,
        cost,
        best_cost,
    }];
    let mut converged = false;

    for iteration in 1..=cfg.max_iters {
        let (grad, evals) = gradient_at(costfn, &point, cost, cfg.delta, space);
        evaluations += evals;
        point = descent_step(&point, &grad, cfg.eta, space);
        params = space.params_at(&point);
        let next_cost = costfn(&params);
        evaluations += 1;
        if rank((next_cost, &params), (best_cost, &best)).is_lt() {
            best = params;
            best_cost = next_cost;
        }
        trajectory.push(TrajectoryPoint {
            iteration,
            cost: next_cost,
            best_cost,
        });
        let improvement = cost - next_cost;
        cost = next_cost;
        if !(improvement >= cfg.tol) {
            converged = true;
            break;
        }
    }

    Ok(OptimizerReport {
        method: "gd",
        best,
        best_cost,
        train_cost: None,
        test_cost: None,
        trajectory,
        evaluations,
        seed: 0,
        converged,
    })
}
