//! Training of intervention parameters.
//!
//! Optimizers move through a continuous copy of the parameter space and
//! round to the integer sample grid whenever a cost is evaluated. Cost
//! functions are plain closures over [`InterventionParams`]; evaluation may
//! be parallel but results are always reduced in index order, and every
//! random draw comes from one seeded generator, so reports are reproducible.

mod genetic;
mod gradient;
mod grid;
mod train;

use std::cmp::Ordering;

use crate::cost::{CostBreakdown, Pipeline};
use crate::error::{Error, Result};
use crate::interventions::InterventionParams;

pub use genetic::{genetic_search, GeneticConfig};
pub use gradient::{
    descent_step, finite_diff_gradient, gradient_descent, Gradient, GradientDescentConfig,
};
pub use grid::{grid_search, landscape_grid, LandscapePoint};
pub use train::{fit_and_evaluate, train_and_test, Method, MethodKind};

pub const TAU: usize = 0;
pub const PHI: usize = 1;
pub const OFFSET: usize = 2;
pub const AXIS_NAMES: [&str; 3] = ["tau", "phi", "offset"];

/// Inclusive integer range of one parameter axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxisRange {
    pub lo: usize,
    pub hi: usize,
}

impl AxisRange {
    pub const fn new(lo: usize, hi: usize) -> Self {
        Self { lo, hi }
    }

    pub const fn fixed(value: usize) -> Self {
        Self {
            lo: value,
            hi: value,
        }
    }

    pub fn is_fixed(&self) -> bool {
        self.lo == self.hi
    }

    pub fn span(&self) -> usize {
        self.hi - self.lo + 1
    }
}

/// A point in the continuous relaxation of `(tau, phi, offset)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamPoint(pub [f64; 3]);

impl ParamPoint {
    pub fn tau(&self) -> f64 {
        self.0[TAU]
    }

    pub fn phi(&self) -> f64 {
        self.0[PHI]
    }

    pub fn offset(&self) -> f64 {
        self.0[OFFSET]
    }
}

impl From<InterventionParams> for ParamPoint {
    fn from(p: InterventionParams) -> Self {
        ParamPoint([p.tau as f64, p.phi as f64, p.flip_offset as f64])
    }
}

/// Box bounds of the searched parameters. An axis with `lo == hi` is held
/// fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchSpace {
    pub axes: [AxisRange; 3],
}

impl SearchSpace {
    pub fn new(tau: AxisRange, phi: AxisRange, offset: AxisRange) -> Result<Self> {
        let space = Self {
            axes: [tau, phi, offset],
        };
        space.validate()?;
        Ok(space)
    }

    /// Space suited to a pipeline: `tau` in `1..=tau_max`, offsets covering
    /// one full schedule period, and the delay searched only for pairs
    /// (capped at `d - 1`, beyond which it wraps).
    pub fn for_pipeline(pipeline: &Pipeline, tau_max: usize, phi_max: usize) -> Result<Self> {
        if tau_max < 1 {
            return Err(Error::config("tau_max must be at least 1"));
        }
        let phi = if pipeline.is_pair() {
            AxisRange::new(0, phi_max.min(pipeline.len() - 1))
        } else {
            AxisRange::fixed(0)
        };
        Self::new(
            AxisRange::new(1, tau_max),
            phi,
            AxisRange::new(0, 2 * tau_max - 1),
        )
    }

    pub fn validate(&self) -> Result<()> {
        for (axis, name) in self.axes.iter().zip(AXIS_NAMES) {
            if axis.lo > axis.hi {
                return Err(Error::config(format!(
                    "empty {name} range {}..={}",
                    axis.lo, axis.hi
                )));
            }
        }
        if self.axes[TAU].lo < 1 {
            return Err(Error::config("tau range must start at 1 or above"));
        }
        Ok(())
    }

    pub fn tau(&self) -> AxisRange {
        self.axes[TAU]
    }

    pub fn phi(&self) -> AxisRange {
        self.axes[PHI]
    }

    pub fn offset(&self) -> AxisRange {
        self.axes[OFFSET]
    }

    pub fn contains(&self, p: &InterventionParams) -> bool {
        let v = [p.tau, p.phi, p.flip_offset];
        self.axes.iter().zip(v).all(|(a, x)| a.lo <= x && x <= a.hi)
    }

    /// Free (searched) axis indices.
    pub fn free_axes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..3).filter(|&k| !self.axes[k].is_fixed())
    }

    /// Clamps into the box; the flag reports whether any coordinate moved.
    pub fn clamp(&self, p: ParamPoint) -> (ParamPoint, bool) {
        let mut out = p.0;
        let mut clamped = false;
        for (x, axis) in out.iter_mut().zip(&self.axes) {
            let c = x.clamp(axis.lo as f64, axis.hi as f64);
            clamped |= c != *x;
            *x = c;
        }
        (ParamPoint(out), clamped)
    }

    /// Rounds to the sample grid, then clamps into the box.
    pub fn params_at(&self, p: &ParamPoint) -> InterventionParams {
        let snap = |k: usize| {
            let axis = self.axes[k];
            let x = p.0[k];
            let x = if x.is_nan() {
                axis.lo as f64
            } else {
                x.round()
            };
            x.clamp(axis.lo as f64, axis.hi as f64) as usize
        };
        InterventionParams {
            tau: snap(TAU),
            phi: snap(PHI),
            flip_offset: snap(OFFSET),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub iteration: usize,
    /// Cost visited at this iteration (elite cost for the genetic search).
    pub cost: f64,
    /// Best cost seen so far.
    pub best_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerReport {
    pub method: &'static str,
    pub best: InterventionParams,
    pub best_cost: f64,
    pub train_cost: Option<CostBreakdown>,
    pub test_cost: Option<CostBreakdown>,
    pub trajectory: Vec<TrajectoryPoint>,
    pub evaluations: usize,
    pub seed: u64,
    pub converged: bool,
}

/// Ranks `(cost, params)`: lower cost first, ties toward smaller
/// `(tau, phi, offset)`. NaN sorts last.
pub(crate) fn rank(a: (f64, &InterventionParams), b: (f64, &InterventionParams)) -> Ordering {
    nan_last(a.0)
        .total_cmp(&nan_last(b.0))
        .then_with(|| a.1.cmp(b.1))
}

fn nan_last(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x
    }
}
