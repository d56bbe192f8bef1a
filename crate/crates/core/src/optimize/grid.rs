//! Exhaustive evaluation over integer parameter grids.

use std::ops::RangeInclusive;

use rayon::prelude::*;

use super::{rank, OptimizerReport, SearchSpace, TrajectoryPoint};
use crate::cost::Pipeline;
use crate::error::{Error, Result};
use crate::interventions::InterventionParams;

/// One cell of a `(tau, delay)` cost landscape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandscapePoint {
    pub tau: usize,
    pub phi: usize,
    pub cost: f64,
}

/// Total cost over `tau_range × phi_range`, row-major with `tau` outer.
///
/// For a pair pipeline the delay axis is `phi` and the flip schedule starts
/// at `offset`. A single voltage has no second series to delay, so there the
/// delay axis moves the flip schedule itself (`flip_offset = phi`) and
/// `offset` is ignored.
pub fn landscape_grid(
    pipeline: &Pipeline,
    tau_range: RangeInclusive<usize>,
    phi_range: RangeInclusive<usize>,
    offset: usize,
) -> Result<Vec<LandscapePoint>> {
    if tau_range.is_empty() || phi_range.is_empty() {
        return Err(Error::config("landscape ranges must be nonempty"));
    }
    if *tau_range.start() < 1 {
        return Err(Error::config("tau range must start at 1 or above"));
    }
    let cells: Vec<(usize, usize)> = tau_range
        .flat_map(|tau| phi_range.clone().map(move |phi| (tau, phi)))
        .collect();
    let pair = pipeline.is_pair();
    cells
        .par_iter()
        .map(|&(tau, phi)| {
            let p = if pair {
                InterventionParams {
                    tau,
                    phi,
                    flip_offset: offset,
                }
            } else {
                InterventionParams {
                    tau,
                    phi: 0,
                    flip_offset: phi,
                }
            };
            Ok(LandscapePoint {
                tau,
                phi,
                cost: pipeline.cost(&p)?.c_total,
            })
        })
        .collect()
}

/// Every grid point of `space`; offsets are only enumerated over one
/// schedule period `2 tau`, beyond which they repeat.
pub fn grid_search<F>(costfn: &F, space: &SearchSpace) -> Result<OptimizerReport>
where
    F: Fn(&InterventionParams) -> f64 + Sync,
{
    space.validate()?;
    let (tau, phi, offset) = (space.tau(), space.phi(), space.offset());
    let rows: Vec<(f64, InterventionParams, usize)> = (tau.lo..=tau.hi)
        .into_par_iter()
        .map(|t| {
            let off_hi = offset.hi.min(offset.lo + 2 * t - 1);
            let mut best: Option<(f64, InterventionParams)> = None;
            let mut count = 0;
            for f in phi.lo..=phi.hi {
                for o in offset.lo..=off_hi {
                    let p = InterventionParams {
                        tau: t,
                        phi: f,
                        flip_offset: o,
                    };
                    let c = costfn(&p);
                    count += 1;
                    if best.is_none_or(|(bc, bp)| rank((c, &p), (bc, &bp)).is_lt()) {
                        best = Some((c, p));
                    }
                }
            }
            let (c, p) = best.expect("nonempty row");
            (c, p, count)
        })
        .collect();

    let mut trajectory = Vec::with_capacity(rows.len());
    let mut best: Option<(f64, InterventionParams)> = None;
    let mut evaluations = 0;
    for (i, &(c, p, count)) in rows.iter().enumerate() {
        evaluations += count;
        if best.is_none_or(|(bc, bp)| rank((c, &p), (bc, &bp)).is_lt()) {
            best = Some((c, p));
        }
        trajectory.push(TrajectoryPoint {
            iteration: i,
            cost: c,
            best_cost: best.expect("set above").0,
        });
    }
    let (best_cost, best) = best.expect("tau range nonempty");
    Ok(OptimizerReport {
        method: "grid",
        best,
        best_cost,
        train_cost: None,
        test_cost: None,
        trajectory,
        evaluations,
        seed: 0,
        converged: true,
    })
}
