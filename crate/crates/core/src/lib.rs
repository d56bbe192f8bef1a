//! Rectifying AC energy-harvester output with reversible, energy-conserving
//! interventions instead of a diode bridge.
//!
//! A sampled voltage series is treated as a vector. The two interventions,
//! a periodic sign flip and a cyclic delay, are orthogonal operators and so
//! leave the series' RMS voltage untouched; the only question is how close
//! to "all positive" they can push it. Parameters are trained on a prefix of
//! the series (gradient descent, a genetic algorithm or an exhaustive grid)
//! and judged on the held-out suffix against a linearized diode bridge.
//!
//! Module map:
//!
//! * [`signal`]: [`VoltageSeries`], RMS/dot metrics, synthetic bi-resonant
//!   source, noise injection, CSV I/O and the train/test split.
//! * [`interventions`]: sign flip, cyclic shift, their matrix forms and the
//!   two-voltage combination pipeline.
//! * [`diode`]: the full-wave bridge baseline and its dissipation.
//! * [`cost`]: positivity cost, the rearrangement bound and total costs.
//! * [`optimize`]: finite-difference gradient descent, genetic search,
//!   exhaustive grids and train/test evaluation.
//! * [`experiment`]: the raw/bridge/intervention comparison table and the
//!   SNR sweep.

pub mod cost;
pub mod diode;
mod error;
pub mod experiment;
pub mod interventions;
pub mod optimize;
pub mod signal;

pub use cost::{CostBreakdown, Pipeline};
pub use diode::DiodeBridgeParams;
pub use error::{Error, Result};
pub use interventions::{Intervention, InterventionParams};
pub use optimize::{GeneticConfig, GradientDescentConfig, Method, OptimizerReport, SearchSpace};
pub use signal::{SeriesSet, SyntheticSourceConfig, VoltageSeries};
