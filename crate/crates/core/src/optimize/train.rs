use super::{
    genetic_search, gradient_descent, grid_search, GeneticConfig, GradientDescentConfig,
    OptimizerReport, SearchSpace,
};
use crate::cost::Pipeline;
use crate::error::{Error, Result};
use crate::interventions::InterventionParams;

/// A fully configured optimizer.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    GradientDescent(GradientDescentConfig),
    Genetic(GeneticConfig),
    Grid(SearchSpace),
}

impl Method {
    pub fn run<F>(&self, costfn: &F) -> Result<OptimizerReport>
    where
        F: Fn(&InterventionParams) -> f64 + Sync,
    {
        match self {
            Method::GradientDescent(cfg) => gradient_descent(costfn, cfg),
            Method::Genetic(cfg) => genetic_search(costfn, cfg),
            Method::Grid(space) => grid_search(costfn, space),
        }
    }
}

/// Optimizer choice before it is bound to a search space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    Gd,
    Ga,
    Grid,
}

impl MethodKind {
    /// Default configuration of this method over `space`.
    pub fn configure(self, space: SearchSpace, seed: u64) -> Method {
        match self {
            MethodKind::Gd => Method::GradientDescent(GradientDescentConfig::new(space)),
            MethodKind::Ga => Method::Genetic(GeneticConfig::new(space, seed)),
            MethodKind::Grid => Method::Grid(space),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MethodKind::Gd => "gd",
            MethodKind::Ga => "ga",
            MethodKind::Grid => "grid",
        }
    }
}

impl std::str::FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gd" => Ok(MethodKind::Gd),
            "ga" => Ok(MethodKind::Ga),
            "grid" => Ok(MethodKind::Grid),
            other => Err(Error::config(format!(
                "unknown method `{other}` (gd, ga or grid)"
            ))),
        }
    }
}

/// Trains on `train` and scores the winner on both pipelines. The flip
/// schedule is carried `elapsed` samples forward before it is applied to
/// `test`, so a test suffix that directly follows the training prefix sees
/// the same schedule the trainer saw.
///
/// Besides the optimizer's answer, the switch-never-on schedule (with the
/// trained delay) is scored too and wins if it is strictly cheaper on
/// `train`; an already nonnegative input should be left alone.
pub fn fit_and_evaluate(
    train: &Pipeline,
    test: &Pipeline,
    method: &Method,
    elapsed: usize,
) -> Result<OptimizerReport> {
    let costfn = |p: &InterventionParams| train.cost(p).map(|c| c.c_total).unwrap_or(f64::INFINITY);
    let mut report = method.run(&costfn)?;
    let idle = InterventionParams::idle(train.len() + elapsed + test.len(), report.best.phi);
    let idle_cost = costfn(&idle);
    report.evaluations += 1;
    if idle_cost < report.best_cost {
        report.best = idle;
        report.best_cost = idle_cost;
    }
    report.train_cost = Some(train.cost(&report.best)?);
    report.test_cost = Some(test.cost(&report.best.continued(elapsed))?);
    Ok(report)
}

/// Optimizes on the contiguous `train_fraction` prefix and evaluates the
/// fixed parameters on the remaining suffix.
pub fn train_and_test(
    pipeline: &Pipeline,
    train_fraction: f64,
    method: &Method,
) -> Result<OptimizerReport> {
    let (train, test) = pipeline.split(train_fraction)?;
    fit_and_evaluate(&train, &test, method, train.len())
}
