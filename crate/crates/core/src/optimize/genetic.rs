//! Real-coded genetic search over `(tau, phi, offset)`.
//!
//! Tournament selection, uniform crossover, Gaussian mutation followed by
//! rounding to the sample grid, and elitism. All random draws for a
//! generation happen on one thread before the (parallel) cost evaluation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::{rank, OptimizerReport, ParamPoint, SearchSpace, TrajectoryPoint};
use crate::error::{Error, Result};
use crate::interventions::InterventionParams;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneticConfig {
    pub population: usize,
    /// Breeding rounds after the initial population.
    pub generations: usize,
    /// Per-gene mutation probability.
    pub mutation_rate: f64,
    /// Standard deviation of a mutation step (samples).
    pub mutation_scale: f64,
    /// Probability that a parent pair is recombined.
    pub crossover_rate: f64,
    /// Individuals copied unchanged into the next generation.
    pub elitism: usize,
    pub tournament_size: usize,
    pub seed: u64,
    pub space: SearchSpace,
    /// Starting individuals, cycled to fill the population. Empty means
    /// uniform random initialization.
    pub initial: Vec<InterventionParams>,
}

impl GeneticConfig {
    pub fn new(space: SearchSpace, seed: u64) -> Self {
        Self {
            population: 40,
            generations: 60,
            mutation_rate: 0.2,
            mutation_scale: 4.0,
            crossover_rate: 0.7,
            elitism: 2,
            tournament_size: 3,
            seed,
            space,
            initial: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::config("population must be at least 2"));
        }
        if self.generations < 1 {
            return Err(Error::config("generations must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::config("mutation_rate must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::config("crossover_rate must lie in [0, 1]"));
        }
        if !(self.mutation_scale.is_finite() && self.mutation_scale > 0.0) {
            return Err(Error::config("mutation_scale must be positive"));
        }
        if self.elitism < 1 || self.elitism >= self.population {
            return Err(Error::config("elitism must lie in [1, population)"));
        }
        if self.tournament_size < 1 {
            return Err(Error::config("tournament_size must be at least 1"));
        }
        self.space.validate()?;
        if let Some(p) = self.initial.iter().find(|p| !self.space.contains(p)) {
            return Err(Error::config(format!(
                "initial individual {p} lies outside the search space"
            )));
        }
        Ok(())
    }
}

struct Breeder<'a> {
    cfg: &'a GeneticConfig,
    rng: ChaCha8Rng,
    mutation: Normal<f64>,
}

impl Breeder<'_> {
    fn random_point(&mut self) -> ParamPoint {
        let mut x = [0.0; 3];
        for (v, axis) in x.iter_mut().zip(&self.cfg.space.axes) {
            *v = self.rng.gen_range(axis.lo..=axis.hi) as f64;
        }
        ParamPoint(x)
    }

    /// Index of the fittest among `tournament_size` uniform draws, where
    /// `position[i]` is the rank of individual `i`.
    fn tournament(&mut self, position: &[usize]) -> usize {
        let n = position.len();
        let mut winner = self.rng.gen_range(0..n);
        for _ in 1..self.cfg.tournament_size {
            let challenger = self.rng.gen_range(0..n);
            if position[challenger] < position[winner] {
                winner = challenger;
            }
        }
        winner
    }

    fn crossover(&mut self, a: ParamPoint, b: ParamPoint) -> (ParamPoint, ParamPoint) {
        if !self.rng.gen_bool(self.cfg.crossover_rate) {
            return (a, b);
        }
        let (mut c, mut d) = (a.0, b.0);
        for k in 0..3 {
            if self.rng.gen_bool(0.5) {
                std::mem::swap(&mut c[k], &mut d[k]);
            }
        }
        (ParamPoint(c), ParamPoint(d))
    }

    fn mutate(&mut self, p: ParamPoint) -> ParamPoint {
        let mut x = p.0;
        for v in x.iter_mut() {
            if self.rng.gen_bool(self.cfg.mutation_rate) {
                *v += self.mutation.sample(&mut self.rng);
            }
        }
        for v in x.iter_mut() {
            *v = v.round();
        }
        self.cfg.space.clamp(ParamPoint(x)).0
    }
}

fn evaluate<F>(
    costfn: &F,
    space: &SearchSpace,
    population: &[ParamPoint],
) -> Vec<(f64, InterventionParams)>
where
    F: Fn(&InterventionParams) -> f64 + Sync,
{
    population
        .par_iter()
        .map(|x| {
            let p = space.params_at(x);
            (costfn(&p), p)
        })
        .collect()
}

/// Population indices sorted best first.
fn ranking(scores: &[(f64, InterventionParams)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| {
        rank((scores[i].0, &scores[i].1), (scores[j].0, &scores[j].1)).then(i.cmp(&j))
    });
    order
}

pub fn genetic_search<F>(costfn: &F, cfg: &GeneticConfig) -> Result<OptimizerReport>
where
    F: Fn(&InterventionParams) -> f64 + Sync,
{
    cfg.validate()?;
    let mut breeder = Breeder {
        cfg,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        mutation: Normal::new(0.0, cfg.mutation_scale).map_err(|e| Error::config(e.to_string()))?,
    };
    let space = &cfg.space;

    let mut population: Vec<ParamPoint> = if cfg.initial.is_empty() {
        (0..cfg.population)
            .map(|_| breeder.random_point())
            .collect()
    } else {
        cfg.initial
            .iter()
            .cycle()
            .take(cfg.population)
            .map(|&p| ParamPoint::from(p))
            .collect()
    };

    let mut scores = evaluate(costfn, space, &population);
    let mut evaluations = population.len();
    let mut order = ranking(&scores);
    let mut best_cost = scores[order[0]].0;
    let mut trajectory = vec![TrajectoryPoint {
        iteration: 0,
        cost: best_cost,
        best_cost,
    }];

    for generation in 1..=cfg.generations {
        let mut position = vec![0; order.len()];
        for (r, &i) in order.iter().enumerate() {
            position[i] = r;
        }
        let mut next: Vec<ParamPoint> = order[..cfg.elitism]
            .iter()
            .map(|&i| population[i])
            .collect();
        while next.len() < cfg.population {
            let a = population[breeder.tournament(&position)];
            let b = population[breeder.tournament(&position)];
            let (c, d) = breeder.crossover(a, b);
            next.push(breeder.mutate(c));
            if next.len() < cfg.population {
                next.push(breeder.mutate(d));
            }
        }
        population = next;
        scores = evaluate(costfn, space, &population);
        evaluations += population.len();
        order = ranking(&scores);
        let elite = scores[order[0]].0;
        best_cost = best_cost.min(elite);
        trajectory.push(TrajectoryPoint {
            iteration: generation,
            cost: elite,
            best_cost,
        });
    }

    let (best_cost, best) = scores[order[0]];
    Ok(OptimizerReport {
        method: "ga",
        best,
        best_cost,
        train_cost: None,
        test_cost: None,
        trajectory,
        evaluations,
        seed: cfg.seed,
        converged: true,
    })
}
