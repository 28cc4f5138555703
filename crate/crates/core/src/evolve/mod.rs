//! Genetic search over corrugation-width vectors.

pub mod verify;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::photonics::geometry::NOMINAL_CORRUGATION_NM;

pub use verify::{optimize_and_verify, Candidate, VerifyReport, DEFAULT_TOP_K};

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error("invalid GA config: {0}")]
    InvalidConfig(String),
    #[error("surrogate expects {expected} widths but the template has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("every verified candidate failed: {}", causes.join("; "))]
    VerificationFailure { causes: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GAConfig {
    pub population_size: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    pub mutation_sigma_nm: f64,
    /// Per-gene mutation probability; `None` means 1 / dimension.
    pub mutation_rate: Option<f64>,
    pub bounds: (f64, f64),
    pub elitism_count: usize,
    pub seed: u64,
}

impl Default for GAConfig {
    fn default() -> Self {
        Self {
            population_size: 64,
            generations: 200,
            tournament_size: 3,
            crossover_rate: 0.7,
            mutation_sigma_nm: 2.0,
            mutation_rate: None,
            bounds: (0.5 * NOMINAL_CORRUGATION_NM, 1.5 * NOMINAL_CORRUGATION_NM),
            elitism_count: 2,
            seed: 0,
        }
    }
}

impl GAConfig {
    pub fn validate(&self) -> Result<(), EvolveError> {
        let bad = |m: String| Err(EvolveError::InvalidConfig(m));
        if self.population_size < 2 {
            return bad(format!("population_size must be >= 2, got {}", self.population_size));
        }
        if self.generations == 0 || self.tournament_size == 0 {
            return bad("generations and tournament_size must be positive".into());
        }
        let (lo, hi) = self.bounds;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return bad(format!("bounds must be finite and ordered, got ({lo}, {hi})"));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return bad(format!("crossover_rate must lie in [0, 1], got {}", self.crossover_rate));
        }
        if !(self.mutation_sigma_nm.is_finite() && self.mutation_sigma_nm >= 0.0) {
            return bad(format!("mutation_sigma_nm must be >= 0, got {}", self.mutation_sigma_nm));
        }
        if let Some(r) = self.mutation_rate {
            if !(0.0..=1.0).contains(&r) {
                return bad(format!("mutation_rate must lie in [0, 1], got {r}"));
            }
        }
        if self.elitism_count >= self.population_size {
            return bad(format!(
                "elitism_count {} must be below population_size {}",
                self.elitism_count, self.population_size
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GAResult {
    pub best_omega: Vec<f64>,
    pub best_fitness: f64,
    /// Best and mean finite fitness of each generation, initial population first.
    pub best_history: Vec<f64>,
    pub mean_history: Vec<f64>,
    pub evaluation_count: usize,
    /// Evaluations that returned a non-finite value and were demoted to −∞.
    pub invalid_evaluations: usize,
    /// Final population, sorted best first, with its fitness.
    pub final_population: Vec<(Vec<f64>, f64)>,
    pub seed: u64,
}

impl GAResult {
    /// `generation,best,mean` rows.
    pub fn history_csv(&self) -> String {
        let mut out = String::from("generation,best,mean\n");
        for (g, (b, m)) in self.best_history.iter().zip(&self.mean_history).enumerate() {
            out.push_str(&format!(
                "{g},{},{}\n",
                crate::surrogate::dataset::format_float(*b),
                crate::surrogate::dataset::format_float(*m)
            ));
        }
        out
    }
}

/// Each gene comes from `b` with probability `rate`, otherwise from `a`.
pub fn crossover<R: Rng>(a: &[f64], b: &[f64], rate: f64, rng: &mut R) -> Vec<f64> {
    assert_eq!(a.len(), b.len(), "parents differ in length");
    a.iter().zip(b).map(|(x, y)| if rng.random::<f64>() < rate { *y } else { *x }).collect()
}

/// Adds N(0, σ²) to every gene and clips to `bounds`.
pub fn mutate<R: Rng>(omega: &[f64], sigma: f64, bounds: (f64, f64), rng: &mut R) -> Vec<f64> {
    mutate_genes(omega, sigma, 1.0, bounds, rng)
}

/// As [`mutate`], but each gene is perturbed only with probability `rate`.
pub fn mutate_genes<R: Rng>(omega: &[f64], sigma: f64, rate: f64, bounds: (f64, f64), rng: &mut R) -> Vec<f64> {
    if sigma == 0.0 {
        return omega.to_vec();
    }
    let normal = Normal::new(0.0, sigma).expect("sigma is finite and positive");
    omega
        .iter()
        .map(|&w| if rate >= 1.0 || rng.random::<f64>() < rate { (w + normal.sample(rng)).clamp(bounds.0, bounds.1) } else { w })
        .collect()
}

/// Independent stream for one individual of one generation.
fn stream(seed: u64, generation: usize, individual: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((generation as u64) << 32) | individual as u64);
    rng
}

fn tournament<R: Rng>(fitness: &[f64], size: usize, rng: &mut R) -> usize {
    let mut best = rng.random_range(0..fitness.len());
    for _ in 1..size {
        let c = rng.random_range(0..fitness.len());
        if fitness[c] > fitness[best] || (fitness[c] == fitness[best] && c < best) {
            best = c;
        }
    }
    best
}

/// Maximizes `fitness` over `[lo, hi]^dimension`.
///
/// Fitness is evaluated in parallel; every random draw comes from a stream
/// keyed by (generation, individual), so results never depend on scheduling.
/// Elites keep their cached fitness and are not re-evaluated.
pub fn run_ga<F>(fitness: F, dimension: usize, config: &GAConfig) -> Result<GAResult, EvolveError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    if dimension == 0 {
        return Err(EvolveError::InvalidConfig("genome dimension must be positive".into()));
    }
    let (lo, hi) = config.bounds;
    let p = config.population_size;
    let rate = config.mutation_rate.unwrap_or(1.0 / dimension as f64);

    let mut population: Vec<Vec<f64>> = (0..p)
        .map(|i| {
            let mut rng = stream(config.seed, 0, i);
            (0..dimension).map(|_| if lo < hi { rng.random_range(lo..=hi) } else { lo }).collect()
        })
        .collect();
    let evaluate = |pop: &[Vec<f64>]| -> Vec<f64> {
        pop.par_iter()
            .map(|w| {
                let f = fitness(w);
                if f.is_finite() {
                    f
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect()
    };
    let mut scores = evaluate(&population);
    let mut evaluation_count = p;
    let mut invalid = scores.iter().filter(|f| f.is_infinite()).count();
    let mut best_history = Vec::with_capacity(config.generations);
    let mut mean_history = Vec::with_capacity(config.generations);

    let ranked = |scores: &[f64]| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..scores.len()).collect();
        // stable on ties: lower index first
        idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
        idx
    };
    let record = |scores: &[f64], best: &mut Vec<f64>, mean: &mut Vec<f64>| {
        best.push(scores.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        let finite: Vec<f64> = scores.iter().copied().filter(|f| f.is_finite()).collect();
        mean.push(if finite.is_empty() { f64::NAN } else { finite.iter().sum::<f64>() / finite.len() as f64 });
    };
    record(&scores, &mut best_history, &mut mean_history);

    for generation in 1..config.generations {
        let order = ranked(&scores);
        let elites: Vec<usize> = order[..config.elitism_count].to_vec();
        let children: Vec<Vec<f64>> = (config.elitism_count..p)
            .into_par_iter()
            .map(|k| {
                let mut rng = stream(config.seed, generation, k);
                let a = tournament(&scores, config.tournament_size, &mut rng);
                let b = tournament(&scores, config.tournament_size, &mut rng);
                let child = crossover(&population[a], &population[b], config.crossover_rate, &mut rng);
                mutate_genes(&child, config.mutation_sigma_nm, rate, config.bounds, &mut rng)
            })
            .collect();
        let child_scores = evaluate(&children);
        evaluation_count += children.len();
        invalid += child_scores.iter().filter(|f| f.is_infinite()).count();

        let mut next: Vec<Vec<f64>> = elites.iter().map(|&i| population[i].clone()).collect();
        let mut next_scores: Vec<f64> = elites.iter().map(|&i| scores[i]).collect();
        next.extend(children);
        next_scores.extend(child_scores);
        population = next;
        scores = next_scores;
        record(&scores, &mut best_history, &mut mean_history);
    }

    let order = ranked(&scores);
    let final_population: Vec<(Vec<f64>, f64)> = order.iter().map(|&i| (population[i].clone(), scores[i])).collect();
    Ok(GAResult {
        best_omega: final_population[0].0.clone(),
        best_fitness: final_population[0].1,
        best_history,
        mean_history,
        evaluation_count,
        invalid_evaluations: invalid,
        final_population,
        seed: config.seed,
    })
}
