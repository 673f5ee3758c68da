//! The generational loop: evaluate, rank, keep the elite, mutate the rest.

use rand::Rng;

use crate::error::{ConfigError, Result};
use crate::rng::{SeedStreams, Stream};
use crate::rnn::{Genome, NetworkDims, DEFAULT_HIDDEN};
use crate::strategies::Strategy;

/// How the non-elite part of the next generation is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reproduction {
    /// Every non-elite agent is replaced by a mutation of itself.
    #[default]
    InPlace,
    /// Every non-elite slot receives a mutation of a uniformly drawn elite.
    FromElite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub max_generations: usize,
    pub time_frame: usize,
    pub elite_fraction: f64,
    pub mutation_sigma: f64,
    pub hidden: usize,
    pub reproduction: Reproduction,
    pub master_seed: u64,
}

impl EvolutionConfig {
    pub fn maze() -> Self {
        EvolutionConfig {
            population_size: 250,
            max_generations: 1200,
            time_frame: 600,
            elite_fraction: 0.10,
            mutation_sigma: 0.1,
            hidden: DEFAULT_HIDDEN,
            reproduction: Reproduction::InPlace,
            master_seed: 0,
        }
    }

    pub fn grid_game() -> Self {
        EvolutionConfig {
            population_size: 75,
            max_generations: 10_000,
            time_frame: 250,
            ..EvolutionConfig::maze()
        }
    }

    pub fn elite_count(&self) -> usize {
        (self.elite_fraction * self.population_size as f64).floor() as usize
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.population_size < 10 {
            return Err(ConfigError::invalid(
                "population_size",
                "must be at least 10",
            ));
        }
        if !(self.elite_fraction > 0.0 && self.elite_fraction < 1.0) {
            return Err(ConfigError::invalid(
                "elite_fraction",
                "must lie strictly between 0 and 1",
            ));
        }
        if self.elite_count() < 1 {
            return Err(ConfigError::invalid(
                "elite_fraction",
                "keeps no agent at this population size",
            ));
        }
        if !(self.mutation_sigma > 0.0 && self.mutation_sigma.is_finite()) {
            return Err(ConfigError::invalid("mutation_sigma", "must be positive"));
        }
        if self.hidden == 0 {
            return Err(ConfigError::invalid("hidden", "must be at least 1"));
        }
        Ok(())
    }
}

/// Scores and outcomes of one evaluated generation.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation<O> {
    pub fitness: Vec<f64>,
    pub outcomes: Vec<O>,
    pub solved: bool,
    pub sugar_collected: Option<usize>,
    pub archive_size: Option<usize>,
}

/// A world the population can be evaluated in.
pub trait Environment {
    /// What one agent's episode produced.
    type Outcome: Clone;
    /// Strategy state that lives across generations of one run.
    type RunState;

    fn id(&self) -> String;
    fn input_width(&self) -> usize;
    fn output_width(&self) -> usize;
    fn check_strategy(&self, strategy: &Strategy) -> Result<(), ConfigError>;
    fn start_run(&self, strategy: &Strategy, streams: &SeedStreams) -> Result<Self::RunState>;
    fn evaluate(
        &self,
        genomes: &[Genome],
        strategy: &Strategy,
        state: &mut Self::RunState,
        generation: usize,
        time_frame: usize,
        streams: &SeedStreams,
    ) -> Result<Evaluation<Self::Outcome>>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationReport<O> {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub sugar_collected: Option<usize>,
    pub archive_size: Option<usize>,
    pub solved: bool,
    pub champion_index: usize,
    pub champion: O,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord<O> {
    pub seed: u64,
    pub strategy: String,
    pub environment: String,
    /// 0-based index of the first generation in which an agent solved the
    /// task.
    pub generations_to_solve: Option<usize>,
    pub reports: Vec<GenerationReport<O>>,
    /// Champion of the last evaluated generation.
    pub champion_genome: Option<Genome>,
}

/// Agent indices of the top `floor(fraction · N)` fitness values, best
/// first; equal fitness goes to the lower index.
pub fn select_elite(fitness: &[f64], fraction: f64) -> Vec<usize> {
    let count = (fraction * fitness.len() as f64).floor() as usize;
    let mut order = rank(fitness);
    order.truncate(count);
    order
}

/// All indices sorted by descending fitness, ties by ascending index.
pub fn rank(fitness: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitness.len()).collect();
    order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]).then(a.cmp(&b)));
    order
}

pub fn initial_population(dims: NetworkDims, size: usize, streams: &SeedStreams) -> Vec<Genome> {
    (0..size)
        .map(|i| Genome::random(dims, &mut streams.rng(Stream::Init, 0, i as u64)))
        .collect()
}

/// The next generation from a ranked one.
pub fn next_generation(
    population: &[Genome],
    ranking: &[usize],
    config: &EvolutionConfig,
    generation: usize,
    streams: &SeedStreams,
) -> Vec<Genome> {
    let elite = &ranking[..config.elite_count()];
    let sigma = config.mutation_sigma;
    let mutate = |parent: &Genome, slot: usize| {
        parent.mutate(
            sigma,
            &mut streams.rng(Stream::Mutation, generation as u64, slot as u64),
        )
    };
    match config.reproduction {
        Reproduction::InPlace => {
            let mut is_elite = vec![false; population.len()];
            for &e in elite {
                is_elite[e] = true;
            }
            population
                .iter()
                .enumerate()
                .map(|(i, g)| if is_elite[i] { g.clone() } else { mutate(g, i) })
                .collect()
        }
        Reproduction::FromElite => {
            let mut pick = streams.rng(Stream::Reproduce, generation as u64, 0);
            let mut next: Vec<Genome> = elite.iter().map(|&e| population[e].clone()).collect();
            for slot in elite.len()..population.len() {
                let parent = elite[pick.random_range(0..elite.len())];
                next.push(mutate(&population[parent], slot));
            }
            next
        }
    }
}

/// Runs one seeded evolution until an agent solves the task or the
/// generation budget is spent.
pub fn evolve_run<E: Environment>(
    config: &EvolutionConfig,
    env: &E,
    strategy: &Strategy,
) -> Result<RunRecord<E::Outcome>> {
    evolve_run_with(config, env, strategy, |_, _| {})
}

/// [`evolve_run`] with an observer called after each generation is ranked.
pub fn evolve_run_with<E: Environment>(
    config: &EvolutionConfig,
    env: &E,
    strategy: &Strategy,
    mut observe: impl FnMut(&[Genome], &GenerationReport<E::Outcome>),
) -> Result<RunRecord<E::Outcome>> {
    config.validate()?;
    strategy.validate()?;
    env.check_strategy(strategy)?;
    let dims = NetworkDims::new(env.input_width(), config.hidden, env.output_width())?;
    let streams = SeedStreams::new(config.master_seed);
    let mut state = env.start_run(strategy, &streams)?;
    let mut population = initial_population(dims, config.population_size, &streams);

    let mut record = RunRecord {
        seed: config.master_seed,
        strategy: strategy.name().to_string(),
        environment: env.id(),
        generations_to_solve: None,
        reports: Vec::new(),
        champion_genome: None,
    };

    for generation in 0..config.max_generations {
        let eval = env.evaluate(
            &population,
            strategy,
            &mut state,
            generation,
            config.time_frame,
            &streams,
        )?;
        let ranking = rank(&eval.fitness);
        let champion_index = ranking[0];
        let n = eval.fitness.len() as f64;
        let report = GenerationReport {
            generation,
            best_fitness: eval.fitness[champion_index],
            mean_fitness: eval.fitness.iter().sum::<f64>() / n,
            sugar_collected: eval.sugar_collected,
            archive_size: eval.archive_size,
            solved: eval.solved,
            champion_index,
            champion: eval.outcomes[champion_index].clone(),
        };
        observe(&population, &report);
        record.reports.push(report);
        record.champion_genome = Some(population[champion_index].clone());
        if eval.solved {
            record.generations_to_solve = Some(generation);
            break;
        }
        population = next_generation(&population, &ranking, config, generation, &streams);
    }
    Ok(record)
}
