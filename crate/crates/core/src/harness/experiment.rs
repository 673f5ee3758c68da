use std::path::PathBuf;

use rayon::prelude::*;

use crate::error::{ConfigError, Result};
use crate::evolution::{evolve_run, Environment, EvolutionConfig};
use crate::gridgames::{game_battery, random_search, GameTask, BATTERY_WINDOW};
use crate::maze::{InputMode, MazeTask};
use crate::stats::{summarize, t_test_with, RunSummary, Variance};
use crate::strategies::{Strategy, SugarParams};

use super::report::{
    write_run_csv, write_scores_csv, write_summary_csv, write_sweep_csv, OutcomeColumns,
    SummaryTable,
};

/// Runs of one labelled configuration. Run `i` uses seed `seed_base + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub label: String,
    pub seeds: Vec<u64>,
    /// Per run, the 1-based solving generation.
    pub generations: Vec<Option<usize>>,
}

impl Batch {
    pub fn summary(&self) -> RunSummary {
        let v: Vec<Option<f64>> = self
            .generations
            .iter()
            .map(|g| g.map(|g| g as f64))
            .collect();
        RunSummary::from_outcomes(&v)
    }

    pub fn solved(&self) -> Vec<f64> {
        self.generations
            .iter()
            .flatten()
            .map(|&g| g as f64)
            .collect()
    }
}

/// Shared settings of a batch of runs.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchSpec {
    pub config: EvolutionConfig,
    pub runs: usize,
    pub seed_base: u64,
    /// Per-run CSVs go to `<out>/<label>/run_<seed>.csv` when set.
    pub out: Option<PathBuf>,
}

impl BatchSpec {
    pub fn seeds(&self) -> Vec<u64> {
        (0..self.runs as u64).map(|i| self.seed_base + i).collect()
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.runs == 0 {
            return Err(ConfigError::invalid("runs", "must be at least 1"));
        }
        self.config.validate()
    }
}

/// Evolves one run per seed in parallel.
pub fn run_batch<E>(env: &E, label: &str, strategy: &Strategy, spec: &BatchSpec) -> Result<Batch>
where
    E: Environment + Sync,
    E::Outcome: OutcomeColumns + Send,
{
    spec.validate()?;
    let seeds = spec.seeds();
    let generations = seeds
        .par_iter()
        .map(|&seed| {
            let config = EvolutionConfig {
                master_seed: seed,
                ..spec.config.clone()
            };
            let record = evolve_run(&config, env, strategy)?;
            if let Some(out) = &spec.out {
                write_run_csv(&out.join(label).join(format!("run_{seed}.csv")), &record)?;
            }
            Ok(record.generations_to_solve.map(|g| g + 1))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Batch {
        label: label.to_string(),
        seeds,
        generations,
    })
}

/// Summaries of `batches` with a t-test between every pair, on the solving
/// generations of the successful runs.
pub fn summarize_batches(batches: &[Batch], variance: Variance) -> SummaryTable {
    let solved: Vec<Vec<f64>> = batches.iter().map(Batch::solved).collect();
    let p_values = (0..batches.len())
        .map(|i| {
            (0..batches.len())
                .map(|j| {
                    if i == j {
                        None
                    } else {
                        t_test_with(&solved[i], &solved[j], variance).map(|t| t.p)
                    }
                })
                .collect()
        })
        .collect();
    SummaryTable {
        rows: batches
            .iter()
            .map(|b| (b.label.clone(), b.summary()))
            .collect(),
        p_values,
    }
}

/// Every strategy on one environment, then `summary.csv`.
pub fn run_experiment<E>(
    env: &E,
    strategies: &[(String, Strategy)],
    spec: &BatchSpec,
    variance: Variance,
) -> Result<(Vec<Batch>, SummaryTable)>
where
    E: Environment + Sync,
    E::Outcome: OutcomeColumns + Send,
{
    let batches = strategies
        .iter()
        .map(|(label, s)| run_batch(env, label, s, spec))
        .collect::<Result<Vec<_>>>()?;
    let table = summarize_batches(&batches, variance);
    if let Some(out) = &spec.out {
        write_summary_csv(&out.join("summary.csv"), &table)?;
    }
    Ok((batches, table))
}

pub fn density_label(density: f64) -> String {
    format!("density_{density}")
}

/// Sugar Search at each density; writes `density_sweep.csv`.
pub fn run_density_sweep(
    task: &MazeTask,
    sugar: SugarParams,
    densities: &[f64],
    spec: &BatchSpec,
) -> Result<Vec<(f64, Batch)>> {
    if densities.len() < 2 {
        return Err(
            ConfigError::invalid("densities", "a sweep needs at least two densities").into(),
        );
    }
    let mut sorted = densities.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    for d in sorted {
        let strategy = Strategy::Sugar(SugarParams {
            density: d,
            ..sugar
        });
        strategy.validate()?;
        out.push((d, run_batch(task, &density_label(d), &strategy, spec)?));
    }
    if let Some(dir) = &spec.out {
        let rows: Vec<(f64, RunSummary)> = out.iter().map(|(d, b)| (*d, b.summary())).collect();
        write_sweep_csv(&dir.join("density_sweep.csv"), &rows)?;
    }
    Ok(out)
}

/// Sugar Search under each input mode; writes `summary.csv`.
pub fn run_ablation(
    task: &MazeTask,
    sugar: SugarParams,
    modes: &[InputMode],
    spec: &BatchSpec,
    variance: Variance,
) -> Result<(Vec<Batch>, SummaryTable)> {
    let strategy = Strategy::Sugar(sugar);
    let batches = modes
        .iter()
        .map(|&mode| {
            mode.validate(spec.config.time_frame)?;
            let mut t = task.clone();
            t.episode.input = mode;
            run_batch(&t, &mode.label(), &strategy, spec)
        })
        .collect::<Result<Vec<_>>>()?;
    let table = summarize_batches(&batches, variance);
    if let Some(out) = &spec.out {
        write_summary_csv(&out.join("summary.csv"), &table)?;
    }
    Ok((batches, table))
}

/// Champion score of a game run, averaged over its last generations.
#[derive(Debug, Clone, PartialEq)]
pub struct GameBatch {
    pub label: String,
    pub seeds: Vec<u64>,
    pub scores: Vec<f64>,
}

pub const RANDOM_SEARCH_LABEL: &str = "random";

/// Each strategy, plus the random-search baseline on the same seeds.
pub fn run_games(
    task: &GameTask,
    strategies: &[(String, Strategy)],
    spec: &BatchSpec,
) -> Result<Vec<GameBatch>> {
    spec.validate()?;
    let seeds = spec.seeds();
    let mut labels: Vec<(String, Option<Strategy>)> = strategies
        .iter()
        .map(|(l, s)| (l.clone(), Some(*s)))
        .collect();
    labels.push((RANDOM_SEARCH_LABEL.to_string(), None));
    let mut out = Vec::new();
    for (label, strategy) in labels {
        let scores = seeds
            .par_iter()
            .map(|&seed| {
                let config = EvolutionConfig {
                    master_seed: seed,
                    ..spec.config.clone()
                };
                let result = match &strategy {
                    Some(s) => game_battery(&config, task, s)?,
                    None => random_search(&config, task)?,
                };
                if let Some(dir) = &spec.out {
                    let path = dir.join(&label).join(format!("run_{seed}.csv"));
                    write_scores_csv(&path, seed, &label, &result.champion_scores)?;
                }
                Ok(result.tail_mean(BATTERY_WINDOW))
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(GameBatch {
            label,
            seeds: seeds.clone(),
            scores,
        });
    }
    if let Some(dir) = &spec.out {
        let table = SummaryTable {
            rows: out
                .iter()
                .map(|b| {
                    let s = RunSummary {
                        runs: b.scores.len(),
                        successes: b.scores.len(),
                        stats: summarize(&b.scores),
                    };
                    (b.label.clone(), s)
                })
                .collect(),
            p_values: out
                .iter()
                .map(|a| {
                    out.iter()
                        .map(|b| {
                            if a.label == b.label {
                                None
                            } else {
                                t_test_with(&a.scores, &b.scores, Variance::Pooled).map(|t| t.p)
                            }
                        })
                        .collect()
                })
                .collect(),
        };
        write_summary_csv(&dir.join("summary.csv"), &table)?;
    }
    Ok(out)
}
