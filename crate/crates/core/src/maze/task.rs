use rayon::prelude::*;

use crate::error::{ConfigError, Result};
use crate::evolution::{Environment, Evaluation};
use crate::rng::{SeedStreams, Stream};
use crate::rnn::Genome;
use crate::strategies::{
    distance_fitness, weighted_scores, BehaviorArchive, CellMask, Strategy, SugarField,
    SugarLayout, SugarParams,
};

use super::episode::{run_episode, run_lockstep, Action, AgentTrace, EpisodeParams};
use super::map::MazeMap;

/// Maze navigation as an evolution environment.
#[derive(Debug, Clone)]
pub struct MazeTask {
    pub map: MazeMap,
    /// `time_frame` here is ignored; the run configuration supplies it.
    pub episode: EpisodeParams,
}

/// Cross-generation strategy state of one maze run.
#[derive(Debug, Clone, Default)]
pub struct MazeRunState {
    pub archive: Option<BehaviorArchive>,
    mask: Option<CellMask>,
    fixed_field: Option<SugarField>,
}

impl MazeTask {
    pub fn new(map: MazeMap, episode: EpisodeParams) -> Self {
        MazeTask { map, episode }
    }

    /// The sugar layout used in `generation` of the run seeded by `streams`.
    pub fn sugar_layout(
        &self,
        sugar: &SugarParams,
        mask: &CellMask,
        generation: usize,
        streams: &SeedStreams,
    ) -> Result<SugarField> {
        let layout_gen = match sugar.layout {
            SugarLayout::PerGeneration => generation as u64,
            SugarLayout::Fixed => 0,
        };
        let mut rng = streams.rng(Stream::SugarLayout, layout_gen, 0);
        Ok(SugarField::sample(mask, sugar.density, &mut rng)?)
    }

    /// Runs all genomes on one clock, collecting into `field` as they move.
    pub fn sugar_episodes(
        &self,
        genomes: &[Genome],
        params: &EpisodeParams,
        field: &mut SugarField,
    ) -> Result<Vec<AgentTrace>> {
        run_lockstep(&self.map, genomes, params, |id, step, pos| {
            field.try_collect(id, pos, step);
        })
    }

    pub fn independent_episodes(
        &self,
        genomes: &[Genome],
        params: &EpisodeParams,
    ) -> Result<Vec<AgentTrace>> {
        genomes
            .par_iter()
            .map(|g| run_episode(&self.map, g, params, |_, _| {}))
            .collect()
    }
}

impl Environment for MazeTask {
    type Outcome = AgentTrace;
    type RunState = MazeRunState;

    fn id(&self) -> String {
        self.map.name().to_string()
    }

    fn input_width(&self) -> usize {
        self.episode.input.width()
    }

    fn output_width(&self) -> usize {
        Action::COUNT
    }

    fn check_strategy(&self, strategy: &Strategy) -> Result<(), ConfigError> {
        match strategy {
            Strategy::Pixel => Err(ConfigError::Incompatible(
                "pixel novelty needs a grid game, not a maze".into(),
            )),
            _ => Ok(()),
        }
    }

    fn start_run(&self, strategy: &Strategy, streams: &SeedStreams) -> Result<MazeRunState> {
        let mut state = MazeRunState::default();
        match strategy {
            Strategy::Novelty { k, threshold } => {
                state.archive = Some(BehaviorArchive::new(*k, *threshold));
            }
            Strategy::Sugar(sugar) | Strategy::Weighted { sugar, .. } => {
                let mask = CellMask::new(&self.map, sugar.cell_size)?;
                if sugar.layout == SugarLayout::Fixed {
                    state.fixed_field = Some(self.sugar_layout(sugar, &mask, 0, streams)?);
                }
                state.mask = Some(mask);
            }
            _ => {}
        }
        Ok(state)
    }

    fn evaluate(
        &self,
        genomes: &[Genome],
        strategy: &Strategy,
        state: &mut MazeRunState,
        generation: usize,
        time_frame: usize,
        streams: &SeedStreams,
    ) -> Result<Evaluation<AgentTrace>> {
        let params = EpisodeParams {
            time_frame,
            ..self.episode
        };
        params.input.validate(time_frame)?;
        let mut sugar_collected = None;
        let (traces, fitness) = match strategy {
            Strategy::Fitness => {
                let traces = self.independent_episodes(genomes, &params)?;
                let fitness = traces
                    .iter()
                    .map(|t| distance_fitness(t, &self.map))
                    .collect();
                (traces, fitness)
            }
            Strategy::Novelty { .. } => {
                let traces = self.independent_episodes(genomes, &params)?;
                let finals: Vec<_> = traces.iter().map(AgentTrace::final_position).collect();
                let archive = state.archive.as_mut().expect("novelty run state");
                let fitness = archive.score_and_update(&finals);
                (traces, fitness)
            }
            Strategy::Sugar(sugar) | Strategy::Weighted { sugar, .. } => {
                let mut field = match &state.fixed_field {
                    Some(f) => f.clone(),
                    None => {
                        let mask = state.mask.as_ref().expect("sugar run state");
                        self.sugar_layout(sugar, mask, generation, streams)?
                    }
                };
                let traces = self.sugar_episodes(genomes, &params, &mut field)?;
                let counts = field.fitness_all(genomes.len());
                sugar_collected = Some(field.collected_count());
                let fitness = match strategy {
                    Strategy::Weighted { alpha, .. } => {
                        weighted_scores(*alpha, &traces, &counts, &self.map)
                    }
                    _ => counts.iter().map(|&c| c as f64).collect(),
                };
                (traces, fitness)
            }
            Strategy::Pixel => unreachable!("rejected by check_strategy"),
        };
        Ok(Evaluation {
            solved: traces.iter().any(|t| t.reached_goal),
            fitness,
            outcomes: traces,
            sugar_collected,
            archive_size: state.archive.as_ref().map(BehaviorArchive::len),
        })
    }
}
