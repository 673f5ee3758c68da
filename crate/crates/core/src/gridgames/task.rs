use rayon::prelude::*;

use crate::error::{ConfigError, Result};
use crate::evolution::{evolve_run_with, Environment, Evaluation, EvolutionConfig};
use crate::rng::{SeedStreams, Stream};
use crate::rnn::{argmax, CompiledNetwork, Genome, NetworkDims};
use crate::strategies::Strategy;

use super::game::{Cell, Game, GameAction, GameKind, GameLayout, GRID};
use super::screen::{Screen, ScreenArchive};
use super::sugar::{GridSugarState, DEFAULT_RESPAWN_INTERVAL};

/// One agent's game episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GameOutcome {
    pub score: u32,
    pub frames: usize,
    /// Screens this agent was first to produce.
    pub new_screens: u32,
    pub sugar: u32,
}

/// A grid game as an evolution environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameTask {
    pub kind: GameKind,
    pub respawn_interval: usize,
}

/// Cross-generation state of one game run.
#[derive(Debug, Clone)]
pub struct GameRunState {
    pub layout: GameLayout,
    pub archive: ScreenArchive,
}

struct Player {
    net: CompiledNetwork,
    game: Game,
    screen: Screen,
    hidden: Vec<f64>,
    next_hidden: Vec<f64>,
    input: Vec<f64>,
    output: Vec<f64>,
    outcome: GameOutcome,
}

impl Player {
    fn new(layout: &GameLayout, genome: &Genome) -> Result<Self> {
        let dims = genome.dims();
        let kind = layout.kind();
        if dims.inputs() != kind.input_width() || dims.outputs() != GameAction::COUNT {
            return Err(crate::Error::Dimension(format!(
                "{kind} agents need {} inputs and {} outputs, genome has {} and {}",
                kind.input_width(),
                GameAction::COUNT,
                dims.inputs(),
                dims.outputs()
            )));
        }
        let game = Game::new(layout);
        Ok(Player {
            net: CompiledNetwork::new(genome),
            screen: game.screen(),
            game,
            hidden: vec![0.0; dims.hidden()],
            next_hidden: vec![0.0; dims.hidden()],
            input: vec![0.0; dims.inputs()],
            output: vec![0.0; GameAction::COUNT],
            outcome: GameOutcome::default(),
        })
    }

    fn live(&self) -> bool {
        !self.game.is_done()
    }

    /// Plays one frame from the current screen.
    fn advance(&mut self) {
        self.screen.write_inputs(&mut self.input);
        self.net.step(
            &self.hidden,
            &self.input,
            &mut self.next_hidden,
            &mut self.output,
        );
        std::mem::swap(&mut self.hidden, &mut self.next_hidden);
        self.game.step(GameAction::from_index(argmax(&self.output)));
        self.game.draw(&mut self.screen);
        self.outcome.score = self.game.score();
        self.outcome.frames = self.game.frame();
    }
}

/// Plays one genome for up to `time_frame` frames, calling `on_frame` with
/// the game after every frame (and once before the first).
pub fn play_episode(
    layout: &GameLayout,
    genome: &Genome,
    time_frame: usize,
    mut on_frame: impl FnMut(&Game),
) -> Result<GameOutcome> {
    let mut p = Player::new(layout, genome)?;
    on_frame(&p.game);
    while p.live() && p.game.frame() < time_frame {
        p.advance();
        on_frame(&p.game);
    }
    Ok(p.outcome)
}

/// Runs every genome on one clock. Each frame the live agents move in index
/// order; a pixel archive is offered each new screen as it appears, and
/// grid sugar is settled once all agents have moved.
pub fn play_lockstep<R: rand::Rng>(
    layout: &GameLayout,
    genomes: &[Genome],
    time_frame: usize,
    mut archive: Option<&mut ScreenArchive>,
    mut sugar: Option<(&mut GridSugarState, &mut R)>,
) -> Result<Vec<GameOutcome>> {
    let mut players = genomes
        .iter()
        .map(|g| Player::new(layout, g))
        .collect::<Result<Vec<_>>>()?;
    let mut positions: Vec<Option<Cell>> = vec![None; players.len()];
    for frame in 1..=time_frame {
        if !players.iter().any(Player::live) {
            break;
        }
        for (slot, p) in positions.iter_mut().zip(players.iter_mut()) {
            if !p.live() {
                *slot = None;
                continue;
            }
            p.advance();
            *slot = Some(p.game.player());
            if let Some(archive) = archive.as_deref_mut() {
                p.outcome.new_screens += archive.reward(&p.screen)?;
            }
        }
        if let Some((field, rng)) = sugar.as_mut() {
            let got = field.tick(frame, &positions, *rng);
            for (p, g) in players.iter_mut().zip(got) {
                p.outcome.sugar += g;
            }
        }
    }
    Ok(players.into_iter().map(|p| p.outcome).collect())
}

impl GameTask {
    pub fn new(kind: GameKind) -> Self {
        GameTask {
            kind,
            respawn_interval: DEFAULT_RESPAWN_INTERVAL,
        }
    }

    /// The layout every generation of the run seeded by `streams` plays.
    pub fn layout(&self, streams: &SeedStreams) -> GameLayout {
        GameLayout::generate(self.kind, &mut streams.rng(Stream::GameLayout, 0, 0))
    }

    pub fn sugar_field(
        &self,
        density: f64,
        generation: usize,
        streams: &SeedStreams,
    ) -> Result<(GridSugarState, rand_chacha::ChaCha8Rng)> {
        let mut rng = streams.rng(Stream::GridSugar, generation as u64, 0);
        let field = GridSugarState::new(GRID, GRID, density, self.respawn_interval, &mut rng)?;
        Ok((field, rng))
    }

    pub fn independent_episodes(
        &self,
        layout: &GameLayout,
        genomes: &[Genome],
        time_frame: usize,
    ) -> Result<Vec<GameOutcome>> {
        genomes
            .par_iter()
            .map(|g| play_episode(layout, g, time_frame, |_| {}))
            .collect()
    }
}

impl Environment for GameTask {
    type Outcome = GameOutcome;
    type RunState = GameRunState;

    fn id(&self) -> String {
        self.kind.name().to_string()
    }

    fn input_width(&self) -> usize {
        self.kind.input_width()
    }

    fn output_width(&self) -> usize {
        GameAction::COUNT
    }

    fn check_strategy(&self, strategy: &Strategy) -> Result<(), ConfigError> {
        match strategy {
            Strategy::Fitness | Strategy::Sugar(_) | Strategy::Pixel => Ok(()),
            other => Err(ConfigError::Incompatible(format!(
                "{} is not available for grid games",
                other.name()
            ))),
        }
    }

    fn start_run(&self, _: &Strategy, streams: &SeedStreams) -> Result<GameRunState> {
        if self.respawn_interval == 0 {
            return Err(ConfigError::invalid("respawn_interval", "must be at least 1").into());
        }
        Ok(GameRunState {
            layout: self.layout(streams),
            archive: ScreenArchive::new(self.kind.screen_shape()),
        })
    }

    fn evaluate(
        &self,
        genomes: &[Genome],
        strategy: &Strategy,
        state: &mut GameRunState,
        generation: usize,
        time_frame: usize,
        streams: &SeedStreams,
    ) -> Result<Evaluation<GameOutcome>> {
        let mut sugar_collected = None;
        let mut archive_size = None;
        let (outcomes, fitness): (Vec<GameOutcome>, Vec<f64>) = match strategy {
            Strategy::Fitness => {
                let out = self.independent_episodes(&state.layout, genomes, time_frame)?;
                let fit = out.iter().map(|o| o.score as f64).collect();
                (out, fit)
            }
            Strategy::Sugar(params) => {
                let (mut field, mut rng) = self.sugar_field(params.density, generation, streams)?;
                let out = play_lockstep(
                    &state.layout,
                    genomes,
                    time_frame,
                    None,
                    Some((&mut field, &mut rng)),
                )?;
                sugar_collected = Some(field.collections().len());
                let fit = out.iter().map(|o| o.sugar as f64).collect();
                (out, fit)
            }
            Strategy::Pixel => {
                state.archive.begin_generation(generation);
                let out = play_lockstep::<rand_chacha::ChaCha8Rng>(
                    &state.layout,
                    genomes,
                    time_frame,
                    Some(&mut state.archive),
                    None,
                )?;
                archive_size = Some(state.archive.len());
                let fit = out.iter().map(|o| o.new_screens as f64).collect();
                (out, fit)
            }
            _ => unreachable!("rejected by check_strategy"),
        };
        Ok(Evaluation {
            fitness,
            outcomes,
            solved: false,
            sugar_collected,
            archive_size,
        })
    }
}

/// Champion game scores of one run, one per generation.
#[derive(Debug, Clone, PartialEq)]
pub struct BatteryResult {
    pub champion_scores: Vec<u32>,
}

impl BatteryResult {
    /// Mean champion score over the last `window` generations.
    pub fn tail_mean(&self, window: usize) -> f64 {
        let tail = &self.champion_scores[self.champion_scores.len().saturating_sub(window)..];
        if tail.is_empty() {
            0.0
        } else {
            tail.iter().map(|&s| s as f64).sum::<f64>() / tail.len() as f64
        }
    }
}

/// Number of final generations a battery score averages over.
pub const BATTERY_WINDOW: usize = 100;

/// Evolves one run and records the game score of each generation's
/// champion.
pub fn game_battery(
    config: &EvolutionConfig,
    task: &GameTask,
    strategy: &Strategy,
) -> Result<BatteryResult> {
    let mut champion_scores = Vec::with_capacity(config.max_generations);
    evolve_run_with(config, task, strategy, |_, report| {
        champion_scores.push(report.champion.score);
    })?;
    Ok(BatteryResult { champion_scores })
}

/// Baseline: every generation is a fresh random population; the best score
/// of each generation is recorded.
pub fn random_search(config: &EvolutionConfig, task: &GameTask) -> Result<BatteryResult> {
    config.validate()?;
    let dims = NetworkDims::new(task.input_width(), config.hidden, task.output_width())?;
    let streams = SeedStreams::new(config.master_seed);
    let layout = task.layout(&streams);
    let mut champion_scores = Vec::with_capacity(config.max_generations);
    for generation in 0..config.max_generations {
        let genomes: Vec<Genome> = (0..config.population_size)
            .map(|i| {
                let mut rng = streams.rng(Stream::RandomSearch, generation as u64, i as u64);
                Genome::random(dims, &mut rng)
            })
            .collect();
        let out = task.independent_episodes(&layout, &genomes, config.time_frame)?;
        champion_scores.push(out.iter().map(|o| o.score).max().unwrap_or(0));
    }
    Ok(BatteryResult { champion_scores })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::SugarParams;

    fn small(max_generations: usize, seed: u64) -> EvolutionConfig {
        EvolutionConfig {
            population_size: 12,
            max_generations,
            time_frame: 60,
            master_seed: seed,
            ..EvolutionConfig::grid_game()
        }
    }

    fn population(kind: GameKind, n: usize, seed: u64) -> Vec<Genome> {
        let dims = NetworkDims::new(kind.input_width(), 8, GameAction::COUNT).unwrap();
        crate::evolution::initial_population(dims, n, &SeedStreams::new(seed))
    }

    #[test]
    fn lockstep_matches_solo_play() {
        let streams = SeedStreams::new(4);
        for kind in [GameKind::Collector, GameKind::Crossing] {
            let task = GameTask::new(kind);
            let layout = task.layout(&streams);
            let genomes = population(kind, 6, 4);
            let solo = task.independent_episodes(&layout, &genomes, 80).unwrap();
            let mut archive = ScreenArchive::new(kind.screen_shape());
            let shared = play_lockstep::<rand_chacha::ChaCha8Rng>(
                &layout,
                &genomes,
                80,
                Some(&mut archive),
                None,
            )
            .unwrap();
            for (a, b) in solo.iter().zip(&shared) {
                assert_eq!((a.score, a.frames), (b.score, b.frames));
            }
            let total: u32 = shared.iter().map(|o| o.new_screens).sum();
            assert_eq!(total as usize, archive.len());
        }
    }

    #[test]
    fn pixel_rewards_are_first_sightings() {
        let task = GameTask::new(GameKind::Crossing);
        let streams = SeedStreams::new(2);
        let layout = task.layout(&streams);
        let genomes = population(GameKind::Crossing, 5, 2);
        let mut archive = ScreenArchive::new(GameKind::Crossing.screen_shape());
        let out = play_lockstep::<rand_chacha::ChaCha8Rng>(
            &layout,
            &genomes,
            40,
            Some(&mut archive),
            None,
        )
        .unwrap();
        // Identical genomes replay agent 0's screens and earn nothing.
        let clones = vec![genomes[0].clone(); 3];
        let mut fresh = ScreenArchive::new(GameKind::Crossing.screen_shape());
        let dup =
            play_lockstep::<rand_chacha::ChaCha8Rng>(&layout, &clones, 40, Some(&mut fresh), None)
                .unwrap();
        assert_eq!(dup[0].new_screens, out[0].new_screens);
        assert_eq!(dup[1].new_screens, 0);
        assert_eq!(dup[2].new_screens, 0);
    }

    #[test]
    fn rejects_maze_only_strategies() {
        let task = GameTask::new(GameKind::Collector);
        assert!(task
            .check_strategy(&Strategy::Novelty {
                k: 3,
                threshold: 1.0
            })
            .is_err());
        assert!(task.check_strategy(&Strategy::Pixel).is_ok());
    }

    #[test]
    fn genome_shape_is_checked() {
        let dims = NetworkDims::new(8, 4, 4).unwrap();
        let g = Genome::zeros(dims);
        assert!(play_episode(&GameLayout::empty_crossing(), &g, 5, |_| {}).is_err());
    }

    #[test]
    fn batteries_replay() {
        for strategy in [
            Strategy::Fitness,
            Strategy::Sugar(SugarParams::default()),
            Strategy::Pixel,
        ] {
            let task = GameTask::new(GameKind::Collector);
            let a = game_battery(&small(4, 7), &task, &strategy).unwrap();
            let b = game_battery(&small(4, 7), &task, &strategy).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.champion_scores.len(), 4);
        }
    }

    #[test]
    fn fitness_champion_never_regresses() {
        let task = GameTask::new(GameKind::Crossing);
        let r = game_battery(&small(8, 1), &task, &Strategy::Fitness).unwrap();
        assert!(r.champion_scores.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn tail_mean_window() {
        let r = BatteryResult {
            champion_scores: vec![0, 10, 20, 30],
        };
        assert_eq!(r.tail_mean(2), 25.0);
        assert_eq!(r.tail_mean(100), 15.0);
        assert_eq!(
            BatteryResult {
                champion_scores: vec![]
            }
            .tail_mean(5),
            0.0
        );
    }

    #[test]
    fn random_search_is_seeded() {
        let task = GameTask::new(GameKind::Crossing);
        assert_eq!(
            random_search(&small(3, 5), &task).unwrap(),
            random_search(&small(3, 5), &task).unwrap()
        );
    }
}
