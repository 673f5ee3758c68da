use crate::error::{ConfigError, Result};
use crate::rnn::{argmax, CompiledNetwork, Genome, HiddenState};

use super::geometry::Vec2;
use super::map::MazeMap;
use super::sensors::{raycast, sense_into, Direction, SENSOR_COUNT};

/// Network output slot → movement. Up is −y.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Up = 0,
    Down = 1,
    Left = 2,
    Right = 3,
}

impl Action {
    pub const COUNT: usize = 4;

    pub fn from_index(i: usize) -> Action {
        match i {
            0 => Action::Up,
            1 => Action::Down,
            2 => Action::Left,
            3 => Action::Right,
            _ => panic!("action index {i} out of range"),
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Action::Up => Direction::NegY,
            Action::Down => Direction::PosY,
            Action::Left => Direction::NegX,
            Action::Right => Direction::PosX,
        }
    }
}

/// What happens when a move would cross a wall.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Collision {
    /// The move is cancelled for that step only.
    #[default]
    Block,
    /// The agent stays where it is for the rest of the episode.
    Freeze,
}

/// What the network sees each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputMode {
    #[default]
    Sensors,
    NoInput,
    /// The step index in binary, least-significant bit first.
    BinaryCounter {
        bits: usize,
    },
}

impl InputMode {
    pub const DEFAULT_COUNTER_BITS: usize = 10;

    pub fn width(&self) -> usize {
        match *self {
            InputMode::Sensors => SENSOR_COUNT,
            InputMode::NoInput => 0,
            InputMode::BinaryCounter { bits } => bits,
        }
    }

    pub fn validate(&self, time_frame: usize) -> Result<(), ConfigError> {
        if let InputMode::BinaryCounter { bits } = *self {
            // ceil(log2(time_frame)) bits are enough to count 0..time_frame.
            let needed = usize::BITS - time_frame.saturating_sub(1).leading_zeros();
            if bits < needed as usize || bits == 0 {
                return Err(ConfigError::invalid(
                    "counter_bits",
                    format!("{bits} bits cannot count {time_frame} steps"),
                ));
            }
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self {
            InputMode::Sensors => "sensors".into(),
            InputMode::NoInput => "no_input".into(),
            InputMode::BinaryCounter { bits } => format!("binary_counter{bits}"),
        }
    }
}

/// Per-episode settings shared by every agent in a generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeParams {
    pub time_frame: usize,
    pub speed: f64,
    pub input: InputMode,
    pub collision: Collision,
}

impl Default for EpisodeParams {
    fn default() -> Self {
        EpisodeParams {
            time_frame: 600,
            speed: 1.5,
            input: InputMode::Sensors,
            collision: Collision::Block,
        }
    }
}

/// Everything one agent did in an episode.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentTrace {
    /// Start position followed by one position per simulated step.
    pub positions: Vec<Vec2>,
    pub reached_goal: bool,
    pub steps_used: usize,
}

impl AgentTrace {
    pub fn final_position(&self) -> Vec2 {
        *self.positions.last().expect("trace always holds the start")
    }
}

/// Moves one step in `action`'s direction unless the path touches a wall or
/// leaves the bounds. Returns the new position and whether it was blocked.
pub fn step_agent(map: &MazeMap, pos: Vec2, action: Action, speed: f64) -> (Vec2, bool) {
    let dir = action.direction();
    if raycast(map, pos, dir) <= speed {
        (pos, true)
    } else {
        (pos + dir.unit() * speed, false)
    }
}

/// The network input for `mode` at `pos` on step `step`.
pub fn build_input(mode: InputMode, map: &MazeMap, pos: Vec2, step: usize) -> Vec<f64> {
    let mut out = vec![0.0; mode.width()];
    build_input_into(mode, map, pos, step, &mut out);
    out
}

fn build_input_into(mode: InputMode, map: &MazeMap, pos: Vec2, step: usize, out: &mut [f64]) {
    match mode {
        InputMode::Sensors => sense_into(map, pos, out),
        InputMode::NoInput => {}
        InputMode::BinaryCounter { bits } => {
            for (b, slot) in out.iter_mut().enumerate().take(bits) {
                *slot = ((step >> b) & 1) as f64;
            }
        }
    }
}

struct Agent {
    net: CompiledNetwork,
    pos: Vec2,
    hidden: Vec<f64>,
    next_hidden: Vec<f64>,
    input: Vec<f64>,
    output: Vec<f64>,
    frozen: bool,
    /// Blocked with a hidden state that maps to itself: every later step
    /// repeats this one exactly.
    stalled: bool,
    trace: AgentTrace,
}

impl Agent {
    fn new(map: &MazeMap, genome: &Genome, params: &EpisodeParams) -> Result<Self> {
        let dims = genome.dims();
        let input = vec![0.0; params.input.width()];
        genome.check_shapes(&HiddenState::zeros(dims), &input)?;
        if dims.outputs() != Action::COUNT {
            return Err(crate::Error::Dimension(format!(
                "maze agents need {} outputs, genome has {}",
                Action::COUNT,
                dims.outputs()
            )));
        }
        let mut positions = Vec::with_capacity(params.time_frame + 1);
        positions.push(map.start());
        Ok(Agent {
            net: CompiledNetwork::new(genome),
            pos: map.start(),
            hidden: vec![0.0; dims.hidden()],
            next_hidden: vec![0.0; dims.hidden()],
            input,
            output: vec![0.0; dims.outputs()],
            frozen: false,
            stalled: false,
            trace: AgentTrace {
                positions,
                reached_goal: map.in_goal(map.start()),
                steps_used: 0,
            },
        })
    }

    fn finished(&self) -> bool {
        self.frozen || self.trace.reached_goal
    }

    fn advance(&mut self, map: &MazeMap, params: &EpisodeParams, step: usize) -> Vec2 {
        if self.stalled {
            self.trace.positions.push(self.pos);
            self.trace.steps_used += 1;
            return self.pos;
        }
        build_input_into(params.input, map, self.pos, step, &mut self.input);
        self.net.step(
            &self.hidden,
            &self.input,
            &mut self.next_hidden,
            &mut self.output,
        );
        let action = Action::from_index(argmax(&self.output));
        let (pos, blocked) = step_agent(map, self.pos, action, params.speed);
        if blocked
            && !matches!(params.input, InputMode::BinaryCounter { .. })
            && self.hidden == self.next_hidden
        {
            self.stalled = true;
        }
        std::mem::swap(&mut self.hidden, &mut self.next_hidden);
        self.pos = pos;
        self.trace.positions.push(pos);
        self.trace.steps_used += 1;
        if map.in_goal(pos) {
            self.trace.reached_goal = true;
        }
        if blocked && params.collision == Collision::Freeze {
            self.frozen = true;
        }
        pos
    }
}

/// Runs one agent from the start with a zeroed hidden state for up to
/// `params.time_frame` steps, stopping early at the goal. `hook(step, pos)`
/// sees every position after its move.
pub fn run_episode(
    map: &MazeMap,
    genome: &Genome,
    params: &EpisodeParams,
    mut hook: impl FnMut(usize, Vec2),
) -> Result<AgentTrace> {
    let mut agent = Agent::new(map, genome, params)?;
    for step in 0..params.time_frame {
        if agent.finished() {
            break;
        }
        let pos = agent.advance(map, params, step);
        hook(step, pos);
    }
    Ok(agent.trace)
}

/// Runs every genome on one shared clock. On each tick agents move in
/// ascending index order and `on_tick(agent, step, pos)` is called right
/// after each move, so whoever is called first on a tick wins any race.
pub fn run_lockstep(
    map: &MazeMap,
    genomes: &[Genome],
    params: &EpisodeParams,
    mut on_tick: impl FnMut(usize, usize, Vec2),
) -> Result<Vec<AgentTrace>> {
    let mut agents = genomes
        .iter()
        .map(|g| Agent::new(map, g, params))
        .collect::<Result<Vec<_>>>()?;
    for step in 0..params.time_frame {
        let mut any_live = false;
        for (id, agent) in agents.iter_mut().enumerate() {
            if agent.finished() {
                continue;
            }
            any_live = true;
            let pos = agent.advance(map, params, step);
            on_tick(id, step, pos);
        }
        if !any_live {
            break;
        }
    }
    Ok(agents.into_iter().map(|a| a.trace).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maze::geometry::Segment;
    use crate::rnn::NetworkDims;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn corridor() -> MazeMap {
        MazeMap::new(
            "corridor",
            100.0,
            20.0,
            Vec2::new(10.0, 10.0),
            Vec2::new(90.0, 10.0),
            5.0,
            vec![],
        )
        .unwrap()
    }

    fn constant(action: Action, inputs: usize) -> Genome {
        let mut g = Genome::zeros(NetworkDims::new(inputs, 4, 4).unwrap());
        g.output_bias_mut()[action as usize] = 1.0;
        g
    }

    #[test]
    fn open_step() {
        let m = corridor();
        let (p, blocked) = step_agent(&m, Vec2::new(10.0, 10.0), Action::Right, 2.0);
        assert_eq!(p, Vec2::new(12.0, 10.0));
        assert!(!blocked);
    }

    #[test]
    fn blocked_step_is_idempotent() {
        let m = MazeMap::new(
            "w",
            100.0,
            20.0,
            Vec2::new(10.0, 10.0),
            Vec2::new(90.0, 10.0),
            5.0,
            vec![Segment::new(Vec2::new(11.0, 0.0), Vec2::new(11.0, 20.0))],
        )
        .unwrap();
        let start = Vec2::new(10.0, 10.0);
        let (p, blocked) = step_agent(&m, start, Action::Right, 2.0);
        assert_eq!((p, blocked), (start, true));
        let (p2, blocked2) = step_agent(&m, p, Action::Right, 2.0);
        assert_eq!((p2, blocked2), (start, true));
    }

    #[test]
    fn bounds_block() {
        let m = corridor();
        let (p, blocked) = step_agent(&m, Vec2::new(10.0, 1.0), Action::Up, 1.5);
        assert!(blocked);
        assert_eq!(p, Vec2::new(10.0, 1.0));
    }

    #[test]
    fn counter_encoding() {
        let m = corridor();
        let x = build_input(InputMode::BinaryCounter { bits: 10 }, &m, m.start(), 5);
        assert_eq!(x, vec![1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(build_input(InputMode::NoInput, &m, m.start(), 3).is_empty());
        let s = build_input(InputMode::Sensors, &m, m.start(), 0);
        assert_eq!(s.len(), 8);
        assert_eq!(s[4..].iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn counter_width_validation() {
        assert!(InputMode::BinaryCounter { bits: 10 }.validate(600).is_ok());
        assert!(InputMode::BinaryCounter { bits: 10 }.validate(1024).is_ok());
        assert!(InputMode::BinaryCounter { bits: 9 }.validate(600).is_err());
        assert!(InputMode::BinaryCounter { bits: 10 }
            .validate(1025)
            .is_err());
    }

    #[test]
    fn zero_horizon() {
        let m = corridor();
        let params = EpisodeParams {
            time_frame: 0,
            ..EpisodeParams::default()
        };
        let t = run_episode(&m, &constant(Action::Right, 8), &params, |_, _| {}).unwrap();
        assert_eq!(t.positions, vec![m.start()]);
        assert!(!t.reached_goal);
        assert_eq!(t.steps_used, 0);
    }

    #[test]
    fn straight_run_reaches_goal() {
        let m = corridor();
        let params = EpisodeParams::default();
        let mut hooked = Vec::new();
        let t = run_episode(&m, &constant(Action::Right, 8), &params, |s, p| {
            hooked.push((s, p))
        })
        .unwrap();
        assert!(t.reached_goal);
        // goal edge at x = 85, 75 units away
        assert_eq!(t.steps_used, (75.0f64 / 1.5).ceil() as usize);
        assert_eq!(hooked.len(), t.steps_used);
        assert_eq!(hooked.last().unwrap().1, t.final_position());
    }

    #[test]
    fn freeze_stops_after_first_block() {
        let m = corridor();
        let params = EpisodeParams {
            collision: Collision::Freeze,
            ..EpisodeParams::default()
        };
        let t = run_episode(&m, &constant(Action::Up, 8), &params, |_, _| {}).unwrap();
        assert!(t.steps_used < 10);
        let blocked = EpisodeParams::default();
        let t2 = run_episode(&m, &constant(Action::Up, 8), &blocked, |_, _| {}).unwrap();
        assert_eq!(t2.steps_used, 600);
        assert_eq!(t.final_position(), t2.final_position());
    }

    #[test]
    fn rejects_mismatched_genome() {
        let m = corridor();
        let params = EpisodeParams::default();
        assert!(run_episode(&m, &constant(Action::Right, 3), &params, |_, _| {}).is_err());
        let g = Genome::zeros(NetworkDims::new(8, 4, 3).unwrap());
        assert!(run_episode(&m, &g, &params, |_, _| {}).is_err());
    }

    #[test]
    fn lockstep_matches_independent_runs() {
        let m = crate::maze::builtin_map("medium").unwrap();
        let d = NetworkDims::new(8, 32, 4).unwrap();
        let genomes: Vec<Genome> = (0..6)
            .map(|s| Genome::random(d, &mut ChaCha8Rng::seed_from_u64(s)))
            .collect();
        let params = EpisodeParams::default();
        let mut order = Vec::new();
        let joint =
            run_lockstep(&m, &genomes, &params, |id, step, _| order.push((step, id))).unwrap();
        for (g, t) in genomes.iter().zip(&joint) {
            assert_eq!(&run_episode(&m, g, &params, |_, _| {}).unwrap(), t);
        }
        assert!(order.windows(2).all(|w| w[0] < w[1]));
    }
}
