use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;

use crate::error::ConfigError;

use super::screen::Screen;

pub const GRID: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GameKind {
    /// Pick up pellets while a chasing enemy closes in.
    Collector,
    /// Climb through lanes of sliding cars.
    Crossing,
}

impl GameKind {
    pub fn name(self) -> &'static str {
        match self {
            GameKind::Collector => "collector",
            GameKind::Crossing => "crossing",
        }
    }

    pub fn channels(self) -> usize {
        self.glyphs().len()
    }

    /// Text-art glyph of each channel, in channel order.
    pub fn glyphs(self) -> &'static [char] {
        match self {
            GameKind::Collector => &['P', 'o', 'E'],
            GameKind::Crossing => &['P', '='],
        }
    }

    pub fn screen_shape(self) -> (usize, usize, usize) {
        (self.channels(), GRID, GRID)
    }

    pub fn input_width(self) -> usize {
        self.channels() * GRID * GRID
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GameKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "collector" => Ok(GameKind::Collector),
            "crossing" => Ok(GameKind::Crossing),
            other => Err(ConfigError::invalid(
                "game",
                format!("unknown game `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameAction {
    Up,
    Down,
    Left,
    Right,
    Noop,
}

impl GameAction {
    pub const COUNT: usize = 5;

    pub fn from_index(i: usize) -> GameAction {
        match i {
            0 => GameAction::Up,
            1 => GameAction::Down,
            2 => GameAction::Left,
            3 => GameAction::Right,
            4 => GameAction::Noop,
            _ => panic!("action index {i} out of range"),
        }
    }

    fn apply(self, (row, col): Cell) -> Cell {
        let last = GRID - 1;
        match self {
            GameAction::Up => (row.saturating_sub(1), col),
            GameAction::Down => ((row + 1).min(last), col),
            GameAction::Left => (row, col.saturating_sub(1)),
            GameAction::Right => (row, (col + 1).min(last)),
            GameAction::Noop => (row, col),
        }
    }
}

/// `(row, col)`, row 0 at the top.
pub type Cell = (usize, usize);

/// Cars of one crossing row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lane {
    /// +1 slides right, -1 slides left.
    pub direction: i8,
    /// Cars move one cell every `period` frames.
    pub period: usize,
    pub cars: Vec<usize>,
}

/// Everything about a game that is drawn at random. Fixed for a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GameLayout {
    Collector {
        player: Cell,
        enemy: Cell,
        pellets: Vec<Cell>,
    },
    /// `lanes[i]` drives row `i + 1`.
    Crossing { lanes: Vec<Lane> },
}

pub const CROSSING_START: Cell = (GRID - 1, 4);
const PELLET_DENSITY: f64 = 0.3;

impl GameLayout {
    pub fn generate<R: Rng + ?Sized>(kind: GameKind, rng: &mut R) -> GameLayout {
        match kind {
            GameKind::Collector => {
                let player = (GRID - 1, 0);
                let enemy = (0, GRID - 1);
                let mut pellets = Vec::new();
                for r in 0..GRID {
                    for c in 0..GRID {
                        let cell = (r, c);
                        if rng.random_bool(PELLET_DENSITY) && cell != player && cell != enemy {
                            pellets.push(cell);
                        }
                    }
                }
                GameLayout::Collector {
                    player,
                    enemy,
                    pellets,
                }
            }
            GameKind::Crossing => {
                let lanes = (1..GRID - 1)
                    .map(|_| {
                        let count = rng.random_range(1..=2);
                        let mut cars = index::sample(rng, GRID, count).into_vec();
                        cars.sort_unstable();
                        Lane {
                            direction: if rng.random_bool(0.5) { 1 } else { -1 },
                            period: rng.random_range(1..=3),
                            cars,
                        }
                    })
                    .collect();
                GameLayout::Crossing { lanes }
            }
        }
    }

    /// A crossing with no cars.
    pub fn empty_crossing() -> GameLayout {
        let lanes = (1..GRID - 1)
            .map(|_| Lane {
                direction: 1,
                period: 1,
                cars: Vec::new(),
            })
            .collect();
        GameLayout::Crossing { lanes }
    }

    pub fn kind(&self) -> GameKind {
        match self {
            GameLayout::Collector { .. } => GameKind::Collector,
            GameLayout::Crossing { .. } => GameKind::Crossing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum State {
    Collector {
        player: Cell,
        enemy: Cell,
        pellets: Vec<bool>,
        remaining: usize,
    },
    Crossing {
        player: Cell,
        lanes: Vec<Lane>,
    },
}

/// One running game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    layout: GameLayout,
    state: State,
    score: u32,
    frame: usize,
    done: bool,
}

/// What one frame produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepResult {
    pub score_delta: u32,
    pub done: bool,
}

fn pellet_grid(pellets: &[Cell]) -> Vec<bool> {
    let mut grid = vec![false; GRID * GRID];
    for &(r, c) in pellets {
        grid[r * GRID + c] = true;
    }
    grid
}

impl Game {
    pub fn new(layout: &GameLayout) -> Game {
        let state = match layout {
            GameLayout::Collector {
                player,
                enemy,
                pellets,
            } => {
                let grid = pellet_grid(pellets);
                State::Collector {
                    player: *player,
                    enemy: *enemy,
                    remaining: grid.iter().filter(|p| **p).count(),
                    pellets: grid,
                }
            }
            GameLayout::Crossing { lanes } => State::Crossing {
                player: CROSSING_START,
                lanes: lanes.clone(),
            },
        };
        Game {
            layout: layout.clone(),
            state,
            score: 0,
            frame: 0,
            done: false,
        }
    }

    pub fn kind(&self) -> GameKind {
        self.layout.kind()
    }

    pub fn score(&self) -> u32 {
        self.score
    }

    pub fn frame(&self) -> usize {
        self.frame
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn player(&self) -> Cell {
        match &self.state {
            State::Collector { player, .. } | State::Crossing { player, .. } => *player,
        }
    }

    /// Advances one frame.
    ///
    /// # Panics
    /// If the game is already over.
    pub fn step(&mut self, action: GameAction) -> StepResult {
        assert!(!self.done, "step on a finished game");
        self.frame += 1;
        let mut delta = 0;
        match &mut self.state {
            State::Collector {
                player,
                enemy,
                pellets,
                remaining,
            } => {
                *player = action.apply(*player);
                if *player == *enemy {
                    self.done = true;
                } else {
                    let i = player.0 * GRID + player.1;
                    if pellets[i] {
                        pellets[i] = false;
                        *remaining -= 1;
                        delta = 10;
                    }
                    if delta > 0 && *remaining == 0 {
                        let GameLayout::Collector { pellets: fresh, .. } = &self.layout else {
                            unreachable!()
                        };
                        *pellets = pellet_grid(fresh);
                        pellets[i] = false;
                        *remaining = pellets.iter().filter(|p| **p).count();
                    }
                    *enemy = chase(*enemy, *player);
                    self.done = *enemy == *player;
                }
            }
            State::Crossing { player, lanes } => {
                *player = action.apply(*player);
                for lane in lanes.iter_mut() {
                    if self.frame.is_multiple_of(lane.period) {
                        for car in &mut lane.cars {
                            *car = (*car as isize + lane.direction as isize)
                                .rem_euclid(GRID as isize)
                                as usize;
                        }
                    }
                }
                if player.0 == 0 {
                    delta = 1;
                    *player = CROSSING_START;
                } else if (1..GRID - 1).contains(&player.0)
                    && lanes[player.0 - 1].cars.contains(&player.1)
                {
                    *player = CROSSING_START;
                }
            }
        }
        self.score += delta;
        StepResult {
            score_delta: delta,
            done: self.done,
        }
    }

    pub fn screen(&self) -> Screen {
        let mut s = Screen::blank(self.kind().channels(), GRID, GRID);
        self.draw(&mut s);
        s
    }

    /// Redraws `screen`, which must have this game's shape.
    pub fn draw(&self, screen: &mut Screen) {
        screen.clear();
        match &self.state {
            State::Collector {
                player,
                enemy,
                pellets,
                ..
            } => {
                screen.set(0, player.0, player.1, true);
                for (i, _) in pellets.iter().enumerate().filter(|(_, p)| **p) {
                    screen.set(1, i / GRID, i % GRID, true);
                }
                screen.set(2, enemy.0, enemy.1, true);
            }
            State::Crossing { player, lanes } => {
                screen.set(0, player.0, player.1, true);
                for (i, lane) in lanes.iter().enumerate() {
                    for &c in &lane.cars {
                        screen.set(1, i + 1, c, true);
                    }
                }
            }
        }
    }
}

/// One greedy step from `from` toward `to` along the axis with the larger
/// gap; horizontal on a tie.
fn chase(from: Cell, to: Cell) -> Cell {
    let dr = to.0 as isize - from.0 as isize;
    let dc = to.1 as isize - from.1 as isize;
    if dc != 0 && dc.abs() >= dr.abs() {
        (from.0, (from.1 as isize + dc.signum()) as usize)
    } else if dr != 0 {
        ((from.0 as isize + dr.signum()) as usize, from.1)
    } else {
        from
    }
}
