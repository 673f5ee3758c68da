use rand::Rng;

use crate::error::ConfigError;
use crate::strategies::validate_density;

use super::game::Cell;

pub const DEFAULT_RESPAWN_INTERVAL: usize = 5;

/// One collection event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Collection {
    pub agent: u32,
    pub frame: u32,
    pub cell: Cell,
}

/// Sugar on a game grid, shared by all agents of a generation. Unlike the
/// maze field, new sugar keeps appearing every `interval` frames.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSugarState {
    rows: usize,
    cols: usize,
    interval: usize,
    sugar: Vec<bool>,
    initial: usize,
    respawned: usize,
    log: Vec<Collection>,
}

impl GridSugarState {
    /// Places sugar on each cell with probability `density`.
    pub fn new<R: Rng + ?Sized>(
        rows: usize,
        cols: usize,
        density: f64,
        interval: usize,
        rng: &mut R,
    ) -> Result<Self, ConfigError> {
        validate_density(density)?;
        if interval == 0 {
            return Err(ConfigError::invalid(
                "respawn_interval",
                "must be at least 1",
            ));
        }
        let sugar: Vec<bool> = (0..rows * cols).map(|_| rng.random_bool(density)).collect();
        Ok(GridSugarState {
            rows,
            cols,
            interval,
            initial: sugar.iter().filter(|s| **s).count(),
            sugar,
            respawned: 0,
            log: Vec::new(),
        })
    }

    pub fn has_sugar(&self, (r, c): Cell) -> bool {
        self.sugar[r * self.cols + c]
    }

    pub fn sugar_count(&self) -> usize {
        self.sugar.iter().filter(|s| **s).count()
    }

    pub fn initial_count(&self) -> usize {
        self.initial
    }

    pub fn respawned_count(&self) -> usize {
        self.respawned
    }

    pub fn collections(&self) -> &[Collection] {
        &self.log
    }

    /// End of `frame`: agents (in index order, `None` when out of play) pick
    /// up the sugar under them, then on every `interval`-th frame after the
    /// first one new sugar appears on a random empty cell. Returns what each
    /// agent collected.
    pub fn tick<R: Rng + ?Sized>(
        &mut self,
        frame: usize,
        positions: &[Option<Cell>],
        rng: &mut R,
    ) -> Vec<u32> {
        let mut rewards = vec![0; positions.len()];
        for (agent, pos) in positions.iter().enumerate() {
            let Some((r, c)) = *pos else { continue };
            let i = r * self.cols + c;
            if self.sugar[i] {
                self.sugar[i] = false;
                rewards[agent] = 1;
                self.log.push(Collection {
                    agent: agent as u32,
                    frame: frame as u32,
                    cell: (r, c),
                });
            }
        }
        if frame > 0 && frame.is_multiple_of(self.interval) {
            let empty = self.sugar.len() - self.sugar_count();
            if empty > 0 {
                let pick = rng.random_range(0..empty);
                let i = (0..self.sugar.len())
                    .filter(|&i| !self.sugar[i])
                    .nth(pick)
                    .expect("pick is below the empty count");
                self.sugar[i] = true;
                self.respawned += 1;
            }
        }
        rewards
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
}
