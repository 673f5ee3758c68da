use rand::Rng;

use crate::error::ConfigError;
use crate::maze::{MazeMap, Vec2};

/// State of one sugar lattice cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Empty,
    Sugar,
    Collected { agent: u32, step: u32 },
}

/// Which cells of a map's lattice a wall passes through. Computed once per
/// map and reused for every sugar layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CellMask {
    cell_size: f64,
    cols: usize,
    rows: usize,
    blocked: Vec<bool>,
}

impl CellMask {
    pub fn new(map: &MazeMap, cell_size: f64) -> Result<Self, ConfigError> {
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(ConfigError::invalid("cell_size", "must be positive"));
        }
        let cols = (map.width() / cell_size).ceil() as usize;
        let rows = (map.height() / cell_size).ceil() as usize;
        let mut blocked = vec![false; cols * rows];
        for wall in map.walls() {
            let (lo_x, hi_x) = (wall.a.x.min(wall.b.x), wall.a.x.max(wall.b.x));
            let (lo_y, hi_y) = (wall.a.y.min(wall.b.y), wall.a.y.max(wall.b.y));
            let c0 = ((lo_x / cell_size).floor().max(0.0) as usize).saturating_sub(1);
            let c1 = ((hi_x / cell_size).floor() as usize + 1).min(cols - 1);
            let r0 = ((lo_y / cell_size).floor().max(0.0) as usize).saturating_sub(1);
            let r1 = ((hi_y / cell_size).floor() as usize + 1).min(rows - 1);
            for r in r0..=r1 {
                for c in c0..=c1 {
                    let min = Vec2::new(c as f64 * cell_size, r as f64 * cell_size);
                    let max = Vec2::new(min.x + cell_size, min.y + cell_size);
                    if wall.touches_box(min, max) {
                        blocked[r * cols + c] = true;
                    }
                }
            }
        }
        Ok(CellMask {
            cell_size,
            cols,
            rows,
            blocked,
        })
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn is_blocked(&self, index: usize) -> bool {
        self.blocked[index]
    }

    pub fn free_cells(&self) -> usize {
        self.blocked.iter().filter(|b| !**b).count()
    }

    /// Lattice index of the cell containing `pos`.
    pub fn index_of(&self, pos: Vec2) -> usize {
        let c = ((pos.x / self.cell_size).floor().max(0.0) as usize).min(self.cols - 1);
        let r = ((pos.y / self.cell_size).floor().max(0.0) as usize).min(self.rows - 1);
        r * self.cols + c
    }
}

/// Sugar placed on a map lattice for one generation, with first-collector
/// records.
#[derive(Debug, Clone, PartialEq)]
pub struct SugarField {
    cols: usize,
    rows: usize,
    cell_size: f64,
    density: f64,
    cells: Vec<Cell>,
    initial: usize,
    collected: usize,
}

impl SugarField {
    /// Every wall-free cell independently receives sugar with probability
    /// `density`.
    pub fn sample<R: Rng + ?Sized>(
        mask: &CellMask,
        density: f64,
        rng: &mut R,
    ) -> Result<SugarField, ConfigError> {
        validate_density(density)?;
        let mut initial = 0;
        let cells = (0..mask.cols * mask.rows)
            .map(|i| {
                // Draw for every cell so layouts depend only on the lattice.
                let draw = rng.random::<f64>();
                if !mask.blocked[i] && draw < density {
                    initial += 1;
                    Cell::Sugar
                } else {
                    Cell::Empty
                }
            })
            .collect();
        Ok(SugarField {
            cols: mask.cols,
            rows: mask.rows,
            cell_size: mask.cell_size,
            density,
            cells,
            initial,
            collected: 0,
        })
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn initial_count(&self) -> usize {
        self.initial
    }

    pub fn collected_count(&self) -> usize {
        self.collected
    }

    fn index_of(&self, pos: Vec2) -> usize {
        let c = ((pos.x / self.cell_size).floor().max(0.0) as usize).min(self.cols - 1);
        let r = ((pos.y / self.cell_size).floor().max(0.0) as usize).min(self.rows - 1);
        r * self.cols + c
    }

    /// Claims the sugar in the cell containing `pos`, if there is any left.
    /// Callers invoke this in ascending agent order within a tick, which is
    /// what makes the lowest index win simultaneous arrivals.
    pub fn try_collect(&mut self, agent: usize, pos: Vec2, step: usize) -> bool {
        let i = self.index_of(pos);
        if self.cells[i] == Cell::Sugar {
            self.cells[i] = Cell::Collected {
                agent: agent as u32,
                step: step as u32,
            };
            self.collected += 1;
            true
        } else {
            false
        }
    }

    /// Sugars collected by `agent`.
    pub fn fitness_of(&self, agent: usize) -> usize {
        self.cells
            .iter()
            .filter(|c| matches!(c, Cell::Collected { agent: a, .. } if *a as usize == agent))
            .count()
    }

    /// Sugars collected by each of `population` agents, in one pass.
    pub fn fitness_all(&self, population: usize) -> Vec<usize> {
        let mut counts = vec![0; population];
        for c in &self.cells {
            if let Cell::Collected { agent, .. } = c {
                counts[*agent as usize] += 1;
            }
        }
        counts
    }
}

pub fn validate_density(density: f64) -> Result<(), ConfigError> {
    if (0.0..=1.0).contains(&density) {
        Ok(())
    } else {
        Err(ConfigError::invalid(
            "density",
            format!("{density} is outside [0, 1]"),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maze::{builtin_map, Segment};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_map() -> MazeMap {
        MazeMap::new(
            "s",
            10.0,
            10.0,
            Vec2::new(1.5, 1.5),
            Vec2::new(8.5, 8.5),
            1.0,
            vec![Segment::new(Vec2::new(5.0, 0.0), Vec2::new(5.0, 6.0))],
        )
        .unwrap()
    }

    #[test]
    fn mask_marks_wall_cells() {
        let mask = CellMask::new(&small_map(), 1.0).unwrap();
        assert_eq!((mask.cols(), mask.rows()), (10, 10));
        // x = 5 touches columns 4 and 5 on rows 0..=6 (row 6 at its top edge)
        assert_eq!(mask.free_cells(), 100 - 2 * 7);
        assert!(mask.is_blocked(mask.index_of(Vec2::new(4.5, 2.5))));
        assert!(!mask.is_blocked(mask.index_of(Vec2::new(4.5, 7.5))));
    }

    #[test]
    fn density_extremes() {
        let mask = CellMask::new(&small_map(), 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(
            SugarField::sample(&mask, 0.0, &mut rng)
                .unwrap()
                .initial_count(),
            0
        );
        let full = SugarField::sample(&mask, 1.0, &mut rng).unwrap();
        assert_eq!(full.initial_count(), mask.free_cells());
        for (i, c) in full.cells().iter().enumerate() {
            assert_eq!(*c == Cell::Sugar, !mask.is_blocked(i));
        }
        assert!(SugarField::sample(&mask, 1.5, &mut rng).is_err());
        assert!(SugarField::sample(&mask, -0.1, &mut rng).is_err());
    }

    #[test]
    fn density_concentration() {
        let map = builtin_map("medium").unwrap();
        let mask = CellMask::new(&map, 1.0).unwrap();
        let c = mask.free_cells() as f64;
        for seed in 0..20 {
            let f = SugarField::sample(&mask, 0.3, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let bound = 4.0 * (0.3 * 0.7 * c).sqrt();
            assert!((f.initial_count() as f64 - 0.3 * c).abs() <= bound);
        }
    }

    #[test]
    fn first_collector_wins() {
        let mask = CellMask::new(&small_map(), 1.0).unwrap();
        let mut f = SugarField::sample(&mask, 1.0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let p = Vec2::new(2.5, 8.5);
        assert!(f.try_collect(0, p, 3));
        assert!(!f.try_collect(1, p, 3));
        assert!(!f.try_collect(0, p, 4));
        assert!(f.try_collect(1, Vec2::new(3.5, 8.5), 4));
        assert!(!f.try_collect(1, Vec2::new(3.9, 8.1), 5));
        assert_eq!(f.fitness_of(0), 1);
        assert_eq!(f.fitness_of(1), 1);
        assert_eq!(f.fitness_of(2), 0);
        assert_eq!(f.fitness_all(3), vec![1, 1, 0]);
        assert_eq!(f.collected_count(), 2);
    }
}
