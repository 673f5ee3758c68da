//! Fitness assignment: objective distance, Novelty Search, Sugar Search,
//! the weighted distance/sugar blend and Pixel Novelty.

mod novelty;
mod objective;
mod sugar;

pub use novelty::{novelty_scores, BehaviorArchive};
pub use objective::{distance_fitness, proximity, weighted_fitness, weighted_scores};
pub use sugar::{validate_density, Cell, CellMask, SugarField};

use crate::error::ConfigError;

/// Whether sugar is re-drawn every generation or drawn once per run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SugarLayout {
    #[default]
    PerGeneration,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SugarParams {
    pub density: f64,
    pub cell_size: f64,
    pub layout: SugarLayout,
}

impl Default for SugarParams {
    fn default() -> Self {
        SugarParams {
            density: 0.3,
            cell_size: 1.0,
            layout: SugarLayout::PerGeneration,
        }
    }
}

/// A fitness-assignment strategy and its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    /// Objective: distance to the maze goal, or game score.
    Fitness,
    Novelty {
        k: usize,
        threshold: f64,
    },
    Sugar(SugarParams),
    Weighted {
        alpha: f64,
        sugar: SugarParams,
    },
    /// Grid games only.
    Pixel,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Fitness => "fitness",
            Strategy::Novelty { .. } => "novelty",
            Strategy::Sugar(_) => "sugar",
            Strategy::Weighted { .. } => "weighted",
            Strategy::Pixel => "pixel",
        }
    }

    /// Sugar and pixel rewards depend on who got there first, so their
    /// episodes must share one clock.
    pub fn needs_lockstep(&self) -> bool {
        matches!(
            self,
            Strategy::Sugar(_) | Strategy::Weighted { .. } | Strategy::Pixel
        )
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let check_sugar = |s: &SugarParams| -> Result<(), ConfigError> {
            validate_density(s.density)?;
            if s.cell_size.is_nan() || s.cell_size <= 0.0 {
                return Err(ConfigError::invalid("cell_size", "must be positive"));
            }
            Ok(())
        };
        match self {
            Strategy::Fitness | Strategy::Pixel => Ok(()),
            Strategy::Novelty { k, threshold } => {
                if *k == 0 {
                    return Err(ConfigError::invalid("k", "must be at least 1"));
                }
                if !(threshold.is_finite() && *threshold >= 0.0) {
                    return Err(ConfigError::invalid("novelty_threshold", "must be >= 0"));
                }
                Ok(())
            }
            Strategy::Sugar(s) => check_sugar(s),
            Strategy::Weighted { alpha, sugar } => {
                if !(0.0..=1.0).contains(alpha) {
                    return Err(ConfigError::invalid(
                        "alpha",
                        format!("{alpha} is outside [0, 1]"),
                    ));
                }
                check_sugar(sugar)
            }
        }
    }
}
