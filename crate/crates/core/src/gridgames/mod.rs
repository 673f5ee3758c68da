//! Two 10×10 channel-screen games, Pixel Novelty and grid Sugar Search.
//!
//! `collector` has channels player, pellet and enemy: pellets are worth 10
//! and the enemy chases the player greedily, ending the game on contact.
//! `crossing` has channels player and car: reaching the top row is worth 1
//! and a car sends the player back to the bottom.

mod game;
mod screen;
mod sugar;
mod task;

pub use game::{
    Cell, Game, GameAction, GameKind, GameLayout, Lane, StepResult, CROSSING_START, GRID,
};
pub use screen::{Screen, ScreenArchive};
pub use sugar::{Collection, GridSugarState, DEFAULT_RESPAWN_INTERVAL};
pub use task::{
    game_battery, play_episode, play_lockstep, random_search, BatteryResult, GameOutcome,
    GameRunState, GameTask, BATTERY_WINDOW,
};
