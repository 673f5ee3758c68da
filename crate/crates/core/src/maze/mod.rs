//! Continuous 2-D maze world: map files, rangefinder and radar sensors,
//! cardinal kinematics and episode execution.

mod episode;
mod geometry;
mod map;
mod sensors;
mod task;

pub use episode::{
    build_input, run_episode, run_lockstep, step_agent, Action, AgentTrace, Collision,
    EpisodeParams, InputMode,
};
pub use geometry::{Segment, Vec2};
pub use map::{builtin_map, MazeMap, BUILTIN_MAPS};
pub use sensors::{radar_quadrant, raycast, sense, Direction, SENSOR_COUNT};
pub use task::{MazeRunState, MazeTask};
