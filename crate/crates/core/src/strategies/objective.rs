use crate::maze::{AgentTrace, MazeMap};

/// Negative Euclidean distance from the final position to the goal.
pub fn distance_fitness(trace: &AgentTrace, map: &MazeMap) -> f64 {
    -trace.final_position().distance(map.goal())
}

/// `1 − distance / diagonal`, in `[0, 1]`.
pub fn proximity(trace: &AgentTrace, map: &MazeMap) -> f64 {
    (1.0 - trace.final_position().distance(map.goal()) / map.diagonal()).clamp(0.0, 1.0)
}

/// Blend of goal proximity and the agent's share of the best sugar count
/// in its generation.
pub fn weighted_fitness(alpha: f64, proximity: f64, sugar: usize, best_sugar: usize) -> f64 {
    let share = sugar as f64 / best_sugar.max(1) as f64;
    alpha * proximity + (1.0 - alpha) * share
}

/// Weighted fitness for a whole population.
pub fn weighted_scores(
    alpha: f64,
    traces: &[AgentTrace],
    sugar: &[usize],
    map: &MazeMap,
) -> Vec<f64> {
    let best = sugar.iter().copied().max().unwrap_or(0);
    traces
        .iter()
        .zip(sugar)
        .map(|(t, &s)| weighted_fitness(alpha, proximity(t, map), s, best))
        .collect()
}
