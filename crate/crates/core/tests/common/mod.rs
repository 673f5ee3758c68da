//! Slow reference implementations shared by the property and acceptance
//! suites.
#![allow(dead_code)]

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use divergent_evo::gridgames::{play_episode, GameLayout};
use divergent_evo::maze::{
    build_input, step_agent, Action, AgentTrace, Collision, Direction, EpisodeParams, MazeMap,
    Segment, Vec2,
};
use divergent_evo::rnn::{argmax, Genome, HiddenState};
use divergent_evo::strategies::CellMask;

pub fn random_map(rng: &mut ChaCha8Rng) -> MazeMap {
    loop {
        if let Some(map) = try_random_map(rng) {
            return map;
        }
    }
}

pub fn try_random_map(rng: &mut ChaCha8Rng) -> Option<MazeMap> {
    let mut walls = Vec::new();
    for _ in 0..rng.random_range(1..6) {
        let a = Vec2::new(rng.random_range(5.0..195.0), rng.random_range(5.0..145.0));
        let len = rng.random_range(10.0..80.0);
        let b = match rng.random_range(0..3) {
            0 => Vec2::new((a.x + len).min(199.0), a.y),
            1 => Vec2::new(a.x, (a.y + len).min(149.0)),
            _ => {
                let angle = rng.random_range(30f64..60.0).to_radians();
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let b = a + Vec2::new(angle.cos(), sign * angle.sin()) * len;
                Vec2::new(b.x.clamp(1.0, 199.0), b.y.clamp(1.0, 149.0))
            }
        };
        walls.push(Segment::new(a, b));
    }
    MazeMap::new(
        "random",
        200.0,
        150.0,
        Vec2::new(1.0, 1.0),
        Vec2::new(199.0, 149.0),
        0.5,
        walls,
    )
    .ok()
}

pub fn blocked_by_wall(map: &MazeMap, p: Vec2) -> bool {
    map.walls().iter().any(|w| w.distance_to(p) < 0.005)
}

/// Marches from `origin` in 0.01 steps until it meets a wall or the border.
pub fn ray_march(map: &MazeMap, origin: Vec2, dir: Direction) -> f64 {
    let u = dir.unit();
    let mut t = 0.0;
    loop {
        let p = origin + u * t;
        if p.x <= 0.0
            || p.y <= 0.0
            || p.x >= map.width()
            || p.y >= map.height()
            || blocked_by_wall(map, p)
        {
            return t;
        }
        t += 0.01;
    }
}

pub fn brute_novelty(behaviors: &[Vec2], archive: &[Vec2], k: usize) -> Vec<f64> {
    (0..behaviors.len())
        .map(|i| {
            let mut d: Vec<f64> = behaviors
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, b)| b.distance(behaviors[i]))
                .chain(archive.iter().map(|a| a.distance(behaviors[i])))
                .collect();
            d.sort_by(f64::total_cmp);
            d.truncate(k);
            if d.is_empty() {
                0.0
            } else {
                d.iter().sum::<f64>() / d.len() as f64
            }
        })
        .collect()
}

/// Plain re-simulation with `Genome::forward`, without any of the episode
/// runner's shortcuts.
pub fn naive_episode(map: &MazeMap, genome: &Genome, params: &EpisodeParams) -> AgentTrace {
    let mut pos = map.start();
    let mut hidden = HiddenState::zeros(genome.dims());
    let mut trace = AgentTrace {
        positions: vec![pos],
        reached_goal: false,
        steps_used: 0,
    };
    for step in 0..params.time_frame {
        let input = build_input(params.input, map, pos, step);
        let (out, next) = genome.forward(&hidden, &input).unwrap();
        hidden = next;
        let (p, blocked) = step_agent(map, pos, Action::from_index(argmax(&out)), params.speed);
        pos = p;
        trace.positions.push(pos);
        trace.steps_used += 1;
        if map.in_goal(pos) {
            trace.reached_goal = true;
            break;
        }
        if blocked && params.collision == Collision::Freeze {
            break;
        }
    }
    trace
}

/// Who should own each sugar cell: the first (step, agent) whose position
/// after a move falls in it.
pub fn first_visitors(mask: &CellMask, traces: &[AgentTrace]) -> Vec<Option<(usize, usize)>> {
    let mut owner: Vec<Option<(usize, usize)>> = vec![None; mask.cols() * mask.rows()];
    for (agent, t) in traces.iter().enumerate() {
        for (step, p) in t.positions.iter().skip(1).enumerate() {
            let cell = &mut owner[mask.index_of(*p)];
            if cell.is_none_or(|(s, a)| (step, agent) < (s, a)) {
                *cell = Some((step, agent));
            }
        }
    }
    owner
}

/// A raycast case the ray marcher can resolve: no wall end near the ray
/// line and no wall through the origin.
pub fn clean_ray(map: &MazeMap, origin: Vec2, dir: Direction) -> bool {
    let u = dir.unit();
    !map.walls().iter().any(|w| {
        [w.a, w.b].iter().any(|e| {
            let rel = *e - origin;
            rel.dot(u) > -0.02 && rel.cross(u).abs() < 0.02
        }) || w.distance_to(origin) < 0.02
    })
}

/// Random raycast cases, checked against the marcher; returns the number
/// of disagreements beyond one march step.
pub fn raycast_disagreements(cases: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    let mut bad = 0;
    while done < cases {
        let map = random_map(&mut rng);
        let origin = Vec2::new(rng.random_range(1.0..199.0), rng.random_range(1.0..149.0));
        let dir = Direction::ALL[rng.random_range(0..4)];
        if !clean_ray(&map, origin, dir) {
            continue;
        }
        let exact = divergent_evo::maze::raycast(&map, origin, dir);
        if (exact - ray_march(&map, origin, dir)).abs() > 0.011 {
            bad += 1;
        }
        done += 1;
    }
    bad
}

/// Random populations and archives on a coarse lattice, so that ties are
/// common; returns how many disagree with the brute-force scores.
pub fn novelty_disagreements(populations: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng| {
        Vec2::new(
            rng.random_range(0..20) as f64 * 2.5,
            rng.random_range(0..15) as f64 * 2.5,
        )
    };
    let mut bad = 0;
    for _ in 0..populations {
        let n = rng.random_range(1..40);
        let m = rng.random_range(0..30);
        let k = rng.random_range(1..20);
        let behaviors: Vec<Vec2> = (0..n).map(|_| point(&mut rng)).collect();
        let archive: Vec<Vec2> = (0..m).map(|_| point(&mut rng)).collect();
        if divergent_evo::strategies::novelty_scores(&behaviors, &archive, k)
            != brute_novelty(&behaviors, &archive, k)
        {
            bad += 1;
        }
    }
    bad
}

/// Pixel-novelty fitness recomputed from solo replays: frame by frame, in
/// agent order, a screen pays only the first time anyone shows it.
pub fn pixel_oracle(layout: &GameLayout, genomes: &[Genome], time_frame: usize) -> Vec<f64> {
    let logs: Vec<Vec<Vec<u64>>> = genomes
        .iter()
        .map(|g| {
            let mut screens = Vec::new();
            play_episode(layout, g, time_frame, |game| {
                screens.push(game.screen().encode())
            })
            .unwrap();
            screens.remove(0);
            screens
        })
        .collect();
    let mut seen = HashSet::new();
    let mut paid = vec![0.0; genomes.len()];
    for frame in 0..time_frame {
        for (agent, log) in logs.iter().enumerate() {
            if let Some(screen) = log.get(frame) {
                if seen.insert(screen.clone()) {
                    paid[agent] += 1.0;
                }
            }
        }
    }
    paid
}

/// Replays generation logs of a Sugar Search run and counts sugars that
/// were created, lost, or credited to someone other than the first visitor.
pub fn sugar_log_violations(generations: usize, seed: u64) -> usize {
    use divergent_evo::evolution::{initial_population, Environment};
    use divergent_evo::maze::{builtin_map, MazeTask};
    use divergent_evo::rng::SeedStreams;
    use divergent_evo::rnn::NetworkDims;
    use divergent_evo::strategies::{Cell, Strategy, SugarParams};

    let task = MazeTask::new(builtin_map("medium").unwrap(), EpisodeParams::default());
    let sugar = SugarParams {
        density: 0.6,
        ..SugarParams::default()
    };
    let strategy = Strategy::Sugar(sugar);
    let streams = SeedStreams::new(seed);
    let mask = CellMask::new(&task.map, 1.0).unwrap();
    let mut pop = initial_population(NetworkDims::new(8, 32, 4).unwrap(), 60, &streams);
    let mut state = task.start_run(&strategy, &streams).unwrap();
    let mut bad = 0;
    for generation in 0..generations {
        let eval = task
            .evaluate(&pop, &strategy, &mut state, generation, 600, &streams)
            .unwrap();
        let initial = task
            .sugar_layout(&sugar, &mask, generation, &streams)
            .unwrap();
        let mut field = initial.clone();
        let traces = task
            .sugar_episodes(&pop, &EpisodeParams::default(), &mut field)
            .unwrap();
        bad += usize::from(traces != eval.outcomes);
        let total: f64 = eval.fitness.iter().sum();
        bad += usize::from(total as usize != field.collected_count());
        bad += usize::from(field.collected_count() > initial.initial_count());
        let owners = first_visitors(&mask, &traces);
        for (i, (before, after)) in initial.cells().iter().zip(field.cells()).enumerate() {
            let ok = match (before, after) {
                (Cell::Sugar, Cell::Collected { agent, step }) => {
                    owners[i] == Some((*step as usize, *agent as usize))
                }
                (Cell::Sugar, Cell::Sugar) => owners[i].is_none(),
                (Cell::Empty, Cell::Empty) => true,
                _ => false,
            };
            bad += usize::from(!ok);
        }
        pop = pop
            .iter()
            .map(|g| g.mutate(0.1, &mut ChaCha8Rng::seed_from_u64(generation as u64)))
            .collect();
    }
    bad
}

/// Plays Pixel Novelty generations on both games and counts generations
/// whose rewards leak across generations or disagree with the oracle.
pub fn pixel_log_violations(generations: usize, seed: u64) -> usize {
    use divergent_evo::evolution::{initial_population, Environment};
    use divergent_evo::gridgames::{GameKind, GameTask};
    use divergent_evo::rng::SeedStreams;
    use divergent_evo::rnn::NetworkDims;
    use divergent_evo::strategies::Strategy;

    let mut bad = 0;
    for kind in [GameKind::Collector, GameKind::Crossing] {
        let task = GameTask::new(kind);
        let streams = SeedStreams::new(seed);
        let dims = NetworkDims::new(kind.input_width(), 16, 5).unwrap();
        let mut pop = initial_population(dims, 12, &streams);
        let mut state = task.start_run(&Strategy::Pixel, &streams).unwrap();
        let layout = state.layout.clone();
        for generation in 0..generations {
            let eval = task
                .evaluate(&pop, &Strategy::Pixel, &mut state, generation, 80, &streams)
                .unwrap();
            // Everything in the archive was paid for this generation, so
            // nothing survived from the previous one.
            let paid: f64 = eval.fitness.iter().sum();
            bad += usize::from(paid as usize != state.archive.len());
            bad += usize::from(eval.archive_size != Some(state.archive.len()));
            bad += usize::from(eval.fitness != pixel_oracle(&layout, &pop, 80));
            pop = pop
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    g.mutate(
                        0.5,
                        &mut ChaCha8Rng::seed_from_u64((generation * 100 + i) as u64),
                    )
                })
                .collect();
        }
    }
    bad
}
