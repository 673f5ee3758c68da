use std::path::Path;
use std::process::Command;

use divergent_evo::evolution::{evolve_run, EvolutionConfig, Reproduction};
use divergent_evo::gridgames::{GameKind, GameTask};
use divergent_evo::harness::{
    read_run_csv, read_summary_csv, run_ablation, run_batch, run_density_sweep, run_experiment,
    run_games, write_trajectory, BatchSpec, OutcomeColumns, RANDOM_SEARCH_LABEL,
};
use divergent_evo::maze::{builtin_map, EpisodeParams, InputMode, MazeMap, MazeTask};
use divergent_evo::rng::SeedStreams;
use divergent_evo::stats::{t_test, RunSummary, Variance};
use divergent_evo::strategies::{CellMask, Strategy, SugarParams};

fn small(max_generations: usize) -> EvolutionConfig {
    EvolutionConfig {
        population_size: 20,
        max_generations,
        time_frame: 200,
        reproduction: Reproduction::FromElite,
        ..EvolutionConfig::maze()
    }
}

fn spec(max_generations: usize, runs: usize, out: Option<&Path>) -> BatchSpec {
    BatchSpec {
        config: small(max_generations),
        runs,
        seed_base: 100,
        out: out.map(Path::to_path_buf),
    }
}

fn medium() -> MazeTask {
    MazeTask::new(builtin_map("medium").unwrap(), EpisodeParams::default())
}

fn strategies() -> Vec<(String, Strategy)> {
    vec![
        ("fitness".into(), Strategy::Fitness),
        (
            "novelty".into(),
            Strategy::Novelty {
                k: 15,
                threshold: 3.0,
            },
        ),
        ("sugar".into(), Strategy::Sugar(SugarParams::default())),
    ]
}

#[test]
fn goal_next_to_start_is_solved_at_once() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("open.maze");
    std::fs::write(
        &path,
        "size 200 150\nstart 100 75\ngoal 100 69\ngoalradius 5\n",
    )
    .unwrap();
    let task = MazeTask::new(
        MazeMap::load(path.to_str().unwrap()).unwrap(),
        EpisodeParams::default(),
    );
    let batch = run_batch(&task, "fitness", &Strategy::Fitness, &spec(50, 1, None)).unwrap();
    assert_eq!(batch.summary().successes, 1);
    assert!(batch.generations[0].unwrap() <= 5);
}

#[test]
fn identical_strategies_identical_summaries() {
    let s = vec![
        ("a".to_string(), Strategy::Fitness),
        ("b".to_string(), Strategy::Fitness),
    ];
    let (batches, table) =
        run_experiment(&medium(), &s, &spec(6, 3, None), Variance::Pooled).unwrap();
    assert_eq!(batches[0].generations, batches[1].generations);
    assert_eq!(table.rows[0].1, table.rows[1].1);
}

#[test]
fn csv_rows_replay_and_summary_recomputes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let task = medium();
    let spec = spec(12, 3, Some(out));
    let (_, table) = run_experiment(&task, &strategies(), &spec, Variance::Pooled).unwrap();

    let lines = read_summary_csv(&out.join("summary.csv")).unwrap();
    let mut solved_by_label = Vec::new();
    for ((label, strategy), line) in strategies().iter().zip(&lines) {
        assert_eq!(&line.label, label);
        let mut outcomes = Vec::new();
        for seed in spec.seeds() {
            let csv = read_run_csv(&out.join(label).join(format!("run_{seed}.csv"))).unwrap();
            assert_eq!(
                (csv.seed, csv.strategy.as_str(), csv.environment.as_str()),
                (seed, label.as_str(), "medium")
            );
            outcomes.push(csv.generations_to_solve().map(|g| g as f64));

            // Every row comes back from a fresh run of the recorded seed.
            let config = EvolutionConfig {
                master_seed: seed,
                ..spec.config.clone()
            };
            let record = evolve_run(&config, &task, strategy).unwrap();
            assert_eq!(record.reports.len(), csv.rows.len());
            for (report, row) in record.reports.iter().zip(&csv.rows) {
                assert_eq!(row[0], report.generation.to_string());
                assert_eq!(row[1].parse::<f64>().unwrap(), report.best_fitness);
                assert_eq!(row[2].parse::<f64>().unwrap(), report.mean_fitness);
                assert_eq!(row[7..], report.champion.values()[..]);
            }
        }
        let again = RunSummary::from_outcomes(&outcomes);
        assert_eq!((line.runs, line.successes), (again.runs, again.successes));
        assert_eq!(line.mean, again.stats.map(|s| s.mean));
        assert_eq!(line.std, again.stats.map(|s| s.std));
        solved_by_label.push(outcomes.into_iter().flatten().collect::<Vec<f64>>());
    }
    for (i, line) in lines.iter().enumerate() {
        for (j, p) in line.p_values.iter().enumerate() {
            let expect = if i == j {
                None
            } else {
                t_test(&solved_by_label[i], &solved_by_label[j]).map(|t| t.p)
            };
            assert_eq!(*p, expect);
        }
    }
    assert_eq!(table.rows.len(), 3);
}

#[test]
fn density_extremes() {
    let task = medium();
    let dir = tempfile::tempdir().unwrap();
    let rows = run_density_sweep(
        &task,
        SugarParams::default(),
        &[1.0, 0.0],
        &spec(3, 2, Some(dir.path())),
    )
    .unwrap();
    assert_eq!(rows[0].0, 0.0);
    assert_eq!(rows[0].1.generations.len(), 2);
    let text = std::fs::read_to_string(dir.path().join("density_sweep.csv")).unwrap();
    assert!(
        text.starts_with("# divergent-evo v1\ndensity,runs,successes,mean_generations,std\n0,2,")
    );

    let sugar = SugarParams {
        density: 1.0,
        ..SugarParams::default()
    };
    let mask = CellMask::new(&task.map, 1.0).unwrap();
    for generation in 0..3 {
        let field = task
            .sugar_layout(&sugar, &mask, generation, &SeedStreams::new(4))
            .unwrap();
        assert_eq!(field.initial_count(), mask.free_cells());
    }
    assert!(run_density_sweep(&task, sugar, &[0.3], &spec(3, 1, None)).is_err());
}

#[test]
fn ablation_modes_run() {
    let modes = [InputMode::NoInput, InputMode::BinaryCounter { bits: 10 }];
    let (batches, table) = run_ablation(
        &medium(),
        SugarParams::default(),
        &modes,
        &spec(3, 1, None),
        Variance::Pooled,
    )
    .unwrap();
    assert_eq!(batches[0].label, "no_input");
    assert_eq!(table.rows[1].0, "binary_counter10");
    assert!(run_ablation(
        &medium(),
        SugarParams::default(),
        &[InputMode::BinaryCounter { bits: 3 }],
        &spec(3, 1, None),
        Variance::Pooled
    )
    .is_err());
}

#[test]
fn games_include_the_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let spec = BatchSpec {
        config: EvolutionConfig {
            population_size: 12,
            max_generations: 5,
            time_frame: 50,
            ..EvolutionConfig::grid_game()
        },
        runs: 2,
        seed_base: 0,
        out: Some(dir.path().to_path_buf()),
    };
    let s = vec![("pixel".to_string(), Strategy::Pixel)];
    let batches = run_games(&GameTask::new(GameKind::Crossing), &s, &spec).unwrap();
    assert_eq!(batches.len(), 2);
    assert_eq!(batches[1].label, RANDOM_SEARCH_LABEL);
    assert!(batches.iter().flat_map(|b| &b.scores).all(|s| *s >= 0.0));
    assert!(dir.path().join("random/run_1.csv").exists());
    assert_eq!(
        read_summary_csv(&dir.path().join("summary.csv"))
            .unwrap()
            .len(),
        2
    );
}

#[test]
fn trajectory_file_is_reproducible() {
    let task = medium();
    let record = evolve_run(&small(2), &task, &Strategy::Fitness).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
    let champion = &record.reports[1].champion;
    write_trajectory(&a, &task.map, champion, None).unwrap();
    write_trajectory(&b, &task.map, champion, None).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_divergent-evo"))
}

#[test]
fn cli_run_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    std::fs::write(
        &cfg,
        "population_size = 20\nmax_generations = 3\ntime_frame = 100\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = cli()
        .args([
            "run",
            "--runs",
            "2",
            "--strategy",
            "fitness,sugar",
            "--seed",
            "7",
        ])
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    assert!(out.join("sugar/run_8.csv").exists());
    assert_eq!(read_summary_csv(&out.join("summary.csv")).unwrap().len(), 2);
}

#[test]
fn cli_names_the_bad_map_line() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("broken.maze");
    std::fs::write(&map, "size 200 150\nstart 10 10\nwal 1 2 3 4\n").unwrap();
    let out = cli().arg("run").arg("--map").arg(&map).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("broken.maze:3"), "{err}");
}

#[test]
fn cli_rejects_unknown_profile() {
    let out = cli().args(["run", "--profile", "huge"]).output().unwrap();
    assert!(!out.status.success());
}
