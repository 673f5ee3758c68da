use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use divergent_evo::evolution::{evolve_run, EvolutionConfig};
use divergent_evo::gridgames::{play_episode, GameKind};
use divergent_evo::harness::{
    run_ablation, run_density_sweep, run_experiment, run_games, write_trajectory, BatchSpec,
    Profile, Settings, SummaryTable,
};
use divergent_evo::rng::SeedStreams;
use divergent_evo::strategies::{CellMask, Strategy};

#[derive(Parser)]
#[command(
    name = "divergent-evo",
    version,
    about = "Sugar Search, Novelty Search and objective search on mazes and grid games"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// `key = value` file applied on top of the profile.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "desk")]
    profile: String,
    /// Seed of the first run; run i uses seed + i.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    runs: Option<usize>,
    /// Comma-separated strategy names.
    #[arg(long, global = true)]
    strategy: Option<String>,
    /// Map file or built-in map name.
    #[arg(long, global = true)]
    map: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Every configured strategy on the maze.
    Run,
    /// Sugar Search at several sugar densities.
    SweepDensity,
    /// Sugar Search with sensors, a step counter, or no input.
    Ablation,
    /// Grid-game batteries against a random-search baseline.
    Games {
        #[arg(long)]
        game: Option<String>,
        /// Print the first run's final champion playing, frame by frame.
        #[arg(long)]
        render_frames: bool,
        /// Write the first run's final champion genome to this file.
        #[arg(long)]
        dump_champion: Option<PathBuf>,
    },
    /// Draw one generation's champion path as `trajectory_<gen>.svg`.
    Render {
        /// Defaults to the run's last generation.
        #[arg(long)]
        generation: Option<usize>,
        #[arg(long)]
        dump_champion: Option<PathBuf>,
    },
}

fn settings(c: &Common) -> anyhow::Result<Settings> {
    let profile: Profile = c.profile.parse()?;
    let mut s = Settings::from_profile(profile)?;
    if let Some(path) = &c.config {
        s.apply_file(path)
            .with_context(|| format!("reading {}", path.display()))?;
    }
    if let Some(seed) = c.seed {
        s.seed = seed;
    }
    if let Some(runs) = c.runs {
        s.set("runs", &runs.to_string())?;
    }
    if let Some(strategy) = &c.strategy {
        s.set("strategy", strategy)?;
    }
    if let Some(map) = &c.map {
        s.map = map.clone();
    }
    if let Some(out) = &c.out {
        s.out = out.clone();
    }
    Ok(s)
}

fn batch_spec(s: &Settings, config: &EvolutionConfig) -> BatchSpec {
    BatchSpec {
        config: config.clone(),
        runs: s.runs,
        seed_base: s.seed,
        out: Some(s.out.clone()),
    }
}

fn print_table(table: &SummaryTable) {
    println!(
        "{:<20} {:>5} {:>9} {:>10} {:>10}",
        "label", "runs", "successes", "mean", "std"
    );
    for (label, s) in &table.rows {
        let (mean, std) = s.stats.map_or(("-".into(), "-".into()), |st| {
            (format!("{:.2}", st.mean), format!("{:.2}", st.std))
        });
        println!(
            "{label:<20} {:>5} {:>9} {mean:>10} {std:>10}",
            s.runs, s.successes
        );
    }
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let s = settings(&cli.common)?;
    match cli.command {
        Command::Run => {
            let task = s.maze_task()?;
            let spec = batch_spec(&s, &s.maze);
            let (_, table) = run_experiment(&task, &s.strategy_list()?, &spec, s.variance)?;
            print_table(&table);
        }
        Command::SweepDensity => {
            let task = s.maze_task()?;
            let spec = batch_spec(&s, &s.maze);
            let rows = run_density_sweep(&task, s.sugar, &s.densities, &spec)?;
            println!("{:<10} {:>9} {:>10}", "density", "successes", "mean");
            for (d, b) in rows {
                let sum = b.summary();
                let mean = sum.stats.map_or("-".into(), |st| format!("{:.2}", st.mean));
                println!("{d:<10} {:>9} {mean:>10}", sum.successes);
            }
        }
        Command::Ablation => {
            let task = s.maze_task()?;
            let spec = batch_spec(&s, &s.maze);
            let (_, table) = run_ablation(&task, s.sugar, &s.modes, &spec, s.variance)?;
            print_table(&table);
        }
        Command::Games {
            game,
            render_frames,
            dump_champion,
        } => {
            let mut s = s;
            if let Some(g) = game {
                s.game = g.parse::<GameKind>()?;
            }
            if cli.common.strategy.is_none() {
                s.set("strategy", "fitness,sugar,pixel")?;
            }
            let task = s.game_task();
            let strategies = s.strategy_list()?;
            let spec = batch_spec(&s, &s.games);
            for b in run_games(&task, &strategies, &spec)? {
                let mean = b.scores.iter().sum::<f64>() / b.scores.len() as f64;
                println!("{:<10} mean champion score {mean:.2}", b.label);
            }
            if render_frames || dump_champion.is_some() {
                let config = EvolutionConfig {
                    master_seed: s.seed,
                    ..s.games.clone()
                };
                let record = evolve_run(&config, &task, &strategies[0].1)?;
                let genome = record
                    .champion_genome
                    .context("the run evaluated no generation")?;
                if let Some(path) = dump_champion {
                    genome.write_to(std::fs::File::create(&path)?)?;
                }
                if render_frames {
                    let layout = task.layout(&SeedStreams::new(s.seed));
                    play_episode(&layout, &genome, config.time_frame, |g| {
                        println!("frame {} score {}", g.frame(), g.score());
                        print!("{}", g.screen().render(task.kind.glyphs()));
                    })?;
                }
            }
        }
        Command::Render {
            generation,
            dump_champion,
        } => {
            let task = s.maze_task()?;
            let strategy = s.strategy_list()?[0].1;
            let mut config = EvolutionConfig {
                master_seed: s.seed,
                ..s.maze.clone()
            };
            if let Some(g) = generation {
                config.max_generations = config.max_generations.min(g + 1);
            }
            let record = evolve_run(&config, &task, &strategy)?;
            let Some(report) = record.reports.last() else {
                bail!("the run evaluated no generation");
            };
            if let Some(g) = generation {
                if report.generation != g {
                    bail!("the run ended at generation {}", report.generation);
                }
            }
            let field = match strategy {
                Strategy::Sugar(sugar) | Strategy::Weighted { sugar, .. } => {
                    let mask = CellMask::new(&task.map, sugar.cell_size)?;
                    Some(task.sugar_layout(
                        &sugar,
                        &mask,
                        report.generation,
                        &SeedStreams::new(s.seed),
                    )?)
                }
                _ => None,
            };
            let path = s.out.join(format!("trajectory_{}.svg", report.generation));
            write_trajectory(&path, &task.map, &report.champion, field.as_ref())?;
            println!("wrote {}", path.display());
            if let (Some(path), Some(genome)) = (dump_champion, &record.champion_genome) {
                genome.write_to(std::fs::File::create(&path)?)?;
            }
        }
    }
    Ok(())
}
