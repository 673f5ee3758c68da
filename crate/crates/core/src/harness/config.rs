use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{ConfigError, Error, Result};
use crate::evolution::{EvolutionConfig, Reproduction};
use crate::gridgames::{GameKind, GameTask, DEFAULT_RESPAWN_INTERVAL};
use crate::maze::{Collision, EpisodeParams, InputMode, MazeMap, MazeTask};
use crate::stats::Variance;
use crate::strategies::{Strategy, SugarLayout, SugarParams};

pub const DESK_PROFILE: &str = include_str!("../../profiles/desk.cfg");
pub const PAPER_PROFILE: &str = include_str!("../../profiles/paper.cfg");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Desk,
    Paper,
}

impl Profile {
    pub fn text(self) -> &'static str {
        match self {
            Profile::Desk => DESK_PROFILE,
            Profile::Paper => PAPER_PROFILE,
        }
    }
}

impl FromStr for Profile {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "desk" => Ok(Profile::Desk),
            "paper" => Ok(Profile::Paper),
            other => Err(ConfigError::invalid(
                "profile",
                format!("unknown profile `{other}`"),
            )),
        }
    }
}

/// One `key = value` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Splits config text into entries. Blank lines and `#` comments are
/// skipped; anything else must contain `=`.
pub fn parse_entries(text: &str, source_name: &str) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                source_name: source_name.to_string(),
                line: i + 1,
                message: format!("expected `key = value`, found `{line}`"),
            });
        };
        out.push(Entry {
            key: key.trim().to_string(),
            value: value.trim().to_string(),
            line: i + 1,
        });
    }
    Ok(out)
}

/// Every tunable of the harness, with the documented defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub maze: EvolutionConfig,
    pub games: EvolutionConfig,
    pub runs: usize,
    pub seed: u64,
    pub strategies: Vec<String>,
    pub map: String,
    pub game: GameKind,
    pub episode: EpisodeParams,
    pub sugar: SugarParams,
    pub alpha: f64,
    pub k: usize,
    pub novelty_threshold: f64,
    pub respawn_interval: usize,
    pub densities: Vec<f64>,
    pub modes: Vec<InputMode>,
    pub variance: Variance,
    pub out: PathBuf,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            maze: EvolutionConfig::maze(),
            games: EvolutionConfig::grid_game(),
            runs: 50,
            seed: 0,
            strategies: vec!["fitness".into(), "novelty".into(), "sugar".into()],
            map: "medium".into(),
            game: GameKind::Collector,
            episode: EpisodeParams::default(),
            sugar: SugarParams::default(),
            alpha: 0.5,
            k: crate::strategies::BehaviorArchive::DEFAULT_K,
            novelty_threshold: crate::strategies::BehaviorArchive::DEFAULT_THRESHOLD,
            respawn_interval: DEFAULT_RESPAWN_INTERVAL,
            densities: vec![0.05, 0.3, 1.0],
            modes: vec![
                InputMode::Sensors,
                InputMode::BinaryCounter {
                    bits: InputMode::DEFAULT_COUNTER_BITS,
                },
                InputMode::NoInput,
            ],
            variance: Variance::Pooled,
            out: PathBuf::from("results"),
        }
    }
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| ConfigError::invalid(key, format!("`{value}` is not a valid number")))
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

pub fn parse_input_mode(value: &str, bits: usize) -> Result<InputMode, ConfigError> {
    match value {
        "sensors" => Ok(InputMode::Sensors),
        "no_input" | "none" => Ok(InputMode::NoInput),
        "binary_counter" | "binary" => Ok(InputMode::BinaryCounter { bits }),
        other => Err(ConfigError::invalid(
            "input",
            format!("unknown input mode `{other}`"),
        )),
    }
}

impl Settings {
    pub fn from_profile(profile: Profile) -> Result<Settings> {
        let mut s = Settings::default();
        s.apply_text(profile.text(), &format!("<{profile:?} profile>"))?;
        Ok(s)
    }

    pub fn apply_text(&mut self, text: &str, source_name: &str) -> Result<()> {
        for e in parse_entries(text, source_name)? {
            self.set(&e.key, &e.value).map_err(|err| Error::Parse {
                source_name: source_name.to_string(),
                line: e.line,
                message: err.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        self.apply_text(&text, &path.display().to_string())
    }

    /// Sets one key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "population_size" => self.maze.population_size = number(key, value)?,
            "max_generations" => self.maze.max_generations = number(key, value)?,
            "time_frame" => self.maze.time_frame = number(key, value)?,
            "game_population_size" => self.games.population_size = number(key, value)?,
            "game_max_generations" => self.games.max_generations = number(key, value)?,
            "game_time_frame" => self.games.time_frame = number(key, value)?,
            "elite_fraction" => {
                let v = number(key, value)?;
                self.maze.elite_fraction = v;
                self.games.elite_fraction = v;
            }
            "mutation_sigma" => {
                let v = number(key, value)?;
                self.maze.mutation_sigma = v;
                self.games.mutation_sigma = v;
            }
            "hidden" => {
                let v = number(key, value)?;
                self.maze.hidden = v;
                self.games.hidden = v;
            }
            "reproduce" => {
                let r = match value {
                    "in_place" => Reproduction::InPlace,
                    "from_elite" => Reproduction::FromElite,
                    other => {
                        return Err(ConfigError::invalid(
                            key,
                            format!("unknown scheme `{other}`"),
                        ))
                    }
                };
                self.maze.reproduction = r;
                self.games.reproduction = r;
            }
            "runs" => {
                self.runs = number(key, value)?;
                if self.runs == 0 {
                    return Err(ConfigError::invalid(key, "must be at least 1"));
                }
            }
            "seed" => self.seed = number(key, value)?,
            "strategy" => {
                let names: Vec<String> = list(value).map(String::from).collect();
                for n in &names {
                    self.strategy(n)?;
                }
                if names.is_empty() {
                    return Err(ConfigError::invalid(key, "needs at least one strategy"));
                }
                self.strategies = names;
            }
            "map" => self.map = value.to_string(),
            "game" => self.game = value.parse()?,
            "input" => {
                let bits = match self.episode.input {
                    InputMode::BinaryCounter { bits } => bits,
                    _ => InputMode::DEFAULT_COUNTER_BITS,
                };
                self.episode.input = parse_input_mode(value, bits)?;
            }
            "counter_bits" => {
                let bits = number(key, value)?;
                if let InputMode::BinaryCounter { bits: b } = &mut self.episode.input {
                    *b = bits;
                }
                for m in &mut self.modes {
                    if let InputMode::BinaryCounter { bits: b } = m {
                        *b = bits;
                    }
                }
            }
            "collision" => {
                self.episode.collision = match value {
                    "block" => Collision::Block,
                    "freeze" => Collision::Freeze,
                    other => {
                        return Err(ConfigError::invalid(key, format!("unknown mode `{other}`")))
                    }
                }
            }
            "speed" => {
                self.episode.speed = number(key, value)?;
                if !(self.episode.speed > 0.0 && self.episode.speed.is_finite()) {
                    return Err(ConfigError::invalid(key, "must be positive"));
                }
            }
            "density" => self.sugar.density = number(key, value)?,
            "cell_size" => self.sugar.cell_size = number(key, value)?,
            "sugar_layout" => {
                self.sugar.layout = match value {
                    "per_generation" => SugarLayout::PerGeneration,
                    "fixed" => SugarLayout::Fixed,
                    other => {
                        return Err(ConfigError::invalid(
                            key,
                            format!("unknown layout `{other}`"),
                        ))
                    }
                }
            }
            "alpha" => self.alpha = number(key, value)?,
            "k" => self.k = number(key, value)?,
            "novelty_threshold" => self.novelty_threshold = number(key, value)?,
            "respawn_interval" => self.respawn_interval = number(key, value)?,
            "densities" => {
                let ds = list(value)
                    .map(|d| number::<f64>(key, d))
                    .collect::<Result<Vec<_>, _>>()?;
                if ds.len() < 2 {
                    return Err(ConfigError::invalid(
                        key,
                        "a sweep needs at least two densities",
                    ));
                }
                if ds.iter().any(|d| !(0.0..=1.0).contains(d)) {
                    return Err(ConfigError::invalid(key, "densities must lie in [0, 1]"));
                }
                let mut ds = ds;
                ds.sort_by(f64::total_cmp);
                self.densities = ds;
            }
            "modes" => {
                let bits = InputMode::DEFAULT_COUNTER_BITS;
                self.modes = list(value)
                    .map(|m| {
                        parse_input_mode(m, bits).map_err(|_| {
                            ConfigError::invalid(key, format!("unknown input mode `{m}`"))
                        })
                    })
                    .collect::<Result<_, _>>()?;
            }
            "variance" => {
                self.variance = match value {
                    "pooled" => Variance::Pooled,
                    "welch" => Variance::Welch,
                    other => {
                        return Err(ConfigError::invalid(
                            key,
                            format!("unknown variance `{other}`"),
                        ))
                    }
                }
            }
            "out" => self.out = PathBuf::from(value),
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// The strategy called `name`, parameterized from these settings.
    pub fn strategy(&self, name: &str) -> Result<Strategy, ConfigError> {
        let s = match name {
            "fitness" => Strategy::Fitness,
            "novelty" => Strategy::Novelty {
                k: self.k,
                threshold: self.novelty_threshold,
            },
            "sugar" => Strategy::Sugar(self.sugar),
            "weighted" => Strategy::Weighted {
                alpha: self.alpha,
                sugar: self.sugar,
            },
            "pixel" => Strategy::Pixel,
            other => {
                return Err(ConfigError::invalid(
                    "strategy",
                    format!("unknown strategy `{other}`"),
                ))
            }
        };
        Ok(s)
    }

    /// All configured strategies, labelled by name.
    pub fn strategy_list(&self) -> Result<Vec<(String, Strategy)>, ConfigError> {
        self.strategies
            .iter()
            .map(|n| {
                let s = self.strategy(n)?;
                s.validate()?;
                Ok((n.clone(), s))
            })
            .collect()
    }

    pub fn maze_task(&self) -> Result<MazeTask> {
        let map = MazeMap::load(&self.map)?;
        self.episode.input.validate(self.maze.time_frame)?;
        Ok(MazeTask::new(map, self.episode))
    }

    pub fn game_task(&self) -> GameTask {
        GameTask {
            kind: self.game,
            respawn_interval: self.respawn_interval,
        }
    }
}
