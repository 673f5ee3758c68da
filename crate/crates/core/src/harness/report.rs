//! CSV files written by the harness. Every file starts with the line
//! `# divergent-evo v1`; run files add a second comment line naming the
//! seed, strategy and environment.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::evolution::RunRecord;
use crate::gridgames::GameOutcome;
use crate::maze::AgentTrace;
use crate::stats::RunSummary;

pub const SCHEMA_LINE: &str = "# divergent-evo v1";

/// Champion columns contributed by an environment's episode outcome.
pub trait OutcomeColumns {
    fn headers() -> &'static [&'static str];
    fn values(&self) -> Vec<String>;
}

impl OutcomeColumns for AgentTrace {
    fn headers() -> &'static [&'static str] {
        &[
            "champion_x",
            "champion_y",
            "champion_steps",
            "champion_reached_goal",
        ]
    }

    fn values(&self) -> Vec<String> {
        let p = self.final_position();
        vec![
            p.x.to_string(),
            p.y.to_string(),
            self.steps_used.to_string(),
            self.reached_goal.to_string(),
        ]
    }
}

impl OutcomeColumns for GameOutcome {
    fn headers() -> &'static [&'static str] {
        &[
            "champion_score",
            "champion_frames",
            "champion_new_screens",
            "champion_sugar",
        ]
    }

    fn values(&self) -> Vec<String> {
        vec![
            self.score.to_string(),
            self.frames.to_string(),
            self.new_screens.to_string(),
            self.sugar.to_string(),
        ]
    }
}

const RUN_COLUMNS: [&str; 7] = [
    "generation",
    "best_fitness",
    "mean_fitness",
    "solved",
    "sugar_collected",
    "archive_size",
    "champion_index",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// Writes one generation per row.
pub fn write_run_csv<O: OutcomeColumns>(path: &Path, record: &RunRecord<O>) -> Result<()> {
    let mut file = create(path)?;
    writeln!(file, "{SCHEMA_LINE}")?;
    writeln!(
        file,
        "# seed={} strategy={} environment={}",
        record.seed, record.strategy, record.environment
    )?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(RUN_COLUMNS.iter().chain(O::headers()))?;
    for r in &record.reports {
        let mut row = vec![
            r.generation.to_string(),
            r.best_fitness.to_string(),
            r.mean_fitness.to_string(),
            r.solved.to_string(),
            opt(r.sugar_collected),
            opt(r.archive_size),
            r.champion_index.to_string(),
        ];
        row.extend(r.champion.values());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// A run file read back.
#[derive(Debug, Clone, PartialEq)]
pub struct RunCsv {
    pub seed: u64,
    pub strategy: String,
    pub environment: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl RunCsv {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    /// 1-based generation of the first solved row.
    pub fn generations_to_solve(&self) -> Option<usize> {
        let solved = self.column("solved")?;
        let gen = self.column("generation")?;
        self.rows
            .iter()
            .find(|r| r[solved] == "true")
            .and_then(|r| r[gen].parse::<usize>().ok())
            .map(|g| g + 1)
    }
}

fn bad(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        source_name: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn check_schema(path: &Path, first: Option<String>) -> Result<()> {
    match first {
        Some(l) if l.trim_end() == SCHEMA_LINE => Ok(()),
        _ => Err(bad(path, 1, format!("missing `{SCHEMA_LINE}` header"))),
    }
}

pub fn read_run_csv(path: &Path) -> Result<RunCsv> {
    let mut lines = BufReader::new(File::open(path)?).lines();
    check_schema(path, lines.next().transpose()?)?;
    let meta = lines.next().transpose()?.unwrap_or_default();
    let mut seed = None;
    let mut strategy = String::new();
    let mut environment = String::new();
    for field in meta.trim_start_matches('#').split_whitespace() {
        match field.split_once('=') {
            Some(("seed", v)) => seed = v.parse().ok(),
            Some(("strategy", v)) => strategy = v.to_string(),
            Some(("environment", v)) => environment = v.to_string(),
            _ => {}
        }
    }
    let seed = seed.ok_or_else(|| bad(path, 2, "missing run seed"))?;
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    let headers = r.headers()?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()))
        .collect::<std::result::Result<_, _>>()?;
    Ok(RunCsv {
        seed,
        strategy,
        environment,
        headers,
        rows,
    })
}

/// Per-label outcomes and pairwise p-values.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryTable {
    pub rows: Vec<(String, RunSummary)>,
    /// `p_values[i][j]`: test of row `i` against row `j`.
    pub p_values: Vec<Vec<Option<f64>>>,
}

pub fn write_summary_csv(path: &Path, table: &SummaryTable) -> Result<()> {
    let mut file = create(path)?;
    writeln!(file, "{SCHEMA_LINE}")?;
    let mut w = csv::Writer::from_writer(file);
    let mut header: Vec<String> = ["label", "runs", "successes", "n", "mean", "std"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(table.rows.iter().map(|(l, _)| format!("p_{l}")));
    w.write_record(&header)?;
    for (i, (label, s)) in table.rows.iter().enumerate() {
        let mut row = vec![
            label.clone(),
            s.runs.to_string(),
            s.successes.to_string(),
            s.stats.map_or(0, |st| st.n).to_string(),
            opt(s.stats.map(|st| st.mean)),
            opt(s.stats.map(|st| st.std)),
        ];
        row.extend(table.p_values[i].iter().map(|p| opt(*p)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// One `summary.csv` row read back.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryLine {
    pub label: String,
    pub runs: usize,
    pub successes: usize,
    pub n: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub p_values: Vec<Option<f64>>,
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryLine>> {
    let mut lines = BufReader::new(File::open(path)?).lines();
    check_schema(path, lines.next().transpose()?)?;
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    let parse_opt = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse()
                .map(Some)
                .map_err(|_| bad(path, 0, format!("`{s}` is not a number")))
        }
    };
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let int = |j: usize| -> Result<usize> {
            rec[j]
                .parse()
                .map_err(|_| bad(path, i + 3, format!("`{}` is not a count", &rec[j])))
        };
        out.push(SummaryLine {
            label: rec[0].to_string(),
            runs: int(1)?,
            successes: int(2)?,
            n: int(3)?,
            mean: parse_opt(&rec[4])?,
            std: parse_opt(&rec[5])?,
            p_values: (6..rec.len())
                .map(|j| parse_opt(&rec[j]))
                .collect::<Result<_>>()?,
        });
    }
    Ok(out)
}

/// Writes a density sweep: one row per density.
pub fn write_sweep_csv(path: &Path, rows: &[(f64, RunSummary)]) -> Result<()> {
    let mut file = create(path)?;
    writeln!(file, "{SCHEMA_LINE}")?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["density", "runs", "successes", "mean_generations", "std"])?;
    for (d, s) in rows {
        w.write_record([
            d.to_string(),
            s.runs.to_string(),
            s.successes.to_string(),
            opt(s.stats.map(|st| st.mean)),
            opt(s.stats.map(|st| st.std)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-generation champion scores of a game batch.
pub fn write_scores_csv(path: &Path, seed: u64, label: &str, scores: &[u32]) -> Result<()> {
    let mut file = create(path)?;
    writeln!(file, "{SCHEMA_LINE}")?;
    writeln!(file, "# seed={seed} strategy={label}")?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["generation", "champion_score"])?;
    for (g, s) in scores.iter().enumerate() {
        w.write_record([g.to_string(), s.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
