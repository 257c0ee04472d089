use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::CliError;

pub const RUN_SCHEMA: &str = "selfmod-lab/run/v1";

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf, CliError> {
    fs::write(&path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path)
}

/// Writes a deterministic file with no timestamp.
pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf, CliError> {
    write(dir.join(name), text)
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })
}

/// Writes `<stem>.txt` (timestamp header first) and `<stem>.json`.
pub fn write_pair<T: Serialize>(
    dir: &Path,
    stem: &str,
    text: &str,
    record: &T,
) -> Result<PathBuf, CliError> {
    let json = serde_json::to_string_pretty(record).expect("report records serialize") + "\n";
    write(dir.join(format!("{stem}.json")), &json)?;
    write(
        dir.join(format!("{stem}.txt")),
        &format!("# generated-at-unix: {}\n{text}", unix_now()),
    )
}

#[derive(Debug, Serialize)]
pub struct RunRow {
    pub agent: String,
    pub performance: String,
    pub performance_f64: f64,
    pub modifications: usize,
    pub root_value: String,
    pub root_realistic: String,
    pub root_action: String,
}

#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub schema: &'static str,
    pub fingerprint: String,
    pub environment: String,
    pub utilities: Vec<String>,
    pub gamma: String,
    pub horizon: usize,
    pub truncation_bound: String,
    pub tie_break: String,
    pub rows: Vec<RunRow>,
    pub realistic_dominates: Option<bool>,
}

impl RunRecord {
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "environment: {}\nutilities: {}\ngamma: {}\nhorizon: {}\ntruncation bound: {}\ntie-break: {}\nfingerprint: {}\n\n",
            self.environment,
            self.utilities.join(","),
            self.gamma,
            self.horizon,
            self.truncation_bound,
            self.tie_break,
            self.fingerprint
        );
        let header = [
            "agent",
            "performance",
            "~",
            "modifications",
            "root value",
            "root Q^re",
            "root action",
        ];
        let mut rows: Vec<[String; 7]> = vec![header.map(String::from)];
        for r in &self.rows {
            rows.push([
                r.agent.clone(),
                r.performance.clone(),
                format!("{:.6}", r.performance_f64),
                r.modifications.to_string(),
                r.root_value.clone(),
                r.root_realistic.clone(),
                r.root_action.clone(),
            ]);
        }
        let widths: Vec<usize> = (0..7)
            .map(|i| rows.iter().map(|r| r[i].len()).max().unwrap_or(0))
            .collect();
        for r in &rows {
            let cells: Vec<String> = r
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        if let Some(d) = self.realistic_dominates {
            out.push_str(&format!("\nrealistic performance is maximal: {d}\n"));
        }
        out
    }
}
