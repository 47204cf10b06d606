//! On-disk layout of a run directory and the JSON artifacts inside it.
//!
//! ```text
//! <out>/<run-id>/
//!   run.json               metadata + session manifest, written by `run`
//!   transcripts/*.jsonl    one replayable transcript per session
//!   scores.json            per-session scores, written by `run` and `score`
//!   report.csv             aggregate table, written by `report`
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use cogbattery::harness::{SessionSummary, TranscriptLine};
use serde::{Deserialize, Serialize};

pub const RUN_FILE: &str = "run.json";
pub const SCORES_FILE: &str = "scores.json";
pub const REPORT_FILE: &str = "report.csv";
pub const TRANSCRIPTS_DIR: &str = "transcripts";

/// Written once at the start of a run so that later `score`/`report`/
/// `validate` invocations are pure functions of the directory contents.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub master_seed: u64,
    /// Digest of the plan file bytes that produced this run.
    pub plan_digest: String,
    pub agent: String,
    pub sessions: Vec<ManifestSession>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestSession {
    /// Path relative to the run directory.
    pub file: String,
    pub group: String,
    pub config_digest: String,
}

/// Scores for every completed session, in manifest order.
#[derive(Debug, Serialize, Deserialize)]
pub struct ScoresFile {
    pub run_id: String,
    pub master_seed: u64,
    pub plan_digest: String,
    pub sessions: Vec<SessionEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<FailureEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionEntry {
    pub file: String,
    pub group: String,
    pub task: String,
    pub agent: String,
    pub seed: u64,
    pub config_digest: String,
    pub turns: usize,
    pub score: serde_json::Value,
    pub metrics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailureEntry {
    pub file: String,
    pub error: String,
}

pub fn write_json(path: &Path, value: &impl Serialize) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value).context("serializing artifact")?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_manifest(run_dir: &Path) -> anyhow::Result<RunManifest> {
    let path = run_dir.join(RUN_FILE);
    let text = fs::read_to_string(&path)
        .with_context(|| format!("{} is not a run directory (missing {RUN_FILE})", run_dir.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_scores(run_dir: &Path) -> anyhow::Result<ScoresFile> {
    let path = run_dir.join(SCORES_FILE);
    let text =
        fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// All transcript files under the run directory, sorted by name.
pub fn transcript_files(run_dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let dir = run_dir.join(TRANSCRIPTS_DIR);
    let mut files = Vec::new();
    if !dir.is_dir() {
        return Ok(files);
    }
    for entry in fs::read_dir(&dir).with_context(|| format!("listing {}", dir.display()))? {
        let path = entry?.path();
        if path.extension().is_some_and(|ext| ext == "jsonl") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Path of a transcript relative to the run directory, for manifest entries.
pub fn relative_transcript(file_name: &str) -> String {
    format!("{TRANSCRIPTS_DIR}/{file_name}")
}

pub fn read_transcript_file(path: &Path) -> anyhow::Result<Vec<TranscriptLine>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    cogbattery::harness::read_transcript(text.as_bytes())
        .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

/// Build a scores entry from a replayed summary plus manifest bookkeeping.
pub fn entry_from_summary(
    file: String,
    group: String,
    seed: u64,
    config_digest: String,
    summary: SessionSummary,
) -> SessionEntry {
    SessionEntry {
        file,
        group,
        task: summary.task,
        agent: summary.agent,
        seed,
        config_digest,
        turns: summary.turns,
        score: summary.score,
        metrics: summary.metrics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scores_file_round_trips_and_hides_empty_failures() {
        let scores = ScoresFile {
            run_id: "demo".into(),
            master_seed: 9,
            plan_digest: "abc".into(),
            sessions: vec![],
            failures: vec![],
        };
        let text = serde_json::to_string(&scores).unwrap();
        assert!(!text.contains("failures"));
        let back: ScoresFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.run_id, "demo");
        assert_eq!(back.master_seed, 9);
    }

    #[test]
    fn transcript_listing_is_sorted_and_filters_extensions() {
        let dir = tempfile::tempdir().unwrap();
        let tdir = dir.path().join(TRANSCRIPTS_DIR);
        fs::create_dir_all(&tdir).unwrap();
        fs::write(tdir.join("002-swm.jsonl"), "").unwrap();
        fs::write(tdir.join("000-rapm.jsonl"), "").unwrap();
        fs::write(tdir.join("junk.txt"), "").unwrap();
        let files = transcript_files(dir.path()).unwrap();
        let names: Vec<_> =
            files.iter().map(|p| p.file_name().unwrap().to_str().unwrap()).collect();
        assert_eq!(names, ["000-rapm.jsonl", "002-swm.jsonl"]);
        assert!(transcript_files(&dir.path().join("missing")).unwrap().is_empty());
    }
}
