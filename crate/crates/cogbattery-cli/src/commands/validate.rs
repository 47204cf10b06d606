//! `validate`: replay every transcript bit-for-bit and cross-check
//! `scores.json` against the replayed results.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::anyhow;
use cogbattery::harness::{verify_transcript, SessionSummary};

use crate::artifacts::{self, read_scores};

use super::{CommandResult, Failure};

pub fn run(run_dir: &Path) -> CommandResult {
    let files = artifacts::transcript_files(run_dir).map_err(Failure::config)?;
    let mut summaries: BTreeMap<String, SessionSummary> = BTreeMap::new();
    for path in &files {
        let lines = artifacts::read_transcript_file(path).map_err(Failure::mismatch)?;
        let summary = verify_transcript(&lines)
            .map_err(|e| Failure::mismatch(anyhow!("{}: {e}", path.display())))?;
        let file_name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        println!("ok {file_name} ({}, {} turns)", summary.task, summary.turns);
        summaries.insert(artifacts::relative_transcript(file_name), summary);
    }

    let scores_path = run_dir.join(artifacts::SCORES_FILE);
    if scores_path.exists() {
        let scores = read_scores(run_dir).map_err(Failure::mismatch)?;
        for entry in &scores.sessions {
            let summary = summaries.get(&entry.file).ok_or_else(|| {
                Failure::mismatch(anyhow!("scores.json lists missing transcript {}", entry.file))
            })?;
            if entry.turns != summary.turns
                || entry.score != summary.score
                || entry.metrics != summary.metrics
            {
                return Err(Failure::mismatch(anyhow!(
                    "{}: scores.json disagrees with replayed session",
                    entry.file
                )));
            }
        }
        println!("scores.json matches {} replayed session(s)", scores.sessions.len());
    }

    println!("validated {} transcript(s)", files.len());
    Ok(())
}
