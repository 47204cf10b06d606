//! `score`: recompute `scores.json` purely from the stored transcripts,
//! replay-verifying every one along the way. Any divergence between a
//! transcript and its regenerated session is a hard error.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::anyhow;
use cogbattery::harness::{verify_transcript, TranscriptLine};

use crate::artifacts::{self, entry_from_summary, read_manifest, ScoresFile};
use crate::plan;

use super::{CommandResult, Failure};

pub fn run(run_dir: &Path) -> CommandResult {
    let manifest = read_manifest(run_dir).map_err(Failure::config)?;
    let groups: BTreeMap<&str, &str> = manifest
        .sessions
        .iter()
        .map(|s| (s.file.as_str(), s.group.as_str()))
        .collect();

    let mut entries = Vec::new();
    for path in &artifacts::transcript_files(run_dir).map_err(Failure::config)? {
        let file_name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        let file = artifacts::relative_transcript(file_name);
        let lines = artifacts::read_transcript_file(path).map_err(Failure::mismatch)?;
        let spec = match lines.first() {
            Some(TranscriptLine::Header { task, .. }) => task.clone(),
            _ => {
                return Err(Failure::mismatch(anyhow!("{}: missing header line", path.display())))
            }
        };
        let summary = verify_transcript(&lines)
            .map_err(|e| Failure::mismatch(anyhow!("{}: {e}", path.display())))?;
        let group = groups
            .get(file.as_str())
            .map(|g| g.to_string())
            .unwrap_or_else(|| plan::default_group(&spec));
        entries.push(entry_from_summary(file, group, spec.seed(), spec.digest(), summary));
    }

    let scores = ScoresFile {
        run_id: manifest.run_id,
        master_seed: manifest.master_seed,
        plan_digest: manifest.plan_digest,
        sessions: entries,
        failures: Vec::new(),
    };
    let path = run_dir.join(artifacts::SCORES_FILE);
    artifacts::write_json(&path, &scores).map_err(Failure::config)?;
    println!("scored {} transcript(s), wrote {}", scores.sessions.len(), path.display());
    Ok(())
}
