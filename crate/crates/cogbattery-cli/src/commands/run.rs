//! `run`: execute every session in a plan, writing one transcript per
//! session plus `scores.json`. Transcripts left complete by an earlier,
//! interrupted invocation are reused, so re-running resumes instead of
//! redoing finished work.

use std::fs;
use std::path::Path;
use std::sync::Mutex;

use anyhow::Context;
use cogbattery::harness::{run_session, sha256_hex, verify_transcript, TranscriptLine};

use crate::artifacts::{
    self, entry_from_summary, FailureEntry, ManifestSession, RunManifest, ScoresFile, SessionEntry,
};
use crate::plan::{self, AgentPlan, RunPlan, SessionPlan};

use super::{CommandResult, Failure};

enum Outcome {
    Ran(SessionEntry),
    Skipped(SessionEntry),
    Failed(String),
}

pub fn run(config: &Path, out: Option<&Path>, seed: Option<u64>, jobs: usize) -> CommandResult {
    let text = fs::read_to_string(config)
        .with_context(|| format!("reading {}", config.display()))
        .map_err(Failure::config)?;
    let plan_digest = sha256_hex(text.as_bytes());
    let plan = RunPlan::parse(&text).map_err(Failure::config)?;
    let master_seed = seed.unwrap_or(plan.master_seed);
    let out_dir = out.unwrap_or_else(|| plan.out_dir.as_path());
    let run_dir = out_dir.join(&plan.run_id);

    let sessions = plan::expand(&plan, master_seed).map_err(Failure::config)?;
    for session in &sessions {
        plan.agent.check_compatible(&session.spec).map_err(Failure::config)?;
    }

    fs::create_dir_all(run_dir.join(artifacts::TRANSCRIPTS_DIR))
        .with_context(|| format!("creating {}", run_dir.display()))
        .map_err(Failure::config)?;

    let manifest = RunManifest {
        run_id: plan.run_id.clone(),
        master_seed,
        plan_digest: plan_digest.clone(),
        agent: plan.agent.kind().to_string(),
        sessions: sessions
            .iter()
            .map(|s| ManifestSession {
                file: artifacts::relative_transcript(&s.file_name()),
                group: s.group.clone(),
                config_digest: s.spec.digest(),
            })
            .collect(),
    };
    artifacts::write_json(&run_dir.join(artifacts::RUN_FILE), &manifest)
        .map_err(Failure::config)?;

    let outcomes = execute_all(&sessions, &plan.agent, &run_dir, jobs.max(1));

    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for (session, outcome) in sessions.iter().zip(outcomes) {
        match outcome {
            Outcome::Ran(entry) => {
                println!("ok   {} group={} turns={}", session.stem, entry.group, entry.turns);
                entries.push(entry);
            }
            Outcome::Skipped(entry) => {
                println!("skip {} (already complete)", session.stem);
                entries.push(entry);
            }
            Outcome::Failed(error) => {
                eprintln!("fail {}: {error}", session.stem);
                failures.push(FailureEntry {
                    file: artifacts::relative_transcript(&session.file_name()),
                    error,
                });
            }
        }
    }

    let scores = ScoresFile {
        run_id: plan.run_id.clone(),
        master_seed,
        plan_digest,
        sessions: entries,
        failures,
    };
    let scores_path = run_dir.join(artifacts::SCORES_FILE);
    artifacts::write_json(&scores_path, &scores).map_err(Failure::config)?;
    if !scores.failures.is_empty() {
        eprintln!(
            "warning: {} session(s) failed; details in {}",
            scores.failures.len(),
            scores_path.display()
        );
    }
    println!("wrote {}", scores_path.display());
    Ok(())
}

/// Run sessions on a small worker pool. Results come back in plan order no
/// matter how the workers interleave.
fn execute_all(
    sessions: &[SessionPlan],
    agent: &AgentPlan,
    run_dir: &Path,
    jobs: usize,
) -> Vec<Outcome> {
    let next = Mutex::new(0usize);
    let results: Vec<Mutex<Option<Outcome>>> = sessions.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(sessions.len().max(1)) {
            scope.spawn(|| loop {
                let index = {
                    let mut guard = next.lock().unwrap();
                    let index = *guard;
                    *guard += 1;
                    index
                };
                if index >= sessions.len() {
                    break;
                }
                let outcome = execute_session(&sessions[index], agent, run_dir);
                *results[index].lock().unwrap() = Some(outcome);
            });
        }
    });
    results
        .into_iter()
        .map(|cell| cell.into_inner().unwrap().expect("every session handled"))
        .collect()
}

fn execute_session(session: &SessionPlan, agent: &AgentPlan, run_dir: &Path) -> Outcome {
    let file = artifacts::relative_transcript(&session.file_name());
    let path = run_dir.join(&file);
    if let Some(entry) = resume(session, &path, &file) {
        return Outcome::Skipped(entry);
    }
    match execute_fresh(session, agent, &path, &file) {
        Ok(entry) => Outcome::Ran(entry),
        Err(error) => Outcome::Failed(format!("{error:#}")),
    }
}

/// Reuse a transcript from an interrupted run when it replays cleanly and
/// records exactly the planned configuration; otherwise rerun the session.
fn resume(session: &SessionPlan, path: &Path, file: &str) -> Option<SessionEntry> {
    if !path.exists() {
        return None;
    }
    let lines = artifacts::read_transcript_file(path).ok()?;
    let planned = match lines.first()? {
        TranscriptLine::Header { task, .. } => task == &session.spec,
        _ => false,
    };
    if !planned {
        return None;
    }
    let summary = verify_transcript(&lines).ok()?;
    Some(entry_from_summary(
        file.to_string(),
        session.group.clone(),
        session.spec.seed(),
        session.spec.digest(),
        summary,
    ))
}

fn execute_fresh(
    session: &SessionPlan,
    agent: &AgentPlan,
    path: &Path,
    file: &str,
) -> anyhow::Result<SessionEntry> {
    let mut env = cogbattery::build_env(&session.spec).context("building task")?;
    let mut agent = agent.build(&session.spec)?;
    let mut buffer = Vec::new();
    let summary = run_session(env.as_mut(), agent.as_mut(), &session.spec, Some(&mut buffer))
        .context("running session")?;
    fs::write(path, &buffer).with_context(|| format!("writing {}", path.display()))?;
    Ok(entry_from_summary(
        file.to_string(),
        session.group.clone(),
        session.spec.seed(),
        session.spec.digest(),
        summary,
    ))
}
