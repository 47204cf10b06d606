//! Model-agnostic session harness: task environments expose prompts and
//! consume parsed answers, agents produce raw replies, and every exchange is
//! recorded as a line-oriented JSON transcript that can be replayed and
//! verified bit-for-bit.

pub mod agents;
pub mod parse;
pub mod prompts;
pub mod remote;

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::rapm::session::{RapmFormat, RapmSession};
use crate::rapm::{generate_matrix, RapmError};
use crate::swm::session::SwmSession;
use crate::swm::{SwmConfig, SwmTrial};
use crate::task::{Difficulty, Modality};
use crate::wcst::session::WcstSession;
use crate::wcst::{Ambiguity, WcstConfig, WcstTrial};
use agents::Agent;
use parse::{parse_answer, AnswerKind, ParsedAnswer};

/// Version stamp written into every transcript header.
pub const SCHEMA_VERSION: u32 = 1;

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        use std::fmt::Write as _;
        let _ = write!(out, "{byte:02x}");
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

impl Message {
    pub fn new(role: Role, content: impl Into<String>) -> Self {
        Self { role, content: content.into() }
    }
}

/// One turn's worth of stimulus. `svg` carries the rendered scene for image
/// modalities; transports that cannot attach images inline it after the text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnPrompt {
    pub text: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub svg: Option<String>,
}

impl TurnPrompt {
    pub fn text_only(text: impl Into<String>) -> Self {
        Self { text: text.into(), svg: None }
    }

    /// Flattened form handed to chat agents.
    pub fn wire_content(&self) -> String {
        match &self.svg {
            Some(svg) => format!("{}\n\n{svg}", self.text),
            None => self.text.clone(),
        }
    }
}

/// An interactive task instance: deterministic given its spec, stepped one
/// answer at a time until done, and hashable for replay verification.
pub trait TaskEnv {
    fn answer_kind(&self) -> AnswerKind;
    fn system_prompt(&self) -> String;
    fn next_prompt(&self) -> TurnPrompt;
    fn apply_answer(&mut self, answer: &ParsedAnswer);
    fn is_done(&self) -> bool;
    /// Turns consumed so far (1-based after the first answer).
    fn turn_index(&self) -> usize;
    fn score(&self) -> serde_json::Value;
    fn metrics(&self) -> BTreeMap<String, f64>;
    /// Digest of the mutable state; equal digests mean equal future behavior.
    fn state_digest(&self) -> String;
}

/// Fully describes one task instance. Serialized into transcript headers so a
/// recording is self-contained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case")]
pub enum TaskSpec {
    Rapm {
        seed: u64,
        format: RapmFormat,
        hint: bool,
        cot: bool,
        think_budget: u32,
    },
    Swm {
        seed: u64,
        difficulty: Difficulty,
        modality: Modality,
        notes: bool,
        cot: bool,
        think_budget: u32,
    },
    Wcst {
        seed: u64,
        difficulty: Difficulty,
        modality: Modality,
        ambiguity: Ambiguity,
        notes: bool,
        cot: bool,
        think_budget: u32,
    },
}

impl TaskSpec {
    pub fn seed(&self) -> u64 {
        match self {
            TaskSpec::Rapm { seed, .. } | TaskSpec::Swm { seed, .. } | TaskSpec::Wcst { seed, .. } => {
                *seed
            }
        }
    }

    pub fn task_name(&self) -> &'static str {
        match self {
            TaskSpec::Rapm { .. } => "rapm",
            TaskSpec::Swm { .. } => "swm",
            TaskSpec::Wcst { .. } => "wcst",
        }
    }

    /// Stable digest of the full configuration, embedded in transcripts.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("spec serializes");
        sha256_hex(json.as_bytes())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BuildError {
    #[error("matrix generation failed: {0}")]
    Matrix(#[from] RapmError),
}

pub fn build_env(spec: &TaskSpec) -> Result<Box<dyn TaskEnv>, BuildError> {
    match *spec {
        TaskSpec::Rapm { seed, format, hint, cot, think_budget } => {
            let item = generate_matrix(seed)?;
            Ok(Box::new(RapmSession::new(item, format, hint, cot, think_budget)))
        }
        TaskSpec::Swm { seed, difficulty, modality, notes, cot, think_budget } => {
            let trial = SwmTrial::new(SwmConfig::new(difficulty, modality), seed);
            Ok(Box::new(SwmSession::new(trial, notes, cot, think_budget)))
        }
        TaskSpec::Wcst { seed, difficulty, modality, ambiguity, notes, cot, think_budget } => {
            let config = WcstConfig::new(difficulty, modality, ambiguity);
            let trial = WcstTrial::new(config, seed);
            Ok(Box::new(WcstSession::new(trial, notes, cot, think_budget)))
        }
    }
}

/// One line of a recorded session. Transcripts are JSON Lines: a header, one
/// line per turn, and a final score line.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TranscriptLine {
    Header {
        schema_version: u32,
        task: TaskSpec,
        agent: String,
        config_digest: String,
    },
    Turn {
        turn: usize,
        prompt: TurnPrompt,
        raw_answer: String,
        parsed: ParsedAnswer,
        state_digest: String,
    },
    Score {
        score: serde_json::Value,
        metrics: BTreeMap<String, f64>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, Serialize)]
pub struct SessionSummary {
    pub task: String,
    pub agent: String,
    pub turns: usize,
    pub score: serde_json::Value,
    pub metrics: BTreeMap<String, f64>,
}

fn write_line(sink: &mut Option<&mut dyn Write>, line: &TranscriptLine) -> Result<(), HarnessError> {
    if let Some(out) = sink.as_deref_mut() {
        serde_json::to_writer(&mut *out, line)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Drives one environment to completion against an agent, optionally
/// recording the transcript. Agent failures are treated as empty (invalid)
/// replies so a session always terminates with a score.
pub fn run_session(
    env: &mut dyn TaskEnv,
    agent: &mut dyn Agent,
    spec: &TaskSpec,
    mut sink: Option<&mut dyn Write>,
) -> Result<SessionSummary, HarnessError> {
    write_line(
        &mut sink,
        &TranscriptLine::Header {
            schema_version: SCHEMA_VERSION,
            task: spec.clone(),
            agent: agent.name().to_string(),
            config_digest: spec.digest(),
        },
    )?;

    let mut messages = vec![Message::new(Role::System, env.system_prompt())];
    while !env.is_done() {
        let prompt = env.next_prompt();
        messages.push(Message::new(Role::User, prompt.wire_content()));
        let raw = agent.reply(&messages).unwrap_or_default();
        messages.push(Message::new(Role::Assistant, raw.clone()));
        let parsed = parse_answer(&raw, env.answer_kind());
        env.apply_answer(&parsed);
        write_line(
            &mut sink,
            &TranscriptLine::Turn {
                turn: env.turn_index(),
                prompt,
                raw_answer: raw,
                parsed,
                state_digest: env.state_digest(),
            },
        )?;
    }

    let score = env.score();
    let metrics = env.metrics();
    write_line(&mut sink, &TranscriptLine::Score { score: score.clone(), metrics: metrics.clone() })?;
    Ok(SessionSummary {
        task: spec.task_name().to_string(),
        agent: agent.name().to_string(),
        turns: env.turn_index(),
        score,
        metrics,
    })
}

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("malformed transcript: {0}")]
    Malformed(String),
    #[error("replay mismatch: {0}")]
    Mismatch(String),
}

pub fn read_transcript(reader: impl BufRead) -> Result<Vec<TranscriptLine>, ReplayError> {
    let mut lines = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        lines.push(serde_json::from_str(&line)?);
    }
    Ok(lines)
}

/// Re-runs the recorded session against a freshly built environment and
/// checks every prompt, parsed answer, state digest, and the final score
/// against the recording. Any divergence is a hard error.
pub fn verify_transcript(lines: &[TranscriptLine]) -> Result<SessionSummary, ReplayError> {
    let mut iter = lines.iter();
    let (spec, agent) = match iter.next() {
        Some(TranscriptLine::Header { schema_version, task, agent, config_digest }) => {
            if *schema_version != SCHEMA_VERSION {
                return Err(ReplayError::Malformed(format!(
                    "unsupported schema version {schema_version}"
                )));
            }
            if *config_digest != task.digest() {
                return Err(ReplayError::Mismatch("header digest does not match task config".into()));
            }
            (task.clone(), agent.clone())
        }
        _ => return Err(ReplayError::Malformed("transcript must start with a header".into())),
    };

    let mut env = build_env(&spec)?;
    let mut scored = false;
    for line in iter {
        if scored {
            return Err(ReplayError::Malformed("content after score line".into()));
        }
        match line {
            TranscriptLine::Header { .. } => {
                return Err(ReplayError::Malformed("duplicate header".into()));
            }
            TranscriptLine::Turn { turn, prompt, raw_answer, parsed, state_digest } => {
                if env.is_done() {
                    return Err(ReplayError::Mismatch(format!(
                        "turn {turn} recorded after the environment finished"
                    )));
                }
                let expected = env.next_prompt();
                if expected != *prompt {
                    return Err(ReplayError::Mismatch(format!(
                        "prompt for turn {turn} diverges from the recording"
                    )));
                }
                let reparsed = parse_answer(raw_answer, env.answer_kind());
                if reparsed != *parsed {
                    return Err(ReplayError::Mismatch(format!(
                        "parsed answer for turn {turn} diverges from the recording"
                    )));
                }
                env.apply_answer(&reparsed);
                if env.turn_index() != *turn {
                    return Err(ReplayError::Mismatch(format!(
                        "turn counter {} does not match recorded turn {turn}",
                        env.turn_index()
                    )));
                }
                if env.state_digest() != *state_digest {
                    return Err(ReplayError::Mismatch(format!(
                        "state digest for turn {turn} diverges from the recording"
                    )));
                }
            }
            TranscriptLine::Score { score, metrics } => {
                if !env.is_done() {
                    return Err(ReplayError::Mismatch(
                        "score recorded before the environment finished".into(),
                    ));
                }
                if env.score() != *score {
                    return Err(ReplayError::Mismatch("recomputed score differs".into()));
                }
                if env.metrics() != *metrics {
                    return Err(ReplayError::Mismatch("recomputed metrics differ".into()));
                }
                scored = true;
            }
        }
    }
    if !scored {
        return Err(ReplayError::Malformed("transcript has no score line".into()));
    }
    if !env.is_done() {
        return Err(ReplayError::Mismatch("transcript ends before the environment finished".into()));
    }
    Ok(SessionSummary {
        task: spec.task_name().to_string(),
        agent,
        turns: env.turn_index(),
        score: env.score(),
        metrics: env.metrics(),
    })
}
