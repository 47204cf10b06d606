//! Declarative run plans: the TOML schema, seed derivation, and expansion of
//! task blocks into concrete per-session specs.

use std::collections::BTreeSet;
use std::path::PathBuf;

use anyhow::{bail, Context};
use cogbattery::harness::agents::{
    Agent, RapmSolverAgent, ScriptedAgent, SwmSweeperAgent, WcstEliminatorAgent,
};
use cogbattery::harness::remote::{RemoteChatAgent, RemoteConfig};
use cogbattery::harness::TaskSpec;
use cogbattery::rapm::generate_matrix;
use cogbattery::rapm::session::RapmFormat;
use cogbattery::rng::derive_seed;
use cogbattery::swm::SwmConfig;
use cogbattery::task::{Difficulty, Modality};
use cogbattery::wcst::Ambiguity;
use serde::Deserialize;

/// Default reasoning budget for the interactive tasks.
pub const DEFAULT_INTERACTIVE_BUDGET: u32 = 4000;
/// Default reasoning budget for matrix items.
pub const DEFAULT_MATRIX_BUDGET: u32 = 30_000;
/// How far past the derived base seed to scan for a generable matrix.
const MATRIX_SEED_TRIES: u64 = 1000;

/// A full run described in one TOML file. Credentials never live here; remote
/// agents read their API key from the environment.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunPlan {
    pub run_id: String,
    pub master_seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    pub agent: AgentPlan,
    #[serde(default)]
    pub tasks: Vec<TaskPlan>,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

impl RunPlan {
    pub fn parse(text: &str) -> anyhow::Result<RunPlan> {
        let plan: RunPlan = toml::from_str(text).context("parsing run plan")?;
        if plan.run_id.is_empty() || plan.run_id.contains(['/', '\\']) {
            bail!("run_id must be a non-empty name without path separators");
        }
        Ok(plan)
    }
}

/// Which agent answers the prompts.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AgentPlan {
    /// Built-in deterministic solvers, one per task.
    Oracle,
    /// Replays a fixed list of canned replies in every session.
    Scripted { replies: Vec<String> },
    /// An OpenAI-compatible chat endpoint.
    Remote(RemoteConfig),
}

impl AgentPlan {
    pub fn kind(&self) -> &'static str {
        match self {
            AgentPlan::Oracle => "oracle",
            AgentPlan::Scripted { .. } => "scripted",
            AgentPlan::Remote(_) => "remote",
        }
    }

    /// Instantiate the agent for one session. Oracles are task-specific, so
    /// they need the resolved spec.
    pub fn build(&self, spec: &TaskSpec) -> anyhow::Result<Box<dyn Agent>> {
        Ok(match self {
            AgentPlan::Oracle => oracle_for(spec)?,
            AgentPlan::Scripted { replies } => {
                Box::new(ScriptedAgent::new("scripted", replies.clone()))
            }
            AgentPlan::Remote(config) => Box::new(
                RemoteChatAgent::new(config.clone())
                    .map_err(|e| anyhow::anyhow!("remote agent: {e}"))?,
            ),
        })
    }

    /// Reject plan/agent combinations that can never work, before any
    /// session runs.
    pub fn check_compatible(&self, spec: &TaskSpec) -> anyhow::Result<()> {
        if let (AgentPlan::Oracle, TaskSpec::Wcst { modality: Modality::Image, .. }) = (self, spec)
        {
            bail!("the card-sorting oracle reads card text; use text or image-text modality");
        }
        Ok(())
    }
}

fn oracle_for(spec: &TaskSpec) -> anyhow::Result<Box<dyn Agent>> {
    Ok(match spec {
        TaskSpec::Rapm { seed, format, .. } => {
            let item = generate_matrix(*seed).context("building matrix oracle")?;
            Box::new(RapmSolverAgent::new(item, *format))
        }
        TaskSpec::Swm { difficulty, modality, .. } => {
            Box::new(SwmSweeperAgent::new(&SwmConfig::new(*difficulty, *modality)))
        }
        TaskSpec::Wcst { .. } => Box::new(WcstEliminatorAgent::new()),
    })
}

/// One `[[tasks]]` block. Each block expands into `count`/`repeats` sessions.
#[derive(Debug, Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskPlan {
    Rapm {
        #[serde(default = "one")]
        count: usize,
        #[serde(default = "default_format")]
        format: RapmFormat,
        #[serde(default)]
        hint: bool,
        #[serde(default = "yes")]
        cot: bool,
        #[serde(default = "default_matrix_budget")]
        think_budget: u32,
        group: Option<String>,
    },
    Swm {
        difficulty: Difficulty,
        #[serde(default = "default_modality")]
        modality: Modality,
        #[serde(default)]
        notes: bool,
        #[serde(default = "three")]
        repeats: usize,
        #[serde(default = "yes")]
        cot: bool,
        #[serde(default = "default_interactive_budget")]
        think_budget: u32,
        group: Option<String>,
    },
    Wcst {
        difficulty: Difficulty,
        #[serde(default = "default_modality")]
        modality: Modality,
        /// Defaults to `off` on easy and `first` on hard.
        ambiguity: Option<Ambiguity>,
        #[serde(default)]
        notes: bool,
        #[serde(default = "three")]
        repeats: usize,
        #[serde(default = "yes")]
        cot: bool,
        #[serde(default = "default_interactive_budget")]
        think_budget: u32,
        group: Option<String>,
    },
}

fn one() -> usize {
    1
}

fn three() -> usize {
    3
}

fn yes() -> bool {
    true
}

fn default_format() -> RapmFormat {
    RapmFormat::MultipleChoice
}

fn default_modality() -> Modality {
    Modality::Text
}

fn default_matrix_budget() -> u32 {
    DEFAULT_MATRIX_BUDGET
}

fn default_interactive_budget() -> u32 {
    DEFAULT_INTERACTIVE_BUDGET
}

/// One concrete session: the transcript file stem (ordinal-prefixed so plan
/// order survives directory listing), a reporting group, and the resolved
/// task spec.
#[derive(Debug, Clone)]
pub struct SessionPlan {
    pub stem: String,
    pub group: String,
    pub spec: TaskSpec,
}

impl SessionPlan {
    pub fn file_name(&self) -> String {
        format!("{}.jsonl", self.stem)
    }
}

/// Expand the plan's task blocks into sessions with derived, unique seeds.
pub fn expand(plan: &RunPlan, master_seed: u64) -> anyhow::Result<Vec<SessionPlan>> {
    let mut sessions = Vec::new();
    let mut ordinal = 0u64;
    for task in &plan.tasks {
        match task {
            TaskPlan::Rapm { count, format, hint, cot, think_budget, group } => {
                for _ in 0..*count {
                    let seed = resolve_matrix_seed(master_seed, ordinal)?;
                    let spec = TaskSpec::Rapm {
                        seed,
                        format: *format,
                        hint: *hint,
                        cot: *cot,
                        think_budget: *think_budget,
                    };
                    sessions.push(session(ordinal, group, spec));
                    ordinal += 1;
                }
            }
            TaskPlan::Swm {
                difficulty,
                modality,
                notes,
                repeats,
                cot,
                think_budget,
                group,
            } => {
                for _ in 0..*repeats {
                    let spec = TaskSpec::Swm {
                        seed: derive_seed(master_seed, ordinal),
                        difficulty: *difficulty,
                        modality: *modality,
                        notes: *notes,
                        cot: *cot,
                        think_budget: *think_budget,
                    };
                    sessions.push(session(ordinal, group, spec));
                    ordinal += 1;
                }
            }
            TaskPlan::Wcst {
                difficulty,
                modality,
                ambiguity,
                notes,
                repeats,
                cot,
                think_budget,
                group,
            } => {
                let ambiguity = ambiguity.unwrap_or(match difficulty {
                    Difficulty::Easy => Ambiguity::Off,
                    Difficulty::Hard => Ambiguity::First,
                });
                for _ in 0..*repeats {
                    let spec = TaskSpec::Wcst {
                        seed: derive_seed(master_seed, ordinal),
                        difficulty: *difficulty,
                        modality: *modality,
                        ambiguity,
                        notes: *notes,
                        cot: *cot,
                        think_budget: *think_budget,
                    };
                    sessions.push(session(ordinal, group, spec));
                    ordinal += 1;
                }
            }
        }
    }
    let seeds: BTreeSet<u64> = sessions.iter().map(|s| s.spec.seed()).collect();
    if seeds.len() != sessions.len() {
        bail!("derived session seeds collide; pick a different master seed");
    }
    Ok(sessions)
}

fn session(ordinal: u64, group: &Option<String>, spec: TaskSpec) -> SessionPlan {
    SessionPlan {
        stem: format!("{ordinal:03}-{}", spec.task_name()),
        group: group.clone().unwrap_or_else(|| default_group(&spec)),
        spec,
    }
}

/// Matrix generation rejects some seeds, so scan forward from the derived
/// base until one produces a valid item. The scan is deterministic.
fn resolve_matrix_seed(master_seed: u64, ordinal: u64) -> anyhow::Result<u64> {
    let base = derive_seed(master_seed, ordinal);
    for offset in 0..MATRIX_SEED_TRIES {
        let seed = base.wrapping_add(offset);
        if generate_matrix(seed).is_ok() {
            return Ok(seed);
        }
    }
    bail!("no generable matrix seed within {MATRIX_SEED_TRIES} tries for session {ordinal}")
}

fn kebab(value: impl serde::Serialize) -> String {
    match serde_json::to_value(value).expect("enum serializes") {
        serde_json::Value::String(s) => s,
        other => other.to_string(),
    }
}

/// Reporting label derived from the configuration when the plan gives none.
pub fn default_group(spec: &TaskSpec) -> String {
    let mut label = match spec {
        TaskSpec::Rapm { format, .. } => format!(
            "rapm-{}",
            match format {
                RapmFormat::MultipleChoice => "mc",
                RapmFormat::Generate => "gen",
            }
        ),
        TaskSpec::Swm { difficulty, modality, .. } => {
            format!("swm-{}-{}", kebab(difficulty), kebab(modality))
        }
        TaskSpec::Wcst { difficulty, modality, ambiguity, .. } => format!(
            "wcst-{}-{}-{}",
            kebab(difficulty),
            kebab(modality),
            kebab(ambiguity)
        ),
    };
    match spec {
        TaskSpec::Rapm { hint, cot, .. } => {
            if *hint {
                label.push_str("-hint");
            }
            if !*cot {
                label.push_str("-nocot");
            }
        }
        TaskSpec::Swm { notes, cot, .. } | TaskSpec::Wcst { notes, cot, .. } => {
            if *notes {
                label.push_str("-notes");
            }
            if !*cot {
                label.push_str("-nocot");
            }
        }
    }
    label
}
