//! Multi-turn box-search environment for the session harness.

use std::collections::BTreeMap;

use crate::harness::parse::{AnswerKind, ParsedAnswer};
use crate::harness::{prompts, sha256_hex, TaskEnv, TurnPrompt};
use crate::swm::render::{render_feedback, render_notes, render_svg};
use crate::swm::{Guess, SwmOutcome, SwmTrial};

pub struct SwmSession {
    trial: SwmTrial,
    notes: bool,
    cot: bool,
    think_budget: u32,
}

impl SwmSession {
    pub fn new(trial: SwmTrial, notes: bool, cot: bool, think_budget: u32) -> Self {
        Self { trial, notes, cot, think_budget }
    }

    /// The result line for the previous guess, if this turn should carry one.
    /// Image-only runs convey open results through the rendered scene, but
    /// transport-level problems (bad format, nonexistent box) are always
    /// spelled out.
    fn feedback(&self) -> Option<String> {
        let outcome = self.trial.outcomes.last()?;
        let visible = match outcome {
            SwmOutcome::Invalid | SwmOutcome::NoBox { .. } => true,
            _ => self.trial.config.modality.has_result_text(),
        };
        visible.then(|| render_feedback(&self.trial, outcome))
    }
}

impl TaskEnv for SwmSession {
    fn answer_kind(&self) -> AnswerKind {
        if self.trial.config.modality.uses_coordinates() {
            AnswerKind::Coord
        } else {
            // Any integer parses; out-of-range numbers are the environment's
            // business (they count as opening a nonexistent box).
            AnswerKind::Int { min: i64::MIN, max: i64::MAX }
        }
    }

    fn system_prompt(&self) -> String {
        prompts::swm_system_prompt(&self.trial.config, self.cot, self.think_budget)
    }

    fn next_prompt(&self) -> TurnPrompt {
        let slot = prompts::swm_turn_reasoning_line(self.cot, self.think_budget);
        let question = prompts::swm_question(&self.trial.config);
        let format = prompts::swm_answer_format(&self.trial.config);
        let feedback = self.feedback();

        let text = if self.notes {
            let mut parts = Vec::new();
            if let Some(f) = feedback {
                parts.push(f);
            }
            parts.push(render_notes(&self.trial));
            parts.push(slot);
            parts.push(question);
            parts.push(format.to_string());
            parts.join("\n")
        } else {
            let head = match feedback {
                Some(f) => format!("{f} {slot}"),
                None => slot,
            };
            format!("{head}\n{question}\n{format}")
        };

        let svg = self
            .trial
            .config
            .modality
            .has_image()
            .then(|| render_svg(&self.trial, self.trial.outcomes.last()));
        TurnPrompt { text, svg }
    }

    fn apply_answer(&mut self, answer: &ParsedAnswer) {
        match answer {
            ParsedAnswer::Int(i) => {
                self.trial.apply_guess(Guess::Index(*i));
            }
            ParsedAnswer::Coord(x, y) => {
                self.trial.apply_guess(Guess::Cell(*x, *y));
            }
            ParsedAnswer::Text(_) | ParsedAnswer::Invalid => self.trial.record_invalid(),
        }
    }

    fn is_done(&self) -> bool {
        self.trial.is_done()
    }

    fn turn_index(&self) -> usize {
        self.trial.turns_used()
    }

    fn score(&self) -> serde_json::Value {
        let mut value = serde_json::to_value(self.trial.score()).expect("score serializes");
        value["task"] = serde_json::json!("swm");
        value["seed"] = serde_json::json!(self.trial.seed);
        value
    }

    fn metrics(&self) -> BTreeMap<String, f64> {
        self.trial.score().metrics()
    }

    fn state_digest(&self) -> String {
        let state = serde_json::json!({
            "outcomes": self.trial.outcomes,
            "tokens_found": self.trial.tokens_found(),
            "turns": self.trial.turns_used(),
        });
        sha256_hex(state.to_string().as_bytes())
    }
}
