//! Single-turn matrix environment: show the grid (and options), judge one
//! answer, done.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::harness::parse::{AnswerKind, ParsedAnswer};
use crate::harness::{prompts, sha256_hex, TaskEnv, TurnPrompt};
use crate::rapm::{cell_satisfies, RapmItem};

/// How the missing cell is answered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RapmFormat {
    /// Pick one of eight listed candidates.
    MultipleChoice,
    /// Produce the missing string outright.
    Generate,
}

pub struct RapmSession {
    item: RapmItem,
    format: RapmFormat,
    hint: bool,
    cot: bool,
    think_budget: u32,
    outcome: Option<(ParsedAnswer, bool)>,
}

impl RapmSession {
    pub fn new(item: RapmItem, format: RapmFormat, hint: bool, cot: bool, think_budget: u32) -> Self {
        Self { item, format, hint, cot, think_budget, outcome: None }
    }

    fn judge(&self, answer: &ParsedAnswer) -> bool {
        match (self.format, answer) {
            (RapmFormat::MultipleChoice, ParsedAnswer::Int(i)) => {
                *i - 1 == self.item.correct_index as i64
            }
            // Generated strings are graded against the stored cell rules, so
            // any string satisfying them counts, not just the original cell.
            (RapmFormat::Generate, ParsedAnswer::Text(s)) => {
                cell_satisfies(s, &self.item.constraints[2][2])
            }
            _ => false,
        }
    }
}

impl TaskEnv for RapmSession {
    fn answer_kind(&self) -> AnswerKind {
        match self.format {
            RapmFormat::MultipleChoice => AnswerKind::Int { min: 1, max: 8 },
            RapmFormat::Generate => AnswerKind::Text,
        }
    }

    fn system_prompt(&self) -> String {
        prompts::rapm_system_prompt(self.format, self.hint, self.cot, self.think_budget)
    }

    fn next_prompt(&self) -> TurnPrompt {
        let mut text = self.item.render_grid();
        if self.format == RapmFormat::MultipleChoice {
            text.push('\n');
            text.push_str(&self.item.render_options());
        }
        TurnPrompt::text_only(text.trim_end().to_string())
    }

    fn apply_answer(&mut self, answer: &ParsedAnswer) {
        let correct = self.judge(answer);
        self.outcome = Some((answer.clone(), correct));
    }

    fn is_done(&self) -> bool {
        self.outcome.is_some()
    }

    fn turn_index(&self) -> usize {
        usize::from(self.outcome.is_some())
    }

    fn score(&self) -> serde_json::Value {
        let (answer, correct) = match &self.outcome {
            Some((a, c)) => (Some(a), *c),
            None => (None, false),
        };
        serde_json::json!({
            "task": "rapm",
            "seed": self.item.seed,
            "correct": correct,
            "invalid": matches!(answer, Some(ParsedAnswer::Invalid)),
        })
    }

    fn metrics(&self) -> BTreeMap<String, f64> {
        let correct = matches!(self.outcome, Some((_, true)));
        let invalid = matches!(self.outcome, Some((ParsedAnswer::Invalid, _)));
        BTreeMap::from([
            ("score".to_string(), f64::from(u8::from(correct))),
            ("invalid".to_string(), f64::from(u8::from(invalid))),
        ])
    }

    fn state_digest(&self) -> String {
        let state = serde_json::json!({
            "seed": self.item.seed,
            "outcome": self.outcome.as_ref().map(|(a, c)| (a, c)),
        });
        sha256_hex(state.to_string().as_bytes())
    }
}
