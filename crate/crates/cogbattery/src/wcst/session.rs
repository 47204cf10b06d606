//! Multi-turn card-matching environment for the session harness.

use std::collections::BTreeMap;

use crate::harness::parse::{AnswerKind, ParsedAnswer};
use crate::harness::{prompts, sha256_hex, TaskEnv, TurnPrompt};
use crate::task::Modality;
use crate::wcst::render::{render_feedback, render_notes, render_round_text, render_svg};
use crate::wcst::WcstTrial;

#[derive(Clone, Copy)]
enum Feedback {
    Judged(bool),
    Invalid,
}

pub struct WcstSession {
    trial: WcstTrial,
    notes: bool,
    cot: bool,
    think_budget: u32,
    last_feedback: Option<Feedback>,
}

impl WcstSession {
    pub fn new(trial: WcstTrial, notes: bool, cot: bool, think_budget: u32) -> Self {
        Self { trial, notes, cot, think_budget, last_feedback: None }
    }
}

impl TaskEnv for WcstSession {
    fn answer_kind(&self) -> AnswerKind {
        AnswerKind::Int { min: 1, max: 4 }
    }

    fn system_prompt(&self) -> String {
        prompts::wcst_system_prompt(self.trial.config.difficulty, self.cot, self.think_budget)
    }

    fn next_prompt(&self) -> TurnPrompt {
        let round = self.trial.current_round().expect("prompting a finished trial");
        let mut parts: Vec<String> = Vec::new();
        match self.last_feedback {
            Some(Feedback::Judged(correct)) => parts.push(render_feedback(correct).to_string()),
            Some(Feedback::Invalid) => parts.push("Invalid answer format.".to_string()),
            None => {}
        }
        if self.notes && !self.trial.records.is_empty() {
            parts.push(render_notes(&self.trial));
        }
        match self.trial.config.modality {
            Modality::Text => parts.push(render_round_text(round)),
            Modality::Image => parts.push(prompts::WCST_IMAGE_LINE.to_string()),
            Modality::ImageText => {
                parts.push(format!("{}\n{}", render_round_text(round), prompts::WCST_IMAGE_LINE));
            }
        }
        parts.push(prompts::WCST_ANSWER_FORMAT.to_string());
        let svg = self.trial.config.modality.has_image().then(|| render_svg(round));
        TurnPrompt { text: parts.join("\n"), svg }
    }

    fn apply_answer(&mut self, answer: &ParsedAnswer) {
        match answer {
            ParsedAnswer::Int(i) if (1..=4).contains(i) => {
                let correct = self.trial.apply_choice(*i as usize - 1);
                self.last_feedback = Some(Feedback::Judged(correct));
            }
            _ => {
                self.trial.record_invalid();
                self.last_feedback = Some(Feedback::Invalid);
            }
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
        value["task"] = serde_json::json!("wcst");
        value["seed"] = serde_json::json!(self.trial.seed);
        value
    }

    fn metrics(&self) -> BTreeMap<String, f64> {
        self.trial.score().metrics()
    }

    fn state_digest(&self) -> String {
        let state = serde_json::json!({
            "records": self.trial.records,
            "turns": self.trial.turns_used(),
        });
        sha256_hex(state.to_string().as_bytes())
    }
}
