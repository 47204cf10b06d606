//! Strict extraction of final answers from agent replies.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

/// What the environment expects inside the answer tags this turn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AnswerKind {
    /// A whole number within the inclusive range.
    Int { min: i64, max: i64 },
    /// A grid coordinate written "(x, y)".
    Coord,
    /// A free-form string, used verbatim after trimming.
    Text,
}

/// A validated answer; anything that fails validation becomes `Invalid`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum ParsedAnswer {
    Int(i64),
    Coord(u32, u32),
    Text(String),
    Invalid,
}

fn answer_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?s)<answer>(.*?)</answer>").expect("static regex"))
}

fn coord_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\(\s*(\d+)\s*,\s*(\d+)\s*\)$").expect("static regex"))
}

/// Pull the last well-formed `<answer>...</answer>` pair out of a reply and
/// validate it against `kind`. There is no fallback: a reply without the tags
/// is invalid no matter how obvious its intent.
pub fn parse_answer(raw: &str, kind: AnswerKind) -> ParsedAnswer {
    let Some(caps) = answer_re().captures_iter(raw).last() else {
        return ParsedAnswer::Invalid;
    };
    let body = caps.get(1).expect("one capture group").as_str().trim();
    match kind {
        AnswerKind::Int { min, max } => match body.parse::<i64>() {
            Ok(v) if (min..=max).contains(&v) => ParsedAnswer::Int(v),
            _ => ParsedAnswer::Invalid,
        },
        AnswerKind::Coord => match coord_re().captures(body) {
            Some(c) => match (c[1].parse::<u32>(), c[2].parse::<u32>()) {
                (Ok(x), Ok(y)) => ParsedAnswer::Coord(x, y),
                _ => ParsedAnswer::Invalid,
            },
            None => ParsedAnswer::Invalid,
        },
        AnswerKind::Text => {
            if body.is_empty() {
                ParsedAnswer::Invalid
            } else {
                ParsedAnswer::Text(body.to_string())
            }
        }
    }
}
