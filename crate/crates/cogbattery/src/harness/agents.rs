//! Built-in agents: a scripted reply queue for tests, plus deterministic
//! solvers for each task that double as correctness oracles for the
//! environments (they win whenever winning is possible).

use std::collections::{BTreeSet, VecDeque};
use std::sync::OnceLock;

use regex::Regex;

use super::Message;
use crate::harness::Role;
use crate::rapm::session::RapmFormat;
use crate::rapm::{cell_satisfies, RapmItem};
use crate::swm::{SwmConfig, TOKEN_COLORS};
use crate::wcst::{attr_pool, Card, WcstAttr, CARD_BACKGROUNDS, CARD_COLORS, CARD_SHAPES, NUMBER_WORDS};

#[derive(Debug, thiserror::Error)]
#[error("agent failed: {0}")]
pub struct AgentError(pub String);

/// Anything that can answer a chat conversation. The harness treats errors as
/// empty replies, so agents may fail without aborting a session.
pub trait Agent {
    fn name(&self) -> &str;
    fn reply(&mut self, messages: &[Message]) -> Result<String, AgentError>;
}

/// Replays a fixed list of replies, then empty strings.
pub struct ScriptedAgent {
    name: String,
    replies: VecDeque<String>,
}

impl ScriptedAgent {
    pub fn new(name: impl Into<String>, replies: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self {
            name: name.into(),
            replies: replies.into_iter().map(Into::into).collect(),
        }
    }
}

impl Agent for ScriptedAgent {
    fn name(&self) -> &str {
        &self.name
    }

    fn reply(&mut self, _messages: &[Message]) -> Result<String, AgentError> {
        Ok(self.replies.pop_front().unwrap_or_default())
    }
}

/// Solves a string matrix from its stored constraints: picks the first option
/// satisfying the missing cell's constraints, or emits the true cell string.
pub struct RapmSolverAgent {
    item: RapmItem,
    format: RapmFormat,
}

impl RapmSolverAgent {
    pub fn new(item: RapmItem, format: RapmFormat) -> Self {
        Self { item, format }
    }
}

impl Agent for RapmSolverAgent {
    fn name(&self) -> &str {
        "matrix-solver"
    }

    fn reply(&mut self, _messages: &[Message]) -> Result<String, AgentError> {
        match self.format {
            RapmFormat::MultipleChoice => {
                let missing = &self.item.constraints[2][2];
                let choice = self
                    .item
                    .options
                    .iter()
                    .position(|opt| cell_satisfies(opt, missing))
                    .ok_or_else(|| AgentError("no option satisfies the constraints".into()))?;
                Ok(format!("<answer>{}</answer>", choice + 1))
            }
            RapmFormat::Generate => Ok(format!("<answer>{}</answer>", self.item.answer())),
        }
    }
}

fn last_user_text(messages: &[Message]) -> Option<&str> {
    messages
        .iter()
        .rev()
        .find(|m| m.role == Role::User)
        .map(|m| m.content.as_str())
}

fn swm_found_single_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"Found a (red|blue) token in box (\d+|\(\d+, \d+\))!").unwrap())
}

fn swm_found_mixed_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"Found a token with mixed colors \((red|blue) and (red|blue)\) in box (\d+|\(\d+, \d+\))!")
            .unwrap()
    })
}

fn swm_empty_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"No tokens found in box (\d+|\(\d+, \d+\))\.").unwrap())
}

fn swm_svg_box_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r#"data-box="(\d+)" data-x="(\d+)" data-y="(\d+)""#).unwrap()
    })
}

fn swm_glyph_found_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r#"data-result="found" data-colors="([a-z ]+)" data-x="(\d+)" data-y="(\d+)""#)
            .unwrap()
    })
}

fn swm_glyph_empty_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r#"data-result="empty" data-x="(\d+)" data-y="(\d+)""#).unwrap())
}

/// Token-search strategy that never commits a rule error: it tracks, per
/// token type, every box known to have held it and every box currently known
/// not to hold it, and always opens the box that is still a live candidate
/// for the most unfinished types.
pub struct SwmSweeperAgent {
    n_boxes: usize,
    coordinates: bool,
    /// Stable box labels in preference order ("1".."N" or "(x, y)").
    universe: Vec<String>,
    /// Per type: labels where the token was found (permanently excluded).
    found: Vec<BTreeSet<String>>,
    /// Per type: labels ruled out since that type's last regeneration.
    absent: Vec<BTreeSet<String>>,
}

impl SwmSweeperAgent {
    pub fn new(config: &SwmConfig) -> Self {
        let coordinates = config.modality.uses_coordinates();
        let universe = if coordinates {
            Vec::new() // learned from the first rendered scene
        } else {
            (1..=config.n_boxes).map(|i| i.to_string()).collect()
        };
        Self {
            n_boxes: config.n_boxes,
            coordinates,
            universe,
            found: vec![BTreeSet::new(); config.n_types],
            absent: vec![BTreeSet::new(); config.n_types],
        }
    }

    fn learn_universe(&mut self, messages: &[Message]) {
        if !self.universe.is_empty() {
            return;
        }
        for message in messages {
            if message.role != Role::User {
                continue;
            }
            let mut boxes: Vec<(u32, u32)> = swm_svg_box_re()
                .captures_iter(&message.content)
                .map(|c| (c[2].parse().unwrap(), c[3].parse().unwrap()))
                .collect();
            if boxes.is_empty() {
                continue;
            }
            boxes.sort_by_key(|&(x, y)| (y, x));
            self.universe = boxes.iter().map(|(x, y)| format!("({x}, {y})")).collect();
            return;
        }
    }

    /// A find permanently rules the box out for the found types (they never
    /// return to a box they occupied) and resets everything known about
    /// their new hiding places; any type not found was provably absent.
    fn record_found(&mut self, label: &str, types: &[usize]) {
        let n_types = self.found.len();
        for &t in types {
            self.found[t].insert(label.to_string());
            self.absent[t].clear();
        }
        for other in 0..n_types {
            if !types.contains(&other) {
                self.absent[other].insert(label.to_string());
            }
        }
    }

    fn record_empty(&mut self, label: &str) {
        for t in 0..self.found.len() {
            self.absent[t].insert(label.to_string());
        }
    }

    fn color_type(color: &str) -> usize {
        TOKEN_COLORS.iter().position(|&col| col == color).expect("known token color")
    }

    /// Absorbs the previous guess's result, whether it arrived as a feedback
    /// sentence or only as a glyph in the rendered scene.
    fn absorb_feedback(&mut self, text: &str) {
        if let Some(c) = swm_found_single_re().captures(text) {
            self.record_found(&c[2].to_string(), &[Self::color_type(&c[1])]);
        } else if let Some(c) = swm_found_mixed_re().captures(text) {
            let types = [Self::color_type(&c[1]), Self::color_type(&c[2])];
            self.record_found(&c[3].to_string(), &types);
        } else if let Some(c) = swm_empty_re().captures(text) {
            self.record_empty(&c[1].to_string());
        } else if let Some(c) = swm_glyph_found_re().captures(text) {
            let label = format!("({}, {})", &c[2], &c[3]);
            let types: Vec<usize> = c[1].split(' ').map(Self::color_type).collect();
            self.record_found(&label, &types);
        } else if let Some(c) = swm_glyph_empty_re().captures(text) {
            self.record_empty(&format!("({}, {})", &c[1], &c[2]));
        }
    }

    fn choose(&self) -> &str {
        let alive: Vec<usize> = (0..self.found.len())
            .filter(|&t| self.found[t].len() < self.n_boxes)
            .collect();
        let mut best: Option<(usize, &str)> = None;
        for label in &self.universe {
            let score = alive
                .iter()
                .filter(|&&t| !self.found[t].contains(label) && !self.absent[t].contains(label))
                .count();
            if score > best.map_or(0, |(s, _)| s) {
                best = Some((score, label));
            }
        }
        best.map_or_else(|| self.universe[0].as_str(), |(_, l)| l)
    }
}

impl Agent for SwmSweeperAgent {
    fn name(&self) -> &str {
        "box-sweeper"
    }

    fn reply(&mut self, messages: &[Message]) -> Result<String, AgentError> {
        if self.coordinates {
            self.learn_universe(messages);
            if self.universe.is_empty() {
                return Err(AgentError("no rendered scene to read coordinates from".into()));
            }
        }
        if let Some(text) = last_user_text(messages) {
            self.absorb_feedback(text);
        }
        Ok(format!("<answer>{}</answer>", self.choose()))
    }
}

fn wcst_card_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"^(one|two|three|four) (red|green|blue|yellow) (triangle|square|star|circle)(?: on (white|purple|orange|cyan) background)?$",
        )
        .unwrap()
    })
}

fn parse_card(text: &str) -> Option<Card> {
    let c = wcst_card_re().captures(text.trim())?;
    Some(Card {
        number: NUMBER_WORDS.iter().position(|&w| w == &c[1])? as u8 + 1,
        color: CARD_COLORS.iter().position(|&w| w == &c[2])? as u8,
        shape: CARD_SHAPES.iter().position(|&w| w == &c[3])? as u8,
        background: c
            .get(4)
            .and_then(|m| CARD_BACKGROUNDS.iter().position(|&w| w == m.as_str()))
            .map(|i| i as u8),
    })
}

fn parse_round(text: &str) -> Option<(Card, [Card; 4])> {
    let mut given = None;
    let mut options: [Option<Card>; 4] = [None, None, None, None];
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("Given: ") {
            given = parse_card(rest);
        }
        for (i, slot) in options.iter_mut().enumerate() {
            if let Some(rest) = line.strip_prefix(&format!("{}. ", i + 1)) {
                *slot = parse_card(rest);
            }
        }
    }
    let [a, b, c, d] = options;
    Some((given?, [a?, b?, c?, d?]))
}

/// Card-sorting strategy that deduces the hidden rule by elimination: every
/// verdict prunes the set of rules consistent with the feedback so far, and
/// choices target the lowest-ranked surviving rule with the most specific
/// matching option.
pub struct WcstEliminatorAgent {
    pool: Vec<WcstAttr>,
    candidates: BTreeSet<WcstAttr>,
    confirmed: Option<WcstAttr>,
    /// Attributes matched by the previously chosen option.
    last_matched: Option<BTreeSet<WcstAttr>>,
}

impl WcstEliminatorAgent {
    pub fn new() -> Self {
        Self {
            pool: Vec::new(),
            candidates: BTreeSet::new(),
            confirmed: None,
            last_matched: None,
        }
    }

    fn absorb_verdict(&mut self, correct: bool) {
        let Some(matched) = self.last_matched.take() else { return };
        let pool: BTreeSet<WcstAttr> = self.pool.iter().copied().collect();
        if correct {
            if self.confirmed.is_none() {
                self.candidates.retain(|a| matched.contains(a));
                if self.candidates.len() == 1 {
                    self.confirmed = self.candidates.iter().next().copied();
                }
            }
        } else if let Some(old) = self.confirmed.take() {
            // The rule moved on: it is neither the old rule nor anything the
            // rejected option matched.
            self.candidates = pool
                .iter()
                .copied()
                .filter(|a| *a != old && !matched.contains(a))
                .collect();
        } else {
            self.candidates.retain(|a| !matched.contains(a));
        }
        if self.candidates.is_empty() {
            // A rule change slipped past unnoticed; restart from what the
            // last verdict still rules out.
            self.candidates = pool.iter().copied().filter(|a| !matched.contains(a)).collect();
            if self.candidates.is_empty() {
                self.candidates = pool;
            }
        }
    }
}

impl Default for WcstEliminatorAgent {
    fn default() -> Self {
        Self::new()
    }
}

impl Agent for WcstEliminatorAgent {
    fn name(&self) -> &str {
        "rule-eliminator"
    }

    fn reply(&mut self, messages: &[Message]) -> Result<String, AgentError> {
        let text = last_user_text(messages)
            .ok_or_else(|| AgentError("no user message to answer".into()))?;
        let (given, options) =
            parse_round(text).ok_or_else(|| AgentError("no card round in the prompt".into()))?;

        if self.pool.is_empty() {
            let hard = options.iter().any(|c| c.background.is_some());
            self.pool = attr_pool(if hard {
                crate::task::Difficulty::Hard
            } else {
                crate::task::Difficulty::Easy
            })
            .to_vec();
            self.candidates = self.pool.iter().copied().collect();
        }

        if text.starts_with("Correct!") {
            self.absorb_verdict(true);
        } else if text.starts_with("Incorrect. Please try again.") {
            self.absorb_verdict(false);
        }

        let matched: Vec<BTreeSet<WcstAttr>> = options
            .iter()
            .map(|opt| opt.matched_attrs(&given, &self.pool))
            .collect();
        let target = self
            .confirmed
            .or_else(|| self.candidates.iter().next().copied())
            .ok_or_else(|| AgentError("no candidate rules left".into()))?;
        let choice = (0..4)
            .filter(|&i| matched[i].contains(&target))
            .min_by_key(|&i| (matched[i].len(), i))
            .unwrap_or(0);
        self.last_matched = Some(matched[choice].clone());
        Ok(format!("<answer>{}</answer>", choice + 1))
    }
}
