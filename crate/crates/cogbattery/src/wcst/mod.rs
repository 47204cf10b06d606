//! Rule-shift card sorting: match a given card to one of four option cards by
//! a hidden attribute; the rule changes silently after a streak of successes.

pub mod render;
pub mod session;

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::{rng_from_seed, TaskRng};
use crate::task::{Difficulty, Modality};

/// Consecutive correct matches that silently advance to the next rule.
pub const STREAK_TO_ADVANCE: usize = 5;
/// Consecutive correct matches after which a rule counts as acquired when
/// measuring later lapses.
pub const ACQUISITION_STREAK: usize = 3;
/// Parseable turns summarized in the optional note block.
pub const NOTE_WINDOW: usize = 6;

pub const NUMBER_WORDS: [&str; 4] = ["one", "two", "three", "four"];
pub const CARD_COLORS: [&str; 4] = ["red", "green", "blue", "yellow"];
pub const CARD_SHAPES: [&str; 4] = ["triangle", "square", "star", "circle"];
pub const CARD_BACKGROUNDS: [&str; 4] = ["white", "purple", "orange", "cyan"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WcstAttr {
    Number,
    Color,
    Shape,
    Background,
}

impl WcstAttr {
    /// Phrase used by note lines ("matching {phrase} and {phrase}").
    pub fn phrase(self) -> &'static str {
        match self {
            WcstAttr::Number => "number of symbols",
            WcstAttr::Color => "symbol color",
            WcstAttr::Shape => "symbol shape",
            WcstAttr::Background => "background color",
        }
    }
}

/// Attribute pool for a difficulty; doubles as the candidate rule set.
pub fn attr_pool(difficulty: Difficulty) -> &'static [WcstAttr] {
    match difficulty {
        Difficulty::Easy => &[WcstAttr::Number, WcstAttr::Color, WcstAttr::Shape],
        Difficulty::Hard => &[
            WcstAttr::Number,
            WcstAttr::Color,
            WcstAttr::Shape,
            WcstAttr::Background,
        ],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Card {
    /// Symbol count, 1..=4.
    pub number: u8,
    /// Index into [`CARD_COLORS`].
    pub color: u8,
    /// Index into [`CARD_SHAPES`].
    pub shape: u8,
    /// Index into [`CARD_BACKGROUNDS`]; absent in the three-attribute variant.
    pub background: Option<u8>,
}

impl Card {
    pub fn value(&self, attr: WcstAttr) -> Option<u8> {
        match attr {
            WcstAttr::Number => Some(self.number),
            WcstAttr::Color => Some(self.color),
            WcstAttr::Shape => Some(self.shape),
            WcstAttr::Background => self.background,
        }
    }

    fn set_value(&mut self, attr: WcstAttr, v: u8) {
        match attr {
            WcstAttr::Number => self.number = v,
            WcstAttr::Color => self.color = v,
            WcstAttr::Shape => self.shape = v,
            WcstAttr::Background => self.background = Some(v),
        }
    }

    /// Attributes from `attrs` on which `self` agrees with `given`.
    pub fn matched_attrs(&self, given: &Card, attrs: &[WcstAttr]) -> BTreeSet<WcstAttr> {
        attrs
            .iter()
            .copied()
            .filter(|&a| self.value(a).is_some() && self.value(a) == given.value(a))
            .collect()
    }

    /// English description such as "two red triangle"; the four-attribute
    /// variant appends the card background ("... on purple background").
    pub fn describe(&self) -> String {
        let mut s = format!(
            "{} {} {}",
            NUMBER_WORDS[(self.number - 1) as usize],
            CARD_COLORS[self.color as usize],
            CARD_SHAPES[self.shape as usize]
        );
        if let Some(b) = self.background {
            s.push_str(" on ");
            s.push_str(CARD_BACKGROUNDS[b as usize]);
            s.push_str(" background");
        }
        s
    }
}

/// When the correct option also matches one extra, non-active attribute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ambiguity {
    /// No deal is ever ambiguous.
    Off,
    /// Only the first deal of each rule block is ambiguous.
    First,
    /// Every deal of each rule block except the first is ambiguous.
    Rest,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct WcstConfig {
    pub difficulty: Difficulty,
    pub modality: Modality,
    pub ambiguity: Ambiguity,
    /// Rule blocks to complete; every attribute in the pool appears twice.
    pub n_blocks: usize,
    pub guess_cap: usize,
}

impl WcstConfig {
    pub fn new(difficulty: Difficulty, modality: Modality, ambiguity: Ambiguity) -> WcstConfig {
        WcstConfig {
            difficulty,
            modality,
            ambiguity,
            n_blocks: attr_pool(difficulty).len() * 2,
            guess_cap: match difficulty {
                Difficulty::Easy => 64,
                Difficulty::Hard => 96,
            },
        }
    }
}

/// One deal: the card to match plus four candidate matches.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub given: Card,
    pub options: [Card; 4],
}

/// One parseable turn, with everything the scorer needs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TurnRecord {
    /// 1-based index among parseable turns.
    pub turn: usize,
    /// 0-based rule block the turn belonged to.
    pub block: usize,
    pub given: Card,
    pub options: [Card; 4],
    /// 0-based option chosen.
    pub choice: usize,
    /// Attributes the chosen card shared with the given card.
    pub matched: BTreeSet<WcstAttr>,
    pub correct: bool,
    /// Attribute rules already disproved when the turn began.
    pub r_neg_before: BTreeSet<WcstAttr>,
}

#[derive(Clone, Debug)]
pub struct WcstTrial {
    pub config: WcstConfig,
    pub seed: u64,
    rng: TaskRng,
    schedule: Vec<WcstAttr>,
    block: usize,
    round_in_block: usize,
    streak: usize,
    /// Rules disproved by incorrect choices since the last rule change.
    r_neg: BTreeSet<WcstAttr>,
    current: Option<Round>,
    /// Parseable turns each completed block took.
    pub block_lengths: Vec<usize>,
    turns_in_block: usize,
    pub records: Vec<TurnRecord>,
    n_invalid: usize,
    turn_count: usize,
}

/// Every attribute appears twice, shuffled so no rule follows itself.
fn schedule(rng: &mut TaskRng, difficulty: Difficulty) -> Vec<WcstAttr> {
    let pool = attr_pool(difficulty);
    let mut order: Vec<WcstAttr> = pool.iter().chain(pool.iter()).copied().collect();
    loop {
        order.shuffle(rng);
        if order.windows(2).all(|w| w[0] != w[1]) {
            return order;
        }
    }
}

fn sample_card(rng: &mut TaskRng, difficulty: Difficulty) -> Card {
    Card {
        number: rng.gen_range(1..=4),
        color: rng.gen_range(0..4),
        shape: rng.gen_range(0..4),
        background: match difficulty {
            Difficulty::Easy => None,
            Difficulty::Hard => Some(rng.gen_range(0..4)),
        },
    }
}

/// Build a card that agrees with `given` exactly on `matched` over the pool.
fn card_matching(
    rng: &mut TaskRng,
    given: &Card,
    pool: &[WcstAttr],
    matched: &BTreeSet<WcstAttr>,
) -> Card {
    let mut card = *given;
    for &attr in pool {
        if matched.contains(&attr) {
            continue;
        }
        let cur = given.value(attr).expect("pool attribute present on card");
        let v = loop {
            let v = match attr {
                WcstAttr::Number => rng.gen_range(1..=4),
                _ => rng.gen_range(0..4),
            };
            if v != cur {
                break v;
            }
        };
        card.set_value(attr, v);
    }
    card
}

impl WcstTrial {
    pub fn new(config: WcstConfig, seed: u64) -> WcstTrial {
        let mut rng = rng_from_seed(seed);
        let schedule = schedule(&mut rng, config.difficulty);
        let mut trial = WcstTrial {
            config,
            seed,
            rng,
            schedule,
            block: 0,
            round_in_block: 0,
            streak: 0,
            r_neg: BTreeSet::new(),
            current: None,
            block_lengths: Vec::new(),
            turns_in_block: 0,
            records: Vec::new(),
            n_invalid: 0,
            turn_count: 0,
        };
        trial.current = Some(trial.deal_round());
        trial
    }

    /// The rule in force right now (environment-side; never shown to agents).
    pub fn active_rule(&self) -> WcstAttr {
        self.schedule[self.block.min(self.schedule.len() - 1)]
    }

    pub fn current_round(&self) -> Option<&Round> {
        self.current.as_ref()
    }

    pub fn blocks_completed(&self) -> usize {
        self.block_lengths.len()
    }

    pub fn turns_used(&self) -> usize {
        self.turn_count
    }

    pub fn is_done(&self) -> bool {
        self.block >= self.config.n_blocks || self.turn_count >= self.config.guess_cap
    }

    /// Deal the next round. The correct option matches the active rule (plus
    /// exactly one extra attribute on ambiguous rounds); the three distractors
    /// cover every non-active rule with single-attribute matches, except that
    /// the three-attribute variant replaces one with a match on nothing.
    fn deal_round(&mut self) -> Round {
        let pool = attr_pool(self.config.difficulty);
        let active = self.active_rule();
        let given = sample_card(&mut self.rng, self.config.difficulty);
        let others: Vec<WcstAttr> = pool.iter().copied().filter(|&a| a != active).collect();

        let ambiguous = match self.config.ambiguity {
            Ambiguity::Off => false,
            Ambiguity::First => self.round_in_block == 0,
            Ambiguity::Rest => self.round_in_block > 0,
        };
        let mut correct_set = BTreeSet::from([active]);
        if ambiguous {
            correct_set.insert(others[self.rng.gen_range(0..others.len())]);
        }

        let mut cards = vec![card_matching(&mut self.rng, &given, pool, &correct_set)];
        for &o in &others {
            cards.push(card_matching(&mut self.rng, &given, pool, &BTreeSet::from([o])));
        }
        if cards.len() < 4 {
            cards.push(card_matching(&mut self.rng, &given, pool, &BTreeSet::new()));
        }

        let mut order: Vec<usize> = (0..4).collect();
        order.shuffle(&mut self.rng);
        let mut options = [given; 4];
        for (slot, &src) in order.iter().enumerate() {
            options[slot] = cards[src];
        }
        Round { given, options }
    }

    /// Apply a parsed option choice (0-based). Returns whether it was correct.
    pub fn apply_choice(&mut self, choice: usize) -> bool {
        let round = self.current.take().expect("choice applied to an active round");
        self.turn_count += 1;
        self.turns_in_block += 1;
        let pool = attr_pool(self.config.difficulty);
        let active = self.active_rule();
        let matched = round.options[choice].matched_attrs(&round.given, pool);
        let correct = matched.contains(&active);
        self.records.push(TurnRecord {
            turn: self.records.len() + 1,
            block: self.block,
            given: round.given,
            options: round.options,
            choice,
            matched: matched.clone(),
            correct,
            r_neg_before: self.r_neg.clone(),
        });
        if correct {
            self.streak += 1;
            if self.streak == STREAK_TO_ADVANCE {
                self.block_lengths.push(self.turns_in_block);
                self.block += 1;
                self.turns_in_block = 0;
                self.round_in_block = 0;
                self.streak = 0;
                self.r_neg.clear();
            } else {
                self.round_in_block += 1;
            }
        } else {
            self.streak = 0;
            self.round_in_block += 1;
            self.r_neg.extend(matched.iter().copied());
        }
        if !self.is_done() {
            self.current = Some(self.deal_round());
        }
        correct
    }

    /// Unparseable answer: consumes a turn, the round stays on the table.
    pub fn record_invalid(&mut self) {
        self.turn_count += 1;
        self.n_invalid += 1;
    }

    pub fn score(&self) -> WcstScore {
        let n = self.config.n_blocks;
        // An empty sum would be IEEE -0.0; keep the zero-blocks score at +0.0.
        let s_wcst = if self.block_lengths.is_empty() {
            0.0
        } else {
            self.block_lengths
                .iter()
                .map(|&g| STREAK_TO_ADVANCE as f64 / g as f64)
                .sum::<f64>()
                / n as f64
        };

        let n_turns = self.records.len();
        let n_correct = self.records.iter().filter(|r| r.correct).count();
        let accuracy = if n_turns == 0 { 0.0 } else { n_correct as f64 / n_turns as f64 };

        // Perseveration: repeating a choice whose every matched attribute was
        // already disproved, among turns where anything was disproved at all.
        let mut pr_num = 0usize;
        let mut pr_den = 0usize;
        for r in &self.records {
            if r.r_neg_before.is_empty() {
                continue;
            }
            pr_den += 1;
            if !r.matched.is_empty() && r.matched.is_subset(&r.r_neg_before) {
                pr_num += 1;
            }
        }
        let perseverative_ratio =
            if pr_den == 0 { 0.0 } else { pr_num as f64 / pr_den as f64 };

        // Lapses after acquisition, pooled over blocks: once a block shows
        // ACQUISITION_STREAK consecutive corrects, later errors in that block
        // count as failures to maintain the rule.
        let mut by_block: BTreeMap<usize, Vec<bool>> = BTreeMap::new();
        for r in &self.records {
            by_block.entry(r.block).or_default().push(r.correct);
        }
        let mut post_turns = 0usize;
        let mut post_errors = 0usize;
        for seq in by_block.values() {
            let mut streak = 0usize;
            let mut acquired_at = None;
            for (i, &c) in seq.iter().enumerate() {
                if c {
                    streak += 1;
                    if streak == ACQUISITION_STREAK {
                        acquired_at = Some(i);
                        break;
                    }
                } else {
                    streak = 0;
                }
            }
            if let Some(i) = acquired_at {
                let post = &seq[i + 1..];
                post_turns += post.len();
                post_errors += post.iter().filter(|&&c| !c).count();
            }
        }
        let failure_to_maintain =
            if post_turns == 0 { 0.0 } else { post_errors as f64 / post_turns as f64 };

        WcstScore {
            s_wcst,
            accuracy,
            perseverative_ratio,
            failure_to_maintain,
            blocks_completed: self.block_lengths.len(),
            n_blocks: n,
            block_lengths: self.block_lengths.clone(),
            first_rule_trials: self.block_lengths.first().copied(),
            n_turns,
            n_invalid: self.n_invalid,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WcstScore {
    pub s_wcst: f64,
    pub accuracy: f64,
    pub perseverative_ratio: f64,
    pub failure_to_maintain: f64,
    pub blocks_completed: usize,
    pub n_blocks: usize,
    pub block_lengths: Vec<usize>,
    /// Parseable turns the first completed rule took; absent if none finished.
    pub first_rule_trials: Option<usize>,
    pub n_turns: usize,
    pub n_invalid: usize,
}

impl WcstScore {
    pub fn metrics(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::from([
            ("s_wcst".into(), self.s_wcst),
            ("accuracy".into(), self.accuracy),
            ("perseverative_ratio".into(), self.perseverative_ratio),
            ("failure_to_maintain".into(), self.failure_to_maintain),
            ("blocks_completed".into(), self.blocks_completed as f64),
            ("n_turns".into(), self.n_turns as f64),
            ("n_invalid".into(), self.n_invalid as f64),
        ]);
        if let Some(t) = self.first_rule_trials {
            m.insert("first_rule_trials".into(), t as f64);
        }
        m
    }
}
