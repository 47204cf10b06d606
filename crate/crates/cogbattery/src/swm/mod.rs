//! Spatial working memory task: tokens hide in boxes, regenerate on discovery,
//! and never revisit a box they have already occupied.

pub mod render;
pub mod session;

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::{rng_from_seed, TaskRng};
use crate::task::{Difficulty, Modality};

/// Stimulus grid dimensions (cells), shared by both difficulties.
pub const GRID_W: u32 = 12;
pub const GRID_H: u32 = 8;

pub const TOKEN_COLORS: [&str; 2] = ["red", "blue"];
pub const TOKEN_LETTERS: [&str; 2] = ["A", "B"];
/// Color of a glyph standing for several token types at once.
pub const MIXED_COLOR: &str = "purple";

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SwmConfig {
    pub difficulty: Difficulty,
    pub modality: Modality,
    pub n_boxes: usize,
    pub n_types: usize,
    /// Total finds ending the trial (boxes x token types).
    pub total_tokens: usize,
    pub guess_cap: usize,
}

impl SwmConfig {
    pub fn new(difficulty: Difficulty, modality: Modality) -> SwmConfig {
        match difficulty {
            Difficulty::Easy => SwmConfig {
                difficulty,
                modality,
                n_boxes: 8,
                n_types: 1,
                total_tokens: 8,
                guess_cap: 64,
            },
            Difficulty::Hard => SwmConfig {
                difficulty,
                modality,
                n_boxes: 12,
                n_types: 2,
                total_tokens: 24,
                guess_cap: 144,
            },
        }
    }
}

/// A parsed box reference from the agent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Guess {
    /// 1-based box number (text modality).
    Index(i64),
    /// Grid coordinate (image modalities).
    Cell(u32, u32),
}

/// Classification of one opening attempt.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum SwmOutcome {
    /// Box held the listed token types; each regenerates elsewhere.
    Found { box_id: usize, types: Vec<usize> },
    Empty { box_id: usize },
    /// Box can never hold a token again this trial.
    Illegal { box_id: usize },
    /// Guess names no existing box.
    NoBox { guess: Guess },
    /// Box was already opened empty since the last regeneration.
    Repeated { box_id: usize },
    /// Unparseable answer; consumes a turn.
    Invalid,
}

#[derive(Clone, Debug)]
pub struct SwmTrial {
    pub config: SwmConfig,
    pub seed: u64,
    rng: TaskRng,
    /// Grid coordinate of each box (used by image modalities).
    pub cells: Vec<(u32, u32)>,
    /// Per type: every box that has contained it (including the current one).
    histories: Vec<BTreeSet<usize>>,
    /// Per type: boxes where the agent actually found it (safe to disclose).
    found_boxes: Vec<BTreeSet<usize>>,
    /// Per type: the box currently holding it, if any remain.
    active: Vec<Option<usize>>,
    found_counts: Vec<usize>,
    opened_empty_since_change: BTreeSet<usize>,
    pub outcomes: Vec<SwmOutcome>,
    turn_count: usize,
}

impl SwmTrial {
    pub fn new(config: SwmConfig, seed: u64) -> SwmTrial {
        let mut rng = rng_from_seed(seed);
        // Distinct grid cells for the boxes, sampled without replacement.
        let mut all: Vec<(u32, u32)> = (0..GRID_H)
            .flat_map(|y| (0..GRID_W).map(move |x| (x, y)))
            .collect();
        let mut cells = Vec::with_capacity(config.n_boxes);
        for _ in 0..config.n_boxes {
            let i = rng.gen_range(0..all.len());
            cells.push(all.swap_remove(i));
        }
        let mut histories = Vec::new();
        let mut active = Vec::new();
        for _ in 0..config.n_types {
            let b = rng.gen_range(0..config.n_boxes);
            histories.push(BTreeSet::from([b]));
            active.push(Some(b));
        }
        SwmTrial {
            config,
            seed,
            rng,
            cells,
            histories,
            found_boxes: vec![BTreeSet::new(); config.n_types],
            active,
            found_counts: vec![0; config.n_types],
            opened_empty_since_change: BTreeSet::new(),
            outcomes: Vec::new(),
            turn_count: 0,
        }
    }

    pub fn tokens_found(&self) -> usize {
        self.found_counts.iter().sum()
    }

    pub fn turns_used(&self) -> usize {
        self.turn_count
    }

    pub fn is_done(&self) -> bool {
        self.tokens_found() == self.config.total_tokens || self.turn_count >= self.config.guess_cap
    }

    /// Every box that has contained token `t` (includes its current box).
    pub fn history(&self, t: usize) -> &BTreeSet<usize> {
        &self.histories[t]
    }

    /// Boxes where the agent has found token `t`; never reveals the current
    /// hiding place, so notes can disclose it.
    pub fn found_boxes(&self, t: usize) -> &BTreeSet<usize> {
        &self.found_boxes[t]
    }

    /// Boxes opened and found empty since the last regeneration event.
    pub fn opened_empty(&self) -> &BTreeSet<usize> {
        &self.opened_empty_since_change
    }

    fn resolve(&self, guess: Guess) -> Option<usize> {
        match guess {
            Guess::Index(i) => {
                if i >= 1 && (i as usize) <= self.config.n_boxes {
                    Some(i as usize - 1)
                } else {
                    None
                }
            }
            Guess::Cell(x, y) => self.cells.iter().position(|&c| c == (x, y)),
        }
    }

    /// Whether box `b` can yield any token now or later this trial.
    fn box_exhausted(&self, b: usize) -> bool {
        for t in 0..self.config.n_types {
            if self.active[t] == Some(b) {
                return false; // holds a token right now
            }
            let alive = self.found_counts[t] < self.config.n_boxes;
            if alive && !self.histories[t].contains(&b) {
                return false; // may still receive this type
            }
        }
        true
    }

    /// Open a box. Precedence: nonexistent > illegal > repeated > found/empty.
    pub fn apply_guess(&mut self, guess: Guess) -> SwmOutcome {
        self.turn_count += 1;
        let outcome = match self.resolve(guess) {
            None => SwmOutcome::NoBox { guess },
            Some(b) if self.box_exhausted(b) => SwmOutcome::Illegal { box_id: b },
            Some(b) if self.opened_empty_since_change.contains(&b) => {
                SwmOutcome::Repeated { box_id: b }
            }
            Some(b) => {
                let types: Vec<usize> =
                    (0..self.config.n_types).filter(|&t| self.active[t] == Some(b)).collect();
                if types.is_empty() {
                    self.opened_empty_since_change.insert(b);
                    SwmOutcome::Empty { box_id: b }
                } else {
                    for &t in &types {
                        self.found_counts[t] += 1;
                        self.found_boxes[t].insert(b);
                        let eligible: Vec<usize> = (0..self.config.n_boxes)
                            .filter(|i| !self.histories[t].contains(i))
                            .collect();
                        self.active[t] = match eligible.as_slice() {
                            [] => None,
                            pool => {
                                let nb = pool[self.rng.gen_range(0..pool.len())];
                                self.histories[t].insert(nb);
                                Some(nb)
                            }
                        };
                    }
                    self.opened_empty_since_change.clear();
                    SwmOutcome::Found { box_id: b, types }
                }
            }
        };
        self.outcomes.push(outcome.clone());
        outcome
    }

    /// Record an unparseable answer; it consumes a turn toward the cap.
    pub fn record_invalid(&mut self) {
        self.turn_count += 1;
        self.outcomes.push(SwmOutcome::Invalid);
    }

    pub fn score(&self) -> SwmScore {
        let mut n_illegal = 0;
        let mut n_no_box = 0;
        let mut n_repeated = 0;
        let mut n_invalid = 0;
        for o in &self.outcomes {
            match o {
                SwmOutcome::Illegal { .. } => n_illegal += 1,
                SwmOutcome::NoBox { .. } => n_no_box += 1,
                SwmOutcome::Repeated { .. } => n_repeated += 1,
                SwmOutcome::Invalid => n_invalid += 1,
                _ => {}
            }
        }
        let n_valid = self.outcomes.len() - n_invalid;
        let n_err = n_illegal + n_no_box + n_repeated;
        let (token_score, error_score, s_swm) = score_from_counts(
            self.tokens_found(),
            self.config.total_tokens,
            n_err,
            n_valid,
        );
        SwmScore {
            s_swm,
            token_score,
            error_score,
            tokens_found: self.tokens_found(),
            total_tokens: self.config.total_tokens,
            n_err,
            n_valid,
            n_illegal,
            n_no_box,
            n_repeated,
            n_invalid,
            guesses: self.turn_count,
        }
    }
}

/// Core score formula: token completion ratio, error score over parseable
/// guesses (0 when there are none), and their product.
pub fn score_from_counts(
    tokens_found: usize,
    total_tokens: usize,
    n_err: usize,
    n_valid: usize,
) -> (f64, f64, f64) {
    let token_score = tokens_found as f64 / total_tokens as f64;
    let error_score =
        if n_valid == 0 { 0.0 } else { 1.0 - n_err as f64 / n_valid as f64 };
    (token_score, error_score, token_score * error_score)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwmScore {
    pub s_swm: f64,
    pub token_score: f64,
    pub error_score: f64,
    pub tokens_found: usize,
    pub total_tokens: usize,
    pub n_err: usize,
    pub n_valid: usize,
    pub n_illegal: usize,
    pub n_no_box: usize,
    pub n_repeated: usize,
    pub n_invalid: usize,
    pub guesses: usize,
}

impl SwmScore {
    pub fn metrics(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([
            ("s_swm".into(), self.s_swm),
            ("token_score".into(), self.token_score),
            ("error_score".into(), self.error_score),
            ("tokens_found".into(), self.tokens_found as f64),
            ("n_err".into(), self.n_err as f64),
            ("n_valid".into(), self.n_valid as f64),
            ("n_illegal".into(), self.n_illegal as f64),
            ("n_no_box".into(), self.n_no_box as f64),
            ("n_repeated".into(), self.n_repeated as f64),
            ("n_invalid".into(), self.n_invalid as f64),
            ("guesses".into(), self.guesses as f64),
        ])
    }
}
