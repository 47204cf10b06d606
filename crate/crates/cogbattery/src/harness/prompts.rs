//! Pinned prompt text for the three task environments. These strings are part
//! of the reproducibility contract: transcripts replay byte-for-byte, so any
//! change here is a breaking change to recorded runs.

use std::fmt::Write as _;

use crate::rapm::session::RapmFormat;
use crate::swm::SwmConfig;
use crate::task::Difficulty;

/// Instruction used whenever structured reasoning is disabled.
pub const ANSWER_ONLY_LINE: &str = "Answer only with your final answer.";

pub const WCST_IMAGE_LINE: &str = "Look at the image showing 5 cards. Match the 'Given' card to one of cards 1-4 based on the rule you need to figure out.";

pub const WCST_ANSWER_FORMAT: &str =
    "Your final answer should be a number between 1-4, wrapped with <answer> and </answer>";

/// System-prompt reasoning request shared by the interactive tasks.
fn interactive_cot_addition(think_budget: u32) -> String {
    format!(
        "Explain your thought process regarding the problem and the feedbacks you received in maximum {think_budget} tokens wrapped with <think> and </think>. Then, provide a really short summary of your reasoning after the closing </think> tag."
    )
}

/// Per-turn reasoning request for the box-search task.
pub fn swm_turn_reasoning_line(cot: bool, think_budget: u32) -> String {
    if cot {
        format!(
            "Answer concisely. Think step-by-step, utilizing information from previous feedbacks, and state your reasoning in maximum {think_budget} tokens, wrapped with <think> and </think>. Then, provide a really short summary of your reasoning after the closing </think> tag."
        )
    } else {
        ANSWER_ONLY_LINE.to_string()
    }
}

pub fn swm_system_prompt(config: &SwmConfig, cot: bool, think_budget: u32) -> String {
    let n = config.n_boxes;
    let t = config.n_types;
    let mut s = String::from("You will be performing the Spatial Working Memory task.\n");
    if config.modality.has_image() {
        let _ = writeln!(s, "You will be given an image containing {n} yellow boxes in a grid.");
    } else {
        let _ = writeln!(s, "You will be given {n} boxes, numbered 1-{n}.");
    }
    let _ = writeln!(s, "There are {t} types of tokens, hidden in any one of {n} boxes.");
    s.push_str("Each token type is represented by a distinct color.\n");
    let _ = writeln!(
        s,
        "Your goal is to find the {t} types of tokens {n} times each, by repeatedly selecting a box to open."
    );
    s.push_str("A box can contain multiple types of tokens, but only one token of each type.\n");
    s.push_str(
        "If the box contains multiple tokens, a token with mixed colors corresponding to the tokens will be shown.\n",
    );
    s.push_str("Once the token is found, another will be generated in another box.\n");
    s.push_str(
        "The token will be generated in a box that has never contained a token of that type before in the trial.\n",
    );
    s.push_str(
        "The token may be generated in a box that has been opened and found empty before, as long as it never contained that type of token previously.\n\n",
    );
    if config.modality.uses_coordinates() {
        s.push_str(
            "Your final answer should be a grid coordinate (x, y), the grid coordinate of the box you choose\n",
        );
    } else {
        let _ = writeln!(
            s,
            "Your final answer should be a number from 1-{n}, the index of the box you selected"
        );
    }
    if cot {
        s.push_str(&interactive_cot_addition(think_budget));
    } else {
        s.push_str(ANSWER_ONLY_LINE);
    }
    s
}

pub fn swm_question(config: &SwmConfig) -> String {
    format!("Which of the {} boxes would you like to open?", config.n_boxes)
}

pub fn swm_answer_format(config: &SwmConfig) -> &'static str {
    if config.modality.uses_coordinates() {
        "Your final answer should be a grid coordinate (x, y), wrapped with <answer> and </answer>"
    } else {
        "Your final answer should be a box number, wrapped with <answer> and </answer>"
    }
}

pub fn wcst_system_prompt(difficulty: Difficulty, cot: bool, think_budget: u32) -> String {
    let mut s = String::from(
        "You are performing the Wisconsin Card Sorting Test (WCST).\n\
        You will be shown a given card with a symbol on it, and you will have to match it to one of four option cards according to an attribute that you have to figure out.\n\
        The cards will be described by the following attributes:\n\
        1. Number of symbols\n\
        2. Color of symbols\n\
        3. Shape of symbols\n",
    );
    if matches!(difficulty, Difficulty::Hard) {
        s.push_str("4. Background color of the card\n");
    }
    s.push_str(
        "\nYou will be told \"Correct!\" if you are correct and \"Incorrect. Please try again.\" if you are incorrect.\n\
        If you are incorrect, you either made a mistake or the rule has changed.\n\
        If you believe you have made a mistake, correct it and try again.\n\
        If you believe the rule has changed, you have to figure out the correct rule to match the cards.\n\
        If you are correct, you have to stick with the same attribute until you are incorrect.\n\
        There is always a true answer in the task, and you have to keep performing the task until the end of the test.\n\
        Your final answer should be a number between 1-4 corresponding to the index of the card you think is the correct match.\n",
    );
    if cot {
        s.push_str(&interactive_cot_addition(think_budget));
    } else {
        s.push_str(ANSWER_ONLY_LINE);
    }
    s
}

pub fn rapm_system_prompt(format: RapmFormat, hint: bool, cot: bool, think_budget: u32) -> String {
    let mut s = String::from(
        "You are solving a TEXT-BASED 3x3 pattern matrix (Raven-style). Each cell contains a string; the bottom-right cell is missing ('?').\n\n\
        Goal: Infer the rule(s) acting across rows and columns.\n",
    );
    if hint {
        s.push_str(
            "Possible dimensions (one or more):\n\
            - Character set restriction (digits / letters / symbols)\n\
            - Quantitative constant (exact length / count / unique)\n\
            - Quantitative progression (arithmetic step across row/column)\n\
            - Parity / multiple rules (all even / all odd / multiples of N)\n\
            - Positional constraints (first/last/even/odd positions restricted)\n\
            - Ordering (ascending / descending / mixed)\n\
            - Layered combinations (e.g. constant + parity, progression + positional)\n",
        );
    }
    s.push('\n');
    match format {
        RapmFormat::MultipleChoice => s.push_str(
            "You will be given 8 answer options (1-8). Select the single option that correctly fills the missing cell while satisfying ALL inferred row and column constraints.\n\
            Respond with <answer>NUMBER</answer> using just the chosen option number.\n",
        ),
        RapmFormat::Generate => s.push_str(
            "You must GENERATE the exact missing cell string that satisfies ALL inferred row and column constraints.\n\
            Respond with <answer>STRING</answer> containing only the candidate string (no quotes or extra text).\n",
        ),
    }
    if cot {
        let _ = write!(
            s,
            "Explain your thought process (max {think_budget} tokens) inside <think>...</think> then give final answer."
        );
    } else {
        s.push_str(ANSWER_ONLY_LINE);
    }
    s
}
