#![allow(dead_code)] // each integration target uses a different subset

//! Shared helpers for the integration suites.
//!
//! `naive_satisfies` restates the cell-rule semantics from scratch — explicit
//! membership strings, sorted-copy order checks — sharing no code with the
//! production validator, so the two can cross-check each other.

use std::collections::BTreeSet;

use cogbattery::rapm::{CellConstraints, CharType, Charset, IndexClass, Parity, SortOrder};
use cogbattery::wcst::{attr_pool, WcstAttr, WcstTrial};

const LOWER: &str = "abcdefghijklmnopqrstuvwxyz";
const UPPER: &str = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
const DIGITS: &str = "0123456789";
const SYMBOLS: &str = "!@#$%&*?]";
const VOWELS_LOWER: &str = "aeiou";
const VOWELS_UPPER: &str = "AEIOU";

fn is_type(t: CharType, c: char) -> bool {
    match t {
        CharType::LowercaseLetter | CharType::Lowercase => LOWER.contains(c),
        CharType::UppercaseLetter | CharType::Uppercase => UPPER.contains(c),
        CharType::Digit => DIGITS.contains(c),
        CharType::Symbol => SYMBOLS.contains(c),
        CharType::LowercaseVowel => VOWELS_LOWER.contains(c),
        CharType::UppercaseVowel => VOWELS_UPPER.contains(c),
        CharType::LowercaseConsonant => LOWER.contains(c) && !VOWELS_LOWER.contains(c),
        CharType::UppercaseConsonant => UPPER.contains(c) && !VOWELS_UPPER.contains(c),
        CharType::Vowel => VOWELS_LOWER.contains(c) || VOWELS_UPPER.contains(c),
        CharType::Consonant => {
            (LOWER.contains(c) || UPPER.contains(c))
                && !VOWELS_LOWER.contains(c)
                && !VOWELS_UPPER.contains(c)
        }
    }
}

fn in_charset(cs: Charset, c: char) -> bool {
    match cs {
        Charset::Letters => LOWER.contains(c) || UPPER.contains(c),
        Charset::Digits => DIGITS.contains(c),
        Charset::Symbols => SYMBOLS.contains(c),
    }
}

fn type_count(t: CharType, chars: &[char]) -> usize {
    chars.iter().filter(|&&c| is_type(t, c)).count()
}

/// Clause-by-clause evaluation of a cell record, written independently of the
/// production checker.
pub fn naive_satisfies(s: &str, c: &CellConstraints) -> bool {
    let chars: Vec<char> = s.chars().collect();
    if let Some(cs) = c.charset {
        if chars.iter().any(|&ch| !in_charset(cs, ch)) {
            return false;
        }
    }
    if let Some(len) = c.fixed_length {
        if chars.len() != len {
            return false;
        }
    }
    for (&t, &want) in &c.target_counts {
        if type_count(t, &chars) != want {
            return false;
        }
    }
    for (&t, &p) in &c.parity_rules {
        let n = type_count(t, &chars);
        let ok = match p {
            Parity::Even => n > 0 && n % 2 == 0,
            Parity::Odd => n % 2 == 1,
        };
        if !ok {
            return false;
        }
    }
    for (&t, &m) in &c.multiple_rules {
        let n = type_count(t, &chars);
        if n == 0 || n % m as usize != 0 {
            return false;
        }
    }
    if let Some(u) = c.unique_count {
        let distinct: BTreeSet<char> = chars.iter().copied().collect();
        if distinct.len() != u {
            return false;
        }
    }
    if let Some(order) = c.ordering {
        let mut sorted = chars.clone();
        sorted.sort_unstable();
        let ascending = sorted == chars;
        let reversed: Vec<char> = sorted.into_iter().rev().collect();
        let descending = reversed == chars;
        let ok = match order {
            SortOrder::Ascending => ascending,
            SortOrder::Descending => descending,
            SortOrder::Mixed => !ascending && !descending,
        };
        if !ok {
            return false;
        }
    }
    if let Some(rule) = c.positional {
        for (i, &ch) in chars.iter().enumerate() {
            let targeted = match rule.index_class {
                IndexClass::First => i == 0,
                IndexClass::Last => i + 1 == chars.len(),
                IndexClass::Even => i % 2 == 0,
                IndexClass::Odd => i % 2 == 1,
            };
            if targeted && !is_type(rule.char_type, ch) {
                return false;
            }
        }
    }
    true
}

/// Every string over `alphabet` of length 0..=max_len, shortest first.
pub fn strings_up_to(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut frontier = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(frontier.len() * alphabet.len());
        for prefix in &frontier {
            for &c in alphabet {
                let mut s = String::with_capacity(prefix.len() + 1);
                s.push_str(prefix);
                s.push(c);
                next.push(s);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Index of the option that matches the active rule of the current round.
pub fn wcst_correct_choice(trial: &WcstTrial) -> usize {
    let round = trial.current_round().expect("round dealt");
    let pool = attr_pool(trial.config.difficulty);
    let active = trial.active_rule();
    (0..4)
        .find(|&i| round.options[i].matched_attrs(&round.given, pool).contains(&active))
        .expect("one option matches the active rule")
}

/// Index of the option whose matched-attribute set equals `matched` exactly.
pub fn wcst_choice_matching(trial: &WcstTrial, matched: &BTreeSet<WcstAttr>) -> Option<usize> {
    let round = trial.current_round()?;
    let pool = attr_pool(trial.config.difficulty);
    (0..4).find(|&i| &round.options[i].matched_attrs(&round.given, pool) == matched)
}

/// Any option that does not match the active rule (an incorrect choice).
pub fn wcst_wrong_choice(trial: &WcstTrial) -> usize {
    let round = trial.current_round().expect("round dealt");
    let pool = attr_pool(trial.config.difficulty);
    let active = trial.active_rule();
    (0..4)
        .find(|&i| !round.options[i].matched_attrs(&round.given, pool).contains(&active))
        .expect("three options are incorrect")
}
