//! Row/column rule attributes for matrix items: sampling and compatibility.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::chars::{CharType, Charset};
use super::constraints::propagate_constraints;
use crate::rng::TaskRng;

/// Parity/divisibility rule applied to the count of a character type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountRule {
    Even,
    Odd,
    MultipleOf(u8),
}

/// Quantity a numeric rule constrains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Length,
    UniqueCount,
    TypeCount(CharType),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SortOrder {
    Ascending,
    Descending,
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexClass {
    First,
    Last,
    Even,
    Odd,
}

/// One sampled rule dimension, instantiated along a row or a column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AttributeSpec {
    Charset { charset: Charset },
    TypeCount { char_type: CharType, rule: CountRule },
    QuantConstant { metric: Metric, value: u8 },
    QuantProgression { metric: Metric, start: u8, step: u8 },
    SortedOrder { order: SortOrder },
    Positional { index_class: IndexClass, char_type: CharType },
}

/// Key identifying which scalar quantity an attribute pins down, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum MetricKey {
    Length,
    Unique,
    Count(CharType),
}

fn metric_key(metric: Metric) -> MetricKey {
    match metric {
        Metric::Length => MetricKey::Length,
        Metric::UniqueCount => MetricKey::Unique,
        Metric::TypeCount(t) => MetricKey::Count(t),
    }
}

impl AttributeSpec {
    fn count_metric_key(&self) -> Option<MetricKey> {
        match self {
            AttributeSpec::TypeCount { char_type, .. } => Some(MetricKey::Count(*char_type)),
            AttributeSpec::QuantConstant { metric, .. }
            | AttributeSpec::QuantProgression { metric, .. } => Some(metric_key(*metric)),
            _ => None,
        }
    }

    /// Character type this attribute forces to appear at least once, if any.
    fn required_type(&self) -> Option<CharType> {
        match self {
            AttributeSpec::TypeCount { char_type, .. } => Some(*char_type),
            AttributeSpec::QuantConstant { metric: Metric::TypeCount(t), .. } => Some(*t),
            AttributeSpec::QuantProgression { metric: Metric::TypeCount(t), .. } => Some(*t),
            AttributeSpec::Positional { char_type, .. } => Some(*char_type),
            _ => None,
        }
    }
}

fn sample_char_type(rng: &mut TaskRng) -> CharType {
    CharType::ALL[rng.gen_range(0..CharType::ALL.len())]
}

fn sample_metric(rng: &mut TaskRng) -> Metric {
    match rng.gen_range(0..3) {
        0 => Metric::Length,
        1 => Metric::UniqueCount,
        _ => Metric::TypeCount(sample_char_type(rng)),
    }
}

/// Draw one attribute uniformly over the six rule families.
pub fn sample_attribute(rng: &mut TaskRng) -> AttributeSpec {
    match rng.gen_range(0..6) {
        0 => AttributeSpec::Charset {
            charset: Charset::ALL[rng.gen_range(0..3)],
        },
        1 => AttributeSpec::TypeCount {
            char_type: sample_char_type(rng),
            rule: match rng.gen_range(0..5) {
                0 => CountRule::Even,
                1 => CountRule::Odd,
                n => CountRule::MultipleOf(n as u8), // 2, 3, 4
            },
        },
        2 => AttributeSpec::QuantConstant {
            metric: sample_metric(rng),
            value: rng.gen_range(2..=5),
        },
        3 => AttributeSpec::QuantProgression {
            metric: sample_metric(rng),
            start: rng.gen_range(1..=3),
            step: rng.gen_range(1..=3),
        },
        4 => AttributeSpec::SortedOrder {
            order: [SortOrder::Ascending, SortOrder::Descending, SortOrder::Mixed]
                [rng.gen_range(0..3)],
        },
        _ => AttributeSpec::Positional {
            index_class: [IndexClass::First, IndexClass::Last, IndexClass::Even, IndexClass::Odd]
                [rng.gen_range(0..4)],
            char_type: sample_char_type(rng),
        },
    }
}

/// Whether a row/column attribute pair can coexist on one grid.
///
/// Rejects pairs that are jointly unsatisfiable or that would destroy each
/// other during cell construction:
/// - sorting combined with positional rules (sorting relocates characters);
/// - two constraints on the same slot (charset, ordering, positional) or the
///   same scalar metric, unless they are the identical constraint;
/// - two count rules on overlapping character types;
/// - a charset that cannot supply a required character type;
/// - any pair whose merged per-cell records are unsatisfiable (dry-run
///   propagation over all nine cells).
pub fn check_compatibility(row: &AttributeSpec, col: &AttributeSpec) -> bool {
    use AttributeSpec::*;

    if matches!(
        (row, col),
        (SortedOrder { .. }, Positional { .. }) | (Positional { .. }, SortedOrder { .. })
    ) {
        return false;
    }

    // Single-slot fields: only the identical constraint merges.
    match (row, col) {
        (Charset { .. }, Charset { .. })
        | (SortedOrder { .. }, SortedOrder { .. })
        | (Positional { .. }, Positional { .. }) => {
            if row != col {
                return false;
            }
        }
        _ => {}
    }

    if let (Some(k1), Some(k2)) = (row.count_metric_key(), col.count_metric_key()) {
        if k1 == k2 {
            // A progression varies along its own axis but is constant along the
            // other, so even two identical progressions contradict each other.
            if row != col || matches!(row, QuantProgression { .. }) {
                return false;
            }
        } else if let (MetricKey::Count(t1), MetricKey::Count(t2)) = (k1, k2) {
            if t1.overlaps(t2) {
                return false;
            }
        }
    }

    // Length-1 cells cannot keep a pairwise string distance of 2 along the
    // perpendicular axis, so length progressions must start at 2.
    for attr in [row, col] {
        if let QuantProgression { metric: Metric::Length, start: 1, .. } = attr {
            return false;
        }
    }

    for (a, b) in [(row, col), (col, row)] {
        if let Charset { charset } = a {
            if let Some(t) = b.required_type() {
                if !t.intersects_charset(*charset) {
                    return false;
                }
            }
        }
    }

    propagate_constraints(row, col).is_ok()
}

/// Maximum candidate draws before sampling gives up; hitting it means the
/// compatibility table rejects nearly everything and is a configuration bug.
pub const MAX_PAIR_DRAWS: usize = 1024;

/// Draw attribute pairs until a compatible one appears.
pub fn sample_attribute_pair(
    rng: &mut TaskRng,
) -> Result<(AttributeSpec, AttributeSpec), super::RapmError> {
    for _ in 0..MAX_PAIR_DRAWS {
        let row = sample_attribute(rng);
        let col = sample_attribute(rng);
        if check_compatibility(&row, &col) {
            return Ok((row, col));
        }
    }
    Err(super::RapmError::PairSampling)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn identical_charsets_are_compatible() {
        let a = AttributeSpec::Charset { charset: Charset::Digits };
        assert!(check_compatibility(&a, &a.clone()));
        let b = AttributeSpec::Charset { charset: Charset::Letters };
        assert!(!check_compatibility(&a, &b));
    }

    #[test]
    fn sorting_rejects_positional() {
        let sort = AttributeSpec::SortedOrder { order: SortOrder::Ascending };
        let pos = AttributeSpec::Positional {
            index_class: IndexClass::First,
            char_type: CharType::Digit,
        };
        assert!(!check_compatibility(&sort, &pos));
        assert!(!check_compatibility(&pos, &sort));
    }

    #[test]
    fn charset_must_supply_required_types() {
        let digits = AttributeSpec::Charset { charset: Charset::Digits };
        let vowels = AttributeSpec::TypeCount {
            char_type: CharType::LowercaseVowel,
            rule: CountRule::Even,
        };
        assert!(!check_compatibility(&digits, &vowels));
        let count_digits = AttributeSpec::TypeCount {
            char_type: CharType::Digit,
            rule: CountRule::Even,
        };
        assert!(check_compatibility(&digits, &count_digits));
    }

    #[test]
    fn conflicting_constants_rejected() {
        let l4 = AttributeSpec::QuantConstant { metric: Metric::Length, value: 4 };
        let l5 = AttributeSpec::QuantConstant { metric: Metric::Length, value: 5 };
        assert!(check_compatibility(&l4, &l4.clone()));
        assert!(!check_compatibility(&l4, &l5));
    }

    #[test]
    fn progression_conflicts_with_same_metric() {
        let prog = AttributeSpec::QuantProgression { metric: Metric::Length, start: 3, step: 1 };
        let fixed = AttributeSpec::QuantConstant { metric: Metric::Length, value: 4 };
        assert!(!check_compatibility(&prog, &fixed));
        assert!(!check_compatibility(&prog, &prog.clone()));
    }

    #[test]
    fn overlapping_count_types_rejected() {
        let a = AttributeSpec::TypeCount { char_type: CharType::Vowel, rule: CountRule::Odd };
        let b = AttributeSpec::QuantConstant {
            metric: Metric::TypeCount(CharType::LowercaseVowel),
            value: 3,
        };
        assert!(!check_compatibility(&a, &b));
        let c = AttributeSpec::QuantConstant {
            metric: Metric::TypeCount(CharType::Digit),
            value: 3,
        };
        assert!(check_compatibility(&a, &c));
    }

    #[test]
    fn unsatisfiable_merged_lengths_rejected() {
        // Length fixed to 2 but four digits required.
        let short = AttributeSpec::QuantConstant { metric: Metric::Length, value: 2 };
        let four = AttributeSpec::TypeCount {
            char_type: CharType::Digit,
            rule: CountRule::MultipleOf(4),
        };
        assert!(!check_compatibility(&short, &four));
    }

    #[test]
    fn sampled_pairs_always_pass_the_table() {
        let mut rng = rng_from_seed(99);
        for _ in 0..1000 {
            let (row, col) = sample_attribute_pair(&mut rng).expect("sampling succeeds");
            assert!(check_compatibility(&row, &col));
        }
    }
}
