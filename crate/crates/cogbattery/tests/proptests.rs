//! Property tests for the invariants the scoring and generation code must
//! hold for *every* input, not just the fixtures.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use cogbattery::analysis::{aggregate, paired_t_test, pearson_r};
use cogbattery::harness::parse::{parse_answer, AnswerKind, ParsedAnswer};
use cogbattery::rapm::{
    cell_satisfies, generalized_hamming, generate_matrix, propagate_constraints,
    sample_attribute_pair, validate_item, CellConstraints,
};
use cogbattery::rng::rng_from_seed;
use cogbattery::swm::{Guess, SwmConfig, SwmTrial};
use cogbattery::task::{Difficulty, Modality};
use cogbattery::wcst::{attr_pool, Ambiguity, WcstConfig, WcstTrial};

/// Characters the cell validator can see: the full generation alphabet plus
/// a few that no charset contains.
const PROBE_CHARS: &[char] = &[
    'a', 'e', 'k', 'z', 'A', 'E', 'K', 'Z', 'u', 'U', '0', '5', '9', '!', '?', ']', '%', ' ',
    '<', 'é',
];

fn probe_string() -> impl Strategy<Value = String> {
    proptest::collection::vec(proptest::sample::select(PROBE_CHARS.to_vec()), 0..8)
        .prop_map(|chars| chars.into_iter().collect())
}

/// Nine merged cell records from one seeded attribute pair.
fn sampled_records(seed: u64) -> Option<Vec<CellConstraints>> {
    let mut rng = rng_from_seed(seed);
    let (row, col) = sample_attribute_pair(&mut rng).ok()?;
    let grid = propagate_constraints(&row, &col).ok()?;
    Some(grid.into_iter().flatten().collect())
}

proptest! {
    /// The production validator and the independently written clause checker
    /// agree on arbitrary strings for arbitrary sampled constraint records.
    #[test]
    fn validator_agrees_with_naive_checker(seed in any::<u64>(), cell in 0usize..9, s in probe_string()) {
        prop_assume!(sampled_records(seed).is_some());
        let records = sampled_records(seed).unwrap();
        let record = &records[cell];
        prop_assert_eq!(
            cell_satisfies(&s, record),
            common::naive_satisfies(&s, record),
            "disagree on {:?} for {:?}", s, record
        );
    }

    /// Positionwise distance treats a missing position as a mismatch, which
    /// makes it a metric: symmetric, zero only on equality, triangular.
    #[test]
    fn positionwise_distance_is_a_metric(a in probe_string(), b in probe_string(), c in probe_string()) {
        prop_assert_eq!(generalized_hamming(&a, &a), 0);
        prop_assert_eq!(generalized_hamming(&a, &b), generalized_hamming(&b, &a));
        if a != b {
            prop_assert!(generalized_hamming(&a, &b) > 0);
        }
        let ab = generalized_hamming(&a, &b);
        let bc = generalized_hamming(&b, &c);
        let ac = generalized_hamming(&a, &c);
        prop_assert!(ac <= ab + bc, "triangle violated: {} > {} + {}", ac, ab, bc);
        let (la, lb) = (a.chars().count(), b.chars().count());
        prop_assert!(ab >= la.abs_diff(lb));
        prop_assert!(ab <= la.max(lb));
    }

    /// Answer extraction is total: any reply parses to *something*, and a
    /// well-formed trailing tag parses to exactly its payload.
    #[test]
    fn answer_parsing_is_total(raw in ".*", v in -3i64..20, x in 0u32..30, y in 0u32..30) {
        for kind in [AnswerKind::Int { min: 1, max: 10 }, AnswerKind::Coord, AnswerKind::Text] {
            let _ = parse_answer(&raw, kind);
        }

        let reply = format!("{raw}<answer>{v}</answer>");
        let expected = if (1..=10).contains(&v) { ParsedAnswer::Int(v) } else { ParsedAnswer::Invalid };
        prop_assert_eq!(parse_answer(&reply, AnswerKind::Int { min: 1, max: 10 }), expected);

        let reply = format!("{raw}<answer>({x}, {y})</answer>");
        prop_assert_eq!(parse_answer(&reply, AnswerKind::Coord), ParsedAnswer::Coord(x, y));
    }

    /// The last well-formed tag pair wins, regardless of what precedes it.
    #[test]
    fn last_answer_tag_wins(prefix in ".*", first in 1i64..10, second in 1i64..10) {
        let reply = format!("{prefix}<answer>{first}</answer> no wait <answer>{second}</answer>");
        prop_assert_eq!(
            parse_answer(&reply, AnswerKind::Int { min: 1, max: 10 }),
            ParsedAnswer::Int(second)
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Every deal in a card-sorting trial offers exactly one option that
    /// matches the active rule, and feedback equals choosing that option.
    #[test]
    fn card_deals_have_one_correct_option(
        seed in any::<u64>(),
        hard in any::<bool>(),
        ambiguous in any::<bool>(),
        choices in proptest::collection::vec(0usize..4, 100),
    ) {
        let difficulty = if hard { Difficulty::Hard } else { Difficulty::Easy };
        let ambiguity = if ambiguous { Ambiguity::First } else { Ambiguity::Off };
        let config = WcstConfig::new(difficulty, Modality::Text, ambiguity);
        let pool = attr_pool(difficulty);
        let mut trial = WcstTrial::new(config, seed);
        let mut i = 0usize;
        while !trial.is_done() {
            let round = trial.current_round().expect("active trial deals a round");
            let active = trial.active_rule();
            let holders: Vec<usize> = (0..4)
                .filter(|&k| round.options[k].matched_attrs(&round.given, pool).contains(&active))
                .collect();
            prop_assert_eq!(holders.len(), 1, "deal must have one correct option");
            let choice = choices[i % choices.len()];
            let correct = trial.apply_choice(choice);
            prop_assert_eq!(correct, choice == holders[0]);
            i += 1;
        }
        prop_assert!(trial.turns_used() <= config.guess_cap);

        let score = trial.score();
        prop_assert!(score.blocks_completed <= config.n_blocks);
        prop_assert!(score.block_lengths.iter().all(|&g| g >= 5));
        for v in [score.accuracy, score.perseverative_ratio, score.failure_to_maintain] {
            prop_assert!((0.0..=1.0).contains(&v), "score component {} out of range", v);
        }
        prop_assert!(score.s_wcst >= 0.0 && score.s_wcst <= 1.0);
    }

    /// Spatial-search bookkeeping partitions guesses no matter how the agent
    /// behaves: valid + invalid = all, and each error has exactly one class.
    #[test]
    fn token_search_counts_partition(
        seed in any::<u64>(),
        hard in any::<bool>(),
        guesses in proptest::collection::vec(-2i64..30, 1..160),
    ) {
        let difficulty = if hard { Difficulty::Hard } else { Difficulty::Easy };
        let config = SwmConfig::new(difficulty, Modality::Text);
        let mut trial = SwmTrial::new(config, seed);
        for (i, &g) in guesses.iter().enumerate() {
            if trial.is_done() {
                break;
            }
            if i % 7 == 3 {
                trial.record_invalid();
            } else {
                trial.apply_guess(Guess::Index(g));
            }
        }
        let score = trial.score();
        prop_assert_eq!(score.guesses, score.n_valid + score.n_invalid);
        prop_assert_eq!(score.n_err, score.n_illegal + score.n_no_box + score.n_repeated);
        prop_assert!(score.n_err <= score.n_valid);
        prop_assert!(score.tokens_found <= score.total_tokens);
        prop_assert!(trial.turns_used() <= config.guess_cap);
        prop_assert_eq!(score.s_swm, score.token_score * score.error_score);
        prop_assert!((0.0..=1.0).contains(&score.s_swm));
        prop_assert_eq!(
            score.s_swm == 1.0,
            score.tokens_found == score.total_tokens && score.n_err == 0
        );
    }

    /// Token count is conserved: however the trial is played, the number of
    /// tokens found never exceeds the schedule and reaches it only when the
    /// trial reports completion through a full sweep.
    #[test]
    fn token_search_finds_each_token_once(seed in any::<u64>(), hard in any::<bool>()) {
        let difficulty = if hard { Difficulty::Hard } else { Difficulty::Easy };
        let config = SwmConfig::new(difficulty, Modality::Text);
        let mut trial = SwmTrial::new(config, seed);
        // Open every box round-robin until done: a complete, legal sweep.
        let mut next = 0usize;
        while !trial.is_done() {
            trial.apply_guess(Guess::Index((next % config.n_boxes) as i64 + 1));
            next += 1;
        }
        let score = trial.score();
        prop_assert!(score.tokens_found <= score.total_tokens);
        prop_assert_eq!(score.total_tokens, config.total_tokens);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Matrix items that generate at all are structurally valid, and the
    /// same seed always regenerates the identical item.
    #[test]
    fn generated_items_validate_and_repeat(seed in 0u64..200_000) {
        prop_assume!(generate_matrix(seed).is_ok());
        let item = generate_matrix(seed).unwrap();
        prop_assert!(validate_item(&item).is_ok(), "seed {} invalid: {:?}", seed, validate_item(&item));
        prop_assert_eq!(&item, &generate_matrix(seed).unwrap());
        let distinct: BTreeSet<&String> = item.options.iter().collect();
        prop_assert_eq!(distinct.len(), item.options.len(), "options must be distinct");
        prop_assert!(item.correct_index < item.options.len());
    }
}

fn finite_vec(len: core::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1000.0f64..1000.0, len)
}

proptest! {
    /// Swapping the two columns of a paired comparison negates t exactly and
    /// leaves the two-sided p-value untouched.
    #[test]
    fn paired_t_is_antisymmetric(pairs in proptest::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 2..24)) {
        let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let forward = paired_t_test(&xs, &ys);
        let backward = paired_t_test(&ys, &xs);
        prop_assume!(forward.is_ok());
        let (f, b) = (forward.unwrap(), backward.unwrap());
        // Negating every difference negates the mean and leaves the variance
        // bit-for-bit identical, so this holds exactly, not approximately.
        prop_assert_eq!(f.t, -b.t);
        prop_assert_eq!(f.p, b.p);
        prop_assert_eq!(f.df, (pairs.len() - 1) as f64);
        prop_assert!((0.0..=1.0).contains(&f.p));
    }

    /// Mean and population spread do not depend on sample order.
    #[test]
    fn aggregation_is_order_free(values in finite_vec(1..24), rotation in 0usize..24) {
        let (mean, std) = aggregate(&values).unwrap();
        let mut rotated = values.clone();
        rotated.rotate_left(rotation % values.len());
        let (mean_r, std_r) = aggregate(&rotated).unwrap();
        prop_assert!((mean - mean_r).abs() <= 1e-9 * (1.0 + mean.abs()));
        prop_assert!((std - std_r).abs() <= 1e-9 * (1.0 + std.abs()));
        prop_assert!(std >= 0.0);
    }

    /// Correlation is invariant under positive affine maps of either column
    /// and flips sign when one column is negated.
    #[test]
    fn correlation_is_affine_invariant(
        pairs in proptest::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..24),
        scale in 0.5f64..8.0,
        shift in -50.0f64..50.0,
    ) {
        let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let base = pearson_r(&xs, &ys);
        prop_assume!(base.is_ok());
        let base = base.unwrap();
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&base.r));

        let mapped: Vec<f64> = xs.iter().map(|x| scale * x + shift).collect();
        let same = pearson_r(&mapped, &ys).unwrap();
        prop_assert!((same.r - base.r).abs() <= 1e-6, "affine map moved r: {} vs {}", same.r, base.r);

        let negated: Vec<f64> = xs.iter().map(|x| -x).collect();
        let flipped = pearson_r(&negated, &ys).unwrap();
        prop_assert!((flipped.r + base.r).abs() <= 1e-9);
    }
}
