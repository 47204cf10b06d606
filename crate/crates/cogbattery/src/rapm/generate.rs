//! Constructive generation of cell strings, grids and distractor options.

use rand::seq::SliceRandom;
use rand::Rng;

use super::attributes::sample_attribute_pair;
use super::chars::{full_alphabet, CharType};
use super::constraints::{
    cell_satisfies, class_positions, propagate_constraints, CellConstraints, Parity,
    MAX_FREE_LENGTH, MIN_FREE_LENGTH,
};
use super::{RapmError, RapmItem};
use crate::rng::{rng_from_seed, TaskRng};

/// String-construction attempts per cell before the grid is abandoned.
pub const CELL_RETRIES: usize = 64;
/// Full-grid rebuilds per attribute pair.
pub const ITEM_BACKTRACKS: usize = 16;
/// Attribute-pair draws per seed before the seed is rejected.
pub const ATTR_RESAMPLES: usize = 8;
/// Total candidate draws while assembling the seven distractors.
const DISTRACTOR_TRIES: usize = 600;

/// Positional distance between two strings: differing positions over the
/// shorter length plus the length difference.
pub fn generalized_hamming(a: &str, b: &str) -> usize {
    let ac: Vec<char> = a.chars().collect();
    let bc: Vec<char> = b.chars().collect();
    let short = ac.len().min(bc.len());
    let diffs = (0..short).filter(|&i| ac[i] != bc[i]).count();
    diffs + ac.len().abs_diff(bc.len())
}

#[derive(Clone, Copy, PartialEq)]
enum Role {
    Positional,
    Counted(CharType),
    Filler,
}

fn pick<T: Copy>(rng: &mut TaskRng, pool: &[T]) -> Option<T> {
    if pool.is_empty() {
        None
    } else {
        Some(pool[rng.gen_range(0..pool.len())])
    }
}

/// Concrete per-type character counts satisfying the record's count rules for
/// a string of `len` characters. Returns `(type, count)` pairs plus whether a
/// filler (non-counted) character pool exists.
fn choose_concrete_counts(
    rng: &mut TaskRng,
    c: &CellConstraints,
    len: usize,
    allowed: &[char],
) -> Option<(Vec<(CharType, usize)>, Vec<char>)> {
    let counted: Vec<CharType> = c
        .target_counts
        .keys()
        .chain(c.parity_rules.keys())
        .chain(c.multiple_rules.keys())
        .copied()
        .collect();
    let filler: Vec<char> = allowed
        .iter()
        .copied()
        .filter(|&ch| !counted.iter().any(|t| t.matches(ch)))
        .collect();

    let mut counts: Vec<(CharType, usize)> = Vec::new();
    let mut budget = len as i64;
    for (&t, &v) in &c.target_counts {
        counts.push((t, v));
        budget -= v as i64;
    }
    if budget < 0 {
        return None;
    }

    // Flexible rules (parity / multiple-of) pick a legal value inside the
    // remaining budget; with no filler characters the final pick must consume
    // the budget exactly.
    let flexible: Vec<(CharType, usize, usize)> = c
        .parity_rules
        .iter()
        .map(|(&t, &p)| match p {
            Parity::Even => (t, 2usize, 2usize),
            Parity::Odd => (t, 1, 2),
        })
        .chain(c.multiple_rules.iter().map(|(&t, &n)| (t, n as usize, n as usize)))
        .collect();
    for (idx, &(t, min_v, stride)) in flexible.iter().enumerate() {
        let others_min: i64 = flexible[idx + 1..].iter().map(|&(_, m, _)| m as i64).sum();
        let max_v = budget - others_min;
        if (min_v as i64) > max_v {
            return None;
        }
        let candidates: Vec<usize> =
            (min_v..=max_v as usize).step_by(stride).collect();
        let v = if filler.is_empty() && idx == flexible.len() - 1 {
            let need = budget as usize;
            if candidates.contains(&need) {
                need
            } else {
                return None;
            }
        } else {
            pick(rng, &candidates)?
        };
        counts.push((t, v));
        budget -= v as i64;
    }
    if filler.is_empty() && budget > 0 {
        return None;
    }
    Some((counts, filler))
}

/// One construction attempt for a string matching `c`. Returns a candidate
/// that usually — but not always — satisfies the record; callers validate.
fn attempt_cell(rng: &mut TaskRng, c: &CellConstraints) -> Option<String> {
    let min_len = c.min_required_len();
    let len = match c.fixed_length {
        Some(l) => l,
        None => {
            let lo = MIN_FREE_LENGTH.max(min_len);
            if lo > MAX_FREE_LENGTH {
                return None;
            }
            rng.gen_range(lo..=MAX_FREE_LENGTH)
        }
    };
    if min_len > len || len == 0 {
        return None;
    }
    let allowed: Vec<char> = match c.charset {
        Some(cs) => cs.chars(),
        None => full_alphabet().collect(),
    };

    let (mut counts, filler) = choose_concrete_counts(rng, c, len, &allowed)?;
    let mut slots: Vec<Option<(char, Role)>> = vec![None; len];

    // Positional slots first; their characters may be charged against a count.
    if let Some(p) = c.positional {
        let counted_types: Vec<CharType> = counts.iter().map(|&(t, _)| t).collect();
        let uncharged: Vec<char> = p
            .char_type
            .members()
            .into_iter()
            .filter(|&ch| allowed.contains(&ch) && !counted_types.iter().any(|t| t.matches(ch)))
            .collect();
        let charged: Vec<char> = p
            .char_type
            .members()
            .into_iter()
            .filter(|&ch| allowed.contains(&ch))
            .collect();
        for idx in class_positions(p.index_class, len) {
            let ch = if !uncharged.is_empty() {
                pick(rng, &uncharged)?
            } else {
                let ch = pick(rng, &charged)?;
                let (_, v) = counts
                    .iter_mut()
                    .find(|(t, _)| t.matches(ch))
                    .expect("charged positional char matches a counted type");
                if *v == 0 {
                    return None;
                }
                *v -= 1;
                ch
            };
            slots[idx] = Some((ch, Role::Positional));
        }
    }

    let mut free: Vec<usize> = (0..len).filter(|&i| slots[i].is_none()).collect();
    free.shuffle(rng);
    let remaining: usize = counts.iter().map(|&(_, v)| v).sum();
    if remaining > free.len() {
        return None;
    }
    for &(t, v) in &counts {
        let pool: Vec<char> =
            t.members().into_iter().filter(|ch| allowed.contains(ch)).collect();
        for _ in 0..v {
            let idx = free.pop().expect("slot budget checked above");
            slots[idx] = Some((pick(rng, &pool)?, Role::Counted(t)));
        }
    }
    for idx in free {
        slots[idx] = Some((pick(rng, &filler)?, Role::Filler));
    }
    let mut slots: Vec<(char, Role)> = slots.into_iter().map(|s| s.unwrap()).collect();

    if let Some(u) = c.unique_count {
        adjust_unique(rng, &mut slots, u, &filler, &allowed)?;
    }

    match c.ordering {
        Some(super::attributes::SortOrder::Ascending) => slots.sort_by_key(|&(ch, _)| ch),
        Some(super::attributes::SortOrder::Descending) => {
            slots.sort_by_key(|&(ch, _)| std::cmp::Reverse(ch))
        }
        Some(super::attributes::SortOrder::Mixed) => {
            let mut ok = false;
            for _ in 0..32 {
                slots.shuffle(rng);
                let chars: Vec<char> = slots.iter().map(|&(ch, _)| ch).collect();
                let asc = chars.windows(2).all(|w| w[0] <= w[1]);
                let desc = chars.windows(2).all(|w| w[0] >= w[1]);
                if !asc && !desc {
                    ok = true;
                    break;
                }
            }
            if !ok {
                return None;
            }
        }
        None => {}
    }

    Some(slots.into_iter().map(|(ch, _)| ch).collect())
}

/// Nudge the slot multiset until it has exactly `target` distinct characters,
/// editing only filler and counted slots so count rules stay intact.
fn adjust_unique(
    rng: &mut TaskRng,
    slots: &mut [(char, Role)],
    target: usize,
    filler: &[char],
    allowed: &[char],
) -> Option<()> {
    let counted_members = |t: CharType| -> Vec<char> {
        t.members().into_iter().filter(|ch| allowed.contains(ch)).collect()
    };
    for _ in 0..4 * slots.len() + 8 {
        let mut present: Vec<char> = slots.iter().map(|&(ch, _)| ch).collect();
        present.sort_unstable();
        present.dedup();
        let distinct = present.len();
        if distinct == target {
            return Some(());
        }
        let occurrences = |ch: char| slots.iter().filter(|&&(c2, _)| c2 == ch).count();
        let mut indices: Vec<usize> = (0..slots.len()).collect();
        indices.shuffle(rng);
        let mut moved = false;
        for i in indices {
            let (ch, role) = slots[i];
            let pool: Vec<char> = match role {
                Role::Filler => filler.to_vec(),
                Role::Counted(t) => counted_members(t),
                Role::Positional => continue,
            };
            if distinct < target {
                // Split a duplicated character into an unused one.
                if occurrences(ch) < 2 {
                    continue;
                }
                let fresh: Vec<char> =
                    pool.iter().copied().filter(|c2| !present.contains(c2)).collect();
                if let Some(new) = pick(rng, &fresh) {
                    slots[i].0 = new;
                    moved = true;
                    break;
                }
            } else {
                // Fold a singleton character onto an existing one.
                if occurrences(ch) != 1 {
                    continue;
                }
                let existing: Vec<char> = pool
                    .iter()
                    .copied()
                    .filter(|&c2| c2 != ch && present.contains(&c2))
                    .collect();
                if let Some(new) = pick(rng, &existing) {
                    slots[i].0 = new;
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            return None;
        }
    }
    None
}

/// Generate one string satisfying `c`, retrying construction up to the cell
/// budget. Returns `None` when the record resists construction.
pub fn generate_cell(rng: &mut TaskRng, c: &CellConstraints) -> Option<String> {
    for _ in 0..CELL_RETRIES {
        if let Some(s) = attempt_cell(rng, c) {
            if cell_satisfies(&s, c) {
                return Some(s);
            }
        }
    }
    None
}

/// Build all nine cells row-major; each cell must satisfy its record and keep
/// a distance of at least 2 from every earlier cell in its row and column.
fn build_grid(rng: &mut TaskRng, cons: &[[CellConstraints; 3]; 3]) -> Option<[[String; 3]; 3]> {
    let mut grid: [[String; 3]; 3] = Default::default();
    for i in 0..3 {
        for j in 0..3 {
            let mut found = None;
            'retry: for _ in 0..CELL_RETRIES {
                let Some(s) = attempt_cell(rng, &cons[i][j]) else { continue };
                if !cell_satisfies(&s, &cons[i][j]) {
                    continue;
                }
                for prev_j in 0..j {
                    if generalized_hamming(&s, &grid[i][prev_j]) < 2 {
                        continue 'retry;
                    }
                }
                for prev_i in 0..i {
                    if generalized_hamming(&s, &grid[prev_i][j]) < 2 {
                        continue 'retry;
                    }
                }
                found = Some(s);
                break;
            }
            grid[i][j] = found?;
        }
    }
    Some(grid)
}

/// Produce seven distinct strings near `answer` that all fail the record.
///
/// Candidates come from four mutation strategies — breaking the ordering with
/// an adjacent swap, violating a positional class, adjusting a counted or
/// structural quantity, and straight character mutation — and every candidate
/// is verified to fail `cell_satisfies` before being kept.
pub fn generate_distractors(
    rng: &mut TaskRng,
    answer: &str,
    c: &CellConstraints,
) -> Option<Vec<String>> {
    use super::attributes::SortOrder;
    let chars: Vec<char> = answer.chars().collect();
    let allowed: Vec<char> = match c.charset {
        Some(cs) => cs.chars(),
        None => full_alphabet().collect(),
    };
    let full: Vec<char> = full_alphabet().collect();
    let mut out: Vec<String> = Vec::new();

    for attempt in 0..DISTRACTOR_TRIES {
        if out.len() == 7 {
            break;
        }
        let candidate: Option<String> = match attempt % 4 {
            0 => c.ordering.and_then(|order| {
                if chars.len() < 2 {
                    return None;
                }
                match order {
                    SortOrder::Ascending | SortOrder::Descending => {
                        let swappable: Vec<usize> =
                            (0..chars.len() - 1).filter(|&i| chars[i] != chars[i + 1]).collect();
                        let i = pick(rng, &swappable)?;
                        let mut m = chars.clone();
                        m.swap(i, i + 1);
                        Some(m.into_iter().collect())
                    }
                    SortOrder::Mixed => {
                        let mut m = chars.clone();
                        m.sort_unstable();
                        Some(m.into_iter().collect())
                    }
                }
            }),
            1 => c.positional.and_then(|p| {
                let positions = class_positions(p.index_class, chars.len());
                let idx = pick(rng, &positions)?;
                let pool: Vec<char> =
                    full.iter().copied().filter(|&ch| !p.char_type.matches(ch)).collect();
                let mut m = chars.clone();
                m[idx] = pick(rng, &pool)?;
                Some(m.into_iter().collect())
            }),
            2 => {
                let counted: Vec<CharType> = c
                    .target_counts
                    .keys()
                    .chain(c.parity_rules.keys())
                    .chain(c.multiple_rules.keys())
                    .copied()
                    .collect();
                if let Some(t) = pick(rng, &counted) {
                    let pool: Vec<char> =
                        t.members().into_iter().filter(|ch| allowed.contains(ch)).collect();
                    let ch = pick(rng, &pool)?;
                    let mut m = chars.clone();
                    m.insert(rng.gen_range(0..=m.len()), ch);
                    Some(m.into_iter().collect())
                } else if c.fixed_length.is_some() && !chars.is_empty() {
                    // Duplicate an existing character next to itself so only
                    // the length clause breaks.
                    let i = rng.gen_range(0..chars.len());
                    let mut m = chars.clone();
                    m.insert(i, chars[i]);
                    Some(m.into_iter().collect())
                } else if c.unique_count.is_some() {
                    let fresh: Vec<char> =
                        allowed.iter().copied().filter(|ch| !chars.contains(ch)).collect();
                    let ch = pick(rng, &fresh)?;
                    let mut m = chars.clone();
                    m.insert(rng.gen_range(0..=m.len()), ch);
                    Some(m.into_iter().collect())
                } else {
                    None
                }
            }
            _ => {
                if chars.is_empty() {
                    None
                } else {
                    let pool = if rng.gen_bool(0.5) { &allowed } else { &full };
                    let i = rng.gen_range(0..chars.len());
                    let replacements: Vec<char> =
                        pool.iter().copied().filter(|&ch| ch != chars[i]).collect();
                    let mut m = chars.clone();
                    m[i] = pick(rng, &replacements)?;
                    Some(m.into_iter().collect())
                }
            }
        };
        if let Some(cand) = candidate {
            if cand != answer && !out.contains(&cand) && !cell_satisfies(&cand, c) {
                out.push(cand);
            }
        }
    }
    (out.len() == 7).then_some(out)
}

/// Generate a complete matrix item from a seed. Identical seeds produce
/// bit-identical items; seeds whose retry budgets run out are rejected.
pub fn generate_matrix(seed: u64) -> Result<RapmItem, RapmError> {
    let mut rng = rng_from_seed(seed);
    for _ in 0..ATTR_RESAMPLES {
        let (row, col) = sample_attribute_pair(&mut rng)?;
        let Ok(cons) = propagate_constraints(&row, &col) else { continue };
        for _ in 0..ITEM_BACKTRACKS {
            let Some(grid) = build_grid(&mut rng, &cons) else { continue };
            let answer = grid[2][2].clone();
            let Some(distractors) = generate_distractors(&mut rng, &answer, &cons[2][2]) else {
                continue;
            };
            let mut options: Vec<String> = distractors;
            options.push(answer.clone());
            options.shuffle(&mut rng);
            let correct_index = options.iter().position(|o| *o == answer).unwrap();
            return Ok(RapmItem {
                seed,
                row_attribute: row,
                col_attribute: col,
                grid,
                constraints: Box::new(cons),
                options,
                correct_index,
            });
        }
    }
    Err(RapmError::SeedRejected { seed })
}

/// Generate `count` items starting at `seed_base`, skipping rejected seeds.
/// Returns the items plus the seeds that were rejected along the way.
pub fn generate_items(seed_base: u64, count: usize) -> (Vec<RapmItem>, Vec<u64>) {
    let mut items = Vec::with_capacity(count);
    let mut rejected = Vec::new();
    let mut seed = seed_base;
    while items.len() < count {
        match generate_matrix(seed) {
            Ok(item) => items.push(item),
            Err(_) => rejected.push(seed),
        }
        seed = seed.wrapping_add(1);
    }
    (items, rejected)
}
