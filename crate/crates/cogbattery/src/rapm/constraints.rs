//! Per-cell rule records: merging row/column attributes and checking strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::attributes::{AttributeSpec, CountRule, IndexClass, Metric, SortOrder};
use super::chars::{CharType, Charset};

/// Longest string the generator will produce when no rule pins the length.
pub const MAX_FREE_LENGTH: usize = 12;
/// Shortest string the generator will produce when no rule pins the length.
pub const MIN_FREE_LENGTH: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionalRule {
    pub index_class: IndexClass,
    pub char_type: CharType,
}

/// The machine-checkable rule record for one cell. A character type appears in
/// at most one of `target_counts` / `parity_rules` / `multiple_rules`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CellConstraints {
    pub charset: Option<Charset>,
    pub fixed_length: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub target_counts: BTreeMap<CharType, usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parity_rules: BTreeMap<CharType, Parity>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub multiple_rules: BTreeMap<CharType, u8>,
    pub unique_count: Option<usize>,
    pub ordering: Option<SortOrder>,
    pub positional: Option<PositionalRule>,
}

/// A merge produced two irreconcilable requirements for one cell.
#[derive(Debug, thiserror::Error, PartialEq)]
#[error("unsatisfiable cell constraints: {0}")]
pub struct MergeConflict(pub String);

fn conflict(msg: impl Into<String>) -> MergeConflict {
    MergeConflict(msg.into())
}

impl CellConstraints {
    fn counted_types(&self) -> impl Iterator<Item = CharType> + '_ {
        self.target_counts
            .keys()
            .chain(self.parity_rules.keys())
            .chain(self.multiple_rules.keys())
            .copied()
    }

    fn type_is_counted(&self, t: CharType) -> bool {
        self.target_counts.contains_key(&t)
            || self.parity_rules.contains_key(&t)
            || self.multiple_rules.contains_key(&t)
    }

    fn set_fixed_length(&mut self, len: usize) -> Result<(), MergeConflict> {
        match self.fixed_length {
            Some(l) if l != len => Err(conflict(format!("length {l} vs {len}"))),
            _ => {
                self.fixed_length = Some(len);
                Ok(())
            }
        }
    }

    fn set_target_count(&mut self, t: CharType, v: usize) -> Result<(), MergeConflict> {
        if self.parity_rules.contains_key(&t) || self.multiple_rules.contains_key(&t) {
            return Err(conflict(format!("{t:?} already has a count rule")));
        }
        match self.target_counts.get(&t) {
            Some(&old) if old != v => Err(conflict(format!("count({t:?}) {old} vs {v}"))),
            _ => {
                self.target_counts.insert(t, v);
                Ok(())
            }
        }
    }

    fn set_count_rule(&mut self, t: CharType, rule: CountRule) -> Result<(), MergeConflict> {
        if self.type_is_counted(t) {
            let same = match rule {
                CountRule::Even => self.parity_rules.get(&t) == Some(&Parity::Even),
                CountRule::Odd => self.parity_rules.get(&t) == Some(&Parity::Odd),
                CountRule::MultipleOf(n) => self.multiple_rules.get(&t) == Some(&n),
            };
            return if same { Ok(()) } else { Err(conflict(format!("{t:?} counted twice"))) };
        }
        match rule {
            CountRule::Even => self.parity_rules.insert(t, Parity::Even),
            CountRule::Odd => self.parity_rules.insert(t, Parity::Odd),
            CountRule::MultipleOf(n) => {
                self.multiple_rules.insert(t, n);
                None
            }
        };
        Ok(())
    }

    fn set_unique(&mut self, v: usize) -> Result<(), MergeConflict> {
        match self.unique_count {
            Some(u) if u != v => Err(conflict(format!("unique {u} vs {v}"))),
            _ => {
                self.unique_count = Some(v);
                Ok(())
            }
        }
    }

    fn apply_metric(&mut self, metric: Metric, value: usize) -> Result<(), MergeConflict> {
        match metric {
            Metric::Length => self.set_fixed_length(value),
            Metric::UniqueCount => self.set_unique(value),
            Metric::TypeCount(t) => self.set_target_count(t, value),
        }
    }

    /// Fold one attribute into this record. `k` is the cell's 0-based offset
    /// along the attribute's own axis (column index for a row attribute, row
    /// index for a column attribute); progressions advance with it.
    pub fn apply_attribute(&mut self, attr: &AttributeSpec, k: usize) -> Result<(), MergeConflict> {
        match attr {
            AttributeSpec::Charset { charset } => match self.charset {
                Some(cs) if cs != *charset => Err(conflict("charset clash")),
                _ => {
                    self.charset = Some(*charset);
                    Ok(())
                }
            },
            AttributeSpec::TypeCount { char_type, rule } => self.set_count_rule(*char_type, *rule),
            AttributeSpec::QuantConstant { metric, value } => {
                self.apply_metric(*metric, *value as usize)
            }
            AttributeSpec::QuantProgression { metric, start, step } => {
                self.apply_metric(*metric, *start as usize + k * *step as usize)
            }
            AttributeSpec::SortedOrder { order } => match self.ordering {
                Some(o) if o != *order => Err(conflict("ordering clash")),
                _ => {
                    self.ordering = Some(*order);
                    Ok(())
                }
            },
            AttributeSpec::Positional { index_class, char_type } => {
                let rule = PositionalRule { index_class: *index_class, char_type: *char_type };
                match self.positional {
                    Some(p) if p != rule => Err(conflict("positional clash")),
                    _ => {
                        self.positional = Some(rule);
                        Ok(())
                    }
                }
            }
        }
    }

    /// Materialize properties forced by the conjunction of the stored rules.
    ///
    /// When a charset confines every character to one type, an exact count on
    /// that type pins the length and vice versa; writing the implied fact into
    /// the record makes it visible to answer validation and distractor checks.
    pub fn infer_leaks(&mut self) -> Result<(), MergeConflict> {
        let Some(cs) = self.charset else { return Ok(()) };
        for t in CharType::ALL {
            if !t.covers_charset(cs) {
                continue;
            }
            if let Some(&v) = self.target_counts.get(&t) {
                self.set_fixed_length(v)?;
            } else if let Some(len) = self.fixed_length {
                if !self.type_is_counted(t) {
                    self.target_counts.insert(t, len);
                }
            }
        }
        Ok(())
    }

    /// Smallest number of characters any satisfying string must have.
    pub fn min_required_len(&self) -> usize {
        let mut total = 0usize;
        let counted: Vec<CharType> = self.counted_types().collect();
        let disjoint = counted
            .iter()
            .enumerate()
            .all(|(i, a)| counted.iter().skip(i + 1).all(|b| !a.overlaps(*b)));
        let mut max_single = 0usize;
        for t in &counted {
            let m = if let Some(&v) = self.target_counts.get(t) {
                v
            } else if let Some(p) = self.parity_rules.get(t) {
                match p {
                    Parity::Even => 2,
                    Parity::Odd => 1,
                }
            } else {
                self.multiple_rules[t] as usize
            };
            total += m;
            max_single = max_single.max(m);
        }
        let count_min = if disjoint { total } else { max_single };
        let mut min = count_min.max(self.unique_count.unwrap_or(0));
        if self.ordering == Some(SortOrder::Mixed) {
            min = min.max(3);
        }
        if self.positional.is_some() {
            min = min.max(1);
        }
        min
    }

    /// Longest string the generator may emit for this record.
    pub fn max_len(&self) -> usize {
        self.fixed_length.unwrap_or(MAX_FREE_LENGTH)
    }

    /// Cheap necessary satisfiability conditions; generation aborts early on
    /// records that cannot possibly produce a string.
    pub fn check_plausible(&self) -> Result<(), MergeConflict> {
        let max_len = self.max_len();
        if self.min_required_len() > max_len {
            return Err(conflict("minimum character demand exceeds length"));
        }
        if let Some(u) = self.unique_count {
            if u == 0 {
                return Err(conflict("unique count zero"));
            }
            let pool = match self.charset {
                Some(cs) => cs.chars().len(),
                None => 71,
            };
            if u > pool {
                return Err(conflict("unique count exceeds alphabet"));
            }
            if self.ordering == Some(SortOrder::Mixed) && u < 2 {
                return Err(conflict("mixed order needs two distinct characters"));
            }
        }
        if let Some(cs) = self.charset {
            for t in self.counted_types() {
                if !t.intersects_charset(cs) {
                    return Err(conflict("counted type outside charset"));
                }
            }
            if let Some(p) = self.positional {
                if !p.char_type.intersects_charset(cs) {
                    return Err(conflict("positional type outside charset"));
                }
            }
        }
        if let Some(len) = self.fixed_length {
            if len == 0 {
                return Err(conflict("zero length"));
            }
            if self.ordering == Some(SortOrder::Mixed) && len < 3 {
                return Err(conflict("mixed order needs length >= 3"));
            }
        }
        Ok(())
    }
}

/// Indices of `class` positions inside a string of `len` characters (0-based;
/// "even"/"odd" refer to the 0-based index, "first" is index 0).
pub fn class_positions(class: IndexClass, len: usize) -> Vec<usize> {
    match class {
        IndexClass::First => {
            if len > 0 {
                vec![0]
            } else {
                vec![]
            }
        }
        IndexClass::Last => {
            if len > 0 {
                vec![len - 1]
            } else {
                vec![]
            }
        }
        IndexClass::Even => (0..len).step_by(2).collect(),
        IndexClass::Odd => (1..len).step_by(2).collect(),
    }
}

fn is_sorted_ascending(chars: &[char]) -> bool {
    chars.windows(2).all(|w| w[0] <= w[1])
}

fn is_sorted_descending(chars: &[char]) -> bool {
    chars.windows(2).all(|w| w[0] >= w[1])
}

/// Whether `s` satisfies every clause of the record. Clauses are evaluated in
/// a fixed order: charset membership, fixed length, exact type counts, parity
/// rules (a zero count never satisfies a parity rule), multiple-of rules (zero
/// rejected likewise), unique-character count, ordering, positional classes.
pub fn cell_satisfies(s: &str, c: &CellConstraints) -> bool {
    let chars: Vec<char> = s.chars().collect();
    if let Some(cs) = c.charset {
        if !chars.iter().all(|&ch| cs.contains(ch)) {
            return false;
        }
    }
    if let Some(len) = c.fixed_length {
        if chars.len() != len {
            return false;
        }
    }
    for (&t, &v) in &c.target_counts {
        if t.count_in(s) != v {
            return false;
        }
    }
    for (&t, &p) in &c.parity_rules {
        let n = t.count_in(s);
        if n == 0 {
            return false;
        }
        match p {
            Parity::Even if n % 2 != 0 => return false,
            Parity::Odd if n % 2 != 1 => return false,
            _ => {}
        }
    }
    for (&t, &m) in &c.multiple_rules {
        let n = t.count_in(s);
        if n == 0 || n % m as usize != 0 {
            return false;
        }
    }
    if let Some(u) = c.unique_count {
        let mut distinct = chars.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != u {
            return false;
        }
    }
    if let Some(order) = c.ordering {
        let ok = match order {
            SortOrder::Ascending => is_sorted_ascending(&chars),
            SortOrder::Descending => is_sorted_descending(&chars),
            SortOrder::Mixed => !is_sorted_ascending(&chars) && !is_sorted_descending(&chars),
        };
        if !ok {
            return false;
        }
    }
    if let Some(p) = c.positional {
        for idx in class_positions(p.index_class, chars.len()) {
            if !p.char_type.matches(chars[idx]) {
                return false;
            }
        }
    }
    true
}

/// Instantiate the full 3x3 grid of merged cell records for an attribute pair.
///
/// Cell `(i, j)` receives the row attribute at offset `j` and the column
/// attribute at offset `i`; implied properties are then materialized and each
/// record is checked for plausibility.
pub fn propagate_constraints(
    row: &AttributeSpec,
    col: &AttributeSpec,
) -> Result<[[CellConstraints; 3]; 3], MergeConflict> {
    let mut grid: [[CellConstraints; 3]; 3] = Default::default();
    for (i, row_cells) in grid.iter_mut().enumerate() {
        for (j, cell) in row_cells.iter_mut().enumerate() {
            cell.apply_attribute(row, j)?;
            cell.apply_attribute(col, i)?;
            cell.infer_leaks()?;
            cell.check_plausible()?;
        }
    }
    Ok(grid)
}
