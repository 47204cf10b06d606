//! Text-matrix reasoning task: 3x3 grids of strings governed by one row rule
//! and one column rule, with the bottom-right cell hidden.

pub mod attributes;
pub mod chars;
pub mod constraints;
pub mod generate;
pub mod session;

use serde::{Deserialize, Serialize};

pub use attributes::{
    check_compatibility, sample_attribute, sample_attribute_pair, AttributeSpec, CountRule,
    IndexClass, Metric, SortOrder,
};
pub use chars::{CharType, Charset};
pub use constraints::{cell_satisfies, propagate_constraints, CellConstraints, Parity, PositionalRule};
pub use generate::{
    generalized_hamming, generate_cell, generate_distractors, generate_items, generate_matrix,
};

#[derive(Debug, thiserror::Error)]
pub enum RapmError {
    #[error("could not sample a compatible attribute pair; compatibility table too restrictive")]
    PairSampling,
    #[error("seed {seed} rejected: retry budgets exhausted")]
    SeedRejected { seed: u64 },
}

/// A fully generated matrix item. `grid[2][2]` holds the answer; it is hidden
/// when the item is serialized or rendered.
#[derive(Clone, Debug, PartialEq)]
pub struct RapmItem {
    pub seed: u64,
    pub row_attribute: AttributeSpec,
    pub col_attribute: AttributeSpec,
    pub grid: [[String; 3]; 3],
    pub constraints: Box<[[CellConstraints; 3]; 3]>,
    pub options: Vec<String>,
    pub correct_index: usize,
}

/// Serialized form of an item: one JSON line, answer cell nulled out.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ItemRecord {
    pub seed: u64,
    pub row_attribute: AttributeSpec,
    pub col_attribute: AttributeSpec,
    pub grid: Vec<Vec<Option<String>>>,
    pub constraints: Vec<Vec<CellConstraints>>,
    pub options: Vec<String>,
    pub correct_index: usize,
}

impl RapmItem {
    pub fn answer(&self) -> &str {
        &self.grid[2][2]
    }

    pub fn record(&self) -> ItemRecord {
        let grid = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| {
                        if (i, j) == (2, 2) {
                            None
                        } else {
                            Some(self.grid[i][j].clone())
                        }
                    })
                    .collect()
            })
            .collect();
        ItemRecord {
            seed: self.seed,
            row_attribute: self.row_attribute.clone(),
            col_attribute: self.col_attribute.clone(),
            grid,
            constraints: self.constraints.iter().map(|r| r.to_vec()).collect(),
            options: self.options.clone(),
            correct_index: self.correct_index,
        }
    }

    pub fn from_record(rec: ItemRecord) -> Result<RapmItem, ItemInvalid> {
        if rec.options.len() != 8 || rec.correct_index >= 8 {
            return Err(ItemInvalid("record needs 8 options and a valid index".into()));
        }
        if rec.grid.len() != 3
            || rec.grid.iter().any(|r| r.len() != 3)
            || rec.constraints.len() != 3
            || rec.constraints.iter().any(|r| r.len() != 3)
        {
            return Err(ItemInvalid("grid and constraints must be 3x3".into()));
        }
        let mut grid: [[String; 3]; 3] = Default::default();
        for i in 0..3 {
            for j in 0..3 {
                grid[i][j] = match (&rec.grid[i][j], (i, j)) {
                    (None, (2, 2)) => rec.options[rec.correct_index].clone(),
                    (Some(s), _) => s.clone(),
                    (None, _) => return Err(ItemInvalid(format!("cell ({i},{j}) missing"))),
                };
            }
        }
        let mut constraints: Box<[[CellConstraints; 3]; 3]> = Default::default();
        for i in 0..3 {
            for j in 0..3 {
                constraints[i][j] = rec.constraints[i][j].clone();
            }
        }
        Ok(RapmItem {
            seed: rec.seed,
            row_attribute: rec.row_attribute,
            col_attribute: rec.col_attribute,
            grid,
            constraints,
            options: rec.options,
            correct_index: rec.correct_index,
        })
    }

    /// The 3x3 matrix as shown to an agent, with the hidden cell as `?`.
    pub fn render_grid(&self) -> String {
        let mut out = String::from("Matrix:\n");
        for i in 0..3 {
            let cells: Vec<String> = (0..3)
                .map(|j| {
                    if (i, j) == (2, 2) {
                        "?".to_string()
                    } else {
                        format!("\"{}\"", self.grid[i][j])
                    }
                })
                .collect();
            out.push_str(&format!("Row {}: {}\n", i + 1, cells.join(" | ")));
        }
        out
    }

    /// The numbered option list for the multiple-choice format.
    pub fn render_options(&self) -> String {
        let mut out = String::from("Options:\n");
        for (i, opt) in self.options.iter().enumerate() {
            out.push_str(&format!("{}. \"{}\"\n", i + 1, opt));
        }
        out
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("invalid item: {0}")]
pub struct ItemInvalid(pub String);

/// Structural validation of a generated or deserialized item:
/// every cell satisfies its own record, exactly one option satisfies the
/// hidden cell's record, and cells keep pairwise distance >= 2 within every
/// row and column.
pub fn validate_item(item: &RapmItem) -> Result<(), ItemInvalid> {
    if item.options.len() != 8 {
        return Err(ItemInvalid(format!("{} options, want 8", item.options.len())));
    }
    if item.correct_index >= 8 {
        return Err(ItemInvalid("correct_index out of range".into()));
    }
    if item.options[item.correct_index] != item.grid[2][2] {
        return Err(ItemInvalid("correct option does not equal the answer cell".into()));
    }
    let mut distinct = item.options.clone();
    distinct.sort();
    distinct.dedup();
    if distinct.len() != 8 {
        return Err(ItemInvalid("options are not pairwise distinct".into()));
    }
    for i in 0..3 {
        for j in 0..3 {
            if !cell_satisfies(&item.grid[i][j], &item.constraints[i][j]) {
                return Err(ItemInvalid(format!("cell ({i},{j}) violates its record")));
            }
        }
    }
    let satisfying = item
        .options
        .iter()
        .filter(|o| cell_satisfies(o, &item.constraints[2][2]))
        .count();
    if satisfying != 1 {
        return Err(ItemInvalid(format!("{satisfying} options satisfy the hidden record, want 1")));
    }
    for i in 0..3 {
        for a in 0..3 {
            for b in (a + 1)..3 {
                if generalized_hamming(&item.grid[i][a], &item.grid[i][b]) < 2 {
                    return Err(ItemInvalid(format!("row {i}: cells {a} and {b} too close")));
                }
                if generalized_hamming(&item.grid[a][i], &item.grid[b][i]) < 2 {
                    return Err(ItemInvalid(format!("col {i}: cells {a} and {b} too close")));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_roundtrip_hides_and_restores_the_answer() {
        let item = generate_matrix(42).unwrap();
        let line = serde_json::to_string(&item.record()).unwrap();
        let rec: ItemRecord = serde_json::from_str(&line).unwrap();
        assert!(rec.grid[2][2].is_none());
        let back = RapmItem::from_record(rec).unwrap();
        assert_eq!(back, item);
    }

    #[test]
    fn validate_rejects_tampered_options() {
        let mut item = generate_matrix(42).unwrap();
        validate_item(&item).unwrap();
        // Duplicate the answer into another slot: two satisfying options.
        let ans = item.grid[2][2].clone();
        let other = (item.correct_index + 1) % 8;
        item.options[other] = ans;
        assert!(validate_item(&item).is_err());
    }

    #[test]
    fn validate_rejects_close_cells() {
        let mut item = generate_matrix(42).unwrap();
        item.grid[0][1] = item.grid[0][0].clone();
        assert!(validate_item(&item).is_err());
    }

    #[test]
    fn grid_rendering_masks_the_answer() {
        let item = generate_matrix(42).unwrap();
        let text = item.render_grid();
        assert!(text.contains("Row 3:"));
        assert!(text.trim_end().ends_with('?'));
        assert!(!text.contains(item.answer()));
        let opts = item.render_options();
        assert!(opts.contains("1. \""));
        assert!(opts.contains("8. \""));
    }
}
