//! `generate`: emit a batch of matrix items as JSON records.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use cogbattery::rapm::{generate_items, validate_item, ItemRecord};

use super::{CommandResult, Failure};

pub fn run(count: usize, seed: u64, out: Option<&Path>) -> CommandResult {
    let (items, rejected) = generate_items(seed, count);
    for item in &items {
        validate_item(item)
            .map_err(|e| Failure::mismatch(anyhow::anyhow!("item seed {}: {e}", item.seed)))?;
    }
    let records: Vec<ItemRecord> = items.iter().map(|item| item.record()).collect();
    let mut text = serde_json::to_string_pretty(&records).map_err(Failure::config)?;
    text.push('\n');
    match out {
        Some(path) => {
            std::fs::write(path, text)
                .with_context(|| format!("writing {}", path.display()))
                .map_err(Failure::config)?;
        }
        None => {
            std::io::stdout().write_all(text.as_bytes()).map_err(Failure::config)?;
        }
    }
    eprintln!(
        "generated {} item(s) from base seed {seed} ({} seed(s) rejected)",
        items.len(),
        rejected.len()
    );
    Ok(())
}
