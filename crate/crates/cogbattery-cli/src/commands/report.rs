//! `report`: aggregate per-session metrics into a CSV table, compare the
//! same metric across two runs with a paired t-test, or correlate two metric
//! columns within one run.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, Context};
use cogbattery::analysis::{aggregate, paired_t_test, pearson_r};

use crate::artifacts::{self, read_scores, ScoresFile};

use super::{CommandResult, Failure};

pub fn run(
    run_dir: &Path,
    out: Option<&Path>,
    compare: Option<&Path>,
    metric: Option<&str>,
    correlate: Option<&[String]>,
) -> CommandResult {
    if let Some(other) = compare {
        let metric =
            metric.ok_or_else(|| Failure::config(anyhow!("--compare requires --metric")))?;
        return compare_runs(run_dir, other, metric);
    }
    if let Some(pair) = correlate {
        return correlate_metrics(run_dir, &pair[0], &pair[1]);
    }
    write_table(run_dir, out)
}

/// One row per (group, metric): mean, population standard deviation, count.
fn write_table(run_dir: &Path, out: Option<&Path>) -> CommandResult {
    let scores = read_scores(run_dir).map_err(Failure::config)?;
    let mut columns: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    for entry in &scores.sessions {
        for (metric, value) in &entry.metrics {
            columns.entry((entry.group.clone(), metric.clone())).or_default().push(*value);
        }
    }

    let mut body = Vec::new();
    {
        let mut writer = csv::Writer::from_writer(&mut body);
        writer.write_record(["group", "metric", "mean", "std", "n"]).map_err(Failure::config)?;
        for ((group, metric), values) in &columns {
            let (mean, std) = aggregate(values).expect("columns are never empty");
            writer
                .write_record([
                    group.as_str(),
                    metric.as_str(),
                    &format!("{mean:.6}"),
                    &format!("{std:.6}"),
                    &values.len().to_string(),
                ])
                .map_err(Failure::config)?;
        }
        writer.flush().map_err(Failure::config)?;
    }

    let mut contents = format!(
        "# run_id: {}\n# master_seed: {}\n# plan_digest: {}\n",
        scores.run_id, scores.master_seed, scores.plan_digest
    )
    .into_bytes();
    contents.extend_from_slice(&body);
    let path = out.map(Path::to_path_buf).unwrap_or_else(|| run_dir.join(artifacts::REPORT_FILE));
    std::fs::write(&path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::config)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn metric_by_file(scores: &ScoresFile, metric: &str) -> BTreeMap<String, f64> {
    scores
        .sessions
        .iter()
        .filter_map(|s| s.metrics.get(metric).map(|v| (s.file.clone(), *v)))
        .collect()
}

/// Paired t-test over sessions present in both runs, matched by file name.
fn compare_runs(run_dir: &Path, other_dir: &Path, metric: &str) -> CommandResult {
    let left = read_scores(run_dir).map_err(Failure::config)?;
    let right = read_scores(other_dir).map_err(Failure::config)?;
    let right_vals = metric_by_file(&right, metric);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (file, value) in metric_by_file(&left, metric) {
        if let Some(other) = right_vals.get(&file) {
            a.push(value);
            b.push(*other);
        }
    }
    if a.is_empty() {
        return Err(Failure::config(anyhow!(
            "no sessions carry metric {metric} in both runs"
        )));
    }
    let result = paired_t_test(&a, &b).map_err(Failure::config)?;
    println!(
        "{}",
        serde_json::json!({
            "metric": metric,
            "n": a.len(),
            "t": round6(result.t),
            "df": result.df,
            "p": round6(result.p),
            "mean_diff": round6(result.mean_diff),
        })
    );
    Ok(())
}

/// Pearson correlation between two metrics across one run's sessions.
fn correlate_metrics(run_dir: &Path, metric_a: &str, metric_b: &str) -> CommandResult {
    let scores = read_scores(run_dir).map_err(Failure::config)?;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for entry in &scores.sessions {
        if let (Some(x), Some(y)) = (entry.metrics.get(metric_a), entry.metrics.get(metric_b)) {
            a.push(*x);
            b.push(*y);
        }
    }
    let result = pearson_r(&a, &b).map_err(Failure::config)?;
    println!(
        "{}",
        serde_json::json!({
            "metric_a": metric_a,
            "metric_b": metric_b,
            "n": result.n,
            "r": round6(result.r),
            "p": round6(result.p),
        })
    );
    Ok(())
}

fn round6(value: f64) -> f64 {
    (value * 1e6).round() / 1e6
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::artifacts::{write_json, SessionEntry};

    fn entry(file: &str, group: &str, metrics: &[(&str, f64)]) -> SessionEntry {
        SessionEntry {
            file: file.into(),
            group: group.into(),
            task: "swm".into(),
            agent: "oracle".into(),
            seed: 1,
            config_digest: "d".into(),
            turns: 3,
            score: serde_json::json!({}),
            metrics: metrics.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    fn scores_dir(entries: Vec<SessionEntry>) -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        let scores = ScoresFile {
            run_id: "t".into(),
            master_seed: 5,
            plan_digest: "abc".into(),
            sessions: entries,
            failures: vec![],
        };
        write_json(&dir.path().join(artifacts::SCORES_FILE), &scores).unwrap();
        dir
    }

    #[test]
    fn table_groups_metrics_and_embeds_run_metadata() {
        let dir = scores_dir(vec![
            entry("transcripts/000-swm.jsonl", "g1", &[("s_swm", 0.0)]),
            entry("transcripts/001-swm.jsonl", "g1", &[("s_swm", 0.0)]),
            entry("transcripts/002-swm.jsonl", "g1", &[("s_swm", 1.0)]),
        ]);
        write_table(dir.path(), None).unwrap();
        let text = std::fs::read_to_string(dir.path().join(artifacts::REPORT_FILE)).unwrap();
        assert!(text.starts_with("# run_id: t\n# master_seed: 5\n# plan_digest: abc\n"));
        assert!(text.contains("group,metric,mean,std,n"));
        assert!(text.contains("g1,s_swm,0.333333,0.471405,3"));
    }

    #[test]
    fn comparison_pairs_by_file_name() {
        let left = scores_dir(vec![
            entry("transcripts/000-swm.jsonl", "g", &[("s_swm", 0.9)]),
            entry("transcripts/001-swm.jsonl", "g", &[("s_swm", 0.8)]),
            entry("transcripts/002-swm.jsonl", "g", &[("s_swm", 0.7)]),
        ]);
        let right = scores_dir(vec![
            entry("transcripts/000-swm.jsonl", "g", &[("s_swm", 0.5)]),
            entry("transcripts/002-swm.jsonl", "g", &[("s_swm", 0.4)]),
        ]);
        // Pairing drops the file missing on the right; two pairs remain.
        compare_runs(left.path(), right.path(), "s_swm").unwrap();
        let missing = compare_runs(left.path(), right.path(), "absent");
        assert_eq!(missing.err().map(|f| f.code), Some(2));
    }
}
