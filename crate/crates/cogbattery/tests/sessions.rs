//! End-to-end session tests: oracles mastering each task through the public
//! environment builder, transcript structure, and tamper detection on replay.

use cogbattery::harness::agents::{Agent, RapmSolverAgent, ScriptedAgent, SwmSweeperAgent, WcstEliminatorAgent};
use cogbattery::harness::{
    build_env, read_transcript, run_session, verify_transcript, ReplayError, SessionSummary,
    TaskSpec, TranscriptLine,
};
use cogbattery::rapm::session::RapmFormat;
use cogbattery::rapm::generate_matrix;
use cogbattery::swm::SwmConfig;
use cogbattery::task::{Difficulty, Modality};
use cogbattery::wcst::Ambiguity;

fn record(spec: &TaskSpec, agent: &mut dyn Agent) -> (Vec<u8>, SessionSummary) {
    let mut env = build_env(spec).expect("environment builds");
    let mut buffer = Vec::new();
    let summary =
        run_session(env.as_mut(), agent, spec, Some(&mut buffer)).expect("session completes");
    (buffer, summary)
}

fn generable_seed(base: u64) -> u64 {
    (base..base + 1000).find(|&s| generate_matrix(s).is_ok()).expect("a seed generates")
}

#[test]
fn matrix_solver_is_correct_in_both_formats() {
    for format in [RapmFormat::MultipleChoice, RapmFormat::Generate] {
        let seed = generable_seed(100);
        let spec = TaskSpec::Rapm { seed, format, hint: false, cot: false, think_budget: 30_000 };
        let item = generate_matrix(seed).expect("seed generates");
        let mut agent = RapmSolverAgent::new(item, format);
        let (buffer, summary) = record(&spec, &mut agent);
        assert_eq!(summary.turns, 1);
        assert_eq!(summary.score["correct"], serde_json::json!(true), "{format:?}");
        let lines = read_transcript(buffer.as_slice()).expect("parses");
        verify_transcript(&lines).expect("replays");
    }
}

#[test]
fn sweeper_is_perfect_across_modalities() {
    for modality in [Modality::Text, Modality::Image, Modality::ImageText] {
        let spec = TaskSpec::Swm {
            seed: 77,
            difficulty: Difficulty::Hard,
            modality,
            notes: false,
            cot: false,
            think_budget: 4000,
        };
        let mut agent = SwmSweeperAgent::new(&SwmConfig::new(Difficulty::Hard, modality));
        let (buffer, summary) = record(&spec, &mut agent);
        assert_eq!(summary.metrics["s_swm"], 1.0, "{modality:?}");
        let lines = read_transcript(buffer.as_slice()).expect("parses");
        // Image modalities ship an SVG scene alongside (or instead of) text.
        let has_svg = lines.iter().any(|l| matches!(l, TranscriptLine::Turn { prompt, .. } if prompt.svg.is_some()));
        assert_eq!(has_svg, modality != Modality::Text, "{modality:?}");
        verify_transcript(&lines).expect("replays");
    }
}

#[test]
fn eliminator_completes_all_blocks_with_image_cards() {
    let spec = TaskSpec::Wcst {
        seed: 78,
        difficulty: Difficulty::Easy,
        modality: Modality::ImageText,
        ambiguity: Ambiguity::Off,
        notes: false,
        cot: false,
        think_budget: 4000,
    };
    let mut agent = WcstEliminatorAgent::new();
    let (buffer, summary) = record(&spec, &mut agent);
    assert_eq!(summary.metrics["blocks_completed"], 6.0);
    verify_transcript(&read_transcript(buffer.as_slice()).expect("parses")).expect("replays");
}

#[test]
fn transcripts_are_wellformed_jsonl() {
    let spec = TaskSpec::Swm {
        seed: 5,
        difficulty: Difficulty::Easy,
        modality: Modality::Text,
        notes: true,
        cot: true,
        think_budget: 4000,
    };
    let replies: Vec<String> = (0..70).map(|i| format!("<answer>{}</answer>", i % 8 + 1)).collect();
    let mut agent = ScriptedAgent::new("scripted", replies);
    let (buffer, summary) = record(&spec, &mut agent);

    let text = String::from_utf8(buffer.clone()).expect("utf-8");
    assert!(text.ends_with('\n'), "every line is newline-terminated");
    for line in text.lines() {
        let value: serde_json::Value = serde_json::from_str(line).expect("each line is JSON");
        assert!(value.get("kind").is_some(), "each line is tagged");
    }

    let lines = read_transcript(buffer.as_slice()).expect("parses");
    assert!(matches!(lines.first(), Some(TranscriptLine::Header { .. })));
    assert!(matches!(lines.last(), Some(TranscriptLine::Score { .. })));
    let turns: Vec<usize> = lines
        .iter()
        .filter_map(|l| match l {
            TranscriptLine::Turn { turn, .. } => Some(*turn),
            _ => None,
        })
        .collect();
    assert_eq!(turns, (1..=summary.turns).collect::<Vec<_>>(), "turns count up from one");
    assert_eq!(lines.len(), summary.turns + 2, "header + turns + score");
}

/// Records a short card-sorting session and returns its transcript bytes.
fn recorded_wcst() -> Vec<u8> {
    let spec = TaskSpec::Wcst {
        seed: 6,
        difficulty: Difficulty::Easy,
        modality: Modality::Text,
        ambiguity: Ambiguity::Off,
        notes: false,
        cot: false,
        think_budget: 4000,
    };
    let mut agent = WcstEliminatorAgent::new();
    record(&spec, &mut agent).0
}

/// Applies `edit` to the JSON value on line `index` and reassembles the
/// transcript bytes.
fn tamper(bytes: &[u8], index: usize, edit: impl FnOnce(&mut serde_json::Value)) -> Vec<u8> {
    let text = String::from_utf8(bytes.to_vec()).expect("utf-8");
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let mut value: serde_json::Value = serde_json::from_str(&lines[index]).expect("line is JSON");
    edit(&mut value);
    lines[index] = serde_json::to_string(&value).expect("serializes");
    let mut out = lines.join("\n");
    out.push('\n');
    out.into_bytes()
}

fn replay(bytes: &[u8]) -> Result<SessionSummary, ReplayError> {
    verify_transcript(&read_transcript(bytes)?)
}

#[test]
fn edited_answer_fails_replay() {
    let original = recorded_wcst();
    assert!(replay(&original).is_ok());

    // Flip the second turn's recorded reply to a different legal choice: the
    // re-parse no longer matches the recorded parse.
    let tampered = tamper(&original, 2, |line| {
        let raw = line["raw_answer"].as_str().expect("turn line").to_string();
        let flipped = if raw.contains('1') { raw.replace('1', "2") } else { raw.replace(|c: char| c.is_ascii_digit(), "1") };
        assert_ne!(raw, flipped, "tamper must change the reply");
        line["raw_answer"] = serde_json::json!(flipped);
    });
    match replay(&tampered) {
        Err(ReplayError::Mismatch(msg)) => assert!(msg.contains("parsed answer"), "{msg}"),
        other => panic!("tampered answer must be caught, got {other:?}"),
    }
}

#[test]
fn edited_score_fails_replay() {
    let original = recorded_wcst();
    let last = original.iter().filter(|&&b| b == b'\n').count() - 1;
    let tampered = tamper(&original, last, |line| {
        line["metrics"]["accuracy"] = serde_json::json!(1.0);
    });
    match replay(&tampered) {
        Err(ReplayError::Mismatch(msg)) => assert!(msg.contains("metrics"), "{msg}"),
        other => panic!("tampered metrics must be caught, got {other:?}"),
    }
}

#[test]
fn edited_task_config_fails_replay() {
    let original = recorded_wcst();
    // Claim the session used a different seed: the header digest no longer
    // matches the embedded task config.
    let tampered = tamper(&original, 0, |line| {
        line["task"]["seed"] = serde_json::json!(999);
    });
    match replay(&tampered) {
        Err(ReplayError::Mismatch(msg)) => assert!(msg.contains("digest"), "{msg}"),
        other => panic!("tampered header must be caught, got {other:?}"),
    }
}

#[test]
fn truncated_transcript_fails_replay() {
    let original = recorded_wcst();
    let text = String::from_utf8(original).expect("utf-8");
    let mut lines: Vec<&str> = text.lines().collect();
    lines.pop(); // drop the score line
    let mut truncated = lines.join("\n");
    truncated.push('\n');
    match replay(truncated.as_bytes()) {
        Err(ReplayError::Malformed(msg)) => assert!(msg.contains("score"), "{msg}"),
        other => panic!("truncation must be caught, got {other:?}"),
    }
}

#[test]
fn silent_agent_still_produces_a_scored_session() {
    let spec = TaskSpec::Swm {
        seed: 9,
        difficulty: Difficulty::Easy,
        modality: Modality::Text,
        notes: false,
        cot: false,
        think_budget: 4000,
    };
    let mut agent = ScriptedAgent::new("mute", Vec::<String>::new());
    let (buffer, summary) = record(&spec, &mut agent);
    // Every turn is an unparseable (empty) reply; the guess cap ends the
    // session with a zero token score rather than hanging.
    let config = SwmConfig::new(Difficulty::Easy, Modality::Text);
    assert_eq!(summary.turns, config.guess_cap);
    assert_eq!(summary.metrics["n_invalid"], config.guess_cap as f64);
    assert_eq!(summary.metrics["s_swm"], 0.0);
    verify_transcript(&read_transcript(buffer.as_slice()).expect("parses")).expect("replays");
}
