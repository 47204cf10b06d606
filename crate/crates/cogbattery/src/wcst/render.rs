//! Text and SVG rendering for the card sorting task.

use std::fmt::Write as _;

use super::{Round, WcstTrial, CARD_BACKGROUNDS, CARD_COLORS, NOTE_WINDOW};

const CARD_W: i32 = 100;
const CARD_H: i32 = 140;
const GAP: i32 = 20;
const MARGIN: i32 = 20;
/// Ten-point star outline, centered on the origin (13px outer radius).
const STAR: [(f64, f64); 10] = [
    (0.0, -13.0),
    (3.4, -4.7),
    (12.4, -4.0),
    (5.6, 1.8),
    (7.6, 10.5),
    (0.0, 5.9),
    (-7.6, 10.5),
    (-5.6, 1.8),
    (-12.4, -4.0),
    (-3.4, -4.7),
];

pub fn render_feedback(correct: bool) -> &'static str {
    if correct {
        "Correct!"
    } else {
        "Incorrect. Please try again."
    }
}

/// The deal as text: the given card, then the four numbered options.
pub fn render_round_text(round: &Round) -> String {
    let mut s = format!("Given: {}\nOptions:", round.given.describe());
    for (i, card) in round.options.iter().enumerate() {
        let _ = write!(s, "\n{}. {}", i + 1, card.describe());
    }
    s
}

/// Summary of the most recent parseable turns, newest first: which attributes
/// the chosen card matched and how the choice was judged.
pub fn render_notes(trial: &WcstTrial) -> String {
    let mut s = String::from("Recent notes:");
    for (k, r) in trial.records.iter().rev().take(NOTE_WINDOW).enumerate() {
        let attrs = if r.matched.is_empty() {
            "no attributes".to_string()
        } else {
            r.matched.iter().map(|a| a.phrase()).collect::<Vec<_>>().join(" and ")
        };
        let verdict = if r.correct { "Correct." } else { "Incorrect." };
        let _ = write!(s, "\n- Turn -{}: matching {attrs} -- {verdict}", k + 1);
    }
    s
}

fn symbol(out: &mut String, shape: u8, color: &str, cx: i32, cy: i32) {
    match shape {
        0 => {
            // triangle
            let _ = write!(
                out,
                r#"<polygon points="{},{} {},{} {},{}" fill="{color}"/>"#,
                cx,
                cy - 13,
                cx - 12,
                cy + 10,
                cx + 12,
                cy + 10
            );
        }
        1 => {
            let _ = write!(
                out,
                r#"<rect x="{}" y="{}" width="22" height="22" fill="{color}"/>"#,
                cx - 11,
                cy - 11
            );
        }
        2 => {
            let points = STAR
                .iter()
                .map(|(dx, dy)| format!("{:.1},{:.1}", cx as f64 + dx, cy as f64 + dy))
                .collect::<Vec<_>>()
                .join(" ");
            let _ = write!(out, r#"<polygon points="{points}" fill="{color}"/>"#);
        }
        _ => {
            let _ = write!(out, r#"<circle cx="{cx}" cy="{cy}" r="12" fill="{color}"/>"#);
        }
    }
}

/// Five-card panel: the given card on the left, then options 1-4.
pub fn render_svg(round: &Round) -> String {
    let width = 2 * MARGIN + 5 * CARD_W + 4 * GAP;
    let height = 2 * MARGIN + CARD_H + 30;
    let mut s = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" width="{width}" height="{height}">"#
    );
    let _ = write!(
        s,
        r#"<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>"#
    );
    let cards = std::iter::once((&round.given, None))
        .chain(round.options.iter().enumerate().map(|(i, c)| (c, Some(i + 1))));
    for (slot, (card, index)) in cards.enumerate() {
        let x = MARGIN + slot as i32 * (CARD_W + GAP);
        let y = MARGIN;
        match index {
            None => {
                let _ = write!(s, r#"<g class="card" data-role="given">"#);
            }
            Some(i) => {
                let _ = write!(s, r#"<g class="card" data-role="option" data-index="{i}">"#);
            }
        }
        let fill = card.background.map_or("white", |b| CARD_BACKGROUNDS[b as usize]);
        let _ = write!(
            s,
            r#"<rect x="{x}" y="{y}" width="{CARD_W}" height="{CARD_H}" rx="8" fill="{fill}" stroke="black" stroke-width="2"/>"#
        );
        let n = card.number as i32;
        let cx = x + CARD_W / 2;
        for k in 0..n {
            let cy = y + CARD_H / 2 + k * 30 - (n - 1) * 15;
            symbol(&mut s, card.shape, CARD_COLORS[card.color as usize], cx, cy);
        }
        let label = match index {
            None => "Given".to_string(),
            Some(i) => i.to_string(),
        };
        let _ = write!(
            s,
            r#"<text x="{cx}" y="{}" font-size="16" text-anchor="middle" fill="black">{label}</text>"#,
            y + CARD_H + 22
        );
        s.push_str("</g>");
    }
    s.push_str("</svg>");
    s
}
