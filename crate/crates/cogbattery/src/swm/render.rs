//! Textual feedback, note blocks and SVG stimuli for the box-search task.

use super::{Guess, SwmOutcome, SwmTrial, MIXED_COLOR, TOKEN_COLORS, TOKEN_LETTERS};

const CELL: u32 = 40;
const MARGIN: u32 = 10;

/// How a box is named in prose: its 1-based number, or its grid coordinate in
/// image modalities.
pub fn box_label(trial: &SwmTrial, box_id: usize) -> String {
    if trial.config.modality.uses_coordinates() {
        let (x, y) = trial.cells[box_id];
        format!("({x}, {y})")
    } else {
        format!("{}", box_id + 1)
    }
}

fn guess_label(guess: &Guess) -> String {
    match guess {
        Guess::Index(i) => format!("{i}"),
        Guess::Cell(x, y) => format!("({x}, {y})"),
    }
}

/// The result sentence for one opening attempt. Error classes are internal to
/// scoring: an illegal or repeated open reads the same as an empty one.
pub fn render_feedback(trial: &SwmTrial, outcome: &SwmOutcome) -> String {
    match outcome {
        SwmOutcome::Found { box_id, types } => {
            let label = box_label(trial, *box_id);
            if types.len() == 1 {
                format!("Found a {} token in box {label}!", TOKEN_COLORS[types[0]])
            } else {
                let colors: Vec<&str> = types.iter().map(|&t| TOKEN_COLORS[t]).collect();
                format!(
                    "Found a token with mixed colors ({}) in box {label}!",
                    colors.join(" and ")
                )
            }
        }
        SwmOutcome::Empty { box_id }
        | SwmOutcome::Illegal { box_id }
        | SwmOutcome::Repeated { box_id } => {
            format!("No tokens found in box {}.", box_label(trial, *box_id))
        }
        SwmOutcome::NoBox { guess } => format!("Box {} does not exist.", guess_label(guess)),
        SwmOutcome::Invalid => "Invalid answer format.".to_string(),
    }
}

/// The optional state notes: per token type the boxes the agent has found it
/// in, plus the boxes opened empty since the last regeneration. Current
/// hiding places are never disclosed.
pub fn render_notes(trial: &SwmTrial) -> String {
    let mut lines = Vec::new();
    for t in 0..trial.config.n_types {
        let mut line = format!("Boxes that has contained token {}: ", TOKEN_LETTERS[t]);
        for b in trial.found_boxes(t) {
            line.push_str(&format!("{}, ", box_label(trial, *b)));
        }
        lines.push(line.trim_end().to_string());
    }
    let mut line = String::from("Opened boxes: ");
    for b in trial.opened_empty() {
        line.push_str(&format!("{}, ", box_label(trial, *b)));
    }
    lines.push(line.trim_end().to_string());
    lines.join("\n")
}

/// SVG stimulus: one yellow rect per box on the fixed grid, plus a glyph on
/// the box named by the last outcome (token circle or empty cross).
pub fn render_svg(trial: &SwmTrial, last: Option<&SwmOutcome>) -> String {
    let w = super::GRID_W * CELL + 2 * MARGIN;
    let h = super::GRID_H * CELL + 2 * MARGIN;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    );
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"white\" stroke=\"none\"/>\n"
    ));
    for (i, &(x, y)) in trial.cells.iter().enumerate() {
        let px = MARGIN + x * CELL + 2;
        let py = MARGIN + y * CELL + 2;
        let side = CELL - 4;
        svg.push_str(&format!(
            "  <rect class=\"box\" data-box=\"{}\" data-x=\"{x}\" data-y=\"{y}\" x=\"{px}\" y=\"{py}\" width=\"{side}\" height=\"{side}\" fill=\"yellow\" stroke=\"black\" stroke-width=\"2\"/>\n",
            i + 1
        ));
    }
    if let Some(outcome) = last {
        let glyph_center = |b: usize| {
            let (x, y) = trial.cells[b];
            (MARGIN + x * CELL + CELL / 2, MARGIN + y * CELL + CELL / 2)
        };
        match outcome {
            SwmOutcome::Found { box_id, types } => {
                let (cx, cy) = glyph_center(*box_id);
                let (x, y) = trial.cells[*box_id];
                let fill = if types.len() == 1 { TOKEN_COLORS[types[0]] } else { MIXED_COLOR };
                let colors: Vec<&str> = types.iter().map(|&t| TOKEN_COLORS[t]).collect();
                svg.push_str(&format!(
                    "  <circle class=\"token\" data-result=\"found\" data-colors=\"{}\" data-x=\"{x}\" data-y=\"{y}\" cx=\"{cx}\" cy=\"{cy}\" r=\"{}\" fill=\"{fill}\"/>\n",
                    colors.join(" "),
                    CELL / 4
                ));
            }
            SwmOutcome::Empty { box_id }
            | SwmOutcome::Illegal { box_id }
            | SwmOutcome::Repeated { box_id } => {
                let (cx, cy) = glyph_center(*box_id);
                let (x, y) = trial.cells[*box_id];
                let d = CELL / 5;
                svg.push_str(&format!(
                    "  <g class=\"mark\" data-result=\"empty\" data-x=\"{x}\" data-y=\"{y}\">\n"
                ));
                svg.push_str(&format!(
                    "    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\" stroke-width=\"3\"/>\n",
                    cx - d, cy - d, cx + d, cy + d
                ));
                svg.push_str(&format!(
                    "    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\" stroke-width=\"3\"/>\n",
                    cx - d, cy + d, cx + d, cy - d
                ));
                svg.push_str("  </g>\n");
            }
            _ => {}
        }
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::swm::{Difficulty, Modality, SwmConfig, SwmTrial};

    fn trial(modality: Modality) -> SwmTrial {
        SwmTrial::new(SwmConfig::new(Difficulty::Hard, modality), 21)
    }

    #[test]
    fn feedback_strings_are_pinned() {
        let t = trial(Modality::Text);
        assert_eq!(
            render_feedback(&t, &SwmOutcome::Empty { box_id: 2 }),
            "No tokens found in box 3."
        );
        assert_eq!(
            render_feedback(&t, &SwmOutcome::Found { box_id: 4, types: vec![0] }),
            "Found a red token in box 5!"
        );
        assert_eq!(
            render_feedback(&t, &SwmOutcome::Found { box_id: 4, types: vec![0, 1] }),
            "Found a token with mixed colors (red and blue) in box 5!"
        );
        assert_eq!(
            render_feedback(&t, &SwmOutcome::NoBox { guess: Guess::Index(99) }),
            "Box 99 does not exist."
        );
    }

    #[test]
    fn coordinate_feedback_uses_cell_labels() {
        let t = trial(Modality::ImageText);
        let (x, y) = t.cells[0];
        assert_eq!(
            render_feedback(&t, &SwmOutcome::Empty { box_id: 0 }),
            format!("No tokens found in box ({x}, {y}).")
        );
    }

    #[test]
    fn notes_track_state_exactly() {
        let mut t = trial(Modality::Text);
        assert_eq!(
            render_notes(&t),
            "Boxes that has contained token A:\nBoxes that has contained token B:\nOpened boxes:"
        );
        // Open an empty box, then check it shows up.
        let empty = (0..12)
            .find(|&b| {
                let g = Guess::Index(b as i64 + 1);
                matches!(
                    t.clone().apply_guess(g),
                    SwmOutcome::Empty { .. }
                )
            })
            .unwrap();
        t.apply_guess(Guess::Index(empty as i64 + 1));
        let notes = render_notes(&t);
        assert!(notes.contains(&format!("Opened boxes: {},", empty + 1)), "{notes}");
    }

    #[test]
    fn svg_has_one_rect_per_box_plus_canvas() {
        let t = trial(Modality::Image);
        let svg = render_svg(&t, None);
        assert_eq!(svg.matches("class=\"box\"").count(), 12);
        let easy = SwmTrial::new(SwmConfig::new(Difficulty::Easy, Modality::Image), 3);
        assert_eq!(render_svg(&easy, None).matches("class=\"box\"").count(), 8);
        let found = SwmOutcome::Found { box_id: 1, types: vec![0, 1] };
        let svg_found = render_svg(&t, Some(&found));
        assert!(svg_found.contains("fill=\"purple\""));
        let (fx, fy) = t.cells[1];
        assert!(svg_found.contains(&format!(
            "data-result=\"found\" data-colors=\"red blue\" data-x=\"{fx}\" data-y=\"{fy}\""
        )));
        let empty = SwmOutcome::Empty { box_id: 2 };
        let (ex, ey) = t.cells[2];
        assert!(render_svg(&t, Some(&empty))
            .contains(&format!("data-result=\"empty\" data-x=\"{ex}\" data-y=\"{ey}\"")));
    }
}
