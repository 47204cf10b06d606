//! Settings shared by every task environment.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Difficulty {
    Easy,
    Hard,
}

/// How stimuli reach the agent: plain text, an image, or both.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Modality {
    Text,
    Image,
    ImageText,
}

impl Modality {
    /// Whether spatial answers are grid coordinates instead of box numbers.
    pub fn uses_coordinates(self) -> bool {
        !matches!(self, Modality::Text)
    }

    pub fn has_image(self) -> bool {
        !matches!(self, Modality::Text)
    }

    /// Image-only runs carry no textual result line; everything else does.
    pub fn has_result_text(self) -> bool {
        !matches!(self, Modality::Image)
    }
}
