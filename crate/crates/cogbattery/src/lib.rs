//! Procedural cognitive-task battery: deterministic generators for three
//! reasoning tasks (string pattern matrices, spatial token search, rule-shift
//! card sorting), interactive environments with process-aware scoring, a
//! model-agnostic session harness with replayable transcripts, and the
//! statistics used to report results.

pub mod analysis;
pub mod harness;
pub mod rapm;
pub mod rng;
pub mod swm;
pub mod task;
pub mod wcst;

pub use harness::{build_env, run_session, TaskEnv, TaskSpec};
pub use task::{Difficulty, Modality};
