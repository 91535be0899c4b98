//! Command-line laboratory over `seplab-core`: argument parsing, JSON, CSV
//! and DOT output, cap overrides and a worker pool whose output never
//! depends on the number of workers.

pub mod caps;
pub mod cli;
pub mod cmd_comm;
pub mod cmd_extremal;
pub mod cmd_games;
pub mod dto;
pub mod par;
pub mod render;

pub use cli::{run, Outcome};
