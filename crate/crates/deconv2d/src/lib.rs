//! Std companion: envelope cache, CSV output, experiments and the command-line tool.

pub mod cache;
pub mod cli;
pub mod config;
pub mod csvout;
pub mod error;
pub mod experiments;

pub use error::{AppError, AppResult};
