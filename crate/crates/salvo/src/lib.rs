//! Scenario files, trajectory export and the `salvo` command line on top of
//! [`salvo_core`].

pub mod commands;
pub mod error;
pub mod export;
pub mod overrides;
pub mod scenario_file;
pub mod trajectory;

pub use error::{AppError, Result};
