//! `key = value` run configuration.
//!
//! One pair per line; `#` starts a comment; blank lines are ignored. Keys
//! are the long flag names of the chosen subcommand (`delta-min = 4.0`).
//! Flags given on the command line take precedence.

use std::path::Path;

use crate::error::{AppError, AppResult};

pub fn parse(text: &str) -> AppResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| AppError::Usage(format!("config line {}: expected key = value", i + 1)))?;
        let k = k.trim();
        if k.is_empty() || k.contains(char::is_whitespace) {
            return Err(AppError::Usage(format!("config line {}: bad key {k:?}", i + 1)));
        }
        out.push((k.trim_start_matches("--").to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn load(path: &Path) -> AppResult<Vec<(String, String)>> {
    parse(&std::fs::read_to_string(path)?)
}

/// Splices config pairs into `argv` right after the subcommand, so later
/// command-line occurrences override them.
pub fn splice(argv: &[String], pairs: &[(String, String)]) -> Vec<String> {
    let mut sub = None;
    let mut i = 1;
    while i < argv.len() {
        if argv[i] == "--config" {
            i += 2;
            continue;
        }
        if !argv[i].starts_with('-') {
            sub = Some(i);
            break;
        }
        i += 1;
    }
    let Some(sub) = sub else { return argv.to_vec() };
    let mut out: Vec<String> = argv[..=sub].to_vec();
    for (k, v) in pairs {
        out.push(format!("--{k}"));
        if !v.is_empty() {
            out.push(v.clone());
        }
    }
    out.extend_from_slice(&argv[sub + 1..]);
    out
}
