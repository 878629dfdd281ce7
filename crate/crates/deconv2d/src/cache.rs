//! Text cache of step envelopes, one file per kind.
//!
//! ```text
//! ENVCACHE v1 k1=5 kind=dxB monotone=1 tres=10 ures=10
//! 0 0.1 0.785...
//! ...
//! tail 3.1e-17
//! ```
//!
//! Floats are written in Rust's shortest round-trip form, so a load
//! reproduces the saved values bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use deconv2d_core::envelope::{build_envelopes, EnvelopeGridSpec, EnvelopeKind, EnvelopeSet, StepEnvelope};

use crate::error::{AppError, AppResult};

const MAGIC: &str = "ENVCACHE";
const VERSION: &str = "v1";

pub fn file_name(k1: u32, kind: EnvelopeKind, tres: u32, ures: u32) -> String {
    format!("k{k1:02}_t{tres}_u{ures}_{}.env", kind.name())
}

pub fn encode(env: &StepEnvelope) -> String {
    let mut s = format!(
        "{MAGIC} {VERSION} k1={} kind={} monotone={} tres={} ures={}\n",
        env.k1,
        env.kind.name(),
        u8::from(env.monotone),
        env.tres,
        env.ures
    );
    for (i, v) in env.values.iter().enumerate() {
        let _ = writeln!(s, "{:?} {:?} {:?}", env.edges[i], env.edges[i + 1], v);
    }
    let _ = writeln!(s, "tail {:?}", env.tail);
    s
}

fn header_field<'a>(tokens: &[&'a str], key: &str) -> Option<&'a str> {
    tokens.iter().find_map(|t| t.strip_prefix(key)?.strip_prefix('='))
}

pub fn decode(text: &str, path: &Path) -> AppResult<StepEnvelope> {
    let fmt_err = |line: usize, msg: &str| AppError::Format { path: path.to_path_buf(), line, msg: msg.to_string() };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| fmt_err(1, "empty file"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.first() != Some(&MAGIC) {
        return Err(fmt_err(1, "missing ENVCACHE header"));
    }
    if tokens.get(1) != Some(&VERSION) {
        return Err(AppError::VersionMismatch { path: path.to_path_buf(), found: tokens.get(1).unwrap_or(&"").to_string() });
    }
    let int = |key: &str| -> AppResult<u32> {
        header_field(&tokens, key).and_then(|v| v.parse().ok()).ok_or_else(|| fmt_err(1, &format!("bad or missing {key}")))
    };
    let k1 = int("k1")?;
    let tres = int("tres")?;
    let ures = int("ures")?;
    let monotone = int("monotone")? == 1;
    let kind = header_field(&tokens, "kind").and_then(EnvelopeKind::parse).ok_or_else(|| fmt_err(1, "bad or missing kind"))?;
    let mut edges = vec![];
    let mut values = vec![];
    let mut tail = None;
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            ["tail", v] => {
                tail = Some(v.parse::<f64>().map_err(|_| fmt_err(n, "bad tail value"))?);
            }
            [lo, hi, v] if tail.is_none() => {
                let p = |s: &str| s.parse::<f64>().map_err(|_| fmt_err(n, "bad number"));
                let (lo, hi, v) = (p(lo)?, p(hi)?, p(v)?);
                match edges.last() {
                    None => edges.push(lo),
                    Some(&last) if last == lo => {}
                    Some(_) => return Err(fmt_err(n, "bins are not contiguous")),
                }
                if !(hi > lo) {
                    return Err(fmt_err(n, "empty bin"));
                }
                edges.push(hi);
                values.push(v);
            }
            [] => {}
            _ => return Err(fmt_err(n, "unexpected line")),
        }
    }
    let tail = tail.ok_or_else(|| fmt_err(text.lines().count(), "missing tail line (truncated file?)"))?;
    if values.is_empty() {
        return Err(fmt_err(2, "no bins"));
    }
    Ok(StepEnvelope { kind, monotone, k1, tres, ures, edges, values, tail })
}

pub fn save_envelope(dir: &Path, env: &StepEnvelope) -> AppResult<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(file_name(env.k1, env.kind, env.tres, env.ures));
    fs::write(&path, encode(env))?;
    Ok(path)
}

pub fn load_envelope(path: &Path) -> AppResult<StepEnvelope> {
    let text = fs::read_to_string(path)?;
    decode(&text, path)
}

/// Writes all fourteen files of a set; returns their paths.
pub fn save_set(dir: &Path, set: &EnvelopeSet) -> AppResult<Vec<PathBuf>> {
    set.iter().map(|e| save_envelope(dir, e)).collect()
}

pub fn load_set(dir: &Path, spec: EnvelopeGridSpec) -> AppResult<EnvelopeSet> {
    let envs = EnvelopeKind::ALL
        .iter()
        .map(|&k| load_envelope(&dir.join(file_name(spec.k1, k, spec.tres, spec.ures))))
        .collect::<AppResult<Vec<_>>>()?;
    Ok(EnvelopeSet::from_envelopes(spec, envs)?)
}

/// Loads the set from `dir` if every file is present, otherwise builds and
/// saves it. Without a directory the set is just built.
pub fn load_or_build(dir: Option<&Path>, spec: EnvelopeGridSpec) -> AppResult<EnvelopeSet> {
    let Some(dir) = dir else {
        return Ok(build_envelopes(&spec)?);
    };
    let complete = EnvelopeKind::ALL.iter().all(|&k| dir.join(file_name(spec.k1, k, spec.tres, spec.ures)).is_file());
    if complete {
        return load_set(dir, spec);
    }
    let set = build_envelopes(&spec)?;
    save_set(dir, &set)?;
    Ok(set)
}
