//! Channel file serialization.
//!
//! Channels are stored as UTF-8 JSON documents with a `format_version`
//! field (readers reject unknown major versions), a `kind` tag in
//! `{"single", "mac", "bc", "relay"}`, named alphabet sizes, the state law
//! as a flat row-major array whose axis order is documented in-file by
//! `state_axes`, and the transition law as nested arrays (nesting order in
//! `transition_axes`, innermost axis = output). The writer emits every
//! probability with 17 significant digits so that read-write round trips
//! are exact, and its output is byte-deterministic; reports reference
//! channels by the SHA-256 hash of this canonical form.

use crate::channel::{BcChannel, MacChannel, RelayChannel, StateChannel};
use crate::prob::JointTable;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

pub const FORMAT_VERSION: &str = "1.0";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
    #[error("unknown channel kind tag {tag:?}")]
    UnknownKind { tag: String },
    #[error("unsupported format major version {major} (supported: 1)")]
    UnsupportedVersion { major: u64 },
    #[error(transparent)]
    File(#[from] std::io::Error),
}

/// A channel of any supported kind, as stored on disk.
#[derive(Debug, Clone)]
pub enum Channel {
    Single(StateChannel),
    Mac(MacChannel),
    Bc(BcChannel),
    Relay(RelayChannel),
}

impl Channel {
    pub fn kind(&self) -> &'static str {
        match self {
            Channel::Single(_) => "single",
            Channel::Mac(_) => "mac",
            Channel::Bc(_) => "bc",
            Channel::Relay(_) => "relay",
        }
    }

    /// Invariant diagnostics of the wrapped channel.
    pub fn validate(&self) -> Vec<crate::channel::Diagnostic> {
        match self {
            Channel::Single(c) => c.validate(),
            Channel::Mac(m) => m.validate(),
            Channel::Bc(b) => b.validate(),
            Channel::Relay(r) => r.validate(),
        }
    }
}

// ---------------------------------------------------------------------------
// Canonical writer
// ---------------------------------------------------------------------------

fn push_f64(out: &mut String, v: f64) {
    // 17 significant decimal digits: enough to reproduce any f64 exactly.
    write!(out, "{v:.16e}").expect("formatting cannot fail");
}

fn push_flat(out: &mut String, values: &[f64]) {
    out.push('[');
    for (i, &v) in values.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        push_f64(out, v);
    }
    out.push(']');
}

/// Emits `values` as nested arrays with the given dimensions, innermost
/// dimension on one line.
fn push_nested(out: &mut String, dims: &[usize], values: &[f64], indent: usize) {
    if dims.len() == 1 {
        push_flat(out, values);
        return;
    }
    let chunk = values.len() / dims[0];
    out.push('[');
    for i in 0..dims[0] {
        if i > 0 {
            out.push(',');
        }
        out.push('\n');
        out.push_str(&" ".repeat(indent + 2));
        push_nested(out, &dims[1..], &values[i * chunk..(i + 1) * chunk], indent + 2);
    }
    out.push('\n');
    out.push_str(&" ".repeat(indent));
    out.push(']');
}

fn push_alphabets(out: &mut String, names: &[(&str, usize)]) {
    out.push_str("  \"alphabets\": {");
    for (i, (name, size)) in names.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write!(out, "\"{name}\": {size}").expect("formatting cannot fail");
    }
    out.push_str("},\n");
}

fn push_axis_names(out: &mut String, key: &str, names: &[&str]) {
    write!(out, "  \"{key}\": [").expect("formatting cannot fail");
    for (i, name) in names.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write!(out, "\"{name}\"").expect("formatting cannot fail");
    }
    out.push_str("],\n");
}

/// The canonical byte serialization of a channel; identical channels always
/// produce identical bytes.
pub fn canonical_bytes(ch: &Channel) -> Vec<u8> {
    let mut out = String::new();
    out.push_str("{\n");
    writeln!(out, "  \"format_version\": \"{FORMAT_VERSION}\",").unwrap();
    writeln!(out, "  \"kind\": \"{}\",", ch.kind()).unwrap();
    match ch {
        Channel::Single(c) => {
            push_alphabets(
                &mut out,
                &[
                    ("x", c.nx),
                    ("y", c.ny),
                    ("s", c.ns),
                    ("s_t", c.nst),
                    ("s_r", c.nsr),
                ],
            );
            push_axis_names(&mut out, "state_axes", &["s", "s_t", "s_r"]);
            out.push_str("  \"state_law\": ");
            push_flat(&mut out, c.state_law.mass());
            out.push_str(",\n");
            push_axis_names(&mut out, "transition_axes", &["x", "s", "y"]);
            out.push_str("  \"transition\": ");
            push_nested(&mut out, &[c.nx, c.ns, c.ny], c.transition_flat(), 2);
        }
        Channel::Mac(m) => {
            push_alphabets(
                &mut out,
                &[
                    ("x1", m.nx1),
                    ("x2", m.nx2),
                    ("y", m.ny),
                    ("s", m.ns),
                    ("s_t1", m.nst1),
                    ("s_t2", m.nst2),
                    ("s_r", m.nsr),
                ],
            );
            writeln!(
                out,
                "  \"tx_states_independent\": {},",
                m.tx_states_independent
            )
            .unwrap();
            push_axis_names(&mut out, "state_axes", &["s", "s_t1", "s_t2", "s_r"]);
            out.push_str("  \"state_law\": ");
            push_flat(&mut out, m.state_law.mass());
            out.push_str(",\n");
            push_axis_names(&mut out, "transition_axes", &["x1", "x2", "s", "y"]);
            out.push_str("  \"transition\": ");
            push_nested(
                &mut out,
                &[m.nx1, m.nx2, m.ns, m.ny],
                m.transition_flat(),
                2,
            );
        }
        Channel::Bc(b) => {
            push_alphabets(
                &mut out,
                &[
                    ("x", b.nx),
                    ("y1", b.ny1),
                    ("y2", b.ny2),
                    ("s_t", b.nst),
                    ("s_r1", b.nsr1),
                    ("s_r2", b.nsr2),
                ],
            );
            push_axis_names(&mut out, "state_axes", &["s_t", "s_r1", "s_r2"]);
            out.push_str("  \"state_law\": ");
            push_flat(&mut out, b.state_law.mass());
            out.push_str(",\n");
            push_axis_names(&mut out, "transition_axes", &["x", "s_t", "y1", "y2"]);
            out.push_str("  \"transition\": ");
            let mut values = Vec::with_capacity(b.nx * b.nst * b.ny1 * b.ny2);
            for x in 0..b.nx {
                for st in 0..b.nst {
                    values.extend_from_slice(b.transition_row(x, st));
                }
            }
            push_nested(&mut out, &[b.nx, b.nst, b.ny1, b.ny2], &values, 2);
        }
        Channel::Relay(r) => {
            push_alphabets(
                &mut out,
                &[
                    ("x_s", r.nxs),
                    ("x_r", r.nxr),
                    ("y_r", r.nyr),
                    ("y_d", r.nyd),
                    ("s", r.ns),
                    ("s_d", r.nsd),
                ],
            );
            push_axis_names(&mut out, "state_axes", &["s", "s_d"]);
            out.push_str("  \"state_law\": ");
            push_flat(&mut out, r.state_law.mass());
            out.push_str(",\n");
            push_axis_names(
                &mut out,
                "transition_axes",
                &["x_s", "x_r", "s", "s_d", "y_r", "y_d"],
            );
            out.push_str("  \"transition\": ");
            let mut values = Vec::with_capacity(r.nxs * r.nxr * r.ns * r.nsd * r.nyr * r.nyd);
            for xs in 0..r.nxs {
                for xr in 0..r.nxr {
                    for s in 0..r.ns {
                        for sd in 0..r.nsd {
                            values.extend_from_slice(r.transition_row(xs, xr, s, sd));
                        }
                    }
                }
            }
            push_nested(
                &mut out,
                &[r.nxs, r.nxr, r.ns, r.nsd, r.nyr, r.nyd],
                &values,
                2,
            );
        }
    }
    out.push_str("\n}\n");
    out.into_bytes()
}

/// SHA-256 of the canonical serialization, hex-encoded.
pub fn content_hash(ch: &Channel) -> String {
    let digest = Sha256::digest(canonical_bytes(ch));
    let mut hex = String::with_capacity(64);
    for b in digest {
        write!(hex, "{b:02x}").expect("formatting cannot fail");
    }
    hex
}

pub fn write_channel(ch: &Channel, path: impl AsRef<Path>) -> Result<(), IoError> {
    std::fs::write(path, canonical_bytes(ch))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Reader
// ---------------------------------------------------------------------------

use serde_json::Value;

fn get<'a>(obj: &'a Value, key: &str) -> Result<&'a Value, IoError> {
    obj.get(key).ok_or_else(|| IoError::Field {
        path: key.to_string(),
        message: "missing field".to_string(),
    })
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str, IoError> {
    v.as_str().ok_or_else(|| IoError::Field {
        path: path.to_string(),
        message: "expected a string".to_string(),
    })
}

fn as_usize(v: &Value, path: &str) -> Result<usize, IoError> {
    v.as_u64().map(|u| u as usize).ok_or_else(|| IoError::Field {
        path: path.to_string(),
        message: "expected a non-negative integer".to_string(),
    })
}

fn alphabet(obj: &Value, name: &str) -> Result<usize, IoError> {
    let alphabets = get(obj, "alphabets")?;
    let v = alphabets.get(name).ok_or_else(|| IoError::Field {
        path: format!("alphabets.{name}"),
        message: "missing field".to_string(),
    })?;
    let size = as_usize(v, &format!("alphabets.{name}"))?;
    if size == 0 {
        return Err(IoError::Field {
            path: format!("alphabets.{name}"),
            message: "alphabet size must be >= 1".to_string(),
        });
    }
    Ok(size)
}

fn flat_f64(v: &Value, expected: usize, path: &str) -> Result<Vec<f64>, IoError> {
    let arr = v.as_array().ok_or_else(|| IoError::Field {
        path: path.to_string(),
        message: "expected an array".to_string(),
    })?;
    if arr.len() != expected {
        return Err(IoError::Field {
            path: path.to_string(),
            message: format!("expected {expected} entries, found {}", arr.len()),
        });
    }
    arr.iter()
        .enumerate()
        .map(|(i, e)| {
            e.as_f64().ok_or_else(|| IoError::Field {
                path: format!("{path}[{i}]"),
                message: "expected a number".to_string(),
            })
        })
        .collect()
}

/// Reads nested transition arrays of the given dimensions into a flat
/// row-major vector, reporting the offending path on any extent mismatch.
fn nested_f64(v: &Value, dims: &[usize], path: &str, out: &mut Vec<f64>) -> Result<(), IoError> {
    let arr = v.as_array().ok_or_else(|| IoError::Field {
        path: path.to_string(),
        message: "expected an array".to_string(),
    })?;
    if arr.len() != dims[0] {
        return Err(IoError::Field {
            path: path.to_string(),
            message: format!("expected extent {}, found {}", dims[0], arr.len()),
        });
    }
    if dims.len() == 1 {
        for (i, e) in arr.iter().enumerate() {
            out.push(e.as_f64().ok_or_else(|| IoError::Field {
                path: format!("{path}[{i}]"),
                message: "expected a number".to_string(),
            })?);
        }
        return Ok(());
    }
    for (i, e) in arr.iter().enumerate() {
        nested_f64(e, &dims[1..], &format!("{path}[{i}]"), out)?;
    }
    Ok(())
}

fn check_axis_names(obj: &Value, key: &str, expected: &[&str]) -> Result<(), IoError> {
    let v = get(obj, key)?;
    let arr = v.as_array().ok_or_else(|| IoError::Field {
        path: key.to_string(),
        message: "expected an array of axis names".to_string(),
    })?;
    let got: Vec<&str> = arr.iter().filter_map(|e| e.as_str()).collect();
    if got != expected {
        return Err(IoError::Field {
            path: key.to_string(),
            message: format!("expected axis order {expected:?}, found {got:?}"),
        });
    }
    Ok(())
}

fn check_version(obj: &Value) -> Result<(), IoError> {
    let raw = as_str(get(obj, "format_version")?, "format_version")?;
    let major: u64 = raw
        .split('.')
        .next()
        .and_then(|m| m.parse().ok())
        .ok_or_else(|| IoError::Field {
            path: "format_version".to_string(),
            message: format!("cannot parse version {raw:?}"),
        })?;
    if major != 1 {
        return Err(IoError::UnsupportedVersion { major });
    }
    Ok(())
}

/// Parses a channel document. Structural problems (shape, types, version,
/// kind) are errors; probability-mass invariants are left to `validate` on
/// the returned channel.
pub fn read_channel_str(text: &str) -> Result<Channel, IoError> {
    let obj: Value = serde_json::from_str(text).map_err(|e| IoError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    check_version(&obj)?;
    let kind = as_str(get(&obj, "kind")?, "kind")?;
    match kind {
        "single" => {
            let (nx, ny) = (alphabet(&obj, "x")?, alphabet(&obj, "y")?);
            let (ns, nst, nsr) = (
                alphabet(&obj, "s")?,
                alphabet(&obj, "s_t")?,
                alphabet(&obj, "s_r")?,
            );
            check_axis_names(&obj, "state_axes", &["s", "s_t", "s_r"])?;
            check_axis_names(&obj, "transition_axes", &["x", "s", "y"])?;
            let law = flat_f64(get(&obj, "state_law")?, ns * nst * nsr, "state_law")?;
            let mut transition = Vec::with_capacity(nx * ns * ny);
            nested_f64(
                get(&obj, "transition")?,
                &[nx, ns, ny],
                "transition",
                &mut transition,
            )?;
            Ok(Channel::Single(StateChannel::from_raw_parts(
                nx,
                ny,
                ns,
                nst,
                nsr,
                JointTable::from_raw_unchecked(vec![ns, nst, nsr], law),
                transition,
            )))
        }
        "mac" => {
            let (nx1, nx2, ny) = (
                alphabet(&obj, "x1")?,
                alphabet(&obj, "x2")?,
                alphabet(&obj, "y")?,
            );
            let (ns, nst1, nst2, nsr) = (
                alphabet(&obj, "s")?,
                alphabet(&obj, "s_t1")?,
                alphabet(&obj, "s_t2")?,
                alphabet(&obj, "s_r")?,
            );
            let independent = get(&obj, "tx_states_independent")?
                .as_bool()
                .ok_or_else(|| IoError::Field {
                    path: "tx_states_independent".to_string(),
                    message: "expected a boolean".to_string(),
                })?;
            check_axis_names(&obj, "state_axes", &["s", "s_t1", "s_t2", "s_r"])?;
            check_axis_names(&obj, "transition_axes", &["x1", "x2", "s", "y"])?;
            let law = flat_f64(
                get(&obj, "state_law")?,
                ns * nst1 * nst2 * nsr,
                "state_law",
            )?;
            let mut transition = Vec::with_capacity(nx1 * nx2 * ns * ny);
            nested_f64(
                get(&obj, "transition")?,
                &[nx1, nx2, ns, ny],
                "transition",
                &mut transition,
            )?;
            Ok(Channel::Mac(MacChannel::from_raw_parts(
                nx1,
                nx2,
                ny,
                ns,
                nst1,
                nst2,
                nsr,
                JointTable::from_raw_unchecked(vec![ns, nst1, nst2, nsr], law),
                transition,
                independent,
            )))
        }
        "bc" => {
            let (nx, ny1, ny2) = (
                alphabet(&obj, "x")?,
                alphabet(&obj, "y1")?,
                alphabet(&obj, "y2")?,
            );
            let (nst, nsr1, nsr2) = (
                alphabet(&obj, "s_t")?,
                alphabet(&obj, "s_r1")?,
                alphabet(&obj, "s_r2")?,
            );
            check_axis_names(&obj, "state_axes", &["s_t", "s_r1", "s_r2"])?;
            check_axis_names(&obj, "transition_axes", &["x", "s_t", "y1", "y2"])?;
            let law = flat_f64(get(&obj, "state_law")?, nst * nsr1 * nsr2, "state_law")?;
            let mut transition = Vec::with_capacity(nx * nst * ny1 * ny2);
            nested_f64(
                get(&obj, "transition")?,
                &[nx, nst, ny1, ny2],
                "transition",
                &mut transition,
            )?;
            Ok(Channel::Bc(BcChannel::from_raw_parts(
                nx,
                ny1,
                ny2,
                nst,
                nsr1,
                nsr2,
                JointTable::from_raw_unchecked(vec![nst, nsr1, nsr2], law),
                transition,
            )))
        }
        "relay" => {
            let (nxs, nxr) = (alphabet(&obj, "x_s")?, alphabet(&obj, "x_r")?);
            let (nyr, nyd) = (alphabet(&obj, "y_r")?, alphabet(&obj, "y_d")?);
            let (ns, nsd) = (alphabet(&obj, "s")?, alphabet(&obj, "s_d")?);
            check_axis_names(&obj, "state_axes", &["s", "s_d"])?;
            check_axis_names(
                &obj,
                "transition_axes",
                &["x_s", "x_r", "s", "s_d", "y_r", "y_d"],
            )?;
            let law = flat_f64(get(&obj, "state_law")?, ns * nsd, "state_law")?;
            let mut transition = Vec::with_capacity(nxs * nxr * ns * nsd * nyr * nyd);
            nested_f64(
                get(&obj, "transition")?,
                &[nxs, nxr, ns, nsd, nyr, nyd],
                "transition",
                &mut transition,
            )?;
            Ok(Channel::Relay(RelayChannel::from_raw_parts(
                nxs,
                nxr,
                nyr,
                nyd,
                ns,
                nsd,
                JointTable::from_raw_unchecked(vec![ns, nsd], law),
                transition,
            )))
        }
        other => Err(IoError::UnknownKind {
            tag: other.to_string(),
        }),
    }
}

pub fn read_channel(path: impl AsRef<Path>) -> Result<Channel, IoError> {
    let text = std::fs::read_to_string(path)?;
    read_channel_str(&text)
}
