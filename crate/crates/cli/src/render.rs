//! Human and machine renderings of reports and errors.
//!
//! The machine form is a flat list of `dotted.key = value` lines, itself a
//! valid TOML document:
//!
//! ```text
//! schema_version = 1
//! status = "ok"
//! mode = "sha"
//! result.group = [3, 3, 3]
//! ...
//! input.family.p = 3
//! ```
//!
//! `result.*` keys come in a fixed order per mode, `input.*` keys are sorted,
//! and the `input` table deserializes back to the instance.

use serde::Deserialize;
use toml::Value;

use crate::error::{exit, CliError};
use crate::instance::InstanceFile;
use crate::run::Report;

pub const SCHEMA_VERSION: i64 = 1;

pub fn human(rep: &Report, trace: bool) -> String {
    let mut out = String::new();
    out.push_str(&rep.headline);
    out.push('\n');
    for d in &rep.details {
        out.push_str(d);
        out.push('\n');
    }
    if trace {
        out.push_str("trace:\n");
        for t in &rep.trace {
            out.push_str("  ");
            out.push_str(t);
            out.push('\n');
        }
        out.push_str("input:\n");
        for line in rep.instance.to_toml().lines() {
            if !line.is_empty() {
                out.push_str("  ");
            }
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}

fn push(out: &mut String, key: &str, v: &Value) {
    out.push_str(key);
    out.push_str(" = ");
    out.push_str(&inline(v));
    out.push('\n');
}

fn inline(v: &Value) -> String {
    v.to_string().trim().to_string()
}

/// Emits tables as dotted keys, everything else inline. Empty tables stay
/// as `{}` so they survive a reparse.
fn flatten(out: &mut String, prefix: &str, v: &Value) {
    match v {
        Value::Table(t) if !t.is_empty() => {
            for (k, v) in t {
                flatten(out, &format!("{prefix}.{k}"), v);
            }
        }
        other => push(out, prefix, other),
    }
}

fn echo(out: &mut String, inst: &InstanceFile) {
    let v = Value::try_from(inst).expect("instance serializes");
    flatten(out, "input", &v);
}

pub fn machine(rep: &Report) -> String {
    let mut out = String::new();
    push(&mut out, "schema_version", &Value::Integer(SCHEMA_VERSION));
    push(&mut out, "status", &"ok".into());
    push(&mut out, "exit_code", &Value::Integer(exit::OK.into()));
    push(&mut out, "mode", &rep.mode.as_str().into());
    push(&mut out, "result.headline", &rep.headline.as_str().into());
    for (k, v) in &rep.results {
        push(&mut out, &format!("result.{k}"), v);
    }
    push(&mut out, "trace", &Value::Array(rep.trace.iter().map(|t| t.as_str().into()).collect()));
    echo(&mut out, &rep.instance);
    out
}

pub fn human_error(e: &CliError) -> String {
    format!("error ({}): {e}\n", e.kind())
}

/// Machine form of a failure; `instance` is echoed when parsing got that far.
pub fn machine_error(e: &CliError, instance: Option<&InstanceFile>) -> String {
    let mut out = String::new();
    push(&mut out, "schema_version", &Value::Integer(SCHEMA_VERSION));
    push(&mut out, "status", &"error".into());
    push(&mut out, "exit_code", &Value::Integer(e.exit_code().into()));
    if let Some(i) = instance {
        push(&mut out, "mode", &i.mode.as_str().into());
    }
    push(&mut out, "error.kind", &e.kind().into());
    match e {
        CliError::Syntax { line, column, message } => {
            push(&mut out, "error.line", &Value::Integer(*line as i64));
            push(&mut out, "error.column", &Value::Integer(*column as i64));
            push(&mut out, "error.message", &message.as_str().into());
        }
        CliError::Semantic { key, message } => {
            push(&mut out, "error.key", &key.as_str().into());
            push(&mut out, "error.message", &message.as_str().into());
        }
        CliError::Module { key, error } => {
            if let Some(k) = key {
                push(&mut out, "error.key", &k.as_str().into());
            }
            push(&mut out, "error.message", &error.to_string().into());
        }
        CliError::Io { path, message } => {
            push(&mut out, "error.path", &path.as_str().into());
            push(&mut out, "error.message", &message.as_str().into());
        }
    }
    if let Some(i) = instance {
        echo(&mut out, i);
    }
    out
}

/// The instance echoed in a machine document.
pub fn echo_from_machine(doc: &str) -> Result<InstanceFile, String> {
    let mut table: toml::Table = toml::from_str(doc).map_err(|e| e.to_string())?;
    let input = table.remove("input").ok_or("no input echo")?;
    InstanceFile::deserialize(input).map_err(|e| e.to_string())
}
