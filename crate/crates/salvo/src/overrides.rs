//! Dotted-path `key=value` edits of a scenario document, applied before it
//! is converted and validated.
//!
//! * `guidance.eta_f=12` sets a number;
//! * `autopilot=first-order` sets a string (anything that is not a TOML
//!   literal is taken as a bare string);
//! * `interceptor.F2.speed=250` selects an `[[interceptor]]` by name, and
//!   `interceptor.0.speed=250` by position (0-based);
//! * `network.edges=[[1,2],[2,3]]` replaces an array wholesale.
//!
//! A key may be created if its parent table exists (e.g. `guidance.t_one`).

use toml::{Table, Value};

use crate::error::{AppError, Result};

fn parse_value(raw: &str) -> Value {
    toml::from_str::<Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

pub fn apply_override(doc: &mut Table, spec: &str) -> Result<()> {
    let err = |reason: String| AppError::Override {
        spec: spec.to_string(),
        reason,
    };
    let (key, raw) = spec.split_once('=').ok_or_else(|| err("expected key=value".into()))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(err("empty path segment".into()));
    }
    set_table(doc, &path, parse_value(raw.trim())).map_err(err)
}

fn set_table(table: &mut Table, path: &[&str], value: Value) -> Result<(), String> {
    match path {
        [last] => {
            table.insert((*last).to_string(), value);
            Ok(())
        }
        [seg, rest @ ..] => {
            let child = table.get_mut(*seg).ok_or_else(|| format!("no field '{seg}'"))?;
            set_value(child, seg, rest, value)
        }
        [] => unreachable!("paths are never empty"),
    }
}

fn set_value(node: &mut Value, name: &str, path: &[&str], value: Value) -> Result<(), String> {
    match node {
        Value::Table(t) => set_table(t, path, value),
        Value::Array(items) => {
            let (seg, rest) = path.split_first().expect("caller passes a non-empty path");
            let slot = select(items, seg).ok_or_else(|| format!("'{name}' has no element '{seg}'"))?;
            if rest.is_empty() {
                *slot = value;
                Ok(())
            } else {
                set_value(slot, seg, rest, value)
            }
        }
        _ => Err(format!("'{name}' is not a table or array")),
    }
}

/// Array element by 0-based index, or the table whose `name` matches.
fn select<'a>(items: &'a mut [Value], seg: &str) -> Option<&'a mut Value> {
    if let Ok(i) = seg.parse::<usize>() {
        return items.get_mut(i);
    }
    items
        .iter_mut()
        .find(|v| v.get("name").and_then(Value::as_str) == Some(seg))
}
