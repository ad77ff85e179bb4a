//! Report emission. Every output carries the run manifest; JSON is
//! pretty-printed with struct-ordered fields and shortest round-trip floats,
//! so equal inputs give equal bytes.

use std::collections::BTreeMap;
use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<String>,
    pub budgets: BTreeMap<String, Value>,
    pub args: BTreeMap<String, Value>,
    pub seed: u64,
    pub output_format: Format,
    pub precision_bits: u32,
    pub version: &'static str,
}

#[derive(Serialize)]
struct Envelope<'a> {
    manifest: &'a RunManifest,
    result: &'a Value,
}

pub fn emit(out: &mut impl Write, manifest: &RunManifest, result: &Value) -> std::io::Result<()> {
    match manifest.output_format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &Envelope { manifest, result })?;
            writeln!(out)
        }
        Format::Text => {
            let mut lines = Vec::new();
            flatten("manifest", &serde_json::to_value(manifest)?, &mut lines);
            flatten("result", result, &mut lines);
            for (k, v) in lines {
                writeln!(out, "{k}: {v}")?;
            }
            Ok(())
        }
        Format::Csv => {
            // The manifest rides along as a comment line so the table stays plain.
            writeln!(out, "# {}", serde_json::to_string(manifest)?)?;
            let rows: Vec<Vec<(String, String)>> = match result {
                Value::Array(items) => items.iter().map(flat_row).collect(),
                other => vec![flat_row(other)],
            };
            let mut header: Vec<String> = Vec::new();
            for row in &rows {
                for (k, _) in row {
                    if !header.contains(k) {
                        header.push(k.clone());
                    }
                }
            }
            let mut w = csv::Writer::from_writer(&mut *out);
            if !header.is_empty() {
                w.write_record(&header)?;
            }
            for row in &rows {
                let map: BTreeMap<&str, &str> = row.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
                w.write_record(header.iter().map(|h| map.get(h.as_str()).copied().unwrap_or("")))?;
            }
            w.flush()
        }
    }
}

fn flat_row(v: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    match v {
        Value::Object(map) => flatten_object("", map, &mut out),
        other => out.push(("value".into(), scalar(other))),
    }
    out
}

fn flatten_object(prefix: &str, map: &Map<String, Value>, out: &mut Vec<(String, String)>) {
    for (k, v) in map {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        flatten(&key, v, out);
    }
}

fn named(item: &Value) -> Option<(&str, &Value)> {
    let map = item.as_object()?;
    if map.len() != 2 {
        return None;
    }
    let name = map.get("name")?.as_str()?;
    map.iter().find(|(k, _)| k.as_str() != "name").map(|(_, v)| (name, v))
}

/// Dotted-path flattening; arrays of scalars become one `;`-joined cell and
/// `[{name, x}]` lists become one column per name.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => flatten_object(prefix, map, out),
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            out.push((prefix.into(), items.iter().map(scalar).collect::<Vec<_>>().join(";")));
        }
        Value::Array(items) if !items.is_empty() && items.iter().all(|x| named(x).is_some()) => {
            for (name, value) in items.iter().filter_map(named) {
                flatten(&format!("{prefix}.{name}"), value, out);
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), item, out);
            }
        }
        other => out.push((prefix.into(), scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
