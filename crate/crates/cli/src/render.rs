//! JSON and DOT rendering.

use causalflow::{CausalGraph, MeasureReport};
use serde_json::{json, Value};

use crate::SCHEMA;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Nats,
    Bits,
}

impl Unit {
    pub fn from_flag(bits: bool) -> Self {
        if bits {
            Unit::Bits
        } else {
            Unit::Nats
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Unit::Nats => "nats",
            Unit::Bits => "bits",
        }
    }

    pub fn convert(self, nats: f64) -> f64 {
        match self {
            Unit::Nats => nats,
            Unit::Bits => nats / std::f64::consts::LN_2,
        }
    }
}

/// Renames `weight_nats`/`value_nats` keys and converts their values.
fn convert_units(v: &mut Value, unit: Unit) {
    match v {
        Value::Object(map) => {
            let keys: Vec<String> = map.keys().filter(|k| k.ends_with("_nats")).cloned().collect();
            for k in keys {
                let x = map.remove(&k).and_then(|x| x.as_f64()).unwrap_or(f64::NAN);
                let stem = k.trim_end_matches("_nats");
                map.insert(format!("{stem}_{}", unit.name()), json!(unit.convert(x)));
            }
            map.values_mut().for_each(|x| convert_units(x, unit));
        }
        Value::Array(items) => items.iter_mut().for_each(|x| convert_units(x, unit)),
        _ => {}
    }
}

pub fn envelope(kind: &str, config: Value, body_key: &str, body: Value, unit: Unit) -> Value {
    let mut body = body;
    convert_units(&mut body, unit);
    json!({
        "schema": SCHEMA,
        "kind": kind,
        "unit": unit.name(),
        "config": config,
        body_key: body,
    })
}

pub fn report_json(report: &MeasureReport, config: Value, unit: Unit) -> Value {
    let body = serde_json::to_value(report).expect("report serializes");
    envelope("measure", config, "report", body, unit)
}

pub fn graph_json(graph: &CausalGraph, config: Value, unit: Unit) -> Value {
    let body = serde_json::to_value(graph).expect("graph serializes");
    envelope("graph", config, "graph", body, unit)
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn graph_dot(graph: &CausalGraph, name: &str, unit: Unit) -> String {
    let mut out = format!("digraph {} {{\n", quote(name));
    out.push_str("  node [shape=circle];\n");
    for n in &graph.nodes {
        out.push_str(&format!("  {};\n", quote(n)));
    }
    for e in &graph.dynamic_edges {
        out.push_str(&format!(
            "  {} -> {} [label=\"{:.4}\"];\n",
            quote(&e.from),
            quote(&e.to),
            unit.convert(e.weight_nats)
        ));
    }
    for e in &graph.instantaneous_edges {
        out.push_str(&format!(
            "  {} -> {} [dir=none, style=dashed, label=\"{:.4}\"];\n",
            quote(&e.a),
            quote(&e.b),
            unit.convert(e.weight_nats)
        ));
    }
    out.push_str("}\n");
    out
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}
