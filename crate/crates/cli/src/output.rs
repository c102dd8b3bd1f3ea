//! Report envelope, significant-digit rounding and CSV rendering.

use serde::Serialize;
use serde_json::{Map, Number, Value};

pub const TOOL: &str = "qcont";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SCHEMA: u32 = 1;
pub const SIGNIFICANT_DIGITS: usize = 12;

pub const BOUND_COLUMNS: [&str; 7] = [
    "equation_tag",
    "lhs",
    "rhs",
    "slack",
    "applicable",
    "reason",
    "params",
];
pub const FUZZ_COLUMNS: [(&str, &str); 6] = [
    ("campaign", "campaign_tag"),
    ("samples", "samples"),
    ("violations", "violations"),
    ("max_violation", "max_violation"),
    ("min_slack", "min_slack"),
    ("seed", "seed"),
];

/// How CSV rows are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Bound,
    Fuzz,
    Flat,
}

#[derive(Debug, Serialize)]
pub struct Envelope {
    pub tool: &'static str,
    pub version: &'static str,
    pub schema: u32,
    pub equation_tag: String,
    pub report: Value,
}

pub struct Output {
    pub tag: String,
    pub layout: Layout,
    /// A single report, or an array of reports.
    pub report: Value,
}

impl Output {
    pub fn new(tag: impl Into<String>, layout: Layout, report: &impl Serialize) -> Self {
        let report = serde_json::to_value(report).expect("reports always serialise");
        Self {
            tag: tag.into(),
            layout,
            report,
        }
    }

    pub fn json(&self) -> String {
        let env = Envelope {
            tool: TOOL,
            version: VERSION,
            schema: SCHEMA,
            equation_tag: self.tag.clone(),
            report: round_value(&self.report),
        };
        serde_json::to_string(&env).expect("envelopes always serialise")
    }

    pub fn csv(&self) -> String {
        let report = round_value(&self.report);
        let rows: Vec<&Value> = match &report {
            Value::Array(items) => items.iter().collect(),
            v => vec![v],
        };
        let mut out = String::new();
        match self.layout {
            Layout::Bound => {
                out.push_str(&BOUND_COLUMNS.join(","));
                out.push('\n');
                for r in rows {
                    let cells: Vec<String> = BOUND_COLUMNS
                        .iter()
                        .map(|&c| {
                            if c == "params" {
                                params_cell(r.get(c))
                            } else {
                                cell(r.get(c))
                            }
                        })
                        .collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
            Layout::Fuzz => {
                let names: Vec<&str> = FUZZ_COLUMNS.iter().map(|c| c.0).collect();
                out.push_str(&names.join(","));
                out.push('\n');
                for r in rows {
                    let cells: Vec<String> =
                        FUZZ_COLUMNS.iter().map(|c| cell(r.get(c.1))).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
            Layout::Flat => {
                let flat: Vec<Vec<(String, Value)>> = rows.iter().map(|r| flatten(r)).collect();
                let header: Vec<&str> = flat
                    .first()
                    .map(|f| f.iter().map(|(k, _)| k.as_str()).collect())
                    .unwrap_or_default();
                out.push_str(&header.join(","));
                out.push('\n');
                for f in &flat {
                    let cells: Vec<String> = f.iter().map(|(_, v)| cell(Some(v))).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
        }
        out
    }
}

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

/// Rounds every non-integer number in `v`.
pub fn round_value(v: &Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            Number::from_f64(round_sig(x)).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.iter().map(round_value).collect()),
        Value::Object(map) => Value::Object(
            map.iter()
                .map(|(k, v)| (k.clone(), round_value(v)))
                .collect::<Map<_, _>>(),
        ),
        other => other.clone(),
    }
}

fn escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => escape(s),
        Some(v @ (Value::Array(_) | Value::Object(_))) => escape(&v.to_string()),
        Some(v) => v.to_string(),
    }
}

/// `k=v` pairs joined by `;`, in key order.
fn params_cell(v: Option<&Value>) -> String {
    match v {
        Some(Value::Object(map)) => {
            let parts: Vec<String> = map
                .iter()
                .map(|(k, v)| format!("{k}={}", cell(Some(v)).trim_matches('"')))
                .collect();
            escape(&parts.join(";"))
        }
        _ => String::new(),
    }
}

fn flatten(v: &Value) -> Vec<(String, Value)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
        let key = |k: &str| {
            if prefix.is_empty() {
                k.to_string()
            } else {
                format!("{prefix}.{k}")
            }
        };
        match v {
            Value::Object(map) => {
                for (k, v) in map {
                    walk(&key(k), v, out);
                }
            }
            Value::Array(items) => {
                for (i, v) in items.iter().enumerate() {
                    walk(&key(&i.to_string()), v, out);
                }
            }
            leaf => out.push((prefix.to_string(), leaf.clone())),
        }
    }
    let mut out = Vec::new();
    walk("", v, &mut out);
    out
}
