//! Problem files.
//!
//! A problem is a TOML document (JSON when the file name ends in `.json`):
//!
//! ```toml
//! bounds = [3, 3, 3]
//! strategy = "lex-max"   # optional
//! cache = true           # optional, default true
//!
//! [oracle]
//! kind = "cone"          # or "threshold" / "external"
//! generators = [[2, 1, 1], [1, 2, 2]]
//! ```
//!
//! `threshold` oracles take `weights` and `threshold`; `external` oracles
//! take `command`, either an argv array or a whitespace separated string.
//! Every validation error names the offending field.

use std::path::Path;

use pareto_front_core::{Point, PointSet, SearchSpace, SelectionStrategy};
use serde_json::{Map, Value};
use thiserror::Error;

/// Malformed input, tagged with the field (or flag) it concerns.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{field}: {message}")]
pub struct InputError {
    pub field: String,
    pub message: String,
}

impl InputError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        InputError { field: field.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleSpec {
    Cone { generators: PointSet },
    Threshold { weights: Vec<u64>, threshold: i64 },
    External { command: Vec<String> },
}

impl OracleSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            OracleSpec::Cone { .. } => "cone",
            OracleSpec::Threshold { .. } => "threshold",
            OracleSpec::External { .. } => "external",
        }
    }
}

/// A validated problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub space: SearchSpace,
    pub oracle: OracleSpec,
    pub strategy: Option<SelectionStrategy>,
    pub cache: bool,
}

/// Reads a problem document without validating it.
pub fn load_document(path: &Path) -> Result<Value, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError::new("--problem", format!("cannot read {}: {e}", path.display())))?;
    let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    parse_document(&text, json).map_err(|e| InputError::new(e.field, format!("{}: {}", path.display(), e.message)))
}

pub fn parse_document(text: &str, json: bool) -> Result<Value, InputError> {
    if json {
        serde_json::from_str(text).map_err(|e| InputError::new("problem", format!("invalid JSON: {e}")))
    } else {
        toml::from_str(text).map_err(|e| InputError::new("problem", format!("invalid TOML: {}", e.to_string().trim())))
    }
}

/// Problem fields given on the command line. Each one replaces the
/// corresponding field of the document; `oracle` replaces the whole oracle
/// table.
#[derive(Debug, Clone, Default)]
pub struct InlineFields {
    pub bounds: Option<String>,
    pub oracle: Option<String>,
    pub generators: Option<String>,
    pub weights: Option<String>,
    pub threshold: Option<String>,
    pub command: Option<String>,
}

impl InlineFields {
    pub fn is_empty(&self) -> bool {
        self.bounds.is_none()
            && self.oracle.is_none()
            && self.generators.is_none()
            && self.weights.is_none()
            && self.threshold.is_none()
            && self.command.is_none()
    }

    pub fn apply(&self, doc: &mut Value) -> Result<(), InputError> {
        if doc.is_null() {
            *doc = Value::Object(Map::new());
        }
        let Value::Object(root) = doc else {
            return Err(InputError::new("problem", "expected a table at the top level"));
        };
        if let Some(b) = &self.bounds {
            root.insert("bounds".into(), integer_list("--bounds", b)?);
        }
        if let Some(kind) = &self.oracle {
            let mut table = Map::new();
            table.insert("kind".into(), Value::from(kind.as_str()));
            root.insert("oracle".into(), Value::Object(table));
        }
        let fields = [
            ("generators", self.generators.as_ref().map(|g| point_list("--generators", g)).transpose()?),
            ("weights", self.weights.as_ref().map(|w| integer_list("--weights", w)).transpose()?),
            ("threshold", self.threshold.as_ref().map(|t| integer("--threshold", t)).transpose()?),
            ("command", self.command.as_ref().map(|c| Value::from(c.as_str()))),
        ];
        for (name, value) in fields {
            let Some(value) = value else { continue };
            let oracle = root.entry("oracle").or_insert_with(|| Value::Object(Map::new()));
            let Value::Object(table) = oracle else {
                return Err(InputError::new("oracle", "expected a table"));
            };
            table.insert(name.into(), value);
        }
        Ok(())
    }
}

fn integer(flag: &str, text: &str) -> Result<Value, InputError> {
    text.trim()
        .parse::<i64>()
        .map(Value::from)
        .map_err(|_| InputError::new(flag, format!("expected an integer, got {text:?}")))
}

fn integer_list(flag: &str, text: &str) -> Result<Value, InputError> {
    if text.trim().is_empty() {
        return Ok(Value::Array(Vec::new()));
    }
    text.split(',').map(|t| integer(flag, t)).collect::<Result<Vec<_>, _>>().map(Value::Array)
}

// "2,1,1;1,2,2"
fn point_list(flag: &str, text: &str) -> Result<Value, InputError> {
    text.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| integer_list(flag, p))
        .collect::<Result<Vec<_>, _>>()
        .map(Value::Array)
}

impl Problem {
    pub fn from_value(doc: &Value) -> Result<Problem, InputError> {
        let root = doc.as_object().ok_or_else(|| InputError::new("problem", "expected a table at the top level"))?;
        reject_unknown(root, "", &["bounds", "oracle", "strategy", "cache"])?;

        let bounds = match root.get("bounds") {
            None => return Err(InputError::new("bounds", "missing")),
            Some(v) => naturals("bounds", v)?,
        };
        if bounds.is_empty() {
            return Err(InputError::new("bounds", "needs at least one dimension"));
        }
        let space = SearchSpace::new(bounds).map_err(|e| InputError::new("bounds", e.to_string()))?;

        let oracle = match root.get("oracle") {
            None => return Err(InputError::new("oracle", "missing")),
            Some(v) => oracle_spec(&space, v)?,
        };

        let strategy = match root.get("strategy") {
            None => None,
            Some(Value::String(s)) => Some(parse_strategy("strategy", s)?),
            Some(other) => return Err(InputError::new("strategy", format!("expected a string, got {other}"))),
        };
        let cache = match root.get("cache") {
            None => true,
            Some(Value::Bool(b)) => *b,
            Some(other) => return Err(InputError::new("cache", format!("expected true or false, got {other}"))),
        };
        Ok(Problem { space, oracle, strategy, cache })
    }
}

pub fn parse_strategy(field: &str, name: &str) -> Result<SelectionStrategy, InputError> {
    name.parse().map_err(|_| {
        let known: Vec<&str> = SelectionStrategy::ALL.iter().map(|s| s.name()).collect();
        InputError::new(field, format!("unknown strategy {name:?} (expected one of {})", known.join(", ")))
    })
}

fn reject_unknown(table: &Map<String, Value>, prefix: &str, known: &[&str]) -> Result<(), InputError> {
    match table.keys().find(|k| !known.contains(&k.as_str())) {
        Some(k) => Err(InputError::new(format!("{prefix}{k}"), "unknown field")),
        None => Ok(()),
    }
}

fn natural(field: &str, v: &Value) -> Result<u64, InputError> {
    v.as_u64().ok_or_else(|| InputError::new(field, format!("expected a non-negative integer, got {v}")))
}

fn naturals(field: &str, v: &Value) -> Result<Vec<u64>, InputError> {
    let items =
        v.as_array().ok_or_else(|| InputError::new(field, format!("expected an array of integers, got {v}")))?;
    items.iter().enumerate().map(|(i, x)| natural(&format!("{field}[{i}]"), x)).collect()
}

fn oracle_spec(space: &SearchSpace, v: &Value) -> Result<OracleSpec, InputError> {
    let table = v.as_object().ok_or_else(|| InputError::new("oracle", format!("expected a table, got {v}")))?;
    let kind = match table.get("kind") {
        None => return Err(InputError::new("oracle.kind", "missing")),
        Some(Value::String(s)) => s.as_str(),
        Some(other) => return Err(InputError::new("oracle.kind", format!("expected a string, got {other}"))),
    };
    let field = |name: &str| {
        table
            .get(name)
            .ok_or_else(|| InputError::new(format!("oracle.{name}"), format!("missing (required by kind {kind:?})")))
    };
    match kind {
        "cone" => {
            reject_unknown(table, "oracle.", &["kind", "generators"])?;
            let list = field("generators")?;
            let items = list.as_array().ok_or_else(|| {
                InputError::new("oracle.generators", format!("expected an array of points, got {list}"))
            })?;
            let mut generators = PointSet::new();
            for (i, item) in items.iter().enumerate() {
                let name = format!("oracle.generators[{i}]");
                let point = Point::new(naturals(&name, item)?);
                space.check(&point).map_err(|e| InputError::new(name, e.to_string()))?;
                generators.insert(point);
            }
            Ok(OracleSpec::Cone { generators })
        }
        "threshold" => {
            reject_unknown(table, "oracle.", &["kind", "weights", "threshold"])?;
            let weights = naturals("oracle.weights", field("weights")?)?;
            if weights.len() != space.arity() {
                return Err(InputError::new(
                    "oracle.weights",
                    format!("expected {} weights (one per dimension), got {}", space.arity(), weights.len()),
                ));
            }
            let t = field("threshold")?;
            let threshold = t
                .as_i64()
                .ok_or_else(|| InputError::new("oracle.threshold", format!("expected an integer, got {t}")))?;
            Ok(OracleSpec::Threshold { weights, threshold })
        }
        "external" => {
            reject_unknown(table, "oracle.", &["kind", "command"])?;
            let command: Vec<String> = match field("command")? {
                Value::String(s) => s.split_whitespace().map(str::to_owned).collect(),
                Value::Array(items) => items
                    .iter()
                    .enumerate()
                    .map(|(i, x)| {
                        x.as_str().map(str::to_owned).ok_or_else(|| {
                            InputError::new(format!("oracle.command[{i}]"), format!("expected a string, got {x}"))
                        })
                    })
                    .collect::<Result<_, _>>()?,
                other => {
                    return Err(InputError::new(
                        "oracle.command",
                        format!("expected a string or an array, got {other}"),
                    ))
                }
            };
            if command.is_empty() {
                return Err(InputError::new("oracle.command", "empty command"));
            }
            Ok(OracleSpec::External { command })
        }
        other => Err(InputError::new(
            "oracle.kind",
            format!("unknown kind {other:?} (expected cone, threshold or external)"),
        )),
    }
}
