//! Reading JSON arguments: a path, `-` for stdin, or inline JSON.

use std::fs;
use std::io::Read;

use isocalc::constructions::{Constructed, UnitarySpec};
use isocalc::index_arith::IndexSet;
use isocalc::json::{self, JsonError};
use isocalc::op_algebra::Operator;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {label}: {source}")]
    Read {
        label: String,
        source: std::io::Error,
    },
    #[error("{label} is not valid JSON: {source}")]
    Syntax {
        label: String,
        source: serde_json::Error,
    },
    #[error("{label} {source}")]
    Schema { label: String, source: JsonError },
}

impl InputError {
    pub fn label(&self) -> &str {
        match self {
            InputError::Read { label, .. }
            | InputError::Syntax { label, .. }
            | InputError::Schema { label, .. } => label,
        }
    }

    pub fn pointer(&self) -> Option<&str> {
        match self {
            InputError::Schema { source, .. } => Some(&source.pointer),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<u64> {
        match self {
            InputError::Schema { source, .. } => source.witness,
            _ => None,
        }
    }
}

pub struct Document {
    pub label: String,
    pub value: Value,
}

impl Document {
    pub fn load(arg: &str) -> Result<Document, InputError> {
        let trimmed = arg.trim_start();
        let (label, text) = if arg == "-" {
            let label = "stdin".to_string();
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|source| InputError::Read {
                    label: label.clone(),
                    source,
                })?;
            (label, text)
        } else if trimmed.starts_with('{') || trimmed.starts_with('[') {
            ("inline JSON".to_string(), arg.to_string())
        } else {
            let label = arg.to_string();
            let text = fs::read_to_string(arg).map_err(|source| InputError::Read {
                label: label.clone(),
                source,
            })?;
            (label, text)
        };
        let value = serde_json::from_str(&text).map_err(|source| InputError::Syntax {
            label: label.clone(),
            source,
        })?;
        Ok(Document { label, value })
    }

    fn schema<T>(&self, r: Result<T, JsonError>) -> Result<T, InputError> {
        r.map_err(|source| InputError::Schema {
            label: self.label.clone(),
            source,
        })
    }

    pub fn index_set(&self) -> Result<IndexSet, InputError> {
        self.schema(json::parse_index_set(&self.value, ""))
    }

    pub fn unitary(&self) -> Result<UnitarySpec, InputError> {
        self.schema(json::parse_unitary(&self.value, ""))
    }

    pub fn operator(&self) -> Result<Constructed, InputError> {
        self.schema(json::parse_operator(&self.value, ""))
    }

    pub fn exact_operator(&self) -> Result<Operator, InputError> {
        self.schema(json::parse_exact_operator(&self.value, ""))
    }

    /// A single operator, an array of operators, or `{"generators": [...]}`.
    pub fn exact_operators(&self) -> Result<Vec<Operator>, InputError> {
        let (list, base) = match &self.value {
            Value::Array(list) => (list, ""),
            Value::Object(o) if o.contains_key("generators") => match &o["generators"] {
                Value::Array(list) => (list, "/generators"),
                _ => {
                    return self.schema(Err(JsonError {
                        pointer: "/generators".into(),
                        message: "expected an array".into(),
                        witness: None,
                    }))
                }
            },
            _ => return Ok(vec![self.exact_operator()?]),
        };
        list.iter()
            .enumerate()
            .map(|(n, v)| self.schema(json::parse_exact_operator(v, &format!("{base}/{n}"))))
            .collect()
    }
}

/// All operators named by `args`, in order.
pub fn load_operators(args: &[String]) -> Result<Vec<Operator>, InputError> {
    let mut out = Vec::new();
    for arg in args {
        out.extend(Document::load(arg)?.exact_operators()?);
    }
    Ok(out)
}
