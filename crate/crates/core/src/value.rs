//! Program outputs.
//!
//! Behavior vectors hash and compare outputs bitwise (floats via `to_bits`),
//! so two individuals count as behaviorally identical only when every output
//! is bit-identical. The failure marker is an ordinary behavior value: two
//! programs that both fail a case in the same slot can still be distinct on
//! other cases.

use serde::{Deserialize, Serialize};
use std::hash::{Hash, Hasher};

/// A single typed value produced by a program on one case.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Value {
    Int(i64),
    Bool(bool),
    Float(f64),
    IntVec(Vec<i64>),
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Float(a), Value::Float(b)) => a.to_bits() == b.to_bits(),
            (Value::IntVec(a), Value::IntVec(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Value::Int(v) => {
                0u8.hash(state);
                v.hash(state);
            }
            Value::Bool(v) => {
                1u8.hash(state);
                v.hash(state);
            }
            Value::Float(v) => {
                2u8.hash(state);
                v.to_bits().hash(state);
            }
            Value::IntVec(v) => {
                3u8.hash(state);
                v.hash(state);
            }
        }
    }
}

/// What a program produced on one case: a value, or the failure marker for
/// executions with no usable output (step budget exhausted, required output
/// stack empty, non-finite arithmetic).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Output {
    Value(Value),
    Failure,
}

impl Output {
    pub fn is_failure(&self) -> bool {
        matches!(self, Output::Failure)
    }
}
