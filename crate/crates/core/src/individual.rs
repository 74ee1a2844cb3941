//! Individuals, training cases, and populations.

use crate::problems::Genome;
use crate::value::{Output, Value};
use serde::{Deserialize, Serialize};

/// One input/expected-output pair. Inputs are a flat list of values whose
/// shape is fixed per problem (e.g. two floats, or one int vector).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingCase {
    pub inputs: Vec<Value>,
    pub expected: Value,
}

impl TrainingCase {
    pub fn new(inputs: Vec<Value>, expected: Value) -> Self {
        TrainingCase { inputs, expected }
    }
}

/// Per-case errors for one individual, in case order. Entries are finite and
/// non-negative; failed executions appear as the problem's penalty value, not
/// as NaN/inf, so totals and comparisons stay well defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorVector(pub Vec<f64>);

impl ErrorVector {
    /// Sum in case order, no reordering: two individuals with identical
    /// vectors get bit-identical totals.
    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Bitwise grouping key; used to deduplicate identical error vectors.
    pub fn bit_key(&self) -> Vec<u64> {
        self.0.iter().map(|e| e.to_bits()).collect()
    }
}

impl std::ops::Index<usize> for ErrorVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A genome with its evaluation record for the current generation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Individual {
    pub genome: Genome,
    pub errors: ErrorVector,
    pub behavior: Vec<Output>,
}

impl Individual {
    pub fn total_error(&self) -> f64 {
        self.errors.total()
    }
}

/// One generation's individuals. Index order is identity: selection events
/// and rank tables refer to members by position.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Population(pub Vec<Individual>);

impl Population {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Individual> {
        self.0.iter()
    }

    pub fn totals(&self) -> Vec<f64> {
        self.0.iter().map(Individual::total_error).collect()
    }

    pub fn best_total(&self) -> f64 {
        self.totals().into_iter().fold(f64::INFINITY, f64::min)
    }
}

impl std::ops::Index<usize> for Population {
    type Output = Individual;
    fn index(&self, i: usize) -> &Individual {
        &self.0[i]
    }
}
