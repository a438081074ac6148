//! Probability tables over outcome tuples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values in `[-CLAMP_TOL, 0)` are treated as rounding noise and set to zero.
pub const CLAMP_TOL: f64 = 1e-9;
/// Allowed deviation between the entry sum and the declared mass.
pub const MASS_TOL: f64 = 1e-9;

/// Nonnegative table over `arity`-tuples of outcomes `0..outcome_dim`.
///
/// Entries are stored row-major: the first time index varies slowest. The
/// declared `mass` is 1 for complete distributions and the branch
/// probability for postselected tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbTable {
    arity: usize,
    outcome_dim: usize,
    values: Vec<f64>,
    mass: f64,
}

impl ProbTable {
    /// A normalized table (mass 1).
    pub fn new(arity: usize, outcome_dim: usize, values: Vec<f64>) -> Result<Self> {
        Self::with_mass(arity, outcome_dim, values, 1.0)
    }

    pub fn with_mass(arity: usize, outcome_dim: usize, mut values: Vec<f64>, mass: f64) -> Result<Self> {
        if arity == 0 || outcome_dim == 0 {
            return Err(Error::InvalidArgument(
                "table arity and outcome count must be positive".into(),
            ));
        }
        let expected = outcome_dim.pow(arity as u32);
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: values.len(),
            });
        }
        for (index, v) in values.iter_mut().enumerate() {
            if !v.is_finite() || *v < -CLAMP_TOL {
                return Err(Error::NegativeProbability { index, value: *v });
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        if !mass.is_finite() || mass < 0.0 {
            return Err(Error::InvalidArgument(format!("invalid table mass {mass}")));
        }
        let sum: f64 = values.iter().sum();
        if (sum - mass).abs() > MASS_TOL {
            return Err(Error::MassMismatch {
                expected: mass,
                actual: sum,
            });
        }
        Ok(Self {
            arity,
            outcome_dim,
            values,
            mass,
        })
    }

    /// Uniform normalized table.
    pub fn uniform(arity: usize, outcome_dim: usize) -> Result<Self> {
        let n = outcome_dim.pow(arity as u32);
        Self::new(arity, outcome_dim, vec![1.0 / n as f64; n])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn outcome_dim(&self) -> usize {
        self.outcome_dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Flat position of an outcome tuple.
    pub fn flat_index(&self, outcomes: &[usize]) -> usize {
        assert_eq!(outcomes.len(), self.arity, "outcome tuple has wrong length");
        outcomes.iter().fold(0, |acc, &q| {
            assert!(q < self.outcome_dim, "outcome {q} out of range");
            acc * self.outcome_dim + q
        })
    }

    /// Outcome tuple of a flat position.
    pub fn outcomes_of(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.arity];
        for slot in out.iter_mut().rev() {
            *slot = flat % self.outcome_dim;
            flat /= self.outcome_dim;
        }
        out
    }

    pub fn get(&self, outcomes: &[usize]) -> f64 {
        self.values[self.flat_index(outcomes)]
    }

    /// Sums out every index not listed in `keep`; the kept indices appear in
    /// the order given.
    pub fn marginal(&self, keep: &[usize]) -> Result<ProbTable> {
        if keep.is_empty() || keep.iter().any(|&k| k >= self.arity) {
            return Err(Error::InvalidArgument(format!(
                "cannot keep indices {keep:?} of an arity-{} table",
                self.arity
            )));
        }
        let mut seen = vec![false; self.arity];
        for &k in keep {
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::InvalidArgument(format!("duplicate index {k}")));
            }
        }
        let mut out = vec![0.0; self.outcome_dim.pow(keep.len() as u32)];
        for (flat, &v) in self.values.iter().enumerate() {
            let q = self.outcomes_of(flat);
            let target = keep.iter().fold(0, |acc, &k| acc * self.outcome_dim + q[k]);
            out[target] += v;
        }
        ProbTable::with_mass(keep.len(), self.outcome_dim, out, self.mass)
    }

    /// Largest entrywise absolute difference between two tables of equal shape.
    pub fn max_abs_diff(&self, other: &ProbTable) -> f64 {
        assert_eq!(
            (self.arity, self.outcome_dim),
            (other.arity, other.outcome_dim),
            "table shapes differ"
        );
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
