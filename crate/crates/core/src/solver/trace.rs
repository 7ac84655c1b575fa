use serde::{Deserialize, Serialize};

/// One completed iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    /// Real parts of the reported Ritz values.
    pub ritz_values: Vec<f64>,
    /// Largest imaginary part among them (zero for Hermitian operators).
    pub max_imag: f64,
    pub residuals: Vec<f64>,
    /// Largest bond rank of each reported vector.
    pub ranks: Vec<usize>,
    /// Largest relative truncation error estimate over the block.
    pub trunc_err: f64,
    pub a: f64,
    pub b: f64,
    pub seconds: f64,
    pub locked: usize,
    /// Gram directions removed by whitening.
    pub dropped: usize,
    /// Vectors replaced by random ones after a basis collapse.
    pub reseeded: usize,
}

/// Append-only record of a solver run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub fn push(&mut self, record: IterationRecord) {
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    /// Per-iteration error of the `j`-th Ritz value against a reference.
    pub fn errors(&self, j: usize, reference: f64) -> Vec<f64> {
        self.records.iter().map(|r| (r.ritz_values[j] - reference).abs()).collect()
    }

    /// First iteration at which every reported residual is below `tol`.
    pub fn iterations_to(&self, tol: f64) -> Option<usize> {
        self.records.iter().find(|r| r.residuals.iter().all(|&x| x < tol)).map(|r| r.iter)
    }
}
