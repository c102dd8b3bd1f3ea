//! QOP-JSON: `{"dim": n, "entries": [[[re, im], ...], ...]}` in row-major order,
//! with optional `"dA"`, `"dB"` for bipartite states.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BipartiteDensityMatrix, CMatrix, DensityMatrix, HermitianOperator};
use crate::error::{Error, Result};

/// Serialisable form of an operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorRecord {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "dA", default, skip_serializing_if = "Option::is_none")]
    pub da: Option<usize>,
    #[serde(rename = "dB", default, skip_serializing_if = "Option::is_none")]
    pub db: Option<usize>,
}

pub(crate) fn matrix_to_entries(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

/// Builds a `rows × cols` matrix, rejecting ragged input.
pub(crate) fn entries_to_matrix(
    entries: &[Vec<[f64; 2]>],
    rows: usize,
    cols: usize,
) -> Result<CMatrix> {
    if entries.len() != rows {
        return Err(Error::Parse(format!(
            "expected {rows} rows, found {}",
            entries.len()
        )));
    }
    for (i, row) in entries.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Parse(format!(
                "row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        let [re, im] = entries[i][j];
        Complex64::new(re, im)
    }))
}

impl OperatorRecord {
    pub fn from_matrix(m: &CMatrix) -> Self {
        Self {
            dim: m.nrows(),
            entries: matrix_to_entries(m),
            da: None,
            db: None,
        }
    }

    pub fn from_operator(x: &HermitianOperator) -> Self {
        Self::from_matrix(x.matrix())
    }

    pub fn from_bipartite(x: &BipartiteDensityMatrix) -> Self {
        Self {
            da: Some(x.da()),
            db: Some(x.db()),
            ..Self::from_matrix(x.state().matrix())
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        crate::json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("operator records always serialise")
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        entries_to_matrix(&self.entries, self.dim, self.dim)
    }

    pub fn to_operator(&self) -> Result<HermitianOperator> {
        HermitianOperator::new(self.to_matrix()?)
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.to_operator()?)
    }

    /// Requires `dA` and `dB`.
    pub fn to_bipartite(&self) -> Result<BipartiteDensityMatrix> {
        match (self.da, self.db) {
            (Some(da), Some(db)) => BipartiteDensityMatrix::new(self.to_density()?, da, db),
            _ => Err(Error::Parse(
                "bipartite operator needs \"dA\" and \"dB\"".into(),
            )),
        }
    }
}
