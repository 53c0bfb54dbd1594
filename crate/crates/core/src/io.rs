//! The matrix-set JSON schema:
//!
//! ```json
//! { "d": 2, "matrices": [ [[[0,0],[1,0]], [[0,0],[0,0]]] ], "label": "optional" }
//! ```
//!
//! Each matrix is a d×d array of rows, each entry an `[re, im]` pair.
//! Only parsing and serialization live here; reading files is the CLI's job.

use serde::{Deserialize, Serialize};

use crate::error::{JsrError, Result};
use crate::matrix::{Matrix, C64};
use crate::set::MatrixSet;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSetDoc {
    pub d: usize,
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl MatrixSetDoc {
    pub fn from_set(set: &MatrixSet) -> Self {
        MatrixSetDoc {
            d: set.dim(),
            matrices: set.members().iter().map(matrix_to_rows).collect(),
            label: set.label().map(str::to_owned),
        }
    }

    pub fn into_set(self) -> Result<MatrixSet> {
        if self.d == 0 {
            return Err(JsrError::invalid("\"d\" must be positive"));
        }
        let mut members = Vec::with_capacity(self.matrices.len());
        for (idx, rows) in self.matrices.into_iter().enumerate() {
            if rows.len() != self.d || rows.iter().any(|r| r.len() != self.d) {
                return Err(JsrError::invalid(format!(
                    "matrix {idx} is not {d}x{d}",
                    d = self.d
                )));
            }
            let data = rows
                .into_iter()
                .flatten()
                .map(|[re, im]| C64::new(re, im))
                .collect();
            members.push(Matrix::new(self.d, data)?);
        }
        let set = MatrixSet::new(members)?;
        Ok(match self.label {
            Some(l) => set.with_label(l),
            None => set,
        })
    }
}

pub fn matrix_to_rows(m: &Matrix) -> Vec<Vec<[f64; 2]>> {
    m.rows()
        .into_iter()
        .map(|r| r.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn parse_matrix_set(json: &str) -> Result<MatrixSet> {
    let doc: MatrixSetDoc =
        serde_json::from_str(json).map_err(|e| JsrError::invalid(format!("matrix-set JSON: {e}")))?;
    doc.into_set()
}

pub fn matrix_set_to_json(set: &MatrixSet) -> String {
    serde_json::to_string_pretty(&MatrixSetDoc::from_set(set)).expect("serializable")
}
