//! The on-disk representation format: a JSON object holding the semigroup
//! descriptor, the space dimension, and one complex `d×d` matrix per
//! generator, each entry an `[re, im]` pair.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use rlcm::linalg::Tolerances;
use rlcm::representation::Representation;
use rlcm::semigroup::SemigroupHandle;
use rlcm::CMatrix;

use crate::descriptor::Descriptor;
use crate::words::parse_gen_key;
use crate::Failure;

/// A complex matrix as nested JSON arrays of `[re, im]` pairs, row by row.
pub type MatrixData = Vec<Vec<[f64; 2]>>;

/// A parsed representation file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepFile {
    /// The semigroup being represented.
    pub semigroup: Descriptor,
    /// Dimension of the Hilbert space.
    pub dimension: usize,
    /// Generator images keyed by generator name (`e1`, `a`, `x0`, `plus`,
    /// `p2`, `vertex:name`, …).
    pub generators: BTreeMap<String, MatrixData>,
}

impl RepFile {
    /// Read and parse a representation file.
    pub fn load(path: &str) -> Result<RepFile, Failure> {
        let body = std::fs::read_to_string(path).map_err(|e| {
            Failure::data(format!("cannot read representation file {path}: {e}"))
        })?;
        serde_json::from_str(&body)
            .map_err(|e| Failure::data(format!("representation file {path}: {e}")))
    }

    /// Build the semigroup handle and assemble the representation. The
    /// returned representation carries its relation report; callers decide
    /// what an unverified representation means for them.
    pub fn assemble(
        &self,
        budget: usize,
        tol: Tolerances,
    ) -> Result<(SemigroupHandle, Representation), Failure> {
        let handle = self.semigroup.build(budget)?;
        let mut images = BTreeMap::new();
        for (name, data) in &self.generators {
            let key = parse_gen_key(&handle, name)?;
            images.insert(key, matrix_from_data(data, self.dimension, name)?);
        }
        let rep = Representation::assemble(handle.clone(), self.dimension, images, tol)
            .map_err(|e| Failure::data(e.to_string()))?;
        Ok((handle, rep))
    }
}

/// Decode one generator matrix, enforcing the declared dimension.
pub fn matrix_from_data(data: &MatrixData, dim: usize, name: &str) -> Result<CMatrix, Failure> {
    if data.len() != dim || data.iter().any(|row| row.len() != dim) {
        return Err(Failure::data(format!(
            "generator {name}: expected a {dim}x{dim} matrix of [re, im] pairs"
        )));
    }
    let mut m = CMatrix::zeros(dim, dim);
    for (r, row) in data.iter().enumerate() {
        for (c, &[re, im]) in row.iter().enumerate() {
            m[(r, c)] = Complex64::new(re, im);
        }
    }
    Ok(m)
}

/// Encode a matrix in the file format.
pub fn matrix_to_data(m: &CMatrix) -> MatrixData {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

/// Render a matrix for terminal display, one line per row.
pub fn format_matrix(data: &MatrixData) -> Vec<String> {
    data.iter()
        .map(|row| {
            let entries: Vec<String> = row
                .iter()
                .map(|&[re, im]| {
                    if im == 0.0 {
                        format!("{re:.4}")
                    } else {
                        format!("{re:.4}{im:+.4}i")
                    }
                })
                .collect();
            format!("[{}]", entries.join(", "))
        })
        .collect()
}
