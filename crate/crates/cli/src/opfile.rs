//! Operator files: JSON with exact rational entries in the lexicographic
//! Plücker basis.
//!
//! ```json
//! { "n": 4, "basis": "plucker-lex", "entries": [["1", "0", ...], ...], "signature": 1 }
//! ```
//!
//! `entries` is a `C(n,2) × C(n,2)` array whose items are strings `"p/q"` or
//! integers (JSON numbers or strings). `signature` (the number of negative
//! directions of the metric) is optional and only read by the
//! semi-Riemannian commands.

use curvcone::exactmath::{parse_rat, Rat, RatMatrix, SymMatRat};
use curvcone::tensorspace::{binomial, ModCurvOp};
use serde::{Deserialize, Serialize};

pub const BASIS_TAG: &str = "plucker-lex";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorFile {
    pub n: usize,
    pub basis: String,
    pub entries: Vec<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<usize>,
}

#[derive(Debug, PartialEq)]
pub enum FileError {
    Parse(String),
    Dimension(String),
}

impl OperatorFile {
    pub fn from_matrix(n: usize, m: &RatMatrix, signature: Option<usize>) -> Self {
        OperatorFile {
            n,
            basis: BASIS_TAG.into(),
            entries: m
                .to_rows()
                .iter()
                .map(|row| row.iter().map(|v| Scalar::Text(v.to_string())).collect())
                .collect(),
            signature,
        }
    }

    pub fn from_op(op: &ModCurvOp) -> Self {
        Self::from_matrix(op.n(), &op.matrix().as_matrix(), None)
    }

    pub fn parse(text: &str) -> Result<Self, FileError> {
        let f: OperatorFile = serde_json::from_str(text).map_err(|e| FileError::Parse(e.to_string()))?;
        if f.basis != BASIS_TAG {
            return Err(FileError::Parse(format!(
                "unsupported basis {:?}, expected {BASIS_TAG:?}",
                f.basis
            )));
        }
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serialisable");
        s.push('\n');
        s
    }

    /// The entries as an exact square matrix of side `C(n,2)`.
    pub fn matrix(&self) -> Result<RatMatrix, FileError> {
        let dim = binomial(self.n, 2);
        if self.entries.len() != dim || self.entries.iter().any(|r| r.len() != dim) {
            return Err(FileError::Dimension(format!(
                "n = {} needs a {dim}x{dim} entries array",
                self.n
            )));
        }
        let mut rows = Vec::with_capacity(dim);
        for (i, row) in self.entries.iter().enumerate() {
            let mut out = Vec::with_capacity(dim);
            for (j, v) in row.iter().enumerate() {
                let r: Rat = match v {
                    Scalar::Int(k) => Rat::from_integer((*k).into()),
                    Scalar::Text(s) => parse_rat(s)
                        .ok_or_else(|| FileError::Parse(format!("entry ({i},{j}): not a rational: {s:?}")))?,
                };
                out.push(r);
            }
            rows.push(out);
        }
        RatMatrix::from_rows(rows).map_err(|e| FileError::Dimension(e.to_string()))
    }

    /// The symmetric operator; asymmetric entries are a parse error.
    pub fn operator(&self) -> Result<ModCurvOp, FileError> {
        let m = self.matrix()?;
        let sym = SymMatRat::try_from(m).map_err(|_| FileError::Parse("entries are not symmetric".into()))?;
        ModCurvOp::new(self.n, sym).map_err(|e| FileError::Dimension(e.to_string()))
    }
}
