//! JSON documents for tensors and ensembles.
//!
//! A tensor document is `{"kind": "complex" | "hermitian", "mode_dims": [..]}`
//! plus either `"dense"`, a row-major list of `[re, im]` pairs, or
//! `"sparse"`, a list of `{"idx": [..], "val": [re, im]}` with 1-based
//! indices (2m of them for a Hermitian tensor) and unlisted entries zero.
//! An ensemble document is `{"probabilities": [..], "pure_states": [..]}`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::quantum::MixedStateEnsemble;
use crate::tensor::{ravel, HERMITICITY_TOL};
use crate::{ComplexTensor, HermitianTensor, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TensorKind {
    Complex,
    Hermitian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SparseEntry {
    idx: Vec<usize>,
    val: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorDoc {
    kind: TensorKind,
    mode_dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dense: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sparse: Option<Vec<SparseEntry>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleDoc {
    probabilities: Vec<f64>,
    pure_states: Vec<TensorDoc>,
}

/// A parsed tensor document. Hermitian documents keep their raw order-2m
/// array so defects can be reported before validation.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTensor {
    pub kind: TensorKind,
    pub mode_dims: Vec<usize>,
    pub array: ComplexTensor,
}

impl ParsedTensor {
    /// Validate as Hermitian within `tol`.
    pub fn hermitian(&self, tol: f64) -> Result<HermitianTensor> {
        match self.kind {
            TensorKind::Hermitian => HermitianTensor::from_array(&self.array, tol),
            TensorKind::Complex => Err(Error::InvalidInput(
                "expected a Hermitian tensor, got kind \"complex\"".into(),
            )),
        }
    }

    pub fn complex(&self) -> Result<&ComplexTensor> {
        match self.kind {
            TensorKind::Complex => Ok(&self.array),
            TensorKind::Hermitian => Err(Error::InvalidInput(
                "expected a complex tensor, got kind \"hermitian\"".into(),
            )),
        }
    }
}

/// Either document type.
#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Tensor(ParsedTensor),
    Ensemble(MixedStateEnsemble),
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {} column {}: {e}", e.line(), e.column()))
}

fn to_c64(v: [f64; 2]) -> C64 {
    C64::new(v[0], v[1])
}

fn tensor_from_doc(doc: TensorDoc, field: &str) -> Result<ParsedTensor> {
    if doc.mode_dims.is_empty() || doc.mode_dims.contains(&0) {
        return Err(Error::Parse(format!(
            "{field}mode_dims must be non-empty positive integers, got {:?}",
            doc.mode_dims
        )));
    }
    let mut dims = doc.mode_dims.clone();
    if doc.kind == TensorKind::Hermitian {
        dims.extend_from_slice(&doc.mode_dims);
    }
    let len: usize = dims.iter().product();
    let entries = match (doc.dense, doc.sparse) {
        (Some(dense), None) => {
            if dense.len() != len {
                return Err(Error::Parse(format!(
                    "{field}dense has {} entries, expected {len}",
                    dense.len()
                )));
            }
            dense.into_iter().map(to_c64).collect()
        }
        (None, Some(sparse)) => {
            let mut out = vec![C64::new(0.0, 0.0); len];
            let mut seen = vec![false; len];
            for (k, e) in sparse.into_iter().enumerate() {
                if e.idx.len() != dims.len() || e.idx.iter().zip(&dims).any(|(&i, &n)| i == 0 || i > n) {
                    return Err(Error::Parse(format!(
                        "{field}sparse[{k}].idx {:?} is not a 1-based index into {:?}",
                        e.idx, dims
                    )));
                }
                let zero_based: Vec<usize> = e.idx.iter().map(|i| i - 1).collect();
                let flat = ravel(&zero_based, &dims);
                if seen[flat] {
                    return Err(Error::Parse(format!("{field}sparse[{k}].idx {:?} repeats", e.idx)));
                }
                seen[flat] = true;
                out[flat] = to_c64(e.val);
            }
            out
        }
        _ => {
            return Err(Error::Parse(format!(
                "{field}exactly one of \"dense\" or \"sparse\" is required"
            )))
        }
    };
    Ok(ParsedTensor {
        kind: doc.kind,
        mode_dims: doc.mode_dims,
        array: ComplexTensor::new(dims, entries)?,
    })
}

pub fn parse_tensor(text: &str) -> Result<ParsedTensor> {
    tensor_from_doc(serde_json::from_str(text).map_err(parse_err)?, "")
}

pub fn parse_ensemble(text: &str) -> Result<MixedStateEnsemble> {
    let doc: EnsembleDoc = serde_json::from_str(text).map_err(parse_err)?;
    let states = doc
        .pure_states
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            let t = tensor_from_doc(d, &format!("pure_states[{i}]."))?;
            match t.kind {
                TensorKind::Complex => Ok(t.array),
                TensorKind::Hermitian => Err(Error::Parse(format!(
                    "pure_states[{i}] must have kind \"complex\""
                ))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    MixedStateEnsemble::new(doc.probabilities, states)
}

/// Dispatch on the presence of a `"probabilities"` key.
pub fn parse_document(text: &str) -> Result<Document> {
    let value: Value = serde_json::from_str(text).map_err(parse_err)?;
    if value.get("probabilities").is_some() {
        parse_ensemble(text).map(Document::Ensemble)
    } else {
        parse_tensor(text).map(Document::Tensor)
    }
}

fn dense(entries: &[C64]) -> Vec<[f64; 2]> {
    entries.iter().map(|z| [z.re, z.im]).collect()
}

fn complex_doc(t: &ComplexTensor) -> TensorDoc {
    TensorDoc {
        kind: TensorKind::Complex,
        mode_dims: t.mode_dims().to_vec(),
        dense: Some(dense(t.as_slice())),
        sparse: None,
    }
}

pub fn complex_to_value(t: &ComplexTensor) -> Value {
    serde_json::to_value(complex_doc(t)).expect("plain data")
}

pub fn hermitian_to_value(h: &HermitianTensor) -> Value {
    serde_json::to_value(TensorDoc {
        kind: TensorKind::Hermitian,
        mode_dims: h.mode_dims().to_vec(),
        dense: Some(dense(h.as_slice())),
        sparse: None,
    })
    .expect("plain data")
}

pub fn ensemble_to_value(e: &MixedStateEnsemble) -> Value {
    serde_json::to_value(EnsembleDoc {
        probabilities: e.probabilities().to_vec(),
        pure_states: e.pure_states().iter().map(complex_doc).collect(),
    })
    .expect("plain data")
}

/// Hermitian input read with the default tolerance.
pub fn parse_hermitian(text: &str) -> Result<HermitianTensor> {
    parse_tensor(text)?.hermitian(HERMITICITY_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian_tensor, random_unit_tensor, seeded_rng};

    #[test]
    fn hermitian_dense_roundtrip() {
        let h = random_hermitian_tensor(&mut seeded_rng(1, 0), &[2, 3]);
        let text = hermitian_to_value(&h).to_string();
        let back = parse_hermitian(&text).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn ensemble_roundtrip() {
        let mut rng = seeded_rng(2, 0);
        let states = vec![random_unit_tensor(&mut rng, &[2, 2]), random_unit_tensor(&mut rng, &[2, 2])];
        let e = MixedStateEnsemble::new(vec![0.25, 0.75], states).unwrap();
        let text = ensemble_to_value(&e).to_string();
        match parse_document(&text).unwrap() {
            Document::Ensemble(back) => assert_eq!(back, e),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sparse_hermitian() {
        let text = r#"{"kind":"hermitian","mode_dims":[2],
            "sparse":[{"idx":[1,2],"val":[0,-1]},{"idx":[2,1],"val":[0,1]}]}"#;
        let h = parse_hermitian(text).unwrap();
        assert_eq!(h.get_flat(0, 1), C64::new(0.0, -1.0));
        assert_eq!(h.get_flat(1, 1), C64::new(0.0, 0.0));
    }

    #[test]
    fn errors_carry_context() {
        let bad_len = r#"{"kind":"complex","mode_dims":[2],"dense":[[1,0]]}"#;
        assert!(matches!(parse_tensor(bad_len), Err(Error::Parse(m)) if m.contains("dense")));
        let bad_idx = r#"{"kind":"complex","mode_dims":[2],"sparse":[{"idx":[3],"val":[1,0]}]}"#;
        assert!(matches!(parse_tensor(bad_idx), Err(Error::Parse(m)) if m.contains("sparse[0]")));
        let both = r#"{"kind":"complex","mode_dims":[1],"dense":[[1,0]],"sparse":[]}"#;
        assert!(parse_tensor(both).is_err());
        let syntax = "{\n\"kind\": \"complex\",\n oops}";
        assert!(matches!(parse_tensor(syntax), Err(Error::Parse(m)) if m.contains("line 3")));
        let non_herm = r#"{"kind":"hermitian","mode_dims":[2],"dense":[[1,0],[1,0],[0,0],[1,0]]}"#;
        assert!(matches!(parse_hermitian(non_herm), Err(Error::NotHermitian { .. })));
    }
}
