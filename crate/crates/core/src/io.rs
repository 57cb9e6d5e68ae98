//! JSON documents for tensors, vectors and TCP instances.
//!
//! Tensor files are sparse (coordinate list, 1-based indices); unlisted
//! entries are zero. Serialization writes the canonical form: nonzero
//! entries only, in lexicographic index order.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TcpError};
use crate::tensor::Tensor;
use crate::tcp::TcpInstance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorDoc {
    pub order: usize,
    pub dim: usize,
    #[serde(default)]
    pub entries: Vec<EntryDoc>,
    #[serde(default)]
    pub symmetric: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDoc {
    pub idx: Vec<usize>,
    pub val: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub tensor: TensorDoc,
    pub q: Vec<f64>,
}

impl TensorDoc {
    pub fn to_tensor(&self) -> Result<Tensor> {
        let mut entries = vec![0.0; dense_len(self.order, self.dim)?];
        let mut seen = vec![false; entries.len()];
        for e in &self.entries {
            if e.idx.len() != self.order {
                return Err(TcpError::Malformed(format!(
                    "index {:?} has {} components, expected {}",
                    e.idx,
                    e.idx.len(),
                    self.order
                )));
            }
            if e.idx.iter().any(|&i| i == 0 || i > self.dim) {
                return Err(TcpError::IndexOutOfRange {
                    idx: e.idx.clone(),
                    dim: self.dim,
                });
            }
            let flat = e.idx.iter().fold(0, |acc, &i| acc * self.dim + (i - 1));
            if seen[flat] {
                return Err(TcpError::DuplicateIndex(e.idx.clone()));
            }
            seen[flat] = true;
            entries[flat] = e.val;
        }
        Tensor::new(self.order, self.dim, entries)?.with_symmetric_flag(self.symmetric)
    }

    pub fn from_tensor(t: &Tensor) -> Self {
        let entries = t
            .indices()
            .zip(t.entries())
            .filter(|(_, v)| **v != 0.0)
            .map(|(idx, &val)| EntryDoc {
                idx: idx.iter().map(|i| i + 1).collect(),
                val,
            })
            .collect();
        TensorDoc {
            order: t.order(),
            dim: t.dim(),
            entries,
            symmetric: t.symmetric_flag(),
        }
    }
}

fn dense_len(order: usize, dim: usize) -> Result<usize> {
    if order < 2 {
        return Err(TcpError::InvalidOrder(order));
    }
    if dim == 0 {
        return Err(TcpError::InvalidDimension);
    }
    u32::try_from(order)
        .ok()
        .and_then(|o| dim.checked_pow(o))
        .ok_or_else(|| TcpError::Malformed(format!("{dim}^{order} entries overflow")))
}

fn json_err(e: serde_json::Error) -> TcpError {
    TcpError::Malformed(e.to_string())
}

pub fn parse_tensor(text: &str) -> Result<Tensor> {
    let doc: TensorDoc = serde_json::from_str(text).map_err(json_err)?;
    doc.to_tensor()
}

pub fn serialize_tensor(t: &Tensor) -> String {
    serde_json::to_string_pretty(&TensorDoc::from_tensor(t)).expect("tensor document serializes")
}

pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = serde_json::from_str(text).map_err(json_err)?;
    check_finite(&v)?;
    Ok(v)
}

pub fn parse_instance(text: &str) -> Result<TcpInstance> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(json_err)?;
    check_finite(&doc.q)?;
    TcpInstance::new(doc.tensor.to_tensor()?, doc.q)
}

pub fn serialize_instance(inst: &TcpInstance) -> String {
    let doc = InstanceDoc {
        tensor: TensorDoc::from_tensor(inst.tensor()),
        q: inst.q().to_vec(),
    };
    serde_json::to_string_pretty(&doc).expect("instance document serializes")
}

fn check_finite(v: &[f64]) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(pos) => Err(TcpError::NonFinite(pos)),
        None => Ok(()),
    }
}
