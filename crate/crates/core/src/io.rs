//! JSON documents exchanged by the CLI and the C bindings.
//!
//! * measure: `{"N": 8, "weights": [...]}`, weights written with 17
//!   significant digits
//! * observable: `{"N": n, "dim": d, "atoms": [[[re, im], ...], ...]}`, each
//!   atom a row-major flattened matrix
//! * kernel: `{"N": n, "rows": [[...], ...]}`
//! * c-matrix: `{"K": k, "entries": [[[re, im], ...], ...]}`, rows and
//!   columns ordered `-K..=K`
//! * circle measure: `{"type": "atomic", "atoms": [{"angle", "weight"}]}` or
//!   `{"type": "grid", "density": [...]}`

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coarsegrain::{CoarseError, CoarseKernel};
use crate::group::{CyclicGroup, GroupError, ProbabilityMeasure};
use crate::linalg::{CMat, LinalgError, C64};
use crate::povm::{ConfidenceKernel, Observable, PovmError};
use crate::torus::{Atom, CMatrix, TorusError, TorusMeasure};

#[derive(Debug, Error)]
pub enum DocError {
    /// Malformed JSON or wrong shape.
    #[error("schema violation: {0}")]
    Schema(String),
    /// Well-formed document whose content breaks a mathematical invariant.
    #[error("invariant violation: {0}")]
    Invariant(String),
}

impl From<serde_json::Error> for DocError {
    fn from(e: serde_json::Error) -> Self {
        DocError::Schema(e.to_string())
    }
}

macro_rules! invariant_from {
    ($($t:ty),*) => {$(
        impl From<$t> for DocError {
            fn from(e: $t) -> Self {
                DocError::Invariant(e.to_string())
            }
        }
    )*};
}
invariant_from!(GroupError, PovmError, LinalgError, TorusError, CoarseError);

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDoc {
    #[serde(rename = "N")]
    pub n: usize,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableDoc {
    #[serde(rename = "N")]
    pub n: usize,
    pub dim: usize,
    pub atoms: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelDoc {
    #[serde(rename = "N")]
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CMatrixDoc {
    #[serde(rename = "K")]
    pub k: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum TorusMeasureDoc {
    Atomic { atoms: Vec<Atom> },
    Grid { density: Vec<f64> },
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpair(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

fn group_of(n: usize) -> Result<CyclicGroup, DocError> {
    CyclicGroup::new(n).map_err(|e| DocError::Schema(e.to_string()))
}

pub fn parse_measure(text: &str) -> Result<ProbabilityMeasure, DocError> {
    let doc: MeasureDoc = serde_json::from_str(text)?;
    let g = group_of(doc.n)?;
    if doc.weights.len() != doc.n {
        return Err(DocError::Schema(format!(
            "N = {} but {} weights",
            doc.n,
            doc.weights.len()
        )));
    }
    Ok(ProbabilityMeasure::new(g, doc.weights)?)
}

/// Measure document with every weight printed to 17 significant digits.
pub fn measure_to_json(m: &ProbabilityMeasure) -> String {
    let weights: Vec<String> = m.weights().iter().map(|w| format!("{w:.16e}")).collect();
    format!("{{\"N\": {}, \"weights\": [{}]}}", m.order(), weights.join(", "))
}

pub fn parse_observable(text: &str) -> Result<Observable, DocError> {
    let doc: ObservableDoc = serde_json::from_str(text)?;
    let g = group_of(doc.n)?;
    if doc.atoms.len() != doc.n {
        return Err(DocError::Schema(format!(
            "N = {} but {} atoms",
            doc.n,
            doc.atoms.len()
        )));
    }
    let atoms = doc
        .atoms
        .into_iter()
        .map(|a| {
            if a.len() != doc.dim * doc.dim {
                return Err(DocError::Schema(format!(
                    "atom has {} entries, expected {}",
                    a.len(),
                    doc.dim * doc.dim
                )));
            }
            CMat::from_row_major(doc.dim, a.into_iter().map(unpair).collect())
                .map_err(|e| DocError::Schema(e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Observable::new(g, atoms)?)
}

pub fn observable_to_doc(e: &Observable) -> ObservableDoc {
    ObservableDoc {
        n: e.order(),
        dim: e.dim(),
        atoms: e
            .atoms()
            .iter()
            .map(|a| a.as_slice().iter().copied().map(pair).collect())
            .collect(),
    }
}

pub fn observable_to_json(e: &Observable) -> String {
    serde_json::to_string(&observable_to_doc(e)).expect("observable serializes")
}

pub fn parse_kernel(text: &str) -> Result<ConfidenceKernel, DocError> {
    let doc: KernelDoc = serde_json::from_str(text)?;
    let g = group_of(doc.n)?;
    if doc.rows.len() != doc.n || doc.rows.iter().any(|r| r.len() != doc.n) {
        return Err(DocError::Schema(format!("kernel must be {0} x {0}", doc.n)));
    }
    Ok(ConfidenceKernel::new(g, doc.rows)?)
}

pub fn kernel_to_json(k: &CoarseKernel) -> String {
    let doc = KernelDoc {
        n: k.group().order(),
        rows: k.matrix().to_vec(),
    };
    serde_json::to_string(&doc).expect("kernel serializes")
}

pub fn parse_cmatrix(text: &str) -> Result<CMatrix, DocError> {
    let doc: CMatrixDoc = serde_json::from_str(text)?;
    let side = 2 * doc.k + 1;
    if doc.entries.len() != side || doc.entries.iter().any(|r| r.len() != side) {
        return Err(DocError::Schema(format!("entries must be {side} x {side}")));
    }
    let flat: Vec<C64> = doc.entries.into_iter().flatten().map(unpair).collect();
    if flat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(DocError::Schema("non-finite entry".into()));
    }
    CMatrix::new(doc.k, flat).map_err(|e| DocError::Schema(e.to_string()))
}

pub fn cmatrix_to_json(c: &CMatrix) -> String {
    let side = c.side();
    let doc = CMatrixDoc {
        k: c.half_width(),
        entries: c
            .entries()
            .chunks(side)
            .map(|row| row.iter().copied().map(pair).collect())
            .collect(),
    };
    serde_json::to_string(&doc).expect("c-matrix serializes")
}

pub fn parse_torus_measure(text: &str) -> Result<TorusMeasure, DocError> {
    let doc: TorusMeasureDoc = serde_json::from_str(text)?;
    Ok(match doc {
        TorusMeasureDoc::Atomic { atoms } => TorusMeasure::atomic(atoms)?,
        TorusMeasureDoc::Grid { density } => TorusMeasure::grid(density)?,
    })
}

pub fn torus_measure_to_doc(m: &TorusMeasure) -> TorusMeasureDoc {
    match m {
        TorusMeasure::Atomic(atoms) => TorusMeasureDoc::Atomic {
            atoms: atoms.clone(),
        },
        TorusMeasure::Grid(d) => TorusMeasureDoc::Grid { density: d.clone() },
    }
}

pub fn torus_measure_to_json(m: &TorusMeasure) -> String {
    serde_json::to_string(&torus_measure_to_doc(m)).expect("measure serializes")
}
