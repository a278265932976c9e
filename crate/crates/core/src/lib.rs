//! Covariant fuzzy observables on `Z_N` and on the circle.
//!
//! Sharp observables are smeared by confidence kernels or probability
//! measures, and the resulting observables are tested for covariance,
//! coarse-graining, the norm-1 property, regularity and informational
//! equivalence by exact brute force at small sizes. The [`torus`] module
//! handles circle-covariant localization observables through truncated
//! coefficient matrices.

pub mod cli;
pub mod coarsegrain;
pub mod group;
pub mod io;
pub mod linalg;
pub mod povm;
pub mod sterngerlach;
pub mod torus;

pub use coarsegrain::{CoarseError, CoarseKernel, StateDensity};
pub use group::{CyclicGroup, GroupError, ProbabilityMeasure, Spectrum};
pub use linalg::{CMat, EigenDecomposition, LinalgError, C64};
pub use povm::{
    ConfidenceKernel, Observable, PovmError, Representation, SharpObservable, StateVector,
};
pub use sterngerlach::{SgModel, SgReport};
pub use torus::{Arc, CMatrix, HerglotzSequence, TorusError, TorusMeasure};
