//! Two-outcome fuzzy spin observable of a Stern-Gerlach measurement.
//!
//! The orbital states and screen projections enter only through
//! `a = <phi_up| P_up phi_up>` and `b = <phi_down| P_up phi_down>`, giving
//! `E_up = a P[up] + b P[down]` and `E_down = I - E_up`.

use thiserror::Error;

use crate::coarsegrain::kernel_from_confidence;
use crate::group::CyclicGroup;
use crate::linalg::{self, CMat, PROJECTION_TOL};
use crate::povm::{self, ConfidenceKernel, Observable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SgError {
    #[error("overlap probability {name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgModel {
    pub a: f64,
    pub b: f64,
    pub up: CMat,
    pub down: CMat,
}

impl SgModel {
    /// Outcome 0 is "up", outcome 1 is "down".
    pub fn observable(&self) -> Observable {
        let group = CyclicGroup::new(2).expect("Z_2");
        Observable::from_trusted(group, vec![self.up.clone(), self.down.clone()])
    }

    /// Rows `(a, 1 - a)` and `(b, 1 - b)`: the post-processing that turns the
    /// sharp spin statistics into these.
    pub fn confidence_kernel(&self) -> ConfidenceKernel {
        let group = CyclicGroup::new(2).expect("Z_2");
        ConfidenceKernel::new(group, vec![vec![self.a, 1.0 - self.a], vec![self.b, 1.0 - self.b]])
            .expect("rows are probability vectors")
    }
}

pub fn build_sg(a: f64, b: f64) -> Result<SgModel, SgError> {
    if !(0.0..=1.0).contains(&a) {
        return Err(SgError::OutOfRange { name: "a", value: a });
    }
    if !(0.0..=1.0).contains(&b) {
        return Err(SgError::OutOfRange { name: "b", value: b });
    }
    Ok(SgModel {
        a,
        b,
        up: CMat::from_real_diagonal(&[a, b]),
        down: CMat::from_real_diagonal(&[1.0 - a, 1.0 - b]),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgReport {
    pub is_sharp: bool,
    pub has_norm_one: bool,
    pub is_regular: bool,
    pub is_info_equivalent: bool,
    /// `a == b`: statistics do not depend on the state at all.
    pub is_trivial: bool,
    pub norms: (f64, f64),
}

pub fn analyze_sg(m: &SgModel, tol: f64) -> SgReport {
    let norms = (m.a.max(m.b), (1.0 - m.a).max(1.0 - m.b));
    let is_sharp = linalg::is_projection(&m.up, PROJECTION_TOL)
        && linalg::is_projection(&m.down, PROJECTION_TOL);
    let has_norm_one = norms.0 >= 1.0 - tol && norms.1 >= 1.0 - tol;
    let is_regular = povm::is_regular(&m.observable(), tol)
        .map(|r| r.regular)
        .unwrap_or(false);

    // The statistics map (|c_up|^2, |c_down|^2) -> (p_up, p_down) is the
    // kernel [[a, 1-a], [b, 1-b]]; it is injective iff its determinant
    // a - b is nonzero.
    let kernel = kernel_from_confidence(&m.confidence_kernel());
    let det = kernel.entry(0, 0) * kernel.entry(1, 1) - kernel.entry(0, 1) * kernel.entry(1, 0);
    let is_info_equivalent = det.abs() > tol;
    debug_assert_eq!(is_info_equivalent, (m.a - m.b).abs() > tol);

    SgReport {
        is_sharp,
        has_norm_one,
        is_regular,
        is_info_equivalent,
        is_trivial: (m.a - m.b).abs() <= tol,
        norms,
    }
}
