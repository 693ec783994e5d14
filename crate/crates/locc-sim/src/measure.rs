//! Local measurements with labeled outcomes.
//!
//! A [`Measurement`] is a list of Kraus operators acting on one party's
//! subsystem, each tagged with an outcome label. Labels are short strings
//! ("1", "2", …) so simulation transcripts read like the branch narratives
//! of a written protocol. Validation reports how badly a measurement misses
//! completeness (Σ MᵢᴴMᵢ = 1) rather than failing outright, so partially
//! built measurements can be inspected.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::state::{CMatrix, CVector, LocalOutcome, Party, StateVector};
use crate::LINALG_TOL;

/// Whether the operators are meant to be orthogonal projectors.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum MeasurementKind {
    /// Hermitian idempotent operators; validation checks both properties.
    Projective,
    /// Arbitrary Kraus operators, unitaries included.
    General,
}

/// A labeled local measurement.
#[derive(Clone, Debug)]
pub struct Measurement {
    pub party: Party,
    pub kind: MeasurementKind,
    pub outcomes: Vec<(String, CMatrix)>,
}

impl Measurement {
    /// A projective measurement from labeled projectors.
    pub fn projective(party: Party, outcomes: Vec<(String, CMatrix)>) -> Self {
        Self { party, kind: MeasurementKind::Projective, outcomes }
    }

    /// A general measurement from labeled Kraus operators.
    pub fn general(party: Party, outcomes: Vec<(String, CMatrix)>) -> Self {
        Self { party, kind: MeasurementKind::General, outcomes }
    }

    /// A deterministic single-outcome "measurement" wrapping a unitary;
    /// used for in-protocol corrections.
    pub fn unitary(party: Party, label: impl Into<String>, u: CMatrix) -> Self {
        Self::general(party, vec![(label.into(), u)])
    }

    /// Rank-1 projectors onto the given (orthonormal) vectors plus, when
    /// `rest_label` is set, the projector onto their orthogonal complement.
    /// Vectors are normalized here; orthogonality is the caller's business
    /// and shows up in validation if violated.
    pub fn projective_onto(
        party: Party,
        vectors: &[(String, CVector)],
        rest_label: Option<&str>,
    ) -> Result<Self> {
        let dim = vectors
            .first()
            .map(|(_, v)| v.len())
            .ok_or_else(|| Error::InvalidParameter("no basis vectors given".into()))?;
        let mut outcomes = Vec::with_capacity(vectors.len() + 1);
        let mut span = CMatrix::zeros(dim, dim);
        for (label, v) in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "basis vector for outcome {label} has length {}, expected {dim}",
                    v.len()
                )));
            }
            let norm = v.norm();
            if norm <= crate::PHASE_TOL {
                return Err(Error::InvalidParameter(format!(
                    "basis vector for outcome {label} is numerically zero"
                )));
            }
            let unit = v.map(|c| c / C64::new(norm, 0.0));
            let proj = &unit * unit.adjoint();
            span += &proj;
            outcomes.push((label.clone(), proj));
        }
        if let Some(rest) = rest_label {
            let complement = CMatrix::identity(dim, dim) - span;
            outcomes.push((rest.to_string(), complement));
        }
        Ok(Self::projective(party, outcomes))
    }

    /// Local dimension the operators act on, if they agree on one.
    pub fn dim(&self) -> Option<usize> {
        let d = self.outcomes.first()?.1.ncols();
        self.outcomes
            .iter()
            .all(|(_, m)| m.ncols() == d && m.nrows() == d)
            .then_some(d)
    }

    /// Structural diagnostics; see [`MeasurementCheck`].
    pub fn validate(&self) -> MeasurementCheck {
        let mut check = MeasurementCheck::default();
        let mut seen = std::collections::BTreeSet::new();
        for (label, _) in &self.outcomes {
            if !seen.insert(label.clone()) {
                check.duplicate_labels.push(label.clone());
            }
        }
        let dim = match self.dim() {
            Some(d) if !self.outcomes.is_empty() => d,
            _ => {
                check.shape_error = true;
                return check;
            }
        };
        let mut sum = CMatrix::zeros(dim, dim);
        for (_, m) in &self.outcomes {
            sum += m.adjoint() * m;
            if self.kind == MeasurementKind::Projective {
                let herm = (m - m.adjoint()).norm();
                let idem = (m * m - m).norm();
                check.projective_error = check.projective_error.max(herm).max(idem);
            }
        }
        check.completeness_error = (sum - DMatrix::identity(dim, dim)).norm();
        check
    }

    /// Applies every outcome operator to `state`, returning labels with
    /// branch weights and post-states.
    pub fn apply(&self, state: &StateVector) -> Result<Vec<(String, LocalOutcome)>> {
        self.outcomes
            .iter()
            .map(|(label, op)| Ok((label.clone(), state.apply_local(op, self.party)?)))
            .collect()
    }

    /// True when the two measurements act on the same party with the same
    /// labels and operators, elementwise within `tol` in Frobenius norm.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.party == other.party
            && self.outcomes.len() == other.outcomes.len()
            && self.outcomes.iter().zip(other.outcomes.iter()).all(|((la, ma), (lb, mb))| {
                la == lb && ma.shape() == mb.shape() && (ma - mb).norm() <= tol
            })
    }
}

/// What `validate` found. `ok()` requires completeness and, for projective
/// measurements, hermiticity and idempotence, all within the linear-algebra
/// tolerance, plus unique labels and uniform square shapes.
#[derive(Clone, Debug, Default)]
pub struct MeasurementCheck {
    pub completeness_error: f64,
    pub projective_error: f64,
    pub duplicate_labels: Vec<String>,
    pub shape_error: bool,
}

impl MeasurementCheck {
    pub fn ok(&self) -> bool {
        !self.shape_error
            && self.duplicate_labels.is_empty()
            && self.completeness_error <= LINALG_TOL
            && self.projective_error <= LINALG_TOL
    }

    /// Human-readable list of violations, empty when `ok()`.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.shape_error {
            out.push("operators are missing, non-square, or of mixed dimension".into());
        }
        for l in &self.duplicate_labels {
            out.push(format!("duplicate outcome label {l:?}"));
        }
        if self.completeness_error > LINALG_TOL {
            out.push(format!(
                "completeness deviation {:.3e} exceeds {:.0e}",
                self.completeness_error, LINALG_TOL
            ));
        }
        if self.projective_error > LINALG_TOL {
            out.push(format!(
                "projector deviation {:.3e} exceeds {:.0e}",
                self.projective_error, LINALG_TOL
            ));
        }
        out
    }
}
