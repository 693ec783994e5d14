//! Pure states of a bipartite system and the linear algebra they carry.
//!
//! A [`StateVector`] holds the joint state of two parties, Alice with local
//! dimension `dim_a` and Bob with `dim_b`. Amplitudes are stored row-major
//! over the product basis, so the coefficient of ∣m⟩_A ∣n⟩_B sits at index
//! `m * dim_b + n`. Every state is normalized on construction and its global
//! phase is fixed by making the first non-negligible amplitude real and
//! non-negative, which keeps serialized states and test fixtures stable.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::{BRANCH_TOL, PHASE_TOL, RANK_TOL};

/// Dense complex matrix.
pub type CMatrix = DMatrix<C64>;
/// Dense complex vector.
pub type CVector = DVector<C64>;

/// One side of the bipartition.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    /// Short label used in transcripts and serialized protocols.
    pub fn label(self) -> &'static str {
        match self {
            Self::Alice => "A",
            Self::Bob => "B",
        }
    }

    /// The opposite party.
    pub fn other(self) -> Self {
        match self {
            Self::Alice => Self::Bob,
            Self::Bob => Self::Alice,
        }
    }
}

impl std::fmt::Display for Party {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Normalized pure state of an `dim_a ⊗ dim_b` system.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    dim_a: usize,
    dim_b: usize,
    amps: CVector,
}

impl StateVector {
    /// Builds a state from raw amplitudes, normalizing and fixing the global
    /// phase. Fails if the length is not `dim_a * dim_b` or the vector is
    /// numerically zero.
    pub fn new(dim_a: usize, dim_b: usize, amps: Vec<C64>) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::InvalidParameter(
                "subsystem dimensions must be at least 1".into(),
            ));
        }
        if amps.len() != dim_a * dim_b {
            return Err(Error::DimensionMismatch(format!(
                "expected {} amplitudes for a {}x{} system, got {}",
                dim_a * dim_b,
                dim_a,
                dim_b,
                amps.len()
            )));
        }
        let mut v = CVector::from_vec(amps);
        let norm = v.norm();
        if norm <= PHASE_TOL {
            return Err(Error::InvalidParameter(
                "cannot normalize a zero state vector".into(),
            ));
        }
        v /= C64::new(norm, 0.0);
        fix_phase(&mut v);
        Ok(Self { dim_a, dim_b, amps: v })
    }

    /// The product basis ket ∣m⟩_A ∣n⟩_B.
    pub fn ket(dim_a: usize, dim_b: usize, m: usize, n: usize) -> Result<Self> {
        if m >= dim_a || n >= dim_b {
            return Err(Error::InvalidParameter(format!(
                "ket ({m},{n}) out of range for a {dim_a}x{dim_b} system"
            )));
        }
        let mut amps = vec![C64::default(); dim_a * dim_b];
        amps[m * dim_b + n] = C64::new(1.0, 0.0);
        Self::new(dim_a, dim_b, amps)
    }

    /// Builds a state as a sum of weighted basis kets; weights need not be
    /// normalized.
    pub fn from_terms(dim_a: usize, dim_b: usize, terms: &[(usize, usize, C64)]) -> Result<Self> {
        let mut amps = vec![C64::default(); dim_a * dim_b];
        for &(m, n, c) in terms {
            if m >= dim_a || n >= dim_b {
                return Err(Error::InvalidParameter(format!(
                    "term ({m},{n}) out of range for a {dim_a}x{dim_b} system"
                )));
            }
            amps[m * dim_b + n] += c;
        }
        Self::new(dim_a, dim_b, amps)
    }

    /// Alice's local dimension.
    pub fn dim_a(&self) -> usize { self.dim_a }

    /// Bob's local dimension.
    pub fn dim_b(&self) -> usize { self.dim_b }

    /// Local dimension of `party`.
    pub fn dim_of(&self, party: Party) -> usize {
        match party {
            Party::Alice => self.dim_a,
            Party::Bob => self.dim_b,
        }
    }

    /// The normalized amplitude vector.
    pub fn amplitudes(&self) -> &CVector { &self.amps }

    /// Amplitude of ∣m⟩_A ∣n⟩_B.
    pub fn amp(&self, m: usize, n: usize) -> C64 {
        self.amps[m * self.dim_b + n]
    }

    /// ⟨self∣other⟩, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &Self) -> Result<C64> {
        if self.dim_a != other.dim_a || self.dim_b != other.dim_b {
            return Err(Error::DimensionMismatch(format!(
                "inner product between {}x{} and {}x{} states",
                self.dim_a, self.dim_b, other.dim_a, other.dim_b
            )));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    /// True when the two states agree up to a global phase within `tol`.
    pub fn same_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        match self.inner_product(other) {
            Ok(ip) => (ip.norm() - 1.0).abs() <= tol,
            Err(_) => false,
        }
    }

    /// Tensor product that keeps the bipartition: Alice's factors group
    /// together and so do Bob's. For ∣m1 n1⟩ ⊗ ∣m2 n2⟩ the composite Alice
    /// index is `m1 * other.dim_a + m2` and likewise on Bob's side.
    pub fn tensor_product(&self, other: &Self) -> Self {
        let da = self.dim_a * other.dim_a;
        let db = self.dim_b * other.dim_b;
        let mut amps = vec![C64::default(); da * db];
        for m1 in 0..self.dim_a {
            for n1 in 0..self.dim_b {
                let c1 = self.amp(m1, n1);
                if c1.norm_sqr() == 0.0 {
                    continue;
                }
                for m2 in 0..other.dim_a {
                    for n2 in 0..other.dim_b {
                        let c2 = other.amp(m2, n2);
                        let m = m1 * other.dim_a + m2;
                        let n = n1 * other.dim_b + n2;
                        amps[m * db + n] = c1 * c2;
                    }
                }
            }
        }
        Self::new(da, db, amps).expect("product of normalized states is normalized")
    }

    /// The amplitudes reshaped into a `dim_a x dim_b` matrix, row `m` holding
    /// Alice index `m`.
    pub fn coefficient_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.dim_a, self.dim_b, |m, n| self.amp(m, n))
    }

    /// Inverse of [`coefficient_matrix`](Self::coefficient_matrix); the matrix
    /// is normalized like any other constructor input.
    pub fn from_coefficient_matrix(m: &CMatrix) -> Result<Self> {
        let (da, db) = m.shape();
        let mut amps = Vec::with_capacity(da * db);
        for i in 0..da {
            for j in 0..db {
                amps.push(m[(i, j)]);
            }
        }
        Self::new(da, db, amps)
    }

    /// Schmidt decomposition via singular values of the coefficient matrix.
    pub fn schmidt(&self) -> SchmidtDecomposition {
        let m = self.coefficient_matrix();
        let svd = m.svd(true, true);
        let u = svd.u.expect("svd requested u");
        let vt = svd.v_t.expect("svd requested v_t");
        let mut triples: Vec<(f64, CVector, CVector)> = (0..svd.singular_values.len())
            .map(|i| {
                let alice = u.column(i).clone_owned();
                let bob = vt.row(i).transpose();
                (svd.singular_values[i], alice, bob)
            })
            .collect();
        triples.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("singular values are finite"));
        let mut coefficients = Vec::with_capacity(triples.len());
        let mut alice_vectors = Vec::with_capacity(triples.len());
        let mut bob_vectors = Vec::with_capacity(triples.len());
        for (s, a, b) in triples {
            coefficients.push(s);
            alice_vectors.push(a);
            bob_vectors.push(b);
        }
        SchmidtDecomposition {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            coefficients,
            alice_vectors,
            bob_vectors,
        }
    }

    /// Applies `op` to one party's subsystem. Returns the outcome probability
    /// ‖(op ⊗ 1)∣x⟩‖² together with the renormalized post-state, or `None`
    /// for a numerically dead branch. `op` must have `dim_of(party)` columns;
    /// a non-square `op` changes that party's dimension.
    pub fn apply_local(&self, op: &CMatrix, party: Party) -> Result<LocalOutcome> {
        if op.ncols() != self.dim_of(party) {
            return Err(Error::DimensionMismatch(format!(
                "operator has {} columns but party {} has dimension {}",
                op.ncols(),
                party.label(),
                self.dim_of(party)
            )));
        }
        let m = self.coefficient_matrix();
        let post = match party {
            Party::Alice => op * m,
            Party::Bob => m * op.transpose(),
        };
        let probability: f64 = post.iter().map(|c| c.norm_sqr()).sum();
        let state = if probability > BRANCH_TOL {
            Some(Self::from_coefficient_matrix(&post)?)
        } else {
            None
        };
        Ok(LocalOutcome { probability, state })
    }
}

/// Result of applying a local operator: the branch weight and, when the
/// branch is alive, the renormalized state.
#[derive(Clone, Debug)]
pub struct LocalOutcome {
    pub probability: f64,
    pub state: Option<StateVector>,
}

/// Schmidt form λ_1 ∣a_1 b_1⟩ + λ_2 ∣a_2 b_2⟩ + … with coefficients sorted
/// descending and orthonormal local vectors.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    dim_a: usize,
    dim_b: usize,
    pub coefficients: Vec<f64>,
    pub alice_vectors: Vec<CVector>,
    pub bob_vectors: Vec<CVector>,
}

impl SchmidtDecomposition {
    /// Number of coefficients above the rank tolerance.
    pub fn rank(&self) -> usize {
        self.coefficients.iter().filter(|&&s| s > RANK_TOL).count()
    }

    /// Squared coefficients, i.e. the reduced-state spectrum.
    pub fn probabilities(&self) -> Vec<f64> {
        self.coefficients.iter().map(|s| s * s).collect()
    }

    /// Rebuilds the state Σ_i λ_i ∣a_i⟩∣b_i⟩; equals the original up to
    /// global phase.
    pub fn reconstruct(&self) -> Result<StateVector> {
        let mut m = CMatrix::zeros(self.dim_a, self.dim_b);
        for i in 0..self.coefficients.len() {
            let s = C64::new(self.coefficients[i], 0.0);
            m += (&self.alice_vectors[i] * self.bob_vectors[i].transpose()).scale(1.0) * s;
        }
        StateVector::from_coefficient_matrix(&m)
    }
}

/// Multiplies by a global phase so the first amplitude above the phase
/// tolerance comes out real and non-negative.
fn fix_phase(v: &mut CVector) {
    if let Some(c) = v.iter().find(|c| c.norm() > PHASE_TOL) {
        let phase = c / c.norm();
        let correction = phase.conj();
        for a in v.iter_mut() {
            *a *= correction;
        }
    }
}

/// Smallest singular value of `m` together with a unit vector (numerically)
/// annihilated by it. Wide matrices are zero-padded to square first so
/// structural kernel directions are not lost to the thin SVD.
pub(crate) fn min_singular_kernel(m: &CMatrix) -> (f64, CVector) {
    let work = if m.nrows() < m.ncols() {
        let mut padded = CMatrix::zeros(m.ncols(), m.ncols());
        padded.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let vt = svd.v_t.expect("svd requested v_t");
    let mut min_idx = 0;
    for i in 1..svd.singular_values.len() {
        if svd.singular_values[i] < svd.singular_values[min_idx] {
            min_idx = i;
        }
    }
    let kernel = vt.row(min_idx).map(|c| c.conj()).transpose();
    (svd.singular_values[min_idx], kernel)
}
