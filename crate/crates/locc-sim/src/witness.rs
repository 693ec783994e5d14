//! Conclusive identifiability of a single member of a state set.
//!
//! A member ∣φ_t⟩ of a set is identifiable when some product state ∣αβ⟩ has
//! nonzero overlap with it and zero overlap with every other member. A local
//! protocol can then include ∣αβ⟩⟨αβ∣ as an outcome and announce t whenever
//! it fires. If some member admits no such witness, no local protocol can
//! discriminate the set perfectly, so a failed search here rules out perfect
//! one-shot local discrimination of the whole set.
//!
//! Fixing Alice's amplitudes α turns the orthogonality constraints into the
//! linear system M(α) β = 0, where row j of M(α) is αᵀ conj(Φ_j) for the
//! coefficient matrix Φ_j of each non-target member. A witness exists at α
//! exactly when the kernel of M(α) contains a β that still overlaps the
//! target. [`certify_2x2`] walks the determinant roots of that system
//! exactly when both sides are qubits and there are two constraints;
//! [`search_numeric`] samples α at random and polishes the most promising
//! candidates otherwise.

use nalgebra::SVD;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::StateSet;
use crate::state::{CMatrix, CVector, StateVector};
use crate::{KERNEL_TOL, LINALG_TOL, OVERLAP_TOL};

/// Coefficients below this are treated as exactly zero when classifying the
/// determinant polynomial in the certified route.
const EXACT_TOL: f64 = 1e-12;

/// Weight of the overlap bonus in the polish objective. Small enough that
/// driving the constraint residual to zero always dominates.
const PENALTY_WEIGHT: f64 = 1e-3;

/* Problem setup **************************************************************/

/// One identifiability question: does a product witness exist for the member
/// at `target`?
#[derive(Debug, Clone)]
pub struct WitnessProblem {
    set: StateSet,
    target: usize,
    /// Conjugated coefficient matrices of the non-target members, in set
    /// order with the target skipped.
    constraints: Vec<CMatrix>,
    /// Conjugated coefficient matrix of the target member.
    target_matrix: CMatrix,
}

impl WitnessProblem {
    /// Poses the question for `set[target]`.
    pub fn new(set: &StateSet, target: usize) -> Result<Self> {
        if target >= set.len() {
            return Err(Error::InvalidParameter(format!(
                "target index {target} out of range for a set of {} states",
                set.len()
            )));
        }
        let conj = |s: &StateVector| s.coefficient_matrix().map(|c| c.conj());
        let constraints = set
            .states()
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != target)
            .map(|(_, s)| conj(s))
            .collect();
        Ok(Self {
            set: set.clone(),
            target,
            constraints,
            target_matrix: conj(&set.states()[target]),
        })
    }

    /// The set under consideration.
    pub fn set(&self) -> &StateSet {
        &self.set
    }

    /// Index of the member a witness must single out.
    pub fn target(&self) -> usize {
        self.target
    }

    /// Alice-side dimension of the members.
    pub fn dim_a(&self) -> usize {
        self.set.dim_a()
    }

    /// Bob-side dimension of the members.
    pub fn dim_b(&self) -> usize {
        self.set.dim_b()
    }

    /// The linear system a witness's Bob amplitudes must solve once Alice's
    /// amplitudes are fixed: row j is αᵀ conj(Φ_j) over the non-target
    /// members, so M(α) β is the vector of overlaps ⟨αβ∣φ_j⟩ conjugated.
    pub fn constraint_matrix(&self, alpha: &CVector) -> CMatrix {
        let rows = self.constraints.len();
        let cols = self.dim_b();
        CMatrix::from_fn(rows, cols, |j, c| {
            (0..self.dim_a()).map(|m| alpha[m] * self.constraints[j][(m, c)]).sum()
        })
    }

    /// Overlap of the candidate product state with the target member,
    /// ⟨αβ∣φ_target⟩ up to conjugation; only its magnitude matters.
    pub fn target_overlap(&self, alpha: &CVector, beta: &CVector) -> C64 {
        let u = &self.target_matrix * beta;
        alpha.iter().zip(u.iter()).map(|(a, b)| a * b).sum()
    }

    /// Assembles the product state ∣αβ⟩ from normalized copies of the two
    /// amplitude vectors.
    pub fn witness_state(&self, alpha: &CVector, beta: &CVector) -> Result<StateVector> {
        let scale = |v: &CVector| {
            let n = v.norm();
            v.iter().map(|c| c / C64::new(n, 0.0)).collect::<Vec<_>>()
        };
        let a = StateVector::new(self.dim_a(), 1, scale(alpha))?;
        let b = StateVector::new(1, self.dim_b(), scale(beta))?;
        Ok(a.tensor_product(&b))
    }

    /// Direct soundness check of a candidate witness against every member of
    /// the set, bypassing the constraint-matrix machinery.
    pub fn check_witness(&self, alpha: &CVector, beta: &CVector) -> Result<WitnessCheck> {
        let w = self.witness_state(alpha, beta)?;
        let mut max_residual: f64 = 0.0;
        let mut overlap = 0.0;
        for (j, phi) in self.set.states().iter().enumerate() {
            let value = w.inner_product(phi)?.norm();
            if j == self.target {
                overlap = value;
            } else {
                max_residual = max_residual.max(value);
            }
        }
        Ok(WitnessCheck { max_residual, overlap })
    }
}

/// Result of re-verifying a witness by direct inner products.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WitnessCheck {
    /// Largest magnitude of overlap with any non-target member.
    pub max_residual: f64,
    /// Magnitude of overlap with the target member.
    pub overlap: f64,
}

impl WitnessCheck {
    /// True when the witness annihilates every non-target member within
    /// tolerance and keeps a usable overlap with the target.
    pub fn sound(&self) -> bool {
        self.max_residual <= LINALG_TOL && self.overlap > OVERLAP_TOL
    }
}

/* Verdicts *******************************************************************/

/// How an identifiability question was settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentifyStatus {
    /// A sound witness was found and re-verified.
    Identifiable,
    /// The exact 2 ⊗ 2 route enumerated every kernel and none overlaps the
    /// target above threshold.
    NotIdentifiableCertified,
    /// The numeric search exhausted its sample budget without a witness;
    /// evidence, not proof.
    NotIdentifiableNumerical,
}

/// A concrete product witness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductWitness {
    /// Alice's amplitudes, normalized.
    pub alice: Vec<C64>,
    /// Bob's amplitudes, normalized.
    pub bob: Vec<C64>,
    /// Magnitude of the overlap with the target member.
    pub overlap: f64,
    /// Largest residual overlap with a non-target member.
    pub max_residual: f64,
}

impl ProductWitness {
    /// The witness as a product state.
    pub fn state(&self, problem: &WitnessProblem) -> Result<StateVector> {
        let alpha = CVector::from_vec(self.alice.clone());
        let beta = CVector::from_vec(self.bob.clone());
        problem.witness_state(&alpha, &beta)
    }
}

/// Outcome of one identifiability question.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentifiabilityVerdict {
    /// Index of the member the question was about.
    pub target: usize,
    /// How the question was settled.
    pub status: IdentifyStatus,
    /// The witness, when one was found.
    pub witness: Option<ProductWitness>,
    /// Largest target overlap seen among candidates that satisfied the
    /// orthogonality constraints within tolerance.
    pub max_overlap: f64,
    /// Smallest constraint residual reached by any candidate.
    pub best_sigma_min: f64,
    /// Random α samples drawn; zero for the certified route.
    pub samples: usize,
    /// Seed of the search stream, absent for the certified route.
    pub seed: Option<u64>,
}

impl IdentifiabilityVerdict {
    /// True when a sound witness was found.
    pub fn identifiable(&self) -> bool {
        self.status == IdentifyStatus::Identifiable
    }
}

/// Identifiability of every member of a set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetIdentifiability {
    /// One verdict per member, in set order.
    pub verdicts: Vec<IdentifiabilityVerdict>,
    /// True when every member came back identifiable.
    pub all_identifiable: bool,
    /// True when some member admits no witness, which rules out perfect
    /// discrimination of the set by any one-shot local protocol.
    pub perfect_locc_excluded: bool,
}

/* Shared evaluation **********************************************************/

/// A fixed α together with the best Bob response found for it.
struct Candidate {
    alpha: CVector,
    /// Smallest singular value of M(α); the constraint residual of `beta`.
    sigma_min: f64,
    /// Kernel vector of M(α), chosen to maximize target overlap when the
    /// kernel has more than one dimension.
    beta: CVector,
    /// ∣⟨αβ∣φ_target⟩∣ for that β.
    overlap: f64,
}

impl Candidate {
    /// Polish objective: drive the residual down, with a small bonus for
    /// target overlap to break ties between kernel points.
    fn penalty(&self) -> f64 {
        self.sigma_min - PENALTY_WEIGHT * self.overlap
    }
}

/// Evaluates a fixed α: computes M(α), extracts the kernel-side singular
/// vectors, and picks the β in the near-kernel subspace with the largest
/// target overlap. Wide matrices are zero padded so the decomposition keeps
/// structural kernel directions.
fn evaluate(problem: &WitnessProblem, alpha: &CVector) -> Candidate {
    let m = problem.constraint_matrix(alpha);
    let cols = m.ncols();
    let square = if m.nrows() < cols {
        let mut padded = CMatrix::zeros(cols, cols);
        padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(&m);
        padded
    } else {
        m
    };
    let svd = SVD::new(square, false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[a].partial_cmp(&svd.singular_values[b]).expect("finite")
    });
    let sigma_min = svd.singular_values[order[0]];
    let right = |i: usize| v_t.row(i).map(|c| c.conj()).transpose();

    let kernel: Vec<CVector> = order
        .iter()
        .take_while(|&&i| svd.singular_values[i] <= KERNEL_TOL)
        .map(|&i| right(i))
        .collect();
    if kernel.is_empty() {
        let beta = right(order[0]);
        let overlap = problem.target_overlap(alpha, &beta).norm();
        return Candidate { alpha: alpha.clone(), sigma_min, beta, overlap };
    }
    // Within the kernel span, the overlap is linear in the coefficients, so
    // the maximizing combination is the conjugated coefficient vector itself.
    let coeffs: Vec<C64> =
        kernel.iter().map(|b| problem.target_overlap(alpha, b)).collect();
    let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let beta = if norm > 0.0 {
        let mut b = CVector::zeros(kernel[0].len());
        for (c, k) in coeffs.iter().zip(&kernel) {
            b += k * (c.conj() / C64::new(norm, 0.0));
        }
        b
    } else {
        kernel[0].clone()
    };
    let overlap = problem.target_overlap(alpha, &beta).norm();
    Candidate { alpha: alpha.clone(), sigma_min, beta, overlap }
}

/// Promotes a candidate to a verdict when it passes the direct soundness
/// check against the full set.
fn try_witness(
    problem: &WitnessProblem,
    candidate: &Candidate,
    samples: usize,
    seed: Option<u64>,
) -> Result<Option<IdentifiabilityVerdict>> {
    if candidate.sigma_min > KERNEL_TOL || candidate.overlap <= OVERLAP_TOL {
        return Ok(None);
    }
    let check = problem.check_witness(&candidate.alpha, &candidate.beta)?;
    if !check.sound() {
        return Ok(None);
    }
    let normalize = |v: &CVector| {
        let n = v.norm();
        v.iter().map(|c| c / C64::new(n, 0.0)).collect::<Vec<_>>()
    };
    Ok(Some(IdentifiabilityVerdict {
        target: problem.target(),
        status: IdentifyStatus::Identifiable,
        witness: Some(ProductWitness {
            alice: normalize(&candidate.alpha),
            bob: normalize(&candidate.beta),
            overlap: check.overlap,
            max_residual: check.max_residual,
        }),
        max_overlap: check.overlap,
        best_sigma_min: candidate.sigma_min,
        samples,
        seed,
    }))
}

/* Certified 2x2 route ********************************************************/

/// Settles identifiability exactly when both parties hold qubits and there
/// are exactly two constraints. det M(α) is then a homogeneous quadratic in
/// α = (α₀, α₁); its projective roots are the only α with a kernel, so
/// checking the target overlap at each root settles the question without
/// sampling. When the determinant vanishes identically every α has a kernel,
/// and the kernel direction is itself polynomial in α, so the overlap
/// becomes a quadratic that is either identically zero or lands a witness at
/// one of a handful of test points.
pub fn certify_2x2(problem: &WitnessProblem) -> Result<IdentifiabilityVerdict> {
    if problem.dim_a() != 2 || problem.dim_b() != 2 || problem.constraints.len() != 2 {
        return Err(Error::Unsupported(format!(
            "the certified route needs qubits on both sides and exactly 2 \
             constraints, got {}x{} with {}",
            problem.dim_a(),
            problem.dim_b(),
            problem.constraints.len()
        )));
    }
    let alpha_of = |a0: C64, a1: C64| CVector::from_vec(vec![a0, a1]);
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let det = |a0: C64, a1: C64| {
        let m = problem.constraint_matrix(&alpha_of(a0, a1));
        m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
    };
    // det(α) = A α₀² + B α₀α₁ + C α₁², recovered from three evaluations.
    let a = det(one, zero);
    let c = det(zero, one);
    let b = det(one, one) - a - c;

    if a.norm().max(b.norm()).max(c.norm()) <= EXACT_TOL {
        return certify_degenerate(problem);
    }

    let mut roots: Vec<CVector> = Vec::new();
    if c.norm() > EXACT_TOL {
        // Two projective roots (1, t±) of C t² + B t + A.
        let disc = (b * b - C64::new(4.0, 0.0) * a * c).sqrt();
        for sign in [1.0, -1.0] {
            let t = (-b + disc * C64::new(sign, 0.0)) / (C64::new(2.0, 0.0) * c);
            roots.push(alpha_of(one, t));
        }
    } else {
        // Leading coefficient vanishes: (0, 1) is a root at infinity.
        roots.push(alpha_of(zero, one));
        if b.norm() > EXACT_TOL {
            roots.push(alpha_of(one, -a / b));
        }
    }

    let mut best: Option<Candidate> = None;
    for root in &roots {
        let unit = root.map(|c| c / C64::new(root.norm(), 0.0));
        let candidate = evaluate(problem, &unit);
        if let Some(verdict) = try_witness(problem, &candidate, 0, None)? {
            return Ok(verdict);
        }
        if best.as_ref().map_or(true, |b| candidate.overlap > b.overlap) {
            best = Some(candidate);
        }
    }
    let best = best.expect("at least one determinant root exists");
    Ok(IdentifiabilityVerdict {
        target: problem.target(),
        status: IdentifyStatus::NotIdentifiableCertified,
        witness: None,
        max_overlap: best.overlap,
        best_sigma_min: best.sigma_min,
        samples: 0,
        seed: None,
    })
}

/// Handles det M(α) ≡ 0. Generically M(α) then has rank 1 with kernel
/// direction (M₀₁, −M₀₀) or (M₁₁, −M₁₀), both linear in α, so the target
/// overlap along either direction is a homogeneous quadratic f(α). Each f is
/// identically zero or nonzero at one of four distinct test points (a
/// quadratic has at most two projective roots). The only α not covered are
/// where M(α) vanishes entirely; those form the common left kernel of the
/// constraint matrices and are checked separately with a free choice of β.
fn certify_degenerate(problem: &WitnessProblem) -> Result<IdentifiabilityVerdict> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let test_points = [
        (one, zero),
        (zero, one),
        (one, one),
        (one, C64::new(0.0, 1.0)),
    ];

    let mut best: Option<Candidate> = None;
    let mut consider = |problem: &WitnessProblem,
                        alpha: &CVector,
                        beta: &CVector|
     -> Result<Option<IdentifiabilityVerdict>> {
        if alpha.norm() <= EXACT_TOL || beta.norm() <= EXACT_TOL {
            return Ok(None);
        }
        let unit_a = alpha.map(|c| c / C64::new(alpha.norm(), 0.0));
        let unit_b = beta.map(|c| c / C64::new(beta.norm(), 0.0));
        let check = problem.check_witness(&unit_a, &unit_b)?;
        let candidate = Candidate {
            alpha: unit_a,
            sigma_min: check.max_residual,
            beta: unit_b,
            overlap: check.overlap,
        };
        let verdict = try_witness(problem, &candidate, 0, None)?;
        if verdict.is_none()
            && check.max_residual <= KERNEL_TOL
            && best.as_ref().map_or(true, |b| candidate.overlap > b.overlap)
        {
            best = Some(candidate);
        }
        Ok(verdict)
    };

    // Rank-1 kernels, both polynomial kernel forms.
    for (a0, a1) in test_points {
        let alpha = CVector::from_vec(vec![a0, a1]);
        let m = problem.constraint_matrix(&alpha);
        for beta in [
            CVector::from_vec(vec![m[(0, 1)], -m[(0, 0)]]),
            CVector::from_vec(vec![m[(1, 1)], -m[(1, 0)]]),
        ] {
            if let Some(v) = consider(problem, &alpha, &beta)? {
                return Ok(v);
            }
        }
    }

    // Rank-0 points: α in the common left kernel of both constraints, where
    // any β works, so take the one maximizing the target overlap.
    let stacked_t = CMatrix::from_fn(2 * problem.dim_b(), 2, |r, c| {
        let (j, col) = (r / problem.dim_b(), r % problem.dim_b());
        problem.constraints[j][(c, col)]
    });
    let (sigma, alpha) = crate::state::min_singular_kernel(&stacked_t);
    if sigma <= EXACT_TOL {
        let u = problem.target_matrix.transpose() * &alpha;
        let beta = u.map(|c| c.conj());
        if let Some(v) = consider(problem, &alpha, &beta)? {
            return Ok(v);
        }
    }

    let (max_overlap, best_sigma_min) =
        best.map_or((0.0, 0.0), |b| (b.overlap, b.sigma_min));
    Ok(IdentifiabilityVerdict {
        target: problem.target(),
        status: IdentifyStatus::NotIdentifiableCertified,
        witness: None,
        max_overlap,
        best_sigma_min,
        samples: 0,
        seed: None,
    })
}

/* Numeric search *************************************************************/

/// Budget and seed for [`search_numeric`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Random α samples to draw.
    pub samples: usize,
    /// Descent iterations spent polishing each shortlisted candidate.
    pub polish_iterations: usize,
    /// How many of the lowest-residual candidates to polish.
    pub polish_starts: usize,
    /// Stream seed; the same seed reproduces the search exactly.
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { samples: 50_000, polish_iterations: 300, polish_starts: 8, seed: 7 }
    }
}

impl SearchConfig {
    /// Default budget with a caller-chosen seed.
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

/// Two independent standard normal draws via Box-Muller.
fn gaussian_pair(rng: &mut impl Rng) -> (f64, f64) {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = std::f64::consts::TAU * u2;
    (r * theta.cos(), r * theta.sin())
}

/// A Haar-uniform unit vector of complex amplitudes.
fn random_direction(rng: &mut impl Rng, dim: usize) -> CVector {
    let v = CVector::from_fn(dim, |_, _| {
        let (re, im) = gaussian_pair(rng);
        C64::new(re, im)
    });
    let n = v.norm();
    v.map(|c| c / C64::new(n, 0.0))
}

/// Searches for a product witness by sampling Alice amplitudes. Starts from
/// a deterministic prelude (computational basis directions and the uniform
/// superposition, which settle the common families immediately), then draws
/// `samples` Haar-random directions, each from its own counter-derived
/// stream so runs are reproducible and order independent. The
/// lowest-residual candidates are polished by alternating kernel extraction
/// between the two sides, with random perturbations as a fallback when the
/// alternation stalls. Every accepted witness is re-verified by direct
/// inner products before the verdict says identifiable.
pub fn search_numeric(
    problem: &WitnessProblem,
    config: &SearchConfig,
) -> Result<IdentifiabilityVerdict> {
    let dim_a = problem.dim_a();
    let mut prelude: Vec<CVector> = (0..dim_a)
        .map(|m| CVector::from_fn(dim_a, |i, _| C64::new(if i == m { 1.0 } else { 0.0 }, 0.0)))
        .collect();
    let uniform = 1.0 / (dim_a as f64).sqrt();
    prelude.push(CVector::from_element(dim_a, C64::new(uniform, 0.0)));

    let mut shortlist: Vec<Candidate> = Vec::new();
    let mut max_overlap: f64 = 0.0;
    let mut best_sigma: f64 = f64::INFINITY;
    let mut drawn = 0usize;

    let absorb = |candidate: Candidate,
                      shortlist: &mut Vec<Candidate>,
                      max_overlap: &mut f64,
                      best_sigma: &mut f64| {
        *best_sigma = best_sigma.min(candidate.sigma_min);
        if candidate.sigma_min <= KERNEL_TOL {
            *max_overlap = max_overlap.max(candidate.overlap);
        }
        shortlist.push(candidate);
        shortlist.sort_by(|x, y| x.penalty().partial_cmp(&y.penalty()).expect("finite"));
        shortlist.truncate(config.polish_starts.max(1));
    };

    for alpha in &prelude {
        let candidate = evaluate(problem, alpha);
        if let Some(v) = try_witness(problem, &candidate, drawn, Some(config.seed))? {
            return Ok(v);
        }
        absorb(candidate, &mut shortlist, &mut max_overlap, &mut best_sigma);
    }

    for i in 0..config.samples {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(i as u64);
        let alpha = random_direction(&mut rng, dim_a);
        drawn = i + 1;
        let candidate = evaluate(problem, &alpha);
        if let Some(v) = try_witness(problem, &candidate, drawn, Some(config.seed))? {
            return Ok(v);
        }
        absorb(candidate, &mut shortlist, &mut max_overlap, &mut best_sigma);
    }

    // Polish phase: alternate exact kernel extraction between the sides
    // (each alternation step is the global residual minimizer for the other
    // side held fixed), falling back to shrinking random perturbations.
    for (start, seed_candidate) in shortlist.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(u64::MAX - start as u64);
        let mut current = seed_candidate;
        let mut step = 0.25;
        for _ in 0..config.polish_iterations {
            let alternated = alternate_alpha(problem, &current);
            let proposal = evaluate(problem, &alternated);
            let accepted = if proposal.penalty() < current.penalty() - f64::EPSILON {
                proposal
            } else {
                let jittered = {
                    let noise = random_direction(&mut rng, dim_a);
                    let v = &current.alpha + noise * C64::new(step, 0.0);
                    let n = v.norm();
                    v.map(|c| c / C64::new(n, 0.0))
                };
                let perturbed = evaluate(problem, &jittered);
                if perturbed.penalty() < current.penalty() - f64::EPSILON {
                    perturbed
                } else {
                    step *= 0.8;
                    continue;
                }
            };
            current = accepted;
            if let Some(v) = try_witness(problem, &current, drawn, Some(config.seed))? {
                return Ok(v);
            }
            best_sigma = best_sigma.min(current.sigma_min);
            if current.sigma_min <= KERNEL_TOL {
                max_overlap = max_overlap.max(current.overlap);
            }
        }
    }

    Ok(IdentifiabilityVerdict {
        target: problem.target(),
        status: IdentifyStatus::NotIdentifiableNumerical,
        witness: None,
        max_overlap,
        best_sigma_min: best_sigma,
        samples: drawn,
        seed: Some(config.seed),
    })
}

/// The alternation step of the polish: with β fixed, the residual as a
/// function of α is ∥N α∥ for the matrix N whose rows are (C_j β)ᵀ, so the
/// minimizing α is N's smallest right singular vector.
fn alternate_alpha(problem: &WitnessProblem, current: &Candidate) -> CVector {
    let n = CMatrix::from_fn(problem.constraints.len(), problem.dim_a(), |j, m| {
        (0..problem.dim_b())
            .map(|c| problem.constraints[j][(m, c)] * current.beta[c])
            .sum()
    });
    let (_, alpha) = crate::state::min_singular_kernel(&n);
    alpha
}

/* Whole-set dispatch *********************************************************/

/// Settles identifiability for every member, certifying exactly where the
/// 2 ⊗ 2 route applies (qubits on both sides, three members) and searching
/// numerically otherwise. A single non-identifiable member already rules
/// out perfect one-shot local discrimination of the set.
pub fn check_set(set: &StateSet, config: &SearchConfig) -> Result<SetIdentifiability> {
    let certified = set.dim_a() == 2 && set.dim_b() == 2 && set.len() == 3;
    let mut verdicts = Vec::with_capacity(set.len());
    for target in 0..set.len() {
        let problem = WitnessProblem::new(set, target)?;
        let verdict = if certified {
            certify_2x2(&problem)?
        } else {
            search_numeric(&problem, config)?
        };
        verdicts.push(verdict);
    }
    let all_identifiable = verdicts.iter().all(|v| v.identifiable());
    Ok(SetIdentifiability { verdicts, all_identifiable, perfect_locc_excluded: !all_identifiable })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{gen_canonical_set, gen_hadamard_set_4x4};
    use crate::state::Party;
    use approx::assert_abs_diff_eq;

    fn cv(entries: &[(f64, f64)]) -> CVector {
        CVector::from_vec(entries.iter().map(|&(re, im)| C64::new(re, im)).collect())
    }

    #[test]
    fn constraint_rows_match_hand_computation() {
        // Target the first member of the two-qubit family; the constraints
        // come from the second entangled member and the product member.
        let set = gen_canonical_set(2).unwrap();
        let problem = WitnessProblem::new(&set, 0).unwrap();
        let s = 1.0 / 2f64.sqrt();

        let m = problem.constraint_matrix(&cv(&[(1.0, 0.0), (0.0, 0.0)]));
        assert_abs_diff_eq!(m[(0, 0)].re, s, epsilon = 1e-12);
        assert_abs_diff_eq!(m[(0, 1)].norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((m[(1, 1)] - C64::new(1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);

        let m = problem.constraint_matrix(&cv(&[(0.0, 0.0), (1.0, 0.0)]));
        assert_abs_diff_eq!((m[(0, 1)] + C64::new(s, 0.0)).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.row(1).map(|c| c.norm()).sum(), 0.0, epsilon = 1e-12);
        // That α leaves the kernel β = (1, 0), whose witness ∣10⟩ has zero
        // overlap with the target.
        let beta = cv(&[(1.0, 0.0), (0.0, 0.0)]);
        assert_abs_diff_eq!(m.column(0).map(|c| c.norm()).sum(), 0.0, epsilon = 1e-12);
        let overlap = problem.target_overlap(&cv(&[(0.0, 0.0), (1.0, 0.0)]), &beta);
        assert_abs_diff_eq!(overlap.norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn certify_rules_out_entangled_members_of_the_two_qubit_family() {
        let set = gen_canonical_set(2).unwrap();
        for target in [0, 1] {
            let problem = WitnessProblem::new(&set, target).unwrap();
            let verdict = certify_2x2(&problem).unwrap();
            assert_eq!(verdict.status, IdentifyStatus::NotIdentifiableCertified);
            assert!(verdict.max_overlap <= OVERLAP_TOL, "target {target}");
            assert!(verdict.witness.is_none());
        }
    }

    #[test]
    fn certify_finds_the_product_member_witness() {
        let set = gen_canonical_set(2).unwrap();
        let problem = WitnessProblem::new(&set, 2).unwrap();
        let verdict = certify_2x2(&problem).unwrap();
        assert_eq!(verdict.status, IdentifyStatus::Identifiable);
        let witness = verdict.witness.expect("witness attached");
        assert!(witness.overlap > 0.9, "the member is its own witness");
        assert!(witness.max_residual <= LINALG_TOL);
        let state = witness.state(&problem).unwrap();
        assert!(state.same_up_to_phase(&set.states()[2], 1e-9));
    }

    #[test]
    fn certify_statuses_survive_local_unitaries() {
        let set = gen_canonical_set(2).unwrap();
        let theta = 0.73f64;
        let u = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(theta.cos(), 0.0),
                C64::new(-theta.sin(), 0.0),
                C64::new(theta.sin(), 0.0),
                C64::new(theta.cos(), 0.0),
            ],
        );
        let rotated: Vec<_> = set
            .states()
            .iter()
            .map(|s| s.apply_local(&u, Party::Bob).unwrap().state.unwrap())
            .collect();
        let rotated_set = StateSet::new(rotated, crate::families::Family::Custom).unwrap();
        for target in 0..3 {
            let before =
                certify_2x2(&WitnessProblem::new(&set, target).unwrap()).unwrap();
            let after =
                certify_2x2(&WitnessProblem::new(&rotated_set, target).unwrap()).unwrap();
            assert_eq!(before.status, after.status, "target {target}");
        }
    }

    #[test]
    fn certify_handles_identically_zero_determinants() {
        // Constraints ∣00⟩ and ∣10⟩ share the Bob-side kernel β = (0, 1):
        // det M(α) ≡ 0, yet the target ∣01⟩ is identifiable through it.
        let states = vec![
            StateVector::ket(2, 2, 0, 0).unwrap(),
            StateVector::ket(2, 2, 1, 0).unwrap(),
            StateVector::ket(2, 2, 0, 1).unwrap(),
        ];
        let set = StateSet::new(states, crate::families::Family::Custom).unwrap();
        let problem = WitnessProblem::new(&set, 2).unwrap();
        let verdict = certify_2x2(&problem).unwrap();
        assert_eq!(verdict.status, IdentifyStatus::Identifiable);
        assert!(verdict.witness.unwrap().overlap > 0.9);
    }

    #[test]
    fn numeric_search_finds_the_product_member_quickly() {
        let set = gen_canonical_set(3).unwrap();
        let problem = WitnessProblem::new(&set, 3).unwrap();
        let config = SearchConfig { samples: 50, polish_iterations: 20, ..Default::default() };
        let verdict = search_numeric(&problem, &config).unwrap();
        assert_eq!(verdict.status, IdentifyStatus::Identifiable);
        // The prelude candidate α = e₀ already works, so no samples drawn.
        assert_eq!(verdict.samples, 0);
        let witness = verdict.witness.unwrap();
        assert!(witness.max_residual <= LINALG_TOL);
        assert!(witness.overlap > OVERLAP_TOL);
    }

    #[test]
    fn numeric_search_reports_no_witness_for_entangled_members() {
        let set = gen_canonical_set(3).unwrap();
        let problem = WitnessProblem::new(&set, 0).unwrap();
        let config = SearchConfig {
            samples: 2_000,
            polish_iterations: 150,
            polish_starts: 4,
            seed: 11,
        };
        let verdict = search_numeric(&problem, &config).unwrap();
        assert_eq!(verdict.status, IdentifyStatus::NotIdentifiableNumerical);
        assert!(verdict.max_overlap < OVERLAP_TOL, "max overlap {}", verdict.max_overlap);
        assert!(verdict.best_sigma_min <= KERNEL_TOL, "the polish reaches the kernel variety");
        assert_eq!(verdict.seed, Some(11));
        assert_eq!(verdict.samples, 2_000);
    }

    #[test]
    fn numeric_search_is_reproducible() {
        let set = gen_hadamard_set_4x4().unwrap();
        let problem = WitnessProblem::new(&set, 0).unwrap();
        let config =
            SearchConfig { samples: 500, polish_iterations: 50, polish_starts: 3, seed: 5 };
        let first = search_numeric(&problem, &config).unwrap();
        let second = search_numeric(&problem, &config).unwrap();
        assert_eq!(first.status, second.status);
        assert_eq!(first.max_overlap.to_bits(), second.max_overlap.to_bits());
        assert_eq!(first.best_sigma_min.to_bits(), second.best_sigma_min.to_bits());
    }

    #[test]
    fn check_set_dispatches_and_flags_the_two_qubit_family() {
        let set = gen_canonical_set(2).unwrap();
        let report = check_set(&set, &SearchConfig::default()).unwrap();
        assert_eq!(report.verdicts.len(), 3);
        assert_eq!(report.verdicts[0].status, IdentifyStatus::NotIdentifiableCertified);
        assert_eq!(report.verdicts[1].status, IdentifyStatus::NotIdentifiableCertified);
        assert_eq!(report.verdicts[2].status, IdentifyStatus::Identifiable);
        assert!(!report.all_identifiable);
        assert!(report.perfect_locc_excluded);
    }

    #[test]
    fn product_members_self_witness_across_families() {
        let config = SearchConfig { samples: 100, polish_iterations: 20, ..Default::default() };
        for d in 2..=4 {
            let set = gen_canonical_set(d).unwrap();
            let target = set.len() - 1;
            let problem = WitnessProblem::new(&set, target).unwrap();
            let verdict = if d == 2 {
                certify_2x2(&problem).unwrap()
            } else {
                search_numeric(&problem, &config).unwrap()
            };
            assert_eq!(verdict.status, IdentifyStatus::Identifiable, "d = {d}");
            let witness = verdict.witness.unwrap();
            // Independent re-verification by direct inner products.
            let alpha = CVector::from_vec(witness.alice.clone());
            let beta = CVector::from_vec(witness.bob.clone());
            let check = problem.check_witness(&alpha, &beta).unwrap();
            assert!(check.sound());
        }
    }
}
