//! Entanglement measures and probabilistic resource conversion.
//!
//! The discrimination protocols consume one maximally entangled qubit pair.
//! When the parties only share a partially entangled pair they can gamble:
//! a local two-outcome filter on Alice's side either flattens the Schmidt
//! spectrum (success) or collapses the pair to a product state (failure).
//! The best achievable success chance for a rank-2 resource is twice its
//! smaller Schmidt weight, and [`conversion_filter`] realizes exactly that.
//! [`mc_assisted_discrimination`] chains the gamble with a discrimination
//! protocol and estimates the end-to-end success rate by simulation.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::builders::epr;
use crate::error::{Error, Result};
use crate::families::StateSet;
use crate::protocol::{Decode, ProtocolTree};
use crate::state::{CMatrix, CVector, Party, StateVector};
use crate::LINALG_TOL;

/* Measures *******************************************************************/

/// Entanglement entropy in bits: the base-2 entropy of the squared Schmidt
/// coefficients. Zero for product states, log₂ d for maximally entangled
/// states of a d ⊗ d system.
pub fn entanglement_entropy(state: &StateVector) -> f64 {
    state
        .schmidt()
        .probabilities()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Number of Schmidt coefficients above the rank cutoff.
pub fn schmidt_rank(state: &StateVector) -> usize {
    state.schmidt().rank()
}

/// Mean entanglement entropy over the members of a set.
pub fn average_entanglement(set: &StateSet) -> f64 {
    let total: f64 = set.states().iter().map(entanglement_entropy).sum();
    total / set.len() as f64
}

/// Largest probability with which local operations can convert the state
/// into a maximally entangled one of the same Schmidt rank: min(1, 2 Σ_{i≥2}
/// λ_i) over the squared Schmidt coefficients λ in descending order. One for
/// already maximal states, zero for product states.
pub fn vidal_probability(state: &StateVector) -> f64 {
    let tail: f64 = state.schmidt().probabilities().iter().skip(1).sum();
    (2.0 * tail).min(1.0)
}

/* Conversion *****************************************************************/

/// A two-outcome local filter on Alice's side that converts a rank-2
/// resource into a maximally entangled pair with the best possible success
/// probability.
#[derive(Debug, Clone)]
pub struct ConversionFilter {
    /// Success branch: rescales the dominant Schmidt direction down so both
    /// coefficients match. Applying it to the resource yields a maximally
    /// entangled state with probability [`success_probability`](Self::success_probability).
    pub success: CMatrix,
    /// Failure branch: completes the filter to a valid measurement. The
    /// post-failure state is a product state.
    pub failure: CMatrix,
    /// Probability that the success branch fires on the resource the filter
    /// was built for.
    pub success_probability: f64,
    /// Local unitary rotating Alice's Schmidt vectors onto computational
    /// kets, so the success branch lands on the standard form Σ∣ii⟩/√2.
    pub alice_correction: CMatrix,
    /// Same rotation for Bob's side.
    pub bob_correction: CMatrix,
}

/// Builds the optimal conversion filter for a rank-2 resource. The success
/// operator scales Alice's dominant Schmidt vector by σ₂/σ₁ and keeps the
/// other; the failure operator makes the pair complete. Resources of any
/// other Schmidt rank are rejected: product states have nothing to convert,
/// and higher ranks need more than one filtering round.
pub fn conversion_filter(resource: &StateVector) -> Result<ConversionFilter> {
    let sd = resource.schmidt();
    if sd.rank() != 2 {
        return Err(Error::InvalidParameter(format!(
            "conversion needs a Schmidt rank 2 resource, got rank {}",
            sd.rank()
        )));
    }
    let (s1, s2) = (sd.coefficients[0], sd.coefficients[1]);
    let ratio = s2 / s1;
    let a1 = &sd.alice_vectors[0];
    let a2 = &sd.alice_vectors[1];
    let dim = resource.dim_a();

    let outer = |v: &CVector, scale: f64| -> CMatrix {
        let mut m = CMatrix::zeros(dim, dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = v[r] * v[c].conj() * C64::new(scale, 0.0);
            }
        }
        m
    };
    let success = outer(a1, ratio) + outer(a2, 1.0);
    // Failure keeps completeness exact: √(1 − (σ₂/σ₁)²) on the dominant
    // direction, identity on everything outside the Schmidt span.
    let mut failure = CMatrix::identity(dim, dim) - outer(a1, 1.0) - outer(a2, 1.0);
    failure += outer(a1, (1.0 - ratio * ratio).sqrt());

    let correction = |vectors: &[CVector], dim: usize| -> Result<CMatrix> {
        let basis = complete_basis(vectors, dim)?;
        // Rows of the unitary are the conjugated basis vectors, so basis
        // vector i maps onto computational ket i.
        Ok(CMatrix::from_fn(dim, dim, |r, c| basis[r][c].conj()))
    };

    Ok(ConversionFilter {
        success,
        failure,
        success_probability: 2.0 * s2 * s2,
        alice_correction: correction(&sd.alice_vectors[..2], resource.dim_a())?,
        bob_correction: correction(&sd.bob_vectors[..2], resource.dim_b())?,
    })
}

/// Extends an orthonormal list to a full orthonormal basis by Gram-Schmidt
/// against the computational kets.
fn complete_basis(vectors: &[CVector], dim: usize) -> Result<Vec<CVector>> {
    let mut basis: Vec<CVector> = vectors.to_vec();
    for k in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut w = CVector::from_fn(dim, |i, _| {
            C64::new(if i == k { 1.0 } else { 0.0 }, 0.0)
        });
        for b in &basis {
            let overlap = b.dotc(&w);
            w -= b * overlap;
        }
        let norm = w.norm();
        if norm > LINALG_TOL.sqrt() {
            basis.push(w.map(|c| c / C64::new(norm, 0.0)));
        }
    }
    if basis.len() != dim {
        return Err(Error::Numerical("failed to complete an orthonormal basis".into()));
    }
    Ok(basis)
}

/* Monte Carlo ****************************************************************/

/// Trial count and seed for [`mc_assisted_discrimination`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct McConfig {
    /// Number of independent trials.
    pub trials: usize,
    /// Stream seed; each trial derives its own substream, so the same seed
    /// reproduces the run exactly.
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { trials: 10_000, seed: 17 }
    }
}

/// Outcome tallies of a Monte Carlo run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McReport {
    /// Trials simulated.
    pub trials: usize,
    /// Seed the run was stamped with.
    pub seed: u64,
    /// Trials where the protocol announced the correct member.
    pub successes: usize,
    /// Trials lost to a failed conversion or an inconclusive outcome.
    pub inconclusive: usize,
    /// Trials where the protocol announced a wrong member.
    pub errors: usize,
    /// Success fraction.
    pub estimate: f64,
    /// Binomial standard error of the estimate.
    pub standard_error: f64,
    /// The conversion success chance implied by the resource's Schmidt
    /// spectrum, for comparison against the estimate.
    pub conversion_probability: f64,
}

/// Estimates the end-to-end success rate of discrimination assisted by a
/// partially entangled resource pair. Each trial draws a member uniformly,
/// gambles the resource through [`conversion_filter`], and on success runs
/// the protocol built by `build` with the converted pair attached; a failed
/// conversion leaves a product pair that cannot assist, so the trial counts
/// as inconclusive. With a perfect protocol the estimate converges on the
/// conversion probability, and error tallies stay at zero.
///
/// The resource must be a Schmidt rank 2 qubit pair. Trials are independent
/// substreams of the seed, so reports are reproducible.
pub fn mc_assisted_discrimination(
    set: &StateSet,
    resource: &StateVector,
    config: &McConfig,
    build: &dyn Fn(&StateSet) -> Result<ProtocolTree>,
) -> Result<McReport> {
    if resource.dim_a() != 2 || resource.dim_b() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "the resource must be a qubit pair, got {} x {}",
            resource.dim_a(),
            resource.dim_b()
        )));
    }
    if config.trials == 0 {
        return Err(Error::InvalidParameter("trial count must be positive".into()));
    }
    let filter = conversion_filter(resource)?;
    let tree = build(set)?;
    let success_branch = resource.apply_local(&filter.success, Party::Alice)?;
    let converted_raw = success_branch.state.ok_or_else(|| {
        Error::Numerical("conversion success branch has vanishing probability".into())
    })?;
    let converted = converted_raw
        .apply_local(&filter.alice_correction, Party::Alice)?
        .state
        .expect("unitaries preserve the branch")
        .apply_local(&filter.bob_correction, Party::Bob)?
        .state
        .expect("unitaries preserve the branch");
    if !converted.same_up_to_phase(&epr(), LINALG_TOL) {
        return Err(Error::Numerical(
            "conversion did not land on the maximally entangled pair".into(),
        ));
    }
    let p_convert = success_branch.probability;

    let mut successes = 0usize;
    let mut inconclusive = 0usize;
    let mut errors = 0usize;
    for trial in 0..config.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(trial as u64);
        let index = rng.gen_range(0..set.len());
        if rng.gen::<f64>() >= p_convert {
            inconclusive += 1;
            continue;
        }
        let input = set.states()[index].tensor_product(&converted);
        let outcomes = tree.run(&input)?;
        let mut draw: f64 = rng.gen();
        let mut decoded = Decode::Inconclusive;
        for outcome in &outcomes {
            draw -= outcome.probability;
            if draw < 0.0 {
                decoded = outcome.decode;
                break;
            }
        }
        match decoded {
            Decode::State(k) if k == index => successes += 1,
            Decode::State(_) => errors += 1,
            Decode::Inconclusive => inconclusive += 1,
        }
    }

    let estimate = successes as f64 / config.trials as f64;
    let standard_error = (estimate * (1.0 - estimate) / config.trials as f64).sqrt();
    Ok(McReport {
        trials: config.trials,
        seed: config.seed,
        successes,
        inconclusive,
        errors,
        estimate,
        standard_error,
        conversion_probability: filter.success_probability,
    })
}
