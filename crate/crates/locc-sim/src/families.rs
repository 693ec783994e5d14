//! Orthogonal state families for discrimination runs.
//!
//! Each generator builds a set of mutually orthogonal bipartite states
//! containing exactly one product member ∣01⟩ alongside entangled ones; that
//! lone product state is what makes one-shot local identification
//! interesting. Available families:
//!
//! * [`gen_canonical_set`]: the d ⊗ d Fourier family, d entangled states
//!   Σ_j ω^{kj} ∣jj⟩ (ω = e^{2πi/d}) plus ∣01⟩.
//! * [`gen_hadamard_set_4x4`]: the 4 ⊗ 4 variant with real ±1 sign rows
//!   drawn from a Hadamard matrix instead of Fourier phases.
//! * [`gen_nonmax_set`]: five 4 ⊗ 4 states built from two nonmaximally
//!   entangled qubit-like blocks, parameterized by [`NonMaxParams`].
//!
//! Sets validate orthogonality on construction and can be restricted with
//! [`StateSet::subset`] or grown with [`StateSet::extend_with_product`].

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::state::StateVector;
use crate::LINALG_TOL;

/// Pair-normalized weights for [`gen_nonmax_set`]. Every field lies strictly
/// between 0 and 1 and the pairs (a,b), (c,d), (e,f), (g,h) each square-sum
/// to 1.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct NonMaxParams {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    e: f64,
    f: f64,
    g: f64,
    h: f64,
}

impl NonMaxParams {
    const PAIR_TOL: f64 = 1e-12;

    /// Validates and stores the eight weights.
    #[allow(clippy::too_many_arguments)]
    pub fn new(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64, g: f64, h: f64) -> Result<Self> {
        for (name, v) in [
            ("a", a), ("b", b), ("c", c), ("d", d),
            ("e", e), ("f", f), ("g", g), ("h", h),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} must lie strictly between 0 and 1"
                )));
            }
        }
        for (pair, s) in [
            ("a,b", a * a + b * b),
            ("c,d", c * c + d * d),
            ("e,f", e * e + f * f),
            ("g,h", g * g + h * h),
        ] {
            if (s - 1.0).abs() > Self::PAIR_TOL {
                return Err(Error::InvalidParameter(format!(
                    "pair ({pair}) squares to {s}, expected 1"
                )));
            }
        }
        Ok(Self { a, b, c, d, e, f, g, h })
    }

    /// Builds the weights from four angles in the open interval (0, π/2),
    /// taking (cos θ, sin θ) for each pair. Handy for sampling valid
    /// parameters.
    pub fn from_angles(t_ab: f64, t_cd: f64, t_ef: f64, t_gh: f64) -> Result<Self> {
        Self::new(
            t_ab.cos(), t_ab.sin(),
            t_cd.cos(), t_cd.sin(),
            t_ef.cos(), t_ef.sin(),
            t_gh.cos(), t_gh.sin(),
        )
    }

    /// The point where all eight weights equal 1/√2 and every entangled
    /// member of the family is maximally entangled.
    pub fn symmetric() -> Self {
        let r = 0.5f64.sqrt();
        Self { a: r, b: r, c: r, d: r, e: r, f: r, g: r, h: r }
    }

    /// The weights in declaration order a through h.
    pub fn as_array(&self) -> [f64; 8] {
        [self.a, self.b, self.c, self.d, self.e, self.f, self.g, self.h]
    }
}

/// Which generator (or edit) produced a set.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// Fourier family in d ⊗ d.
    Canonical { d: usize },
    /// Hadamard-sign family in 4 ⊗ 4.
    Hadamard4,
    /// Nonmaximally entangled family in 4 ⊗ 4.
    NonMax(NonMaxParams),
    /// A set extended by the product ket recorded here.
    Extended { ket: (usize, usize) },
    /// Anything else, subsets included.
    Custom,
}

/// A list of mutually orthogonal states on a common bipartite system.
#[derive(Clone, Debug)]
pub struct StateSet {
    states: Vec<StateVector>,
    family: Family,
}

impl StateSet {
    /// Wraps states into a set, checking common dimensions, cardinality at
    /// least 2, and pairwise orthogonality.
    pub fn new(states: Vec<StateVector>, family: Family) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "a state set needs at least 2 members, got {}",
                states.len()
            )));
        }
        let (da, db) = (states[0].dim_a(), states[0].dim_b());
        for (i, s) in states.iter().enumerate() {
            if s.dim_a() != da || s.dim_b() != db {
                return Err(Error::DimensionMismatch(format!(
                    "state {i} is {}x{} but the set is {da}x{db}",
                    s.dim_a(),
                    s.dim_b()
                )));
            }
        }
        for i in 0..states.len() {
            for j in (i + 1)..states.len() {
                let ip = states[i].inner_product(&states[j])?;
                if ip.norm() > LINALG_TOL {
                    return Err(Error::NotOrthogonal(format!(
                        "states {i} and {j} overlap with magnitude {:.3e}",
                        ip.norm()
                    )));
                }
            }
        }
        Ok(Self { states, family })
    }

    pub fn states(&self) -> &[StateVector] { &self.states }

    pub fn len(&self) -> usize { self.states.len() }

    pub fn is_empty(&self) -> bool { self.states.is_empty() }

    pub fn get(&self, index: usize) -> Option<&StateVector> { self.states.get(index) }

    pub fn family(&self) -> &Family { &self.family }

    pub fn dim_a(&self) -> usize { self.states[0].dim_a() }

    pub fn dim_b(&self) -> usize { self.states[0].dim_b() }

    /// A new set keeping only the listed members (0-based, distinct, order
    /// preserved). Fails when fewer than two indices remain.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if indices.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "a subset needs at least 2 members, got {}",
                indices.len()
            )));
        }
        let mut seen = vec![false; self.states.len()];
        let mut states = Vec::with_capacity(indices.len());
        for &i in indices {
            let s = self.states.get(i).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "subset index {i} out of range for a set of {}",
                    self.states.len()
                ))
            })?;
            if seen[i] {
                return Err(Error::InvalidParameter(format!("subset index {i} repeated")));
            }
            seen[i] = true;
            states.push(s.clone());
        }
        Self::new(states, Family::Custom)
    }

    /// Appends the product ket ∣mn⟩, which must be orthogonal to every
    /// current member.
    pub fn extend_with_product(&self, ket: (usize, usize)) -> Result<Self> {
        let (m, n) = ket;
        let new = StateVector::ket(self.dim_a(), self.dim_b(), m, n)?;
        for (i, s) in self.states.iter().enumerate() {
            let ip = s.inner_product(&new)?;
            if ip.norm() > LINALG_TOL {
                return Err(Error::NotOrthogonal(format!(
                    "ket ({m},{n}) overlaps member {i} with magnitude {:.3e}",
                    ip.norm()
                )));
            }
        }
        let mut states = self.states.clone();
        states.push(new);
        Self::new(states, Family::Extended { ket })
    }
}

/// The d ⊗ d Fourier family: states Σ_j ω^{kj} ∣jj⟩ / √d for k = 0..d-1
/// with ω = e^{2πi/d}, plus the product state ∣01⟩. Requires d ≥ 2.
pub fn gen_canonical_set(d: usize) -> Result<StateSet> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "canonical family needs d >= 2, got {d}"
        )));
    }
    let mut states = Vec::with_capacity(d + 1);
    for k in 0..d {
        let terms: Vec<_> = (0..d)
            .map(|j| {
                let phase = 2.0 * std::f64::consts::PI * (k * j) as f64 / d as f64;
                (j, j, C64::from_polar(1.0, phase))
            })
            .collect();
        states.push(StateVector::from_terms(d, d, &terms)?);
    }
    states.push(StateVector::ket(d, d, 0, 1)?);
    StateSet::new(states, Family::Canonical { d })
}

/// The 4 ⊗ 4 family Σ_j s_kj ∣jj⟩ / 2 with sign rows (++++), (++--),
/// (+--+), (+-+-), plus ∣01⟩.
pub fn gen_hadamard_set_4x4() -> Result<StateSet> {
    let mut states = Vec::with_capacity(5);
    for row in hadamard_rows() {
        let terms: Vec<_> = row
            .iter()
            .enumerate()
            .map(|(j, &s)| (j, j, C64::new(s, 0.0)))
            .collect();
        states.push(StateVector::from_terms(4, 4, &terms)?);
    }
    states.push(StateVector::ket(4, 4, 0, 1)?);
    StateSet::new(states, Family::Hadamard4)
}

/// Sign rows of the 4x4 Hadamard-type basis used throughout the 4 ⊗ 4
/// constructions.
pub(crate) fn hadamard_rows() -> [[f64; 4]; 4] {
    [
        [1.0, 1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, -1.0, 1.0],
        [1.0, -1.0, 1.0, -1.0],
    ]
}

/// Five orthogonal 4 ⊗ 4 states built from two nonmaximally entangled
/// blocks:
///
/// ```text
/// α_1 = e(a∣00⟩ + b∣11⟩) + f(c∣22⟩ + d∣33⟩)
/// α_2 = f(a∣00⟩ + b∣11⟩) - e(c∣22⟩ + d∣33⟩)
/// α_3 = g(b∣00⟩ - a∣11⟩) + h(d∣22⟩ - c∣33⟩)
/// α_4 = h(b∣00⟩ - a∣11⟩) - g(d∣22⟩ - c∣33⟩)
/// α_5 = ∣01⟩
/// ```
///
/// At [`NonMaxParams::symmetric`] the four entangled members are maximally
/// entangled; anywhere else at least one of them is not.
pub fn gen_nonmax_set(p: NonMaxParams) -> Result<StateSet> {
    let [a, b, c, d, e, f, g, h] = p.as_array();
    let re = |x: f64| C64::new(x, 0.0);
    let diag = |w: [f64; 4]| -> Result<StateVector> {
        StateVector::from_terms(
            4,
            4,
            &[(0, 0, re(w[0])), (1, 1, re(w[1])), (2, 2, re(w[2])), (3, 3, re(w[3]))],
        )
    };
    let states = vec![
        diag([e * a, e * b, f * c, f * d])?,
        diag([f * a, f * b, -e * c, -e * d])?,
        diag([g * b, -g * a, h * d, -h * c])?,
        diag([h * b, -h * a, -g * d, g * c])?,
        StateVector::ket(4, 4, 0, 1)?,
    ];
    StateSet::new(states, Family::NonMax(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_two_qubit_members() {
        let set = gen_canonical_set(2).unwrap();
        assert_eq!(set.len(), 3);
        let r = 0.5f64.sqrt();
        let s0 = set.get(0).unwrap();
        assert!((s0.amp(0, 0).re - r).abs() < 1e-12);
        assert!((s0.amp(1, 1).re - r).abs() < 1e-12);
        let s1 = set.get(1).unwrap();
        assert!((s1.amp(0, 0).re - r).abs() < 1e-12);
        assert!((s1.amp(1, 1).re + r).abs() < 1e-12);
        let s2 = set.get(2).unwrap();
        assert!((s2.amp(0, 1).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn canonical_qutrit_phases() {
        let set = gen_canonical_set(3).unwrap();
        let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let s1 = set.get(1).unwrap();
        let r = (1.0f64 / 3.0).sqrt();
        assert!((s1.amp(1, 1) - omega * r).norm() < 1e-12);
        assert!((s1.amp(2, 2) - omega * omega * r).norm() < 1e-12);
    }

    #[test]
    fn canonical_sets_are_orthogonal_up_to_d8() {
        for d in 2..=8 {
            let set = gen_canonical_set(d).unwrap();
            assert_eq!(set.len(), d + 1);
        }
        assert!(gen_canonical_set(1).is_err());
    }

    #[test]
    fn hadamard_set_signs() {
        let set = gen_hadamard_set_4x4().unwrap();
        assert_eq!(set.len(), 5);
        let mu3 = set.get(2).unwrap();
        assert!((mu3.amp(0, 0).re - 0.5).abs() < 1e-12);
        assert!((mu3.amp(1, 1).re + 0.5).abs() < 1e-12);
        assert!((mu3.amp(2, 2).re + 0.5).abs() < 1e-12);
        assert!((mu3.amp(3, 3).re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn nonmax_schmidt_coefficients_at_reference_point() {
        // a = sqrt(0.8), b = sqrt(0.2), everything else 1/sqrt(2): the first
        // member's Schmidt coefficients are sqrt(0.4), 1/2, 1/2, sqrt(0.1).
        let r = 0.5f64.sqrt();
        let p = NonMaxParams::new(0.8f64.sqrt(), 0.2f64.sqrt(), r, r, r, r, r, r).unwrap();
        let set = gen_nonmax_set(p).unwrap();
        let coeffs = set.get(0).unwrap().schmidt().coefficients;
        let expected = [0.4f64.sqrt(), 0.5, 0.5, 0.1f64.sqrt()];
        for (got, want) in coeffs.iter().zip(expected.iter()) {
            assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
        }
    }

    #[test]
    fn nonmax_rejects_bad_weights() {
        let r = 0.5f64.sqrt();
        assert!(NonMaxParams::new(1.0, 0.0, r, r, r, r, r, r).is_err());
        assert!(NonMaxParams::new(0.9, 0.9, r, r, r, r, r, r).is_err());
        assert!(NonMaxParams::from_angles(0.7, 0.3, 1.1, 0.9).is_ok());
    }

    #[test]
    fn extend_checks_orthogonality() {
        let set = gen_canonical_set(3).unwrap();
        let bigger = set.extend_with_product((0, 2)).unwrap();
        assert_eq!(bigger.len(), 5);
        assert!(matches!(bigger.family(), Family::Extended { ket: (0, 2) }));
        assert!(set.extend_with_product((0, 0)).is_err());
        assert!(set.extend_with_product((7, 0)).is_err());
    }

    #[test]
    fn subset_rules() {
        let set = gen_canonical_set(3).unwrap();
        let sub = set.subset(&[0, 1, 3]).unwrap();
        assert_eq!(sub.len(), 3);
        assert!(sub.get(2).unwrap().same_up_to_phase(set.get(3).unwrap(), 1e-12));
        assert!(set.subset(&[2]).is_err());
        assert!(set.subset(&[0, 0]).is_err());
        assert!(set.subset(&[0, 9]).is_err());
        let full = set.subset(&[0, 1, 2, 3]).unwrap();
        assert_eq!(full.len(), set.len());
    }
}
