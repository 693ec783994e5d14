//! Ready-made discrimination protocols for the built-in families.
//!
//! All constructions share one resource: a maximally entangled qubit pair
//! [`epr`] attached to the unknown state with [`attach_resource`], so each
//! party holds (set factor) ⊗ (resource qubit) and measures on that enlarged
//! local space, basis ∣j, y⟩ ↦ index 2j + y.
//!
//! The first stage is always the same pair of local projectors: Π_1 keeps
//! ∣0,0⟩ and ∣j,1⟩ for j ≥ 1, Π_2 keeps the complement ∣0,1⟩ and ∣j,0⟩.
//! When both parties see the same outcome, the surviving terms form a
//! maximally entangled pair over d relabeled local kets and a second
//! basis measurement (Fourier or sign rows) finishes the job; mixed outcomes
//! strand the lone product member of the family, identifying it at once.
//! Leaf decodes are never hardcoded: every builder simulates the actual set
//! through the stages it just built and writes the surviving index into each
//! leaf, so subsets and extensions decode correctly by construction.
//!
//! Builders for specific families:
//!
//! * [`build_assisted_tree`]: the d ⊗ d Fourier family, any d ≥ 2.
//! * [`build_hadamard_tree`]: the 4 ⊗ 4 sign-row family.
//! * [`build_nonmax_tree`]: nonmaximally entangled 4 ⊗ 4 families; Bob's
//!   final bases are orthonormalized from simulated residuals and depend on
//!   Alice's outcome, which is why this tree needs communication.
//! * [`build_extended_tree`]: a Fourier family grown by extra product
//!   states; mixed contexts end with a small separating measurement.
//! * [`build_teleportation_tree`]: any 2 ⊗ 2 family, discriminated by
//!   teleporting Bob's half to Alice and measuring there.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::families::{hadamard_rows, gen_canonical_set, gen_hadamard_set_4x4, StateSet};
use crate::measure::Measurement;
use crate::protocol::{ProtocolNode, ProtocolTree};
use crate::state::{CMatrix, CVector, Party, StateVector};
use crate::{BRANCH_TOL, LINALG_TOL};

/* Resource ******************************************************************/

/// The maximally entangled qubit pair (∣00⟩ + ∣11⟩)/√2 shared as a resource.
pub fn epr() -> StateVector {
    let one = C64::new(1.0, 0.0);
    StateVector::from_terms(2, 2, &[(0, 0, one), (1, 1, one)])
        .expect("fixed amplitudes are valid")
}

/// Tensors every member of `set` with `resource`, keeping Alice's factors
/// together and Bob's together. Orthogonality is preserved, so the result is
/// a valid set again.
pub fn attach_resource(set: &StateSet, resource: &StateVector) -> Result<StateSet> {
    let states = set
        .states()
        .iter()
        .map(|s| s.tensor_product(resource))
        .collect();
    StateSet::new(states, crate::families::Family::Custom)
}

/* Shared stages *************************************************************/

/// An input still alive on some branch, with its accumulated probability.
#[derive(Clone, Debug)]
struct LiveInput {
    index: usize,
    weight: f64,
    state: StateVector,
}

fn live_inputs(set: &StateSet) -> Vec<LiveInput> {
    set.states()
        .iter()
        .enumerate()
        .map(|(index, state)| LiveInput { index, weight: 1.0, state: state.clone() })
        .collect()
}

/// Applies `m` to every live input and groups the survivors by outcome.
/// Every outcome label shows up in the result, possibly with no survivors.
fn split_live(m: &Measurement, live: &[LiveInput]) -> Result<Vec<(String, Vec<LiveInput>)>> {
    let mut out: Vec<(String, Vec<LiveInput>)> = m
        .outcomes
        .iter()
        .map(|(label, _)| (label.clone(), Vec::new()))
        .collect();
    for input in live {
        for (slot, (_, outcome)) in out.iter_mut().zip(m.apply(&input.state)?) {
            let Some(post) = outcome.state else { continue };
            let weight = input.weight * outcome.probability;
            if weight > BRANCH_TOL {
                slot.1.push(LiveInput { index: input.index, weight, state: post });
            }
        }
    }
    Ok(out)
}

/// Decoding leaf for a finished branch: the unique survivor's index, or
/// inconclusive when the branch is dead or still ambiguous. An ambiguous
/// leaf means the stages built so far cannot separate those inputs; the
/// discrimination report will show the shortfall.
fn leaf_for(live: &[LiveInput]) -> ProtocolNode {
    match live {
        [only] => ProtocolNode::decode(only.index),
        _ => ProtocolNode::inconclusive(),
    }
}

/// Local indices of the relabeled kets surviving projector `pi` (outcome
/// "1" or "2") on a (d ⊗ 2)-dimensional local space.
fn bold_slots(pi: usize, d: usize) -> Vec<usize> {
    match pi {
        1 => std::iter::once(0).chain((1..d).map(|j| 2 * j + 1)).collect(),
        2 => std::iter::once(1).chain((1..d).map(|j| 2 * j)).collect(),
        _ => unreachable!("projector outcomes are 1 and 2"),
    }
}

/// The first-stage projective measurement {Π_1, Π_2} for one party.
fn pi_measurement(party: Party, d: usize) -> Measurement {
    let dim = 2 * d;
    let projector = |slots: &[usize]| {
        let mut m = CMatrix::zeros(dim, dim);
        for &s in slots {
            m[(s, s)] = C64::new(1.0, 0.0);
        }
        m
    };
    Measurement::projective(
        party,
        vec![
            ("1".into(), projector(&bold_slots(1, d))),
            ("2".into(), projector(&bold_slots(2, d))),
        ],
    )
}

/// Rank-1 basis measurement inside the span of `slots`, one outcome per
/// coefficient row, plus a "rest" projector on everything else.
fn basis_in_slots(
    party: Party,
    dim: usize,
    slots: &[usize],
    rows: &[Vec<C64>],
) -> Result<Measurement> {
    let vectors: Vec<(String, CVector)> = rows
        .iter()
        .enumerate()
        .map(|(k, row)| {
            let mut v = CVector::zeros(dim);
            for (&slot, &c) in slots.iter().zip(row.iter()) {
                v[slot] = c;
            }
            ((k + 1).to_string(), v)
        })
        .collect();
    Measurement::projective_onto(party, &vectors, Some("rest"))
}

/// Fourier rows ω^{kj} over d slots, ω = e^{2πi/d}.
fn fourier_rows(d: usize) -> Vec<Vec<C64>> {
    (0..d)
        .map(|k| {
            (0..d)
                .map(|j| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k * j) as f64 / d as f64))
                .collect()
        })
        .collect()
}

/// Grows a second-stage basis node for one party and recurses with `next`
/// on each outcome's survivors.
fn basis_stage(
    party: Party,
    dim: usize,
    slots: &[usize],
    rows: &[Vec<C64>],
    live: &[LiveInput],
    next: &dyn Fn(&[LiveInput]) -> Result<ProtocolNode>,
) -> Result<ProtocolNode> {
    let measurement = basis_in_slots(party, dim, slots, rows)?;
    let mut children = BTreeMap::new();
    for (label, survivors) in split_live(&measurement, live)? {
        children.insert(label, next(&survivors)?);
    }
    Ok(ProtocolNode::Measure { measurement, children })
}

/* Fourier-family protocols **************************************************/

/// The resource-assisted protocol for [`gen_canonical_set`]`(d)`. Both
/// parties project with {Π_1, Π_2}; matching outcomes are followed by local
/// Fourier-basis measurements whose joint outcome picks the entangled
/// member, while mixed outcomes identify the product member immediately.
pub fn build_assisted_tree(d: usize) -> Result<ProtocolTree> {
    build_assisted_tree_for(&gen_canonical_set(d)?)
}

/// Same stages as [`build_assisted_tree`], but leaf decodes are fixed by
/// simulating `set` itself. Use this to target a subset of a Fourier family:
/// leaves owned by removed members simply turn inconclusive and are never
/// reached.
pub fn build_assisted_tree_for(set: &StateSet) -> Result<ProtocolTree> {
    let d = square_side(set)?;
    let rows = fourier_rows(d);
    build_two_stage_tree(set, d, &rows)
}

/// The protocol for [`gen_hadamard_set_4x4`]: identical staging with the
/// ±1 sign rows in place of Fourier phases.
pub fn build_hadamard_tree() -> Result<ProtocolTree> {
    let rows: Vec<Vec<C64>> = hadamard_rows()
        .iter()
        .map(|r| r.iter().map(|&s| C64::new(s, 0.0)).collect())
        .collect();
    build_two_stage_tree(&gen_hadamard_set_4x4()?, 4, &rows)
}

fn square_side(set: &StateSet) -> Result<usize> {
    if set.dim_a() != set.dim_b() || set.dim_a() < 2 {
        return Err(Error::DimensionMismatch(format!(
            "expected a d x d set with d >= 2, got {}x{}",
            set.dim_a(),
            set.dim_b()
        )));
    }
    Ok(set.dim_a())
}

fn build_two_stage_tree(set: &StateSet, d: usize, rows: &[Vec<C64>]) -> Result<ProtocolTree> {
    let attached = attach_resource(set, &epr())?;
    let dim = 2 * d;
    let live = live_inputs(&attached);
    let pi_a = pi_measurement(Party::Alice, d);
    let pi_b = pi_measurement(Party::Bob, d);
    let mut a_children = BTreeMap::new();
    for (a_label, live_a) in split_live(&pi_a, &live)? {
        let a_out: usize = a_label.parse().expect("projector labels are 1 and 2");
        let mut b_children = BTreeMap::new();
        for (b_label, live_ab) in split_live(&pi_b, &live_a)? {
            let b_out: usize = b_label.parse().expect("projector labels are 1 and 2");
            let node = if a_out == b_out {
                let slots = bold_slots(a_out, d);
                basis_stage(Party::Alice, dim, &slots, rows, &live_ab, &|after_alice| {
                    basis_stage(Party::Bob, dim, &slots, rows, after_alice, &|survivors| {
                        Ok(leaf_for(survivors))
                    })
                })?
            } else {
                leaf_for(&live_ab)
            };
            b_children.insert(b_label, node);
        }
        a_children.insert(
            a_label,
            ProtocolNode::Measure { measurement: pi_b.clone(), children: b_children },
        );
    }
    ProtocolTree::new(ProtocolNode::Measure { measurement: pi_a, children: a_children })
}

/* Extended families *********************************************************/

/// Protocol for a Fourier family extended by further orthogonal product
/// states. Runs the assisted stages; wherever a mixed projector context
/// leaves several product states alive, Bob appends one more measurement in
/// the orthonormalized basis of his residual vectors to tell them apart.
/// Extensions whose residuals stay entangled or collide with the matched
/// contexts are reported as unsupported or show up as imperfect reports.
pub fn build_extended_tree(set: &StateSet) -> Result<ProtocolTree> {
    let d = square_side(set)?;
    let rows = fourier_rows(d);
    let attached = attach_resource(set, &epr())?;
    let dim = 2 * d;
    let live = live_inputs(&attached);
    let pi_a = pi_measurement(Party::Alice, d);
    let pi_b = pi_measurement(Party::Bob, d);
    let mut a_children = BTreeMap::new();
    for (a_label, live_a) in split_live(&pi_a, &live)? {
        let a_out: usize = a_label.parse().expect("projector labels are 1 and 2");
        let mut b_children = BTreeMap::new();
        for (b_label, live_ab) in split_live(&pi_b, &live_a)? {
            let b_out: usize = b_label.parse().expect("projector labels are 1 and 2");
            let node = if a_out == b_out {
                let slots = bold_slots(a_out, d);
                basis_stage(Party::Alice, dim, &slots, &rows, &live_ab, &|after_alice| {
                    basis_stage(Party::Bob, dim, &slots, &rows, after_alice, &|survivors| {
                        Ok(leaf_for(survivors))
                    })
                })?
            } else if live_ab.len() >= 2 {
                bob_separating_stage(&live_ab)?
            } else {
                leaf_for(&live_ab)
            };
            b_children.insert(b_label, node);
        }
        a_children.insert(
            a_label,
            ProtocolNode::Measure { measurement: pi_b.clone(), children: b_children },
        );
    }
    ProtocolTree::new(ProtocolNode::Measure { measurement: pi_a, children: a_children })
}

/// One more Bob measurement distinguishing residual product states by their
/// Bob-side vectors.
fn bob_separating_stage(live: &[LiveInput]) -> Result<ProtocolNode> {
    let mut bob_vectors = Vec::with_capacity(live.len());
    for input in live {
        let sd = input.state.schmidt();
        if sd.rank() != 1 {
            return Err(Error::Unsupported(format!(
                "residual of input {} is entangled; a lone Bob measurement cannot finish here",
                input.index
            )));
        }
        bob_vectors.push(sd.bob_vectors[0].clone());
    }
    let basis = orthonormalize(&bob_vectors)?;
    let vectors: Vec<(String, CVector)> = basis
        .into_iter()
        .enumerate()
        .map(|(k, v)| ((k + 1).to_string(), v))
        .collect();
    let measurement = Measurement::projective_onto(Party::Bob, &vectors, Some("rest"))?;
    let mut children = BTreeMap::new();
    for (label, survivors) in split_live(&measurement, live)? {
        children.insert(label, leaf_for(&survivors));
    }
    Ok(ProtocolNode::Measure { measurement, children })
}

/// Gram-Schmidt in the given order; fails if the vectors are linearly
/// dependent within tolerance.
fn orthonormalize(vectors: &[CVector]) -> Result<Vec<CVector>> {
    let mut basis: Vec<CVector> = Vec::with_capacity(vectors.len());
    for (i, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        for b in &basis {
            let overlap = b.dotc(&w);
            w -= b * overlap;
        }
        let norm = w.norm();
        if norm <= LINALG_TOL.sqrt() {
            return Err(Error::Numerical(format!(
                "vector {i} is linearly dependent on its predecessors"
            )));
        }
        basis.push(w.map(|c| c / C64::new(norm, 0.0)));
    }
    Ok(basis)
}

/* Nonmaximally entangled families *******************************************/

/// Protocol for [`gen_nonmax_set`](crate::families::gen_nonmax_set) members
/// (and other 4 ⊗ 4 sets of diagonal states plus ∣01⟩). After the projector
/// stage, Alice measures the ±1 sign basis over her relabeled kets; each of
/// her outcomes leaves Bob with four orthogonal residual vectors, and Bob
/// finishes in the orthonormalized basis built from them. Bob's basis
/// depends on Alice's outcome, so the tree genuinely requires communication.
pub fn build_nonmax_tree(set: &StateSet) -> Result<ProtocolTree> {
    let d = square_side(set)?;
    if d != 4 {
        return Err(Error::DimensionMismatch(format!(
            "the nonmax construction lives in 4x4, got {d}x{d}"
        )));
    }
    let sign_rows: Vec<Vec<C64>> = hadamard_rows()
        .iter()
        .map(|r| r.iter().map(|&s| C64::new(s, 0.0)).collect())
        .collect();
    let attached = attach_resource(set, &epr())?;
    let dim = 2 * d;
    let live = live_inputs(&attached);
    let pi_a = pi_measurement(Party::Alice, d);
    let pi_b = pi_measurement(Party::Bob, d);
    let mut a_children = BTreeMap::new();
    for (a_label, live_a) in split_live(&pi_a, &live)? {
        let a_out: usize = a_label.parse().expect("projector labels are 1 and 2");
        let mut b_children = BTreeMap::new();
        for (b_label, live_ab) in split_live(&pi_b, &live_a)? {
            let b_out: usize = b_label.parse().expect("projector labels are 1 and 2");
            let node = if a_out == b_out {
                let slots = bold_slots(a_out, d);
                basis_stage(Party::Alice, dim, &slots, &sign_rows, &live_ab, &|after_alice| {
                    if after_alice.is_empty() {
                        return Ok(ProtocolNode::inconclusive());
                    }
                    bob_separating_stage(after_alice)
                })?
            } else {
                leaf_for(&live_ab)
            };
            b_children.insert(b_label, node);
        }
        a_children.insert(
            a_label,
            ProtocolNode::Measure { measurement: pi_b.clone(), children: b_children },
        );
    }
    ProtocolTree::new(ProtocolNode::Measure { measurement: pi_a, children: a_children })
}

/* Teleportation *************************************************************/

/// Baseline protocol for any 2 ⊗ 2 family: Bob projects his two qubits onto
/// the maximally entangled basis, Alice applies the matching Pauli
/// correction to her resource qubit, and then measures her two qubits in the
/// basis extending the family. Inputs outside the family's span end on the
/// completion outcome and decode inconclusive.
pub fn build_teleportation_tree(set: &StateSet) -> Result<ProtocolTree> {
    if set.dim_a() != 2 || set.dim_b() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "teleportation baseline expects a 2x2 set, got {}x{}",
            set.dim_a(),
            set.dim_b()
        )));
    }
    let attached = attach_resource(set, &epr())?;
    let live = live_inputs(&attached);

    let r = std::f64::consts::FRAC_1_SQRT_2;
    let bell = |s0: usize, s1: usize, sign: f64| {
        let mut v = CVector::zeros(4);
        v[s0] = C64::new(r, 0.0);
        v[s1] = C64::new(sign * r, 0.0);
        v
    };
    let bell_vectors = vec![
        ("1".to_string(), bell(0, 3, 1.0)),
        ("2".to_string(), bell(0, 3, -1.0)),
        ("3".to_string(), bell(1, 2, 1.0)),
        ("4".to_string(), bell(1, 2, -1.0)),
    ];
    let bob_bell = Measurement::projective_onto(Party::Bob, &bell_vectors, None)?;

    let corrections = [pauli_i(), pauli_z(), pauli_x(), pauli_z() * pauli_x()];

    // Alice's final basis: the set members read as vectors on her two
    // qubits, completed by the projector on whatever they don't span.
    let alice_vectors: Vec<(String, CVector)> = set
        .states()
        .iter()
        .enumerate()
        .map(|(i, s)| ((i + 1).to_string(), s.amplitudes().clone()))
        .collect();
    let rest = (set.len() < 4).then_some("rest");
    let alice_basis = Measurement::projective_onto(Party::Alice, &alice_vectors, rest)?;

    let mut bell_children = BTreeMap::new();
    for ((label, survivors), correction) in
        split_live(&bob_bell, &live)?.into_iter().zip(corrections)
    {
        let u = kron2(&CMatrix::identity(2, 2), &correction);
        let fix = Measurement::unitary(Party::Alice, "1", u);
        let corrected = split_live(&fix, &survivors)?.remove(0).1;
        let mut basis_children = BTreeMap::new();
        for (b_label, finals) in split_live(&alice_basis, &corrected)? {
            basis_children.insert(b_label, leaf_for(&finals));
        }
        let measure_node = ProtocolNode::Measure {
            measurement: alice_basis.clone(),
            children: basis_children,
        };
        let mut fix_children = BTreeMap::new();
        fix_children.insert("1".to_string(), measure_node);
        bell_children.insert(
            label,
            ProtocolNode::Measure { measurement: fix, children: fix_children },
        );
    }
    ProtocolTree::new(ProtocolNode::Measure { measurement: bob_bell, children: bell_children })
}

fn pauli_i() -> CMatrix {
    CMatrix::identity(2, 2)
}

fn pauli_x() -> CMatrix {
    let one = C64::new(1.0, 0.0);
    CMatrix::from_row_slice(2, 2, &[C64::default(), one, one, C64::default()])
}

fn pauli_z() -> CMatrix {
    let one = C64::new(1.0, 0.0);
    CMatrix::from_row_slice(2, 2, &[one, C64::default(), C64::default(), -one])
}

fn kron2(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{gen_nonmax_set, NonMaxParams};
    use crate::protocol::{classify_adaptivity, verify_perfect_discrimination, Adaptivity, Decode};

    #[test]
    fn epr_is_maximally_entangled() {
        let sd = epr().schmidt();
        assert_eq!(sd.rank(), 2);
        assert!((sd.coefficients[0] - sd.coefficients[1]).abs() < 1e-12);
    }

    #[test]
    fn attach_resource_scales_dimensions() {
        let set = gen_canonical_set(3).unwrap();
        let attached = attach_resource(&set, &epr()).unwrap();
        assert_eq!(attached.dim_a(), 6);
        assert_eq!(attached.dim_b(), 6);
        assert_eq!(attached.len(), 4);
    }

    #[test]
    fn first_stage_projector_matches_the_written_form() {
        // on the qutrit family, Π_1 applied to the (attached) first member
        // keeps |00>|00> + |11>|11> + |21>|21>, normalized, with weight 1/2
        let set = gen_canonical_set(3).unwrap();
        let attached = attach_resource(&set, &epr()).unwrap();
        let pi = pi_measurement(Party::Alice, 3);
        let outcomes = pi.apply(attached.get(0).unwrap()).unwrap();
        let (_, first) = &outcomes[0];
        assert!((first.probability - 0.5).abs() < 1e-12);
        let post = first.state.as_ref().unwrap();
        let r = (1.0f64 / 3.0).sqrt();
        for idx in [0usize, 3, 5] {
            assert!((post.amp(idx, idx).re - r).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_outcome_strands_the_product_member() {
        // the product member |01> ⊗ resource survives Alice "1" as
        // |00>_A |10>_B, landing in Bob's second projector
        let set = gen_canonical_set(3).unwrap();
        let attached = attach_resource(&set, &epr()).unwrap();
        let pi = pi_measurement(Party::Alice, 3);
        let outcomes = pi.apply(attached.get(3).unwrap()).unwrap();
        let (_, first) = &outcomes[0];
        assert!((first.probability - 0.5).abs() < 1e-12);
        let post = first.state.as_ref().unwrap();
        assert!((post.amp(0, 2) - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn assisted_tree_discriminates_qutrit_family() {
        let set = gen_canonical_set(3).unwrap();
        let attached = attach_resource(&set, &epr()).unwrap();
        let tree = build_assisted_tree(3).unwrap();
        let report = verify_perfect_discrimination(&tree, &attached).unwrap();
        assert!(report.perfect, "imperfect: {:#?}", report.inputs.iter().map(|i| i.success_probability).collect::<Vec<_>>());
        assert!(!report.any_error);
    }

    #[test]
    fn assisted_tree_flattens_to_one_round() {
        let tree = build_assisted_tree(3).unwrap();
        let Adaptivity::LoFlattenable(flat) = classify_adaptivity(&tree).unwrap() else {
            panic!("the Fourier-family tree should flatten");
        };
        // each party: d outcomes inside each of the two projector subspaces
        assert_eq!(flat.alice().outcomes.len(), 6);
        assert_eq!(flat.bob().outcomes.len(), 6);
        let set = gen_canonical_set(3).unwrap();
        let attached = attach_resource(&set, &epr()).unwrap();
        let report = verify_perfect_discrimination(flat.as_ref(), &attached).unwrap();
        assert!(report.perfect);
    }

    #[test]
    fn subset_tree_leaves_removed_members_unclaimed() {
        let set = gen_canonical_set(3).unwrap();
        let sub = set.subset(&[0, 1, 3]).unwrap();
        let tree = build_assisted_tree_for(&sub).unwrap();
        let attached = attach_resource(&sub, &epr()).unwrap();
        let report = verify_perfect_discrimination(&tree, &attached).unwrap();
        assert!(report.perfect);
    }

    #[test]
    fn hadamard_tree_discriminates_sign_family() {
        let set = gen_hadamard_set_4x4().unwrap();
        let attached = attach_resource(&set, &epr()).unwrap();
        let tree = build_hadamard_tree().unwrap();
        let report = verify_perfect_discrimination(&tree, &attached).unwrap();
        assert!(report.perfect);
    }

    #[test]
    fn nonmax_tree_needs_communication() {
        let set = gen_nonmax_set(NonMaxParams::symmetric()).unwrap();
        let tree = build_nonmax_tree(&set).unwrap();
        let attached = attach_resource(&set, &epr()).unwrap();
        let report = verify_perfect_discrimination(&tree, &attached).unwrap();
        assert!(report.perfect);
        assert!(matches!(classify_adaptivity(&tree).unwrap(), Adaptivity::RequiresCc));
    }

    #[test]
    fn extended_tree_handles_the_grown_family() {
        let set = gen_canonical_set(3).unwrap().extend_with_product((0, 2)).unwrap();
        let tree = build_extended_tree(&set).unwrap();
        let attached = attach_resource(&set, &epr()).unwrap();
        let report = verify_perfect_discrimination(&tree, &attached).unwrap();
        assert!(report.perfect);
        assert!(matches!(classify_adaptivity(&tree).unwrap(), Adaptivity::RequiresCc));
    }

    #[test]
    fn teleportation_tree_on_two_qubit_family() {
        let set = gen_canonical_set(2).unwrap();
        let tree = build_teleportation_tree(&set).unwrap();
        let attached = attach_resource(&set, &epr()).unwrap();
        let report = verify_perfect_discrimination(&tree, &attached).unwrap();
        assert!(report.perfect);
        assert!(matches!(classify_adaptivity(&tree).unwrap(), Adaptivity::RequiresCc));
    }

    #[test]
    fn teleportation_flags_inputs_outside_the_span() {
        let set = gen_canonical_set(2).unwrap();
        let tree = build_teleportation_tree(&set).unwrap();
        let outside = StateVector::ket(2, 2, 1, 0).unwrap().tensor_product(&epr());
        let branches = tree.run(&outside).unwrap();
        let inconclusive: f64 = branches
            .iter()
            .filter(|b| b.decode == Decode::Inconclusive)
            .map(|b| b.probability)
            .sum();
        assert!((inconclusive - 1.0).abs() < 1e-9);
    }
}
