//! Protocol trees, their one-round flattening, and discrimination reports.
//!
//! A [`ProtocolTree`] is an adaptive measurement plan: internal nodes hold a
//! [`Measurement`] by one party with a child per outcome label, leaves claim
//! a state index or give up. Simulating a tree on an input walks every
//! surviving branch, multiplying outcome probabilities and recording the
//! transcript of (party, label) events.
//!
//! Some trees only look adaptive. When each party's measurement choices
//! depend on nothing but that party's own earlier outcomes, the whole plan
//! collapses to one fixed measurement per party followed by classical
//! decoding of the outcome pair, a [`FlatLOProtocol`]. [`classify_adaptivity`]
//! decides which case holds and produces the flattened protocol when it can;
//! otherwise the tree genuinely needs communication between the parties.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::families::StateSet;
use crate::measure::{Measurement, MeasurementKind};
use crate::state::{CMatrix, Party, StateVector};
use crate::{BRANCH_TOL, LINALG_TOL};

/* Trees *********************************************************************/

/// What a finished branch claims about the input.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Decode {
    /// The input is the set member at this index.
    State(usize),
    /// No claim.
    Inconclusive,
}

/// A node of an adaptive protocol.
#[derive(Clone, Debug)]
pub enum ProtocolNode {
    Measure {
        measurement: Measurement,
        children: BTreeMap<String, ProtocolNode>,
    },
    Leaf(Decode),
}

impl ProtocolNode {
    /// Leaf shorthand.
    pub fn decode(index: usize) -> Self {
        Self::Leaf(Decode::State(index))
    }

    /// Inconclusive-leaf shorthand.
    pub fn inconclusive() -> Self {
        Self::Leaf(Decode::Inconclusive)
    }
}

/// A validated adaptive protocol.
#[derive(Clone, Debug)]
pub struct ProtocolTree {
    root: ProtocolNode,
    dims: (usize, usize),
}

impl ProtocolTree {
    /// Validates the whole tree: every measurement complete and well formed,
    /// children exactly covering the outcome labels, operators square with a
    /// consistent dimension per party, and at least one measurement present
    /// for each party's dimension to be known.
    pub fn new(root: ProtocolNode) -> Result<Self> {
        let mut dim_a = None;
        let mut dim_b = None;
        validate_node(&root, &mut dim_a, &mut dim_b)?;
        let (da, db) = match (dim_a, dim_b) {
            (Some(a), Some(b)) => (a, b),
            (Some(a), None) => (a, 0),
            (None, Some(b)) => (0, b),
            (None, None) => {
                return Err(Error::MalformedProtocol(
                    "tree contains no measurements".into(),
                ))
            }
        };
        Ok(Self { root, dims: (da, db) })
    }

    pub fn root(&self) -> &ProtocolNode { &self.root }

    /// Local dimensions the tree's operators act on (0 when that party
    /// never measures).
    pub fn dims(&self) -> (usize, usize) { self.dims }

    /// Simulates every branch with probability above the pruning threshold.
    pub fn run(&self, input: &StateVector) -> Result<Vec<Branch>> {
        if self.dims.0 != 0 && input.dim_a() != self.dims.0
            || self.dims.1 != 0 && input.dim_b() != self.dims.1
        {
            return Err(Error::DimensionMismatch(format!(
                "input is {}x{} but the tree measures a {}x{} system",
                input.dim_a(),
                input.dim_b(),
                self.dims.0,
                self.dims.1
            )));
        }
        let mut branches = Vec::new();
        walk(&self.root, input, 1.0, &mut Vec::new(), &mut branches)?;
        Ok(branches)
    }
}

fn validate_node(
    node: &ProtocolNode,
    dim_a: &mut Option<usize>,
    dim_b: &mut Option<usize>,
) -> Result<()> {
    let ProtocolNode::Measure { measurement, children } = node else {
        return Ok(());
    };
    let check = measurement.validate();
    if !check.ok() {
        return Err(Error::MalformedProtocol(format!(
            "invalid measurement by {}: {}",
            measurement.party.label(),
            check.violations().join("; ")
        )));
    }
    let dim = measurement.dim().expect("validated measurement has a dimension");
    let slot = match measurement.party {
        Party::Alice => &mut *dim_a,
        Party::Bob => &mut *dim_b,
    };
    match slot {
        Some(d) if *d != dim => {
            return Err(Error::MalformedProtocol(format!(
                "party {} measures dimension {dim} after dimension {d}",
                measurement.party.label()
            )))
        }
        Some(_) => {}
        None => *slot = Some(dim),
    }
    let labels: Vec<&String> = measurement.outcomes.iter().map(|(l, _)| l).collect();
    if labels.len() != children.len()
        || !labels.iter().all(|l| children.contains_key(l.as_str()))
    {
        return Err(Error::MalformedProtocol(format!(
            "children {:?} do not match outcome labels {:?}",
            children.keys().collect::<Vec<_>>(),
            labels
        )));
    }
    for child in children.values() {
        validate_node(child, dim_a, dim_b)?;
    }
    Ok(())
}

fn walk(
    node: &ProtocolNode,
    state: &StateVector,
    weight: f64,
    transcript: &mut Vec<(Party, String)>,
    out: &mut Vec<Branch>,
) -> Result<()> {
    match node {
        ProtocolNode::Leaf(decode) => {
            out.push(Branch {
                transcript: transcript.clone(),
                probability: weight,
                decode: *decode,
            });
        }
        ProtocolNode::Measure { measurement, children } => {
            for (label, outcome) in measurement.apply(state)? {
                let Some(post) = outcome.state else { continue };
                let w = weight * outcome.probability;
                if w <= BRANCH_TOL {
                    continue;
                }
                let child = children
                    .get(&label)
                    .expect("validation matched children to labels");
                transcript.push((measurement.party, label));
                walk(child, &post, w, transcript, out)?;
                transcript.pop();
            }
        }
    }
    Ok(())
}

/// One surviving root-to-leaf path of a simulation.
#[derive(Clone, Debug)]
pub struct Branch {
    /// (party, outcome label) events in order.
    pub transcript: Vec<(Party, String)>,
    pub probability: f64,
    pub decode: Decode,
}

/* One-round protocols *******************************************************/

/// A fixed measurement per party plus a classical decoding of the joint
/// outcome. No communication is needed to execute it.
#[derive(Clone, Debug)]
pub struct FlatLOProtocol {
    alice: Measurement,
    bob: Measurement,
    decoder: BTreeMap<(String, String), Decode>,
}

impl FlatLOProtocol {
    /// Validates both measurements and requires the decoder to cover every
    /// outcome pair.
    pub fn new(
        alice: Measurement,
        bob: Measurement,
        decoder: BTreeMap<(String, String), Decode>,
    ) -> Result<Self> {
        if alice.party != Party::Alice || bob.party != Party::Bob {
            return Err(Error::MalformedProtocol(
                "flat protocol measurements assigned to the wrong parties".into(),
            ));
        }
        for (m, who) in [(&alice, "Alice"), (&bob, "Bob")] {
            let check = m.validate();
            if !check.ok() {
                return Err(Error::MalformedProtocol(format!(
                    "invalid measurement by {who}: {}",
                    check.violations().join("; ")
                )));
            }
        }
        for (la, _) in &alice.outcomes {
            for (lb, _) in &bob.outcomes {
                if !decoder.contains_key(&(la.clone(), lb.clone())) {
                    return Err(Error::MalformedProtocol(format!(
                        "decoder misses outcome pair ({la}, {lb})"
                    )));
                }
            }
        }
        Ok(Self { alice, bob, decoder })
    }

    pub fn alice(&self) -> &Measurement { &self.alice }

    pub fn bob(&self) -> &Measurement { &self.bob }

    pub fn decoder(&self) -> &BTreeMap<(String, String), Decode> { &self.decoder }

    /// Joint outcome distribution on `input`.
    pub fn run(&self, input: &StateVector) -> Result<Vec<Branch>> {
        let mut out = Vec::new();
        for (la, alice_out) in self.alice.apply(input)? {
            let Some(mid) = alice_out.state else { continue };
            if alice_out.probability <= BRANCH_TOL {
                continue;
            }
            for (lb, bob_out) in self.bob.apply(&mid)? {
                if bob_out.state.is_none() {
                    continue;
                }
                let p = alice_out.probability * bob_out.probability;
                if p <= BRANCH_TOL {
                    continue;
                }
                let decode = self.decoder[&(la.clone(), lb.clone())];
                out.push(Branch {
                    transcript: vec![(Party::Alice, la.clone()), (Party::Bob, lb)],
                    probability: p,
                    decode,
                });
            }
        }
        Ok(out)
    }
}

/* Verification **************************************************************/

/// Anything that can be simulated branch by branch.
pub trait DiscriminationProtocol {
    fn branches(&self, input: &StateVector) -> Result<Vec<Branch>>;
}

impl DiscriminationProtocol for ProtocolTree {
    fn branches(&self, input: &StateVector) -> Result<Vec<Branch>> {
        self.run(input)
    }
}

impl DiscriminationProtocol for FlatLOProtocol {
    fn branches(&self, input: &StateVector) -> Result<Vec<Branch>> {
        self.run(input)
    }
}

/// Per-input outcome accounting for one state set.
#[derive(Clone, Debug)]
pub struct InputReport {
    pub index: usize,
    pub branches: Vec<Branch>,
    /// Mass decoding to the correct index.
    pub success_probability: f64,
    /// Mass decoding to any definite index, right or wrong.
    pub conclusive_probability: f64,
    /// Mass decoding to a wrong index.
    pub error_probability: f64,
}

/// The verdict of running a protocol against every member of a set.
#[derive(Clone, Debug)]
pub struct DiscriminationReport {
    pub inputs: Vec<InputReport>,
    /// Every member identified with probability 1 within tolerance, with no
    /// error mass anywhere.
    pub perfect: bool,
    /// Some branch decoded a wrong index with non-negligible probability.
    pub any_error: bool,
}

/// Runs `protocol` on each member of `set` and scores the outcome masses. A
/// branch decoding an index outside the set counts as an error.
pub fn verify_perfect_discrimination<P>(protocol: &P, set: &StateSet) -> Result<DiscriminationReport>
where
    P: DiscriminationProtocol + ?Sized,
{
    let mut inputs = Vec::with_capacity(set.len());
    let mut perfect = true;
    let mut any_error = false;
    for (index, state) in set.states().iter().enumerate() {
        let branches = protocol.branches(state)?;
        let mut success = 0.0;
        let mut error = 0.0;
        for b in &branches {
            match b.decode {
                Decode::State(i) if i == index => success += b.probability,
                Decode::State(_) => error += b.probability,
                Decode::Inconclusive => {}
            }
        }
        if (success - 1.0).abs() > LINALG_TOL || error > LINALG_TOL {
            perfect = false;
        }
        if error > LINALG_TOL {
            any_error = true;
        }
        inputs.push(InputReport {
            index,
            branches,
            success_probability: success,
            conclusive_probability: success + error,
            error_probability: error,
        });
    }
    Ok(DiscriminationReport { inputs, perfect, any_error })
}

/* Flattening ****************************************************************/

/// Whether an adaptive tree needs communication or collapses to fixed local
/// measurements.
#[derive(Clone, Debug)]
pub enum Adaptivity {
    /// The tree is equivalent to this one-round protocol.
    LoFlattenable(Box<FlatLOProtocol>),
    /// Some party's measurement choice depends on the other party's outcome.
    RequiresCc,
}

impl Adaptivity {
    pub fn is_flattenable(&self) -> bool {
        matches!(self, Self::LoFlattenable(_))
    }
}

/// Decides whether each party's measurement choices depend only on that
/// party's own earlier outcomes. If so, composes each party's rounds into a
/// single measurement (products of operators along own-outcome paths, labels
/// joined with '.'), derives the decoder by replaying the tree, and returns
/// the flat protocol. A party that stops early in one context while its
/// sibling context continues is treated as measuring anyway, with the extra
/// outcomes decoded by where the tree already ended.
pub fn classify_adaptivity(tree: &ProtocolTree) -> Result<Adaptivity> {
    let mut plans: BTreeMap<Party, BTreeMap<Vec<String>, Measurement>> = BTreeMap::new();
    if !collect_plans(tree.root(), &mut Vec::new(), &mut Vec::new(), &mut plans) {
        return Ok(Adaptivity::RequiresCc);
    }
    let (da, db) = tree.dims();
    if da == 0 || db == 0 {
        return Err(Error::Unsupported(
            "flattening a tree where one party never measures".into(),
        ));
    }
    let alice = flatten_party(Party::Alice, plans.get(&Party::Alice), da);
    let bob = flatten_party(Party::Bob, plans.get(&Party::Bob), db);
    let mut decoder = BTreeMap::new();
    for (la, _) in &alice.outcomes {
        for (lb, _) in &bob.outcomes {
            let d = replay(tree.root(), la, lb)?;
            decoder.insert((la.clone(), lb.clone()), d);
        }
    }
    let flat = FlatLOProtocol::new(alice, bob, decoder)?;
    Ok(Adaptivity::LoFlattenable(Box::new(flat)))
}

/// Records, for every node, which measurement the acting party performs
/// after each of its own outcome prefixes. Returns false on the first
/// conflict, i.e. the first place a choice depends on the other party.
fn collect_plans(
    node: &ProtocolNode,
    alice_prefix: &mut Vec<String>,
    bob_prefix: &mut Vec<String>,
    plans: &mut BTreeMap<Party, BTreeMap<Vec<String>, Measurement>>,
) -> bool {
    let ProtocolNode::Measure { measurement, children } = node else {
        return true;
    };
    let party = measurement.party;
    let prefix = match party {
        Party::Alice => alice_prefix.clone(),
        Party::Bob => bob_prefix.clone(),
    };
    let plan = plans.entry(party).or_default();
    match plan.get(&prefix) {
        Some(existing) if !existing.approx_eq(measurement, LINALG_TOL) => return false,
        Some(_) => {}
        None => {
            plan.insert(prefix, measurement.clone());
        }
    }
    for (label, child) in children {
        match party {
            Party::Alice => alice_prefix.push(label.clone()),
            Party::Bob => bob_prefix.push(label.clone()),
        }
        let ok = collect_plans(child, alice_prefix, bob_prefix, plans);
        match party {
            Party::Alice => alice_prefix.pop(),
            Party::Bob => bob_prefix.pop(),
        };
        if !ok {
            return false;
        }
    }
    true
}

/// Composes one party's plan into a single measurement. Paths whose composed
/// operator is numerically zero (an outcome unreachable after the earlier
/// rounds) are dropped; completeness survives because they contribute
/// nothing to Σ MᴴM.
fn flatten_party(
    party: Party,
    plan: Option<&BTreeMap<Vec<String>, Measurement>>,
    dim: usize,
) -> Measurement {
    let mut outcomes = Vec::new();
    let mut all_projective = true;
    if let Some(plan) = plan {
        let mut stack = vec![(Vec::<String>::new(), CMatrix::identity(dim, dim))];
        while let Some((prefix, acc)) = stack.pop() {
            match plan.get(&prefix) {
                Some(m) => {
                    if m.kind != MeasurementKind::Projective {
                        all_projective = false;
                    }
                    for (label, op) in m.outcomes.iter().rev() {
                        let mut next = prefix.clone();
                        next.push(label.clone());
                        stack.push((next, op * &acc));
                    }
                }
                None => {
                    if acc.norm() > BRANCH_TOL {
                        outcomes.push((prefix.join("."), acc));
                    }
                }
            }
        }
    } else {
        outcomes.push(("1".to_string(), CMatrix::identity(dim, dim)));
    }
    // composed products of nested projectors may remain projective; claim it
    // only when it actually holds
    let projective = all_projective
        && outcomes.iter().all(|(_, m)| {
            (m - m.adjoint()).norm() <= LINALG_TOL && (m * m - m).norm() <= LINALG_TOL
        });
    if projective {
        Measurement::projective(party, outcomes)
    } else {
        Measurement::general(party, outcomes)
    }
}

/// Follows the tree using pre-drawn outcome sequences for both parties (the
/// flat labels split at '.') and returns the decode of the leaf reached.
/// Components left over when a leaf is reached early are simply unused.
fn replay(root: &ProtocolNode, alice_label: &str, bob_label: &str) -> Result<Decode> {
    let mut queues: BTreeMap<Party, std::collections::VecDeque<&str>> = BTreeMap::new();
    queues.insert(Party::Alice, alice_label.split('.').collect());
    queues.insert(Party::Bob, bob_label.split('.').collect());
    let mut node = root;
    loop {
        match node {
            ProtocolNode::Leaf(d) => return Ok(*d),
            ProtocolNode::Measure { measurement, children } => {
                let queue = queues.get_mut(&measurement.party).expect("both queues present");
                let Some(next) = queue.pop_front() else {
                    return Err(Error::MalformedProtocol(format!(
                        "flattened label ({alice_label}, {bob_label}) ends before the tree does"
                    )));
                };
                node = children.get(next).ok_or_else(|| {
                    Error::MalformedProtocol(format!(
                        "tree has no child for outcome {next:?} while replaying ({alice_label}, {bob_label})"
                    ))
                })?;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::gen_canonical_set;
    use crate::state::CVector;
    use num_complex::Complex64 as C64;

    fn diag_projector(dim: usize, kept: &[usize]) -> CMatrix {
        let mut m = CMatrix::zeros(dim, dim);
        for &k in kept {
            m[(k, k)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Both parties measure {0} vs {1} on a qubit pair; outcomes decode the
    /// members of the computational product basis restricted to the set.
    fn product_basis_tree() -> ProtocolTree {
        let bob_stage = |a_out: usize| {
            let mut children = BTreeMap::new();
            children.insert("1".to_string(), ProtocolNode::decode(a_out * 2));
            children.insert("2".to_string(), ProtocolNode::decode(a_out * 2 + 1));
            ProtocolNode::Measure {
                measurement: Measurement::projective(
                    Party::Bob,
                    vec![
                        ("1".into(), diag_projector(2, &[0])),
                        ("2".into(), diag_projector(2, &[1])),
                    ],
                ),
                children,
            }
        };
        let mut children = BTreeMap::new();
        children.insert("1".to_string(), bob_stage(0));
        children.insert("2".to_string(), bob_stage(1));
        ProtocolTree::new(ProtocolNode::Measure {
            measurement: Measurement::projective(
                Party::Alice,
                vec![
                    ("1".into(), diag_projector(2, &[0])),
                    ("2".into(), diag_projector(2, &[1])),
                ],
            ),
            children,
        })
        .unwrap()
    }

    fn product_basis_set() -> StateSet {
        let states = (0..2)
            .flat_map(|m| (0..2).map(move |n| StateVector::ket(2, 2, m, n).unwrap()))
            .collect();
        StateSet::new(states, crate::families::Family::Custom).unwrap()
    }

    #[test]
    fn tree_discriminates_product_basis() {
        let tree = product_basis_tree();
        let report = verify_perfect_discrimination(&tree, &product_basis_set()).unwrap();
        assert!(report.perfect);
        assert!(!report.any_error);
        for input in &report.inputs {
            assert!((input.success_probability - 1.0).abs() < 1e-12);
            assert_eq!(input.branches.len(), 1);
        }
    }

    #[test]
    fn branch_probabilities_sum_to_one() {
        let tree = product_basis_tree();
        let plus = StateVector::from_terms(
            2,
            2,
            &[
                (0, 0, C64::new(1.0, 0.0)),
                (0, 1, C64::new(1.0, 0.0)),
                (1, 0, C64::new(1.0, 0.0)),
                (1, 1, C64::new(1.0, 0.0)),
            ],
        )
        .unwrap();
        let branches = tree.run(&plus).unwrap();
        assert_eq!(branches.len(), 4);
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn incomplete_measurement_is_rejected_at_construction() {
        let mut children = BTreeMap::new();
        children.insert("1".to_string(), ProtocolNode::inconclusive());
        let bad = ProtocolNode::Measure {
            measurement: Measurement::projective(
                Party::Alice,
                vec![("1".into(), diag_projector(2, &[0]))],
            ),
            children,
        };
        assert!(matches!(
            ProtocolTree::new(bad),
            Err(Error::MalformedProtocol(_))
        ));
    }

    #[test]
    fn children_must_match_labels() {
        let mut children = BTreeMap::new();
        children.insert("1".to_string(), ProtocolNode::inconclusive());
        children.insert("oops".to_string(), ProtocolNode::inconclusive());
        let bad = ProtocolNode::Measure {
            measurement: Measurement::projective(
                Party::Alice,
                vec![
                    ("1".into(), diag_projector(2, &[0])),
                    ("2".into(), diag_projector(2, &[1])),
                ],
            ),
            children,
        };
        assert!(ProtocolTree::new(bad).is_err());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let tree = product_basis_tree();
        let set = gen_canonical_set(3).unwrap();
        assert!(tree.run(set.get(0).unwrap()).is_err());
    }

    #[test]
    fn wrong_decode_counts_as_error_mass() {
        // a tree that always claims index 0 is wrong for member 1
        let mut children = BTreeMap::new();
        children.insert("1".to_string(), ProtocolNode::decode(0));
        children.insert("2".to_string(), ProtocolNode::decode(0));
        let tree = ProtocolTree::new(ProtocolNode::Measure {
            measurement: Measurement::projective(
                Party::Alice,
                vec![
                    ("1".into(), diag_projector(2, &[0])),
                    ("2".into(), diag_projector(2, &[1])),
                ],
            ),
            children,
        })
        .unwrap();
        let set = gen_canonical_set(2).unwrap();
        let report = verify_perfect_discrimination(&tree, &set).unwrap();
        assert!(!report.perfect);
        assert!(report.any_error);
        assert!(report.inputs[1].error_probability > 0.9);
    }

    #[test]
    fn product_tree_flattens() {
        let tree = product_basis_tree();
        let Adaptivity::LoFlattenable(flat) = classify_adaptivity(&tree).unwrap() else {
            panic!("expected a flattenable tree");
        };
        assert_eq!(flat.alice().outcomes.len(), 2);
        assert_eq!(flat.bob().outcomes.len(), 2);
        let report = verify_perfect_discrimination(flat.as_ref(), &product_basis_set()).unwrap();
        assert!(report.perfect);
    }

    #[test]
    fn bob_choice_conditioned_on_alice_requires_cc() {
        // Bob measures Z after Alice's "1" but X after Alice's "2": his
        // choice at the empty own-prefix conflicts, so this cannot flatten.
        let h = 0.5f64.sqrt();
        let plus = CVector::from_vec(vec![C64::new(h, 0.0), C64::new(h, 0.0)]);
        let minus = CVector::from_vec(vec![C64::new(h, 0.0), C64::new(-h, 0.0)]);
        let bob_z = Measurement::projective(
            Party::Bob,
            vec![
                ("1".into(), diag_projector(2, &[0])),
                ("2".into(), diag_projector(2, &[1])),
            ],
        );
        let bob_x = Measurement::projective_onto(
            Party::Bob,
            &[("1".into(), plus), ("2".into(), minus)],
            None,
        )
        .unwrap();
        let stage = |m: Measurement| {
            let mut children = BTreeMap::new();
            children.insert("1".to_string(), ProtocolNode::inconclusive());
            children.insert("2".to_string(), ProtocolNode::inconclusive());
            ProtocolNode::Measure { measurement: m, children }
        };
        let mut children = BTreeMap::new();
        children.insert("1".to_string(), stage(bob_z));
        children.insert("2".to_string(), stage(bob_x));
        let tree = ProtocolTree::new(ProtocolNode::Measure {
            measurement: Measurement::projective(
                Party::Alice,
                vec![
                    ("1".into(), diag_projector(2, &[0])),
                    ("2".into(), diag_projector(2, &[1])),
                ],
            ),
            children,
        })
        .unwrap();
        assert!(matches!(classify_adaptivity(&tree).unwrap(), Adaptivity::RequiresCc));
    }
}
