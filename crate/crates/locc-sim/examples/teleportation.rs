//! An alternative route to the same goal: instead of measuring jointly with
//! the resource, Bob teleports his half of the input onto Alice's resource
//! qubit. After Bob's Bell measurement and Alice's Pauli correction, the
//! whole input sits on Alice's side, where an ordinary orthogonal-basis
//! measurement finishes the job. Works whenever both input factors are
//! qubits, whatever the set.

use locc_sim::builders::{attach_resource, build_teleportation_tree, epr};
use locc_sim::families::gen_canonical_set;
use locc_sim::protocol::{classify_adaptivity, verify_perfect_discrimination, Adaptivity, Decode};
use locc_sim::state::StateVector;
use locc_sim::Result;

fn main() -> Result<()> {
    let set = gen_canonical_set(2)?;
    let tree = build_teleportation_tree(&set)?;
    let attached = attach_resource(&set, &epr())?;

    let report = verify_perfect_discrimination(&tree, &attached)?;
    println!("two-qubit family by teleportation: perfect = {}", report.perfect);
    for input in &report.inputs {
        println!("  member {}: success {:.6}", input.index, input.success_probability);
    }

    match classify_adaptivity(&tree)? {
        Adaptivity::RequiresCc => println!(
            "\nas expected, the protocol needs communication: Alice's correction \
             depends on Bob's Bell outcome"
        ),
        Adaptivity::LoFlattenable(_) => println!("\nunexpectedly flattened"),
    }

    // An input outside the span of the set is never claimed; all its mass
    // ends in inconclusive branches.
    let stranger = StateVector::ket(2, 2, 1, 0)?.tensor_product(&epr());
    let mut claimed = 0.0;
    let mut inconclusive = 0.0;
    for b in tree.run(&stranger)? {
        match b.decode {
            Decode::State(_) => claimed += b.probability,
            Decode::Inconclusive => inconclusive += b.probability,
        }
    }
    println!("\ninput outside the set's span: claimed mass {claimed:.2e}, inconclusive {inconclusive:.4}");
    Ok(())
}
