//! Grows a family by one more product member and still discriminates it.
//! The canonical d-member construction leaves room: a product ket that is
//! orthogonal to the existing product member and hits the entangled members
//! only through one matched index pair can be told apart in the mixed
//! projector branches, which otherwise sit idle.

use locc_sim::builders::{attach_resource, build_extended_tree, epr};
use locc_sim::families::gen_canonical_set;
use locc_sim::protocol::verify_perfect_discrimination;
use locc_sim::Result;

fn main() -> Result<()> {
    let base = gen_canonical_set(3)?;
    println!("base family: {} members", base.len());

    let extended = base.extend_with_product((0, 2))?;
    println!("extended by the product ket at (0, 2): {} members", extended.len());

    // Orthogonality still holds; the set constructor enforced it.
    let mut worst: f64 = 0.0;
    for i in 0..extended.len() {
        for j in (i + 1)..extended.len() {
            worst = worst.max(
                extended.states()[i].inner_product(&extended.states()[j])?.norm(),
            );
        }
    }
    println!("largest pairwise overlap after extension: {worst:.2e}");

    let tree = build_extended_tree(&extended)?;
    let attached = attach_resource(&extended, &epr())?;
    let report = verify_perfect_discrimination(&tree, &attached)?;
    println!("\nperfect discrimination of the grown family: {}", report.perfect);
    for input in &report.inputs {
        println!("  member {}: success {:.6}", input.index, input.success_probability);
    }

    // Not every ket grows the set: reusing the existing product member's
    // position collides with it.
    match gen_canonical_set(3)?.extend_with_product((0, 1)) {
        Err(e) => println!("\nextension by (0, 1) is rejected: {e}"),
        Ok(_) => println!("\nextension by (0, 1) unexpectedly accepted"),
    }
    Ok(())
}
