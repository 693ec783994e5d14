//! Generates the built-in state families and prints what makes each one
//! tick: member count, pairwise orthogonality, entanglement content, and the
//! JSON form that the CLI trades in.

use locc_sim::entangle::entanglement_entropy;
use locc_sim::families::{gen_canonical_set, gen_hadamard_set_4x4, gen_nonmax_set, NonMaxParams};
use locc_sim::io::write_set;
use locc_sim::Result;

fn main() -> Result<()> {
    for d in 2..=5 {
        let set = gen_canonical_set(d)?;
        println!(
            "canonical d = {d}: {} members on a {}x{} system",
            set.len(),
            set.dim_a(),
            set.dim_b()
        );
        for (i, state) in set.states().iter().enumerate() {
            println!("  member {i}: entropy {:.4} bits", entanglement_entropy(state));
        }
        // Orthogonality is enforced at construction; show the worst pair.
        let mut worst: f64 = 0.0;
        for i in 0..set.len() {
            for j in (i + 1)..set.len() {
                let overlap = set.states()[i].inner_product(&set.states()[j])?.norm();
                worst = worst.max(overlap);
            }
        }
        println!("  largest pairwise overlap: {worst:.2e}\n");
    }

    let hadamard = gen_hadamard_set_4x4()?;
    println!("hadamard 4x4: {} members, sign patterns over four kets", hadamard.len());

    let nonmax = gen_nonmax_set(NonMaxParams::from_angles(0.6, 0.7, 0.8, 0.9)?)?;
    println!("nonmax at angles (0.6, 0.7, 0.8, 0.9): {} members", nonmax.len());
    for (i, state) in nonmax.states().iter().enumerate() {
        println!("  member {i}: entropy {:.4} bits", entanglement_entropy(state));
    }

    println!("\nJSON form of the two-qubit family:");
    write_set(std::io::stdout().lock(), &gen_canonical_set(2)?)?;
    Ok(())
}
