//! Some adaptive protocols only look adaptive. When each party's next
//! measurement depends solely on that party's own earlier outcomes, the
//! rounds compose into one fixed measurement per party and the protocol runs
//! without any communication. The Fourier construction is of that kind; the
//! nonmax construction is not, because Bob's final basis depends on Alice's
//! outcome.

use locc_sim::builders::{attach_resource, build_assisted_tree, build_nonmax_tree, epr};
use locc_sim::families::{gen_canonical_set, gen_nonmax_set, NonMaxParams};
use locc_sim::protocol::{classify_adaptivity, verify_perfect_discrimination, Adaptivity};
use locc_sim::Result;

fn main() -> Result<()> {
    let d = 3;
    let tree = build_assisted_tree(d)?;
    match classify_adaptivity(&tree)? {
        Adaptivity::LoFlattenable(flat) => {
            println!("Fourier protocol for d = {d}: flattens to one round");
            println!(
                "  Alice: {} outcomes, Bob: {} outcomes",
                flat.alice().outcomes.len(),
                flat.bob().outcomes.len()
            );
            // The flat protocol is the same channel: identical outcome
            // masses on every input, and still a perfect discriminator.
            let set = gen_canonical_set(d)?;
            let attached = attach_resource(&set, &epr())?;
            let report = verify_perfect_discrimination(flat.as_ref(), &attached)?;
            println!("  perfect without communication: {}", report.perfect);

            let input = &attached.states()[2];
            let mut tree_mass: Vec<f64> =
                tree.run(input)?.iter().map(|b| b.probability).collect();
            let mut flat_mass: Vec<f64> =
                flat.run(input)?.iter().map(|b| b.probability).collect();
            tree_mass.sort_by(|a, b| a.partial_cmp(b).unwrap());
            flat_mass.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let drift: f64 = tree_mass
                .iter()
                .zip(&flat_mass)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            println!("  largest branch-mass difference tree vs flat: {drift:.2e}");
        }
        Adaptivity::RequiresCc => println!("Fourier protocol for d = {d}: requires communication"),
    }

    let nonmax = gen_nonmax_set(NonMaxParams::from_angles(0.5, 0.6, 0.7, 0.8)?)?;
    let nonmax_tree = build_nonmax_tree(&nonmax)?;
    match classify_adaptivity(&nonmax_tree)? {
        Adaptivity::LoFlattenable(_) => println!("\nnonmax protocol: flattens to one round"),
        Adaptivity::RequiresCc => {
            println!("\nnonmax protocol: requires classical communication");
            println!("  (Bob's separating basis is chosen after hearing Alice's sign outcome)");
        }
    }
    Ok(())
}
