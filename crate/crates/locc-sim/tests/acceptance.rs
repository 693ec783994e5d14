//! End-to-end acceptance checks. Each test verifies one headline capability
//! of the toolkit at its stated tolerance and prints a single [PASS] or
//! [FAIL] line, so the whole gate reads as a checklist:
//!
//! ```text
//! cargo test --test acceptance -- --nocapture
//! ```
//!
//! A failed check also panics, so a plain `cargo test` enforces the gate.

use std::f64::consts::FRAC_PI_4;

use locc_sim::builders::{
    attach_resource, build_assisted_tree, build_assisted_tree_for, build_extended_tree,
    build_hadamard_tree, build_nonmax_tree, build_teleportation_tree, epr,
};
use locc_sim::entangle::{
    average_entanglement, conversion_filter, entanglement_entropy, mc_assisted_discrimination,
    vidal_probability, McConfig,
};
use locc_sim::families::{gen_canonical_set, gen_hadamard_set_4x4, gen_nonmax_set, NonMaxParams};
use locc_sim::measure::Measurement;
use locc_sim::protocol::{verify_perfect_discrimination, DiscriminationReport, ProtocolTree};
use locc_sim::state::{CMatrix, CVector, Party, StateVector};
use locc_sim::witness::{
    certify_2x2, search_numeric, IdentifyStatus, SearchConfig, WitnessProblem,
};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tolerance for all exact claims: success masses, completeness residuals,
/// invariance gaps.
const TOL: f64 = 1e-9;

/// Overlaps below this count as no conclusive identification.
const OVERLAP_FLOOR: f64 = 1e-6;

/// Runs one acceptance check and prints its verdict line. The body returns a
/// short summary on success and a failure description otherwise.
fn criterion(label: &str, body: impl FnOnce() -> Result<String, String>) {
    match body() {
        Ok(detail) => println!("[PASS] {label}: {detail}"),
        Err(detail) => {
            println!("[FAIL] {label}: {detail}");
            panic!("{label}: {detail}");
        }
    }
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !($cond) {
            return Err(format!($($arg)+));
        }
    };
}

fn fail(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Worst member success probability and largest member error mass.
fn score(report: &DiscriminationReport) -> (f64, f64) {
    let worst = report
        .inputs
        .iter()
        .map(|i| i.success_probability)
        .fold(f64::INFINITY, f64::min);
    let error = report
        .inputs
        .iter()
        .map(|i| i.error_probability)
        .fold(0.0, f64::max);
    (worst, error)
}

fn expect_perfect(report: &DiscriminationReport, what: &str) -> Result<f64, String> {
    let (worst, error) = score(report);
    ensure!(
        (1.0 - worst) <= TOL,
        "{what}: worst member success {worst} misses 1 by more than {TOL:.0e}"
    );
    ensure!(error <= TOL, "{what}: error mass {error} above {TOL:.0e}");
    ensure!(
        report.perfect && !report.any_error,
        "{what}: report flags disagree (perfect = {}, any_error = {})",
        report.perfect,
        report.any_error
    );
    Ok(worst)
}

fn basis_vector(dim: usize, k: usize) -> CVector {
    CVector::from_fn(dim, |i, _| C64::new(if i == k { 1.0 } else { 0.0 }, 0.0))
}

/// A random normalized state with uniform complex amplitudes.
fn random_state(rng: &mut ChaCha8Rng, dim_a: usize, dim_b: usize) -> StateVector {
    let amps: Vec<C64> = (0..dim_a * dim_b)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    StateVector::new(dim_a, dim_b, amps).expect("random amplitudes normalize")
}

/// A random unitary from the QR factor of a dense random matrix.
fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    let m = CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    m.qr().q()
}

#[test]
fn assisted_tree_discriminates_fourier_families() {
    criterion("Fourier families, one shared pair, d = 2..6", || {
        let mut worst = f64::INFINITY;
        for d in 2..=6 {
            let set = gen_canonical_set(d).map_err(fail)?;
            let assisted = attach_resource(&set, &epr()).map_err(fail)?;
            let tree = build_assisted_tree(d).map_err(fail)?;
            let report = verify_perfect_discrimination(&tree, &assisted).map_err(fail)?;
            worst = worst.min(expect_perfect(&report, &format!("d = {d}"))?);
        }
        Ok(format!(
            "perfect for every d, largest success deficit {:.1e}",
            1.0 - worst
        ))
    });
}

#[test]
fn hadamard_tree_and_subset_discriminate_perfectly() {
    criterion("Hadamard 4x4 family, full and three-member subset", || {
        let set = gen_hadamard_set_4x4().map_err(fail)?;
        let tree = build_hadamard_tree().map_err(fail)?;
        let report =
            verify_perfect_discrimination(&tree, &attach_resource(&set, &epr()).map_err(fail)?)
                .map_err(fail)?;
        expect_perfect(&report, "full family")?;

        let subset = set.subset(&[0, 1, 3]).map_err(fail)?;
        let subset_tree = build_assisted_tree_for(&subset).map_err(fail)?;
        let subset_report = verify_perfect_discrimination(
            &subset_tree,
            &attach_resource(&subset, &epr()).map_err(fail)?,
        )
        .map_err(fail)?;
        expect_perfect(&subset_report, "subset {0, 1, 3} under the Fourier tree")?;
        Ok("full family and subset {0, 1, 3} both perfect".into())
    });
}

#[test]
fn nonmax_tree_is_perfect_across_parameter_space() {
    criterion(
        "non-maximal family, symmetric point and 20 random parameter points",
        || {
            let check = |params: NonMaxParams, what: &str| -> Result<(), String> {
                let set = gen_nonmax_set(params).map_err(fail)?;
                let tree = build_nonmax_tree(&set).map_err(fail)?;
                let report = verify_perfect_discrimination(
                    &tree,
                    &attach_resource(&set, &epr()).map_err(fail)?,
                )
                .map_err(fail)?;
                expect_perfect(&report, what)?;
                Ok(())
            };
            check(NonMaxParams::symmetric(), "symmetric point")?;
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            for case in 0..20 {
                let mut angle = || rng.gen_range(0.1..FRAC_PI_4 * 2.0 - 0.1);
                let params = NonMaxParams::from_angles(angle(), angle(), angle(), angle())
                    .map_err(fail)?;
                check(params, &format!("random point {case}"))?;
            }
            Ok("perfect at the symmetric point and at 20 random points".into())
        },
    );
}

#[test]
fn extended_tree_handles_the_added_member() {
    criterion("Fourier d = 3 family extended by a second product member", || {
        let extended = gen_canonical_set(3)
            .map_err(fail)?
            .extend_with_product((0, 2))
            .map_err(fail)?;
        let tree = build_extended_tree(&extended).map_err(fail)?;
        let report = verify_perfect_discrimination(
            &tree,
            &attach_resource(&extended, &epr()).map_err(fail)?,
        )
        .map_err(fail)?;
        expect_perfect(&report, "extended family")?;
        Ok(format!("all {} members identified perfectly", extended.len()))
    });
}

#[test]
fn teleportation_tree_matches_the_direct_protocol() {
    criterion("teleportation baseline on the two-qubit family", || {
        let set = gen_canonical_set(2).map_err(fail)?;
        let tree = build_teleportation_tree(&set).map_err(fail)?;
        let report =
            verify_perfect_discrimination(&tree, &attach_resource(&set, &epr()).map_err(fail)?)
                .map_err(fail)?;
        expect_perfect(&report, "teleportation protocol")?;
        Ok("all three members identified perfectly".into())
    });
}

#[test]
fn entangled_members_admit_no_product_witness() {
    criterion("entangled targets have no conclusive product witness", || {
        let pair_set = gen_canonical_set(2).map_err(fail)?;
        let problem = WitnessProblem::new(&pair_set, 0).map_err(fail)?;
        let verdict = certify_2x2(&problem).map_err(fail)?;
        ensure!(
            verdict.status == IdentifyStatus::NotIdentifiableCertified,
            "two-qubit family: expected a certified negative, got {:?}",
            verdict.status
        );

        let searched = [
            ("Fourier d = 3", gen_canonical_set(3).map_err(fail)?),
            ("Hadamard 4x4", gen_hadamard_set_4x4().map_err(fail)?),
        ];
        let mut highest = 0.0f64;
        for (name, set) in &searched {
            let problem = WitnessProblem::new(set, 0).map_err(fail)?;
            for seed in [7, 101, 4242] {
                let config = SearchConfig {
                    samples: 100_000,
                    ..SearchConfig::with_seed(seed)
                };
                let verdict = search_numeric(&problem, &config).map_err(fail)?;
                ensure!(
                    !verdict.identifiable(),
                    "{name}, seed {seed}: search unexpectedly promoted a witness"
                );
                ensure!(
                    verdict.max_overlap < OVERLAP_FLOOR,
                    "{name}, seed {seed}: constrained overlap {:.3e} not below {OVERLAP_FLOOR:.0e}",
                    verdict.max_overlap
                );
                highest = highest.max(verdict.max_overlap);
            }
        }
        Ok(format!(
            "certified negative for the two-qubit member; six 100k-sample searches stay at constrained overlap {:.1e} or below",
            highest
        ))
    });
}

#[test]
fn product_members_identify_themselves() {
    criterion("product members are their own conclusive witness", || {
        let extended = gen_canonical_set(3)
            .map_err(fail)?
            .extend_with_product((0, 2))
            .map_err(fail)?;
        let cases = [
            ("two-qubit", gen_canonical_set(2).map_err(fail)?, 2, (0, 1)),
            ("Fourier d = 3", gen_canonical_set(3).map_err(fail)?, 3, (0, 1)),
            ("Fourier d = 4", gen_canonical_set(4).map_err(fail)?, 4, (0, 1)),
            ("Hadamard 4x4", gen_hadamard_set_4x4().map_err(fail)?, 4, (0, 1)),
            (
                "non-maximal",
                gen_nonmax_set(NonMaxParams::symmetric()).map_err(fail)?,
                4,
                (0, 1),
            ),
            ("extended, first product member", extended.clone(), 3, (0, 1)),
            ("extended, second product member", extended, 4, (0, 2)),
        ];
        for (name, set, target, ket) in cases {
            let problem = WitnessProblem::new(&set, target).map_err(fail)?;

            // The member itself passes the orthogonality-plus-overlap test.
            let alpha = basis_vector(problem.dim_a(), ket.0);
            let beta = basis_vector(problem.dim_b(), ket.1);
            let check = problem.check_witness(&alpha, &beta).map_err(fail)?;
            ensure!(
                check.sound(),
                "{name}: self-witness rejected (residual {:.2e}, overlap {:.2e})",
                check.max_residual,
                check.overlap
            );

            // Re-verify from scratch with nothing but inner products.
            let witness = problem.witness_state(&alpha, &beta).map_err(fail)?;
            for (j, member) in set.states().iter().enumerate() {
                let overlap = witness.inner_product(member).map_err(fail)?.norm();
                if j == target {
                    ensure!(
                        overlap > OVERLAP_FLOOR,
                        "{name}: target overlap {overlap:.2e} below the floor"
                    );
                } else {
                    ensure!(
                        overlap <= TOL,
                        "{name}: witness leaks {overlap:.2e} onto member {j}"
                    );
                }
            }

            // The automated verdict agrees.
            let verdict = if problem.dim_a() == 2 && problem.dim_b() == 2 {
                certify_2x2(&problem).map_err(fail)?
            } else {
                search_numeric(&problem, &SearchConfig::with_seed(5)).map_err(fail)?
            };
            ensure!(verdict.identifiable(), "{name}: verdict not identifiable");
            let found = verdict
                .witness
                .as_ref()
                .ok_or_else(|| format!("{name}: identifiable verdict carries no witness"))?;
            ensure!(
                found.overlap > OVERLAP_FLOOR,
                "{name}: found witness overlap {:.2e} below the floor",
                found.overlap
            );
        }
        Ok("self-witness verified directly and by search in all seven cases".into())
    });
}

#[test]
fn monte_carlo_tracks_the_conversion_probability() {
    criterion("Monte Carlo with a partially entangled resource", || {
        let set = gen_canonical_set(2).map_err(fail)?;
        let resource = StateVector::from_terms(
            2,
            2,
            &[
                (0, 0, C64::new(0.8f64.sqrt(), 0.0)),
                (1, 1, C64::new(0.2f64.sqrt(), 0.0)),
            ],
        )
        .map_err(fail)?;
        let expected = vidal_probability(&resource);
        ensure!(
            (expected - 0.4).abs() <= 1e-12,
            "conversion probability {expected} is not 0.4"
        );

        let build: &dyn Fn(&locc_sim::StateSet) -> locc_sim::Result<ProtocolTree> =
            &|s| build_assisted_tree_for(s);
        let config = McConfig {
            trials: 100_000,
            seed: 17,
        };
        let report = mc_assisted_discrimination(&set, &resource, &config, build).map_err(fail)?;
        ensure!(
            report.errors == 0,
            "observed {} wrong identifications",
            report.errors
        );
        let se = (expected * (1.0 - expected) / config.trials as f64).sqrt();
        let sigmas = (report.estimate - expected).abs() / se;
        ensure!(
            sigmas <= 3.0,
            "estimate {:.5} sits {sigmas:.2} standard errors from 0.4",
            report.estimate
        );

        let epr_report = mc_assisted_discrimination(&set, &epr(), &config, build).map_err(fail)?;
        ensure!(
            epr_report.estimate == 1.0 && epr_report.errors == 0,
            "maximally entangled resource gave estimate {} with {} errors",
            epr_report.estimate,
            epr_report.errors
        );
        Ok(format!(
            "estimate {:.4} within {sigmas:.2} standard errors of 0.4, zero errors; maximal resource scores exactly 1",
            report.estimate
        ))
    });
}

#[test]
fn average_entanglement_matches_closed_forms() {
    criterion("entanglement accounting per family", || {
        let fourier = gen_canonical_set(3).map_err(fail)?;
        let fourier_avg = average_entanglement(&fourier);
        let fourier_expected = 3.0 * 3.0f64.log2() / 4.0;
        ensure!(
            (fourier_avg - fourier_expected).abs() <= 1e-4,
            "Fourier d = 3 average {fourier_avg} differs from {fourier_expected}"
        );

        let hadamard_avg = average_entanglement(&gen_hadamard_set_4x4().map_err(fail)?);
        ensure!(
            (hadamard_avg - 1.6).abs() <= TOL,
            "Hadamard average {hadamard_avg} differs from 1.6"
        );

        // Off the symmetric point the family must spend strictly less than
        // the 1.6 bits per member of the Hadamard family.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut smallest_defect = f64::INFINITY;
        for _ in 0..20 {
            let angles: [f64; 4] = loop {
                let draw =
                    [(); 4].map(|_| rng.gen_range(0.1..FRAC_PI_4 * 2.0 - 0.1));
                if draw.iter().any(|t| (t - FRAC_PI_4).abs() > 0.05) {
                    break draw;
                }
            };
            let params = NonMaxParams::from_angles(angles[0], angles[1], angles[2], angles[3])
                .map_err(fail)?;
            let avg = average_entanglement(&gen_nonmax_set(params).map_err(fail)?);
            ensure!(
                avg < 1.6,
                "off-symmetric average {avg} not strictly below 1.6"
            );
            smallest_defect = smallest_defect.min(1.6 - avg);
        }
        Ok(format!(
            "closed forms match; 20 off-symmetric averages stay below 1.6 (smallest defect {:.2e})",
            smallest_defect
        ))
    });
}

#[test]
fn structural_invariants_hold_on_random_instances() {
    criterion("structural invariants on 100 random instances each", || {
        let mut rng = ChaCha8Rng::seed_from_u64(40);

        // Measurement completeness, projective and filter pairs alike.
        for i in 0..100 {
            let dim = rng.gen_range(2..=5);
            let u = random_unitary(&mut rng, dim);
            let outcomes: Vec<(String, CMatrix)> = (0..dim)
                .map(|k| {
                    let col = u.column(k).into_owned();
                    (k.to_string(), &col * col.adjoint())
                })
                .collect();
            let total = outcomes
                .iter()
                .fold(CMatrix::zeros(dim, dim), |acc, (_, m)| acc + m.adjoint() * m);
            let residual = (total - CMatrix::identity(dim, dim)).norm();
            ensure!(
                residual <= TOL,
                "projective instance {i}: completeness residual {residual:.2e}"
            );
            let check = Measurement::projective(Party::Alice, outcomes).validate();
            ensure!(
                check.ok(),
                "projective instance {i}: validation found {:?}",
                check.violations()
            );

            let filter = conversion_filter(&random_state(&mut rng, 2, 2)).map_err(fail)?;
            let pair = Measurement::general(
                Party::Alice,
                vec![
                    ("keep".into(), filter.success.clone()),
                    ("drop".into(), filter.failure.clone()),
                ],
            );
            let check = pair.validate();
            ensure!(
                check.ok(),
                "filter instance {i}: validation found {:?}",
                check.violations()
            );
        }

        // Branch probabilities of every tree sum to one on arbitrary inputs.
        for i in 0..100 {
            let (tree, dims) = match i % 3 {
                0 => {
                    let d = rng.gen_range(2..=4);
                    (build_assisted_tree(d).map_err(fail)?, 2 * d)
                }
                1 => (build_hadamard_tree().map_err(fail)?, 8),
                _ => {
                    let set = gen_canonical_set(2).map_err(fail)?;
                    (build_teleportation_tree(&set).map_err(fail)?, 4)
                }
            };
            let input = random_state(&mut rng, dims, dims);
            let mass: f64 = tree
                .run(&input)
                .map_err(fail)?
                .iter()
                .map(|b| b.probability)
                .sum();
            ensure!(
                (mass - 1.0).abs() <= TOL,
                "branch instance {i}: total mass {mass} off unity"
            );
        }

        // Schmidt decompositions reconstruct their state exactly.
        for i in 0..100 {
            let (da, db) = (rng.gen_range(2..=6), rng.gen_range(2..=6));
            let state = random_state(&mut rng, da, db);
            let rebuilt = state.schmidt().reconstruct().map_err(fail)?;
            let gap = (state.amplitudes() - rebuilt.amplitudes()).norm();
            ensure!(gap <= TOL, "Schmidt instance {i}: reconstruction gap {gap:.2e}");
        }

        // Entropy and conversion probability ignore local basis changes.
        for i in 0..100 {
            let (da, db) = (rng.gen_range(2..=5), rng.gen_range(2..=5));
            let state = random_state(&mut rng, da, db);
            let ua = random_unitary(&mut rng, state.dim_a());
            let ub = random_unitary(&mut rng, state.dim_b());
            let rotated = state
                .apply_local(&ua, Party::Alice)
                .map_err(fail)?
                .state
                .ok_or("unitary killed the state")?
                .apply_local(&ub, Party::Bob)
                .map_err(fail)?
                .state
                .ok_or("unitary killed the state")?;
            let entropy_gap = (entanglement_entropy(&state) - entanglement_entropy(&rotated)).abs();
            let vidal_gap = (vidal_probability(&state) - vidal_probability(&rotated)).abs();
            ensure!(
                entropy_gap <= TOL,
                "invariance instance {i}: entropy moved by {entropy_gap:.2e}"
            );
            ensure!(
                vidal_gap <= TOL,
                "invariance instance {i}: conversion probability moved by {vidal_gap:.2e}"
            );
        }

        Ok("completeness, branch normalization, Schmidt reconstruction, and local-unitary invariance all hold".into())
    });
}
