//! Local discrimination of orthogonal bipartite states, with and without an
//! entangled resource.
//!
//! The library models the following workflow end to end:
//!
//! 1. generate an orthogonal state family ([`families`]),
//! 2. attach a shared resource pair and build a measurement protocol for it
//!    ([`builders`]),
//! 3. simulate the protocol branch by branch and check whether every family
//!    member is identified with certainty ([`protocol`]),
//! 4. probe single states for conclusive product-witness identification
//!    ([`witness`]),
//! 5. account for the entanglement spent, including probabilistic conversion
//!    of a partially entangled resource ([`entangle`]).
//!
//! Start with the runnable examples:
//!
//! ```text
//! cargo run --example canonical_families
//! cargo run --example assisted_discrimination
//! cargo run --example hadamard_4x4
//! cargo run --example lo_flattening
//! cargo run --example teleportation
//! cargo run --example nonmax_discrimination
//! cargo run --example extend_cardinality
//! cargo run --example witness_search
//! cargo run --example entanglement_conversion
//! ```
//!
//! A thin command-line front end (`locc-sim`) exposes the same capabilities
//! as subcommands; see the README.

pub mod builders;
pub mod entangle;
pub mod error;
pub mod families;
pub mod io;
pub mod measure;
pub mod protocol;
pub mod state;
pub mod witness;

pub use builders::{
    attach_resource, build_assisted_tree, build_assisted_tree_for, build_extended_tree,
    build_hadamard_tree, build_nonmax_tree, build_teleportation_tree, epr,
};
pub use entangle::{
    average_entanglement, conversion_filter, entanglement_entropy, mc_assisted_discrimination,
    schmidt_rank, vidal_probability, ConversionFilter, McConfig, McReport,
};
pub use error::{Error, Result};
pub use families::{Family, NonMaxParams, StateSet};
pub use measure::{Measurement, MeasurementKind};
pub use protocol::{
    classify_adaptivity, verify_perfect_discrimination, Adaptivity, Branch, Decode,
    DiscriminationProtocol, DiscriminationReport, FlatLOProtocol, ProtocolNode, ProtocolTree,
};
pub use state::{CMatrix, CVector, Party, StateVector};
pub use witness::{
    certify_2x2, check_set, search_numeric, IdentifiabilityVerdict, IdentifyStatus,
    ProductWitness, SearchConfig, SetIdentifiability, WitnessProblem,
};

/// Singular values at or below this count as zero for Schmidt ranks.
pub const RANK_TOL: f64 = 1e-9;

/// Amplitudes at or below this are ignored when fixing global phases.
pub const PHASE_TOL: f64 = 1e-12;

/// Protocol branches lighter than this probability are pruned.
pub const BRANCH_TOL: f64 = 1e-12;

/// Orthogonality, completeness, and perfect-discrimination checks.
pub const LINALG_TOL: f64 = 1e-9;

/// A constraint matrix counts as singular below this smallest singular value.
pub const KERNEL_TOL: f64 = 1e-8;

/// Product-witness overlaps above this count as conclusive identification.
pub const OVERLAP_TOL: f64 = 1e-6;
