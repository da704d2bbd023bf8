//! Exact arithmetic over the p-adic numbers and rigorous dynamics of
//! monic polynomials fixing the origin.

pub mod ball;
pub mod dynamics;
pub mod error;
pub mod family;
pub mod newton;
pub mod poly;
pub mod qring;
pub mod radius;
pub mod scalar;
pub mod suites;
pub mod tree;

pub use ball::{BallRadius, PadicBall};
pub use dynamics::{
    classify_orbit, classify_orbit_ball, critical_count_in_disk, disk_degree, disk_image,
    disk_image_with_slack, escape_radius, invariant_system, invariant_zero_disk, is_pcb,
    residue_ball, verify_cycle, verify_invariant_disk, verify_invariant_system, BallPolynomial,
    BoundedCertificate, ClassifyOptions, OrbitClassification, PcbAnswer, PcbVerdict,
    UnknownReason, Verdict,
};
pub use error::{Error, Result};
pub use family::{
    classify_disk, classify_parameter, disk_bounds, DiskBounds, DiskClassification, DiskColor,
    DiskOptions, ParamPoly, PolynomialFamily, RatPoly,
};
pub use newton::{shift_compare, NewtonPolygon, Segment, ShiftCompare};
pub use poly::MonicPolynomial;
pub use qring::{QuotientRing, QuotientRingElement};
pub use radius::{
    decompose, is_prime, known_radius, lower_bound, pcf_witness, verify_pcf_witness,
    witness_escape_radius, Decomposition, PcfWitness, RadiusAnswer, RadiusKind, WitnessChecks,
};
pub use scalar::{PadicScalar, Rational, Valuation};
pub use suites::{all_pass, render_report, run_all_suites, run_suite, SuiteCheck, SUITE_NAMES};
pub use tree::{emit, explore, from_json, tree_stats, EmitFormat, ExploreOptions, TreeColor, TreeNode, TreeStats};
