//! Symbolic algebra of resolvent generators R(z, f).

mod check;
mod json;
mod poly;
mod relations;
mod rewrite;

pub use check::{
    check_identity, classify_residuals, default_cutoffs, IdentityCheck, OracleConfig, Verdict,
};
pub use json::{parse_rational, poly_from_json, poly_from_str, poly_to_json, rational_from_json};
pub use poly::*;
pub use relations::{relation_instances, RelationInstance, RELATION_NAMES};
pub use rewrite::{
    core_normalize, simplify, NormalizationStatus, Rule, Simplified, SimplifyOptions, TraceStep,
};
