//! Logic-circuit reasoning benchmark toolkit.
//!
//! Generates combinational circuits with exact flip-sensitivity ground truth,
//! renders every task into fifteen interchangeable surface languages (and parses
//! them back), drives language-model evaluations, and computes attention and
//! hidden-state diagnostics from tensor dumps produced by an external adapter.

pub mod circuit;
pub mod exec;
pub mod eval;
pub mod fixtures;
pub mod geometry;
pub mod interchange;
pub mod metrics;
pub mod repr;
pub mod rng;

pub use circuit::{
    flip_delta, generate_circuit, generate_instance, layerize, simulate, validate, Circuit,
    Gate, GateType, GenConfig, InputAssignment, Output, TaskInstance,
};
pub use exec::Exec;
pub use repr::{encode, parse, semantic_equal, EncodedQuestion, RepresentationKind};

/// Lowercase hex sha256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}

/// Version string recorded in every manifest this crate writes.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
