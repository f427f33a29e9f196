//! Core library of `rslab`, a laboratory for studying low-bandwidth repair of
//! Reed-Solomon coded storage over small binary fields.
//!
//! The crate is organised bottom-up:
//!
//! * [`galois`] — the tower of binary fields GF(2) ⊂ GF(4) ⊂ GF(16) ⊂ GF(256),
//!   with subfield embeddings, traces, ranks over subfields and dual bases.
//! * [`poly`] — dense univariate polynomials over those fields.
//! * [`grs`] — generalized Reed-Solomon codes and the classical systematic
//!   constructions (Cauchy, Backblaze-style Vandermonde, generator-polynomial).
//! * [`scheme`] — trace repair schemes: check-polynomial sets, the full-rank
//!   condition, bandwidth accounting, and the lift/extend/transport transforms.
//! * [`search`] — exhaustive and staged searches for low-bandwidth schemes,
//!   plus the GF(16) rank-profile census.
//! * [`codec`] — a byte-oriented repair codec: compiled lookup tables,
//!   sender/receiver kernels, a naive repairer, and a benchmark harness.

pub mod codec;
pub mod galois;
pub mod grs;
pub mod poly;
pub mod scheme;
pub mod search;

pub use galois::{Element, FieldId};
pub use grs::{GeneratorMatrix, GrsCode};
pub use poly::Polynomial;
pub use scheme::{BandwidthProfile, CheckSet, RankProfile, RepairScheme};

