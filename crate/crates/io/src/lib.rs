//! Model file format and benchmark generators.
//!
//! The `.lhap.json` format carries a planning problem bit-exactly: rationals
//! as canonical strings, constraints as structured objects, deterministic
//! serialization. Generators reconstruct the benchmark families at desk
//! scale and emit an ASCII layout sheet next to each model.

pub mod bench;
pub mod format;
pub mod rational;

pub use bench::{generate_benchmark, BenchError, BenchmarkSpec, Family, View};
pub use format::{parse_model, parse_model_unchecked, serialize_model, ModelDocument, ModelError};
pub use rational::{format_rat, parse_rat};
