//! Dataflow matrix machines: synchronous networks of neurons over linear
//! streams, wired by a sparse matrix that the network itself can rewrite.

pub mod dsl;
pub mod engine;
pub mod matrix;
pub mod reflection;
pub mod signature;
pub mod streams;
pub mod transforms;
