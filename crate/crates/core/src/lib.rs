//! Exact Hochschild and cyclic homology of torus quotient stacks at finite truncation.

pub mod coeff;
pub mod graded;
pub mod mixed;
pub mod models;
pub mod poly;
pub mod scalar;
pub mod sparse;
pub mod cyclic;
pub mod completion;
pub mod harness;
pub mod cli;
