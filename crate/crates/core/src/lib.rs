//! Random intersection graph laboratory.
//!
//! Models, threshold formulas, coupling constructions and exact property
//! checkers for random intersection graphs `G(n, m, p̄)`, plus a seeded
//! Monte Carlo harness that compares property frequencies with their
//! limit laws.

pub mod combin;
pub mod coupling;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod graph;
pub mod poisson;
pub mod properties;
pub mod seed;
pub mod threshold;

pub use error::{Error, Result};
pub use generators::FeatureProbabilities;
pub use graph::{RigInstance, SimpleGraph, UniformHypergraph};
pub use seed::Seed;
