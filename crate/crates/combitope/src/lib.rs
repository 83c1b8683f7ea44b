//! combitope: exact-arithmetic combinatorics of convex polytopes.
//!
//! The crate builds polytopes from rational coordinates, recovers their full
//! combinatorial structure (facets, face lattice, graph), constructs the
//! named low-vertex families studied in edge-minimisation, and checks
//! counting identities, bound formulas and Minkowski decomposability with
//! replayable certificates. All arithmetic is exact; there is no floating
//! point anywhere.
//!
//! Module map:
//! - [`ratlin`]: rational scalars/vectors, rank, affine dimension, hyperplanes
//! - [`hull`]: facet enumeration of full-dimensional rational point sets
//! - [`lattice`]: face lattice, graph, ridges, isomorphism, facet classification
//! - [`factory`]: constructions of all named families plus truncations
//! - [`metrics`]: excess degree, bound polynomials, structural property checks
//! - [`decomp`]: decomposability verdicts with certificates and replay
//! - [`interchange`]: the on-disk polytope format
//! - [`verify`]: the claim-by-claim verification harness

pub mod decomp;
pub mod error;
pub mod factory;
pub mod hull;
pub mod interchange;
pub mod lattice;
pub mod metrics;
pub mod ratlin;
pub mod verify;

pub use error::{Error, Result};
