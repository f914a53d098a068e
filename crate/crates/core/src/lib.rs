//! Exact computation of skeletons of log-regular pairs.
//!
//! The crate covers rational cones and fans, Kato fans of snc and toric pairs,
//! quasi-monomial valuations and their tropical evaluation, weight functions of
//! pluricanonical forms, Kontsevich-Soibelman and essential skeletons, and the
//! simplicial topology used to identify their homotopy types.

pub mod arith;
pub mod error;
pub mod fixtures;
pub mod lattice;
pub mod complexes;
pub mod logstructure;
pub mod polyhedra;
pub mod valuations;
pub mod weights;

pub use error::{Error, Result};
