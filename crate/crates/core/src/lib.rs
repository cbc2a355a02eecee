//! Finite-geometry threshold toolkit.
//!
//! Exact arithmetic in F_q, canonical affine flats of F_q^n, exact family
//! sizes and intersection profiles, second-moment and Chernoff bounds,
//! random point-set models with exact event detectors, brute-force oracles,
//! and the estimation helpers used by threshold scans.

pub mod certify;
pub mod counting;
pub mod error;
pub mod events;
pub mod geometry;
pub mod gf;
pub mod logspace;
pub mod oracle;
pub mod scan;

pub use error::{Error, Result};
pub use geometry::{Flat, FlatEnumerator, FlatTable, PointId, PointSet, Space};
pub use gf::{Field, FieldElement};
