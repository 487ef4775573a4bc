//! Certified illumination of 3-dimensional cap bodies.
//!
//! The crate has two halves. The *bound* half builds a discretized integer
//! program whose optimum M_t upper-bounds the expected number of base caps
//! missed by a randomly rotated regular tetrahedron, rounds every
//! transcendental coefficient in the safe direction onto a rational grid,
//! and solves it exactly; M_t < 3 means at most 4 + 2 = 6 directions
//! illuminate any cap body. The *constructive* half finds and verifies such
//! direction sets for concrete bodies.
//!
//! * [`sphere`]: points, caps, the tetrahedron, Haar rotations.
//! * [`cap_body`]: validated cap systems and the extremal body K_0.
//! * [`cover_measure`]: σ(C_θ), the measure of the tetrahedral cap union.
//! * [`exact`]: rationals, interval enclosures, directed rounding.
//! * [`ilp`]: model construction, exact DP solver, certificates.
//! * [`illuminator`]: rotation search, completion and verification.
//! * [`formats`]: JSON file formats.

pub mod cap_body;
pub mod cover_measure;
pub mod exact;
pub mod formats;
pub mod illuminator;
pub mod ilp;
pub mod sphere;

pub use cap_body::{CapBody, CapBodyError};
pub use sphere::{Cap, Rotation, UnitVector};
