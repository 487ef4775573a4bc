//! Measure of C_θ, the union of the four caps C[l, θ] centered at the
//! vertices l of the regular tetrahedron, with a Monte Carlo oracle.
//!
//! σ(C_θ) has three regimes:
//!
//! * θ ≤ ½·arccos(−1/3): the caps are disjoint, σ = 2(1 − cos θ);
//! * ½·arccos(−1/3) ≤ θ < arccos(1/3): six pairwise lunes overlap and
//!   σ = 2(1 − cos θ) − 6·A_θ (no point lies in three caps);
//! * θ ≥ arccos(1/3): the caps cover the sphere, σ = 1.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::sphere::{self, random_unit_vector, tetrahedron, UnitVector};

/// Arguments of `acos` this close to ±1 are clamped instead of rejected.
const ACOS_CLAMP: f64 = 1e-12;

/// Samples drawn from one rng stream in Monte Carlo estimates. Fixed so
/// results do not depend on the number of worker threads.
pub const MC_CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("{quantity} = {value} is outside the domain {domain}")]
    Domain { quantity: &'static str, value: f64, domain: &'static str },
}

/// The two radii where the formula for σ(C_θ) changes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnionMeasureBreakpoints {
    /// ½·arccos(−1/3) ≈ 0.955317: neighbouring caps touch.
    pub theta_tangent: f64,
    /// arccos(1/3) ≈ 1.230959: the caps cover S².
    pub theta_cover: f64,
}

impl UnionMeasureBreakpoints {
    pub fn new() -> Self {
        Self { theta_tangent: sphere::tangent_radius(), theta_cover: sphere::cover_radius() }
    }
}

impl Default for UnionMeasureBreakpoints {
    fn default() -> Self {
        Self::new()
    }
}

/// Which of the three closed-form regimes applies at a given θ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnionCase {
    Disjoint = 1,
    Overlapping = 2,
    Covering = 3,
}

fn clamped_acos(x: f64) -> f64 {
    if !(-1.0 - ACOS_CLAMP..=1.0 + ACOS_CLAMP).contains(&x) {
        f64::NAN
    } else {
        x.clamp(-1.0, 1.0).acos()
    }
}

/// σ-measure A_θ of the intersection of two tetrahedral caps of radius θ.
///
/// A_θ = (1/2π)·(π − arccos((−1/3 − cos²θ)/sin²θ) − 2·cos θ·arccos(√2·cot θ)),
/// defined for θ between the tangency and covering radii.
pub fn lune_area(theta: f64) -> Result<f64, MeasureError> {
    let bp = UnionMeasureBreakpoints::new();
    if !(theta >= bp.theta_tangent - ACOS_CLAMP && theta <= bp.theta_cover + ACOS_CLAMP) {
        return Err(MeasureError::Domain {
            quantity: "theta", value: theta, domain: "[½·arccos(−1/3), arccos(1/3)]"
        });
    }
    let (s, c) = theta.sin_cos();
    let first = clamped_acos((-1.0 / 3.0 - c * c) / (s * s));
    let second = clamped_acos(2f64.sqrt() * c / s);
    Ok(((-first - 2.0 * second * c + PI) / (2.0 * PI)).max(0.0))
}

pub fn union_case(theta: f64) -> Result<UnionCase, MeasureError> {
    if !(theta > 0.0 && theta <= FRAC_PI_2) {
        return Err(MeasureError::Domain { quantity: "theta", value: theta, domain: "(0, π/2]" });
    }
    let bp = UnionMeasureBreakpoints::new();
    Ok(if theta <= bp.theta_tangent {
        UnionCase::Disjoint
    } else if theta < bp.theta_cover {
        UnionCase::Overlapping
    } else {
        UnionCase::Covering
    })
}

/// σ(C_θ) for θ ∈ (0, π/2].
pub fn union_measure(theta: f64) -> Result<f64, MeasureError> {
    Ok(match union_case(theta)? {
        UnionCase::Disjoint => 2.0 * (1.0 - theta.cos()),
        UnionCase::Overlapping => 2.0 * (1.0 - theta.cos()) - 6.0 * lune_area(theta)?,
        UnionCase::Covering => 1.0,
    })
}

/// A Monte Carlo fraction with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl McEstimate {
    fn from_hits(hits: u64, samples: u64) -> Self {
        let n = samples as f64;
        let p = hits as f64 / n;
        Self { estimate: p, stderr: (p * (1.0 - p) / n).sqrt(), samples }
    }

    /// |estimate − value| in units of the standard error. A zero standard
    /// error only accepts an exact match.
    pub fn z_score(&self, value: f64) -> f64 {
        let diff = (self.estimate - value).abs();
        if self.stderr == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / self.stderr
        }
    }
}

/// Rng for chunk `chunk` of a seeded computation; each chunk is its own
/// ChaCha stream.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Fraction of uniform points of S² satisfying `hit`.
pub fn estimate_fraction<F>(samples: u64, seed: u64, hit: F) -> McEstimate
where
    F: Fn(&UnitVector) -> bool + Sync,
{
    assert!(samples >= 1, "at least one sample is required");
    let chunks = samples.div_ceil(MC_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = chunk_rng(seed, chunk);
            let n = MC_CHUNK.min(samples - chunk * MC_CHUNK);
            (0..n).filter(|_| hit(&random_unit_vector(&mut rng))).count() as u64
        })
        .sum();
    McEstimate::from_hits(hits, samples)
}

/// Monte Carlo estimate of σ(C_θ): the fraction of uniform points within
/// geodesic distance θ of some tetrahedron vertex.
pub fn union_measure_mc(theta: f64, samples: u64, seed: u64) -> McEstimate {
    let vertices = tetrahedron();
    let cos_theta = theta.cos();
    estimate_fraction(samples, seed, |p| vertices.iter().any(|v| v.dot(p) >= cos_theta))
}

/// Probability that a cap of radius φ escapes every direction of a random
/// rotation of the tetrahedron: 1 − σ(C_{π/2 − φ}).
pub fn unlit_probability(phi: f64) -> Result<f64, MeasureError> {
    if !(0.0..FRAC_PI_2).contains(&phi) {
        return Err(MeasureError::Domain { quantity: "phi", value: phi, domain: "[0, π/2)" });
    }
    let theta = FRAC_PI_2 - phi;
    if theta >= sphere::cover_radius() {
        return Ok(0.0);
    }
    let p = 1.0 - union_measure(theta)?;
    Ok(if (-1e-12..0.0).contains(&p) { 0.0 } else { p.clamp(0.0, 1.0) })
}
