//! Cap bodies K = ⋃ conv({x_i} ∪ B³), described by their base caps.
//!
//! A vertex x_i outside the unit ball determines the closed base cap
//! C[x̂_i, φ_i] with x̂_i = x_i/‖x_i‖ and φ_i = arccos(1/‖x_i‖). Convexity of K
//! is equivalent to the open base caps being pairwise disjoint, which is the
//! invariant [`CapBody`] enforces.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rand::Rng;
use thiserror::Error;

use crate::sphere::{geodesic_distance, random_unit_vector, Cap, UnitVector};

/// Slack allowed in the disjointness test so exactly tangent caps validate.
pub const TANGENCY_TOLERANCE: f64 = 1e-12;

/// Consecutive rejected proposals after which the random generator stops.
pub const MAX_CONSECUTIVE_REJECTIONS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CapBodyError {
    #[error("a cap body needs at least one cap")]
    Empty,
    #[error("cap {index} has radius {radius}, outside (0, π/2)")]
    RadiusOutOfRange { index: usize, radius: f64 },
    #[error("caps {first} and {second} overlap: distance {distance} < radius sum {radius_sum}")]
    OverlappingCaps { first: usize, second: usize, distance: f64, radius_sum: f64 },
    #[error("vertex norm {norm} does not exceed 1")]
    VertexInsideBall { norm: f64 },
}

/// A vertex of a cap body: a point strictly outside the unit ball.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vertex {
    pub position: [f64; 3],
}

impl Vertex {
    pub fn norm(&self) -> f64 {
        self.position.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

fn check_radius(index: usize, radius: f64) -> Result<(), CapBodyError> {
    if radius > 0.0 && radius < FRAC_PI_2 {
        Ok(())
    } else {
        Err(CapBodyError::RadiusOutOfRange { index, radius })
    }
}

/// x = x̂ / cos φ.
pub fn vertex_of(cap: &Cap) -> Result<Vertex, CapBodyError> {
    check_radius(0, cap.radius)?;
    let scale = 1.0 / cap.radius.cos();
    Ok(Vertex { position: cap.center.to_array().map(|c| c * scale) })
}

/// Closed base cap C[x/‖x‖, arccos(1/‖x‖)] of a vertex.
pub fn cap_of(vertex: &Vertex) -> Result<Cap, CapBodyError> {
    let norm = vertex.norm();
    if !norm.is_finite() || norm <= 1.0 + TANGENCY_TOLERANCE {
        return Err(CapBodyError::VertexInsideBall { norm });
    }
    let center = UnitVector::from_array(vertex.position).expect("norm > 1");
    Ok(Cap::closed(center, (1.0 / norm).acos()))
}

/// Open caps C(a, φ_a) and C(b, φ_b) are disjoint iff θ(a, b) ≥ φ_a + φ_b.
pub fn open_caps_disjoint(a: &Cap, b: &Cap) -> bool {
    geodesic_distance(&a.center, &b.center) >= a.radius + b.radius - TANGENCY_TOLERANCE
}

/// A validated system of base caps, sorted by radius (largest first).
#[derive(Clone, Debug, PartialEq)]
pub struct CapBody {
    caps: Vec<Cap>,
}

impl CapBody {
    /// Validates radii and pairwise disjointness, then sorts by radius
    /// descending (stable). Error indices refer to the input order.
    pub fn from_caps(caps: Vec<Cap>) -> Result<Self, CapBodyError> {
        if caps.is_empty() {
            return Err(CapBodyError::Empty);
        }
        for (i, cap) in caps.iter().enumerate() {
            check_radius(i, cap.radius)?;
        }
        for i in 0..caps.len() {
            for j in i + 1..caps.len() {
                if !open_caps_disjoint(&caps[i], &caps[j]) {
                    return Err(CapBodyError::OverlappingCaps {
                        first: i,
                        second: j,
                        distance: geodesic_distance(&caps[i].center, &caps[j].center),
                        radius_sum: caps[i].radius + caps[j].radius,
                    });
                }
            }
        }
        let mut caps: Vec<Cap> = caps.into_iter().map(|c| Cap::closed(c.center, c.radius)).collect();
        caps.sort_by(|a, b| b.radius.total_cmp(&a.radius));
        Ok(Self { caps })
    }

    pub fn from_vertices(vertices: &[Vertex]) -> Result<Self, CapBodyError> {
        let caps = vertices.iter().map(cap_of).collect::<Result<Vec<_>, _>>()?;
        Self::from_caps(caps)
    }

    pub fn caps(&self) -> &[Cap] {
        &self.caps
    }

    pub fn len(&self) -> usize {
        self.caps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.caps.is_empty()
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        self.caps.iter().map(|c| vertex_of(c).expect("validated radius")).collect()
    }

    /// ∑ (1 − cos φ_i)/2; at most 1 for any valid body.
    pub fn total_measure(&self) -> f64 {
        self.caps.iter().map(Cap::measure).sum()
    }
}

/// The extremal body K_0: six caps of radius π/4 centered at ±e_1, ±e_2,
/// ±e_3. Its vertices form the octahedron scaled by √2.
pub fn k0() -> CapBody {
    let centers =
        [UnitVector::E_X, -UnitVector::E_X, UnitVector::E_Y, -UnitVector::E_Y, UnitVector::E_Z, -UnitVector::E_Z];
    CapBody::from_caps(centers.iter().map(|c| Cap::closed(*c, FRAC_PI_4)).collect())
        .expect("K_0 caps are pairwise tangent or antipodal")
}

/// No five pairwise-disjoint caps of radius > π/4 fit on S², so any valid
/// body satisfies φ_5 ≤ π/4. Returns whether `body` is consistent with that.
pub fn fifth_largest_radius_bound(body: &CapBody) -> bool {
    body.caps.len() < 5 || body.caps[4].radius <= FRAC_PI_4 + TANGENCY_TOLERANCE
}

/// Greedy rejection packing: propose a uniform center and a uniform radius
/// in `radius_range`, keep the cap if it is disjoint from everything kept so
/// far. Stops at `target_count` caps or after
/// [`MAX_CONSECUTIVE_REJECTIONS`] consecutive rejections.
///
/// # Panics
///
/// If the range is not within (0, π/2) or `target_count` is zero.
pub fn generate_random_body<R: Rng + ?Sized>(rng: &mut R, target_count: usize, radius_range: (f64, f64)) -> CapBody {
    let (lo, hi) = radius_range;
    assert!(0.0 < lo && lo <= hi && hi < FRAC_PI_2, "invalid radius range ({lo}, {hi})");
    assert!(target_count > 0, "target_count must be positive");

    let mut caps: Vec<Cap> = Vec::with_capacity(target_count);
    let mut rejections = 0;
    while caps.len() < target_count && rejections < MAX_CONSECUTIVE_REJECTIONS {
        let center = random_unit_vector(rng);
        let radius = if lo == hi { lo } else { rng.random_range(lo..=hi) };
        let candidate = Cap::closed(center, radius);
        // Strict disjointness (no tangency slack) keeps the result valid.
        let fits = caps.iter().all(|c| geodesic_distance(&c.center, &center) >= c.radius + radius);
        if fits {
            caps.push(candidate);
            rejections = 0;
        } else {
            rejections += 1;
        }
    }
    CapBody::from_caps(caps).expect("greedy packing keeps caps disjoint")
}
