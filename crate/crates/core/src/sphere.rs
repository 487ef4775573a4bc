//! Points, caps and rotations on the unit sphere S².
//!
//! All angles are radians. Inner products are clamped to [-1, 1] before any
//! `acos`, so coincident and antipodal points never produce NaN.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Neg;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Squared-norm slack accepted by [`UnitVector::new_unchecked_normalized`].
const NORM_TOLERANCE: f64 = 1e-12;

/// A point of S², used for directions, cap centers and tetrahedron vertices.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 3]", try_from = "[f64; 3]")]
pub struct UnitVector {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector {
    pub const E_X: UnitVector = UnitVector { x: 1.0, y: 0.0, z: 0.0 };
    pub const E_Y: UnitVector = UnitVector { x: 0.0, y: 1.0, z: 0.0 };
    pub const E_Z: UnitVector = UnitVector { x: 0.0, y: 0.0, z: 1.0 };

    /// Normalizes `(x, y, z)`. Returns `None` for the zero vector or
    /// non-finite input.
    pub fn new(x: f64, y: f64, z: f64) -> Option<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return None;
        }
        Some(Self { x: x / norm, y: y / norm, z: z / norm })
    }

    pub fn from_array(v: [f64; 3]) -> Option<Self> {
        Self::new(v[0], v[1], v[2])
    }

    /// Wraps already-normalized coordinates, renormalizing if they drifted
    /// by more than the construction tolerance.
    fn new_unchecked_normalized(x: f64, y: f64, z: f64) -> Self {
        let sq = x * x + y * y + z * z;
        if (sq - 1.0).abs() <= NORM_TOLERANCE {
            Self { x, y, z }
        } else {
            Self::new(x, y, z).expect("rotated vector must be nonzero")
        }
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.y
    }

    #[inline]
    pub fn z(&self) -> f64 {
        self.z
    }

    #[inline]
    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn dot(&self, other: &UnitVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }
}

impl Neg for UnitVector {
    type Output = UnitVector;

    fn neg(self) -> UnitVector {
        UnitVector { x: -self.x, y: -self.y, z: -self.z }
    }
}

impl fmt::Debug for UnitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

impl From<UnitVector> for [f64; 3] {
    fn from(v: UnitVector) -> Self {
        v.to_array()
    }
}

impl TryFrom<[f64; 3]> for UnitVector {
    type Error = String;

    fn try_from(v: [f64; 3]) -> Result<Self, Self::Error> {
        UnitVector::from_array(v).ok_or_else(|| format!("{v:?} is not a nonzero finite vector"))
    }
}

/// θ(x, y) = arccos⟨x, y⟩, in [0, π].
pub fn geodesic_distance(x: &UnitVector, y: &UnitVector) -> f64 {
    x.dot(y).clamp(-1.0, 1.0).acos()
}

/// A spherical cap: the open cap C(ξ, φ) = {y : ⟨ξ, y⟩ > cos φ} or the
/// closed cap C[ξ, φ] = {y : ⟨ξ, y⟩ ≥ cos φ}.
///
/// The type accepts any radius in (0, π]; base caps of a cap body are
/// further restricted to acute radii by [`crate::cap_body::CapBody`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cap {
    pub center: UnitVector,
    pub radius: f64,
    pub closed: bool,
}

impl Cap {
    pub fn closed(center: UnitVector, radius: f64) -> Self {
        Self { center, radius, closed: true }
    }

    pub fn open(center: UnitVector, radius: f64) -> Self {
        Self { center, radius, closed: false }
    }

    pub fn contains(&self, p: &UnitVector) -> bool {
        let ip = self.center.dot(p);
        let c = self.radius.cos();
        if self.closed {
            ip >= c
        } else {
            ip > c
        }
    }

    /// σ-measure of the cap.
    pub fn measure(&self) -> f64 {
        cap_measure(self.radius)
    }
}

/// Normalized surface measure of a cap of the given radius: (1 − cos r)/2.
pub fn cap_measure(radius: f64) -> f64 {
    (1.0 - radius.cos()) / 2.0
}

/// Vertices of the regular tetrahedron (1,1,1), (1,−1,−1), (−1,1,−1),
/// (−1,−1,1), each scaled by 1/√3. Pairwise inner products are −1/3.
pub fn tetrahedron() -> [UnitVector; 4] {
    let s = 1.0 / 3f64.sqrt();
    [
        UnitVector { x: s, y: s, z: s },
        UnitVector { x: s, y: -s, z: -s },
        UnitVector { x: -s, y: s, z: -s },
        UnitVector { x: -s, y: -s, z: s },
    ]
}

/// A point uniformly distributed on S² (three normals, normalized).
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> UnitVector {
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        let z: f64 = rng.sample(StandardNormal);
        if let Some(v) = UnitVector::new(x, y, z) {
            return v;
        }
    }
}

/// A rotation of E³ stored as a unit quaternion `w + xi + yj + zk`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation {
    w: f64,
    x: f64,
    y: f64,
    z: f64,
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    /// Normalizes the quaternion; `None` if it is zero or non-finite.
    pub fn from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Option<Self> {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if !n.is_finite() || n == 0.0 {
            return None;
        }
        Some(Self { w: w / n, x: x / n, y: y / n, z: z / n })
    }

    /// Rotation by `angle` about `axis` (right-hand rule).
    pub fn about_axis(axis: UnitVector, angle: f64) -> Self {
        let (s, c) = (angle / 2.0).sin_cos();
        Self { w: c, x: axis.x * s, y: axis.y * s, z: axis.z * s }
    }

    pub fn quaternion(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn inverse(&self) -> Self {
        Self { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    /// `self.then(other)` applies `self` first, then `other`.
    pub fn then(&self, other: &Rotation) -> Self {
        let (a, b, c, d) = (other.w, other.x, other.y, other.z);
        let (e, f, g, h) = (self.w, self.x, self.y, self.z);
        Self {
            w: a * e - b * f - c * g - d * h,
            x: a * f + b * e + c * h - d * g,
            y: a * g - b * h + c * e + d * f,
            z: a * h + b * g - c * f + d * e,
        }
    }

    pub fn apply(&self, p: &UnitVector) -> UnitVector {
        // v' = v + 2w (q × v) + 2 q × (q × v)
        let (qx, qy, qz) = (self.x, self.y, self.z);
        let tx = 2.0 * (qy * p.z - qz * p.y);
        let ty = 2.0 * (qz * p.x - qx * p.z);
        let tz = 2.0 * (qx * p.y - qy * p.x);
        let x = p.x + self.w * tx + (qy * tz - qz * ty);
        let y = p.y + self.w * ty + (qz * tx - qx * tz);
        let z = p.z + self.w * tz + (qx * ty - qy * tx);
        UnitVector::new_unchecked_normalized(x, y, z)
    }

    /// Row-major 3×3 orthogonal matrix of the rotation.
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ]
    }
}

/// Haar-distributed rotation: four standard normals, normalized.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Rotation {
    loop {
        let w: f64 = rng.sample(StandardNormal);
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        let z: f64 = rng.sample(StandardNormal);
        if let Some(r) = Rotation::from_quaternion(w, x, y, z) {
            return r;
        }
    }
}

pub fn rotate(r: &Rotation, p: &UnitVector) -> UnitVector {
    r.apply(p)
}

/// ½·arccos(−1/3): radius at which tetrahedral caps become tangent.
pub fn tangent_radius() -> f64 {
    (-1.0f64 / 3.0).acos() / 2.0
}

/// arccos(1/3): radius at which the four tetrahedral caps cover S².
pub fn cover_radius() -> f64 {
    (1.0f64 / 3.0).acos()
}

/// π/2 − arccos(1/3): caps with smaller radius are lit by any rotated
/// tetrahedron.
pub fn always_lit_radius() -> f64 {
    PI / 2.0 - cover_radius()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    #[test]
    fn geodesic_distance_examples() {
        let ex = UnitVector::E_X;
        assert_eq!(geodesic_distance(&ex, &UnitVector::E_Y), FRAC_PI_2);
        assert_eq!(geodesic_distance(&ex, &ex), 0.0);
        assert_eq!(geodesic_distance(&ex, &-ex), PI);
        let v = UnitVector::new(1.0, 2.0, 3.0).unwrap();
        assert!(geodesic_distance(&v, &v).abs() < 1e-7);
    }

    #[test]
    fn cap_contains_examples() {
        let z = UnitVector::E_Z;
        assert!(Cap::closed(z, FRAC_PI_4).contains(&z));
        assert!(!Cap::closed(z, FRAC_PI_4).contains(&UnitVector::E_X));

        // A point whose inner product with z is exactly cos(π/4) as computed in f64.
        let c = FRAC_PI_4.cos();
        let s = (1.0 - c * c).sqrt();
        let p = UnitVector { x: s, y: 0.0, z: c };
        assert!(!Cap::open(z, FRAC_PI_4).contains(&p));
        assert!(Cap::closed(z, FRAC_PI_4).contains(&p));
    }

    #[test]
    fn cap_measure_examples() {
        assert!((cap_measure(FRAC_PI_2) - 0.5).abs() < 1e-15);
        assert_eq!(cap_measure(PI), 1.0);
        assert!((cap_measure(FRAC_PI_3) - 0.25).abs() < 1e-15);
        assert_eq!(cap_measure(0.0), 0.0);
    }

    #[test]
    fn tetrahedron_is_regular() {
        let t = tetrahedron();
        let mut sum = [0.0; 3];
        for (i, a) in t.iter().enumerate() {
            assert!((a.dot(a) - 1.0).abs() < 1e-12);
            for b in &t[i + 1..] {
                assert!((a.dot(b) + 1.0 / 3.0).abs() < 1e-12);
                assert!((geodesic_distance(a, b) - (-1.0f64 / 3.0).acos()).abs() < 1e-12);
            }
            sum[0] += a.x;
            sum[1] += a.y;
            sum[2] += a.z;
        }
        assert!(sum.iter().all(|s| s.abs() < 1e-15));
    }

    #[test]
    fn breakpoints() {
        assert!((tangent_radius() - 0.955317).abs() < 1e-6);
        assert!((cover_radius() - 1.230959).abs() < 1e-6);
        assert!((always_lit_radius() - 0.339837).abs() < 1e-6);
    }

    #[test]
    fn random_rotation_is_deterministic_per_seed() {
        let a = random_rotation(&mut ChaCha8Rng::seed_from_u64(17));
        let b = random_rotation(&mut ChaCha8Rng::seed_from_u64(17));
        assert_eq!(a, b);
        let q = a.quaternion();
        let n: f64 = q.iter().map(|c| c * c).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotate_identity_inverse_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let r = random_rotation(&mut rng);
            let p = random_unit_vector(&mut rng);
            let q = random_unit_vector(&mut rng);
            assert_eq!(rotate(&Rotation::IDENTITY, &p), p);
            let back = r.inverse().apply(&r.apply(&p));
            assert!(geodesic_distance(&back, &p) < 1e-7);
            assert!((back.dot(&p) - 1.0).abs() < 1e-10);
            assert!((r.apply(&p).dot(&r.apply(&q)) - p.dot(&q)).abs() < 1e-10);
        }
    }

    #[test]
    fn composition_matches_sequential_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let a = random_rotation(&mut rng);
            let b = random_rotation(&mut rng);
            let c = random_rotation(&mut rng);
            let p = random_unit_vector(&mut rng);
            let seq = c.apply(&b.apply(&a.apply(&p)));
            let left = a.then(&b).then(&c).apply(&p);
            let right = a.then(&b.then(&c)).apply(&p);
            assert!((seq.dot(&left) - 1.0).abs() < 1e-10);
            assert!((seq.dot(&right) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn matrix_is_special_orthogonal() {
        let r = random_rotation(&mut ChaCha8Rng::seed_from_u64(8));
        let m = r.matrix();
        for i in 0..3 {
            for j in 0..3 {
                let d: f64 = (0..3).map(|k| m[i][k] * m[j][k]).sum();
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        assert!((det - 1.0).abs() < 1e-12);
        let p = UnitVector::new(0.3, -0.2, 0.9).unwrap();
        let img = r.apply(&p);
        for (i, row) in m.iter().enumerate() {
            let v = row[0] * p.x + row[1] * p.y + row[2] * p.z;
            assert!((v - img.to_array()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn about_axis_quarter_turn() {
        let r = Rotation::about_axis(UnitVector::E_Z, FRAC_PI_2);
        let img = r.apply(&UnitVector::E_X);
        assert!((img.dot(&UnitVector::E_Y) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_vector_rejected() {
        assert!(UnitVector::new(0.0, 0.0, 0.0).is_none());
        assert!(UnitVector::new(f64::NAN, 0.0, 1.0).is_none());
        assert!(Rotation::from_quaternion(0.0, 0.0, 0.0, 0.0).is_none());
    }
}
