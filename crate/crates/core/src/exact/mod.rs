//! Exact rationals and certified directed rounding of transcendental
//! coefficients onto the grid (1/D)·ℤ.
//!
//! A [`CoefficientExpr`] is first inspected symbolically; if it is a plain
//! rational it is rounded exactly. Otherwise it is enclosed with
//! outward-rounded interval arithmetic, and the precision is doubled until
//! both ends of the enclosure round to the same grid point. Failure to
//! separate by [`MAX_PRECISION_BITS`] is reported as
//! [`ExactError::TieUnresolved`] rather than guessed.

mod expr;
mod interval;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use expr::CoefficientExpr;
use interval::Fixed;

pub type Rational = BigRational;

/// First precision tried by the rounding and comparison loops.
pub const START_PRECISION_BITS: u32 = 64;
/// Escalation stops here.
pub const MAX_PRECISION_BITS: u32 = 1 << 14;
/// Extra working bits on top of the requested precision.
const GUARD_BITS: u32 = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExactError {
    #[error("{operation}: {detail}")]
    DomainViolation { operation: &'static str, detail: String },
    #[error("could not separate {expression} from a grid point at {precision_bits} bits")]
    TieUnresolved { expression: String, precision_bits: u32 },
    #[error("denominator must be positive")]
    InvalidDenominator,
}

/// A rigorous enclosure lo ≤ x ≤ hi of a real number.
#[derive(Debug, Clone, PartialEq)]
pub struct Enclosure {
    pub lo: Rational,
    pub hi: Rational,
}

impl Enclosure {
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn lo_f64(&self) -> f64 {
        rational_to_f64(&self.lo)
    }

    pub fn hi_f64(&self) -> f64 {
        rational_to_f64(&self.hi)
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Encloses the value of `e`. Exactly rational expressions give a point
/// enclosure; otherwise the result is computed at `precision_bits` plus
/// guard bits.
pub fn eval_interval(e: &CoefficientExpr, precision_bits: u32) -> Result<Enclosure, ExactError> {
    if let Some(r) = e.exact_rational() {
        return Ok(Enclosure { lo: r.clone(), hi: r });
    }
    let f = Fixed::new(precision_bits + GUARD_BITS + 4 * e.depth());
    let v = e.eval(&f)?;
    let scale = BigInt::one() << f.prec();
    Ok(Enclosure { lo: Rational::new(v.lo, scale.clone()), hi: Rational::new(v.hi, scale) })
}

#[derive(Clone, Copy)]
enum Direction {
    Up,
    Down,
}

fn round_to_grid(e: &CoefficientExpr, d: u64, dir: Direction) -> Result<Rational, ExactError> {
    if d == 0 {
        return Err(ExactError::InvalidDenominator);
    }
    let denom = BigInt::from(d);
    let snap = |x: &Rational| -> BigInt {
        let scaled = x * Rational::from_integer(denom.clone());
        match dir {
            Direction::Up => scaled.ceil().to_integer(),
            Direction::Down => scaled.floor().to_integer(),
        }
    };
    let mut prec = START_PRECISION_BITS;
    loop {
        let enc = eval_interval(e, prec)?;
        let (lo, hi) = (snap(&enc.lo), snap(&enc.hi));
        if lo == hi {
            return Ok(Rational::new(lo, denom));
        }
        if prec >= MAX_PRECISION_BITS {
            return Err(ExactError::TieUnresolved { expression: e.to_string(), precision_bits: prec });
        }
        prec *= 2;
    }
}

/// ⌈x·D⌉/D for the exact value x of `e`.
pub fn round_up(e: &CoefficientExpr, d: u64) -> Result<Rational, ExactError> {
    round_to_grid(e, d, Direction::Up)
}

/// ⌊x·D⌋/D for the exact value x of `e`.
pub fn round_down(e: &CoefficientExpr, d: u64) -> Result<Rational, ExactError> {
    round_to_grid(e, d, Direction::Down)
}

/// Certified comparison of two expressions. Equality is only reported when
/// the symbolic layer proves it.
pub fn compare(a: &CoefficientExpr, b: &CoefficientExpr) -> Result<Ordering, ExactError> {
    let diff = a.clone() - b.clone();
    if let Some(sym) = diff.symbolic() {
        if sym.pi.is_zero() {
            return Ok(sym.rational.cmp(&Rational::zero()));
        }
        if sym.rational.is_zero() {
            return Ok(sym.pi.cmp(&Rational::zero()));
        }
    }
    let mut prec = START_PRECISION_BITS;
    loop {
        let enc = eval_interval(&diff, prec)?;
        if enc.lo.is_positive() {
            return Ok(Ordering::Greater);
        }
        if enc.hi.is_negative() {
            return Ok(Ordering::Less);
        }
        if prec >= MAX_PRECISION_BITS {
            return Err(ExactError::TieUnresolved { expression: diff.to_string(), precision_bits: prec });
        }
        prec *= 2;
    }
}

/// Lowest grid point a_0 = 19π/180, as a multiple of π.
pub fn grid_start() -> Rational {
    rational(19, 180)
}

/// a_i / π for the uniform partition a_0 = 19π/180, …, a_t = π/2.
pub fn grid_pi_multiples(t: usize) -> Vec<Rational> {
    assert!(t >= 1, "t must be at least 1");
    let a0 = grid_start();
    let span = rational(1, 2) - &a0;
    let tt = Rational::from_integer(BigInt::from(t));
    (0..=t).map(|i| &a0 + &span * Rational::from_integer(BigInt::from(i)) / &tt).collect()
}

/// Symbolic discretization points a_0, …, a_t.
pub fn discretization_grid(t: usize) -> Vec<CoefficientExpr> {
    grid_pi_multiples(t).into_iter().map(CoefficientExpr::pi_times).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    type E = CoefficientExpr;

    #[test]
    fn rational_constant_is_a_point() {
        for prec in [16, 64, 256] {
            let enc = eval_interval(&E::ratio(1, 3), prec).unwrap();
            assert_eq!(enc.lo, rational(1, 3));
            assert_eq!(enc.hi, rational(1, 3));
        }
    }

    #[test]
    fn pi_enclosure_width() {
        let enc = eval_interval(&E::pi(), 64).unwrap();
        let bound = Rational::new(BigInt::one(), BigInt::one() << 60u32);
        assert!(enc.width() < bound);
        assert!(enc.lo_f64() <= PI && PI <= enc.hi_f64());
        assert!(enc.hi_f64() - enc.lo_f64() < 1e-15);
    }

    #[test]
    fn cos_19_degrees() {
        let e = E::pi_times(rational(19, 180)).cos();
        let enc = eval_interval(&e, 128).unwrap();
        // 0.94551857559931680... from an mpmath reference.
        let reference = Rational::new(BigInt::from(9_455_185_755_993_168_i64), BigInt::from(10i64.pow(16)));
        let slack = rational(1, 10i64.pow(16));
        assert!(enc.lo <= &reference + &slack && &reference - &slack <= enc.hi);
        assert!(enc.width() < Rational::new(BigInt::one(), BigInt::one() << 120u32));
    }

    #[test]
    fn rounding_examples() {
        assert_eq!(round_up(&E::ratio(1, 3), 3000).unwrap(), rational(1, 3));
        assert_eq!(round_down(&E::ratio(1, 3), 3000).unwrap(), rational(1, 3));
        assert_eq!(round_up(&E::pi(), 3000).unwrap(), rational(9425, 3000));
        assert_eq!(round_down(&E::pi(), 3000).unwrap(), rational(9424, 3000));
        let e = E::int(1) - (E::pi() / E::int(2)).cos();
        assert_eq!(round_up(&e, 3000).unwrap(), Rational::one());
        assert_eq!(round_down(&e, 3000).unwrap(), Rational::one());
        assert_eq!(round_up(&E::pi(), 0), Err(ExactError::InvalidDenominator));
    }

    #[test]
    fn domain_violations() {
        assert!(matches!(
            eval_interval(&E::int(2).arccos(), 64),
            Err(ExactError::DomainViolation { operation: "arccos", .. })
        ));
        assert!(matches!(
            eval_interval(&(E::int(0) - E::pi()).sqrt(), 64),
            Err(ExactError::DomainViolation { operation: "sqrt", .. })
        ));
        assert!(round_up(&E::int(2).arccos(), 10).is_err());
    }

    #[test]
    fn grid_examples() {
        let g = grid_pi_multiples(1);
        assert_eq!(g, vec![rational(19, 180), rational(1, 2)]);
        let g = grid_pi_multiples(250);
        assert_eq!(&g[1] - &g[0], rational(71, 45000));
        assert_eq!(g[250], rational(1, 2));
        let grid = discretization_grid(250);
        assert_eq!(grid.len(), 251);
        // a_0 < π/2 − arccos(1/3)
        let threshold = E::pi() / E::int(2) - E::ratio(1, 3).arccos();
        assert_eq!(compare(&grid[0], &threshold).unwrap(), Ordering::Less);
    }

    #[test]
    fn certified_comparison() {
        assert_eq!(compare(&E::pi(), &E::ratio(22, 7)).unwrap(), Ordering::Less);
        assert_eq!(compare(&E::pi(), &E::ratio(333, 106)).unwrap(), Ordering::Greater);
        assert_eq!(compare(&E::pi_times(rational(1, 4)), &(E::pi() / E::int(4))).unwrap(), Ordering::Equal);
        let tangent = E::ratio(-1, 3).arccos() / E::int(2);
        let cover = E::ratio(1, 3).arccos();
        assert_eq!(compare(&tangent, &cover).unwrap(), Ordering::Less);
    }

    #[test]
    fn tie_is_reported_not_guessed() {
        // cos²x + sin²x − 1 is exactly 0, which the symbolic layer cannot see.
        let x = E::ratio(1, 7);
        let zero = x.clone().cos() * x.clone().cos() + x.clone().sin() * x.sin() - E::int(1);
        let enc = eval_interval(&zero, 64).unwrap();
        assert!(enc.contains(&Rational::zero()));
        assert!(matches!(compare(&zero, &E::int(0)), Err(ExactError::TieUnresolved { .. })));
    }
}
