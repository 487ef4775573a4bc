use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::interval::{Fixed, Ival};
use super::{ExactError, Rational};

/// A real number built from rationals and π with field operations, √, cos,
/// sin, cot and arccos: the closed grammar needed for the discretization
/// points a_i, the packing weights (1 − cos a_i)/2 and the objective
/// coefficients 1 − σ(C_{π/2 − a_{i+1}}).
#[derive(Clone, Debug, PartialEq)]
pub enum CoefficientExpr {
    Rational(Rational),
    Pi,
    Neg(Box<CoefficientExpr>),
    Add(Box<CoefficientExpr>, Box<CoefficientExpr>),
    Sub(Box<CoefficientExpr>, Box<CoefficientExpr>),
    Mul(Box<CoefficientExpr>, Box<CoefficientExpr>),
    Div(Box<CoefficientExpr>, Box<CoefficientExpr>),
    Sqrt(Box<CoefficientExpr>),
    Cos(Box<CoefficientExpr>),
    Sin(Box<CoefficientExpr>),
    Cot(Box<CoefficientExpr>),
    Arccos(Box<CoefficientExpr>),
}

use CoefficientExpr as E;

impl CoefficientExpr {
    pub fn rational(r: Rational) -> Self {
        E::Rational(r)
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        E::Rational(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn int(n: i64) -> Self {
        E::Rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn pi() -> Self {
        E::Pi
    }

    /// q·π for a rational q.
    pub fn pi_times(q: Rational) -> Self {
        E::Rational(q) * E::Pi
    }

    pub fn sqrt(self) -> Self {
        E::Sqrt(Box::new(self))
    }

    pub fn cos(self) -> Self {
        E::Cos(Box::new(self))
    }

    pub fn sin(self) -> Self {
        E::Sin(Box::new(self))
    }

    pub fn cot(self) -> Self {
        E::Cot(Box::new(self))
    }

    pub fn arccos(self) -> Self {
        E::Arccos(Box::new(self))
    }

    pub fn depth(&self) -> u32 {
        match self {
            E::Rational(_) | E::Pi => 1,
            E::Neg(a) | E::Sqrt(a) | E::Cos(a) | E::Sin(a) | E::Cot(a) | E::Arccos(a) => 1 + a.depth(),
            E::Add(a, b) | E::Sub(a, b) | E::Mul(a, b) | E::Div(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Exact value when the expression reduces to a rational plus a
    /// rational multiple of π.
    pub(crate) fn symbolic(&self) -> Option<PiLinear> {
        match self {
            E::Rational(r) => Some(PiLinear::rational(r.clone())),
            E::Pi => Some(PiLinear { rational: Rational::zero(), pi: Rational::one() }),
            E::Neg(a) => a.symbolic().map(|v| v.scale(&-Rational::one())),
            E::Add(a, b) => {
                let (a, b) = (a.symbolic()?, b.symbolic()?);
                Some(PiLinear { rational: a.rational + b.rational, pi: a.pi + b.pi })
            }
            E::Sub(a, b) => {
                let (a, b) = (a.symbolic()?, b.symbolic()?);
                Some(PiLinear { rational: a.rational - b.rational, pi: a.pi - b.pi })
            }
            E::Mul(a, b) => {
                let (a, b) = (a.symbolic()?, b.symbolic()?);
                if a.pi.is_zero() {
                    Some(b.scale(&a.rational))
                } else if b.pi.is_zero() {
                    Some(a.scale(&b.rational))
                } else {
                    None
                }
            }
            E::Div(a, b) => {
                let (a, b) = (a.symbolic()?, b.symbolic()?);
                if b.pi.is_zero() && !b.rational.is_zero() {
                    Some(a.scale(&b.rational.recip()))
                } else {
                    None
                }
            }
            E::Sqrt(a) => {
                let r = a.symbolic()?.as_rational()?;
                exact_sqrt(&r).map(PiLinear::rational)
            }
            E::Cos(a) => cos_pi_multiple(&a.symbolic()?.as_pi_multiple()?).map(PiLinear::rational),
            E::Sin(a) => sin_pi_multiple(&a.symbolic()?.as_pi_multiple()?).map(PiLinear::rational),
            E::Cot(a) => {
                let q = a.symbolic()?.as_pi_multiple()?;
                let (c, s) = (cos_pi_multiple(&q)?, sin_pi_multiple(&q)?);
                if s.is_zero() {
                    None
                } else {
                    Some(PiLinear::rational(c / s))
                }
            }
            E::Arccos(a) => {
                let r = a.symbolic()?.as_rational()?;
                arccos_special(&r).map(|q| PiLinear { rational: Rational::zero(), pi: q })
            }
        }
    }

    /// The exact rational value, when the expression has one that the
    /// symbolic layer can see.
    pub fn exact_rational(&self) -> Option<Rational> {
        self.symbolic()?.as_rational()
    }

    /// q when the expression is exactly q·π.
    pub fn pi_multiple(&self) -> Option<Rational> {
        self.symbolic()?.as_pi_multiple()
    }

    pub(crate) fn eval(&self, f: &Fixed) -> Result<Ival, ExactError> {
        Ok(match self {
            E::Rational(r) => f.ratio(r.numer(), r.denom()),
            E::Pi => f.pi(),
            E::Neg(a) => f.neg(&a.eval(f)?),
            E::Add(a, b) => f.add(&a.eval(f)?, &b.eval(f)?),
            E::Sub(a, b) => f.sub(&a.eval(f)?, &b.eval(f)?),
            E::Mul(a, b) => f.mul(&a.eval(f)?, &b.eval(f)?),
            E::Div(a, b) => f.div(&a.eval(f)?, &b.eval(f)?)?,
            E::Sqrt(a) => f.sqrt(&a.eval(f)?)?,
            E::Cos(a) => f.cos(&a.eval(f)?),
            E::Sin(a) => f.sin(&a.eval(f)?),
            E::Cot(a) => {
                let x = a.eval(f)?;
                f.div(&f.cos(&x), &f.sin(&x)).map_err(|_| ExactError::DomainViolation {
                    operation: "cot",
                    detail: "sine interval contains zero".into(),
                })?
            }
            E::Arccos(a) => f.arccos(&a.eval(f)?)?,
        })
    }
}

/// r + q·π with rational r, q.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct PiLinear {
    pub rational: Rational,
    pub pi: Rational,
}

impl PiLinear {
    fn rational(r: Rational) -> Self {
        Self { rational: r, pi: Rational::zero() }
    }

    fn scale(self, k: &Rational) -> Self {
        Self { rational: self.rational * k, pi: self.pi * k }
    }

    fn as_rational(&self) -> Option<Rational> {
        self.pi.is_zero().then(|| self.rational.clone())
    }

    fn as_pi_multiple(&self) -> Option<Rational> {
        self.rational.is_zero().then(|| self.pi.clone())
    }
}

fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer(), r.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d).then(|| Rational::new(sn, sd))
}

/// cos(qπ) when it is rational, i.e. for q ≡ k/3 or k/2 (mod 2).
fn cos_pi_multiple(q: &Rational) -> Option<Rational> {
    let two = Rational::from_integer(BigInt::from(2));
    let reduced = q - (q / &two).floor() * &two;
    let six = &reduced * Rational::from_integer(BigInt::from(6));
    if !six.is_integer() {
        return None;
    }
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let value = match six.to_integer().try_into().ok()? {
        0i64 => Rational::one(),
        2 | 10 => half,
        3 | 9 => Rational::zero(),
        4 | 8 => -half,
        6 => -Rational::one(),
        _ => return None,
    };
    Some(value)
}

fn sin_pi_multiple(q: &Rational) -> Option<Rational> {
    cos_pi_multiple(&(Rational::new(BigInt::one(), BigInt::from(2)) - q))
}

/// q with arccos(r) = qπ for r ∈ {−1, −1/2, 0, 1/2, 1}.
fn arccos_special(r: &Rational) -> Option<Rational> {
    let twice = r * Rational::from_integer(BigInt::from(2));
    if !twice.is_integer() {
        return None;
    }
    let q = match twice.to_integer().try_into().ok()? {
        2i64 => (0, 1),
        1 => (1, 3),
        0 => (1, 2),
        -1 => (2, 3),
        -2 => (1, 1),
        _ => return None,
    };
    Some(Rational::new(BigInt::from(q.0), BigInt::from(q.1)))
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $variant:ident) => {
        impl $trait for CoefficientExpr {
            type Output = CoefficientExpr;

            fn $method(self, rhs: CoefficientExpr) -> CoefficientExpr {
                E::$variant(Box::new(self), Box::new(rhs))
            }
        }
    };
}

binary_op!(Add, add, Add);
binary_op!(Sub, sub, Sub);
binary_op!(Mul, mul, Mul);
binary_op!(Div, div, Div);

impl Neg for CoefficientExpr {
    type Output = CoefficientExpr;

    fn neg(self) -> CoefficientExpr {
        E::Neg(Box::new(self))
    }
}

impl fmt::Display for CoefficientExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            E::Rational(r) => write!(f, "{r}"),
            E::Pi => write!(f, "pi"),
            E::Neg(a) => write!(f, "-({a})"),
            E::Add(a, b) => write!(f, "({a} + {b})"),
            E::Sub(a, b) => write!(f, "({a} - {b})"),
            E::Mul(a, b) => write!(f, "{a}*{b}"),
            E::Div(a, b) => write!(f, "{a}/{b}"),
            E::Sqrt(a) => write!(f, "sqrt({a})"),
            E::Cos(a) => write!(f, "cos({a})"),
            E::Sin(a) => write!(f, "sin({a})"),
            E::Cot(a) => write!(f, "cot({a})"),
            E::Arccos(a) => write!(f, "arccos({a})"),
        }
    }
}
