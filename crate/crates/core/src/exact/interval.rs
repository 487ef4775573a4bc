//! Outward-rounded fixed-point interval arithmetic.
//!
//! An [`Ival`] holds integers `lo ≤ hi` standing for the real interval
//! [lo·2⁻ᵖ, hi·2⁻ᵖ], where p is the precision of the [`Fixed`] context that
//! produced it. Every operation rounds its lower endpoint toward −∞ and its
//! upper endpoint toward +∞, and every truncated series adds a rigorous
//! remainder bound, so the true value of a computation always stays inside
//! the returned interval.

use std::cell::OnceCell;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ExactError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Ival {
    pub lo: BigInt,
    pub hi: BigInt,
}

fn floor_shr(x: &BigInt, n: u32) -> BigInt {
    x >> n
}

fn ceil_shr(x: &BigInt, n: u32) -> BigInt {
    -((-x) >> n)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn ceil_sqrt(n: &BigInt) -> BigInt {
    let s = n.sqrt();
    if &s * &s < *n {
        s + 1
    } else {
        s
    }
}

/// Evaluation context at a fixed number of fractional bits.
pub(crate) struct Fixed {
    prec: u32,
    one: BigInt,
    pi: OnceCell<Ival>,
}

impl Fixed {
    pub fn new(prec: u32) -> Self {
        Self { prec, one: BigInt::one() << prec, pi: OnceCell::new() }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn point(&self, m: BigInt) -> Ival {
        Ival { lo: m.clone(), hi: m }
    }

    pub fn one(&self) -> Ival {
        self.point(self.one.clone())
    }

    #[cfg(test)]
    pub fn int(&self, k: i64) -> Ival {
        self.point(BigInt::from(k) << self.prec)
    }

    /// Enclosure of num/den (den ≠ 0).
    pub fn ratio(&self, num: &BigInt, den: &BigInt) -> Ival {
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num.clone(), den.clone()) };
        let scaled = num << self.prec;
        Ival { lo: scaled.div_floor(&den), hi: ceil_div(&scaled, &den) }
    }

    /// Approximate value of a fixed-point integer, for heuristics only.
    fn approx(&self, m: &BigInt) -> f64 {
        let shift = self.prec.saturating_sub(60);
        let head = (m >> shift).to_f64().unwrap_or(f64::INFINITY);
        head / 2f64.powi((self.prec - shift) as i32)
    }

    pub fn approx_mid(&self, a: &Ival) -> f64 {
        (self.approx(&a.lo) + self.approx(&a.hi)) / 2.0
    }

    fn max_abs(&self, a: &Ival) -> BigInt {
        a.lo.abs().max(a.hi.abs())
    }

    pub fn add(&self, a: &Ival, b: &Ival) -> Ival {
        Ival { lo: &a.lo + &b.lo, hi: &a.hi + &b.hi }
    }

    pub fn sub(&self, a: &Ival, b: &Ival) -> Ival {
        Ival { lo: &a.lo - &b.hi, hi: &a.hi - &b.lo }
    }

    pub fn neg(&self, a: &Ival) -> Ival {
        Ival { lo: -&a.hi, hi: -&a.lo }
    }

    pub fn mul(&self, a: &Ival, b: &Ival) -> Ival {
        let products = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
        let min = products.iter().min().expect("four products");
        let max = products.iter().max().expect("four products");
        Ival { lo: floor_shr(min, self.prec), hi: ceil_shr(max, self.prec) }
    }

    pub fn sqr(&self, a: &Ival) -> Ival {
        let l2 = &a.lo * &a.lo;
        let h2 = &a.hi * &a.hi;
        if !a.lo.is_negative() {
            Ival { lo: floor_shr(&l2, self.prec), hi: ceil_shr(&h2, self.prec) }
        } else if !a.hi.is_positive() {
            Ival { lo: floor_shr(&h2, self.prec), hi: ceil_shr(&l2, self.prec) }
        } else {
            Ival { lo: BigInt::zero(), hi: ceil_shr(&l2.max(h2), self.prec) }
        }
    }

    pub fn mul_int(&self, a: &Ival, k: i64) -> Ival {
        let k = BigInt::from(k);
        if k.is_negative() {
            Ival { lo: &a.hi * &k, hi: &a.lo * &k }
        } else {
            Ival { lo: &a.lo * &k, hi: &a.hi * &k }
        }
    }

    pub fn div_int(&self, a: &Ival, k: u64) -> Ival {
        let k = BigInt::from(k);
        Ival { lo: a.lo.div_floor(&k), hi: ceil_div(&a.hi, &k) }
    }

    pub fn div(&self, a: &Ival, b: &Ival) -> Result<Ival, ExactError> {
        if !b.lo.is_positive() && !b.hi.is_negative() {
            return Err(ExactError::DomainViolation {
                operation: "division",
                detail: "divisor interval contains zero".into(),
            });
        }
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for n in [&a.lo, &a.hi] {
            let scaled = n << self.prec;
            for d in [&b.lo, &b.hi] {
                let f = scaled.div_floor(d);
                let c = ceil_div(&scaled, d);
                lo = Some(match lo {
                    Some(l) if l <= f => l,
                    _ => f,
                });
                hi = Some(match hi {
                    Some(h) if h >= c => h,
                    _ => c,
                });
            }
        }
        Ok(Ival { lo: lo.expect("nonempty"), hi: hi.expect("nonempty") })
    }

    /// Square root; an interval reaching slightly below zero is clamped at 0.
    pub fn sqrt(&self, a: &Ival) -> Result<Ival, ExactError> {
        if a.hi.is_negative() {
            return Err(ExactError::DomainViolation {
                operation: "sqrt",
                detail: "argument interval lies below 0".into(),
            });
        }
        let lo = if a.lo.is_positive() { (&a.lo << self.prec).sqrt() } else { BigInt::zero() };
        Ok(Ival { lo, hi: ceil_sqrt(&(&a.hi << self.prec)) })
    }

    fn clamp_unit(&self, a: Ival) -> Ival {
        let neg_one = -&self.one;
        Ival { lo: a.lo.max(neg_one.clone()).min(self.one.clone()), hi: a.hi.min(self.one.clone()).max(neg_one) }
    }

    fn widen(&self, a: Ival, r: &BigInt) -> Ival {
        Ival { lo: a.lo - r, hi: a.hi + r }
    }

    /// Upper bound of x^m / (m!·∏ extra) in fixed point, for x ≥ 0 given by `x`.
    fn power_bound(&self, x: &BigInt, m: u32, factorial: bool) -> BigInt {
        let mut r = self.one.clone();
        for j in 1..=m {
            r = ceil_shr(&(&r * x), self.prec);
            if factorial {
                r = ceil_div(&r, &BigInt::from(j));
            }
        }
        if !factorial {
            r = ceil_div(&r, &BigInt::from(m));
        }
        r
    }

    /// Smallest m = min + 2j with x^m/m! (or x^m/m) below 2^-(p+2).
    fn terms_needed(&self, x: f64, min: u32, factorial: bool) -> u32 {
        let target = -(self.prec as f64) - 2.0;
        let lx = x.log2();
        let mut m = min;
        loop {
            let mut l = m as f64 * lx;
            if factorial {
                l -= (1..=m).map(|j| (j as f64).log2()).sum::<f64>();
            } else {
                l -= (m as f64).log2();
            }
            if l < target || lx == f64::NEG_INFINITY {
                return m;
            }
            m += 2;
        }
    }

    pub fn pi(&self) -> Ival {
        self.pi.get_or_init(|| self.machin_pi()).clone()
    }

    /// atan(1/n) = Σ (−1)^k / ((2k+1)·n^(2k+1)), truncated with a bound.
    fn atan_inv(&self, n: u64) -> Ival {
        let n2 = BigInt::from(n * n);
        let mut power = BigInt::from(n);
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        let mut k: u64 = 0;
        loop {
            let den = &power * BigInt::from(2 * k + 1);
            let floor = self.one.div_floor(&den);
            let ceil = ceil_div(&self.one, &den);
            if floor.is_zero() {
                // Remaining alternating tail is bounded by this term.
                return Ival { lo: lo - &ceil, hi: hi + ceil };
            }
            if k % 2 == 0 {
                lo += &floor;
                hi += &ceil;
            } else {
                lo -= &ceil;
                hi -= &floor;
            }
            power *= &n2;
            k += 1;
        }
    }

    fn machin_pi(&self) -> Ival {
        let a = self.mul_int(&self.atan_inv(5), 16);
        let b = self.mul_int(&self.atan_inv(239), 4);
        self.sub(&a, &b)
    }

    /// Shifts the argument by a multiple of 2π toward zero when it is large.
    fn reduce(&self, a: &Ival) -> Ival {
        let x = self.approx_mid(a);
        if x.abs() <= 4.0 {
            return a.clone();
        }
        let k = (x / (2.0 * std::f64::consts::PI)).round() as i64;
        let two_pi = self.mul_int(&self.pi(), 2);
        self.sub(a, &self.mul_int(&two_pi, k))
    }

    pub fn cos(&self, a: &Ival) -> Ival {
        let a = self.reduce(a);
        let x = self.max_abs(&a);
        let m = self.terms_needed(self.approx(&x), 2, true);
        let s = self.sqr(&a);
        let one = self.one();
        let mut acc = one.clone();
        for k in (1..m / 2).rev() {
            let t = self.div_int(&self.mul(&s, &acc), (2 * k as u64 - 1) * (2 * k as u64));
            acc = self.sub(&one, &t);
        }
        let r = self.power_bound(&x, m, true);
        self.clamp_unit(self.widen(acc, &r))
    }

    pub fn sin(&self, a: &Ival) -> Ival {
        let a = self.reduce(a);
        let x = self.max_abs(&a);
        let m = self.terms_needed(self.approx(&x), 3, true);
        let s = self.sqr(&a);
        let one = self.one();
        let mut acc = one.clone();
        for k in (1..(m - 1) / 2).rev() {
            let t = self.div_int(&self.mul(&s, &acc), (2 * k as u64) * (2 * k as u64 + 1));
            acc = self.sub(&one, &t);
        }
        let r = self.power_bound(&x, m, true);
        self.clamp_unit(self.widen(self.mul(&a, &acc), &r))
    }

    /// atan on an interval with |z| ≤ 1/2.
    fn atan_small(&self, z: &Ival) -> Ival {
        let x = self.max_abs(z);
        let m = self.terms_needed(self.approx(&x), 3, false);
        let n_terms = (m - 1) / 2; // k = 0 .. n_terms-1
        let s = self.sqr(z);
        let coeff = |k: u32| self.ratio(&BigInt::one(), &BigInt::from(2 * k + 1));
        let mut acc = coeff(n_terms - 1);
        for k in (0..n_terms - 1).rev() {
            acc = self.sub(&coeff(k), &self.mul(&s, &acc));
        }
        let r = self.power_bound(&x, m, false);
        self.widen(self.mul(z, &acc), &r)
    }

    /// atan on an interval within [0, ∞) using two half-angle reductions
    /// atan u = 2·atan(u / (1 + √(1 + u²))).
    fn atan_nonneg(&self, u: &Ival) -> Result<Ival, ExactError> {
        let one = self.one();
        let mut z = u.clone();
        for _ in 0..2 {
            let root = self.sqrt(&self.add(&one, &self.sqr(&z)))?;
            z = self.div(&z, &self.add(&one, &root))?;
        }
        Ok(self.mul_int(&self.atan_small(&z), 4))
    }

    /// arccos at a single fixed-point value y ∈ [−1, 1].
    fn arccos_point(&self, y: &BigInt) -> Result<Ival, ExactError> {
        if y.is_negative() {
            let r = self.arccos_point(&-y)?;
            return Ok(self.sub(&self.pi(), &r));
        }
        let y = self.point(y.clone());
        let one = self.one();
        let ratio = self.div(&self.sub(&one, &y), &self.add(&one, &y))?;
        let u = self.sqrt(&ratio)?;
        Ok(self.mul_int(&self.atan_nonneg(&u)?, 2))
    }

    /// arccos is decreasing, so its range over [lo, hi] ∩ [−1, 1] is bounded
    /// by the values at the two endpoints.
    pub fn arccos(&self, a: &Ival) -> Result<Ival, ExactError> {
        let neg_one = -&self.one;
        if a.lo > self.one || a.hi < neg_one {
            return Err(ExactError::DomainViolation {
                operation: "arccos",
                detail: "argument interval lies outside [-1, 1]".into(),
            });
        }
        let top = a.hi.clone().min(self.one.clone());
        let bottom = a.lo.clone().max(neg_one);
        let lo = self.arccos_point(&top)?.lo.max(BigInt::zero());
        let hi = self.arccos_point(&bottom)?.hi.min(self.pi().hi);
        Ok(Ival { lo, hi })
    }
}
