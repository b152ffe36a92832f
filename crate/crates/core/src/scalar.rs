//! Scalars: the exact field Q(i, sqrt 2) and the floating types used by the
//! numerical modules.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Rational number from a numerator and a nonzero denominator.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Element `(re_rat + re_sqrt2 √2) + i (im_rat + im_sqrt2 √2)` of Q(i, √2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    pub re_rat: Rational,
    pub re_sqrt2: Rational,
    pub im_rat: Rational,
    pub im_sqrt2: Rational,
}

impl ExactScalar {
    pub fn new(re_rat: Rational, re_sqrt2: Rational, im_rat: Rational, im_sqrt2: Rational) -> Self {
        ExactScalar { re_rat, re_sqrt2, im_rat, im_sqrt2 }
    }

    pub fn zero() -> Self {
        ExactScalar::new(Rational::zero(), Rational::zero(), Rational::zero(), Rational::zero())
    }

    pub fn one() -> Self {
        ExactScalar::from_rational(Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re_rat.is_zero() && self.re_sqrt2.is_zero() && self.im_rat.is_zero() && self.im_sqrt2.is_zero()
    }

    pub fn from_rational(q: Rational) -> Self {
        ExactScalar::new(q, Rational::zero(), Rational::zero(), Rational::zero())
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(rat(n, d))
    }

    pub fn sqrt2() -> Self {
        ExactScalar::new(Rational::zero(), Rational::one(), Rational::zero(), Rational::zero())
    }

    pub fn i() -> Self {
        ExactScalar::new(Rational::zero(), Rational::zero(), Rational::one(), Rational::zero())
    }

    pub fn is_real(&self) -> bool {
        self.im_rat.is_zero() && self.im_sqrt2.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.is_real() && self.re_sqrt2.is_zero()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.re_rat.clone())
    }

    pub fn to_complex64(&self) -> Complex64 {
        let s = std::f64::consts::SQRT_2;
        let f = |q: &Rational| q.to_f64().unwrap_or(f64::NAN);
        Complex64::new(
            f(&self.re_rat) + s * f(&self.re_sqrt2),
            f(&self.im_rat) + s * f(&self.im_sqrt2),
        )
    }

    /// Complex conjugation (i -> -i); √2 is fixed.
    pub fn conj(&self) -> Self {
        ExactScalar::new(
            self.re_rat.clone(),
            self.re_sqrt2.clone(),
            -self.im_rat.clone(),
            -self.im_sqrt2.clone(),
        )
    }

    /// |x|^2 as an element of Q(√2).
    pub fn norm_sqr(&self) -> ExactScalar {
        self.clone() * self.conj()
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // 1/z = conj(z)/|z|^2 and |z|^2 = a + b√2 is inverted by (a - b√2)/(a^2 - 2b^2).
        let n = self.norm_sqr();
        let (a, b) = (n.re_rat, n.re_sqrt2);
        let d = a.clone() * a.clone() - rat(2, 1) * b.clone() * b.clone();
        let ninv = ExactScalar::new(a / d.clone(), -b / d, Rational::zero(), Rational::zero());
        Some(self.conj() * ninv)
    }

    fn re_pair(&self) -> (&Rational, &Rational) {
        (&self.re_rat, &self.re_sqrt2)
    }

    /// Sign of a real element of Q(√2); `None` if not real.
    pub fn real_sign(&self) -> Option<i32> {
        if !self.is_real() {
            return None;
        }
        let (a, b) = self.re_pair();
        Some(sign_q_sqrt2(a, b))
    }
}

/// Sign of a + b√2 computed exactly.
fn sign_q_sqrt2(a: &Rational, b: &Rational) -> i32 {
    let sa = sgn(a);
    let sb = sgn(b);
    if sa == 0 {
        return sb;
    }
    if sb == 0 || sa == sb {
        return sa;
    }
    // opposite signs: compare a^2 with 2 b^2
    let lhs = a * a;
    let rhs = rat(2, 1) * b * b;
    if lhs > rhs {
        sa
    } else {
        sb
    }
}

fn sgn(q: &Rational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = |a: &Rational, b: &Rational| -> String {
            match (a.is_zero(), b.is_zero()) {
                (true, true) => "0".to_string(),
                (false, true) => a.to_string(),
                (true, false) => format!("{}*sqrt2", b),
                (false, false) => format!("{} + {}*sqrt2", a, b),
            }
        };
        if self.is_real() {
            write!(f, "{}", part(&self.re_rat, &self.re_sqrt2))
        } else if self.re_rat.is_zero() && self.re_sqrt2.is_zero() {
            write!(f, "i*({})", part(&self.im_rat, &self.im_sqrt2))
        } else {
            write!(
                f,
                "({}) + i*({})",
                part(&self.re_rat, &self.re_sqrt2),
                part(&self.im_rat, &self.im_sqrt2)
            )
        }
    }
}

impl Add for ExactScalar {
    type Output = ExactScalar;
    fn add(self, o: ExactScalar) -> ExactScalar {
        ExactScalar::new(
            self.re_rat + o.re_rat,
            self.re_sqrt2 + o.re_sqrt2,
            self.im_rat + o.im_rat,
            self.im_sqrt2 + o.im_sqrt2,
        )
    }
}

impl Sub for ExactScalar {
    type Output = ExactScalar;
    fn sub(self, o: ExactScalar) -> ExactScalar {
        ExactScalar::new(
            self.re_rat - o.re_rat,
            self.re_sqrt2 - o.re_sqrt2,
            self.im_rat - o.im_rat,
            self.im_sqrt2 - o.im_sqrt2,
        )
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar::new(-self.re_rat, -self.re_sqrt2, -self.im_rat, -self.im_sqrt2)
    }
}

// (a + b√2)(c + d√2) = (ac + 2bd) + (ad + bc)√2
fn mul_q2(a: &Rational, b: &Rational, c: &Rational, d: &Rational) -> (Rational, Rational) {
    let two = rat(2, 1);
    (a * c + two * b * d, a * d + b * c)
}

impl Mul for ExactScalar {
    type Output = ExactScalar;
    fn mul(self, o: ExactScalar) -> ExactScalar {
        let zr = Rational::zero();
        let self_im = !(self.im_rat.is_zero() && self.im_sqrt2.is_zero());
        let o_im = !(o.im_rat.is_zero() && o.im_sqrt2.is_zero());
        let (rr0, rr1) = mul_q2(&self.re_rat, &self.re_sqrt2, &o.re_rat, &o.re_sqrt2);
        if !self_im && !o_im {
            return ExactScalar::new(rr0, rr1, zr.clone(), zr);
        }
        let (ii0, ii1) = mul_q2(&self.im_rat, &self.im_sqrt2, &o.im_rat, &o.im_sqrt2);
        let (ri0, ri1) = mul_q2(&self.re_rat, &self.re_sqrt2, &o.im_rat, &o.im_sqrt2);
        let (ir0, ir1) = mul_q2(&self.im_rat, &self.im_sqrt2, &o.re_rat, &o.re_sqrt2);
        ExactScalar::new(rr0 - ii0, rr1 - ii1, ri0 + ir0, ri1 + ir1)
    }
}

impl Div for ExactScalar {
    type Output = ExactScalar;
    /// Panics on division by zero; use [`ExactScalar::inv`] for a checked inverse.
    fn div(self, o: ExactScalar) -> ExactScalar {
        self * o.inv().expect("division by zero in Q(i, sqrt2)")
    }
}


/// Field operations shared by the exact and floating scalar types.
///
/// Conversion from exact constants is fallible so that real-only types can
/// reject constants with an imaginary part.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_exact(x: &ExactScalar) -> Option<Self>;
    /// Complex conjugation; identity for real types.
    fn conj(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    /// Absolute value as a float, used for tolerances and reports.
    fn magnitude(&self) -> f64;
    fn is_zero(&self) -> bool;
    fn is_exact() -> bool {
        false
    }
    fn to_complex(&self) -> Complex64;

    fn sqrt2() -> Self {
        Self::from_exact(&ExactScalar::sqrt2()).expect("sqrt2 is real")
    }
}

impl Scalar for ExactScalar {
    fn zero() -> Self {
        ExactScalar::zero()
    }
    fn one() -> Self {
        ExactScalar::one()
    }
    fn from_i64(n: i64) -> Self {
        ExactScalar::from_ratio(n, 1)
    }
    fn from_exact(x: &ExactScalar) -> Option<Self> {
        Some(x.clone())
    }
    fn conj(&self) -> Self {
        ExactScalar::conj(self)
    }
    fn inv(&self) -> Option<Self> {
        ExactScalar::inv(self)
    }
    fn magnitude(&self) -> f64 {
        self.to_complex64().norm()
    }
    fn is_zero(&self) -> bool {
        ExactScalar::is_zero(self)
    }
    fn is_exact() -> bool {
        true
    }
    fn to_complex(&self) -> Complex64 {
        self.to_complex64()
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_exact(x: &ExactScalar) -> Option<Self> {
        x.is_real().then(|| x.to_complex64().re)
    }
    fn conj(&self) -> Self {
        *self
    }
    fn inv(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn from_exact(x: &ExactScalar) -> Option<Self> {
        Some(x.to_complex64())
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn inv(&self) -> Option<Self> {
        (self.norm_sqr() != 0.0).then(|| 1.0 / self)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
}
