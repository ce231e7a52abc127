//! Exact coefficient field: complex numbers over the rationals adjoined √2.
//!
//! Every coefficient is `(a + b√2) + (c + d√2)·i` with `a,b,c,d` arbitrary
//! precision rationals. The √2 components stay zero for everything except
//! values produced by symplectic transforms whose matrix entries contain
//! 1/√2; carrying the extension keeps those transforms exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Renders a rational as a decimal-free `p/q` string (`p` when `q = 1`).
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p` or `p/q`; rejects anything with a decimal point.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if s.contains('.') {
        return None;
    }
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(Rat::from_integer),
        Some((p, q)) => {
            let num = p.trim().parse::<BigInt>().ok()?;
            let den = q.trim().parse::<BigInt>().ok()?;
            if den.is_zero() {
                None
            } else {
                Some(Rat::new(num, den))
            }
        }
    }
}

/// Element of ℚ(√2): `a + b·√2`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadRat {
    pub a: Rat,
    pub b: Rat,
}

impl QuadRat {
    pub fn new(a: Rat, b: Rat) -> Self {
        QuadRat { a, b }
    }

    pub fn zero() -> Self {
        QuadRat {
            a: Rat::zero(),
            b: Rat::zero(),
        }
    }

    pub fn from_rat(a: Rat) -> Self {
        QuadRat {
            a,
            b: Rat::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn mul(&self, o: &QuadRat) -> QuadRat {
        QuadRat {
            a: &self.a * &o.a + rat_int(2) * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }

    pub fn add(&self, o: &QuadRat) -> QuadRat {
        QuadRat {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
        }
    }

    pub fn sub(&self, o: &QuadRat) -> QuadRat {
        QuadRat {
            a: &self.a - &o.a,
            b: &self.b - &o.b,
        }
    }

    pub fn neg(&self) -> QuadRat {
        QuadRat {
            a: -self.a.clone(),
            b: -self.b.clone(),
        }
    }

    /// Multiplicative inverse; `a² − 2b²` never vanishes for a nonzero element
    /// because √2 is irrational.
    pub fn inv(&self) -> QuadRat {
        let den = &self.a * &self.a - rat_int(2) * &self.b * &self.b;
        assert!(!den.is_zero(), "inverse of zero in QuadRat");
        QuadRat {
            a: &self.a / &den,
            b: -(&self.b / &den),
        }
    }

    /// Numeric value, for float back ends.
    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.a) + std::f64::consts::SQRT_2 * rat_to_f64(&self.b)
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // Good enough for the magnitudes appearing here; exact paths never use it.
    let num = r.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
    let den = r.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
    num / den
}

/// Exact complex scalar over ℚ(i,√2).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExactComplex {
    pub re: QuadRat,
    pub im: QuadRat,
}

impl ExactComplex {
    pub fn new(re: QuadRat, im: QuadRat) -> Self {
        ExactComplex { re, im }
    }

    pub fn zero() -> Self {
        ExactComplex {
            re: QuadRat::zero(),
            im: QuadRat::zero(),
        }
    }

    pub fn one() -> Self {
        ExactComplex::from_int(1)
    }

    pub fn i() -> Self {
        ExactComplex {
            re: QuadRat::zero(),
            im: QuadRat::from_rat(Rat::one()),
        }
    }

    /// √2 as an exact value.
    pub fn sqrt2() -> Self {
        ExactComplex {
            re: QuadRat::new(Rat::zero(), Rat::one()),
            im: QuadRat::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        ExactComplex::from_rat(rat_int(n))
    }

    pub fn from_rat(r: Rat) -> Self {
        ExactComplex {
            re: QuadRat::from_rat(r),
            im: QuadRat::zero(),
        }
    }

    pub fn from_rat_pair(re: Rat, im: Rat) -> Self {
        ExactComplex {
            re: QuadRat::from_rat(re),
            im: QuadRat::from_rat(im),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// True when both √2 components vanish, i.e. the value lies in ℚ(i).
    pub fn is_gaussian(&self) -> bool {
        self.re.is_rational() && self.im.is_rational()
    }

    /// The rational real part, if the value is a plain rational.
    pub fn as_rat(&self) -> Option<Rat> {
        if self.im.is_zero() && self.re.is_rational() {
            Some(self.re.a.clone())
        } else {
            None
        }
    }

    pub fn conj(&self) -> ExactComplex {
        ExactComplex {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    /// |z|² as an element of ℚ(√2).
    pub fn norm_sq(&self) -> QuadRat {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn inv(&self) -> ExactComplex {
        let n = self.norm_sq().inv();
        ExactComplex {
            re: self.re.mul(&n),
            im: self.im.neg().mul(&n),
        }
    }

    pub fn mul_i(&self) -> ExactComplex {
        ExactComplex {
            re: self.im.neg(),
            im: self.re.clone(),
        }
    }

    pub fn scale_rat(&self, r: &Rat) -> ExactComplex {
        let f = QuadRat::from_rat(r.clone());
        ExactComplex {
            re: self.re.mul(&f),
            im: self.im.mul(&f),
        }
    }

    pub fn pow(&self, mut e: u32) -> ExactComplex {
        let mut base = self.clone();
        let mut acc = ExactComplex::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn to_complex_f64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for &ExactComplex {
    type Output = ExactComplex;
    fn add(self, o: &ExactComplex) -> ExactComplex {
        ExactComplex {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }
}

impl Sub for &ExactComplex {
    type Output = ExactComplex;
    fn sub(self, o: &ExactComplex) -> ExactComplex {
        ExactComplex {
            re: self.re.sub(&o.re),
            im: self.im.sub(&o.im),
        }
    }
}

impl Mul for &ExactComplex {
    type Output = ExactComplex;
    fn mul(self, o: &ExactComplex) -> ExactComplex {
        ExactComplex {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }
}

impl Div for &ExactComplex {
    type Output = ExactComplex;
    fn div(self, o: &ExactComplex) -> ExactComplex {
        self * &o.inv()
    }
}

impl Neg for &ExactComplex {
    type Output = ExactComplex;
    fn neg(self) -> ExactComplex {
        ExactComplex {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.re.a.is_zero() {
            parts.push(format_rat(&self.re.a));
        }
        if !self.re.b.is_zero() {
            parts.push(format!("{}*r2", format_rat(&self.re.b)));
        }
        if !self.im.a.is_zero() {
            parts.push(format!("{}*i", format_rat(&self.im.a)));
        }
        if !self.im.b.is_zero() {
            parts.push(format!("{}*i*r2", format_rat(&self.im.b)));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (k, p) in parts.iter().enumerate() {
            if k == 0 {
                out.push_str(p);
            } else if let Some(rest) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        write!(f, "{out}")
    }
}

/// Exact square root of a nonnegative rational, when one exists.
pub fn rat_sqrt(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rat::new(n, d))
    } else {
        None
    }
}
