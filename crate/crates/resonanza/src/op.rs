//! Normal-ordered elements of the multi-mode Weyl algebra: finite sums
//! `Σ c · ẑ*^b ẑ^a` under `[ẑ_i, ẑ*_j] = δ_ij`. Products are reduced to
//! normal order through exact Wick contractions, so equality of operators
//! is literal equality of canonical forms.

use crate::coeff::{format_rat, parse_rat, ExactComplex, QuadRat, Rat};
use crate::error::Error;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// `ẑ*^cr ẑ^an` with per-mode exponents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct OpMonomial {
    pub cr: Vec<u32>,
    pub an: Vec<u32>,
}

impl OpMonomial {
    pub fn unit(n: usize) -> Self {
        OpMonomial {
            cr: vec![0; n],
            an: vec![0; n],
        }
    }

    pub fn degree(&self) -> u32 {
        self.cr.iter().sum::<u32>() + self.an.iter().sum::<u32>()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OperatorPolynomial {
    n: usize,
    terms: BTreeMap<OpMonomial, ExactComplex>,
}

fn binomial(n: u32, k: u32) -> Rat {
    if k > n {
        return Rat::zero();
    }
    let mut acc = Rat::one();
    for i in 0..k {
        acc *= Rat::from_integer((n - i).into());
        acc /= Rat::from_integer((i + 1).into());
    }
    acc
}

fn factorial_rat(k: u32) -> Rat {
    let mut acc = Rat::one();
    for i in 2..=k {
        acc *= Rat::from_integer(i.into());
    }
    acc
}

impl OperatorPolynomial {
    pub fn zero(n: usize) -> Self {
        OperatorPolynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        OperatorPolynomial::constant(n, ExactComplex::one())
    }

    pub fn constant(n: usize, c: ExactComplex) -> Self {
        let mut p = OperatorPolynomial::zero(n);
        if !c.is_zero() {
            p.terms.insert(OpMonomial::unit(n), c);
        }
        p
    }

    /// Annihilation operator of mode `j`.
    pub fn lowering(n: usize, j: usize) -> Self {
        let mut m = OpMonomial::unit(n);
        m.an[j] = 1;
        OperatorPolynomial::from_term(n, m, ExactComplex::one())
    }

    /// Creation operator of mode `j`.
    pub fn raising(n: usize, j: usize) -> Self {
        let mut m = OpMonomial::unit(n);
        m.cr[j] = 1;
        OperatorPolynomial::from_term(n, m, ExactComplex::one())
    }

    /// `Î_j = ẑ*_j ẑ_j + 1/2`, the symmetrized action of mode `j`.
    pub fn action(n: usize, j: usize) -> Self {
        let mut m = OpMonomial::unit(n);
        m.cr[j] = 1;
        m.an[j] = 1;
        let mut p = OperatorPolynomial::from_term(n, m, ExactComplex::one());
        p.insert_add(
            OpMonomial::unit(n),
            ExactComplex::from_rat(Rat::new(1.into(), 2.into())),
        );
        p
    }

    pub fn from_term(n: usize, m: OpMonomial, c: ExactComplex) -> Self {
        assert_eq!(m.cr.len(), n);
        assert_eq!(m.an.len(), n);
        let mut p = OperatorPolynomial::zero(n);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OpMonomial, &ExactComplex)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &OpMonomial) -> ExactComplex {
        self.terms.get(m).cloned().unwrap_or_else(ExactComplex::zero)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(OpMonomial::degree).max().unwrap_or(0)
    }

    fn insert_add(&mut self, m: OpMonomial, c: ExactComplex) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, c);
            }
            Some(old) => {
                let s = &old + &c;
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
        }
    }

    pub fn scale(&self, c: &ExactComplex) -> Self {
        if c.is_zero() {
            return OperatorPolynomial::zero(self.n);
        }
        OperatorPolynomial {
            n: self.n,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        self.scale(&ExactComplex::from_rat(r.clone()))
    }

    pub fn checked_mul(&self, o: &OperatorPolynomial) -> Result<OperatorPolynomial, Error> {
        if self.n != o.n {
            return Err(Error::ModeMismatch {
                left: self.n,
                right: o.n,
            });
        }
        let mut out = OperatorPolynomial::zero(self.n);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                // Move ẑ^a1 through ẑ*^b2 one mode at a time:
                // ẑ^a ẑ*^d = Σ_k C(a,k) C(d,k) k! ẑ*^{d−k} ẑ^{a−k}.
                let mut partial: Vec<(Rat, OpMonomial)> =
                    vec![(Rat::one(), OpMonomial::unit(self.n))];
                for j in 0..self.n {
                    let a = m1.an[j];
                    let d = m2.cr[j];
                    let mut next = Vec::with_capacity(partial.len() * (a.min(d) as usize + 1));
                    for k in 0..=a.min(d) {
                        let f = binomial(a, k) * binomial(d, k) * factorial_rat(k);
                        for (w, m) in &partial {
                            let mut m = m.clone();
                            m.cr[j] = m1.cr[j] + d - k;
                            m.an[j] = a - k + m2.an[j];
                            next.push((w * &f, m));
                        }
                    }
                    partial = next;
                }
                let c = c1 * c2;
                for (w, m) in partial {
                    self_insert(&mut out, m, c.scale_rat(&w));
                }
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, o: &OperatorPolynomial) -> OperatorPolynomial {
        &(self * o) - &(o * self)
    }

    /// Hermitian adjoint: conjugate coefficients and swap ladder exponents.
    pub fn adjoint(&self) -> OperatorPolynomial {
        OperatorPolynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    (
                        OpMonomial {
                            cr: m.an.clone(),
                            an: m.cr.clone(),
                        },
                        c.conj(),
                    )
                })
                .collect(),
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self == &self.adjoint()
    }

    /// `(A − A†)/(2i)`, the operator analogue of an imaginary part.
    pub fn imag_part(&self) -> OperatorPolynomial {
        (self - &self.adjoint()).scale(&ExactComplex::from_rat_pair(
            Rat::zero(),
            Rat::new((-1).into(), 2.into()),
        ))
    }

    /// `(A + A†)/2`.
    pub fn real_part(&self) -> OperatorPolynomial {
        (self + &self.adjoint()).scale_rat(&Rat::new(1.into(), 2.into()))
    }
}

fn self_insert(p: &mut OperatorPolynomial, m: OpMonomial, c: ExactComplex) {
    p.insert_add(m, c);
}

impl Add for &OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn add(self, o: &OperatorPolynomial) -> OperatorPolynomial {
        assert_eq!(self.n, o.n, "mode-count mismatch");
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.insert_add(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn sub(self, o: &OperatorPolynomial) -> OperatorPolynomial {
        self + &(-o)
    }
}

impl Neg for &OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn neg(self) -> OperatorPolynomial {
        self.scale(&ExactComplex::from_int(-1))
    }
}

impl Mul for &OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn mul(self, o: &OperatorPolynomial) -> OperatorPolynomial {
        self.checked_mul(o).expect("mode-count mismatch")
    }
}

impl fmt::Display for OperatorPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for j in 0..self.n {
                if m.cr[j] > 0 {
                    write!(f, "*c{}^{}", j + 1, m.cr[j])?;
                }
                if m.an[j] > 0 {
                    write!(f, "*a{}^{}", j + 1, m.an[j])?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct OpTermRepr {
    creation: Vec<u32>,
    annihilation: Vec<u32>,
    re: String,
    im: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    re_s2: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    im_s2: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct OpRepr {
    n: usize,
    terms: Vec<OpTermRepr>,
}

impl Serialize for OperatorPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| OpTermRepr {
                creation: m.cr.clone(),
                annihilation: m.an.clone(),
                re: format_rat(&c.re.a),
                im: format_rat(&c.im.a),
                re_s2: if c.re.b.is_zero() {
                    None
                } else {
                    Some(format_rat(&c.re.b))
                },
                im_s2: if c.im.b.is_zero() {
                    None
                } else {
                    Some(format_rat(&c.im.b))
                },
            })
            .collect();
        OpRepr { n: self.n, terms }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for OperatorPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let repr = OpRepr::deserialize(d)?;
        let mut p = OperatorPolynomial::zero(repr.n);
        for t in repr.terms {
            if t.creation.len() != repr.n || t.annihilation.len() != repr.n {
                return Err(D::Error::custom("exponent vector length differs from n"));
            }
            let parse = |s: &str| parse_rat(s).ok_or_else(|| D::Error::custom("bad rational"));
            let c = ExactComplex::new(
                QuadRat::new(
                    parse(&t.re)?,
                    t.re_s2.as_deref().map(parse).transpose()?.unwrap_or_else(Rat::zero),
                ),
                QuadRat::new(
                    parse(&t.im)?,
                    t.im_s2.as_deref().map(parse).transpose()?.unwrap_or_else(Rat::zero),
                ),
            );
            p.insert_add(
                OpMonomial {
                    cr: t.creation,
                    an: t.annihilation,
                },
                c,
            );
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_commutation() {
        let a = OperatorPolynomial::lowering(1, 0);
        let adag = OperatorPolynomial::raising(1, 0);
        assert_eq!(a.commutator(&adag), OperatorPolynomial::identity(1));
        assert!(adag.commutator(&adag).is_zero());
        // distinct modes commute
        let a2 = OperatorPolynomial::lowering(2, 1);
        let c1 = OperatorPolynomial::raising(2, 0);
        assert!(a2.commutator(&c1).is_zero());
    }

    #[test]
    fn normal_ordering_of_a_squared_adag() {
        // ẑ² ẑ* = ẑ* ẑ² + 2ẑ
        let a = OperatorPolynomial::lowering(1, 0);
        let adag = OperatorPolynomial::raising(1, 0);
        let lhs = &(&a * &a) * &adag;
        let expect = &(&adag * &(&a * &a))
            + &a.scale(&ExactComplex::from_int(2));
        assert_eq!(lhs, expect);
    }

    #[test]
    fn product_is_associative_spot_check() {
        let a = OperatorPolynomial::lowering(1, 0);
        let adag = OperatorPolynomial::raising(1, 0);
        let x = &(&a * &a) + &adag.scale(&ExactComplex::i());
        let y = &(&adag * &a) + &OperatorPolynomial::identity(1);
        let z = &a + &(&adag * &adag);
        assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
    }

    #[test]
    fn adjoint_reverses_products() {
        let a = OperatorPolynomial::lowering(1, 0);
        let adag = OperatorPolynomial::raising(1, 0);
        let x = &(&a * &a) + &adag.scale(&ExactComplex::i());
        let y = &(&adag * &a) + &a.scale(&ExactComplex::from_int(3));
        assert_eq!((&x * &y).adjoint(), &y.adjoint() * &x.adjoint());
        assert_eq!(x.adjoint().adjoint(), x);
    }

    #[test]
    fn hermitian_predicate() {
        let n_op = OperatorPolynomial::action(1, 0);
        assert!(n_op.is_hermitian());
        let a = OperatorPolynomial::lowering(1, 0);
        assert!(!a.is_hermitian());
        // commutator of hermitians is anti-hermitian
        let x = &a + &a.adjoint();
        let y = &(&a * &a) + &(&a * &a).adjoint();
        let c = x.commutator(&y);
        assert_eq!(c.adjoint(), (&c).neg());
    }

    #[test]
    fn json_round_trip() {
        let a = OperatorPolynomial::lowering(2, 0);
        let x = &(&a * &a.adjoint()) + &OperatorPolynomial::action(2, 1).scale(&ExactComplex::i());
        let s = serde_json::to_string(&x).unwrap();
        let y: OperatorPolynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }
}
