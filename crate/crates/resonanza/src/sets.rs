//! Integrable sets of classical observables and their general constructors.
//!
//! A set carries `2n − k` named elements whose first `k` ("central")
//! elements Poisson-commute with everything in the set. Constructors
//! validate the integer-vector preconditions exactly and name the violated
//! constraint on failure; the analytic involution claims themselves are
//! machine-checked by the verification module.

use crate::coeff::{rat, ExactComplex, Rat};
use crate::error::Error;
use crate::freq::FrequencyVector;
use crate::linalg::rank_rational;
use crate::poly::Polynomial;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct SetMetadata {
    pub family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_vectors: Option<Vec<Vec<i64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_vectors: Option<Vec<Vec<i64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundaries: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_prime: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<(i64, i64)>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub transformed: bool,
}

impl SetMetadata {
    pub fn family(name: &str) -> Self {
        SetMetadata {
            family: name.to_string(),
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SetElement {
    pub name: String,
    pub poly: Polynomial,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct IntegrableSet {
    pub name: String,
    pub l: FrequencyVector,
    pub k: usize,
    pub elements: Vec<SetElement>,
    pub metadata: SetMetadata,
}

impl IntegrableSet {
    pub fn new(
        name: impl Into<String>,
        l: FrequencyVector,
        k: usize,
        elements: Vec<(String, Polynomial)>,
        metadata: SetMetadata,
    ) -> Result<Self, Error> {
        let n = l.n();
        if k == 0 || k > n {
            return Err(Error::precondition(format!(
                "central count k = {k} outside 1..={n}"
            )));
        }
        if elements.len() != 2 * n - k {
            return Err(Error::precondition(format!(
                "element count {} differs from 2n-k = {}",
                elements.len(),
                2 * n - k
            )));
        }
        if !metadata.transformed && elements[0].1 != l.f1() {
            return Err(Error::precondition(
                "first element of an untransformed set must be F1".to_string(),
            ));
        }
        Ok(IntegrableSet {
            name: name.into(),
            l,
            k,
            elements: elements
                .into_iter()
                .map(|(name, poly)| SetElement { name, poly })
                .collect(),
            metadata,
        })
    }

    pub fn n(&self) -> usize {
        self.l.n()
    }

    pub fn central(&self) -> &[SetElement] {
        &self.elements[..self.k]
    }

    pub fn polys(&self) -> Vec<Polynomial> {
        self.elements.iter().map(|e| e.poly.clone()).collect()
    }
}

fn fmt_vec(v: &[i64]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(","))
}

/// `R_m = ζ₁^{m₁}···ζ_n^{m_n}`: a single monomial with `z_j^{m_j}` for
/// nonnegative entries and `z̄_j^{-m_j}` for negative ones.
pub fn build_r_m(m: &[i64]) -> Polynomial {
    let n = m.len();
    let mut a = vec![0u32; n];
    let mut b = vec![0u32; n];
    for (j, &e) in m.iter().enumerate() {
        if e >= 0 {
            a[j] = e as u32;
        } else {
            b[j] = (-e) as u32;
        }
    }
    Polynomial::from_monomial(n, a, b, ExactComplex::one())
}

/// `J_r = Σ r_j I_j`; in particular `F₁ = J_l`.
pub fn build_j_r(r: &[i64]) -> Polynomial {
    let n = r.len();
    r.iter().enumerate().fold(Polynomial::zero(n), |acc, (j, &c)| {
        &acc + &Polynomial::action(n, j).scale_rat(&rat(c, 1))
    })
}

/// The exponent vector of `R_ij` for a frequency vector: `z_i^{|l_j'|}` paired
/// with `z̄_j^{|l_i'|}` when `l_i l_j > 0` and with `z_j^{|l_i'|}` otherwise,
/// after removing the common divisor of the two frequencies.
pub fn r_ij_vector(l: &FrequencyVector, i: usize, j: usize) -> Vec<i64> {
    let li = l.get(i);
    let lj = l.get(j);
    let d = li.abs().gcd(&lj.abs());
    let mut m = vec![0i64; l.n()];
    m[i] = lj.abs() / d;
    m[j] = if li * lj > 0 { -(li.abs() / d) } else { li.abs() / d };
    m
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn integer_rank(vs: &[Vec<i64>]) -> usize {
    let rows: Vec<Vec<Rat>> = vs
        .iter()
        .map(|v| v.iter().map(|&x| rat(x, 1)).collect())
        .collect();
    rank_rational(&rows)
}

fn require_independent(vs: &[Vec<i64>], what: &str) -> Result<(), Error> {
    if integer_rank(vs) != vs.len() {
        return Err(Error::precondition(format!(
            "{what} vectors are linearly dependent"
        )));
    }
    Ok(())
}

fn require_orthogonal(
    rs: &[Vec<i64>],
    ms: &[Vec<i64>],
    i_max: usize,
    j_range: std::ops::Range<usize>,
) -> Result<(), Error> {
    for i in 0..i_max {
        for j in j_range.clone() {
            let d = dot(&rs[i], &ms[j]);
            if d != 0 {
                return Err(Error::precondition(format!(
                    "r({})·m({}) = {d} must vanish",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

/// General-symmetry integrable sets. Two input shapes are accepted:
///
/// * `n` vectors `r` and `n−k` vectors `m`: the elements are
///   `(J_{r⁽¹⁾},…,J_{r⁽ⁿ⁾}, Im R_{m⁽¹⁾},…)` with `k` central `J`s.
/// * `n−k'` vectors `r` and `h` vectors `m` (mixed shape): the elements are
///   `(𝒥₁, ℛ₁; 𝒥₂, ℛ₂)` with `k = n−h+k'` and `ℛ₁` central.
pub fn build_general_set(
    l: &FrequencyVector,
    r_vectors: &[Vec<i64>],
    m_vectors: &[Vec<i64>],
    k: usize,
) -> Result<IntegrableSet, Error> {
    let n = l.n();
    for v in r_vectors.iter().chain(m_vectors) {
        if v.len() != n {
            return Err(Error::ModeMismatch {
                left: n,
                right: v.len(),
            });
        }
    }
    if k == 0 || k > n {
        return Err(Error::precondition(format!("k = {k} outside 1..={n}")));
    }
    if r_vectors.is_empty() || r_vectors[0] != l.as_slice() {
        return Err(Error::precondition("r(1) must equal the frequency vector l".to_string()));
    }

    if r_vectors.len() == n && m_vectors.len() == n - k {
        require_independent(r_vectors, "r")?;
        if !m_vectors.is_empty() {
            require_independent(m_vectors, "m")?;
        }
        require_orthogonal(r_vectors, m_vectors, k, 0..m_vectors.len())?;

        let mut elements = Vec::new();
        for (i, r) in r_vectors.iter().enumerate() {
            let name = if i == 0 {
                "F1".to_string()
            } else {
                format!("J{}", fmt_vec(r))
            };
            elements.push((name, build_j_r(r)));
        }
        for m in m_vectors {
            elements.push((format!("ImR{}", fmt_vec(m)), build_r_m(m).imag_part()));
        }
        let mut meta = SetMetadata::family("general");
        meta.r_vectors = Some(r_vectors.to_vec());
        meta.m_vectors = Some(m_vectors.to_vec());
        return IntegrableSet::new(
            format!("general-n{n}-k{k}"),
            l.clone(),
            k,
            elements,
            meta,
        );
    }

    // Mixed shape: k' = n − #r, h = #m, central part (𝒥₁, ℛ₁).
    let k_prime = n
        .checked_sub(r_vectors.len())
        .ok_or_else(|| Error::precondition("too many r vectors".to_string()))?;
    let h = m_vectors.len();
    if k_prime == 0 || h < k_prime {
        return Err(Error::precondition(format!(
            "mixed shape needs 1 <= k' <= h (k' = {k_prime}, h = {h})"
        )));
    }
    if k != n - h + k_prime {
        return Err(Error::precondition(format!(
            "k = {k} inconsistent with n-h+k' = {}",
            n - h + k_prime
        )));
    }
    if h > k_prime && h >= n - k_prime {
        return Err(Error::precondition(format!(
            "mixed shape needs h = k' or k' < h < n-k' (k' = {k_prime}, h = {h})"
        )));
    }
    require_independent(r_vectors, "r")?;
    require_independent(m_vectors, "m")?;
    for (j, m) in m_vectors.iter().enumerate() {
        let d = dot(l.as_slice(), m);
        if d != 0 {
            return Err(Error::precondition(format!(
                "l·m({}) = {d} must vanish",
                j + 1
            )));
        }
    }
    // Central Im R's must have support disjoint from every other m vector.
    for j in 0..k_prime {
        for i in 0..h {
            if i == j {
                continue;
            }
            if let Some(p) = (0..n).find(|&p| m_vectors[i][p] * m_vectors[j][p] != 0) {
                return Err(Error::precondition(format!(
                    "m({})_p·m({})_p != 0 at p = {}",
                    i + 1,
                    j + 1,
                    p + 1
                )));
            }
        }
    }
    require_orthogonal(r_vectors, m_vectors, r_vectors.len(), 0..k_prime)?;
    require_orthogonal(r_vectors, m_vectors, n - h, k_prime..h)?;

    let mut elements = Vec::new();
    for (i, r) in r_vectors.iter().enumerate().take(n - h) {
        let name = if i == 0 {
            "F1".to_string()
        } else {
            format!("J{}", fmt_vec(r))
        };
        elements.push((name, build_j_r(r)));
    }
    for m in m_vectors.iter().take(k_prime) {
        elements.push((format!("ImR{}", fmt_vec(m)), build_r_m(m).imag_part()));
    }
    for r in r_vectors.iter().skip(n - h) {
        elements.push((format!("J{}", fmt_vec(r)), build_j_r(r)));
    }
    for m in m_vectors.iter().skip(k_prime) {
        elements.push((format!("ImR{}", fmt_vec(m)), build_r_m(m).imag_part()));
    }
    let mut meta = SetMetadata::family("general-mixed");
    meta.r_vectors = Some(r_vectors.to_vec());
    meta.m_vectors = Some(m_vectors.to_vec());
    meta.k_prime = Some(k_prime);
    meta.h = Some(h);
    IntegrableSet::new(
        format!("general-mixed-n{n}-k{k}"),
        l.clone(),
        k,
        elements,
        meta,
    )
}

/// Enumerates small integer `(r, m)` choices for the plain general shape:
/// `r` is completed with unit vectors, `m` by scanning vectors with entries
/// bounded by `bound` that are orthogonal to the central `r`s.
pub fn find_general_vectors(
    l: &FrequencyVector,
    k: usize,
    bound: i64,
) -> Result<(Vec<Vec<i64>>, Vec<Vec<i64>>), Error> {
    let n = l.n();
    if k == 0 || k > n {
        return Err(Error::precondition(format!("k = {k} outside 1..={n}")));
    }
    let mut rs: Vec<Vec<i64>> = vec![l.as_slice().to_vec()];
    for j in 0..n {
        if rs.len() == n {
            break;
        }
        let mut e = vec![0i64; n];
        e[j] = 1;
        rs.push(e.clone());
        if integer_rank(&rs) != rs.len() {
            rs.pop();
        }
    }

    if n - k == 0 {
        return Ok((rs, Vec::new()));
    }
    let width = (2 * bound + 1) as u128;
    let total = width.checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > 10_000_000 {
        return Err(Error::Overflow(format!(
            "vector search space {total} too large at bound {bound}"
        )));
    }
    let mut ms: Vec<Vec<i64>> = Vec::new();
    let mut cur = vec![-bound; n];
    'outer: loop {
        let candidate = cur.clone();
        // canonical sign: first nonzero entry positive
        let ok_sign = candidate
            .iter()
            .find(|&&x| x != 0)
            .map(|&x| x > 0)
            .unwrap_or(false);
        if ok_sign && rs[..k].iter().all(|r| dot(r, &candidate) == 0) {
            ms.push(candidate);
            if integer_rank(&ms) != ms.len() {
                ms.pop();
            } else if ms.len() == n - k {
                return Ok((rs, ms));
            }
        }
        for j in (0..n).rev() {
            if cur[j] < bound {
                cur[j] += 1;
                continue 'outer;
            }
            cur[j] = -bound;
        }
        break;
    }
    Err(Error::Overflow(format!(
        "found only {} of {} m vectors with entries bounded by {bound}",
        ms.len(),
        n - k
    )))
}

/// Sparse polynomial in `k` abstract variables with rational coefficients;
/// input shape for composing hamiltonians out of central elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarPoly {
    k: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl VarPoly {
    pub fn zero(k: usize) -> Self {
        VarPoly {
            k,
            terms: BTreeMap::new(),
        }
    }

    pub fn var(k: usize, i: usize) -> Self {
        let mut e = vec![0u32; k];
        e[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, Rat::from_integer(1.into()));
        VarPoly { k, terms }
    }

    pub fn constant(k: usize, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !num_traits::Zero::is_zero(&c) {
            terms.insert(vec![0u32; k], c);
        }
        VarPoly { k, terms }
    }

    pub fn vars(&self) -> usize {
        self.k
    }

    pub fn plus(&self, o: &VarPoly) -> VarPoly {
        assert_eq!(self.k, o.k);
        let mut terms = self.terms.clone();
        for (e, c) in &o.terms {
            let entry = terms.entry(e.clone()).or_insert_with(|| Rat::from_integer(0.into()));
            *entry += c;
            if num_traits::Zero::is_zero(entry) {
                terms.remove(e);
            }
        }
        VarPoly { k: self.k, terms }
    }

    pub fn times(&self, o: &VarPoly) -> VarPoly {
        assert_eq!(self.k, o.k);
        let mut out = VarPoly::zero(self.k);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let t = VarPoly {
                    k: self.k,
                    terms: BTreeMap::from([(e, c1 * c2)]),
                };
                out = out.plus(&t);
            }
        }
        out
    }
}

/// Substitutes the central elements into `f`, giving a hamiltonian that is
/// integrable for the same set.
pub fn compose_hamiltonian(central: &[Polynomial], f: &VarPoly) -> Result<Polynomial, Error> {
    if f.vars() != central.len() {
        return Err(Error::ArityMismatch {
            expected: f.vars(),
            got: central.len(),
        });
    }
    if central.is_empty() {
        return Err(Error::precondition("empty central list".to_string()));
    }
    let n = central[0].modes();
    let mut out = Polynomial::zero(n);
    for (e, c) in &f.terms {
        let mut term = Polynomial::constant(n, ExactComplex::from_rat(c.clone()));
        for (i, &exp) in e.iter().enumerate() {
            if exp > 0 {
                term = &term * &central[i].pow(exp);
            }
        }
        out = &out + &term;
    }
    Ok(out)
}

/// Basis of the polynomials of degree at most `d` in involution with `F₁`:
/// the real and imaginary parts of all `P_{a,b}` with `l·(a−b) = 0`,
/// de-duplicated modulo `a ↔ b` and including the constant.
pub fn resonance_basis(l: &FrequencyVector, d: u32) -> Vec<Polynomial> {
    resonance_basis_labeled(l, d)
        .into_iter()
        .map(|(_, p)| p)
        .collect()
}

pub fn resonance_basis_labeled(l: &FrequencyVector, d: u32) -> Vec<(String, Polynomial)> {
    let n = l.n();
    let mut exps: Vec<Vec<u32>> = Vec::new();
    let mut cur = vec![0u32; 2 * n];
    enumerate_exponents(&mut cur, 0, d, &mut exps);
    let mut out = Vec::new();
    for e in exps {
        let a = e[..n].to_vec();
        let b = e[n..].to_vec();
        if a < b {
            continue; // canonical representative has a >= b lexicographically
        }
        let mono = crate::poly::Monomial::new(a.clone(), b.clone());
        if mono.weight(l.as_slice()) != 0 {
            continue;
        }
        let p = Polynomial::from_monomial(n, a.clone(), b.clone(), ExactComplex::one());
        if a == b {
            let label = if mono.degree() == 0 {
                "1".to_string()
            } else {
                format!("Re[{}|{}]", fmt_exp(&a), fmt_exp(&b))
            };
            out.push((label, p));
        } else {
            let (re, im) = p.re_im();
            out.push((format!("Re[{}|{}]", fmt_exp(&a), fmt_exp(&b)), re));
            out.push((format!("Im[{}|{}]", fmt_exp(&a), fmt_exp(&b)), im));
        }
    }
    out.sort_by_key(|(label, p)| {
        (
            p.degree(),
            p.terms().next().map(|(m, _)| m.clone()),
            label.clone(),
        )
    });
    out
}

fn fmt_exp(e: &[u32]) -> String {
    let items: Vec<String> = e.iter().map(|x| x.to_string()).collect();
    items.join(",")
}

fn enumerate_exponents(cur: &mut Vec<u32>, pos: usize, budget: u32, out: &mut Vec<Vec<u32>>) {
    if pos == cur.len() {
        out.push(cur.clone());
        return;
    }
    for e in 0..=budget {
        cur[pos] = e;
        enumerate_exponents(cur, pos + 1, budget - e, out);
    }
    cur[pos] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn freq(l: &[i64]) -> FrequencyVector {
        FrequencyVector::new(l.to_vec()).unwrap()
    }

    #[test]
    fn r_m_cases() {
        let p = build_r_m(&[2, -1]);
        assert_eq!(p, &Polynomial::z(2, 0).pow(2) * &Polynomial::zbar(2, 1));
        assert_eq!(build_r_m(&[0, 0]), Polynomial::one(2));
        // R_m* = R_{-m}
        assert_eq!(build_r_m(&[2, -1]).conjugate(), build_r_m(&[-2, 1]));
    }

    #[test]
    fn j_r_cases() {
        let l = freq(&[1, 1, 2]);
        assert_eq!(build_j_r(l.as_slice()), l.f1());
        assert_eq!(build_j_r(&[0, 1, 0]), Polynomial::action(3, 1));
        let r = [2i64, -1, 3];
        let s = [1i64, 4, -2];
        let sum: Vec<i64> = r.iter().zip(&s).map(|(a, b)| a + b).collect();
        assert_eq!(
            &build_j_r(&r) + &build_j_r(&s),
            build_j_r(&sum)
        );
    }

    #[test]
    fn resonance_basis_112() {
        let l = freq(&[1, 1, 2]);
        let quad = resonance_basis(&l, 2);
        // constant + I1, I2, I3, Re(z1 w2), Im(z1 w2)
        assert_eq!(quad.len(), 6);
        let cubic = resonance_basis(&l, 3);
        assert_eq!(cubic.len(), 12); // adds Re/Im of w1^2 z3, w1 w2 z3, w2^2 z3
        for p in &cubic {
            assert!(l.f1().poisson_bracket(p).is_zero());
            assert!(p.is_real());
        }
    }

    #[test]
    fn resonance_basis_12() {
        let l = freq(&[1, 2]);
        let basis = resonance_basis(&l, 3);
        // constant, I1, I2, Re(z1^2 w2), Im(z1^2 w2)
        assert_eq!(basis.len(), 5);
    }

    #[test]
    fn general_set_n2() {
        let l = freq(&[1, 2]);
        let set = build_general_set(
            &l,
            &[vec![1, 2], vec![1, 0]],
            &[vec![2, -1]],
            1,
        )
        .unwrap();
        assert_eq!(set.elements.len(), 3);
        assert_eq!(set.elements[0].poly, l.f1());
        assert_eq!(set.elements[1].poly, Polynomial::action(2, 0));
        assert_eq!(set.elements[2].poly, build_r_m(&[2, -1]).imag_part());
        // all central-vs-all brackets vanish
        for e in &set.elements {
            assert!(set.elements[0].poly.poisson_bracket(&e.poly).is_zero());
        }
    }

    #[test]
    fn general_set_rij_variant() {
        let l = freq(&[1, 1, 1]);
        let m1 = r_ij_vector(&l, 0, 1);
        let m2 = r_ij_vector(&l, 0, 2);
        assert_eq!(m1, vec![1, -1, 0]);
        let set = build_general_set(
            &l,
            &[vec![1, 1, 1], vec![0, 1, 0], vec![0, 0, 1]],
            &[m1, m2],
            1,
        )
        .unwrap();
        assert_eq!(set.elements.len(), 5);
        for e in &set.elements {
            assert!(set.elements[0].poly.poisson_bracket(&e.poly).is_zero());
        }
    }

    #[test]
    fn general_set_rejects_bad_orthogonality() {
        let l = freq(&[1, 2]);
        let err = build_general_set(&l, &[vec![1, 2], vec![0, 1]], &[vec![1, 0]], 1)
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("r(1)·m(1)"), "got: {msg}");
    }

    #[test]
    fn mixed_shape_r1r2() {
        // n = 6, equal frequencies, k' = 3, h = 3: central (F1, J.., J.., R12, R34, R56)
        let l = freq(&[1, 1, 1, 1, 1, 1]);
        let ms = vec![
            r_ij_vector(&l, 0, 1),
            r_ij_vector(&l, 2, 3),
            r_ij_vector(&l, 4, 5),
        ];
        // r's: l plus two more orthogonal to all m's (constant on support pairs)
        let rs = vec![
            vec![1, 1, 1, 1, 1, 1],
            vec![1, 1, 0, 0, 0, 0],
            vec![0, 0, 1, 1, 0, 0],
        ];
        let set = build_general_set(&l, &rs, &ms, 6 - 3 + 3).unwrap();
        assert_eq!(set.k, 6);
        assert_eq!(set.elements.len(), 6);
        for c in set.central() {
            for e in &set.elements {
                assert!(
                    c.poly.poisson_bracket(&e.poly).is_zero(),
                    "{} vs {}",
                    c.name,
                    e.name
                );
            }
        }
    }

    #[test]
    fn vector_search_produces_verifiable_set() {
        let l = freq(&[1, 1]);
        let (rs, ms) = find_general_vectors(&l, 1, 2).unwrap();
        let set = build_general_set(&l, &rs, &ms, 1).unwrap();
        assert_eq!(set.elements.len(), 3);
        for e in &set.elements {
            assert!(set.elements[0].poly.poisson_bracket(&e.poly).is_zero());
        }
    }

    #[test]
    fn compose_examples() {
        let l = freq(&[1, 1, 2]);
        let central = vec![l.f1(), Polynomial::action(3, 0)];
        let f = VarPoly::var(2, 0);
        assert_eq!(compose_hamiltonian(&central, &f).unwrap(), l.f1());
        let f2 = VarPoly::var(2, 1).times(&VarPoly::var(2, 1));
        assert_eq!(
            compose_hamiltonian(&central, &f2).unwrap(),
            Polynomial::action(3, 0).pow(2)
        );
        let bad = VarPoly::var(3, 0);
        assert!(matches!(
            compose_hamiltonian(&central, &bad),
            Err(Error::ArityMismatch { .. })
        ));
    }
}
