//! Weyl symmetrization into normal order, the terminating Moyal-bracket
//! series for classical symbols of commutators, and quantization of
//! integrable sets — including the correction that restores involution for
//! the exceptional 1:1:2 set.

use crate::coeff::{rat, Rat};
use crate::n3::build_exceptional_set;
use crate::op::{OpMonomial, OperatorPolynomial};
use crate::poly::{Polynomial, Var};
use crate::sets::IntegrableSet;
use num_traits::{One, Zero};
use std::collections::HashMap;

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

fn factorial(k: u32) -> Rat {
    let mut acc = Rat::one();
    for i in 2..=k {
        acc *= Rat::from_integer(i.into());
    }
    acc
}

/// Weyl (symmetric ordering) quantization, written in normal order. The
/// orderings of distinct modes commute, so the transform factorizes into
/// the per-mode binomial sum
/// `W(z^a z̄^b) = Σ_k C(a,k) C(b,k) k!/2^k · ẑ*^{b−k} ẑ^{a−k}`.
pub fn weyl_symmetrize(p: &Polynomial) -> OperatorPolynomial {
    let n = p.modes();
    let mut out = OperatorPolynomial::zero(n);
    for (m, c) in p.terms() {
        let mut partial: Vec<(Rat, OpMonomial)> = vec![(Rat::one(), OpMonomial::unit(n))];
        for j in 0..n {
            let a = m.a[j];
            let b = m.b[j];
            let mut next = Vec::with_capacity(partial.len() * (a.min(b) as usize + 1));
            for k in 0..=a.min(b) {
                let f = binomial(a, k) * binomial(b, k) * factorial(k)
                    / Rat::from_integer(2i64.pow(k).into());
                for (w, mono) in &partial {
                    let mut mono = mono.clone();
                    mono.cr[j] = b - k;
                    mono.an[j] = a - k;
                    next.push((w * &f, mono));
                }
            }
            partial = next;
        }
        for (w, mono) in partial {
            let term = OperatorPolynomial::from_term(n, mono, c.scale_rat(&w));
            out = &out + &term;
        }
    }
    out
}

type DerivKey = (Vec<u32>, Vec<u32>);

struct DerivCache<'a> {
    base: &'a Polynomial,
    map: HashMap<DerivKey, Polynomial>,
}

impl<'a> DerivCache<'a> {
    fn new(base: &'a Polynomial) -> Self {
        DerivCache {
            base,
            map: HashMap::new(),
        }
    }

    fn get(&mut self, alpha: &[u32], beta: &[u32]) -> Polynomial {
        let key = (alpha.to_vec(), beta.to_vec());
        if let Some(p) = self.map.get(&key) {
            return p.clone();
        }
        let n = self.base.modes();
        let value = if alpha.iter().all(|&x| x == 0) && beta.iter().all(|&x| x == 0) {
            self.base.clone()
        } else if let Some(j) = (0..n).find(|&j| alpha[j] > 0) {
            let mut parent = alpha.to_vec();
            parent[j] -= 1;
            self.get(&parent, beta).derivative(Var::Z(j))
        } else {
            let j = (0..n).find(|&j| beta[j] > 0).unwrap();
            let mut parent = beta.to_vec();
            parent[j] -= 1;
            self.get(alpha, &parent).derivative(Var::Zbar(j))
        };
        self.map.insert(key, value.clone());
        value
    }
}

fn enumerate_split(total: u32, slots: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; slots];
    fn rec(cur: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[pos] = e;
            rec(cur, pos + 1, left - e, out);
        }
    }
    if slots == 0 {
        return out;
    }
    rec(&mut cur, 0, total, &mut out);
    out
}

fn multi_factorial(v: &[u32]) -> Rat {
    v.iter().map(|&e| factorial(e)).product()
}

/// Classical symbol of the commutator of the Weyl quantizations:
/// `weyl(moyal(H, F)) = [weyl(H), weyl(F)]` exactly. The series
///
/// `G = Σ_k Σ_{|α+β| = 2k+1} (−1)^{|β|}/(2^{2k} α! β!)
///        · ∂^{α}_z ∂^{β}_z̄ H · ∂^{β}_z ∂^{α}_z̄ F`
///
/// terminates once `2k+1` exceeds the smaller total degree; the `k = 0`
/// slice is `−i{H, F}`.
pub fn moyal_bracket(h: &Polynomial, f: &Polynomial) -> Polynomial {
    let n = h.modes();
    assert_eq!(n, f.modes(), "mode-count mismatch");
    let mut h_cache = DerivCache::new(h);
    let mut f_cache = DerivCache::new(f);
    let max_order = h.degree().min(f.degree());
    let mut out = Polynomial::zero(n);
    let mut k = 0u32;
    while 2 * k + 1 <= max_order {
        let order = 2 * k + 1;
        let scale = Rat::one() / Rat::from_integer(4i64.pow(k).into());
        for split in enumerate_split(order, 2 * n) {
            let alpha = &split[..n];
            let beta = &split[n..];
            let dh = h_cache.get(alpha, beta);
            if dh.is_zero() {
                continue;
            }
            let df = f_cache.get(beta, alpha);
            if df.is_zero() {
                continue;
            }
            let beta_sum: u32 = beta.iter().sum();
            let sign = if beta_sum % 2 == 0 { 1 } else { -1 };
            let w = &scale * rat(sign, 1) / (multi_factorial(alpha) * multi_factorial(beta));
            out = &out + &(&dh * &df).scale_rat(&w);
        }
        k += 1;
    }
    out
}

/// Element-wise Weyl quantization of a set.
pub fn quantize_set(set: &IntegrableSet) -> Vec<(String, OperatorPolynomial)> {
    set.elements
        .iter()
        .map(|e| (e.name.clone(), weyl_symmetrize(&e.poly)))
        .collect()
}

/// All central-vs-all commutators; nonzero residual operators are returned
/// with the pair that produced them.
pub fn commutator_audit(
    ops: &[(String, OperatorPolynomial)],
    k: usize,
) -> Vec<(String, OperatorPolynomial)> {
    let mut out = Vec::new();
    for i in 0..k.min(ops.len()) {
        for j in i + 1..ops.len() {
            let residual = ops[i].1.commutator(&ops[j].1);
            out.push((format!("{}|{}", ops[i].0, ops[j].0), residual));
        }
    }
    out
}

/// The quantized exceptional triple: symmetrization alone leaves a residual
/// commutator, cured by subtracting `(5/4)Î₁` from the third operator.
pub fn quantize_exceptional() -> Vec<(String, OperatorPolynomial)> {
    let set = build_exceptional_set();
    let mut ops = quantize_set(&set);
    let correction = OperatorPolynomial::action(3, 0).scale_rat(&rat(5, 4));
    ops[2].1 = &ops[2].1 - &correction;
    ops
}
