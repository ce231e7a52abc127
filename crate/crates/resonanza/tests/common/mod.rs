//! Shared test oracles and generators, independent of the library's own
//! computation paths: brute-force Weyl averages, dense Fock matrices built
//! from ladder-matrix products, and random object generators.
#![allow(dead_code)]

use rand_chacha::rand_core::RngCore;
use resonanza::coeff::{rat, ExactComplex};
use resonanza::fock::FockBasis;
use resonanza::op::OperatorPolynomial;
use resonanza::poly::Polynomial;

/// All distinct orderings of a word with `counts[i]` copies of letter `i`.
pub fn multiset_permutations(counts: &[u32]) -> Vec<Vec<usize>> {
    fn rec(counts: &mut Vec<u32>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if counts.iter().all(|&c| c == 0) {
            out.push(cur.clone());
            return;
        }
        for i in 0..counts.len() {
            if counts[i] > 0 {
                counts[i] -= 1;
                cur.push(i);
                rec(counts, cur, out);
                cur.pop();
                counts[i] += 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut counts.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Brute-force Weyl symmetrization of the monomial `z^a z̄^b`: the average
/// over all operator orderings of `|a|` lowering and `|b|` raising letters
/// across all modes, each product reduced to normal order.
pub fn brute_force_weyl(n: usize, a: &[u32], b: &[u32]) -> OperatorPolynomial {
    // letters 0..n are lowering of mode j, n..2n raising of mode j
    let mut counts = vec![0u32; 2 * n];
    for j in 0..n {
        counts[j] = a[j];
        counts[n + j] = b[j];
    }
    let words = multiset_permutations(&counts);
    let mut acc = OperatorPolynomial::zero(n);
    for word in &words {
        let mut prod = OperatorPolynomial::identity(n);
        for &letter in word {
            let factor = if letter < n {
                OperatorPolynomial::lowering(n, letter)
            } else {
                OperatorPolynomial::raising(n, letter - n)
            };
            prod = &prod * &factor;
        }
        acc = &acc + &prod;
    }
    acc.scale_rat(&rat(1, words.len() as i64))
}

/// Dense matrix in the rescaled number basis, built independently of the
/// sparse path: per-mode ladder matrices multiplied out term by term.
pub struct DenseMatrix {
    pub dim: usize,
    pub data: Vec<Vec<ExactComplex>>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        DenseMatrix {
            dim,
            data: vec![vec![ExactComplex::zero(); dim]; dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = DenseMatrix::zeros(dim);
        for i in 0..dim {
            m.data[i][i] = ExactComplex::one();
        }
        m
    }

    pub fn mul(&self, o: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for k in 0..self.dim {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..self.dim {
                    if o.data[k][j].is_zero() {
                        continue;
                    }
                    let t = &self.data[i][k] * &o.data[k][j];
                    out.data[i][j] = &out.data[i][j] + &t;
                }
            }
        }
        out
    }

    pub fn add_scaled(&mut self, o: &DenseMatrix, c: &ExactComplex) {
        for i in 0..self.dim {
            for j in 0..self.dim {
                if !o.data[i][j].is_zero() {
                    let t = &o.data[i][j] * c;
                    self.data[i][j] = &self.data[i][j] + &t;
                }
            }
        }
    }
}

/// Lowering matrix of mode `j` in the rescaled basis: `ν ↦ ν_j · (ν − e_j)`.
pub fn dense_lowering(basis: &FockBasis, j: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(basis.dim());
    for (col, nu) in basis.states().iter().enumerate() {
        if nu[j] == 0 {
            continue;
        }
        let mut target = nu.clone();
        target[j] -= 1;
        if let Some(row) = basis.index_of(&target) {
            m.data[row][col] = ExactComplex::from_int(nu[j] as i64);
        }
    }
    m
}

/// Raising matrix of mode `j` in the rescaled basis: `ν ↦ ν + e_j`.
pub fn dense_raising(basis: &FockBasis, j: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(basis.dim());
    for (col, nu) in basis.states().iter().enumerate() {
        let mut target = nu.clone();
        target[j] += 1;
        if let Some(row) = basis.index_of(&target) {
            m.data[row][col] = ExactComplex::one();
        }
    }
    m
}

/// Dense matrix of a normal-ordered operator: for each term multiply the
/// per-mode raising powers after the lowering powers.
pub fn dense_matrix_of(op: &OperatorPolynomial, basis: &FockBasis) -> DenseMatrix {
    let n = basis.n();
    let lowering: Vec<DenseMatrix> = (0..n).map(|j| dense_lowering(basis, j)).collect();
    let raising: Vec<DenseMatrix> = (0..n).map(|j| dense_raising(basis, j)).collect();
    let mut out = DenseMatrix::zeros(basis.dim());
    for (mono, c) in op.terms() {
        let mut prod = DenseMatrix::identity(basis.dim());
        for j in 0..n {
            for _ in 0..mono.an[j] {
                prod = prod.mul(&lowering[j]);
            }
        }
        let mut raised = prod;
        for j in 0..n {
            for _ in 0..mono.cr[j] {
                raised = raising[j].mul(&raised);
            }
        }
        out.add_scaled(&raised, c);
    }
    out
}

pub fn rand_range(rng: &mut impl RngCore, lo: i64, hi: i64) -> i64 {
    lo + (rng.next_u64() % (hi - lo + 1) as u64) as i64
}

/// Random sparse polynomial with small rational coefficients.
pub fn random_poly(rng: &mut impl RngCore, n: usize, max_deg: u32, terms: usize) -> Polynomial {
    let mut p = Polynomial::zero(n);
    for _ in 0..terms {
        let mut a = vec![0u32; n];
        let mut b = vec![0u32; n];
        let mut budget = rand_range(rng, 0, max_deg as i64) as u32;
        for j in 0..n {
            let e = rand_range(rng, 0, budget as i64) as u32;
            if rng.next_u64() % 2 == 0 {
                a[j] = e;
            } else {
                b[j] = e;
            }
            budget -= e;
        }
        let c = ExactComplex::from_rat_pair(
            rat(rand_range(rng, -4, 4), rand_range(rng, 1, 3)),
            rat(rand_range(rng, -4, 4), rand_range(rng, 1, 3)),
        );
        p = &p + &Polynomial::from_monomial(n, a, b, c);
    }
    p
}

pub fn random_real_poly(
    rng: &mut impl RngCore,
    n: usize,
    max_deg: u32,
    terms: usize,
) -> Polynomial {
    let p = random_poly(rng, n, max_deg, terms);
    &p + &p.conjugate()
}

