//! Truncated Fock-space realization of operator polynomials.
//!
//! Exact matrices are stored in the rescaled number basis `|ν⟩̃ = √(ν!)|ν⟩`,
//! where `ẑ*_j` shifts up with amplitude 1 and `ẑ_j` shifts down with
//! amplitude `ν_j` — every entry is an exact integer multiple of the
//! operator coefficients. The rescaling is a diagonal similarity, so
//! commutators, diagonals, eigenvalues and block structure are unchanged;
//! hermiticity turns into a factorial-weighted predicate. Float matrices
//! are built directly in the orthonormal basis with √ amplitudes.

use crate::coeff::{rat_to_f64, ExactComplex, Rat};
use crate::error::Error;
use crate::n3::factorial;
use crate::op::OperatorPolynomial;
use crate::poly::Polynomial;
use crate::verify::{Check, Status, VerificationReport};
use num_complex::Complex64;
use num_traits::One;
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Truncation {
    /// Every mode occupation capped at `N`.
    PerMode(u32),
    /// States with `Σ w_j ν_j ≤ cap`; weights must be positive. Level sets
    /// of the weighted count are then complete in the basis.
    Weighted { weights: Vec<i64>, cap: i64 },
}

#[derive(Clone, Debug)]
pub struct FockBasis {
    n: usize,
    trunc: Truncation,
    states: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

pub fn build_basis(n: usize, trunc: Truncation) -> Result<FockBasis, Error> {
    match &trunc {
        Truncation::PerMode(cap) => {
            if *cap == 0 {
                return Err(Error::precondition("per-mode cap must be positive"));
            }
        }
        Truncation::Weighted { weights, cap } => {
            if weights.len() != n {
                return Err(Error::ModeMismatch {
                    left: n,
                    right: weights.len(),
                });
            }
            if weights.iter().any(|&w| w <= 0) {
                return Err(Error::precondition(
                    "weighted truncation needs positive weights",
                ));
            }
            if *cap < 0 {
                return Err(Error::precondition("weighted cap must be nonnegative"));
            }
        }
    }
    let mut states = Vec::new();
    let mut cur = vec![0u32; n];
    enumerate_states(&trunc, &mut cur, 0, &mut states);
    states.sort();
    let index = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    Ok(FockBasis {
        n,
        trunc,
        states,
        index,
    })
}

fn enumerate_states(trunc: &Truncation, cur: &mut Vec<u32>, pos: usize, out: &mut Vec<Vec<u32>>) {
    if pos == cur.len() {
        out.push(cur.clone());
        return;
    }
    let mut v = 0u32;
    loop {
        cur[pos] = v;
        let feasible = match trunc {
            Truncation::PerMode(cap) => v <= *cap,
            Truncation::Weighted { weights, cap } => {
                let used: i64 = cur[..=pos]
                    .iter()
                    .zip(weights)
                    .map(|(&x, &w)| x as i64 * w)
                    .sum();
                used <= *cap
            }
        };
        if !feasible {
            break;
        }
        enumerate_states(trunc, cur, pos + 1, out);
        v += 1;
    }
    cur[pos] = 0;
}

impl FockBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Vec<u32>] {
        &self.states
    }

    pub fn truncation(&self) -> &Truncation {
        &self.trunc
    }

    pub fn index_of(&self, state: &[u32]) -> Option<usize> {
        self.index.get(state).copied()
    }

    /// Weighted level of a state (occupation sum for per-mode truncation).
    pub fn level(&self, state: &[u32]) -> i64 {
        match &self.trunc {
            Truncation::PerMode(_) => state.iter().map(|&x| x as i64).sum(),
            Truncation::Weighted { weights, .. } => state
                .iter()
                .zip(weights)
                .map(|(&x, &w)| x as i64 * w)
                .sum(),
        }
    }

    /// The worst weighted-level increase any term of `op` can produce; zero
    /// for operators commuting with the weighted number operator.
    pub fn lift(&self, op: &OperatorPolynomial) -> i64 {
        let weights: Vec<i64> = match &self.trunc {
            Truncation::PerMode(_) => vec![1; self.n],
            Truncation::Weighted { weights, .. } => weights.clone(),
        };
        op.terms()
            .map(|(m, _)| {
                m.cr.iter()
                    .zip(&m.an)
                    .zip(&weights)
                    .map(|((&b, &a), &w)| w * (b as i64 - a as i64))
                    .sum::<i64>()
            })
            .max()
            .unwrap_or(0)
            .max(0)
    }

    /// States whose whole orbit under operators of combined lift
    /// `total_lift` stays inside the basis.
    pub fn guarded_states(&self, total_lift: i64) -> Vec<usize> {
        match &self.trunc {
            Truncation::Weighted { cap, .. } => (0..self.dim())
                .filter(|&i| self.level(&self.states[i]) + total_lift <= *cap)
                .collect(),
            Truncation::PerMode(cap) => (0..self.dim())
                .filter(|&i| {
                    self.states[i]
                        .iter()
                        .all(|&v| v as i64 + total_lift <= *cap as i64)
                })
                .collect(),
        }
    }
}

/// Sparse column-major matrix in the rescaled number basis; exact entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockMatrix {
    pub dim: usize,
    pub cols: Vec<Vec<(usize, ExactComplex)>>,
}

/// Sparse column-major matrix in the orthonormal basis; double precision.
#[derive(Clone, Debug)]
pub struct FockMatrixFloat {
    pub dim: usize,
    pub cols: Vec<Vec<(usize, Complex64)>>,
}

fn falling(nu: u32, a: u32) -> Option<Rat> {
    if nu < a {
        return None;
    }
    let mut acc = Rat::one();
    for t in 0..a {
        acc *= Rat::from_integer((nu - t).into());
    }
    Some(acc)
}

/// Exact matrix of a normal-ordered operator.
pub fn matrix_of(op: &OperatorPolynomial, basis: &FockBasis) -> Result<FockMatrix, Error> {
    if op.modes() != basis.n {
        return Err(Error::ModeMismatch {
            left: op.modes(),
            right: basis.n,
        });
    }
    let cols: Vec<Vec<(usize, ExactComplex)>> = basis
        .states
        .par_iter()
        .map(|nu| {
            let mut col: BTreeMap<usize, ExactComplex> = BTreeMap::new();
            'terms: for (m, c) in op.terms() {
                let mut amp = Rat::one();
                let mut target = Vec::with_capacity(basis.n);
                for j in 0..basis.n {
                    let Some(f) = falling(nu[j], m.an[j]) else {
                        continue 'terms;
                    };
                    amp *= f;
                    target.push(nu[j] - m.an[j] + m.cr[j]);
                }
                let Some(row) = basis.index_of(&target) else {
                    continue;
                };
                let add = c.scale_rat(&amp);
                let entry = col.entry(row).or_insert_with(ExactComplex::zero);
                *entry = &*entry + &add;
            }
            col.into_iter().filter(|(_, c)| !c.is_zero()).collect()
        })
        .collect();
    Ok(FockMatrix {
        dim: basis.dim(),
        cols,
    })
}

/// Float matrix of a normal-ordered operator in the orthonormal basis.
pub fn matrix_of_float(
    op: &OperatorPolynomial,
    basis: &FockBasis,
) -> Result<FockMatrixFloat, Error> {
    if op.modes() != basis.n {
        return Err(Error::ModeMismatch {
            left: op.modes(),
            right: basis.n,
        });
    }
    let mut cols = vec![Vec::new(); basis.dim()];
    for (i, nu) in basis.states.iter().enumerate() {
        let mut col: BTreeMap<usize, Complex64> = BTreeMap::new();
        'terms: for (m, c) in op.terms() {
            let mut amp = 1.0f64;
            let mut target = Vec::with_capacity(basis.n);
            for j in 0..basis.n {
                let Some(f) = falling(nu[j], m.an[j]) else {
                    continue 'terms;
                };
                amp *= rat_to_f64(&f);
                target.push(nu[j] - m.an[j] + m.cr[j]);
            }
            let Some(row) = basis.index_of(&target) else {
                continue;
            };
            for j in 0..basis.n {
                amp *= rat_to_f64(&falling(target[j], m.cr[j]).expect("cr <= target"));
            }
            let add = c.to_complex_f64() * amp.sqrt();
            *col.entry(row).or_insert(Complex64::ZERO) += add;
        }
        cols[i] = col
            .into_iter()
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .collect();
    }
    Ok(FockMatrixFloat {
        dim: basis.dim(),
        cols,
    })
}

impl FockMatrix {
    pub fn entry(&self, row: usize, col: usize) -> ExactComplex {
        self.cols[col]
            .iter()
            .find(|(r, _)| *r == row)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(ExactComplex::zero)
    }

    pub fn apply(&self, v: &BTreeMap<usize, ExactComplex>) -> BTreeMap<usize, ExactComplex> {
        let mut out: BTreeMap<usize, ExactComplex> = BTreeMap::new();
        for (col, x) in v {
            for (row, m) in &self.cols[*col] {
                let add = m * x;
                let entry = out.entry(*row).or_insert_with(ExactComplex::zero);
                *entry = &*entry + &add;
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    pub fn is_diagonal(&self) -> bool {
        self.cols
            .iter()
            .enumerate()
            .all(|(c, col)| col.iter().all(|(r, _)| *r == c))
    }

    /// Hermiticity of the underlying operator, through the factorial
    /// weights of the rescaled basis.
    pub fn is_hermitian(&self, basis: &FockBasis) -> bool {
        let weight = |i: usize| -> Rat {
            basis.states[i]
                .iter()
                .map(|&v| factorial(v))
                .product()
        };
        for col in 0..self.dim {
            for (row, c) in &self.cols[col] {
                let lhs = c.scale_rat(&weight(*row));
                let rhs = self.entry(col, *row).conj().scale_rat(&weight(col));
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }
}

impl FockMatrixFloat {
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.cols[col]
            .iter()
            .find(|(r, _)| *r == row)
            .map(|(_, c)| *c)
            .unwrap_or(Complex64::ZERO)
    }

    pub fn apply(&self, v: &BTreeMap<usize, Complex64>) -> BTreeMap<usize, Complex64> {
        let mut out: BTreeMap<usize, Complex64> = BTreeMap::new();
        for (col, x) in v {
            for (row, m) in &self.cols[*col] {
                *out.entry(*row).or_insert(Complex64::ZERO) += m * x;
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.cols
            .iter()
            .flatten()
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixMode {
    Exact,
    Float,
}

/// Commutators `[A_i, B_j]` (central `i`, every `j`) restricted to the
/// guarded columns, where matrix products agree with operator products.
/// Exact mode demands literal zero; float mode allows a 1e-12 relative
/// residual. An empty guard band yields an inconclusive check.
pub fn check_commutators(
    ops: &[(String, OperatorPolynomial)],
    k: usize,
    basis: &FockBasis,
    mode: MatrixMode,
) -> Result<VerificationReport, Error> {
    let start = Instant::now();
    let mut checks = Vec::new();
    match mode {
        MatrixMode::Exact => {
            let mats: Vec<FockMatrix> = ops
                .iter()
                .map(|(_, op)| matrix_of(op, basis))
                .collect::<Result<_, _>>()?;
            for i in 0..k.min(ops.len()) {
                for j in i + 1..ops.len() {
                    let lift = basis.lift(&ops[i].1) + basis.lift(&ops[j].1);
                    let guarded = basis.guarded_states(lift);
                    let id = format!("commutator:{}|{}@fock", ops[i].0, ops[j].0);
                    if guarded.is_empty() {
                        checks.push(Check {
                            id,
                            status: Status::Inconclusive,
                            residual: None,
                            rank: None,
                        });
                        continue;
                    }
                    let residual: Option<ExactComplex> = guarded
                        .par_iter()
                        .map(|&col| {
                            let mut unit = BTreeMap::new();
                            unit.insert(col, ExactComplex::one());
                            let ab = mats[i].apply(&mats[j].apply(&unit));
                            let ba = mats[j].apply(&mats[i].apply(&unit));
                            let mut worst: Option<ExactComplex> = None;
                            let rows: std::collections::BTreeSet<usize> =
                                ab.keys().chain(ba.keys()).copied().collect();
                            for r in rows {
                                let a = ab.get(&r).cloned().unwrap_or_else(ExactComplex::zero);
                                let b = ba.get(&r).cloned().unwrap_or_else(ExactComplex::zero);
                                let d = &a - &b;
                                if !d.is_zero() {
                                    worst = Some(d);
                                    break;
                                }
                            }
                            worst
                        })
                        .find_map_any(|w| w)
                        .map(|w| w.clone());
                    checks.push(Check::boolean(
                        id,
                        residual.is_none(),
                        residual.map(|c| Polynomial::constant(1, c)),
                    ));
                }
            }
        }
        MatrixMode::Float => {
            let mats: Vec<FockMatrixFloat> = ops
                .iter()
                .map(|(_, op)| matrix_of_float(op, basis))
                .collect::<Result<_, _>>()?;
            for i in 0..k.min(ops.len()) {
                for j in i + 1..ops.len() {
                    let lift = basis.lift(&ops[i].1) + basis.lift(&ops[j].1);
                    let guarded = basis.guarded_states(lift);
                    let id = format!("commutator:{}|{}@fock", ops[i].0, ops[j].0);
                    if guarded.is_empty() {
                        checks.push(Check {
                            id,
                            status: Status::Inconclusive,
                            residual: None,
                            rank: None,
                        });
                        continue;
                    }
                    let scale = (mats[i].max_abs() * mats[j].max_abs()).max(1.0);
                    let mut worst = 0.0f64;
                    for &col in &guarded {
                        let mut unit = BTreeMap::new();
                        unit.insert(col, Complex64::ONE);
                        let ab = mats[i].apply(&mats[j].apply(&unit));
                        let ba = mats[j].apply(&mats[i].apply(&unit));
                        let rows: std::collections::BTreeSet<usize> =
                            ab.keys().chain(ba.keys()).copied().collect();
                        for r in rows {
                            let d = (ab.get(&r).copied().unwrap_or(Complex64::ZERO)
                                - ba.get(&r).copied().unwrap_or(Complex64::ZERO))
                            .norm();
                            worst = worst.max(d);
                        }
                    }
                    let ok = worst / scale < 1e-12;
                    checks.push(Check::boolean(
                        id,
                        ok,
                        Some(Polynomial::constant(
                            1,
                            ExactComplex::from_rat(Rat::from_float(worst).unwrap_or_else(Rat::one)),
                        ))
                        .filter(|_| !ok),
                    ));
                }
            }
        }
    }
    let mut report = VerificationReport::new("fock-commutators", 0, checks);
    report.elapsed_ms = start.elapsed().as_millis();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;
    use crate::freq::FrequencyVector;
    use crate::weyl::{quantize_exceptional, quantize_set, weyl_symmetrize};

    fn weighted_basis(l: &[i64], cap: i64) -> FockBasis {
        build_basis(
            l.len(),
            Truncation::Weighted {
                weights: l.to_vec(),
                cap,
            },
        )
        .unwrap()
    }

    #[test]
    fn basis_enumeration_counts() {
        let b = build_basis(1, Truncation::PerMode(3)).unwrap();
        assert_eq!(b.dim(), 4);
        let b2 = weighted_basis(&[1, 1, 2], 4);
        assert_eq!(b2.dim(), 22);
        // lexicographic ordering, bijective index
        for (i, s) in b2.states().iter().enumerate() {
            assert_eq!(b2.index_of(s), Some(i));
        }
        assert!(b2.states().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn invalid_truncations_rejected() {
        assert!(build_basis(
            2,
            Truncation::Weighted {
                weights: vec![1, -1],
                cap: 3
            }
        )
        .is_err());
        assert!(build_basis(
            2,
            Truncation::Weighted {
                weights: vec![1],
                cap: 3
            }
        )
        .is_err());
    }

    #[test]
    fn number_operator_is_diagonal() {
        let b = build_basis(1, Truncation::PerMode(5)).unwrap();
        let num = &OperatorPolynomial::raising(1, 0) * &OperatorPolynomial::lowering(1, 0);
        let m = matrix_of(&num, &b).unwrap();
        assert!(m.is_diagonal());
        for (i, s) in b.states().iter().enumerate() {
            assert_eq!(m.entry(i, i), ExactComplex::from_int(s[0] as i64));
        }
    }

    #[test]
    fn action_matrix_diagonal_with_half() {
        let b = weighted_basis(&[1, 1, 2], 6);
        let m = matrix_of(&OperatorPolynomial::action(3, 0), &b).unwrap();
        assert!(m.is_diagonal());
        for (i, s) in b.states().iter().enumerate() {
            assert_eq!(
                m.entry(i, i),
                ExactComplex::from_rat(rat(s[0] as i64, 1) + rat(1, 2))
            );
        }
    }

    #[test]
    fn f1_matrix_diagonal_entries() {
        let l = FrequencyVector::new(vec![1, 1, 2]).unwrap();
        let b = weighted_basis(l.as_slice(), 6);
        let f1_hat = weyl_symmetrize(&l.f1());
        let m = matrix_of(&f1_hat, &b).unwrap();
        assert!(m.is_diagonal());
        for (i, s) in b.states().iter().enumerate() {
            let e = s[0] as i64 + s[1] as i64 + 2 * s[2] as i64 + 2;
            assert_eq!(m.entry(i, i), ExactComplex::from_int(e));
        }
    }

    #[test]
    fn ladder_commutator_on_guard() {
        let b = build_basis(1, Truncation::PerMode(5)).unwrap();
        let ops = vec![
            ("a".to_string(), OperatorPolynomial::lowering(1, 0)),
            ("adag".to_string(), OperatorPolynomial::raising(1, 0)),
        ];
        let report = check_commutators(&ops, 1, &b, MatrixMode::Exact).unwrap();
        // [a, a†] = 1 ≠ 0, so the check fails — but on the guarded band the
        // residual it reports is the identity, i.e. the commutator matrix
        // matches the operator [a, a†] exactly.
        assert!(!report.passed());
        let c = &report.checks[0];
        assert_eq!(
            c.residual.as_ref().unwrap().coeff(&crate::poly::Monomial::unit(1)),
            ExactComplex::from_int(1)
        );
    }

    #[test]
    fn hermitian_matrix_predicate() {
        let b = weighted_basis(&[1, 1, 2], 6);
        let ops = quantize_exceptional();
        for (name, op) in &ops {
            let m = matrix_of(op, &b).unwrap();
            assert!(m.is_hermitian(&b), "{name}");
        }
    }

    #[test]
    fn trivial_set_commutes_exactly() {
        let l = FrequencyVector::new(vec![1, 1, 2]).unwrap();
        let set = crate::sets::IntegrableSet::new(
            "trivial",
            l.clone(),
            3,
            vec![
                ("F1".into(), l.f1()),
                ("I2".into(), Polynomial::action(3, 1)),
                ("I3".into(), Polynomial::action(3, 2)),
            ],
            crate::sets::SetMetadata::family("trivial"),
        )
        .unwrap();
        let ops = quantize_set(&set);
        let b = weighted_basis(&[1, 1, 2], 8);
        let report = check_commutators(&ops, 3, &b, MatrixMode::Exact).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn exceptional_triple_commutes_on_fock() {
        let b = weighted_basis(&[1, 1, 2], 10);
        let ops = quantize_exceptional();
        // every operator is level-preserving, so the guard band is the
        // whole basis
        for (_, op) in &ops {
            assert_eq!(b.lift(op), 0);
        }
        let report = check_commutators(&ops, 3, &b, MatrixMode::Exact).unwrap();
        assert!(report.passed(), "{}", report.to_json());
        let report_f = check_commutators(&ops, 3, &b, MatrixMode::Float).unwrap();
        assert!(report_f.passed());
    }

    #[test]
    fn uncorrected_anomaly_matches_d0_matrix() {
        let b = weighted_basis(&[1, 1, 2], 10);
        let set = crate::n3::build_exceptional_set();
        let uncorrected = quantize_set(&set);
        let f2_hat = &uncorrected[1].1;
        let f3_sym = &uncorrected[2].1;
        let g = crate::n3::exceptional_generators();
        let d0_hat = weyl_symmetrize(&g.d0);
        let expect = d0_hat.scale(&ExactComplex::from_rat(rat(5, 2)).mul_i());
        let m_comm_lhs = matrix_of(&f2_hat.commutator(f3_sym), &b).unwrap();
        let m_expect = matrix_of(&expect, &b).unwrap();
        assert_eq!(m_comm_lhs, m_expect);
        // and the matrix-level commutator agrees on the guarded columns
        let m2 = matrix_of(f2_hat, &b).unwrap();
        let m3 = matrix_of(f3_sym, &b).unwrap();
        for col in b.guarded_states(0) {
            let mut unit = BTreeMap::new();
            unit.insert(col, ExactComplex::one());
            let ab = m2.apply(&m3.apply(&unit));
            let ba = m3.apply(&m2.apply(&unit));
            let mut expect_col = m_expect.apply(&unit);
            for (r, v) in ab {
                let sub = &v - &ba.get(&r).cloned().unwrap_or_else(ExactComplex::zero);
                let e = expect_col.remove(&r).unwrap_or_else(ExactComplex::zero);
                assert_eq!(sub, e);
            }
            for (_, v) in expect_col {
                assert!(v.is_zero());
            }
        }
    }

    #[test]
    fn guard_band_shrinks_for_raising_ops() {
        let b = weighted_basis(&[1, 2], 6);
        let raise = OperatorPolynomial::raising(2, 1); // lifts level by 2
        assert_eq!(b.lift(&raise), 2);
        let guarded = b.guarded_states(2);
        assert!(guarded
            .iter()
            .all(|&i| b.level(&b.states()[i]) + 2 <= 6));
        assert!(guarded.len() < b.dim());
    }
}
