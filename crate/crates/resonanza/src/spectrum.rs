//! Joint spectral lattices of commuting central operators on a truncated
//! Fock space: block-decompose by the exact eigenvalue of the first
//! (diagonal) operator, then jointly diagonalize the rest inside each block
//! with a seeded random linear combination and eigenvector clustering.

use crate::coeff::{format_rat, rat_to_f64, Rat};
use crate::error::Error;
use crate::fock::{check_commutators, matrix_of, matrix_of_float, FockBasis, MatrixMode, Truncation};
use crate::op::OperatorPolynomial;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct LatticePoint {
    /// Joint eigenvalue tuple `(λ_1, …, λ_k)`; the first entry is the exact
    /// block eigenvalue of the diagonal operator.
    pub values: Vec<f64>,
    pub multiplicity: usize,
    pub block_e: Rat,
    pub guarded: bool,
}

#[derive(Clone, Debug)]
pub struct SpectralLattice {
    pub operator_names: Vec<String>,
    pub truncation: String,
    pub points: Vec<LatticePoint>,
}

impl SpectralLattice {
    pub fn total_multiplicity(&self) -> usize {
        self.points.iter().map(|p| p.multiplicity).sum()
    }

    /// One row per lattice point, deterministic order.
    pub fn to_csv(&self) -> String {
        let k = self.operator_names.len();
        let mut out = String::new();
        for i in 1..=k {
            out.push_str(&format!("lambda_{i},"));
        }
        out.push_str("multiplicity,block_E,guarded\n");
        for p in &self.points {
            for v in &p.values {
                out.push_str(&format!("{v:.10},"));
            }
            out.push_str(&format!(
                "{},{},{}\n",
                p.multiplicity,
                format_rat(&p.block_e),
                p.guarded
            ));
        }
        out
    }
}

const CLUSTER_TOL: f64 = 1e-8;

fn describe_truncation(t: &Truncation) -> String {
    match t {
        Truncation::PerMode(cap) => format!("per-mode:{cap}"),
        Truncation::Weighted { weights, cap } => {
            let w: Vec<String> = weights.iter().map(|x| x.to_string()).collect();
            format!("weighted:[{}]<={cap}", w.join(","))
        }
    }
}

/// Dense complex restriction of a sparse float matrix to a block.
fn restrict(
    m: &crate::fock::FockMatrixFloat,
    block: &[usize],
    local: &BTreeMap<usize, usize>,
) -> Vec<Vec<Complex64>> {
    let dim = block.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for (lc, &gc) in block.iter().enumerate() {
        for (row, val) in &m.cols[gc] {
            if let Some(&lr) = local.get(row) {
                out[lr][lc] = *val;
            }
        }
    }
    out
}

fn matvec(m: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    let dim = m.len();
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (r, row) in m.iter().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, x) in row.iter().zip(v) {
            acc += x * c;
        }
        out[r] = acc;
    }
    out
}

fn rayleigh(m: &[Vec<Complex64>], v: &[Complex64]) -> Complex64 {
    let mv = matvec(m, v);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut norm = 0.0;
    for (x, y) in v.iter().zip(&mv) {
        acc += x.conj() * y;
        norm += x.norm_sqr();
    }
    acc / norm
}

/// Block spectra of a commuting family. The first operator must be diagonal
/// with exact rational entries (it drives the block decomposition); the
/// remaining operators are diagonalized within each block.
pub fn joint_spectrum(
    ops: &[(String, OperatorPolynomial)],
    basis: &FockBasis,
    seed: u64,
) -> Result<SpectralLattice, Error> {
    if ops.is_empty() {
        return Err(Error::precondition("joint_spectrum needs operators"));
    }
    let commuting = check_commutators(ops, ops.len(), basis, MatrixMode::Exact)?;
    if !commuting.passed() {
        let bad: Vec<String> = commuting.failures().map(|c| c.id.clone()).collect();
        return Err(Error::NonCommuting(bad.join(", ")));
    }

    let m0 = matrix_of(&ops[0].1, basis)?;
    if !m0.is_diagonal() {
        return Err(Error::precondition(format!(
            "block operator {} is not diagonal in the Fock basis",
            ops[0].0
        )));
    }
    let mut blocks: BTreeMap<Rat, Vec<usize>> = BTreeMap::new();
    for i in 0..basis.dim() {
        let e = m0.entry(i, i).as_rat().ok_or_else(|| {
            Error::precondition("block operator has non-rational diagonal entries")
        })?;
        blocks.entry(e).or_default().push(i);
    }

    let worst_lift = ops.iter().map(|(_, op)| basis.lift(op)).max().unwrap_or(0);
    let guarded_set: std::collections::HashSet<usize> =
        basis.guarded_states(worst_lift).into_iter().collect();

    let rest: Vec<crate::fock::FockMatrixFloat> = ops[1..]
        .iter()
        .map(|(_, op)| matrix_of_float(op, basis))
        .collect::<Result<_, _>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<LatticePoint> = Vec::new();

    for (block_e, block) in &blocks {
        let guarded = block.iter().all(|i| guarded_set.contains(i));
        let e_float = rat_to_f64(block_e);
        if rest.is_empty() {
            points.push(LatticePoint {
                values: vec![e_float],
                multiplicity: block.len(),
                block_e: block_e.clone(),
                guarded,
            });
            continue;
        }
        let local: BTreeMap<usize, usize> = block
            .iter()
            .enumerate()
            .map(|(l, &g)| (g, l))
            .collect();
        let restricted: Vec<Vec<Vec<Complex64>>> =
            rest.iter().map(|m| restrict(m, block, &local)).collect();
        let clusters = cluster_block(&restricted, &mut rng)?;
        // merge clusters landing on the same tuple
        let mut merged: BTreeMap<Vec<i64>, (Vec<f64>, usize)> = BTreeMap::new();
        for (tuple, mult) in clusters {
            let mut values = vec![e_float];
            values.extend(tuple.iter());
            let key: Vec<i64> = values
                .iter()
                .map(|v| (v / (10.0 * CLUSTER_TOL)).round() as i64)
                .collect();
            let entry = merged.entry(key).or_insert((values, 0));
            entry.1 += mult;
        }
        for (_, (values, mult)) in merged {
            points.push(LatticePoint {
                values,
                multiplicity: mult,
                block_e: block_e.clone(),
                guarded,
            });
        }
    }

    points.sort_by(|a, b| {
        a.block_e.cmp(&b.block_e).then_with(|| {
            a.values
                .iter()
                .zip(&b.values)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });

    Ok(SpectralLattice {
        operator_names: ops.iter().map(|(n, _)| n.clone()).collect(),
        truncation: describe_truncation(basis.truncation()),
        points: points.into_iter().filter(|p| p.multiplicity > 0).collect(),
    })
}

/// Diagonalizes a seeded random combination of the block matrices, clusters
/// the eigenvectors, and reads joint eigenvalues off Rayleigh quotients.
/// Retries with fresh coefficients when a cluster mixes distinct tuples.
fn cluster_block(
    mats: &[Vec<Vec<Complex64>>],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(Vec<f64>, usize)>, Error> {
    let dim = mats[0].len();
    if dim == 1 {
        let tuple: Vec<f64> = mats.iter().map(|m| m[0][0].re).collect();
        return Ok(vec![(tuple, 1)]);
    }
    let mut last_err = None;
    for _attempt in 0..3 {
        let coeffs: Vec<f64> = (0..mats.len())
            .map(|_| 1.0 + (rng.next_u64() as f64) / (u64::MAX as f64))
            .collect();
        match try_cluster(mats, &coeffs) {
            Ok(res) => return Ok(res),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Clustering("exhausted retries".into())))
}

fn try_cluster(
    mats: &[Vec<Vec<Complex64>>],
    coeffs: &[f64],
) -> Result<Vec<(Vec<f64>, usize)>, Error> {
    let dim = mats[0].len();
    // realified hermitian combination: [[Re, -Im], [Im, Re]]
    let mut real = DMatrix::<f64>::zeros(2 * dim, 2 * dim);
    for r in 0..dim {
        for c in 0..dim {
            let mut t = Complex64::new(0.0, 0.0);
            for (m, &w) in mats.iter().zip(coeffs) {
                t += m[r][c] * w;
            }
            real[(r, c)] = t.re;
            real[(r + dim, c + dim)] = t.re;
            real[(r, c + dim)] = -t.im;
            real[(r + dim, c)] = t.im;
        }
    }
    let eig = SymmetricEigen::new(real);
    let mut order: Vec<usize> = (0..2 * dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let spread = (eig.eigenvalues.max() - eig.eigenvalues.min()).abs().max(1.0);
    let tol = CLUSTER_TOL * spread;

    let mut clusters: Vec<(Vec<f64>, usize)> = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len()
            && (eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]]).abs() <= tol
        {
            end += 1;
        }
        if (end - start) % 2 != 0 {
            return Err(Error::Clustering(format!(
                "odd realified cluster size {}",
                end - start
            )));
        }
        // joint eigenvalues via Rayleigh quotients of each vector
        let mut tuples: Vec<Vec<f64>> = Vec::new();
        for &idx in &order[start..end] {
            let col = eig.eigenvectors.column(idx);
            let v: Vec<Complex64> = (0..dim)
                .map(|r| Complex64::new(col[r], col[r + dim]))
                .collect();
            let tuple: Vec<f64> = mats
                .iter()
                .map(|m| {
                    let q = rayleigh(m, &v);
                    if q.im.abs() > 1e-10 {
                        return f64::NAN;
                    }
                    q.re
                })
                .collect();
            if tuple.iter().any(|x| x.is_nan()) {
                return Err(Error::Clustering(
                    "non-real Rayleigh quotient for a hermitian operator".into(),
                ));
            }
            tuples.push(tuple);
        }
        for t in &tuples[1..] {
            for (a, b) in t.iter().zip(&tuples[0]) {
                if (a - b).abs() > 1e-6 {
                    return Err(Error::Clustering(
                        "cluster mixes distinct joint eigenvalues".into(),
                    ));
                }
            }
        }
        let k = mats.len();
        let mean: Vec<f64> = (0..k)
            .map(|i| tuples.iter().map(|t| t[i]).sum::<f64>() / tuples.len() as f64)
            .collect();
        clusters.push((mean, (end - start) / 2));
        start = end;
    }
    Ok(clusters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::build_basis;
    use crate::freq::FrequencyVector;
    use crate::poly::Polynomial;
    use crate::weyl::{quantize_exceptional, quantize_set};

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

    fn trivial_ops() -> Vec<(String, OperatorPolynomial)> {
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
        quantize_set(&set)
    }

    #[test]
    fn trivial_lattice_matches_analytic_form() {
        let basis = weighted_basis(&[1, 1, 2], 6);
        let lattice = joint_spectrum(&trivial_ops(), &basis, 0).unwrap();
        assert_eq!(lattice.total_multiplicity(), basis.dim());
        // every state contributes the point (ν1+ν2+2ν3+2, ν2+1/2, ν3+1/2)
        for state in basis.states() {
            let expect = [
                state[0] as f64 + state[1] as f64 + 2.0 * state[2] as f64 + 2.0,
                state[1] as f64 + 0.5,
                state[2] as f64 + 0.5,
            ];
            let found = lattice.points.iter().any(|p| {
                p.values
                    .iter()
                    .zip(&expect)
                    .all(|(a, b)| (a - b).abs() < 1e-9)
            });
            assert!(found, "missing lattice point {expect:?}");
        }
        // the map ν ↦ tuple is injective here, so all multiplicities are 1
        assert!(lattice.points.iter().all(|p| p.multiplicity == 1));
        assert!(lattice.points.iter().all(|p| p.guarded));
    }

    #[test]
    fn f1_alone_blocks_have_expected_dimensions() {
        let l = FrequencyVector::new(vec![1, 1, 2]).unwrap();
        let basis = weighted_basis(&[1, 1, 2], 6);
        let ops = vec![(
            "F1".to_string(),
            crate::weyl::weyl_symmetrize(&l.f1()),
        )];
        let lattice = joint_spectrum(&ops, &basis, 0).unwrap();
        // E = 4 block: states with ν1+ν2+2ν3 = 2 → (2,0,0),(1,1,0),(0,2,0),(0,0,1)
        let p4 = lattice
            .points
            .iter()
            .find(|p| (p.values[0] - 4.0).abs() < 1e-12)
            .unwrap();
        assert_eq!(p4.multiplicity, 4);
        assert_eq!(lattice.total_multiplicity(), basis.dim());
    }

    #[test]
    fn exceptional_block_multiplicities_sum_and_are_stable() {
        let ops = quantize_exceptional();
        let basis = weighted_basis(&[1, 1, 2], 8);
        let lattice = joint_spectrum(&ops, &basis, 0).unwrap();
        assert_eq!(lattice.total_multiplicity(), basis.dim());
        // per-block sums equal block dimensions
        let m0 = matrix_of(&ops[0].1, &basis).unwrap();
        let mut block_dims: BTreeMap<String, usize> = BTreeMap::new();
        for i in 0..basis.dim() {
            *block_dims
                .entry(format_rat(&m0.entry(i, i).as_rat().unwrap()))
                .or_default() += 1;
        }
        let mut block_mults: BTreeMap<String, usize> = BTreeMap::new();
        for p in &lattice.points {
            *block_mults.entry(format_rat(&p.block_e)).or_default() += p.multiplicity;
        }
        assert_eq!(block_dims, block_mults);

        // guarded blocks keep their multiplicities when the cutoff grows
        let bigger = weighted_basis(&[1, 1, 2], 10);
        let lattice2 = joint_spectrum(&ops, &bigger, 0).unwrap();
        for p in lattice.points.iter().filter(|p| p.guarded) {
            let mult2: usize = lattice2
                .points
                .iter()
                .filter(|q| {
                    q.block_e == p.block_e
                        && q.values
                            .iter()
                            .zip(&p.values)
                            .all(|(a, b)| (a - b).abs() < 1e-7)
                })
                .map(|q| q.multiplicity)
                .sum();
            assert_eq!(mult2, p.multiplicity, "point {:?}", p.values);
        }
    }

    #[test]
    fn f2_respects_block_structure() {
        let ops = quantize_exceptional();
        let basis = weighted_basis(&[1, 1, 2], 8);
        let m0 = matrix_of(&ops[0].1, &basis).unwrap();
        let m2 = matrix_of(&ops[1].1, &basis).unwrap();
        for col in 0..basis.dim() {
            for (row, _) in &m2.cols[col] {
                assert_eq!(m0.entry(*row, *row), m0.entry(col, col));
            }
        }
    }

    #[test]
    fn non_commuting_inputs_rejected() {
        let basis = build_basis(1, Truncation::PerMode(4)).unwrap();
        let ops = vec![
            ("n".to_string(), OperatorPolynomial::action(1, 0)),
            ("a".to_string(), OperatorPolynomial::lowering(1, 0)),
        ];
        assert!(matches!(
            joint_spectrum(&ops, &basis, 0),
            Err(Error::NonCommuting(_))
        ));
    }

    #[test]
    fn csv_deterministic_and_shaped() {
        let basis = weighted_basis(&[1, 1, 2], 4);
        let lattice = joint_spectrum(&trivial_ops(), &basis, 7).unwrap();
        let csv = lattice.to_csv();
        assert!(csv.starts_with("lambda_1,lambda_2,lambda_3,multiplicity,block_E,guarded\n"));
        let again = joint_spectrum(&trivial_ops(), &basis, 7).unwrap().to_csv();
        assert_eq!(csv, again);
        let rows: Vec<&str> = csv.trim().lines().skip(1).collect();
        assert_eq!(rows.len(), lattice.points.len());
    }
}
