//! Exact linear algebra: rank over ℚ(i,√2) and fraction-free nullspaces
//! over the rationals.

use crate::coeff::{ExactComplex, Rat};
use crate::poly::{Monomial, Polynomial};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

/// Rank of a dense matrix over the exact complex field.
pub fn rank_complex(mut m: Vec<Vec<ExactComplex>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv();
        for i in r + 1..rows {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..cols {
                let delta = &f * &m[r][j];
                m[i][j] = &m[i][j] - &delta;
            }
        }
        r += 1;
    }
    r
}

/// Fraction-free (Bareiss) row echelon form of an integer matrix.
/// Returns the echelon matrix together with the pivot column indices.
fn bareiss_echelon(mut m: Vec<Vec<BigInt>>) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let num = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                m[i][j] = &num / &prev; // exact by the Bareiss identity
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

fn to_integer_rows(rows: &[Vec<Rat>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let lcm = row
                .iter()
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter()
                .map(|x| x.numer() * (&lcm / x.denom()))
                .collect()
        })
        .collect()
}

pub fn rank_rational(rows: &[Vec<Rat>]) -> usize {
    bareiss_echelon(to_integer_rows(rows)).1.len()
}

/// Exact rational nullspace basis of the row system `rows · x = 0`.
/// Each basis vector is scaled to coprime integers with positive leading
/// entry, so the output is deterministic.
pub fn nullspace_rational(rows: &[Vec<Rat>], cols: usize) -> Vec<Vec<Rat>> {
    if rows.is_empty() {
        return (0..cols)
            .map(|j| {
                let mut v = vec![Rat::zero(); cols];
                v[j] = Rat::one();
                v
            })
            .collect();
    }
    let (ech, pivots) = bareiss_echelon(to_integer_rows(rows));
    let pivot_set: BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for f in 0..cols {
        if pivot_set.contains(&f) {
            continue;
        }
        let mut x = vec![Rat::zero(); cols];
        x[f] = Rat::one();
        for (r, &pc) in pivots.iter().enumerate().rev() {
            let mut acc = Rat::zero();
            for j in pc + 1..cols {
                if !ech[r][j].is_zero() && !x[j].is_zero() {
                    acc += Rat::from_integer(ech[r][j].clone()) * &x[j];
                }
            }
            x[pc] = -acc / Rat::from_integer(ech[r][pc].clone());
        }
        basis.push(normalize_rational_vector(x));
    }
    basis
}

/// Scales to coprime integer entries with the first nonzero entry positive.
pub fn normalize_rational_vector(v: Vec<Rat>) -> Vec<Rat> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let gcd = ints
        .iter()
        .fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let gcd = if gcd.is_zero() { BigInt::one() } else { gcd };
    let sign = ints
        .iter()
        .find(|x| !x.is_zero())
        .map(|x| if x.is_negative() { -1 } else { 1 })
        .unwrap_or(1);
    ints.into_iter()
        .map(|x| Rat::from_integer(x * sign / &gcd))
        .collect()
}

/// Shared monomial support of a family, in canonical order.
pub fn monomial_support(polys: &[&Polynomial]) -> Vec<Monomial> {
    let mut set = BTreeSet::new();
    for p in polys {
        for (m, _) in p.terms() {
            set.insert(m.clone());
        }
    }
    set.into_iter().collect()
}

/// Rational coordinates of a polynomial over a monomial support: per monomial
/// the four components (Re, Re·√2, Im, Im·√2).
pub fn poly_coordinates(p: &Polynomial, support: &[Monomial]) -> Vec<Rat> {
    let mut v = Vec::with_capacity(4 * support.len());
    for m in support {
        let c = p.coeff(m);
        v.push(c.re.a);
        v.push(c.re.b);
        v.push(c.im.a);
        v.push(c.im.b);
    }
    v
}

/// Does `target` lie in the rational span of `family`?
pub fn in_span(family: &[&Polynomial], target: &Polynomial) -> bool {
    if target.is_zero() {
        return true;
    }
    let mut all: Vec<&Polynomial> = family.to_vec();
    all.push(target);
    let support = monomial_support(&all);
    // columns are family members; solvability of A x = b is a rank condition
    // on the transposed coordinate matrix.
    let mut rows_a: Vec<Vec<Rat>> = Vec::new();
    let mut rows_ab: Vec<Vec<Rat>> = Vec::new();
    let coords: Vec<Vec<Rat>> = family
        .iter()
        .map(|p| poly_coordinates(p, &support))
        .collect();
    let target_coords = poly_coordinates(target, &support);
    for k in 0..4 * support.len() {
        let row: Vec<Rat> = coords.iter().map(|c| c[k].clone()).collect();
        let mut row_b = row.clone();
        row_b.push(target_coords[k].clone());
        rows_a.push(row);
        rows_ab.push(row_b);
    }
    rank_rational(&rows_a) == rank_rational(&rows_ab)
}

/// Exact coefficients expressing `target` in the basis `family`, if the
/// expression exists and the family is linearly independent.
pub fn solve_in_span(family: &[&Polynomial], target: &Polynomial) -> Option<Vec<Rat>> {
    let mut all: Vec<&Polynomial> = family.to_vec();
    all.push(target);
    let support = monomial_support(&all);
    let ncols = family.len();
    // Solve by computing the nullspace of [A | -b].
    let coords: Vec<Vec<Rat>> = family
        .iter()
        .map(|p| poly_coordinates(p, &support))
        .collect();
    let target_coords = poly_coordinates(target, &support);
    let mut rows = Vec::new();
    for k in 0..4 * support.len() {
        let mut row: Vec<Rat> = coords.iter().map(|c| c[k].clone()).collect();
        row.push(-target_coords[k].clone());
        rows.push(row);
    }
    let null = nullspace_rational(&rows, ncols + 1);
    // A solution corresponds to a nullspace vector with nonzero last entry.
    for v in null {
        if !v[ncols].is_zero() {
            let inv = v[ncols].clone();
            return Some(v[..ncols].iter().map(|x| x / &inv).collect());
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;

    fn r(n: i64, d: i64) -> Rat {
        rat(n, d)
    }

    #[test]
    fn rational_rank_and_nullspace() {
        let rows = vec![
            vec![r(1, 1), r(2, 1), r(3, 1)],
            vec![r(2, 1), r(4, 1), r(6, 1)],
            vec![r(0, 1), r(1, 2), r(1, 1)],
        ];
        assert_eq!(rank_rational(&rows), 2);
        let null = nullspace_rational(&rows, 3);
        assert_eq!(null.len(), 1);
        for row in &rows {
            let dot: Rat = row.iter().zip(&null[0]).map(|(a, b)| a * b).sum();
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn complex_rank() {
        let i = ExactComplex::i();
        let one = ExactComplex::one();
        // second row is i times the first: rank 1
        let rows = vec![vec![one.clone(), i.clone()], vec![i.clone(), &i * &i]];
        assert_eq!(rank_complex(rows), 1);
        let rows2 = vec![vec![one.clone(), i.clone()], vec![i.clone(), one.clone()]];
        assert_eq!(rank_complex(rows2), 2);
    }

    #[test]
    fn span_membership() {
        let p = Polynomial::action(2, 0);
        let q = Polynomial::action(2, 1);
        let target = &p.scale_rat(&r(2, 3)) - &q;
        assert!(in_span(&[&p, &q], &target));
        let outside = &Polynomial::z(2, 0) * &Polynomial::zbar(2, 1);
        assert!(!in_span(&[&p, &q], &outside));
        let sol = solve_in_span(&[&p, &q], &target).unwrap();
        assert_eq!(sol, vec![r(2, 3), r(-1, 1)]);
    }

    #[test]
    fn full_nullspace_of_empty_system() {
        let basis = nullspace_rational(&[], 2);
        assert_eq!(basis.len(), 2);
    }
}
