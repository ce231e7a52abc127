//! Generic-point functional independence testing via exact Jacobian ranks.

use crate::coeff::ExactComplex;
use crate::error::Error;
use crate::linalg::rank_complex;
use crate::poly::{Polynomial, RationalPoint, Var};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Maximum over `trials` pseudo-random rational points of the exact rank of
/// the Jacobian of the real/imaginary decomposition of `ps` with respect to
/// the 2n real phase-space coordinates. Deterministic given `seed`.
///
/// The rank is computed over the complex chart (∂/∂z_j, ∂/∂z̄_j); the chart
/// change to (x_j, p_j) is invertible, so the rank is the same.
pub fn jacobian_rank(ps: &[Polynomial], trials: usize, seed: u64) -> Result<usize, Error> {
    if trials == 0 {
        return Err(Error::precondition("jacobian_rank needs trials >= 1"));
    }
    if ps.is_empty() {
        return Ok(0);
    }
    let n = ps[0].modes();
    if ps.iter().any(|p| p.modes() != n) {
        return Err(Error::ModeMismatch {
            left: n,
            right: ps.iter().map(|p| p.modes()).find(|&m| m != n).unwrap(),
        });
    }

    // Real polynomials contribute one row; complex ones split into Re and Im.
    let mut row_polys: Vec<Polynomial> = Vec::new();
    for p in ps {
        if p.is_real() {
            row_polys.push(p.clone());
        } else {
            let (re, im) = p.re_im();
            row_polys.push(re);
            row_polys.push(im);
        }
    }

    let gradients: Vec<Vec<Polynomial>> = row_polys
        .iter()
        .map(|p| {
            (0..n)
                .map(Var::Z)
                .chain((0..n).map(Var::Zbar))
                .map(|v| p.derivative(v))
                .collect()
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for _ in 0..trials {
        let pt = RationalPoint::random(n, &mut rng);
        let rows: Vec<Vec<ExactComplex>> = gradients
            .iter()
            .map(|g| g.iter().map(|d| d.evaluate(&pt).unwrap()).collect())
            .collect();
        best = best.max(rank_complex(rows));
        if best == row_polys.len().min(2 * n) {
            break;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn actions_are_independent() {
        let n = 3;
        let ps: Vec<Polynomial> = (0..n).map(|j| Polynomial::action(n, j)).collect();
        assert_eq!(jacobian_rank(&ps, 5, 0).unwrap(), n);
    }

    #[test]
    fn functional_dependence_detected() {
        let i1 = Polynomial::action(2, 0);
        let ps = vec![i1.clone(), i1.pow(2)];
        assert_eq!(jacobian_rank(&ps, 5, 0).unwrap(), 1);
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(jacobian_rank(&[Polynomial::one(1)], 0, 0).is_err());
    }
}
