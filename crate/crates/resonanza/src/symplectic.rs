//! Linear canonical transformations preserving `F₁`: a unitary 2×2 block on
//! a pair of equal-frequency modes plus a phase on the remaining modes.
//! Matrix entries live in ℚ(i,√2) and the phase is an exact root of unity,
//! so transformed sets stay exact.

use crate::coeff::ExactComplex;
use crate::error::Error;
use crate::poly::Polynomial;
use crate::sets::IntegrableSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticTransform {
    pub u: [[ExactComplex; 2]; 2],
    pub pair: (usize, usize),
    pub phase: ExactComplex,
}

impl SymplecticTransform {
    /// Validates `U†U = E` and `|φ| = 1` exactly.
    pub fn new(
        u: [[ExactComplex; 2]; 2],
        pair: (usize, usize),
        phase: ExactComplex,
    ) -> Result<Self, Error> {
        let t = SymplecticTransform { u, pair, phase };
        if !t.is_unitary() {
            return Err(Error::NonUnitary);
        }
        Ok(t)
    }

    pub fn is_unitary(&self) -> bool {
        let u = &self.u;
        let dot = |c1: usize, c2: usize| {
            let t0 = &u[0][c1].conj() * &u[0][c2];
            let t1 = &u[1][c1].conj() * &u[1][c2];
            &t0 + &t1
        };
        dot(0, 0) == ExactComplex::one()
            && dot(1, 1) == ExactComplex::one()
            && dot(0, 1).is_zero()
            && (&self.phase * &self.phase.conj()) == ExactComplex::one()
    }

    pub fn identity(pair: (usize, usize)) -> Self {
        SymplecticTransform {
            u: [
                [ExactComplex::one(), ExactComplex::zero()],
                [ExactComplex::zero(), ExactComplex::one()],
            ],
            pair,
            phase: ExactComplex::one(),
        }
    }

    /// `U = (1 + iσ₁)/√2`, which maps `P₁₂ ↦ I₁ − I₂`.
    pub fn sigma1_rotation(pair: (usize, usize)) -> Self {
        let h = ExactComplex::sqrt2().inv();
        let ih = h.mul_i();
        SymplecticTransform {
            u: [[h.clone(), ih.clone()], [ih, h]],
            pair,
            phase: ExactComplex::one(),
        }
    }

    /// `U = (1 − iσ₂)/√2`, which maps `Q₁₂ ↦ I₁ − I₂`.
    pub fn sigma2_rotation(pair: (usize, usize)) -> Self {
        let h = ExactComplex::sqrt2().inv();
        SymplecticTransform {
            u: [
                [h.clone(), &ExactComplex::zero() - &h],
                [h.clone(), h],
            ],
            pair,
            phase: ExactComplex::one(),
        }
    }

    /// Interchanges the two modes of the pair.
    pub fn swap(pair: (usize, usize)) -> Self {
        SymplecticTransform {
            u: [
                [ExactComplex::zero(), ExactComplex::one()],
                [ExactComplex::one(), ExactComplex::zero()],
            ],
            pair,
            phase: ExactComplex::one(),
        }
    }

    /// The variable images `z_j ↦ Z_j` over `n` modes.
    pub fn images(&self, n: usize) -> Result<Vec<Polynomial>, Error> {
        let (i, j) = self.pair;
        if i >= n || j >= n || i == j {
            return Err(Error::precondition(format!(
                "mode pair ({}, {}) invalid for n = {n}",
                i + 1,
                j + 1
            )));
        }
        let mut images = Vec::with_capacity(n);
        for m in 0..n {
            let p = if m == i {
                &Polynomial::z(n, i).scale(&self.u[0][0]) + &Polynomial::z(n, j).scale(&self.u[0][1])
            } else if m == j {
                &Polynomial::z(n, i).scale(&self.u[1][0]) + &Polynomial::z(n, j).scale(&self.u[1][1])
            } else {
                Polynomial::z(n, m).scale(&self.phase)
            };
            images.push(p);
        }
        Ok(images)
    }
}

/// Substitutes the transformed variables into every element. Requires equal
/// frequencies on the target pair, which is exactly the condition for `F₁`
/// to be invariant; the central count is untouched.
pub fn apply_symplectic(
    set: &IntegrableSet,
    t: &SymplecticTransform,
) -> Result<IntegrableSet, Error> {
    if !t.is_unitary() {
        return Err(Error::NonUnitary);
    }
    let n = set.n();
    let (i, j) = t.pair;
    let images = t.images(n)?;
    if set.l.get(i) != set.l.get(j) {
        return Err(Error::precondition(format!(
            "transform pair needs l{} = l{}, got {} and {}",
            i + 1,
            j + 1,
            set.l.get(i),
            set.l.get(j)
        )));
    }
    let mut elements = Vec::with_capacity(set.elements.len());
    for e in &set.elements {
        elements.push((e.name.clone(), e.poly.substitute(&images)?));
    }
    debug_assert_eq!(elements[0].1, set.l.f1(), "F1 must be invariant");
    let mut metadata = set.metadata.clone();
    metadata.transformed = true;
    IntegrableSet::new(
        format!("{}-transformed", set.name),
        set.l.clone(),
        set.k,
        elements,
        metadata,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat_int;
    use crate::freq::FrequencyVector;
    use crate::n3::{build_exceptional_set, p12, q12};

    #[test]
    fn presets_are_unitary() {
        for t in [
            SymplecticTransform::identity((0, 1)),
            SymplecticTransform::sigma1_rotation((0, 1)),
            SymplecticTransform::sigma2_rotation((0, 1)),
            SymplecticTransform::swap((0, 1)),
        ] {
            assert!(t.is_unitary());
        }
        let bad = SymplecticTransform::new(
            [
                [ExactComplex::one(), ExactComplex::one()],
                [ExactComplex::zero(), ExactComplex::one()],
            ],
            (0, 1),
            ExactComplex::one(),
        );
        assert!(matches!(bad, Err(Error::NonUnitary)));
    }

    #[test]
    fn sigma1_sends_momentum_to_action_difference() {
        let t = SymplecticTransform::sigma1_rotation((0, 1));
        let images = t.images(3).unwrap();
        let out = p12().substitute(&images).unwrap();
        let expect = &Polynomial::action(3, 0) - &Polynomial::action(3, 1);
        assert_eq!(out, expect);
        let out_q = q12().substitute(&SymplecticTransform::sigma2_rotation((0, 1)).images(3).unwrap()).unwrap();
        assert_eq!(out_q, expect);
    }

    #[test]
    fn identity_transform_fixes_sets() {
        let set = build_exceptional_set();
        let same = apply_symplectic(&set, &SymplecticTransform::identity((0, 1))).unwrap();
        for (a, b) in set.elements.iter().zip(&same.elements) {
            assert_eq!(a.poly, b.poly);
        }
    }

    #[test]
    fn f1_invariant_and_involution_preserved() {
        let set = build_exceptional_set();
        let t = SymplecticTransform::sigma1_rotation((0, 1));
        let moved = apply_symplectic(&set, &t).unwrap();
        assert_eq!(moved.elements[0].poly, set.l.f1());
        assert!(moved.metadata.transformed);
        for a in &moved.elements {
            for b in &moved.elements {
                assert!(a.poly.poisson_bracket(&b.poly).is_zero());
            }
        }
    }

    #[test]
    fn unequal_pair_frequencies_rejected() {
        let l = FrequencyVector::new(vec![1, 2]).unwrap();
        let set = crate::sets::build_general_set(
            &l,
            &[vec![1, 2], vec![1, 0]],
            &[vec![2, -1]],
            1,
        )
        .unwrap();
        let t = SymplecticTransform::sigma1_rotation((0, 1));
        assert!(apply_symplectic(&set, &t).is_err());
    }

    #[test]
    fn phase_must_be_unimodular() {
        let t = SymplecticTransform::new(
            SymplecticTransform::identity((0, 1)).u,
            (0, 1),
            ExactComplex::from_int(2),
        );
        assert!(matches!(t, Err(Error::NonUnitary)));
        // an exact eighth root of unity works
        let phase = ExactComplex::sqrt2().inv().scale_rat(&rat_int(1));
        let phase = &phase + &phase.mul_i();
        let t2 = SymplecticTransform::new(
            SymplecticTransform::identity((0, 1)).u,
            (0, 1),
            phase,
        );
        assert!(t2.is_ok());
    }
}
