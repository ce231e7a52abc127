//! The three-oscillator catalog for frequency patterns `(p, p, q)`:
//! the five-dimensional algebra of quadratics commuting with `F₁`, the
//! ladder family `A_{q,s}` with its su(2) representation matrices, simple
//! integrable sets of arbitrary degree, the quadratic-element classifier,
//! and the exceptional non-simple set at resonance 1:1:2.

use crate::coeff::{rat, rat_int, rat_sqrt, rat_to_f64, ExactComplex, Rat};
use crate::error::Error;
use crate::freq::FrequencyVector;
use crate::linalg::solve_in_span;
use crate::poly::Polynomial;
use crate::sets::{build_j_r, build_r_m, IntegrableSet, SetMetadata};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Basis `(L₁..L₅)` of the quadratic polynomials commuting with
/// `F₁ = p(I₁+I₂) + qI₃`:
///
/// `L₁ = −Re(z̄₁z₂)`, `L₂ = −Im(z̄₁z₂)`, `L₃ = −(I₁−I₂)/2`,
/// `L₄ = −(I₁+I₂)/2`, `L₅ = I₃`.
pub fn l_basis() -> [Polynomial; 5] {
    let z1b_z2 = &Polynomial::zbar(3, 0) * &Polynomial::z(3, 1);
    let i1 = Polynomial::action(3, 0);
    let i2 = Polynomial::action(3, 1);
    let i3 = Polynomial::action(3, 2);
    [
        -&z1b_z2.real_part(),
        -&z1b_z2.imag_part(),
        (&i2 - &i1).scale_rat(&rat(1, 2)),
        (&i1 + &i2).scale_rat(&rat(-1, 2)),
        i3,
    ]
}

/// `Q₁₂ = 2Re(z̄₁z₂)`, the partner of the momentum `P₁₂`.
pub fn q12() -> Polynomial {
    (&Polynomial::zbar(3, 0) * &Polynomial::z(3, 1))
        .real_part()
        .scale_rat(&rat_int(2))
}

/// `P₁₂ = 2Im(z̄₁z₂)`.
pub fn p12() -> Polynomial {
    (&Polynomial::zbar(3, 0) * &Polynomial::z(3, 1))
        .imag_part()
        .scale_rat(&rat_int(2))
}

/// The named cubic generators of the 1:1:2 analysis together with the pair
/// `(M₃, N₃) = (P₁₂, Q₁₂)`.
pub struct ExceptionalGenerators {
    pub d0: Polynomial,
    pub c0: Polynomial,
    pub d1: Polynomial,
    pub c1: Polynomial,
    pub d2: Polynomial,
    pub c2: Polynomial,
    pub m3: Polynomial,
    pub n3: Polynomial,
}

pub fn exceptional_generators() -> ExceptionalGenerators {
    let cubic = |b1: u32, b2: u32| {
        Polynomial::from_monomial(3, vec![0, 0, 1], vec![b1, b2, 0], ExactComplex::one())
    };
    let (d0, c0) = cubic(2, 0).re_im();
    let (d1, c1) = cubic(1, 1).re_im();
    let (d2, c2) = cubic(0, 2).re_im();
    ExceptionalGenerators {
        d0,
        c0,
        d1,
        c1,
        d2,
        c2,
        m3: p12(),
        n3: q12(),
    }
}

/// The non-simple integrable set at `l = (1,1,2)`:
/// `(F₁, F₂, F₃) = (I₁+I₂+2I₃, C₀+2C₂, 2C₀²+I₁M₃²)` with `k = 3` and
/// degrees `(2, 3, 6)`.
pub fn build_exceptional_set() -> IntegrableSet {
    let l = FrequencyVector::new(vec![1, 1, 2]).unwrap();
    let g = exceptional_generators();
    let f2 = &g.c0 + &g.c2.scale_rat(&rat_int(2));
    let f3 = &g.c0.pow(2).scale_rat(&rat_int(2))
        + &(&Polynomial::action(3, 0) * &g.m3.pow(2));
    IntegrableSet::new(
        "exceptional-112",
        l.clone(),
        3,
        vec![
            ("F1".to_string(), l.f1()),
            ("F2".to_string(), f2),
            ("F3".to_string(), f3),
        ],
        SetMetadata::family("exceptional"),
    )
    .expect("exceptional set is well-formed")
}

pub fn factorial(n: u32) -> Rat {
    let mut acc = Rat::one();
    for k in 2..=n {
        acc *= rat_int(k as i64);
    }
    acc
}

/// Unnormalized `Ā_{q,s} = z̄₁^{q−s} z̄₂^s z₃^p` together with the exact
/// square `(q−s)!·s!` of its normalizer.
pub fn a_qs(p: u32, q: u32, s: u32) -> (Polynomial, Rat) {
    assert!(s <= q);
    let poly = Polynomial::from_monomial(
        3,
        vec![0, 0, p],
        vec![q - s, s, 0],
        ExactComplex::one(),
    );
    (poly, factorial(q - s) * factorial(s))
}

pub type Mat = Vec<Vec<ExactComplex>>;

/// The five `(q+1)×(q+1)` matrices intertwining `{iL_μ, ·}` with the ladder
/// family, stored in the basis of the unnormalized `Ā_{q,s}`. In that basis
/// every entry is rational; the diagonal rescaling by the normalizers
/// `√((q−s)!s!)` conjugates them onto the hermitian su(2) generators, which
/// leaves all commutation relations, the Casimir and the diagonal
/// constraint untouched. Hermiticity becomes the weighted predicate
/// `M[h][s]·n_h = conj(M[s][h])·n_s`.
pub struct RepMatrices {
    pub q: u32,
    pub p: u32,
    pub mats: [Mat; 5],
    pub norm2: Vec<Rat>,
}

pub fn rep_matrices(p: u32, q: u32) -> RepMatrices {
    let dim = (q + 1) as usize;
    let zero = || vec![vec![ExactComplex::zero(); dim]; dim];
    let mut m1 = zero();
    let mut m2 = zero();
    let mut m3 = zero();
    let mut m4 = zero();
    let mut m5 = zero();
    for s in 0..dim {
        let su = s as i64;
        if s + 1 < dim {
            let c = rat(q as i64 - su, 2);
            m1[s + 1][s] = ExactComplex::from_rat(c.clone());
            m2[s + 1][s] = ExactComplex::from_rat(c).mul_i();
        }
        if s >= 1 {
            let c = rat(su, 2);
            m1[s - 1][s] = ExactComplex::from_rat(c.clone());
            m2[s - 1][s] = ExactComplex::from_rat(-c).mul_i();
        }
        m3[s][s] = ExactComplex::from_rat(rat(q as i64, 2) - rat_int(su));
        m4[s][s] = ExactComplex::from_rat(rat(q as i64, 2));
        m5[s][s] = ExactComplex::from_int(p as i64);
    }
    let norm2 = (0..=q).map(|s| factorial(q - s) * factorial(s)).collect();
    RepMatrices {
        q,
        p,
        mats: [m1, m2, m3, m4, m5],
        norm2,
    }
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = vec![vec![ExactComplex::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[k][j].is_zero() {
                    continue;
                }
                let t = &a[i][k] * &b[k][j];
                out[i][j] = &out[i][j] + &t;
            }
        }
    }
    out
}

pub fn mat_sub(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn mat_add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn mat_scale(a: &Mat, c: &ExactComplex) -> Mat {
    a.iter()
        .map(|row| row.iter().map(|x| x * c).collect())
        .collect()
}

pub fn mat_commutator(a: &Mat, b: &Mat) -> Mat {
    mat_sub(&mat_mul(a, b), &mat_mul(b, a))
}

pub fn mat_is_zero(a: &Mat) -> bool {
    a.iter().all(|row| row.iter().all(ExactComplex::is_zero))
}

pub fn mat_identity(n: usize) -> Mat {
    let mut m = vec![vec![ExactComplex::zero(); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ExactComplex::one();
    }
    m
}

impl RepMatrices {
    pub fn dim(&self) -> usize {
        (self.q + 1) as usize
    }

    /// Hermiticity of the underlying generator, phrased through the
    /// normalizer weights of the rescaled basis.
    pub fn is_hermitian(&self, mu: usize) -> bool {
        let m = &self.mats[mu];
        let dim = self.dim();
        for h in 0..dim {
            for s in 0..dim {
                let lhs = m[h][s].scale_rat(&self.norm2[h]);
                let rhs = m[s][h].conj().scale_rat(&self.norm2[s]);
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }
}

fn ppq_pattern(l: &FrequencyVector) -> Result<(i64, i64), Error> {
    if l.n() != 3 {
        return Err(Error::precondition("pattern (p,p,q) needs n = 3"));
    }
    if l.get(0) != l.get(1) {
        return Err(Error::precondition(format!(
            "|l1| = {} must equal |l2| = {} with matching sign",
            l.get(0),
            l.get(1)
        )));
    }
    if l.get(0) <= 0 || l.get(2) <= 0 {
        return Err(Error::precondition(
            "pattern (p,p,q) is stated for positive frequencies",
        ));
    }
    if l.get(0) == l.get(2) {
        return Err(Error::precondition("pattern (p,p,q) needs q != p"));
    }
    Ok((l.get(0), l.get(2)))
}

/// The exponent vector of the third element of a simple set:
/// `(−1, 1, 0)` for `d₁ = d₂`, otherwise `(−d₂h, d₁h, −pk)` with
/// `h/k = q/(d₁−d₂)` in lowest positive terms.
pub fn simple_m_vector(p: i64, q: i64, d1: i64, d2: i64) -> Vec<i64> {
    if d1 == d2 {
        return vec![-1, 1, 0];
    }
    let g = q.gcd(&(d1 - d2));
    let h = q / g;
    let k = (d1 - d2) / g;
    vec![-d2 * h, d1 * h, -p * k]
}

/// Simple integrable set `(F₁, d₁I₁ + d₂I₂, Re R_m)` for the `(p,p,q)`
/// pattern, with the recipe's `m` vector. Rejects non-normalized `(d₁, d₂)`.
pub fn build_simple_set(l: &FrequencyVector, d1: i64, d2: i64) -> Result<IntegrableSet, Error> {
    let (p, q) = ppq_pattern(l)?;
    if d1 < 1 || d2.abs() > d1 || d1.gcd(&d2.abs()) != 1 {
        return Err(Error::precondition(format!(
            "(d1, d2) = ({d1}, {d2}) must satisfy d1 >= 1, |d2| <= d1, gcd = 1"
        )));
    }
    let m = simple_m_vector(p, q, d1, d2);
    let f2 = build_j_r(&[d1, d2, 0]);
    let f3 = build_r_m(&m).real_part();
    let mut meta = SetMetadata::family("simple");
    meta.d = Some((d1, d2));
    meta.m_vectors = Some(vec![m]);
    IntegrableSet::new(
        format!("simple-d{d1},{d2}"),
        l.clone(),
        3,
        vec![
            ("F1".to_string(), l.f1()),
            ("F2".to_string(), f2),
            ("F3".to_string(), f3),
        ],
        meta,
    )
}

fn rationalize_f64(x: f64, max_den: u64, tol: f64) -> Option<Rat> {
    let mut v = x;
    let mut terms = Vec::new();
    for _ in 0..40 {
        let a = v.floor();
        terms.push(a as i64);
        // reconstruct and test
        let mut num = Rat::one();
        let mut den = Rat::zero();
        for &t in terms.iter().rev() {
            let next = rat_int(t) * &num + den;
            den = num;
            num = next;
        }
        let approx = if den.is_zero() {
            num.clone()
        } else {
            &num / &den
        };
        if den > rat_int(max_den as i64) {
            return None;
        }
        if (rat_to_f64(&approx) - x).abs() < tol {
            return Some(approx);
        }
        let frac = v - a;
        if frac.abs() < tol {
            return Some(approx);
        }
        v = 1.0 / frac;
    }
    None
}

/// Normal form `(d₁, d₂)` of a quadratic second element: subtract the
/// `I₃` multiple, rotate the su(2) triple onto its third axis, interchange
/// the first two modes when needed, and scale to coprime integers with
/// `d₁ > 0` and `|d₂| ≤ d₁`.
pub fn classify_simple_f2(l: &FrequencyVector, f2: &Polynomial) -> Result<(i64, i64), Error> {
    let (p, q) = ppq_pattern(l)?;
    let basis = l_basis();
    let refs: Vec<&Polynomial> = basis.iter().collect();
    let alphas = solve_in_span(&refs, f2).ok_or_else(|| {
        Error::precondition("F2 is not in the span of the quadratic algebra")
    })?;
    let beta4 = &alphas[3] + rat(2 * p, q) * &alphas[4];
    let t2: Rat = alphas[..3].iter().map(|a| a * a).sum();

    let gammas: (Rat, Rat) = if let Some(beta3) = rat_sqrt(&t2) {
        (
            -(&beta3 + &beta4) * rat(1, 2),
            (&beta3 - &beta4) * rat(1, 2),
        )
    } else if beta4.is_zero() {
        // gamma ratio is exactly -1 regardless of the irrational scale
        (rat_int(-1), rat_int(1))
    } else {
        // irrational beta3 with nonzero beta4: the ratio is rational only if
        // beta3/beta4 is, which contradicts irrationality unless the guessed
        // ratio passes the exact cross-check below.
        let beta3 = rat_to_f64(&t2).sqrt();
        let b4 = rat_to_f64(&beta4);
        let c = (beta3 - b4) / (-(beta3 + b4));
        let c = rationalize_f64(c, 1_000_000, 1e-9)
            .ok_or_else(|| Error::NonClassifiable("gamma ratio is not rational".into()))?;
        let one_plus = Rat::one() + &c;
        if one_plus.is_zero() {
            return Err(Error::NonClassifiable("degenerate gamma ratio".into()));
        }
        let implied = &beta4 * (Rat::one() - &c) / one_plus;
        if &implied * &implied != t2 {
            return Err(Error::NonClassifiable(
                "gamma ratio fails the exact square cross-check".into(),
            ));
        }
        (rat_int(1), c)
    };

    let (mut g1, mut g2) = gammas;
    if g1.abs() < g2.abs() {
        std::mem::swap(&mut g1, &mut g2);
    }
    if g1.is_zero() && g2.is_zero() {
        return Err(Error::precondition("F2 is a multiple of F1"));
    }
    let v = crate::linalg::normalize_rational_vector(vec![g1, g2]);
    let d1 = v[0].to_integer();
    let d2 = v[1].to_integer();
    let (d1, d2) = (
        i64::try_from(d1).map_err(|_| Error::Overflow("d1 exceeds i64".into()))?,
        i64::try_from(d2).map_err(|_| Error::Overflow("d2 exceeds i64".into()))?,
    );
    Ok((d1, d2))
}
