//! Machine verification of the algebraic claims: involution of constructed
//! sets, closure of bracket families, generic-point independence, a registry
//! of named polynomial identities, representation-matrix relations, and the
//! exact involution-kernel solver.
//!
//! Reports are plain data. A failed check always carries a witness: the
//! nonzero residual polynomial or the deficient rank.

use crate::coeff::{rat, rat_int, ExactComplex, Rat};
use crate::eqfreq::{build_equal_freq_objects, p2_range, p_ij, GroupPartition};
use crate::error::Error;
use crate::freq::FrequencyVector;
use crate::linalg::{in_span, nullspace_rational, poly_coordinates};
use crate::n3::{
    a_qs, exceptional_generators, l_basis, mat_commutator, mat_identity, mat_is_zero, mat_mul,
    mat_scale, mat_sub, rep_matrices, Mat, RepMatrices,
};
use crate::poly::{Monomial, Polynomial};
use crate::rank::jacobian_rank;
use crate::sets::{build_j_r, build_r_m, resonance_basis_labeled, IntegrableSet};
use num_traits::{One, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<Polynomial>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
}

impl Check {
    pub fn residual(id: impl Into<String>, residual: Polynomial) -> Self {
        let status = if residual.is_zero() {
            Status::Pass
        } else {
            Status::Fail
        };
        Check {
            id: id.into(),
            status,
            residual: if status == Status::Fail {
                Some(residual)
            } else {
                None
            },
            rank: None,
        }
    }

    pub fn equality(id: impl Into<String>, lhs: &Polynomial, rhs: &Polynomial) -> Self {
        Check::residual(id, lhs - rhs)
    }

    pub fn boolean(id: impl Into<String>, ok: bool, witness: Option<Polynomial>) -> Self {
        Check {
            id: id.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual: if ok { None } else { witness },
            rank: None,
        }
    }

    pub fn ranked(id: impl Into<String>, rank: usize, expected: usize) -> Self {
        Check {
            id: id.into(),
            status: if rank == expected {
                Status::Pass
            } else {
                Status::Fail
            },
            residual: None,
            rank: Some(rank),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub subject: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub elapsed_ms: u128,
}

impl VerificationReport {
    pub fn new(subject: impl Into<String>, seed: u64, checks: Vec<Check>) -> Self {
        VerificationReport {
            subject: subject.into(),
            seed,
            checks,
            elapsed_ms: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status != Status::Pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

/// All brackets `{F_i, F_j}` with `F_i` central must vanish exactly.
pub fn check_involution(set: &IntegrableSet) -> VerificationReport {
    let start = Instant::now();
    let pairs: Vec<(usize, usize)> = (0..set.k)
        .flat_map(|i| (i + 1..set.elements.len()).map(move |j| (i, j)))
        .collect();
    let checks: Vec<Check> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let a = &set.elements[i];
            let b = &set.elements[j];
            Check::residual(
                format!("involution:{}|{}", a.name, b.name),
                a.poly.poisson_bracket(&b.poly),
            )
        })
        .collect();
    let mut report = VerificationReport::new(set.name.clone(), 0, checks);
    report.elapsed_ms = start.elapsed().as_millis();
    report
}

/// Passes iff the generic-point Jacobian rank equals the element count.
pub fn check_independence(set: &IntegrableSet, trials: usize, seed: u64) -> VerificationReport {
    let start = Instant::now();
    let polys = set.polys();
    let rank = jacobian_rank(&polys, trials, seed).unwrap_or(0);
    let mut report = VerificationReport::new(
        set.name.clone(),
        seed,
        vec![Check::ranked(
            format!("independence:{}", set.name),
            rank,
            polys.len(),
        )],
    );
    report.elapsed_ms = start.elapsed().as_millis();
    report
}

/// Enumerates monomials in the generators with polynomial degree at most
/// `cap`; errors out when the pool exceeds `max_pool`.
fn product_pool(
    generators: &[Polynomial],
    cap: u32,
    max_pool: usize,
) -> Result<Vec<Polynomial>, Error> {
    let n = generators[0].modes();
    let mut pool = vec![Polynomial::one(n)];
    let mut frontier: Vec<(usize, Polynomial)> = vec![(0, Polynomial::one(n))];
    while let Some((start, base)) = frontier.pop() {
        for (g, gen) in generators.iter().enumerate().skip(start) {
            if gen.degree() + base.degree() > cap {
                continue;
            }
            let next = &base * gen;
            if next.is_zero() {
                continue;
            }
            pool.push(next.clone());
            if pool.len() > max_pool {
                return Err(Error::Overflow(format!(
                    "closure product pool exceeds {max_pool} elements"
                )));
            }
            frontier.push((g, next));
        }
    }
    Ok(pool)
}

/// Every pairwise bracket must lie in the algebra generated by the basis,
/// tested by an exact linear solve against products of basis elements of
/// degree bounded by the bracket's degree (and by `degree_cap`).
pub fn check_closure(
    basis: &[(String, Polynomial)],
    degree_cap: Option<u32>,
    max_pool: usize,
) -> Result<VerificationReport, Error> {
    let start = Instant::now();
    let gens: Vec<Polynomial> = basis.iter().map(|(_, p)| p.clone()).collect();
    let max_deg = gens.iter().map(Polynomial::degree).max().unwrap_or(0);
    let cap = degree_cap.unwrap_or(2 * max_deg);
    let mut checks = Vec::new();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let bracket = basis[i].1.poisson_bracket(&basis[j].1);
            let id = format!("closure:{}|{}", basis[i].0, basis[j].0);
            if bracket.is_zero() {
                checks.push(Check::boolean(id, true, None));
                continue;
            }
            if bracket.degree() > cap {
                return Err(Error::Overflow(format!(
                    "bracket degree {} exceeds cap {cap} for {id}",
                    bracket.degree()
                )));
            }
            let pool = product_pool(&gens, bracket.degree(), max_pool)?;
            let refs: Vec<&Polynomial> = pool.iter().collect();
            let ok = in_span(&refs, &bracket);
            checks.push(Check::boolean(id, ok, Some(bracket)));
        }
    }
    let mut report = VerificationReport::new("closure", 0, checks);
    report.elapsed_ms = start.elapsed().as_millis();
    Ok(report)
}

/// Exact representation-matrix relations: the su(2) commutators, centrality
/// of the two diagonal generators, the Casimir value, the diagonal
/// constraint tying the last two generators, and hermiticity.
pub fn check_representation(rep: &RepMatrices) -> VerificationReport {
    let start = Instant::now();
    let q = rep.q;
    let mut checks = Vec::new();
    let witness = |m: &Mat| {
        m.iter()
            .flatten()
            .find(|c| !c.is_zero())
            .map(|c| Polynomial::constant(1, c.clone()))
    };
    // [J_i, J_j] = i Σ ε_ijk J_k
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let k = 3 - i - j;
            let sign = if (i + 1) % 3 == j { 1 } else { -1 };
            let lhs = mat_commutator(&rep.mats[i], &rep.mats[j]);
            let rhs = mat_scale(
                &rep.mats[k],
                &ExactComplex::from_int(sign).mul_i(),
            );
            let diff = mat_sub(&lhs, &rhs);
            checks.push(Check::boolean(
                format!("rep:cr1:q={q}:({},{})", i + 1, j + 1),
                mat_is_zero(&diff),
                witness(&diff),
            ));
        }
    }
    // [J_mu, J_4] = [J_mu, J_5] = 0
    for mu in 0..5 {
        for c in [3usize, 4] {
            let diff = mat_commutator(&rep.mats[mu], &rep.mats[c]);
            checks.push(Check::boolean(
                format!("rep:cr2:q={q}:({},{})", mu + 1, c + 1),
                mat_is_zero(&diff),
                witness(&diff),
            ));
        }
    }
    // Casimir Σ_{i<=3} J_i² = q(q+2)/4 E
    let casimir = rep.mats[..3]
        .iter()
        .fold(None::<Mat>, |acc, m| {
            let sq = mat_mul(m, m);
            Some(match acc {
                None => sq,
                Some(a) => crate::n3::mat_add(&a, &sq),
            })
        })
        .unwrap();
    let expect = mat_scale(
        &mat_identity(rep.dim()),
        &ExactComplex::from_rat(rat(q as i64 * (q as i64 + 2), 4)),
    );
    let diff = mat_sub(&casimir, &expect);
    checks.push(Check::boolean(
        format!("rep:casimir:q={q}"),
        mat_is_zero(&diff),
        witness(&diff),
    ));
    // q J_5 = 2p J_4
    let lhs = mat_scale(&rep.mats[4], &ExactComplex::from_int(q as i64));
    let rhs = mat_scale(&rep.mats[3], &ExactComplex::from_int(2 * rep.p as i64));
    let diff = mat_sub(&lhs, &rhs);
    checks.push(Check::boolean(
        format!("rep:constraint:q={q},p={}", rep.p),
        mat_is_zero(&diff),
        witness(&diff),
    ));
    for mu in 0..5 {
        checks.push(Check::boolean(
            format!("rep:hermitian:q={q},mu={}", mu + 1),
            rep.is_hermitian(mu),
            None,
        ));
    }
    let mut report = VerificationReport::new(format!("rep:q={q},p={}", rep.p), 0, checks);
    report.elapsed_ms = start.elapsed().as_millis();
    report
}

/// Bracket-to-matrix intertwining for one generator index:
/// `{iL_μ, Ā_{q,s}} = Σ_h M[h][s]·Ā_{q,h}` over the rescaled matrices.
pub fn check_intertwining(p: u32, q: u32) -> VerificationReport {
    let start = Instant::now();
    let rep = rep_matrices(p, q);
    let ls = l_basis();
    let mut checks = Vec::new();
    for mu in 0..5 {
        let il = ls[mu].scale(&ExactComplex::i());
        for s in 0..=q {
            let (a_s, _) = a_qs(p, q, s);
            let lhs = il.poisson_bracket(&a_s);
            let mut rhs = Polynomial::zero(3);
            for h in 0..=q {
                let c = &rep.mats[mu][h as usize][s as usize];
                if !c.is_zero() {
                    let (a_h, _) = a_qs(p, q, h);
                    rhs = &rhs + &a_h.scale(c);
                }
            }
            checks.push(Check::equality(
                format!("ellemua:q={q},p={p},mu={},s={s}", mu + 1),
                &lhs,
                &rhs,
            ));
        }
    }
    let mut report = VerificationReport::new(format!("ellemua:q={q},p={p}"), 0, checks);
    report.elapsed_ms = start.elapsed().as_millis();
    report
}

fn random_nonzero_vec(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Vec<i64> {
    loop {
        let v: Vec<i64> = (0..n)
            .map(|_| (rng.next_u64() % (2 * bound as u64 + 1)) as i64 - bound)
            .collect();
        if v.iter().any(|&x| x != 0) {
            return v;
        }
    }
}

fn random_signs(rng: &mut ChaCha8Rng, n: usize) -> Vec<i8> {
    (0..n)
        .map(|_| if rng.next_u64() % 2 == 0 { 1i8 } else { -1 })
        .collect()
}

/// The registry of named exact identities. `only` filters by id prefix.
pub fn check_identities(only: Option<&[&str]>, seed: u64) -> VerificationReport {
    let start = Instant::now();
    let mut checks: Vec<Check> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let wants = |id: &str| {
        only.map(|names| names.iter().any(|p| id.starts_with(p)))
            .unwrap_or(true)
    };

    let ls = l_basis();
    if wants("constr") {
        let lhs = &ls[0].pow(2) + &ls[1].pow(2);
        let rhs = &ls[3].pow(2) - &ls[2].pow(2);
        checks.push(Check::equality("constr", &lhs, &rhs));
        let total = &(&ls[0].pow(2) + &ls[1].pow(2)) + &ls[2].pow(2);
        checks.push(Check::equality("constr1", &total, &ls[3].pow(2)));
    }

    if wants("pb") {
        for (i, j, k) in [(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)] {
            checks.push(Check::equality(
                format!("pb1:L{},L{}", i + 1, j + 1),
                &ls[i].poisson_bracket(&ls[j]),
                &ls[k],
            ));
        }
        for mu in 0..5 {
            for c in [3usize, 4] {
                checks.push(Check::residual(
                    format!("pb2:L{},L{}", mu + 1, c + 1),
                    ls[mu].poisson_bracket(&ls[c]),
                ));
            }
        }
    }

    if wants("imre") {
        for t in 0..6 {
            let n = 2 + (rng.next_u64() % 3) as usize; // 2..=4 modes
            let m = random_nonzero_vec(&mut rng, n, 3);
            let r = build_r_m(&m);
            let (re, im) = r.re_im();
            let lhs = &re.pow(2) + &im.pow(2);
            let rhs = m.iter().enumerate().fold(Polynomial::one(n), |acc, (j, &e)| {
                &acc * &Polynomial::action(n, j).pow(e.unsigned_abs() as u32)
            });
            checks.push(Check::equality(format!("imre:{t}:m={m:?}"), &lhs, &rhs));
        }
    }

    if wants("jr") {
        for t in 0..4 {
            let n = 2 + (rng.next_u64() % 3) as usize;
            let r = random_nonzero_vec(&mut rng, n, 3);
            let m = random_nonzero_vec(&mut rng, n, 3);
            let jr = build_j_r(&r);
            let rm = build_r_m(&m);
            let dot: i64 = r.iter().zip(&m).map(|(a, b)| a * b).sum();
            checks.push(Check::equality(
                format!("jr:{t}:re"),
                &jr.poisson_bracket(&rm.real_part()),
                &rm.imag_part().scale_rat(&rat_int(dot)),
            ));
            checks.push(Check::equality(
                format!("jr:{t}:im"),
                &jr.poisson_bracket(&rm.imag_part()),
                &rm.real_part().scale_rat(&rat_int(-dot)),
            ));
        }
    }

    if wants("ppoisse") {
        for t in 0..6 {
            let n = 4 + (rng.next_u64() % 2) as usize;
            let eps = random_signs(&mut rng, n);
            let draw = |rng: &mut ChaCha8Rng| (rng.next_u64() % n as u64) as usize;
            let (i, j) = (draw(&mut rng), draw(&mut rng));
            let (h, k) = (draw(&mut rng), draw(&mut rng));
            if i == j || h == k {
                continue;
            }
            let lhs = p_ij(&eps, i, j).poisson_bracket(&p_ij(&eps, h, k));
            let term = |s: i64, a: usize, b: usize| {
                if a == b {
                    Polynomial::zero(n)
                } else {
                    p_ij(&eps, a, b).scale_rat(&rat_int(s))
                }
            };
            let delta = |a: usize, b: usize| if a == b { 1i64 } else { 0 };
            let rhs = &(&(&term(-(eps[i] as i64) * delta(i, h), j, k)
                + &term(-(eps[j] as i64) * delta(j, k), i, h))
                + &term(eps[i] as i64 * delta(i, k), j, h))
                + &term(eps[j] as i64 * delta(j, h), i, k);
            checks.push(Check::equality(
                format!("ppoisse:{t}:({i},{j})({h},{k})"),
                &lhs,
                &rhs,
            ));
        }
    }

    if wants("rotpo") {
        for t in 0..3 {
            let n = 3 + (rng.next_u64() % 2) as usize;
            let eps = random_signs(&mut rng, n);
            let p2 = p2_range(&eps, 0..n);
            for i in 0..n {
                for j in i + 1..n {
                    checks.push(Check::residual(
                        format!("rotpo:{t}:({i},{j})"),
                        p2.poisson_bracket(&p_ij(&eps, i, j)),
                    ));
                }
            }
        }
    }

    if wants("ww") || wants("fw2") || wants("wkp") || wants("kpij") {
        for t in 0..3 {
            // random partition with groups of size <= 4
            let mut sizes = Vec::new();
            let mut left = 3 + (rng.next_u64() % 3) as usize; // 3..=5 modes
            while left > 0 {
                let q = 1 + (rng.next_u64() % 4.min(left as u64)) as usize;
                sizes.push(q);
                left -= q;
            }
            let mags: Vec<i64> = (0..sizes.len())
                .map(|_| 1 + (rng.next_u64() % 3) as i64)
                .collect();
            let mut lvec = Vec::new();
            for (g, &q) in sizes.iter().enumerate() {
                for _ in 0..q {
                    let sign = if rng.next_u64() % 2 == 0 { 1 } else { -1 };
                    lvec.push(sign * mags[g]);
                }
            }
            let Ok(l) = FrequencyVector::new(lvec.clone()) else {
                continue;
            };
            // gcd normalization may have rescaled entries; rebuild partition on l
            let Ok(part) = GroupPartition::new(&l, &sizes) else {
                continue;
            };
            let obj = build_equal_freq_objects(&part);
            let u = part.groups();
            for h in 0..u {
                for j in 0..u {
                    if wants("ww") {
                        checks.push(Check::residual(
                            format!("ww:{t}:({h},{j})"),
                            obj.w[h].poisson_bracket(&obj.w[j]),
                        ));
                        let lhs = obj.w[h].poisson_bracket(&obj.w[j].conjugate());
                        let rhs = if h == j {
                            obj.k[h].scale(&ExactComplex::from_int(4).mul_i())
                        } else {
                            Polynomial::zero(part.n())
                        };
                        checks.push(Check::equality(format!("ww:{t}:conj({h},{j})"), &lhs, &rhs));
                    }
                    if wants("fw2") {
                        let lhs = obj.w[h].poisson_bracket(&obj.k[j]);
                        let rhs = if h == j {
                            obj.w[h].scale(&ExactComplex::from_int(2).mul_i())
                        } else {
                            Polynomial::zero(part.n())
                        };
                        checks.push(Check::equality(format!("fw2:{t}:K({h},{j})"), &lhs, &rhs));
                        for (pair, pij) in &obj.momenta[j] {
                            checks.push(Check::residual(
                                format!("fw2:{t}:P{pair:?}vsW{h}"),
                                obj.w[h].poisson_bracket(pij),
                            ));
                        }
                    }
                    if wants("kpij") {
                        for (pair, pij) in &obj.momenta[j] {
                            checks.push(Check::residual(
                                format!("kpij:{t}:K{h}vsP{pair:?}"),
                                obj.k[h].poisson_bracket(pij),
                            ));
                        }
                    }
                }
                if wants("wkp") {
                    let lhs = &obj.w[h] * &obj.w[h].conjugate();
                    let rhs = &obj.k[h].pow(2) - &obj.p2[h];
                    checks.push(Check::equality(format!("wkp:{t}:g{h}"), &lhs, &rhs));
                }
            }
        }
    }

    if wants("c0n3") || wants("f2f3") {
        let g = exceptional_generators();
        let i1 = Polynomial::action(3, 0);
        if wants("c0n3") {
            let residual = &(&(&g.c0 * &g.n3) - &(&g.d0 * &g.m3))
                - &(&i1 * &g.c1).scale_rat(&rat_int(2));
            checks.push(Check::residual("c0n3", residual));
        }
        if wants("f2f3") {
            let f2 = &g.c0 + &g.c2.scale_rat(&rat_int(2));
            let f3 = &g.c0.pow(2).scale_rat(&rat_int(2)) + &(&i1 * &g.m3.pow(2));
            // Leibniz pieces of {F2, F3} against their factored counterparts
            let c0_sq2 = g.c0.pow(2).scale_rat(&rat_int(2));
            let i1m3 = &i1 * &g.m3.pow(2);
            checks.push(Check::residual(
                "f2f3:piece:{C0,2C0^2}",
                g.c0.poisson_bracket(&c0_sq2),
            ));
            let lhs = g.c0.poisson_bracket(&i1m3);
            let rhs = &(&g.d0 * &g.m3.pow(2)).scale_rat(&rat_int(-2))
                + &(&(&i1 * &g.m3) * &g.c1).scale_rat(&rat_int(4));
            checks.push(Check::equality("f2f3:piece:{C0,I1M3^2}", &lhs, &rhs));
            let lhs = g.c2.scale_rat(&rat_int(2)).poisson_bracket(&c0_sq2);
            let rhs = (&(&g.c0 * &g.m3) * &g.n3).scale_rat(&rat_int(2));
            checks.push(Check::equality("f2f3:piece:{2C2,2C0^2}", &lhs, &rhs));
            let lhs = g.c2.scale_rat(&rat_int(2)).poisson_bracket(&i1m3);
            let rhs = (&(&i1 * &g.m3) * &g.c1).scale_rat(&rat_int(-8));
            checks.push(Check::equality("f2f3:piece:{2C2,I1M3^2}", &lhs, &rhs));
            // the factored form: sum of pieces equals 2M3(C0N3 − D0M3 − 2I1C1)
            let factored_inner = &(&(&g.c0 * &g.n3) - &(&g.d0 * &g.m3))
                - &(&i1 * &g.c1).scale_rat(&rat_int(2));
            let factored = (&g.m3 * &factored_inner).scale_rat(&rat_int(2));
            checks.push(Check::equality(
                "f2f3:factored",
                &f2.poisson_bracket(&f3),
                &factored,
            ));
            checks.push(Check::residual("f2f3:direct", f2.poisson_bracket(&f3)));
        }
    }

    if wants("aqsum") {
        for q in 1..=5u32 {
            let p = 1 + (q % 2);
            let mut sum = Polynomial::zero(3);
            for s in 0..=q {
                let (a, n2) = a_qs(p, q, s);
                sum = &sum + &a.pow(2).scale_rat(&(Rat::one() / n2));
            }
            let base = &Polynomial::zbar(3, 0).pow(2) + &Polynomial::zbar(3, 1).pow(2);
            let r = &base.pow(q) * &Polynomial::z(3, 2).pow(2 * p);
            checks.push(Check::equality(
                format!("aqsum:q={q},p={p}"),
                &sum,
                &r.scale_rat(&(Rat::one() / crate::n3::factorial(q))),
            ));
        }
    }

    if wants("f1rpab") {
        // The rotation of (Re P, Im P) under {F1, ·}; the scale is
        // l·(a−b), the same weight that drives the eigenrelation for
        // P_{a,b} itself and the J_r/R_m brackets.
        for t in 0..5 {
            let n = 2 + (rng.next_u64() % 2) as usize;
            let lvec = random_nonzero_vec(&mut rng, n, 3);
            if lvec.iter().any(|&x| x == 0) {
                continue;
            }
            let Ok(l) = FrequencyVector::new(lvec) else {
                continue;
            };
            let a: Vec<u32> = (0..n).map(|_| (rng.next_u64() % 3) as u32).collect();
            let b: Vec<u32> = (0..n).map(|_| (rng.next_u64() % 3) as u32).collect();
            let mono = Monomial::new(a.clone(), b.clone());
            let w = mono.weight(l.as_slice()); // l·(a−b)
            let p = Polynomial::from_monomial(n, a, b, ExactComplex::one());
            let (re, im) = p.re_im();
            let f1 = l.f1();
            checks.push(Check::equality(
                format!("f1rpab:{t}:re"),
                &f1.poisson_bracket(&re),
                &im.scale_rat(&rat_int(w)),
            ));
            checks.push(Check::equality(
                format!("f1rpab:{t}:im"),
                &f1.poisson_bracket(&im),
                &re.scale_rat(&rat_int(-w)),
            ));
        }
    }

    if wants("ellemua") {
        for q in 1..=6u32 {
            let rep_report = check_intertwining(1, q);
            checks.extend(rep_report.checks);
        }
    }

    let mut report = VerificationReport::new("identities", seed, checks);
    report.elapsed_ms = start.elapsed().as_millis();
    report
}

/// Exact basis of the involution kernel: all elements of the resonance
/// basis up to degree `d` whose bracket with every constraint vanishes,
/// computed as the rational nullspace of the exact bracket map.
pub fn involution_kernel(
    constraints: &[Polynomial],
    l: &FrequencyVector,
    d: u32,
    max_dim: usize,
) -> Result<Vec<Polynomial>, Error> {
    if constraints.is_empty() {
        return Err(Error::precondition("kernel needs at least one constraint"));
    }
    let basis = resonance_basis_labeled(l, d);
    if basis.len() > max_dim {
        return Err(Error::Overflow(format!(
            "resonance basis has {} elements, cap is {max_dim}",
            basis.len()
        )));
    }
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for f in constraints {
        let brackets: Vec<Polynomial> = basis
            .iter()
            .map(|(_, b)| f.poisson_bracket(b))
            .collect();
        let refs: Vec<&Polynomial> = brackets.iter().collect();
        let support = crate::linalg::monomial_support(&refs);
        let coords: Vec<Vec<Rat>> = brackets
            .iter()
            .map(|p| poly_coordinates(p, &support))
            .collect();
        for comp in 0..4 * support.len() {
            let row: Vec<Rat> = coords.iter().map(|c| c[comp].clone()).collect();
            if row.iter().all(Rat::is_zero) {
                continue;
            }
            rows.push(row);
        }
    }
    let null = nullspace_rational(&rows, basis.len());
    let kernel = null
        .into_iter()
        .map(|x| {
            let mut p = Polynomial::zero(l.n());
            for (coef, (_, b)) in x.iter().zip(&basis) {
                if !coef.is_zero() {
                    p = &p + &b.scale_rat(coef);
                }
            }
            p
        })
        .collect();
    Ok(kernel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::n3::build_exceptional_set;
    use crate::sets::resonance_basis;

    fn freq(l: &[i64]) -> FrequencyVector {
        FrequencyVector::new(l.to_vec()).unwrap()
    }

    #[test]
    fn involution_pass_and_fail() {
        let set = build_exceptional_set();
        let report = check_involution(&set);
        assert!(report.passed());

        // mutate F3 to use I2: the report must fail with a nonzero residual
        let g = exceptional_generators();
        let bad_f3 = &g.c0.pow(2).scale_rat(&rat_int(2))
            + &(&Polynomial::action(3, 1) * &g.m3.pow(2));
        let mut bad = set.clone();
        bad.elements[2].poly = bad_f3;
        let report = check_involution(&bad);
        assert!(!report.passed());
        let fail = report.failures().next().unwrap();
        assert!(fail.residual.as_ref().is_some_and(|r| !r.is_zero()));
    }

    #[test]
    fn involution_trivial_set() {
        let l = freq(&[1, 1, 2]);
        let set = IntegrableSet::new(
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
        assert!(check_involution(&set).passed());
        assert!(check_independence(&set, 5, 0).passed());
    }

    #[test]
    fn independence_detects_dependence() {
        let l = freq(&[1, 1]);
        let f1 = l.f1();
        let set = IntegrableSet::new(
            "dependent",
            l,
            1,
            vec![
                ("F1".into(), f1.clone()),
                ("2F1".into(), f1.scale_rat(&rat_int(2))),
                ("F1^2".into(), f1.pow(2)),
            ],
            crate::sets::SetMetadata::family("test"),
        )
        .unwrap();
        let report = check_independence(&set, 5, 0);
        assert!(!report.passed());
        assert_eq!(report.checks[0].rank, Some(1));
    }

    #[test]
    fn closure_of_l_algebra() {
        let ls = l_basis();
        let named: Vec<(String, Polynomial)> = ls
            .iter()
            .enumerate()
            .map(|(i, p)| (format!("L{}", i + 1), p.clone()))
            .collect();
        let report = check_closure(&named, None, 4096).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn closure_of_action_rm_family() {
        // (I1, I2, Re R_m, Im R_m) for n = 2, l = (1,1), m = (1,−1)
        let rm = build_r_m(&[1, -1]);
        let basis = vec![
            ("I1".to_string(), Polynomial::action(2, 0)),
            ("I2".to_string(), Polynomial::action(2, 1)),
            ("ReR".to_string(), rm.real_part()),
            ("ImR".to_string(), rm.imag_part()),
        ];
        let report = check_closure(&basis, None, 4096).unwrap();
        assert!(report.passed(), "{}", report.to_json());
    }

    #[test]
    fn closure_of_group_family() {
        // (K, P², Re R, Im R) for a two-group partition of (1,1,2)
        let l = freq(&[1, 1, 2]);
        let part = GroupPartition::new(&l, &[2, 1]).unwrap();
        let obj = build_equal_freq_objects(&part);
        let rm = crate::eqfreq::build_r_m_groups(&obj, &[2, -1]);
        let basis = vec![
            ("K1".to_string(), obj.k[0].clone()),
            ("K2".to_string(), obj.k[1].clone()),
            ("P2".to_string(), obj.p2[0].clone()),
            ("ReR".to_string(), rm.real_part()),
            ("ImR".to_string(), rm.imag_part()),
        ];
        let report = check_closure(&basis, None, 8192).unwrap();
        assert!(report.passed(), "{}", report.to_json());
    }

    #[test]
    fn identity_registry_all_pass() {
        let report = check_identities(None, 0);
        assert!(
            report.passed(),
            "failures: {:?}",
            report.failures().map(|c| c.id.clone()).collect::<Vec<_>>()
        );
        // deterministic given seed
        let again = check_identities(None, 0);
        assert_eq!(report.to_json(), again.to_json());
    }

    #[test]
    fn identity_filter_selects_subset() {
        let report = check_identities(Some(&["constr"]), 0);
        assert!(report.checks.len() == 2 && report.passed());
    }

    #[test]
    fn representation_suite() {
        for q in 1..=4u32 {
            for p in 1..=2u32 {
                let rep = rep_matrices(p, q);
                let report = check_representation(&rep);
                assert!(report.passed(), "q={q} p={p}: {}", report.to_json());
            }
        }
    }

    #[test]
    fn kernel_dimension_for_112() {
        let l = freq(&[1, 1, 2]);
        let f1 = l.f1();
        let kernel = involution_kernel(&[f1.clone()], &l, 2, 512).unwrap();
        assert_eq!(kernel.len(), 6); // constant + five quadratics
        for p in &kernel {
            assert!(f1.poisson_bracket(p).is_zero());
        }
        // each L sits inside the quadratic kernel span
        let refs: Vec<&Polynomial> = kernel.iter().collect();
        for lmu in l_basis() {
            assert!(crate::linalg::in_span(&refs, &lmu));
        }
    }

    #[test]
    fn kernel_with_action_constraint() {
        let l = freq(&[1, 1, 2]);
        let f1 = l.f1();
        let i1 = Polynomial::action(3, 0);
        let kernel = involution_kernel(&[f1, i1], &l, 3, 512).unwrap();
        assert_eq!(kernel.len(), 6);
        // spans {1, I1, I2, I3, Re(w2²z3), Im(w2²z3)}
        let refs: Vec<&Polynomial> = kernel.iter().collect();
        let w2sq_z3 = &Polynomial::zbar(3, 1).pow(2) * &Polynomial::z(3, 2);
        assert!(in_span(&refs, &Polynomial::one(3)));
        assert!(in_span(&refs, &Polynomial::action(3, 0)));
        assert!(in_span(&refs, &w2sq_z3.real_part()));
        assert!(in_span(&refs, &w2sq_z3.imag_part()));
    }

    #[test]
    fn kernel_exceptional_constraints() {
        let set = build_exceptional_set();
        let l = set.l.clone();
        let f1 = set.elements[0].poly.clone();
        let f2 = set.elements[1].poly.clone();
        let kernel = involution_kernel(&[f1.clone(), f2.clone()], &l, 3, 512).unwrap();
        let refs: Vec<&Polynomial> = kernel.iter().collect();
        assert!(in_span(&refs, &f2));
        assert!(in_span(&refs, &f1));
        for p in &kernel {
            assert!(f1.poisson_bracket(p).is_zero());
            assert!(f2.poisson_bracket(p).is_zero());
        }
    }

    #[test]
    fn kernel_monotone_in_degree() {
        let l = freq(&[1, 1, 2]);
        let f1 = l.f1();
        let small = involution_kernel(&[f1.clone()], &l, 2, 512).unwrap();
        let large = involution_kernel(&[f1], &l, 3, 512).unwrap();
        let refs: Vec<&Polynomial> = large.iter().collect();
        for p in &small {
            assert!(in_span(&refs, p));
        }
    }

    #[test]
    fn kernel_respects_dimension_guard() {
        let l = freq(&[1, 1, 2]);
        assert!(matches!(
            involution_kernel(&[l.f1()], &l, 4, 10),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn report_json_is_deterministic() {
        let set = build_exceptional_set();
        let a = check_involution(&set).to_json();
        let b = check_involution(&set).to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"status\": \"pass\""));
    }
}
