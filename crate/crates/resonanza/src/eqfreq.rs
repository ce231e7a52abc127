//! Machinery for groups of frequencies sharing an absolute value: the
//! sign-adapted variables `w_i`, the rotation-like momenta `P_ij`, the group
//! observables `K_h`, `W_h`, `P²_(h)`, the recursive `Z/L` families of
//! commuting momentum polynomials, and the partition-based integrable sets
//! built from all of the above.

use crate::coeff::{rat, ExactComplex};
use crate::error::Error;
use crate::freq::FrequencyVector;
use crate::linalg::rank_rational;
use crate::poly::Polynomial;
use crate::sets::{IntegrableSet, SetMetadata};
use serde::{Deserialize, Serialize};

/// Partition of the modes into groups of equal `|l_i|`, as boundaries
/// `p₀ = 0 < p₁ < … < p_u = n`, with per-group magnitudes and per-mode signs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupPartition {
    boundaries: Vec<usize>,
    s: Vec<i64>,
    eps: Vec<i8>,
}

impl GroupPartition {
    /// Builds a partition from consecutive group sizes. Each group must have
    /// a single absolute frequency value; the split of equal values into
    /// subgroups is the caller's choice.
    pub fn new(l: &FrequencyVector, sizes: &[usize]) -> Result<Self, Error> {
        if sizes.iter().sum::<usize>() != l.n() || sizes.iter().any(|&q| q == 0) {
            return Err(Error::InvalidPartition(format!(
                "group sizes {sizes:?} do not partition {} modes",
                l.n()
            )));
        }
        let mut boundaries = vec![0usize];
        for &q in sizes {
            boundaries.push(boundaries.last().unwrap() + q);
        }
        let mut s = Vec::new();
        for h in 0..sizes.len() {
            let lo = boundaries[h];
            let hi = boundaries[h + 1];
            let mag = l.get(lo).abs();
            if (lo..hi).any(|i| l.get(i).abs() != mag) {
                return Err(Error::InvalidPartition(format!(
                    "group {} mixes distinct absolute frequencies",
                    h + 1
                )));
            }
            s.push(mag);
        }
        let eps = (0..l.n())
            .map(|i| if l.get(i) > 0 { 1i8 } else { -1 })
            .collect();
        Ok(GroupPartition {
            boundaries,
            s,
            eps,
        })
    }

    pub fn groups(&self) -> usize {
        self.s.len()
    }

    pub fn n(&self) -> usize {
        *self.boundaries.last().unwrap()
    }

    pub fn magnitudes(&self) -> &[i64] {
        &self.s
    }

    pub fn signs(&self) -> &[i8] {
        &self.eps
    }

    pub fn range(&self, h: usize) -> std::ops::Range<usize> {
        self.boundaries[h]..self.boundaries[h + 1]
    }

    pub fn size(&self, h: usize) -> usize {
        self.boundaries[h + 1] - self.boundaries[h]
    }
}

/// `w_i`: `z_i` for positive frequency sign, `z̄_i` otherwise.
pub fn w_var(eps: &[i8], i: usize) -> Polynomial {
    let n = eps.len();
    if eps[i] > 0 {
        Polynomial::z(n, i)
    } else {
        Polynomial::zbar(n, i)
    }
}

/// `P_ij = i(w_i w̄_j − w_j w̄_i)`, antisymmetric in `(i, j)`.
pub fn p_ij(eps: &[i8], i: usize, j: usize) -> Polynomial {
    let wi = w_var(eps, i);
    let wj = w_var(eps, j);
    (&(&wi * &wj.conjugate()) - &(&wj * &wi.conjugate())).scale(&ExactComplex::i())
}

/// `K_h = Σ ε_i I_i` over a mode range.
pub fn k_range(eps: &[i8], range: std::ops::Range<usize>) -> Polynomial {
    let n = eps.len();
    range.fold(Polynomial::zero(n), |acc, i| {
        &acc + &Polynomial::action(n, i).scale_rat(&rat(eps[i] as i64, 1))
    })
}

/// `W_h = Σ ε_i w_i²` over a mode range.
pub fn w_range(eps: &[i8], range: std::ops::Range<usize>) -> Polynomial {
    let n = eps.len();
    range.fold(Polynomial::zero(n), |acc, i| {
        &acc + &w_var(eps, i).pow(2).scale_rat(&rat(eps[i] as i64, 1))
    })
}

/// `P²` over a mode range: `Σ_{i<j} ε_i ε_j P_ij²`.
pub fn p2_range(eps: &[i8], range: std::ops::Range<usize>) -> Polynomial {
    let n = eps.len();
    let mut acc = Polynomial::zero(n);
    for i in range.clone() {
        for j in i + 1..range.end {
            acc = &acc + &p_ij(eps, i, j).pow(2).scale_rat(&rat((eps[i] * eps[j]) as i64, 1));
        }
    }
    acc
}

/// All group observables of a partition.
pub struct EqualFreqObjects {
    pub w_vars: Vec<Polynomial>,
    /// Within-group momenta, one list of `((i, j), P_ij)` per group.
    pub momenta: Vec<Vec<((usize, usize), Polynomial)>>,
    pub k: Vec<Polynomial>,
    pub w: Vec<Polynomial>,
    pub p2: Vec<Polynomial>,
}

pub fn build_equal_freq_objects(part: &GroupPartition) -> EqualFreqObjects {
    let eps = part.signs();
    let u = part.groups();
    EqualFreqObjects {
        w_vars: (0..part.n()).map(|i| w_var(eps, i)).collect(),
        momenta: (0..u)
            .map(|h| {
                let r = part.range(h);
                let mut list = Vec::new();
                for i in r.clone() {
                    for j in i + 1..r.end {
                        list.push(((i, j), p_ij(eps, i, j)));
                    }
                }
                list
            })
            .collect(),
        k: (0..u).map(|h| k_range(eps, part.range(h))).collect(),
        w: (0..u).map(|h| w_range(eps, part.range(h))).collect(),
        p2: (0..u).map(|h| p2_range(eps, part.range(h))).collect(),
    }
}

/// The `Z_{q,z}` / `L_{q,z}` families over the momenta of one group, realized
/// through nested Casimir sums `C_j = Σ_{i<i'≤j} ε_i ε_{i'} P_{ii'}²` (indices
/// local to the group):
///
/// * `Z = (C_{q−z+1}, …, C_q)` — `z` elements,
/// * `L = (C_2, …, C_{q−z}) ∪ (P_{1j}, j = 3..q−z+1)` — `2(q−z−1)` elements.
///
/// Every element has degree ≤ 2 in the momenta, `{Z, (Z, L)} = 0`, and the
/// union is functionally independent.
pub fn build_zl(
    eps: &[i8],
    range: std::ops::Range<usize>,
    z: usize,
) -> Result<(Vec<(String, Polynomial)>, Vec<(String, Polynomial)>), Error> {
    let q = range.len();
    if z == 0 || z > q - 1 {
        return Err(Error::precondition(format!(
            "central momentum count z = {z} outside 1..={}",
            q.saturating_sub(1)
        )));
    }
    let start = range.start;
    let casimir = |j: usize| p2_range(eps, start..start + j);
    let mut zs = Vec::new();
    for j in q - z + 1..=q {
        zs.push((format!("C{j}"), casimir(j)));
    }
    let mut ls = Vec::new();
    for j in 2..=q - z {
        ls.push((format!("C{j}"), casimir(j)));
    }
    for j in 3..=q - z + 1 {
        ls.push((
            format!("P(1,{j})"),
            p_ij(eps, start, start + j - 1),
        ));
    }
    Ok((zs, ls))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionVariant {
    /// Central part `(𝒥₁, 𝒵)`.
    Plain,
    /// Central part `(𝒥₁, ℛ₁, 𝒵)`; the first `k'` of the `m` vectors are
    /// central and must have support disjoint from all others.
    Mixed,
}

/// `R_m` over the group oscillators: `Π_h Ω_h^{m_h}` with `Ω_h = W_h` for
/// nonnegative exponents and `W̄_h` otherwise.
pub fn build_r_m_groups(objects: &EqualFreqObjects, m: &[i64]) -> Polynomial {
    let n = objects.w_vars[0].modes();
    let mut acc = Polynomial::one(n);
    for (h, &e) in m.iter().enumerate() {
        if e > 0 {
            acc = &acc * &objects.w[h].pow(e as u32);
        } else if e < 0 {
            acc = &acc * &objects.w[h].conjugate().pow((-e) as u32);
        }
    }
    acc
}

/// `J_r = Σ r_h K_h` over the groups; `F₁ = J_s`.
pub fn build_j_r_groups(objects: &EqualFreqObjects, r: &[i64]) -> Polynomial {
    let n = objects.w_vars[0].modes();
    r.iter()
        .enumerate()
        .fold(Polynomial::zero(n), |acc, (h, &c)| {
            &acc + &objects.k[h].scale_rat(&rat(c, 1))
        })
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn integer_rank(vs: &[Vec<i64>]) -> usize {
    let rows: Vec<Vec<crate::coeff::Rat>> = vs
        .iter()
        .map(|v| v.iter().map(|&x| rat(x, 1)).collect())
        .collect();
    rank_rational(&rows)
}

fn fmt_vec(v: &[i64]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(","))
}

/// Integrable sets built on a frequency partition. The `r` and `m` vectors
/// live in ℤ^u (one entry per group); `z_list` picks the central momentum
/// count for every group (`0` exactly for singleton groups).
#[allow(clippy::too_many_arguments)]
pub fn build_partition_set(
    l: &FrequencyVector,
    part: &GroupPartition,
    r_vectors: &[Vec<i64>],
    m_vectors: &[Vec<i64>],
    z_list: &[usize],
    k_prime: usize,
    variant: PartitionVariant,
) -> Result<IntegrableSet, Error> {
    let n = part.n();
    let u = part.groups();
    if l.n() != n {
        return Err(Error::ModeMismatch {
            left: l.n(),
            right: n,
        });
    }
    if z_list.len() != u {
        return Err(Error::precondition(format!(
            "z_list has {} entries for {u} groups",
            z_list.len()
        )));
    }
    for h in 0..u {
        let q = part.size(h);
        if q == 1 && z_list[h] != 0 {
            return Err(Error::precondition(format!(
                "singleton group {} takes z = 0",
                h + 1
            )));
        }
        if q > 1 && (z_list[h] == 0 || z_list[h] > q - 1) {
            return Err(Error::precondition(format!(
                "group {} of size {q} needs 1 <= z <= {}",
                h + 1,
                q - 1
            )));
        }
    }
    for v in r_vectors.iter().chain(m_vectors) {
        if v.len() != u {
            return Err(Error::precondition(format!(
                "group vector {} has {} entries for {u} groups",
                fmt_vec(v),
                v.len()
            )));
        }
    }
    if r_vectors.is_empty() || r_vectors[0] != part.magnitudes() {
        return Err(Error::precondition(
            "r(1) must equal the magnitude vector s".to_string(),
        ));
    }
    if k_prime == 0 || k_prime > u {
        return Err(Error::precondition(format!(
            "k' = {k_prime} outside 1..={u}"
        )));
    }

    let objects = build_equal_freq_objects(part);
    let z_total: usize = z_list.iter().sum();

    // The Z/L families per group, named with a group tag.
    let mut z_named = Vec::new();
    let mut l_named = Vec::new();
    for h in 0..u {
        if part.size(h) == 1 {
            continue;
        }
        let (zs, ls) = build_zl(part.signs(), part.range(h), z_list[h])?;
        for (name, p) in zs {
            z_named.push((format!("g{}:{name}", h + 1), p));
        }
        for (name, p) in ls {
            l_named.push((format!("g{}:{name}", h + 1), p));
        }
    }

    let j_named = |r: &Vec<i64>, first: bool| {
        let name = if first {
            "F1".to_string()
        } else {
            format!("J{}", fmt_vec(r))
        };
        (name, build_j_r_groups(&objects, r))
    };

    match variant {
        PartitionVariant::Plain => {
            if r_vectors.len() != u {
                return Err(Error::precondition(format!(
                    "plain shape needs {u} r vectors, got {}",
                    r_vectors.len()
                )));
            }
            if m_vectors.len() != u - k_prime {
                return Err(Error::precondition(format!(
                    "plain shape needs {} m vectors, got {}",
                    u - k_prime,
                    m_vectors.len()
                )));
            }
            if integer_rank(r_vectors) != u {
                return Err(Error::precondition("r vectors are linearly dependent"));
            }
            if !m_vectors.is_empty() && integer_rank(m_vectors) != m_vectors.len() {
                return Err(Error::precondition("m vectors are linearly dependent"));
            }
            for i in 0..k_prime {
                for (j, m) in m_vectors.iter().enumerate() {
                    let d = dot(&r_vectors[i], m);
                    if d != 0 {
                        return Err(Error::precondition(format!(
                            "r({})·m({}) = {d} must vanish",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
            let k = k_prime + z_total;
            let mut elements = Vec::new();
            for (i, r) in r_vectors.iter().enumerate().take(k_prime) {
                elements.push(j_named(r, i == 0));
            }
            elements.extend(z_named);
            for r in r_vectors.iter().skip(k_prime) {
                elements.push(j_named(r, false));
            }
            for m in m_vectors {
                elements.push((
                    format!("ImRW{}", fmt_vec(m)),
                    build_r_m_groups(&objects, m).imag_part(),
                ));
            }
            elements.extend(l_named);
            let mut meta = SetMetadata::family("partition");
            meta.r_vectors = Some(r_vectors.to_vec());
            meta.m_vectors = Some(m_vectors.to_vec());
            meta.z_list = Some(z_list.to_vec());
            meta.k_prime = Some(k_prime);
            meta.boundaries = Some((0..=u).map(|h| if h == 0 { 0 } else { part.range(h - 1).end }).collect());
            IntegrableSet::new(format!("partition-n{n}-k{k}"), l.clone(), k, elements, meta)
        }
        PartitionVariant::Mixed => {
            let h_count = m_vectors.len();
            if r_vectors.len() != u - k_prime {
                return Err(Error::precondition(format!(
                    "mixed shape needs {} r vectors, got {}",
                    u - k_prime,
                    r_vectors.len()
                )));
            }
            if h_count < k_prime || (h_count > k_prime && h_count >= u - k_prime) {
                return Err(Error::precondition(format!(
                    "mixed shape needs h = k' or k' < h < u-k' (k' = {k_prime}, h = {h_count})"
                )));
            }
            if integer_rank(r_vectors) != r_vectors.len() {
                return Err(Error::precondition("r vectors are linearly dependent"));
            }
            if integer_rank(m_vectors) != h_count {
                return Err(Error::precondition("m vectors are linearly dependent"));
            }
            for (j, m) in m_vectors.iter().enumerate() {
                let d = dot(part.magnitudes(), m);
                if d != 0 {
                    return Err(Error::precondition(format!(
                        "s·m({}) = {d} must vanish",
                        j + 1
                    )));
                }
            }
            for j in 0..k_prime {
                for i in 0..h_count {
                    if i == j {
                        continue;
                    }
                    if let Some(p) = (0..u).find(|&p| m_vectors[i][p] * m_vectors[j][p] != 0) {
                        return Err(Error::precondition(format!(
                            "m({})_p·m({})_p != 0 at group {}",
                            i + 1,
                            j + 1,
                            p + 1
                        )));
                    }
                }
            }
            for i in 0..r_vectors.len() {
                for j in 0..k_prime {
                    let d = dot(&r_vectors[i], &m_vectors[j]);
                    if d != 0 {
                        return Err(Error::precondition(format!(
                            "r({})·m({}) = {d} must vanish",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
            for i in 0..u - h_count {
                for j in k_prime..h_count {
                    let d = dot(&r_vectors[i], &m_vectors[j]);
                    if d != 0 {
                        return Err(Error::precondition(format!(
                            "r({})·m({}) = {d} must vanish",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
            let k = u - h_count + k_prime + z_total;
            let mut elements = Vec::new();
            for (i, r) in r_vectors.iter().enumerate().take(u - h_count) {
                elements.push(j_named(r, i == 0));
            }
            for m in m_vectors.iter().take(k_prime) {
                elements.push((
                    format!("ImRW{}", fmt_vec(m)),
                    build_r_m_groups(&objects, m).imag_part(),
                ));
            }
            elements.extend(z_named);
            for r in r_vectors.iter().skip(u - h_count) {
                elements.push(j_named(r, false));
            }
            for m in m_vectors.iter().skip(k_prime) {
                elements.push((
                    format!("ImRW{}", fmt_vec(m)),
                    build_r_m_groups(&objects, m).imag_part(),
                ));
            }
            elements.extend(l_named);
            let mut meta = SetMetadata::family("partition-mixed");
            meta.r_vectors = Some(r_vectors.to_vec());
            meta.m_vectors = Some(m_vectors.to_vec());
            meta.z_list = Some(z_list.to_vec());
            meta.k_prime = Some(k_prime);
            meta.h = Some(h_count);
            IntegrableSet::new(
                format!("partition-mixed-n{n}-k{k}"),
                l.clone(),
                k,
                elements,
                meta,
            )
        }
    }
}
