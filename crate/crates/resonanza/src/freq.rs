//! Resonant frequency vectors `l ∈ (ℤ∖{0})ⁿ`, normalized to coprime entries.

use crate::error::Error;
use crate::poly::Polynomial;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrequencyVector {
    l: Vec<i64>,
}

impl FrequencyVector {
    /// Rejects empty vectors and zero entries; divides out the common factor.
    pub fn new(l: Vec<i64>) -> Result<Self, Error> {
        if l.is_empty() {
            return Err(Error::InvalidFrequency("empty vector".into()));
        }
        if l.iter().any(|&x| x == 0) {
            return Err(Error::InvalidFrequency("zero frequency entry".into()));
        }
        let g = l.iter().fold(0i64, |acc, &x| acc.gcd(&x.abs()));
        Ok(FrequencyVector {
            l: l.into_iter().map(|x| x / g).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.l.len()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.l
    }

    pub fn get(&self, i: usize) -> i64 {
        self.l[i]
    }

    /// `F₁ = Σ l_j I_j`.
    pub fn f1(&self) -> Polynomial {
        crate::sets::build_j_r(&self.l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_common_divisors() {
        let l = FrequencyVector::new(vec![2, 2, 4]).unwrap();
        assert_eq!(l.as_slice(), &[1, 1, 2]);
        let m = FrequencyVector::new(vec![-3, 6]).unwrap();
        assert_eq!(m.as_slice(), &[-1, 2]);
    }

    #[test]
    fn rejects_zero_entries() {
        assert!(FrequencyVector::new(vec![1, 0, 2]).is_err());
        assert!(FrequencyVector::new(vec![]).is_err());
    }
}
