//! Exact laws of the descent and inversion counts over `S_n`.
//!
//! Counts are stored by the exact statistic value: `counts[k]` is the number of
//! permutations with `k` descents (resp. inversions). The classical Eulerian
//! number `A(n, k)` is sometimes indexed by `k+1` descents; no shift is applied
//! here.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::enumerate;
use crate::matrix::AntisymmetricMatrix;
use crate::rational::{self, Rational};
use crate::statistic::scaled_x;
use crate::{Error, Limits, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerDistribution {
    pub n: usize,
    pub min_value: i64,
    /// `counts[k]` is the number of permutations with value `min_value + k`.
    pub counts: Vec<BigUint>,
    pub total: BigUint,
}

impl IntegerDistribution {
    fn new(n: usize, min_value: i64, counts: Vec<BigUint>) -> Self {
        let total = counts.iter().sum();
        IntegerDistribution {
            n,
            min_value,
            counts,
            total,
        }
    }

    /// Values with nonzero count, ascending.
    pub fn support(&self) -> Vec<(i64, &BigUint)> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (self.min_value + k as i64, c))
            .collect()
    }

    /// Exact `(mean, variance)` computed from the counts.
    pub fn moments(&self) -> (Rational, Rational) {
        let mut s1 = num_bigint::BigInt::zero();
        let mut s2 = num_bigint::BigInt::zero();
        for (v, c) in self.support() {
            let c = num_bigint::BigInt::from(c.clone());
            let v = num_bigint::BigInt::from(v);
            s1 += &c * &v;
            s2 += &c * &v * &v;
        }
        let total = num_bigint::BigInt::from(self.total.clone());
        let mean = BigRational::new(s1, total.clone());
        let second = BigRational::new(s2, total);
        let var = &second - &mean * &mean;
        (mean, var)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&DistributionFile::from(self)).expect("distribution serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DistributionFile = serde_json::from_str(text)?;
        file.try_into()
    }
}

/// `{"n": …, "min_value": …, "counts": ["decimal", …]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionFile {
    pub n: usize,
    pub min_value: i64,
    pub counts: Vec<String>,
}

impl From<&IntegerDistribution> for DistributionFile {
    fn from(d: &IntegerDistribution) -> Self {
        DistributionFile {
            n: d.n,
            min_value: d.min_value,
            counts: d.counts.iter().map(|c| c.to_string()).collect(),
        }
    }
}

impl TryFrom<DistributionFile> for IntegerDistribution {
    type Error = Error;

    fn try_from(f: DistributionFile) -> Result<Self> {
        if f.counts.is_empty() {
            return Err(Error::Parse("empty counts".into()));
        }
        let counts = f
            .counts
            .iter()
            .map(|s| {
                if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(Error::Parse(format!("not a decimal count: {s:?}")));
                }
                s.parse::<BigUint>()
                    .map_err(|e| Error::Parse(format!("count {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if f.min_value.checked_add(counts.len() as i64).is_none() {
            return Err(Error::Parse("value range overflows".into()));
        }
        let d = IntegerDistribution::new(f.n, f.min_value, counts);
        if d.total.is_zero() {
            return Err(Error::Parse("distribution has zero total".into()));
        }
        Ok(d)
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if n > cap {
        return Err(Error::LimitExceeded { n, limit: cap });
    }
    Ok(())
}

/// Descent counts via `E(n,k) = (k+1)·E(n−1,k) + (n−k)·E(n−1,k−1)`, `E(1,0) = 1`.
pub fn eulerian_distribution(n: usize, limits: &Limits) -> Result<IntegerDistribution> {
    check_cap(n, limits.eulerian_cap)?;
    let mut row = vec![BigUint::one()];
    for m in 2..=n {
        let mut next = Vec::with_capacity(m);
        for k in 0..m {
            let mut v = BigUint::zero();
            if k < row.len() {
                v += &row[k] * (k as u64 + 1);
            }
            if k >= 1 {
                v += &row[k - 1] * ((m - k) as u64);
            }
            next.push(v);
        }
        row = next;
    }
    Ok(IntegerDistribution::new(n, 0, row))
}

/// Inversion counts: coefficients of `Π_{i=1}^{n} (1 + q + … + q^{i−1})`,
/// multiplying one factor at a time with a sliding-window (prefix-sum) update.
pub fn mahonian_distribution(n: usize, limits: &Limits) -> Result<IntegerDistribution> {
    check_cap(n, limits.mahonian_cap)?;
    let mut coeffs = vec![BigUint::one()];
    for i in 2..=n {
        let len = coeffs.len() + i - 1;
        let mut next = Vec::with_capacity(len);
        let mut window = BigUint::zero();
        for k in 0..len {
            if k < coeffs.len() {
                window += &coeffs[k];
            }
            if k >= i {
                window -= &coeffs[k - i];
            }
            next.push(window.clone());
        }
        coeffs = next;
    }
    Ok(IntegerDistribution::new(n, 0, coeffs))
}

/// Law of `X` over `S_n` by enumeration. Requires integer entries.
pub fn generic_distribution(m: &AntisymmetricMatrix, limits: &Limits) -> Result<IntegerDistribution> {
    if !m.is_integer() {
        return Err(Error::NonIntegerEntries);
    }
    let n = m.n();
    limits.check_enumeration(n)?;
    let counts = enumerate::fold(
        n,
        BTreeMap::<i64, u64>::new,
        |acc, p| *acc.entry(scaled_x(m, p)).or_insert(0) += 1,
        |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        },
    );
    let min = *counts.keys().next().expect("S_n is nonempty");
    let max = *counts.keys().next_back().expect("S_n is nonempty");
    let mut dense = vec![BigUint::zero(); (max - min) as usize + 1];
    for (v, c) in counts {
        dense[(v - min) as usize] = BigUint::from(c);
    }
    Ok(IntegerDistribution::new(n, min, dense))
}

/// A law on finitely many real atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizedDistribution {
    pub atoms: Vec<f64>,
    pub probs: Vec<f64>,
    pub mean_used: f64,
    pub stddev_used: f64,
}

/// Atoms `(v − mean)/stddev` for each value with nonzero count, with
/// probabilities `count/total` rounded once from the exact ratio.
pub fn standardize(d: &IntegerDistribution, mean: &Rational, stddev: f64) -> Result<StandardizedDistribution> {
    if !stddev.is_finite() {
        return Err(Error::NonFinite);
    }
    if stddev <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let total = num_bigint::BigInt::from(d.total.clone());
    let mut atoms = Vec::new();
    let mut probs = Vec::new();
    for (v, c) in d.support() {
        let offset = rational::int(v) - mean;
        atoms.push(rational::to_f64(&offset) / stddev);
        let p = BigRational::new(num_bigint::BigInt::from(c.clone()), total.clone());
        probs.push(p.to_f64().unwrap_or(0.0));
    }
    Ok(StandardizedDistribution {
        atoms,
        probs,
        mean_used: rational::to_f64(mean),
        stddev_used: stddev,
    })
}
