//! Standard normal CDF, Kolmogorov distance of lattice laws to it, and tables of
//! the exact distance for descents and inversions.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact_dist::{
    eulerian_distribution, mahonian_distribution, standardize, StandardizedDistribution,
};
use crate::rational::{self, Rational};
use crate::{Error, Limits, Result};

/// `Φ(x) = erfc(−x/√2)/2`.
///
/// `erfc` is the FreeBSD/Sun rational-approximation routine as ported by
/// `libm`, accurate to about one ulp; the resulting absolute error in `Φ` is
/// below `1e−16` across the real line.
pub fn normal_cdf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(0.5 * libm::erfc(-x * FRAC_1_SQRT_2))
}

/// Tolerance on `Σ probs = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// `sup_x |F(x) − Φ(x)|` for the step CDF `F` of `d`.
///
/// Between consecutive atoms `F` is flat and `Φ` increases, so the supremum is
/// attained at an atom or as the left limit at one: for each atom `w_i`,
/// compare `F(w_i) − Φ(w_i)` and `Φ(w_i) − F(w_{i−1})` (with `F(w_0) = 0`).
pub fn kolmogorov_distance(d: &StandardizedDistribution) -> Result<f64> {
    if d.atoms.len() != d.probs.len() || d.atoms.is_empty() {
        return Err(Error::InvalidArgument("atoms and probs must be nonempty and aligned".into()));
    }
    if d.atoms.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
        return Err(Error::InvalidArgument("atoms must be strictly increasing".into()));
    }
    if d.probs.iter().any(|p| p.is_nan() || *p < 0.0) {
        return Err(Error::InvalidArgument("probabilities must be nonnegative".into()));
    }
    let mass: f64 = d.probs.iter().sum();
    if mass.is_nan() || (mass - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Unnormalized(mass));
    }
    let mut below = 0.0;
    let mut cum = 0.0;
    let mut dist = 0.0f64;
    for (&w, &p) in d.atoms.iter().zip(&d.probs) {
        let phi = normal_cdf(w)?;
        cum += p;
        let f = cum.min(1.0);
        dist = dist.max(f - phi).max(phi - below);
        below = f;
    }
    Ok(dist)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateStatistic {
    Descents,
    Inversions,
}

impl fmt::Display for RateStatistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RateStatistic::Descents => "descents",
            RateStatistic::Inversions => "inversions",
        })
    }
}

impl RateStatistic {
    /// Mean and variance of the raw count under the uniform law on `S_n`.
    pub fn exact_moments(self, n: usize) -> (Rational, Rational) {
        let n = n as i128;
        match self {
            RateStatistic::Descents => (rational::ratio(n - 1, 2), rational::ratio(n + 1, 12)),
            RateStatistic::Inversions => (
                rational::ratio(n * (n - 1), 4),
                rational::ratio(n * (n - 1) * (2 * n + 5), 72),
            ),
        }
    }

    /// The count's exact law, standardized with [`Self::exact_moments`].
    pub fn standardized(self, n: usize, limits: &Limits) -> Result<StandardizedDistribution> {
        let dist = match self {
            RateStatistic::Descents => eulerian_distribution(n, limits)?,
            RateStatistic::Inversions => mahonian_distribution(n, limits)?,
        };
        let (mean, var) = self.exact_moments(n);
        standardize(&dist, &mean, rational::to_f64(&var).sqrt())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n: usize,
    pub statistic: RateStatistic,
    pub d_k: f64,
    /// `d_k·√n`
    #[serde(rename = "d_k_sqrt_n")]
    pub scaled: f64,
}

pub fn rate_table(statistic: RateStatistic, n_list: &[usize], limits: &Limits) -> Result<Vec<RateRow>> {
    n_list
        .par_iter()
        .map(|&n| {
            let d_k = kolmogorov_distance(&statistic.standardized(n, limits)?)?;
            Ok(RateRow {
                n,
                statistic,
                d_k,
                scaled: d_k * (n as f64).sqrt(),
            })
        })
        .collect()
}

/// CSV with header `n,statistic,d_k,d_k_sqrt_n`.
pub fn rate_table_csv(rows: &[RateRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(["n", "statistic", "d_k", "d_k_sqrt_n"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn rate_table_from_csv(text: &str) -> Result<Vec<RateRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    if r.headers()?.iter().collect::<Vec<_>>() != ["n", "statistic", "d_k", "d_k_sqrt_n"] {
        return Err(Error::Parse("unexpected rate table header".into()));
    }
    Ok(r.deserialize().collect::<std::result::Result<Vec<RateRow>, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(atoms: Vec<f64>, probs: Vec<f64>) -> StandardizedDistribution {
        StandardizedDistribution {
            atoms,
            probs,
            mean_used: 0.0,
            stddev_used: 1.0,
        }
    }

    #[test]
    fn cdf_basics() {
        assert_eq!(normal_cdf(0.0).unwrap(), 0.5);
        assert!((normal_cdf(1.0).unwrap() - 0.8413447460685429).abs() < 1e-15);
        for x in [0.1, 0.7, 1.5, 3.0, 8.0] {
            let s = normal_cdf(x).unwrap() + normal_cdf(-x).unwrap();
            assert!((s - 1.0).abs() <= 1e-15);
        }
        assert!(normal_cdf(f64::NAN).is_err());
        assert!(normal_cdf(f64::INFINITY).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(kolmogorov_distance(&dist(vec![0.0], vec![1.0])).unwrap(), 0.5);
        let two = kolmogorov_distance(&dist(vec![-1.0, 1.0], vec![0.5, 0.5])).unwrap();
        assert!((two - (normal_cdf(1.0).unwrap() - 0.5)).abs() < 1e-16);
        let r3 = 3f64.sqrt();
        let e3 = kolmogorov_distance(&dist(vec![-r3, 0.0, r3], vec![1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0])).unwrap();
        assert!(e3 > 0.0 && e3 < 0.5);
    }

    #[test]
    fn distance_rejects_bad_input() {
        assert!(matches!(
            kolmogorov_distance(&dist(vec![0.0, 1.0], vec![0.5, 0.4])),
            Err(Error::Unnormalized(_))
        ));
        assert!(kolmogorov_distance(&dist(vec![1.0, 0.0], vec![0.5, 0.5])).is_err());
        assert!(kolmogorov_distance(&dist(vec![], vec![])).is_err());
    }

    #[test]
    fn rate_table_shapes() {
        let lim = Limits::default();
        assert!(rate_table(RateStatistic::Descents, &[], &lim).unwrap().is_empty());
        let rows = rate_table(RateStatistic::Inversions, &[10, 20], &lim).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].n, 10);
        assert!((rows[1].scaled - rows[1].d_k * 20f64.sqrt()).abs() < 1e-15);
        assert!(rate_table(RateStatistic::Inversions, &[151], &lim).is_err());
    }

    #[test]
    fn csv_roundtrip() {
        let lim = Limits::default();
        let rows = rate_table(RateStatistic::Descents, &[3, 7], &lim).unwrap();
        let text = rate_table_csv(&rows).unwrap();
        assert!(text.starts_with("n,statistic,d_k,d_k_sqrt_n\n3,descents,"));
        assert_eq!(rate_table_from_csv(&text).unwrap(), rows);
        assert_eq!(rate_table_csv(&[]).unwrap(), "n,statistic,d_k,d_k_sqrt_n\n");
    }
}
