//! Exact mean and variance of `X` under the uniform law on `S_n`.
//!
//! The closed form: with `A_i = Σ_{j>i} M[i][j]` and `B_i = Σ_{h<i} M[h][i]`,
//! `E X = 0` and `Var X = (Σ_{i<j} M[i][j]² + Σ_i (A_i − B_i)²) / 3`.

use serde::{Deserialize, Serialize};

use crate::enumerate::{self, factorial};
use crate::matrix::AntisymmetricMatrix;
use crate::rational::{self, Rational};
use crate::statistic::scaled_x;
use crate::{Error, Limits, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarianceBreakdown {
    /// `Σ_{i<j} M[i][j]²`
    #[serde(with = "rational::serde_str")]
    pub sum_sq: Rational,
    /// `Σ_i (A_i − B_i)²`
    #[serde(with = "rational::serde_str")]
    pub row_balance: Rational,
    #[serde(with = "rational::serde_str_vec")]
    pub a: Vec<Rational>,
    #[serde(with = "rational::serde_str_vec")]
    pub b: Vec<Rational>,
    #[serde(with = "rational::serde_str")]
    pub variance: Rational,
}

pub fn variance_formula(m: &AntisymmetricMatrix) -> VarianceBreakdown {
    let n = m.n();
    let mut sum_sq = 0i128;
    let mut a = vec![0i64; n];
    let mut b = vec![0i64; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = m.scaled(i, j);
            sum_sq += i128::from(v) * i128::from(v);
            a[i] += v;
            b[j] += v;
        }
    }
    let row_balance: i128 = a
        .iter()
        .zip(&b)
        .map(|(&x, &y)| {
            let d = i128::from(x - y);
            d * d
        })
        .sum();
    let sum_sq_r = m.unscale(sum_sq, 2);
    let row_balance_r = m.unscale(row_balance, 2);
    let variance = (&sum_sq_r + &row_balance_r) / rational::int(3);
    VarianceBreakdown {
        sum_sq: sum_sq_r,
        row_balance: row_balance_r,
        a: a.iter().map(|&v| m.unscale(i128::from(v), 1)).collect(),
        b: b.iter().map(|&v| m.unscale(i128::from(v), 1)).collect(),
        variance,
    }
}

/// `(E X, Var X)` by summing over all of `S_n` in exact arithmetic.
pub fn brute_force_moments(m: &AntisymmetricMatrix, limits: &Limits) -> Result<(Rational, Rational)> {
    let n = m.n();
    limits.check_enumeration(n)?;
    #[derive(Default)]
    struct Acc {
        sum: i128,
        sum_sq: i128,
        overflow: bool,
    }
    let acc = enumerate::fold(
        n,
        Acc::default,
        |acc, p| {
            let x = i128::from(scaled_x(m, p));
            match (acc.sum.checked_add(x), x.checked_mul(x).and_then(|sq| acc.sum_sq.checked_add(sq))) {
                (Some(s), Some(q)) => {
                    acc.sum = s;
                    acc.sum_sq = q;
                }
                _ => acc.overflow = true,
            }
        },
        |a, b| {
            let sum = a.sum.checked_add(b.sum);
            let sum_sq = a.sum_sq.checked_add(b.sum_sq);
            Acc {
                sum: sum.unwrap_or_default(),
                sum_sq: sum_sq.unwrap_or_default(),
                overflow: a.overflow || b.overflow || sum.is_none() || sum_sq.is_none(),
            }
        },
    );
    if acc.overflow {
        return Err(Error::Overflow("moment accumulation"));
    }
    let count = factorial(n).ok_or(Error::Overflow("n!"))? as i128;
    let mean = m.unscale(acc.sum, 1) / rational::ratio(count, 1);
    let second = m.unscale(acc.sum_sq, 2) / rational::ratio(count, 1);
    let variance = second - &mean * &mean;
    Ok((mean, variance))
}
