use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::matrix::AntisymmetricMatrix;
use crate::rational::Rational;
use crate::{Error, Permutation, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatisticKind {
    Descents,
    Inversions,
    Custom,
}

impl fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StatisticKind::Descents => "descents",
            StatisticKind::Inversions => "inversions",
            StatisticKind::Custom => "custom",
        })
    }
}

impl FromStr for StatisticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "descents" => Ok(StatisticKind::Descents),
            "inversions" => Ok(StatisticKind::Inversions),
            "custom" => Ok(StatisticKind::Custom),
            other => Err(Error::Parse(format!("unknown statistic {other:?}"))),
        }
    }
}

/// A member of the statistic family together with its materialized matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatisticSpec {
    kind: StatisticKind,
    matrix: AntisymmetricMatrix,
}

impl StatisticSpec {
    /// `X(π) = 2·Des(π⁻¹) − (n−1)`.
    pub fn descents(n: usize) -> Self {
        StatisticSpec {
            kind: StatisticKind::Descents,
            matrix: AntisymmetricMatrix::descents(n),
        }
    }

    /// `X(π) = 2·Inv(π⁻¹) − n(n−1)/2`.
    pub fn inversions(n: usize) -> Self {
        StatisticSpec {
            kind: StatisticKind::Inversions,
            matrix: AntisymmetricMatrix::inversions(n),
        }
    }

    pub fn custom(matrix: AntisymmetricMatrix) -> Self {
        StatisticSpec {
            kind: StatisticKind::Custom,
            matrix,
        }
    }

    pub fn builtin(kind: StatisticKind, n: usize) -> Result<Self> {
        match kind {
            StatisticKind::Descents => Ok(Self::descents(n)),
            StatisticKind::Inversions => Ok(Self::inversions(n)),
            StatisticKind::Custom => Err(Error::InvalidArgument(
                "custom statistics need an explicit matrix".into(),
            )),
        }
    }

    pub fn kind(&self) -> StatisticKind {
        self.kind
    }

    pub fn matrix(&self) -> &AntisymmetricMatrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub(crate) fn check_dim(&self, p: &Permutation) -> Result<()> {
        if p.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: p.n(),
            });
        }
        Ok(())
    }

    /// `X(π) = Σ_{i<j} M[π(i)][π(j)]`, exactly.
    pub fn x_stat(&self, p: &Permutation) -> Result<Rational> {
        self.check_dim(p)?;
        Ok(self.matrix.unscale(i128::from(scaled_x(&self.matrix, p.zero_based())), 1))
    }
}

/// `L·X(π)` for a 0-based one-line form.
pub(crate) fn scaled_x(m: &AntisymmetricMatrix, p: &[usize]) -> i64 {
    let n = m.n();
    let num = m.scaled_numerators();
    let mut total = 0i64;
    for i in 0..n {
        let row = &num[p[i] * n..p[i] * n + n];
        for &pj in &p[i + 1..] {
            total += row[pj];
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn p(v: &[usize]) -> Permutation {
        Permutation::from_one_line(v).unwrap()
    }

    #[test]
    fn worked_example_values() {
        let pi = p(&[6, 4, 1, 5, 3, 2, 7]);
        assert_eq!(StatisticSpec::descents(7).x_stat(&pi).unwrap(), int(0));
        assert_eq!(StatisticSpec::inversions(7).x_stat(&pi).unwrap(), int(1));
        let zero = StatisticSpec::custom(AntisymmetricMatrix::zero(7));
        assert_eq!(zero.x_stat(&pi).unwrap(), int(0));
    }

    #[test]
    fn dimension_mismatch() {
        let err = StatisticSpec::descents(4).x_stat(&Permutation::identity(5));
        assert!(matches!(err, Err(Error::DimensionMismatch { expected: 4, found: 5 })));
    }

    #[test]
    fn specializations_hold_on_small_groups() {
        for n in 1..=7 {
            let des = StatisticSpec::descents(n);
            let inv = StatisticSpec::inversions(n);
            let n_i = n as i64;
            for pi in Permutation::all(n) {
                let q = pi.inverse();
                assert_eq!(
                    des.x_stat(&pi).unwrap(),
                    int(2 * q.descent_count() as i64 - (n_i - 1))
                );
                assert_eq!(
                    inv.x_stat(&pi).unwrap(),
                    int(2 * q.inversion_count() as i64 - n_i * (n_i - 1) / 2)
                );
            }
        }
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("descents".parse::<StatisticKind>().unwrap(), StatisticKind::Descents);
        assert!("Descents".parse::<StatisticKind>().is_err());
    }
}
