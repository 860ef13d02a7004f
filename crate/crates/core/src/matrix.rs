//! Exact antisymmetric matrices.
//!
//! Entries are rationals stored as `numerator / denominator` over one common
//! positive denominator, which lets the enumeration kernels work in machine
//! integers while every reported value stays exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};
use crate::rng::Stream;
use crate::{Error, Result};

/// Bound on scaled numerators. Keeps row sums in `i64` and squared sums in
/// `i128` for every `n` this crate enumerates.
pub const MAX_SCALED_ENTRY: i64 = 1 << 31;

#[derive(Clone, PartialEq, Eq)]
pub struct AntisymmetricMatrix {
    n: usize,
    denom: i64,
    num: Vec<i64>,
}

impl std::fmt::Debug for AntisymmetricMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AntisymmetricMatrix")
            .field("n", &self.n)
            .field("denom", &self.denom)
            .finish_non_exhaustive()
    }
}

impl AntisymmetricMatrix {
    pub fn zero(n: usize) -> Self {
        AntisymmetricMatrix {
            n,
            denom: 1,
            num: vec![0; n * n],
        }
    }

    /// `M[i][i+1] = −1`, `M[i+1][i] = +1`, zero elsewhere.
    pub fn descents(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n.saturating_sub(1) {
            m.num[i * n + i + 1] = -1;
            m.num[(i + 1) * n + i] = 1;
        }
        m
    }

    /// `M[i][j] = −1` for `i < j` and `+1` for `i > j`.
    pub fn inversions(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                m.num[i * n + j] = match i.cmp(&j) {
                    std::cmp::Ordering::Less => -1,
                    std::cmp::Ordering::Greater => 1,
                    std::cmp::Ordering::Equal => 0,
                };
            }
        }
        m
    }

    /// Integer matrix from row-major entries.
    pub fn from_integers(n: usize, entries: &[i64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for n = {n}, got {}",
                n * n,
                entries.len()
            )));
        }
        check_antisymmetric(n, |i, j| entries[i * n + j] == -entries[j * n + i])?;
        if entries.iter().any(|v| v.abs() > MAX_SCALED_ENTRY) {
            return Err(Error::Overflow("matrix entry magnitude exceeds 2^31"));
        }
        Ok(AntisymmetricMatrix {
            n,
            denom: 1,
            num: entries.to_vec(),
        })
    }

    /// Rational matrix from rows. Fails with the first (row-major, 1-based)
    /// offending `(i, j)` when the input is not antisymmetric.
    pub fn from_rationals(rows: &[Vec<Rational>]) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "row {} has {} entries, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
        }
        check_antisymmetric(n, |i, j| rows[i][j] == -rows[j][i].clone())?;

        let mut lcm = BigInt::one();
        for r in rows.iter().flatten() {
            lcm = lcm.lcm(r.denom());
        }
        let denom = lcm
            .to_i64()
            .ok_or(Error::Overflow("common denominator does not fit in i64"))?;
        let mut num = Vec::with_capacity(n * n);
        for r in rows.iter().flatten() {
            let scaled = r.numer() * (&lcm / r.denom());
            let v = scaled
                .to_i64()
                .filter(|v| v.abs() <= MAX_SCALED_ENTRY)
                .ok_or(Error::Overflow("scaled matrix entry exceeds 2^31"))?;
            num.push(v);
        }
        Ok(AntisymmetricMatrix { n, denom, num })
    }

    /// Random integer matrix with upper-triangle entries uniform on `[−max_abs, max_abs]`.
    pub fn random_integer(n: usize, max_abs: i64, stream: &mut Stream) -> Self {
        assert!((0..=MAX_SCALED_ENTRY).contains(&max_abs));
        let mut m = Self::zero(n);
        let width = 2 * max_abs as u64 + 1;
        for i in 0..n {
            for j in i + 1..n {
                let v = stream.below(width) as i64 - max_abs;
                m.num[i * n + j] = v;
                m.num[j * n + i] = -v;
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `M[i][j]` for 1-based indices.
    pub fn entry(&self, i: usize, j: usize) -> Rational {
        rational::ratio(
            i128::from(self.num[(i - 1) * self.n + (j - 1)]),
            i128::from(self.denom),
        )
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        (1..=self.n)
            .map(|i| (1..=self.n).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|&v| v == 0)
    }

    pub fn is_integer(&self) -> bool {
        self.denom == 1
    }

    /// Common denominator `L` such that every `L·M[i][j]` is an integer.
    pub fn denominator(&self) -> i64 {
        self.denom
    }

    /// Row-major `L·M`, 0-based.
    pub fn scaled_numerators(&self) -> &[i64] {
        &self.num
    }

    #[inline]
    pub(crate) fn scaled(&self, i0: usize, j0: usize) -> i64 {
        self.num[i0 * self.n + j0]
    }

    /// Converts a scaled integer quantity back to its exact value: `v / L^power`.
    pub(crate) fn unscale(&self, v: i128, power: u32) -> Rational {
        Rational::new(BigInt::from(v), BigInt::from(self.denom).pow(power))
    }

    pub fn to_file(&self) -> MatrixFile {
        MatrixFile {
            n: self.n,
            entries: self
                .rows()
                .iter()
                .map(|row| row.iter().map(rational::format).collect())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("matrix serializes")
    }

    /// Parses the matrix JSON document `{"n": int, "entries": [[string, …], …]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: MatrixFile = serde_json::from_str(text)?;
        file.into_matrix()
    }
}

fn check_antisymmetric(n: usize, mut ok: impl FnMut(usize, usize) -> bool) -> Result<()> {
    for i in 0..n {
        for j in 0..n {
            if !ok(i, j) {
                return Err(Error::NotAntisymmetric { i: i + 1, j: j + 1 });
            }
        }
    }
    Ok(())
}

/// On-disk matrix format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub n: usize,
    pub entries: Vec<Vec<String>>,
}

impl MatrixFile {
    pub fn into_matrix(self) -> Result<AntisymmetricMatrix> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        if self.entries.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "\"n\" is {} but \"entries\" has {} rows",
                self.n,
                self.entries.len()
            )));
        }
        let rows = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, s)| {
                        rational::parse(s).map_err(|e| {
                            Error::Parse(format!("entry ({}, {}): {e}", i + 1, j + 1))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        AntisymmetricMatrix::from_rationals(&rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn builtin_matrices() {
        let d = AntisymmetricMatrix::descents(4);
        assert_eq!(d.entry(2, 3), int(-1));
        assert_eq!(d.entry(3, 2), int(1));
        assert_eq!(d.entry(1, 3), int(0));
        let v = AntisymmetricMatrix::inversions(4);
        assert_eq!(v.entry(1, 4), int(-1));
        assert_eq!(v.entry(4, 1), int(1));
        assert_eq!(v.entry(2, 2), int(0));
    }

    #[test]
    fn json_roundtrip_with_fractions() {
        let text = r#"{"n": 3, "entries": [["0","1/2","-3"],["-1/2","0","2/3"],["3","-2/3","0"]]}"#;
        let m = AntisymmetricMatrix::from_json(text).unwrap();
        assert_eq!(m.denominator(), 6);
        assert_eq!(m.entry(1, 2), ratio(1, 2));
        assert_eq!(m.entry(2, 3), ratio(2, 3));
        let back = AntisymmetricMatrix::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn names_first_offending_entry() {
        let text = r#"{"n": 3, "entries": [["0","1","0"],["-1","0","2"],["0","2","0"]]}"#;
        match AntisymmetricMatrix::from_json(text) {
            Err(Error::NotAntisymmetric { i, j }) => assert_eq!((i, j), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
        let diag = r#"{"n": 2, "entries": [["0","0"],["0","1"]]}"#;
        assert!(matches!(
            AntisymmetricMatrix::from_json(diag),
            Err(Error::NotAntisymmetric { i: 2, j: 2 })
        ));
    }

    #[test]
    fn rejects_shape_errors() {
        assert!(AntisymmetricMatrix::from_json(r#"{"n": 2, "entries": [["0"]]}"#).is_err());
        assert!(AntisymmetricMatrix::from_json(r#"{"n": 2, "entries": [["0","1"],["-1"]]}"#).is_err());
        assert!(AntisymmetricMatrix::from_json(r#"{"n": 0, "entries": []}"#).is_err());
        assert!(AntisymmetricMatrix::from_json(r#"{"n": 1, "entries": [[0]]}"#).is_err());
        assert!(AntisymmetricMatrix::from_integers(2, &[0, 1, 1, 0]).is_err());
    }

    #[test]
    fn rejects_oversized_entries() {
        let big = format!("{}", 1i64 << 40);
        let neg = format!("-{}", 1i64 << 40);
        let text = format!(r#"{{"n": 2, "entries": [["0","{big}"],["{neg}","0"]]}}"#);
        assert!(matches!(AntisymmetricMatrix::from_json(&text), Err(Error::Overflow(_))));
    }

    #[test]
    fn random_matrix_is_antisymmetric() {
        let mut s = Stream::new(7);
        let m = AntisymmetricMatrix::random_integer(6, 3, &mut s);
        for i in 1..=6 {
            for j in 1..=6 {
                assert_eq!(m.entry(i, j), -m.entry(j, i));
                assert!(m.entry(i, j).abs() <= int(3));
            }
        }
        assert!(m.is_integer());
        assert!(!m.is_zero());
    }
}
