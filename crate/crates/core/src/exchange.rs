//! Coset bijections showing that `(W, W′)` is exchangeable, and a brute-force
//! exchangeability checker for arbitrary matrices.
//!
//! Fix the position `I` and the prefix `π(1), …, π(I−1)`; the remaining values
//! form a set `S`. For each `S` we need a bijection `Θ: S → S` with
//!
//! 1. `a(i,S) − b(i,S) = b(Θ(i),S) − a(Θ(i),S)` for every `i ∈ S`, where
//!    `a(i,S) = Σ_{j∈S, j>i} M[i][j]` and `b(i,S) = Σ_{j∈S, j<i} M[j][i]`;
//! 2. for every `i ∈ S`, a bijection `Φ_i: S−{i} → S−{Θ(i)}` preserving
//!    `M[j][k]`.
//!
//! Given those, `Λ(π)` keeps the prefix, puts `Θ(π(I))` at position `I` and
//! `Φ_{π(I)}(π(j))` at each later position; it is a bijection of the coset
//! that swaps the roles of `π` and `π′`.
//!
//! Sets are sorted ascending slices of 1-based values.
//!
//! For inversions `Θ` reverses `S` and the order-preserving `Φ_i` works. For
//! descents `Θ` reverses each maximal run of consecutive values. The
//! order-preserving `Φ_i` does *not* satisfy condition 2 there once `i` lies
//! strictly inside a run away from its centre (e.g. `S = {1,2,3,4}`, `i = 2`):
//! removing `i` and `Θ(i)` splits the run into pieces of swapped lengths.
//! [`PhiRule::RunMatching`] maps runs of `S−{i}` onto runs of `S−{Θ(i)}` of
//! equal length, which is an isomorphism of the descent matrix and agrees with
//! the order-preserving map whenever the latter is valid.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::Serialize;

use crate::enumerate;
use crate::matrix::AntisymmetricMatrix;
use crate::rational::{self, Rational};
use crate::statistic::{scaled_x, StatisticKind, StatisticSpec};
use crate::{Error, Limits, Permutation, Result};

/// The class of permutations sharing `I` and the values at positions `1..I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetContext {
    pub n: usize,
    pub i: usize,
    pub prefix: Vec<usize>,
    /// `{1..n}` minus the prefix values, ascending.
    pub remaining: Vec<usize>,
}

impl CosetContext {
    pub fn of(p: &Permutation, i: usize) -> Result<Self> {
        let n = p.n();
        if i == 0 || i > n {
            return Err(Error::PositionOutOfRange { position: i, n });
        }
        let line = p.one_line();
        let prefix = line[..i - 1].to_vec();
        let mut remaining = line[i - 1..].to_vec();
        remaining.sort_unstable();
        Ok(CosetContext {
            n,
            i,
            prefix,
            remaining,
        })
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        p.n() == self.n && p.one_line()[..self.i - 1] == self.prefix[..]
    }
}

/// A bijection between two finite sets of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetBijection {
    /// `(x, f(x))`, sorted by `x`.
    pairs: Vec<(usize, usize)>,
}

impl SetBijection {
    pub fn from_pairs(mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        pairs.sort_unstable();
        let mut images: Vec<usize> = pairs.iter().map(|&(_, y)| y).collect();
        images.sort_unstable();
        let distinct_domain = pairs.windows(2).all(|w| w[0].0 != w[1].0);
        let distinct_images = images.windows(2).all(|w| w[0] != w[1]);
        if !distinct_domain || !distinct_images {
            return Err(Error::InvalidSet("pairs do not form a bijection".into()));
        }
        Ok(SetBijection { pairs })
    }

    pub fn identity(s: &[usize]) -> Self {
        SetBijection {
            pairs: s.iter().map(|&x| (x, x)).collect(),
        }
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.pairs
            .binary_search_by_key(&x, |&(d, _)| d)
            .ok()
            .map(|k| self.pairs[k].1)
    }

    pub fn domain(&self) -> Vec<usize> {
        self.pairs.iter().map(|&(x, _)| x).collect()
    }

    pub fn codomain(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self.pairs.iter().map(|&(_, y)| y).collect();
        c.sort_unstable();
        c
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// How to build `Φ_i: S−{i} → S−{Θ(i)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiRule {
    /// Pair the two sets in increasing order.
    OrderPreserving,
    /// Pair maximal runs of consecutive values by length (the `k`-th run of a
    /// given length goes to the `k`-th run of that length), increasing inside
    /// each run. Undefined when the run-length multisets differ.
    RunMatching,
}

impl PhiRule {
    pub fn for_kind(kind: StatisticKind) -> Result<Self> {
        match kind {
            StatisticKind::Descents => Ok(PhiRule::RunMatching),
            StatisticKind::Inversions => Ok(PhiRule::OrderPreserving),
            StatisticKind::Custom => Err(Error::NoBuiltinBijection),
        }
    }

    pub fn build(self, s: &[usize], i: usize, theta_i: usize) -> Result<Option<SetBijection>> {
        match self {
            PhiRule::OrderPreserving => phi(s, i, theta_i).map(Some),
            PhiRule::RunMatching => phi_run_matching(s, i, theta_i),
        }
    }
}

fn check_set(s: &[usize]) -> Result<()> {
    if s.first() == Some(&0) {
        return Err(Error::InvalidSet("values must be positive".into()));
    }
    if !s.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidSet("set must be strictly increasing".into()));
    }
    Ok(())
}

fn require_member(s: &[usize], x: usize) -> Result<()> {
    s.binary_search(&x).map(|_| ()).map_err(|_| Error::NotInSet(x))
}

/// `(a(i,S), b(i,S))`.
pub fn subset_sums(m: &AntisymmetricMatrix, s: &[usize], i: usize) -> Result<(Rational, Rational)> {
    check_set(s)?;
    require_member(s, i)?;
    if let Some(&max) = s.last() {
        if max > m.n() {
            return Err(Error::InvalidSet(format!("value {max} exceeds n = {}", m.n())));
        }
    }
    let (a, b) = scaled_subset_sums(m, s, i);
    Ok((m.unscale(i128::from(a), 1), m.unscale(i128::from(b), 1)))
}

fn scaled_subset_sums(m: &AntisymmetricMatrix, s: &[usize], i: usize) -> (i64, i64) {
    let mut a = 0;
    let mut b = 0;
    for &j in s {
        if j > i {
            a += m.scaled(i - 1, j - 1);
        } else if j < i {
            b += m.scaled(j - 1, i - 1);
        }
    }
    (a, b)
}

/// Maximal runs of consecutive integers in an ascending set.
fn runs(s: &[usize]) -> Vec<&[usize]> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=s.len() {
        if k == s.len() || s[k] != s[k - 1] + 1 {
            if k > start {
                out.push(&s[start..k]);
            }
            start = k;
        }
    }
    out
}

/// The built-in `Θ`: run-wise reversal for descents, full reversal for inversions.
pub fn theta(kind: StatisticKind, s: &[usize]) -> Result<SetBijection> {
    check_set(s)?;
    let pairs = match kind {
        StatisticKind::Descents => runs(s)
            .into_iter()
            .flat_map(|run| run.iter().copied().zip(run.iter().rev().copied()))
            .collect(),
        StatisticKind::Inversions => s.iter().copied().zip(s.iter().rev().copied()).collect(),
        StatisticKind::Custom => return Err(Error::NoBuiltinBijection),
    };
    Ok(SetBijection { pairs })
}

/// The order-preserving bijection `S−{i} → S−{theta_i}`.
pub fn phi(s: &[usize], i: usize, theta_i: usize) -> Result<SetBijection> {
    check_set(s)?;
    require_member(s, i)?;
    require_member(s, theta_i)?;
    let from = s.iter().copied().filter(|&x| x != i);
    let to = s.iter().copied().filter(|&x| x != theta_i);
    Ok(SetBijection {
        pairs: from.zip(to).collect(),
    })
}

/// Run-length-matching bijection `S−{i} → S−{theta_i}`; `None` when the two
/// sets have different run structures.
pub fn phi_run_matching(s: &[usize], i: usize, theta_i: usize) -> Result<Option<SetBijection>> {
    check_set(s)?;
    require_member(s, i)?;
    require_member(s, theta_i)?;
    let from: Vec<usize> = s.iter().copied().filter(|&x| x != i).collect();
    let to: Vec<usize> = s.iter().copied().filter(|&x| x != theta_i).collect();
    let from_runs = runs(&from);
    let mut to_by_len: BTreeMap<usize, std::collections::VecDeque<&[usize]>> = BTreeMap::new();
    for run in runs(&to) {
        to_by_len.entry(run.len()).or_default().push_back(run);
    }
    let mut pairs = Vec::with_capacity(from.len());
    for run in from_runs {
        let Some(target) = to_by_len.get_mut(&run.len()).and_then(|q| q.pop_front()) else {
            return Ok(None);
        };
        pairs.extend(run.iter().copied().zip(target.iter().copied()));
    }
    pairs.sort_unstable();
    Ok(Some(SetBijection { pairs }))
}

/// Both exchangeability conditions for every `i ∈ S`, with `Φ_i` built by `rule`.
pub fn check_conditions(
    m: &AntisymmetricMatrix,
    s: &[usize],
    th: &SetBijection,
    rule: PhiRule,
) -> Result<bool> {
    check_conditions_with(m, s, th, |s, i, ti| rule.build(s, i, ti))
}

/// As [`check_conditions`], with a caller-supplied `Φ` family. Returning
/// `Ok(None)` means no `Φ_i` is available, which fails condition 2.
pub fn check_conditions_with<F>(
    m: &AntisymmetricMatrix,
    s: &[usize],
    th: &SetBijection,
    mut phi_for: F,
) -> Result<bool>
where
    F: FnMut(&[usize], usize, usize) -> Result<Option<SetBijection>>,
{
    check_set(s)?;
    if let Some(&max) = s.last() {
        if max > m.n() {
            return Err(Error::InvalidSet(format!("value {max} exceeds n = {}", m.n())));
        }
    }
    if th.domain() != s || th.codomain() != s {
        return Err(Error::InvalidSet("Θ must be a bijection of S".into()));
    }
    for &i in s {
        let ti = th.apply(i).expect("domain checked");
        let (a_i, b_i) = scaled_subset_sums(m, s, i);
        let (a_t, b_t) = scaled_subset_sums(m, s, ti);
        if a_i - b_i != b_t - a_t {
            return Ok(false);
        }
        let Some(phi_i) = phi_for(s, i, ti)? else {
            return Ok(false);
        };
        let rest: Vec<usize> = s.iter().copied().filter(|&x| x != i).collect();
        let target: Vec<usize> = s.iter().copied().filter(|&x| x != ti).collect();
        if phi_i.domain() != rest || phi_i.codomain() != target {
            return Ok(false);
        }
        for &j in &rest {
            let pj = phi_i.apply(j).expect("domain checked");
            for &k in &rest {
                let pk = phi_i.apply(k).expect("domain checked");
                if m.scaled(j - 1, k - 1) != m.scaled(pj - 1, pk - 1) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// `Λ(π)` for the coset of `π` at position `i`.
pub fn lambda_map(spec: &StatisticSpec, p: &Permutation, i: usize) -> Result<Permutation> {
    let rule = PhiRule::for_kind(spec.kind())?;
    spec.check_dim(p)?;
    let ctx = CosetContext::of(p, i)?;
    let th = theta(spec.kind(), &ctx.remaining)?;
    let head = p.value(i);
    let t = th.apply(head).expect("π(I) ∈ S");
    let phi_i = rule
        .build(&ctx.remaining, head, t)?
        .ok_or_else(|| Error::InvalidSet("no Φ for this coset".into()))?;
    let mut line = ctx.prefix;
    line.push(t);
    for j in i + 1..=p.n() {
        line.push(phi_i.apply(p.value(j)).expect("π(j) ∈ S−{π(I)}"));
    }
    Permutation::from_one_line(&line)
}

/// Joint counts of `(X(π), X(π′))` over all `(π, I) ∈ S_n × {1..n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairDistribution {
    pub counts: BTreeMap<(Rational, Rational), BigUint>,
    pub total: BigUint,
}

impl PairDistribution {
    /// `count(x, x′) = count(x′, x)` for every cell.
    pub fn is_swap_symmetric(&self) -> bool {
        self.counts.iter().all(|((x, y), c)| {
            self.counts
                .get(&(y.clone(), x.clone()))
                .is_some_and(|d| d == c)
        })
    }

    /// Cells as `(x, x′, count)` strings, for reports.
    pub fn cells(&self) -> Vec<(String, String, String)> {
        self.counts
            .iter()
            .map(|((x, y), c)| (rational::format(x), rational::format(y), c.to_string()))
            .collect()
    }
}

pub fn joint_distribution(
    m: &AntisymmetricMatrix,
    n: usize,
    limits: &Limits,
) -> Result<PairDistribution> {
    if m.n() != n {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            found: n,
        });
    }
    limits.check_enumeration(n)?;
    let scaled = enumerate::fold(
        n,
        BTreeMap::<(i64, i64), u64>::new,
        |acc, p| {
            let x = scaled_x(m, p);
            for i0 in 0..n {
                let tail: i64 = p[i0 + 1..].iter().map(|&pj| m.scaled(p[i0], pj)).sum();
                *acc.entry((x, x - 2 * tail)).or_insert(0) += 1;
            }
        },
        |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        },
    );
    let mut total = BigUint::default();
    let mut counts = BTreeMap::new();
    for ((x, y), c) in scaled {
        total += c;
        counts.insert(
            (m.unscale(i128::from(x), 1), m.unscale(i128::from(y), 1)),
            BigUint::from(c),
        );
    }
    Ok(PairDistribution { counts, total })
}

/// Exact swap-symmetry of the joint law of `(X, X′)`; equivalent to that of
/// `(W, W′)` since `W = X/σ` is a strictly monotone rescaling.
pub fn is_exchangeable(m: &AntisymmetricMatrix, n: usize, limits: &Limits) -> Result<bool> {
    Ok(joint_distribution(m, n, limits)?.is_swap_symmetric())
}
