//! Exhaustive traversal of `S_n`.
//!
//! Permutations are split into `n` blocks by their first entry; blocks run in
//! parallel and their accumulators are merged in block order, so any
//! associative merge gives the same result as a sequential pass.

use rayon::prelude::*;

use crate::perm::next_lexicographic;

/// Folds `step` over every permutation of `0..n` (0-based one-line form).
pub fn fold<A, I, S, M>(n: usize, init: I, step: S, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync,
    S: Fn(&mut A, &[usize]) + Sync,
    M: Fn(A, A) -> A,
{
    if n <= 1 {
        let mut acc = init();
        let p: Vec<usize> = (0..n).collect();
        step(&mut acc, &p);
        return acc;
    }
    let blocks: Vec<A> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut acc = init();
            let mut p = Vec::with_capacity(n);
            p.push(first);
            p.extend((0..n).filter(|&v| v != first));
            loop {
                step(&mut acc, &p);
                if !next_lexicographic(&mut p[1..]) {
                    break;
                }
            }
            acc
        })
        .collect();
    let mut it = blocks.into_iter();
    let first = it.next().expect("n >= 2 blocks");
    it.fold(first, merge)
}

/// `n!` as `u128`; `None` on overflow.
pub fn factorial(n: usize) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
}

/// Fills `out[i] = Σ_{j>i} L·M[p(i)][p(j)]`, the scaled tail sums of each row.
#[inline]
pub(crate) fn tail_sums(num: &[i64], n: usize, p: &[usize], out: &mut [i64]) {
    for i in 0..n {
        let row = &num[p[i] * n..p[i] * n + n];
        let mut s = 0i64;
        for &pj in &p[i + 1..] {
            s += row[pj];
        }
        out[i] = s;
    }
}
