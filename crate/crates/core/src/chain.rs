//! One step of the move-random-to-end chain and the pair `(W, W′)` it induces.
//!
//! A step picks a position `I` uniformly in `1..=n`, removes `π(I)` and appends
//! it at the end of the one-line form. In cycle notation this is
//! `π′ = (I, I+1, …, n)·π` with permutations multiplied left to right, i.e.
//! `π′(j) = π(c(j))` where `c` sends `I → I+1 → … → n → I`. The two
//! descriptions agree; the operational one is used throughout.
//!
//! Only the entries to the right of `I` change their order relative to
//! `π(I)`, so `X(π′) − X(π) = −2·Σ_{j>I} M[π(I)][π(j)]`.

use serde::{Deserialize, Serialize};

use crate::enumerate;
use crate::moments::variance_formula;
use crate::rational::{self, Rational};
use crate::rng::Stream;
use crate::statistic::{scaled_x, StatisticSpec};
use crate::{Error, Limits, Permutation, Result};

pub fn move_to_end(p: &Permutation, i: usize) -> Result<Permutation> {
    check_position(p.n(), i)?;
    let mut image = p.zero_based().to_vec();
    let moved = image.remove(i - 1);
    image.push(moved);
    Ok(Permutation::from_zero_based(image))
}

fn check_position(n: usize, i: usize) -> Result<()> {
    if i == 0 || i > n {
        return Err(Error::PositionOutOfRange { position: i, n });
    }
    Ok(())
}

/// Scaled tail sum `L·Σ_{j>i} M[p(i)][p(j)]` for 0-based `i0`.
fn scaled_tail(spec: &StatisticSpec, p: &[usize], i0: usize) -> i64 {
    let m = spec.matrix();
    p[i0 + 1..].iter().map(|&pj| m.scaled(p[i0], pj)).sum()
}

/// `X(move_to_end(p, i)) − X(p)`.
pub fn x_delta(spec: &StatisticSpec, p: &Permutation, i: usize) -> Result<Rational> {
    spec.check_dim(p)?;
    check_position(p.n(), i)?;
    let tail = scaled_tail(spec, p.zero_based(), i - 1);
    Ok(spec.matrix().unscale(-2 * i128::from(tail), 1))
}

/// `E[X′ − X | π] = (1/n)·Σ_i x_delta(p, i)`.
pub fn conditional_drift(spec: &StatisticSpec, p: &Permutation) -> Result<Rational> {
    spec.check_dim(p)?;
    let n = p.n();
    let total: i128 = (0..n)
        .map(|i0| -2 * i128::from(scaled_tail(spec, p.zero_based(), i0)))
        .sum();
    Ok(spec.matrix().unscale(total, 1) / rational::int(n as i64))
}

/// `E[(X′ − X)² | π] = (4/n)·Σ_i (Σ_{j>i} M[π(i)][π(j)])²`, on the unnormalized scale.
pub fn cond_exp_sq(spec: &StatisticSpec, p: &Permutation) -> Result<Rational> {
    spec.check_dim(p)?;
    let n = p.n();
    let total: i128 = (0..n)
        .map(|i0| {
            let t = i128::from(scaled_tail(spec, p.zero_based(), i0));
            t * t
        })
        .sum();
    Ok(spec.matrix().unscale(4 * total, 2) / rational::int(n as i64))
}

/// One draw of `(π, I)` and the induced pair, on both scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSample {
    pub permutation: Permutation,
    pub position: usize,
    #[serde(with = "rational::serde_str")]
    pub x: Rational,
    #[serde(with = "rational::serde_str")]
    pub x_prime: Rational,
    pub w: f64,
    pub w_prime: f64,
}

/// Positive standard deviation of `X`, or [`Error::ZeroVariance`].
pub(crate) fn sigma(spec: &StatisticSpec) -> Result<(Rational, f64)> {
    let var = variance_formula(spec.matrix()).variance;
    let s = rational::to_f64(&var).sqrt();
    if s.is_nan() || s <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((var, s))
}

/// Draws `π` by Fisher–Yates and then `I`, both from `stream`.
pub fn sample_pair(spec: &StatisticSpec, stream: &mut Stream) -> Result<PairSample> {
    let (_, sd) = sigma(spec)?;
    Ok(draw(spec, sd, stream))
}

/// `count` consecutive samples from one stream seeded with `seed`.
pub fn sample_pairs(spec: &StatisticSpec, count: usize, seed: u64) -> Result<Vec<PairSample>> {
    let (_, sd) = sigma(spec)?;
    let mut stream = Stream::new(seed);
    Ok((0..count).map(|_| draw(spec, sd, &mut stream)).collect())
}

fn draw(spec: &StatisticSpec, sd: f64, stream: &mut Stream) -> PairSample {
    let n = spec.n();
    let p = stream.permutation(n);
    let position = stream.below(n as u64) as usize + 1;
    let m = spec.matrix();
    let x_scaled = scaled_x(m, p.zero_based());
    let delta = -2 * scaled_tail(spec, p.zero_based(), position - 1);
    let x = m.unscale(i128::from(x_scaled), 1);
    let x_prime = m.unscale(i128::from(x_scaled + delta), 1);
    let w = rational::to_f64(&x) / sd;
    let w_prime = rational::to_f64(&x_prime) / sd;
    PairSample {
        permutation: p,
        position,
        x,
        x_prime,
        w,
        w_prime,
    }
}

/// Whether one chain step never changes the descent count by more than one,
/// checked over all of `S_n × {1..n}`.
pub fn unit_step_check(n: usize, limits: &Limits) -> Result<bool> {
    limits.check_enumeration(n)?;
    let ok = enumerate::fold(
        n,
        || true,
        |ok, p| {
            if !*ok {
                return;
            }
            let before = descents_of(p);
            let mut q = Vec::with_capacity(p.len());
            for i in 0..p.len() {
                q.clear();
                q.extend_from_slice(&p[..i]);
                q.extend_from_slice(&p[i + 1..]);
                q.push(p[i]);
                if descents_of(&q).abs_diff(before) > 1 {
                    *ok = false;
                    return;
                }
            }
        },
        |a, b| a && b,
    );
    Ok(ok)
}

fn descents_of(p: &[usize]) -> usize {
    p.windows(2).filter(|w| w[0] > w[1]).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::AntisymmetricMatrix;
    use crate::rational::{int, ratio};
    use num_traits::Signed;

    fn p(v: &[usize]) -> Permutation {
        Permutation::from_one_line(v).unwrap()
    }

    fn worked() -> Permutation {
        p(&[6, 4, 1, 5, 3, 2, 7])
    }

    #[test]
    fn move_to_end_examples() {
        assert_eq!(move_to_end(&worked(), 3).unwrap(), p(&[6, 4, 5, 3, 2, 7, 1]));
        assert_eq!(move_to_end(&worked(), 7).unwrap(), worked());
        assert_eq!(move_to_end(&p(&[1, 2, 3]), 1).unwrap(), p(&[2, 3, 1]));
        assert!(matches!(
            move_to_end(&worked(), 0),
            Err(Error::PositionOutOfRange { position: 0, n: 7 })
        ));
        assert!(move_to_end(&worked(), 8).is_err());
    }

    #[test]
    fn move_to_end_is_left_to_right_cycle_product() {
        for n in 1..=6 {
            for pi in Permutation::all(n) {
                for i in 1..=n {
                    // c: i -> i+1 -> ... -> n -> i, and pi' = c·pi applied left to right
                    let c = |j: usize| if j < i { j } else if j < n { j + 1 } else { i };
                    let expected: Vec<usize> = (1..=n).map(|j| pi.value(c(j))).collect();
                    assert_eq!(move_to_end(&pi, i).unwrap().one_line(), expected);
                }
            }
        }
    }

    #[test]
    fn x_delta_examples() {
        let inv = StatisticSpec::inversions(7);
        let des = StatisticSpec::descents(7);
        assert_eq!(x_delta(&inv, &worked(), 3).unwrap(), int(8));
        assert_eq!(x_delta(&des, &worked(), 3).unwrap(), int(2));
        assert_eq!(x_delta(&inv, &worked(), 7).unwrap(), int(0));
        assert!(x_delta(&inv, &worked(), 9).is_err());
    }

    #[test]
    fn drift_examples() {
        assert_eq!(
            conditional_drift(&StatisticSpec::inversions(7), &worked()).unwrap(),
            ratio(-2, 7)
        );
        assert_eq!(conditional_drift(&StatisticSpec::descents(7), &worked()).unwrap(), int(0));
    }

    #[test]
    fn cond_exp_sq_examples() {
        assert_eq!(
            cond_exp_sq(&StatisticSpec::descents(7), &Permutation::identity(7)).unwrap(),
            ratio(24, 7)
        );
        assert_eq!(
            cond_exp_sq(&StatisticSpec::inversions(3), &Permutation::identity(3)).unwrap(),
            ratio(20, 3)
        );
        let zero = StatisticSpec::custom(AntisymmetricMatrix::zero(5));
        assert_eq!(cond_exp_sq(&zero, &p(&[2, 5, 1, 4, 3])).unwrap(), int(0));
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = StatisticSpec::descents(7);
        let a = sample_pair(&spec, &mut Stream::new(5)).unwrap();
        let b = sample_pair(&spec, &mut Stream::new(5)).unwrap();
        assert_eq!(a, b);
        let jump = (&a.x_prime - &a.x).abs();
        assert!(jump == int(0) || jump == int(2));
        let sd = (8.0f64 / 3.0).sqrt();
        assert!((a.w - rational::to_f64(&a.x) / sd).abs() < 1e-15);
        assert_eq!(move_to_end(&a.permutation, a.position).map(|q| spec.x_stat(&q).unwrap()).unwrap(), a.x_prime);
    }

    #[test]
    fn zero_variance_is_rejected() {
        let zero = StatisticSpec::custom(AntisymmetricMatrix::zero(4));
        assert!(matches!(sample_pair(&zero, &mut Stream::new(0)), Err(Error::ZeroVariance)));
        // n = 1 has a single permutation
        assert!(matches!(sample_pairs(&StatisticSpec::descents(1), 3, 0), Err(Error::ZeroVariance)));
    }

    #[test]
    fn unit_steps_for_descents() {
        let lim = Limits::default();
        for n in [1, 2, 5, 7] {
            assert!(unit_step_check(n, &lim).unwrap());
        }
        assert!(unit_step_check(11, &lim).is_err());
    }
}
