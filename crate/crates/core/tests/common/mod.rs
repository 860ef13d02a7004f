//! Reference implementations used by the integration tests. They work from
//! definitions only and share no code paths with the library kernels.

#![allow(dead_code)]

use num_traits::Zero;
use steinperm::matrix::AntisymmetricMatrix;
use steinperm::rng::Stream;
use steinperm::Rational;

/// All permutations of `1..=n` in one-line form (Heap's algorithm).
pub fn all_perms(n: usize) -> Vec<Vec<usize>> {
    let mut a: Vec<usize> = (1..=n).collect();
    let mut out = vec![a.clone()];
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// `Σ_{i<j} M[π(i)][π(j)]` straight from the entries.
pub fn x_of(m: &AntisymmetricMatrix, line: &[usize]) -> Rational {
    let mut s = Rational::zero();
    for i in 0..line.len() {
        for j in i + 1..line.len() {
            s += m.entry(line[i], line[j]);
        }
    }
    s
}

/// Removes the entry at 1-based position `i` and appends it.
pub fn moved(line: &[usize], i: usize) -> Vec<usize> {
    let mut v: Vec<usize> = line.to_vec();
    let x = v.remove(i - 1);
    v.push(x);
    v
}

pub fn descents(line: &[usize]) -> usize {
    line.windows(2).filter(|w| w[0] > w[1]).count()
}

pub fn inversions(line: &[usize]) -> usize {
    let mut c = 0;
    for i in 0..line.len() {
        for j in i + 1..line.len() {
            if line[i] > line[j] {
                c += 1;
            }
        }
    }
    c
}

pub fn inverse(line: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; line.len()];
    for (i, &v) in line.iter().enumerate() {
        inv[v - 1] = i + 1;
    }
    inv
}

/// Histogram of `f` over `S_n`, indexed by value.
pub fn histogram(n: usize, f: impl Fn(&[usize]) -> usize) -> Vec<u64> {
    let mut h = Vec::new();
    for p in all_perms(n) {
        let v = f(&p);
        if h.len() <= v {
            h.resize(v + 1, 0);
        }
        h[v] += 1;
    }
    h
}

/// Five integer matrices from a fixed seed, one per call index.
pub fn random_matrices(n: usize) -> Vec<AntisymmetricMatrix> {
    let mut s = Stream::new(0x5eed_0000 + n as u64);
    (0..5).map(|_| AntisymmetricMatrix::random_integer(n, 5, &mut s)).collect()
}

pub fn n_factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Upper tail `1 − Φ(x)` for `x > 0` by the Laplace continued fraction.
fn upper_tail_cf(x: f64) -> f64 {
    let mut t = 0.0;
    for k in (1..=300).rev() {
        t = k as f64 / (x + t);
    }
    density(x) / (x + t)
}

/// `Φ(x)` from the series `½ + φ(x)·Σ x^{2k+1}/(2k+1)!!` near the centre
/// and the continued fraction in the tails.
pub fn normal_cdf_oracle(x: f64) -> f64 {
    let a = x.abs();
    if a > 7.0 {
        let q = upper_tail_cf(a);
        return if x > 0.0 { 1.0 - q } else { q };
    }
    let mut term = a;
    let mut sum = a;
    let mut k = 1.0;
    while term > sum * 1e-18 {
        k += 2.0;
        term *= a * a / k;
        sum += term;
    }
    let half = density(a) * sum;
    if x >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

/// Values from a 40-digit evaluation.
pub const NORMAL_CDF_REFERENCE: [(f64, f64); 11] = [
    (-8.5, 9.479_534_822_203_318e-18),
    (-5.0, 2.866_515_718_791_939e-7),
    (-3.25, 5.770_250_423_907_671e-4),
    (-1.0, 0.158_655_253_931_457_05),
    (-0.5, 0.308_537_538_725_986_9),
    (0.0, 0.5),
    (0.3, 0.617_911_422_188_952_6),
    (1.96, 0.975_002_104_851_779_6),
    (2.5, 0.993_790_334_674_224),
    (4.0, 0.999_968_328_758_166_9),
    (7.75, 0.999_999_999_999_995_4),
];

fn just_below(x: f64) -> f64 {
    if x == 0.0 {
        -f64::from_bits(1)
    } else if x > 0.0 {
        f64::from_bits(x.to_bits() - 1)
    } else {
        f64::from_bits(x.to_bits() + 1)
    }
}

/// `sup_x |F(x) − Φ(x)|` by scanning a uniform grid together with every
/// atom and the float just below it.
pub fn kolmogorov_grid_scan(atoms: &[f64], probs: &[f64], grid: usize) -> f64 {
    let lo = atoms.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
    let hi = atoms.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1.0;
    let mut points: Vec<f64> = (0..=grid).map(|k| lo + (hi - lo) * k as f64 / grid as f64).collect();
    for &a in atoms {
        points.push(a);
        points.push(just_below(a));
    }
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut best: f64 = 0.0;
    for x in points {
        let f: f64 = atoms.iter().zip(probs).filter(|(a, _)| **a <= x).map(|(_, p)| p).sum();
        best = best.max((f - normal_cdf_oracle(x)).abs());
    }
    best
}
