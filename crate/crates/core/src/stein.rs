//! Ingredients and values of two Stein-type bounds on `sup_x |P(W ≤ x) − Φ(x)|`
//! for the pair `(W, W′)`, where `E[W′ | W] = (1 − λ)W` with `λ = 2/n`.
//!
//! * Rinott–Rotar: `(12/λ)·√Var(E^W(W′−W)²) + 48·A³/λ + 8·A²/√λ`, with
//!   `|W′ − W| ≤ A`.
//! * Stein: `2·√E[1 − E^W(W′−W)²/(2λ)]² + (2π)^{−1/4}·√(E|W′−W|³/λ)`. Since
//!   `E(W′−W)² = 2λ`, the first term equals `2·√Var(E^W(W′−W)²/(2λ))`.
//!
//! `Var(E^W(·))` needs the level sets of `W`, which only exhaustive
//! enumeration provides. Otherwise both bounds use `Var(E^π(W′−W)²)`, which
//! dominates it by conditional Jensen; reports flag the substitution.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::sigma;
use crate::enumerate::{self, factorial, tail_sums};
use crate::rational::{self, Rational};
use crate::rng::Stream;
use crate::statistic::{StatisticKind, StatisticSpec};
use crate::sum::CompensatedSum;
use crate::{Error, Limits, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    #[serde(rename = "mc")]
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmaxMode {
    /// `(2/σ)·max_i max(Σ_j M[i][j]⁺, Σ_j M[i][j]⁻)`: the largest possible
    /// `|Σ_{j>I} M[π(I)][π(j)]|` over all arrangements.
    Analytic,
    /// `max |X′ − X| / σ` over all `(π, I)` by enumeration.
    ExactSmallN,
}

/// `|W′ − W| ≤ a_max`.
pub fn a_max(spec: &StatisticSpec, mode: AmaxMode, limits: &Limits) -> Result<f64> {
    let (_, sd) = sigma(spec)?;
    let m = spec.matrix();
    let n = spec.n();
    let scaled = match mode {
        AmaxMode::Analytic => (0..n)
            .map(|i| {
                let (pos, neg) = (0..n).fold((0i64, 0i64), |(p, q), j| {
                    let v = m.scaled(i, j);
                    (p + v.max(0), q + (-v).max(0))
                });
                pos.max(neg)
            })
            .max()
            .unwrap_or(0),
        AmaxMode::ExactSmallN => {
            limits.check_enumeration(n)?;
            let num = m.scaled_numerators();
            enumerate::fold(
                n,
                || (0i64, vec![0i64; n]),
                |(best, buf), p| {
                    tail_sums(num, n, p, buf);
                    *best = buf.iter().fold(*best, |b, t| b.max(t.abs()));
                },
                |a, b| (a.0.max(b.0), a.1),
            )
            .0
        }
    };
    Ok(2.0 * scaled as f64 / m.denominator() as f64 / sd)
}

/// Exact moments from full enumeration. `*_unnormalized` values are on the `X`
/// scale; the others are on the `W = X/σ` scale.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactMoments {
    #[serde(with = "rational::serde_str")]
    pub e_diff_sq_unnormalized: Rational,
    #[serde(with = "rational::serde_str")]
    pub e_diff_sq: Rational,
    #[serde(with = "rational::serde_str")]
    pub e_abs_diff_cubed_unnormalized: Rational,
    #[serde(with = "rational::serde_str")]
    pub var_cond_pi: Rational,
    #[serde(with = "rational::serde_str")]
    pub var_cond_w: Rational,
    #[serde(with = "rational::serde_str")]
    pub max_abs_diff_unnormalized: Rational,
}

impl ExactMoments {
    /// `E|Δ|³ ≥ (EΔ²)^{3/2}`, compared as `(E|Δ|³)² ≥ (EΔ²)³`.
    pub fn jensen_holds(&self) -> bool {
        let lhs = &self.e_abs_diff_cubed_unnormalized * &self.e_abs_diff_cubed_unnormalized;
        let d = &self.e_diff_sq_unnormalized;
        lhs >= d * d * d
    }

    /// `Var(E^W(W′−W)²) ≤ Var(E^π(W′−W)²)`.
    pub fn conditioning_holds(&self) -> bool {
        self.var_cond_w <= self.var_cond_pi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McStdErrors {
    pub e_diff_sq: f64,
    pub e_abs_diff_cubed: f64,
    pub var_cond_pi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundIngredients {
    pub statistic: StatisticKind,
    pub n: usize,
    pub mode: Mode,
    #[serde(with = "rational::serde_str")]
    pub lambda: Rational,
    /// `Var(X)`
    #[serde(with = "rational::serde_str")]
    pub variance: Rational,
    pub a_max: f64,
    /// `E(W′−W)²`
    pub e_diff_sq: f64,
    /// `E|W′−W|³`
    pub e_abs_diff_cubed: f64,
    /// `Var(E^π(W′−W)²)`
    pub var_cond_pi: f64,
    /// `Var(E^W(W′−W)²)`, exact mode only.
    pub var_cond_w: Option<f64>,
    pub exact: Option<ExactMoments>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub stderr: Option<McStdErrors>,
}

impl BoundIngredients {
    /// Copy with `var_cond_w` dropped, forcing the surrogate.
    pub fn with_surrogate(&self) -> Self {
        BoundIngredients {
            var_cond_w: None,
            ..self.clone()
        }
    }

    pub fn uses_surrogate(&self) -> bool {
        self.var_cond_w.is_none()
    }

    fn conditional_variance(&self) -> f64 {
        self.var_cond_w.unwrap_or(self.var_cond_pi)
    }

    fn lambda_f64(&self) -> f64 {
        rational::to_f64(&self.lambda)
    }

    fn validate(&self) -> Result<()> {
        let lambda = self.lambda_f64();
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidIngredients(format!("lambda = {lambda}")));
        }
        let named = [
            ("a_max", Some(self.a_max)),
            ("e_abs_diff_cubed", Some(self.e_abs_diff_cubed)),
            ("var_cond_pi", Some(self.var_cond_pi)),
            ("var_cond_w", self.var_cond_w),
        ];
        for (name, v) in named {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::InvalidIngredients(format!("{name} = {v}")));
                }
            }
        }
        Ok(())
    }
}

fn ensure_positive_variance(spec: &StatisticSpec) -> Result<(Rational, f64)> {
    sigma(spec)
}

pub fn ingredients_exact(spec: &StatisticSpec, limits: &Limits) -> Result<BoundIngredients> {
    let n = spec.n();
    limits.check_enumeration(n)?;
    let (variance, sd) = ensure_positive_variance(spec)?;
    let m = spec.matrix();
    let num = m.scaled_numerators();

    struct Acc {
        sum_q: i128,
        sum_q2: i128,
        sum_abs3: i128,
        max_abs: i64,
        // scaled X value -> (count, Σ q)
        groups: BTreeMap<i64, (u64, i128)>,
        overflow: bool,
        buf: Vec<i64>,
    }
    let acc = enumerate::fold(
        n,
        || Acc {
            sum_q: 0,
            sum_q2: 0,
            sum_abs3: 0,
            max_abs: 0,
            groups: BTreeMap::new(),
            overflow: false,
            buf: vec![0; n],
        },
        |acc, p| {
            tail_sums(num, n, p, &mut acc.buf);
            let mut x = 0i64;
            let mut q = 0i128;
            let mut abs3 = 0i128;
            for &t in &acc.buf {
                x += t;
                let t = i128::from(t);
                q += t * t;
                abs3 += (t * t).checked_mul(t.abs()).unwrap_or_else(|| {
                    acc.overflow = true;
                    0
                });
                acc.max_abs = acc.max_abs.max(t.abs() as i64);
            }
            let q2 = q.checked_mul(q);
            match (
                acc.sum_q.checked_add(q),
                q2.and_then(|v| acc.sum_q2.checked_add(v)),
                acc.sum_abs3.checked_add(abs3),
            ) {
                (Some(a), Some(b), Some(c)) => {
                    acc.sum_q = a;
                    acc.sum_q2 = b;
                    acc.sum_abs3 = c;
                }
                _ => acc.overflow = true,
            }
            let g = acc.groups.entry(x).or_insert((0, 0));
            g.0 += 1;
            g.1 += q;
        },
        |mut a, b| {
            let merged = (
                a.sum_q.checked_add(b.sum_q),
                a.sum_q2.checked_add(b.sum_q2),
                a.sum_abs3.checked_add(b.sum_abs3),
            );
            match merged {
                (Some(x), Some(y), Some(z)) => {
                    a.sum_q = x;
                    a.sum_q2 = y;
                    a.sum_abs3 = z;
                }
                _ => a.overflow = true,
            }
            a.overflow |= b.overflow;
            a.max_abs = a.max_abs.max(b.max_abs);
            for (k, (c, s)) in b.groups {
                let g = a.groups.entry(k).or_insert((0, 0));
                g.0 += c;
                g.1 += s;
            }
            a
        },
    );
    if acc.overflow {
        return Err(Error::Overflow("exact bound ingredients"));
    }

    let count = Rational::from_integer(factorial(n).ok_or(Error::Overflow("n!"))?.into());
    let n_r = rational::int(n as i64);
    // c(π) = E[(X′−X)² | π] = (4/n)·q(π)/L²
    let c_scale = rational::int(4) / &n_r * m.unscale(1, 2);
    let mean_q = rational::ratio(acc.sum_q, 1) / &count;
    let mean_c = &c_scale * &mean_q;
    let var_c = &c_scale * &c_scale * (rational::ratio(acc.sum_q2, 1) / &count - &mean_q * &mean_q);

    let mut between = Rational::zero();
    for &(c, s) in acc.groups.values() {
        let weight = Rational::from_integer(c.into()) / &count;
        let group_mean = &c_scale * rational::ratio(s, i128::from(c));
        between += weight * &group_mean * &group_mean;
    }
    let var_cw = between - &mean_c * &mean_c;

    let var2 = &variance * &variance;
    let e_abs3_unnorm = rational::int(8) * m.unscale(acc.sum_abs3, 3) / (&count * &n_r);
    let exact = ExactMoments {
        e_diff_sq: &mean_c / &variance,
        e_diff_sq_unnormalized: mean_c,
        e_abs_diff_cubed_unnormalized: e_abs3_unnorm.clone(),
        var_cond_pi: &var_c / &var2,
        var_cond_w: &var_cw / &var2,
        max_abs_diff_unnormalized: m.unscale(2 * i128::from(acc.max_abs), 1),
    };
    Ok(BoundIngredients {
        statistic: spec.kind(),
        n,
        mode: Mode::Exact,
        lambda: rational::ratio(2, n as i128),
        a_max: rational::to_f64(&exact.max_abs_diff_unnormalized) / sd,
        e_diff_sq: rational::to_f64(&exact.e_diff_sq),
        e_abs_diff_cubed: rational::to_f64(&e_abs3_unnorm) / (sd * sd * sd),
        var_cond_pi: rational::to_f64(&exact.var_cond_pi),
        var_cond_w: Some(rational::to_f64(&exact.var_cond_w)),
        variance,
        exact: Some(exact),
        trials: None,
        seed: None,
        stderr: None,
    })
}

/// Trials per deterministic Monte-Carlo partition.
pub const MC_PARTITION: u64 = 1 << 14;

#[derive(Default, Clone)]
struct McAcc {
    count: u64,
    d2: CompensatedSum,
    d4: CompensatedSum,
    d3: CompensatedSum,
    d6: CompensatedSum,
    // powers of y = c(π) − 4/n
    y1: CompensatedSum,
    y2: CompensatedSum,
    y3: CompensatedSum,
    y4: CompensatedSum,
}

impl McAcc {
    fn merge(&mut self, o: &McAcc) {
        self.count += o.count;
        for (a, b) in [
            (&mut self.d2, &o.d2),
            (&mut self.d4, &o.d4),
            (&mut self.d3, &o.d3),
            (&mut self.d6, &o.d6),
            (&mut self.y1, &o.y1),
            (&mut self.y2, &o.y2),
            (&mut self.y3, &o.y3),
            (&mut self.y4, &o.y4),
        ] {
            a.merge(b);
        }
    }
}

/// Sample mean and its standard error from sums of `v` and `v²`.
fn mean_and_se(sum: f64, sum_sq: f64, count: f64) -> (f64, f64) {
    let mean = sum / count;
    let var = ((sum_sq - count * mean * mean) / (count - 1.0)).max(0.0);
    (mean, (var / count).sqrt())
}

/// Monte-Carlo ingredients. Trial `t` belongs to partition `t / MC_PARTITION`,
/// which draws from [`Stream::partition`]`(seed, k)`; partitions are summed in
/// index order, so the result does not depend on the thread count.
pub fn ingredients_mc(spec: &StatisticSpec, trials: u64, seed: u64) -> Result<BoundIngredients> {
    if trials < 2 {
        return Err(Error::InvalidTrials(trials));
    }
    let (variance, sd) = ensure_positive_variance(spec)?;
    let n = spec.n();
    let m = spec.matrix();
    let num = m.scaled_numerators();
    let l = m.denominator() as f64;
    let var_f = rational::to_f64(&variance);
    let c_scale = 4.0 / (n as f64 * l * l * var_f);
    let centre = 4.0 / n as f64;

    let partitions = trials.div_ceil(MC_PARTITION);
    let parts: Vec<McAcc> = (0..partitions)
        .into_par_iter()
        .map(|k| {
            let len = MC_PARTITION.min(trials - k * MC_PARTITION);
            let mut stream = Stream::partition(seed, k);
            let mut perm = vec![0usize; n];
            let mut tails = vec![0i64; n];
            let mut acc = McAcc::default();
            for _ in 0..len {
                stream.shuffle_identity_into(&mut perm);
                let pos = stream.below(n as u64) as usize;
                tail_sums(num, n, &perm, &mut tails);
                let q: f64 = tails.iter().map(|&t| (t as f64) * (t as f64)).sum();
                let d = (-2.0 * tails[pos] as f64 / l / sd).abs();
                let d2 = d * d;
                let d3 = d2 * d;
                let y = c_scale * q - centre;
                let y2 = y * y;
                acc.count += 1;
                acc.d2.add(d2);
                acc.d4.add(d2 * d2);
                acc.d3.add(d3);
                acc.d6.add(d3 * d3);
                acc.y1.add(y);
                acc.y2.add(y2);
                acc.y3.add(y2 * y);
                acc.y4.add(y2 * y2);
            }
            acc
        })
        .collect();
    let mut total = McAcc::default();
    for p in &parts {
        total.merge(p);
    }

    let cnt = total.count as f64;
    let (e_diff_sq, se_d2) = mean_and_se(total.d2.value(), total.d4.value(), cnt);
    let (e_abs3, se_d3) = mean_and_se(total.d3.value(), total.d6.value(), cnt);
    let (m1, m2, m3, m4) = (
        total.y1.value() / cnt,
        total.y2.value() / cnt,
        total.y3.value() / cnt,
        total.y4.value() / cnt,
    );
    let central2 = (m2 - m1 * m1).max(0.0);
    let central4 = (m4 - 4.0 * m3 * m1 + 6.0 * m2 * m1 * m1 - 3.0 * m1.powi(4)).max(0.0);
    let var_cond_pi = central2 * cnt / (cnt - 1.0);
    let se_var = ((central4 - central2 * central2).max(0.0) / cnt).sqrt();

    Ok(BoundIngredients {
        statistic: spec.kind(),
        n,
        mode: Mode::MonteCarlo,
        lambda: rational::ratio(2, n as i128),
        variance,
        a_max: a_max(spec, AmaxMode::Analytic, &Limits::default())?,
        e_diff_sq,
        e_abs_diff_cubed: e_abs3,
        var_cond_pi,
        var_cond_w: None,
        exact: None,
        trials: Some(trials),
        seed: Some(seed),
        stderr: Some(McStdErrors {
            e_diff_sq: se_d2,
            e_abs_diff_cubed: se_d3,
            var_cond_pi: se_var,
        }),
    })
}

/// Rinott–Rotar bound value.
pub fn rr_bound(ing: &BoundIngredients) -> Result<f64> {
    ing.validate()?;
    let lambda = ing.lambda_f64();
    let a = ing.a_max;
    Ok(12.0 / lambda * ing.conditional_variance().sqrt()
        + 48.0 * a.powi(3) / lambda
        + 8.0 * a * a / lambda.sqrt())
}

/// `(2π)^{−1/4}`
const STEIN_CONST: f64 = 0.631_618_777_746_064_7;

/// Stein's bound value.
pub fn stein_original_bound(ing: &BoundIngredients) -> Result<f64> {
    ing.validate()?;
    let lambda = ing.lambda_f64();
    let first = 2.0 * ing.conditional_variance().sqrt() / (2.0 * lambda);
    let second = STEIN_CONST * (ing.e_abs_diff_cubed / lambda).sqrt();
    Ok(first + second)
}

/// Lower bound on the second term of Stein's bound implied by
/// `E|W′−W|³ ≥ (E(W′−W)²)^{3/2} = (4/n)^{3/2}`; of order `n^{−1/4}`.
pub fn stein_third_moment_floor(n: usize) -> f64 {
    let n = n as f64;
    STEIN_CONST * ((n / 2.0) * (4.0 / n).powf(1.5)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub rr_bound: f64,
    pub stein_bound: f64,
    /// `rr_bound·√n`
    pub rr_scaled: f64,
    /// `stein_bound·n^{1/4}`
    pub stein_scaled: f64,
    pub surrogate_used: bool,
}

impl BoundReport {
    pub fn evaluate(ing: &BoundIngredients) -> Result<Self> {
        let rr = rr_bound(ing)?;
        let st = stein_original_bound(ing)?;
        let n = ing.n as f64;
        Ok(BoundReport {
            rr_bound: rr,
            stein_bound: st,
            rr_scaled: rr * n.sqrt(),
            stein_scaled: st * n.powf(0.25),
            surrogate_used: ing.uses_surrogate(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub rr_bound: f64,
    pub stein_bound: f64,
    pub rr_scaled: f64,
    pub stein_scaled: f64,
    /// `Var(E^π(W′−W)²)·n³`
    pub var_cond_pi_n3: f64,
    pub surrogate_used: bool,
}

/// Bound values and their scaled versions across `n_list`.
pub fn scaling_table(
    kind: StatisticKind,
    n_list: &[usize],
    mode: Mode,
    trials: u64,
    seed: u64,
    limits: &Limits,
) -> Result<Vec<ScalingRow>> {
    n_list
        .iter()
        .map(|&n| {
            let spec = StatisticSpec::builtin(kind, n)?;
            let ing = match mode {
                Mode::Exact => ingredients_exact(&spec, limits)?,
                Mode::MonteCarlo => ingredients_mc(&spec, trials, seed)?,
            };
            let rep = BoundReport::evaluate(&ing)?;
            Ok(ScalingRow {
                n,
                rr_bound: rep.rr_bound,
                stein_bound: rep.stein_bound,
                rr_scaled: rep.rr_scaled,
                stein_scaled: rep.stein_scaled,
                var_cond_pi_n3: ing.var_cond_pi * (n as f64).powi(3),
                surrogate_used: rep.surrogate_used,
            })
        })
        .collect()
}
