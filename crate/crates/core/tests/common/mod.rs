//! Shared oracles and golden-table helpers for the integration tests.
//!
//! Everything here is independent of the code paths it is used to check:
//! the weight oracle works in exact rational arithmetic, the scheme oracle
//! assembles the full (non-rearranged) discrete equations densely.

#![allow(dead_code)]

pub mod tables;

use std::sync::Arc;

use fkac::harness::{self, Axis, RateTable, TauRule};
use fkac::problems::ProblemFamily;
use fkac::solver::{Potential, ProblemSpec};
use fkac::{Complex64, SchemeOrder};
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use tables::{GoldenTable, ALPHAS};

/// `12·W_q(ζ)` with integer coefficients.
fn scaled_bdf(q: usize) -> Vec<i64> {
    match q {
        1 => vec![12, -12],
        2 => vec![18, -24, 6],
        3 => vec![22, -36, 18, -4],
        4 => vec![25, -48, 36, -16, 3],
        _ => panic!("q out of range"),
    }
}

/// Precomputed powers `Y^m` (truncated to degree `k_max`) where
/// `W_q/w_0 = 1 + Y/s0`.
pub struct SeriesOracle {
    q: usize,
    k_max: usize,
    s0: BigInt,
    powers: Vec<Vec<BigInt>>,
}

impl SeriesOracle {
    pub fn new(q: usize, k_max: usize) -> Self {
        let s = scaled_bdf(q);
        let y: Vec<BigInt> = s
            .iter()
            .enumerate()
            .map(|(j, &c)| if j == 0 { BigInt::zero() } else { BigInt::from(c) })
            .collect();
        let mut powers = Vec::with_capacity(k_max + 1);
        let mut current = vec![BigInt::zero(); k_max + 1];
        current[0] = BigInt::one();
        powers.push(current.clone());
        for _ in 1..=k_max {
            let mut next = vec![BigInt::zero(); k_max + 1];
            for (i, a) in current.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in y.iter().enumerate() {
                    if i + j > k_max {
                        break;
                    }
                    if !b.is_zero() {
                        next[i + j] += a * b;
                    }
                }
            }
            powers.push(next.clone());
            current = next;
        }
        SeriesOracle {
            q,
            k_max,
            s0: BigInt::from(s[0]),
            powers,
        }
    }

    /// Coefficients `l_0..l_{k_max}` of `W_q(ζ)^α` for `α = num/den`,
    /// exact up to the final conversion and the factor `w_0^α`.
    pub fn weights(&self, num: i64, den: i64) -> Vec<f64> {
        let k_max = self.k_max;
        let a = BigInt::from(num);
        let b = BigInt::from(den);
        // N_m = Π_{i<m} (a − i b),  C(α, m) = N_m / (b^m m!)
        let mut binom_num = Vec::with_capacity(k_max + 1);
        let mut acc = BigInt::one();
        binom_num.push(acc.clone());
        for i in 0..k_max {
            acc *= &a - BigInt::from(i as i64) * &b;
            binom_num.push(acc.clone());
        }
        // Per-m factor b^{K−m} (K!/m!) s0^{K−m} bringing each term to the
        // common denominator D = b^K K! s0^K.
        let mut lift = vec![BigInt::one(); k_max + 1];
        for m in (0..k_max).rev() {
            lift[m] = &lift[m + 1] * &b * BigInt::from((m + 1) as i64) * &self.s0;
        }
        let denom = &lift[0];

        let w0 = self.s0.to_f64().unwrap() / 12.0;
        let lead = w0.powf(num as f64 / den as f64);
        (0..=k_max)
            .map(|k| {
                let mut total = BigInt::zero();
                for m in 0..=k {
                    let c = &self.powers[m][k];
                    if c.is_zero() {
                        continue;
                    }
                    total += &binom_num[m] * c * &lift[m];
                }
                let exact = BigRational::new(total, denom.clone());
                exact.to_f64().unwrap() * lead
            })
            .collect()
    }

    pub fn order(&self) -> usize {
        self.q
    }
}

/// `|ours − published| ≤` half a unit in the published value's second significant digit.
pub fn agrees_to_two_digits(ours: f64, published: f64) -> bool {
    let unit = 10f64.powf(published.abs().log10().floor() - 1.0);
    (ours - published).abs() <= 0.5 * unit * (1.0 + 1e-9)
}

pub const RATE_TOL: f64 = 0.05;

pub fn family(example: u8) -> ProblemFamily {
    match example {
        1 => ProblemFamily::Example1,
        2 => ProblemFamily::Example2,
        _ => panic!("unknown example"),
    }
}

/// Re-runs the refinement behind a golden table.
pub fn reproduce(table: &GoldenTable) -> Vec<RateTable> {
    let fam = family(table.example);
    let order = SchemeOrder::new(table.q).unwrap();
    let steps: Vec<f64> = table.rows.iter().map(|r| 1.0 / r.inv_step as f64).collect();
    match table.axis {
        Axis::Temporal => harness::temporal_study(
            &fam,
            order,
            &ALPHAS,
            1.0 / table.fixed_inv_h as f64,
            &steps,
        ),
        Axis::Spatial => harness::spatial_study(
            &fam,
            order,
            &ALPHAS,
            &steps,
            TauRule { c: 1.0, p: table.tau_power },
        ),
        Axis::Coupled => harness::coupled_study(
            &fam,
            order,
            &ALPHAS,
            &steps,
            TauRule { c: 1.0, p: table.tau_power },
        ),
    }
    .unwrap()
}

/// Half a unit in the last printed digit of a published value.
pub fn printed_half_ulp(v: f64) -> f64 {
    let exponent = v.abs().log10().floor();
    for digits in 1..=8 {
        let unit = 10f64.powf(exponent - digits as f64 + 1.0);
        if ((v / unit).round() * unit - v).abs() <= 1e-9 * v.abs() {
            return 0.5 * unit;
        }
    }
    0.0
}

/// Range of rates compatible with two printed errors, given their rounding.
pub fn printed_rate_range(step0: f64, e0: f64, step1: f64, e1: f64) -> (f64, f64) {
    let (u0, u1) = (printed_half_ulp(e0), printed_half_ulp(e1));
    let span = (step0 / step1).ln();
    (
        ((e0 - u0) / (e1 + u1)).ln() / span,
        ((e0 + u0) / (e1 - u1)).ln() / span,
    )
}

/// Published error after applying any listed erratum.
pub fn published_error(golden: &GoldenTable, row: usize, a: usize) -> f64 {
    let gold = &golden.rows[row];
    tables::ERRATA
        .iter()
        .find(|e| e.table == golden.name && e.inv_step == gold.inv_step && e.alpha_index == a)
        .map_or(gold.errors[a], |e| e.corrected)
}

/// Mismatches between a reproduced table and the published one, as text.
///
/// Errors must agree to two significant digits. A rate must lie within
/// `RATE_TOL` of the printed rate, or, when the printed rate is itself the
/// rate of the two printed (rounded) errors, within `RATE_TOL` of the range
/// those rounded errors allow.
pub fn compare(golden: &GoldenTable, ours: &[RateTable]) -> Vec<String> {
    let mut problems = Vec::new();
    for (a, table) in ours.iter().enumerate() {
        for (i, (row, gold)) in table.rows.iter().zip(golden.rows).enumerate() {
            let published = published_error(golden, i, a);
            if !agrees_to_two_digits(row.error, published) {
                problems.push(format!(
                    "{} alpha={} 1/{}: error {:.4e} vs {:.4e}",
                    golden.name, ALPHAS[a], gold.inv_step, row.error, published
                ));
            }
            let (Some(r), Some(p)) = (row.rate, gold.rates[a]) else {
                continue;
            };
            let prev = published_error(golden, i - 1, a);
            let (lo, hi) = printed_rate_range(
                1.0 / golden.rows[i - 1].inv_step as f64,
                prev,
                1.0 / gold.inv_step as f64,
                published,
            );
            let from_rounded = lo <= p && p <= hi;
            let ok = (r - p).abs() <= RATE_TOL
                || (from_rounded && lo - RATE_TOL <= r && r <= hi + RATE_TOL);
            if !ok {
                problems.push(format!(
                    "{} alpha={} 1/{}: rate {:.4} vs {:.4}",
                    golden.name, ALPHAS[a], gold.inv_step, r, p
                ));
            }
        }
    }
    problems
}

/// Advances the scheme by assembling, at every level, the full discrete
/// equations (both sums running to `k = n`, nothing cancelled or
/// rearranged) as a dense system in the interior unknowns.
pub fn dense_reference(problem: &ProblemSpec, q: SchemeOrder, m: usize, n_steps: usize) -> Vec<Vec<Complex64>> {
    let h = problem.length / m as f64;
    let tau = problem.horizon / n_steps as f64;
    let x: Vec<f64> = (0..=m).map(|i| i as f64 * h).collect();
    let t: Vec<f64> = (0..=n_steps).map(|n| n as f64 * tau).collect();
    let l = fkac::conv_quad::fractional_power_weights(q, problem.alpha, n_steps)
        .unwrap()
        .weights()
        .to_vec();
    let d = |i: usize, k: usize| -> Complex64 {
        (-problem.rho * problem.potential.eval(x[i]) * (k as f64 * tau)).exp() * l[k]
    };
    let damp = |i: usize, s: usize| -> Complex64 {
        (-problem.rho * problem.potential.eval(x[i]) * (s as f64 * tau)).exp()
    };
    let compact = |g: &[Complex64], i: usize| (g[i - 1] + g[i] * 10.0 + g[i + 1]) / 12.0;
    let tau_alpha = tau.powf(problem.alpha);
    let mu = problem.k_alpha * tau_alpha / (h * h);

    let mut history: Vec<Vec<Complex64>> = vec![x.iter().map(|&xi| (problem.initial)(xi)).collect()];
    for n in 1..=n_steps {
        let left = (problem.left)(t[n]);
        let right = (problem.right)(t[n]);
        // Residual of the level-n equations for a trial level `p`.
        let residual = |p: &[Complex64]| -> Vec<Complex64> {
            let mut first = vec![Complex64::new(0.0, 0.0); m + 1];
            let mut init = vec![Complex64::new(0.0, 0.0); m + 1];
            let mut force = vec![Complex64::new(0.0, 0.0); m + 1];
            for j in 0..=m {
                for k in 0..=n {
                    let past = if k == 0 { p[j] } else { history[n - k][j] };
                    first[j] += d(j, k) * past;
                    init[j] += d(j, k) * damp(j, n - k) * history[0][j];
                }
                force[j] = (problem.forcing)(x[j], t[n]);
            }
            (1..m)
                .map(|i| {
                    compact(&first, i)
                        - compact(&init, i)
                        - (p[i + 1] - p[i] * 2.0 + p[i - 1]) * mu
                        - compact(&force, i) * tau_alpha
                })
                .collect()
        };
        let mut trial = vec![Complex64::new(0.0, 0.0); m + 1];
        trial[0] = left;
        trial[m] = right;
        let r0 = residual(&trial);
        let mut a = DMatrix::<Complex64>::zeros(m - 1, m - 1);
        for col in 0..m - 1 {
            trial[col + 1] = Complex64::new(1.0, 0.0);
            let r = residual(&trial);
            for row in 0..m - 1 {
                a[(row, col)] = r[row] - r0[row];
            }
            trial[col + 1] = Complex64::new(0.0, 0.0);
        }
        let b = DVector::from_iterator(m - 1, r0.iter().map(|z| -z));
        let sol = a.lu().solve(&b).expect("dense system is nonsingular");
        let mut level = vec![left];
        level.extend(sol.iter().copied());
        level.push(right);
        history.push(level);
    }
    history
}

/// A smooth problem with non-trivial data everywhere, parameterised by a
/// handful of random coefficients.
pub fn random_problem(alpha: f64, rho: Complex64, k_alpha: f64, coeffs: [f64; 6], potential: u8) -> ProblemSpec {
    let [c0, c1, c2, c3, c4, c5] = coeffs;
    let length = 0.5 + c0.abs();
    let potential = match potential % 3 {
        0 => Potential::One,
        1 => Potential::Identity,
        _ => Potential::Custom(Arc::new(|x: f64| x * x + 0.5)),
    };
    ProblemSpec {
        alpha,
        k_alpha,
        rho,
        potential,
        forcing: Arc::new(move |x, t| Complex64::new(c1 * (x + t).cos(), c2 * x * t)),
        initial: Arc::new(move |x| Complex64::new((c3 * x).sin() + c4, c5 * x)),
        left: Arc::new(move |t| Complex64::new((c3 * 0.0).sin() + c4 + t * c1, -t)),
        right: Arc::new(move |t| Complex64::new((c3 * length).sin() + c4, c5 * length + t * c2)),
        length,
        horizon: 0.5 + c5.abs(),
    }
}
