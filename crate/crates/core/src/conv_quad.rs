//! Convolution-quadrature weights for the fractional substantial derivative.
//!
//! The order-`q` weights `l_k` are the Taylor coefficients of `W_q(ζ)^α`,
//! where `W_q(ζ) = Σ_{j=1}^{q} (1 − ζ)^j / j` is the BDF-q generating
//! polynomial. For `q = 1` they are the Grünwald-Letnikov coefficients of
//! `(1 − ζ)^α`. The substantial weights at node `i` carry the additional
//! damping `d_{i,k} = e^{−ρ U_i k τ} l_k`, so that
//!
//! ```text
//! sD_t^α P(x_i, t_n) ≈ τ^{−α} Σ_{k=0}^{n} d_{i,k} P(x_i, t_{n−k})
//! ```
//!
//! with error `O(τ^q)` for sufficiently smooth data.

use std::fmt;

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Temporal order of the quadrature, one of 1, 2, 3, 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SchemeOrder(u8);

impl SchemeOrder {
    pub const FIRST: SchemeOrder = SchemeOrder(1);
    pub const ALL: [SchemeOrder; 4] = [
        SchemeOrder(1),
        SchemeOrder(2),
        SchemeOrder(3),
        SchemeOrder(4),
    ];

    pub fn new(q: usize) -> Result<Self> {
        match q {
            1..=4 => Ok(SchemeOrder(q as u8)),
            _ => Err(Error::InvalidOrder(q)),
        }
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for SchemeOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Coefficients `w_0..w_q` of `W_q(ζ) = Σ_{j=1}^{q} (1 − ζ)^j / j`.
///
/// The expansion is carried out in integers scaled by `lcm(1..4) = 12`, so
/// each returned value is the correctly rounded double of a rational.
pub fn bdf_generating_poly(q: SchemeOrder) -> Vec<f64> {
    const SCALE: i64 = 12;
    let q = q.get();
    let mut scaled = vec![0i64; q + 1];
    for j in 1..=q {
        // (1 − ζ)^j = Σ_m C(j, m) (−1)^m ζ^m
        let mut binom = 1i64;
        for (m, c) in scaled.iter_mut().enumerate().take(j + 1) {
            let sign = if m % 2 == 0 { 1 } else { -1 };
            *c += sign * binom * SCALE / j as i64;
            binom = binom * (j as i64 - m as i64) / (m as i64 + 1);
        }
    }
    scaled.into_iter().map(|c| c as f64 / SCALE as f64).collect()
}

/// The weights `l_0..l_K` for one `(q, α)` pair. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightTable {
    order: SchemeOrder,
    alpha: f64,
    weights: Vec<f64>,
}

impl WeightTable {
    pub fn order(&self) -> SchemeOrder {
        self.order
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn get(&self, k: usize) -> Option<f64> {
        self.weights.get(k).copied()
    }

    /// Running sums `Σ_{k=0}^{n−1} l_k` for `n = 0..=len`.
    pub fn prefix_sums(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.weights.len() + 1);
        let mut acc = 0.0;
        out.push(acc);
        for &w in &self.weights {
            acc += w;
            out.push(acc);
        }
        out
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

/// First `count + 1` Taylor coefficients of `W_q(ζ)^α`.
///
/// Differentiating `F = W^α` gives `F'·W = α·W'·F`; comparing the
/// coefficients of `ζ^{k−1}` yields
///
/// ```text
/// l_k = 1/(k w_0) · Σ_{j=1}^{min(k,q)} ((α + 1) j − k) w_j l_{k−j},   l_0 = w_0^α
/// ```
///
/// which costs `O(q)` per coefficient.
pub fn fractional_power_weights(q: SchemeOrder, alpha: f64, count: usize) -> Result<WeightTable> {
    check_alpha(alpha)?;
    if alpha == 1.0 {
        log::warn!("alpha = 1 is outside the fractional range; weights reduce to the BDF stencil");
    }
    let w = bdf_generating_poly(q);
    let mut l = Vec::with_capacity(count + 1);
    l.push(w[0].powf(alpha));
    for k in 1..=count {
        let kf = k as f64;
        let mut acc = 0.0;
        for j in 1..=k.min(q.get()) {
            acc += ((alpha + 1.0) * j as f64 - kf) * w[j] * l[k - j];
        }
        l.push(acc / (kf * w[0]));
    }
    Ok(WeightTable {
        order: q,
        alpha,
        weights: l,
    })
}

/// Refresh interval for the running product of exponential factors.
pub const DECAY_REFRESH: usize = 1024;

/// The damping `e^{−ρ U_i τ}` attached to one grid node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubstantialFactor {
    pub rho: Complex64,
    pub potential: f64,
    pub tau: f64,
}

impl SubstantialFactor {
    pub fn new(rho: Complex64, potential: f64, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::param("tau", format!("time step must be positive, got {tau}")));
        }
        if (rho * potential).re < 0.0 {
            log::warn!(
                "Re(rho·U) = {} < 0: exponential factors grow with k",
                (rho * potential).re
            );
        }
        Ok(SubstantialFactor { rho, potential, tau })
    }

    /// `e^{−ρ U k τ}` by direct evaluation.
    pub fn decay_pow(&self, k: usize) -> Complex64 {
        (-self.rho * self.potential * (k as f64 * self.tau)).exp()
    }

    /// Iterator over `e^{−ρ U k τ}` for `k = 0, 1, 2, ...`.
    ///
    /// Uses a running product, re-seeded from a direct exponential every
    /// [`DECAY_REFRESH`] steps.
    pub fn powers(&self) -> DecayPowers {
        DecayPowers {
            factor: *self,
            step: self.decay_pow(1),
            current: Complex64::new(1.0, 0.0),
            k: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DecayPowers {
    factor: SubstantialFactor,
    step: Complex64,
    current: Complex64,
    k: usize,
}

impl Iterator for DecayPowers {
    type Item = Complex64;

    fn next(&mut self) -> Option<Complex64> {
        let out = self.current;
        self.k += 1;
        self.current = if self.k % DECAY_REFRESH == 0 {
            self.factor.decay_pow(self.k)
        } else {
            self.current * self.step
        };
        Some(out)
    }
}

/// `d_k = e^{−ρ U k τ} l_k`.
pub fn substantial_weight(
    factor: &SubstantialFactor,
    table: &WeightTable,
    k: usize,
) -> Result<Complex64> {
    let l = table.get(k).ok_or(Error::IndexOutOfRange {
        index: k,
        len: table.len(),
    })?;
    Ok(factor.decay_pow(k) * l)
}

/// `τ^{−α} Σ_{k=0}^{n} d_k g_{n−k}` where `samples = [g_0, ..., g_n]` are
/// values on the uniform time grid `t_j = j τ`.
pub fn discrete_substantial_derivative(
    factor: &SubstantialFactor,
    table: &WeightTable,
    samples: &[Complex64],
) -> Result<Complex64> {
    let n = samples.len().checked_sub(1).ok_or(Error::param(
        "samples",
        "at least one time level is required",
    ))?;
    if table.len() <= n {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: table.len(),
        });
    }
    let sum: Complex64 = factor
        .powers()
        .zip(table.weights())
        .zip(samples.iter().rev())
        .map(|((e, &l), &g)| e * l * g)
        .sum();
    Ok(sum / factor.tau.powf(table.alpha()))
}

/// Closed form `sD_t^α [e^{−ρUt} t^σ] = e^{−ρUt} Γ(σ+1)/Γ(σ+1−α) t^{σ−α}`.
pub fn substantial_derivative_oracle(
    alpha: f64,
    rho: Complex64,
    potential: f64,
    sigma: f64,
    t: f64,
) -> Result<Complex64> {
    check_alpha(alpha)?;
    if sigma <= alpha - 1.0 {
        return Err(Error::param(
            "sigma",
            format!("sigma must exceed alpha - 1 = {}, got {sigma}", alpha - 1.0),
        ));
    }
    if !(t > 0.0) {
        return Err(Error::param("t", format!("time must be positive, got {t}")));
    }
    let scale = gamma(sigma + 1.0) / gamma(sigma + 1.0 - alpha) * t.powf(sigma - alpha);
    Ok((-rho * potential * t).exp() * scale)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub passed: bool,
    /// First offending index (`k` or `n`) when the check failed.
    pub first_violation: Option<usize>,
}

/// Outcome of [`verify_weight_properties`].
#[derive(Clone, Debug, PartialEq)]
pub struct WeightReport {
    pub alpha: f64,
    pub n_max: usize,
    /// Set when `α = 1`, outside the fractional range the bounds are stated for.
    pub alpha_at_boundary: bool,
    pub checks: Vec<PropertyCheck>,
}

impl WeightReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Checks the first-order weight properties up to `n_max`:
///
/// * `l_0 = 1`,
/// * `l_k < 0` for `1 ≤ k ≤ n_max`,
/// * `1/(n^α Γ(1−α)) < Σ_{k=0}^{n−1} l_k ≤ 1/n^α` for `1 ≤ n ≤ n_max`.
///
/// Unmet preconditions (order other than 1, or a table shorter than
/// `n_max + 1`) are reported as a failed `precondition` check.
pub fn verify_weight_properties(table: &WeightTable, n_max: usize) -> WeightReport {
    let mut checks = Vec::new();
    let alpha = table.alpha();
    let precondition_ok = table.order() == SchemeOrder::FIRST && table.len() > n_max;
    checks.push(PropertyCheck {
        name: "precondition",
        passed: precondition_ok,
        first_violation: None,
    });
    if precondition_ok {
        let l = table.weights();
        checks.push(PropertyCheck {
            name: "leading weight equals one",
            passed: l[0] == 1.0,
            first_violation: (l[0] != 1.0).then_some(0),
        });

        let neg = (1..=n_max).find(|&k| !(l[k] < 0.0));
        checks.push(PropertyCheck {
            name: "tail weights negative",
            passed: neg.is_none(),
            first_violation: neg,
        });

        let inv_gamma = 1.0 / gamma(1.0 - alpha);
        let mut sum = 0.0;
        let mut bad = None;
        for n in 1..=n_max {
            sum += l[n - 1];
            let upper = (n as f64).powf(-alpha);
            let lower = upper * inv_gamma;
            if !(lower < sum && sum <= upper) {
                bad = Some(n);
                break;
            }
        }
        checks.push(PropertyCheck {
            name: "partial sums bounded",
            passed: bad.is_none(),
            first_violation: bad,
        });
    }
    WeightReport {
        alpha,
        n_max,
        alpha_at_boundary: alpha == 1.0,
        checks,
    }
}
