//! The compact convolution-quadrature scheme.
//!
//! At every level `n ≥ 1` the interior unknowns `P_i^n` satisfy
//!
//! ```text
//! ℋ_h(l_0 P^n)_i − μ (P_{i+1}^n − 2P_i^n + P_{i−1}^n)
//!     = Σ_{k=0}^{n−1} ℋ_h(d_k e^{−ρU(n−k)τ} P^0)_i
//!     − Σ_{k=1}^{n−1} ℋ_h(d_k P^{n−k})_i
//!     + τ^α ℋ_h(f^n)_i,                      μ = K_α τ^α / h²
//! ```
//!
//! The left-hand side does not depend on `n`, so it is factored once per
//! run. Since `d_{j,k} e^{−ρU_j(n−k)τ} = l_k e^{−ρU_j nτ}`, the first sum
//! collapses to `(Σ_{k<n} l_k) e^{−ρU_j nτ} P_j^0` and only the history sum
//! costs `O(n·M)` per step.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::conv_quad::{fractional_power_weights, SchemeOrder, SubstantialFactor, WeightTable};
use crate::error::{Error, Result};
use crate::mesh::{compact_stencil, Grid1D, GridFn, TimeGrid};
use crate::tridiag::{ThomasFactor, Tridiagonal};

pub type SpaceFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
pub type TimeFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

const COMPATIBILITY_TOL: f64 = 1e-12;

#[derive(Clone)]
pub enum Potential {
    /// `U(x) = 1`.
    One,
    /// `U(x) = x`.
    Identity,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Potential {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Potential::One => 1.0,
            Potential::Identity => x,
            Potential::Custom(u) => u(x),
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Potential::One)
    }
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::One => f.write_str("One"),
            Potential::Identity => f.write_str("Identity"),
            Potential::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Coefficients and data of one initial-boundary value problem on `(0, l) × (0, T]`.
#[derive(Clone)]
pub struct ProblemSpec {
    pub alpha: f64,
    pub k_alpha: f64,
    pub rho: Complex64,
    pub potential: Potential,
    pub forcing: SpaceTimeFn,
    pub initial: SpaceFn,
    pub left: TimeFn,
    pub right: TimeFn,
    pub length: f64,
    pub horizon: f64,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("alpha", &self.alpha)
            .field("k_alpha", &self.k_alpha)
            .field("rho", &self.rho)
            .field("potential", &self.potential)
            .field("length", &self.length)
            .field("horizon", &self.horizon)
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    /// Checks the scalar coefficients. Incompatible initial and boundary
    /// data only produce a warning.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::AlphaOutOfRange(self.alpha));
        }
        if !(self.k_alpha > 0.0 && self.k_alpha.is_finite()) {
            return Err(Error::param("K_alpha", format!("must be positive, got {}", self.k_alpha)));
        }
        if !(self.rho.re > 0.0) || !self.rho.is_finite() {
            return Err(Error::param("rho", format!("real part must be positive, got {}", self.rho)));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::param("length", format!("must be positive, got {}", self.length)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::param("T", format!("must be positive, got {}", self.horizon)));
        }
        let left_gap = ((self.initial)(0.0) - (self.left)(0.0)).norm();
        let right_gap = ((self.initial)(self.length) - (self.right)(0.0)).norm();
        if left_gap > COMPATIBILITY_TOL || right_gap > COMPATIBILITY_TOL {
            log::warn!(
                "initial and boundary data disagree at t = 0 (gaps {left_gap:e}, {right_gap:e})"
            );
        }
        Ok(())
    }
}

/// Precomputed coefficients for one `(problem, q, M, N)` configuration.
pub struct Scheme<'a> {
    problem: &'a ProblemSpec,
    order: SchemeOrder,
    grid: Grid1D,
    time: TimeGrid,
    weights: WeightTable,
    /// `Σ_{k<n} l_k` for `n = 0..=N`.
    prefix: Vec<f64>,
    mu: f64,
    tau_alpha: f64,
    /// `decay[k][j] = e^{−ρ U_j k τ}`.
    decay: Vec<Vec<Complex64>>,
    /// `damped[k][j] = d_{j,k} = l_k e^{−ρ U_j k τ}`.
    damped: Vec<Vec<Complex64>>,
}

impl<'a> Scheme<'a> {
    pub fn new(problem: &'a ProblemSpec, order: SchemeOrder, m: usize, n: usize) -> Result<Self> {
        problem.validate()?;
        let grid = Grid1D::new(problem.length, m)?;
        let time = TimeGrid::new(problem.horizon, n)?;
        let weights = fractional_power_weights(order, problem.alpha, n)?;
        let tau = time.tau();

        let mut columns = Vec::with_capacity(m + 1);
        for x in grid.nodes() {
            let u = problem.potential.eval(x);
            if !(u >= 0.0) {
                return Err(Error::param("U", format!("potential must be non-negative, U({x}) = {u}")));
            }
            let factor = SubstantialFactor::new(problem.rho, u, tau)?;
            columns.push(factor.powers().take(n + 1).collect::<Vec<_>>());
        }
        let decay: Vec<Vec<Complex64>> = (0..=n)
            .map(|k| columns.iter().map(|col| col[k]).collect())
            .collect();
        let damped = decay
            .iter()
            .zip(weights.weights())
            .map(|(row, &l)| row.iter().map(|e| e * l).collect())
            .collect();

        let tau_alpha = tau.powf(problem.alpha);
        Ok(Scheme {
            problem,
            order,
            grid,
            time,
            prefix: weights.prefix_sums(),
            weights,
            mu: problem.k_alpha * tau_alpha / (grid.h() * grid.h()),
            tau_alpha,
            decay,
            damped,
        })
    }

    pub fn order(&self) -> SchemeOrder {
        self.order
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.time
    }

    pub fn weights(&self) -> &WeightTable {
        &self.weights
    }

    /// `μ = K_α τ^α / h²`.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// The constant interior matrix: `l_0/12 − μ` off the diagonal,
    /// `10 l_0/12 + 2μ` on it.
    pub fn assemble_lhs(&self) -> Tridiagonal {
        let l0 = self.weights.weights()[0];
        let off = Complex64::new(l0 / 12.0 - self.mu, 0.0);
        let diag = Complex64::new(10.0 * l0 / 12.0 + 2.0 * self.mu, 0.0);
        Tridiagonal::constant(self.grid.intervals() - 1, off, diag, off)
    }

    pub fn initial_level(&self) -> GridFn {
        GridFn::from_fn(&self.grid, |x| (self.problem.initial)(x))
    }

    pub fn boundary_values(&self, n: usize) -> (Complex64, Complex64) {
        let t = self.time.time(n);
        ((self.problem.left)(t), (self.problem.right)(t))
    }

    /// Right-hand side for level `n`, interior rows only, including the
    /// lift of the known boundary values `P_0^n` and `P_M^n`.
    /// Requires `history[0..n]` (levels `0..=n−1`).
    pub fn assemble_rhs(&self, history: &[GridFn], n: usize) -> Result<Vec<Complex64>> {
        let mut scratch = Vec::new();
        let mut out = Vec::new();
        self.assemble_rhs_into(history, n, &mut scratch, &mut out)?;
        Ok(out)
    }

    fn assemble_rhs_into(
        &self,
        history: &[GridFn],
        n: usize,
        nodal: &mut Vec<Complex64>,
        out: &mut Vec<Complex64>,
    ) -> Result<()> {
        if n == 0 || n > self.time.steps() {
            return Err(Error::IndexOutOfRange {
                index: n,
                len: self.time.steps() + 1,
            });
        }
        if history.len() < n {
            return Err(Error::MissingHistory {
                needed: n - 1,
                available: history.len(),
            });
        }
        let m = self.grid.intervals();
        let t = self.time.time(n);

        // Node-wise quantity whose ℋ_h image is the right-hand side.
        let c_n = self.prefix[n];
        let p0 = history[0].values();
        let decay_n = &self.decay[n];
        nodal.clear();
        nodal.extend(self.grid.nodes().enumerate().map(|(j, x)| {
            decay_n[j] * p0[j] * c_n + (self.problem.forcing)(x, t) * self.tau_alpha
        }));
        for k in 1..n {
            let d = &self.damped[k];
            let past = history[n - k].values();
            for ((acc, dk), p) in nodal.iter_mut().zip(d).zip(past) {
                *acc -= dk * p;
            }
        }

        out.clear();
        out.extend((1..m).map(|i| compact_stencil(nodal[i - 1], nodal[i], nodal[i + 1])));

        let (left, right) = self.boundary_values(n);
        let off = self.weights.weights()[0] / 12.0 - self.mu;
        out[0] -= left * off;
        out[m - 2] -= right * off;
        Ok(())
    }
}

/// A completed run: every level `P^0..P^N` on all nodes.
#[derive(Clone, Debug)]
pub struct SolverRun {
    pub problem: ProblemSpec,
    pub order: SchemeOrder,
    pub grid: Grid1D,
    pub time: TimeGrid,
    pub weights: WeightTable,
    pub history: Vec<GridFn>,
    /// Number of LU factorizations performed (one per run).
    pub factorizations: usize,
}

impl SolverRun {
    pub fn final_level(&self) -> &GridFn {
        self.history.last().expect("history always holds the initial level")
    }
}

/// Marches the scheme from `t = 0` to `T` with `M` intervals and `N` steps.
pub fn march(problem: &ProblemSpec, order: SchemeOrder, m: usize, n: usize) -> Result<SolverRun> {
    let scheme = Scheme::new(problem, order, m, n)?;
    let factor = ThomasFactor::new(&scheme.assemble_lhs())?;
    let factorizations = 1;

    let mut history = Vec::with_capacity(n + 1);
    history.push(scheme.initial_level());
    let mut nodal = Vec::with_capacity(m + 1);
    let mut rhs = Vec::with_capacity(m - 1);
    for level in 1..=n {
        scheme.assemble_rhs_into(&history, level, &mut nodal, &mut rhs)?;
        factor.solve_in_place(&mut rhs)?;
        let (left, right) = scheme.boundary_values(level);
        let mut values = Vec::with_capacity(m + 1);
        values.push(left);
        values.extend_from_slice(&rhs);
        values.push(right);
        history.push(GridFn::from_values(values));
    }

    Ok(SolverRun {
        problem: problem.clone(),
        order,
        grid: scheme.grid,
        time: scheme.time,
        weights: scheme.weights,
        history,
        factorizations,
    })
}
