//! Manufactured problems with closed-form solutions.
//!
//! The family used throughout is
//!
//! ```text
//! P(x, t) = e^{−ρ U(x) t} (t^{3+α} + 1) sin(π x / l)
//! ```
//!
//! for `U ≡ 1` or `U(x) = x`, with the forcing chosen so that `P` solves the
//! equation exactly. The initial-value part `e^{−ρUt} P(x,0)` is removed by
//! the Caputo correction, leaving `sD_t^α [e^{−ρUt} t^{3+α}] =
//! Γ(4+α)/Γ(4) e^{−ρUt} t³`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::conv_quad::check_alpha;
use crate::error::{Error, Result};
use crate::mesh::max_norm;
use crate::solver::{Potential, ProblemSpec, SolverRun, SpaceTimeFn};

#[derive(Clone)]
pub struct ManufacturedProblem {
    pub spec: ProblemSpec,
    pub exact: SpaceTimeFn,
}

impl fmt::Debug for ManufacturedProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManufacturedProblem")
            .field("spec", &self.spec)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialKind {
    One,
    Identity,
}

impl PotentialKind {
    fn to_potential(self) -> Potential {
        match self {
            PotentialKind::One => Potential::One,
            PotentialKind::Identity => Potential::Identity,
        }
    }
}

/// Parameters of the manufactured family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ManufacturedParams {
    pub alpha: f64,
    pub k_alpha: f64,
    pub rho: Complex64,
    pub potential: PotentialKind,
    pub length: f64,
    pub horizon: f64,
}

impl ManufacturedParams {
    /// Shared data of both worked examples: unit domain and horizon,
    /// `K_α = 0.5`, `ρ = 1 + i`.
    pub fn unit(alpha: f64, potential: PotentialKind) -> Self {
        ManufacturedParams {
            alpha,
            k_alpha: 0.5,
            rho: Complex64::new(1.0, 1.0),
            potential,
            length: 1.0,
            horizon: 1.0,
        }
    }
}

pub fn manufactured(params: ManufacturedParams) -> Result<ManufacturedProblem> {
    let ManufacturedParams {
        alpha,
        k_alpha,
        rho,
        potential,
        length,
        horizon,
    } = params;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let wave = PI / length;
    let caputo_scale = gamma(4.0 + alpha) / gamma(4.0);
    let u = potential.to_potential();

    let u_exact = u.clone();
    let exact: SpaceTimeFn = Arc::new(move |x, t| {
        (-rho * u_exact.eval(x) * t).exp() * ((t.powf(3.0 + alpha) + 1.0) * (wave * x).sin())
    });

    let u_force = u.clone();
    let forcing: SpaceTimeFn = Arc::new(move |x, t| {
        let e = (-rho * u_force.eval(x) * t).exp();
        let g = t.powf(3.0 + alpha) + 1.0;
        let (s, c) = (wave * x).sin_cos();
        let time_part = e * (caputo_scale * t.powi(3) * s);
        let laplacian = match potential {
            // P_xx = −(π/l)² P
            PotentialKind::One => e * (-wave * wave * g * s),
            // P_xx = g e^{−ρxt} (ρ²t² sin − 2(π/l)ρt cos − (π/l)² sin)
            PotentialKind::Identity => {
                e * g * (rho * rho * (t * t * s) - rho * (2.0 * wave * t * c) - wave * wave * s)
            }
        };
        time_part - laplacian * k_alpha
    });

    let zero = Complex64::new(0.0, 0.0);
    let spec = ProblemSpec {
        alpha,
        k_alpha,
        rho,
        potential: u,
        forcing,
        initial: Arc::new(move |x| Complex64::new((wave * x).sin(), 0.0)),
        left: Arc::new(move |_| zero),
        right: Arc::new(move |_| zero),
        length,
        horizon,
    };
    Ok(ManufacturedProblem { spec, exact })
}

/// `U ≡ 1`, exact solution `e^{−ρt}(t^{3+α}+1) sin(πx)`.
pub fn example1(alpha: f64) -> Result<ManufacturedProblem> {
    manufactured(ManufacturedParams::unit(alpha, PotentialKind::One))
}

/// `U(x) = x`, exact solution `e^{−ρxt}(t^{3+α}+1) sin(πx)`.
pub fn example2(alpha: f64) -> Result<ManufacturedProblem> {
    manufactured(ManufacturedParams::unit(alpha, PotentialKind::Identity))
}

/// Homogeneous data; the exact solution is identically zero.
pub fn zero_data(alpha: f64) -> Result<ManufacturedProblem> {
    check_alpha(alpha)?;
    let zero = Complex64::new(0.0, 0.0);
    let spec = ProblemSpec {
        alpha,
        k_alpha: 0.5,
        rho: Complex64::new(1.0, 1.0),
        potential: Potential::One,
        forcing: Arc::new(move |_, _| zero),
        initial: Arc::new(move |_| zero),
        left: Arc::new(move |_| zero),
        right: Arc::new(move |_| zero),
        length: 1.0,
        horizon: 1.0,
    };
    Ok(ManufacturedProblem {
        spec,
        exact: Arc::new(move |_, _| zero),
    })
}

/// A problem family indexed by `α`, as used by the refinement studies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProblemFamily {
    Example1,
    Example2,
    ZeroData,
    /// The manufactured family with the given parameters; `alpha` is
    /// overridden per study row.
    Custom(ManufacturedParams),
}

impl ProblemFamily {
    pub fn build(&self, alpha: f64) -> Result<ManufacturedProblem> {
        match self {
            ProblemFamily::Example1 => example1(alpha),
            ProblemFamily::Example2 => example2(alpha),
            ProblemFamily::ZeroData => zero_data(alpha),
            ProblemFamily::Custom(p) => manufactured(ManufacturedParams { alpha, ..*p }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProblemFamily::Example1 => "example1",
            ProblemFamily::Example2 => "example2",
            ProblemFamily::ZeroData => "zero",
            ProblemFamily::Custom(_) => "custom",
        }
    }

    /// Spatial and temporal extent `(l, T)`.
    pub fn extent(&self) -> (f64, f64) {
        match self {
            ProblemFamily::Custom(p) => (p.length, p.horizon),
            _ => (1.0, 1.0),
        }
    }
}

/// Maximum modulus of the error over interior nodes at level `n`.
pub fn error_at_level(run: &SolverRun, problem: &ManufacturedProblem, n: usize) -> f64 {
    let t = run.time.time(n);
    let level = &run.history[n];
    let exact = crate::mesh::GridFn::from_fn(&run.grid, |x| (problem.exact)(x, t));
    max_norm(&level.sub(&exact).expect("same grid"))
}

/// `max_i |P_i^N − P(x_i, T)|` over interior nodes at the final time.
pub fn max_error(run: &SolverRun, problem: &ManufacturedProblem) -> f64 {
    error_at_level(run, problem, run.history.len() - 1)
}

/// The same maximum taken over every stored time level.
pub fn max_error_all_levels(run: &SolverRun, problem: &ManufacturedProblem) -> f64 {
    (0..run.history.len())
        .map(|n| error_at_level(run, problem, n))
        .fold(0.0, f64::max)
}
