//! Compact finite difference schemes for the backward fractional Feynman-Kac
//! equation
//!
//! ```text
//! sD_t^α [P − e^{−ρU(x)t} P(x,0)] = K_α ∂²P/∂x² + f(x,t),   0 < x < l, 0 < t ≤ T
//! ```
//!
//! with a complex Laplace variable `ρ` (`Re ρ > 0`) and a non-negative
//! potential `U`. Time is discretized by convolution quadrature of order
//! `q ∈ {1,2,3,4}` (the weights are power-series coefficients of the BDF-q
//! generating polynomial raised to `α`), space by the fourth-order compact
//! operator `ℋ_h = (1, 10, 1)/12`.
//!
//! Module map:
//!
//! * [`conv_quad`]: temporal weights `l_k` and substantial weights `d_{i,k}`.
//! * [`mesh`]: grids, difference operators, the energy inner product and norms.
//! * [`tridiag`]: complex Thomas solver.
//! * [`solver`]: problem data and the time-marching scheme.
//! * [`problems`]: manufactured problems with closed-form solutions.
//! * [`harness`]: refinement and stability studies, CSV output.
//!
//! ```
//! use fkac::{problems, solver, SchemeOrder};
//!
//! let problem = problems::example1(0.5).unwrap();
//! let run = solver::march(&problem.spec, SchemeOrder::new(3).unwrap(), 40, 20).unwrap();
//! let err = problems::max_error(&run, &problem);
//! assert!(err < 1e-4);
//! ```

pub mod conv_quad;
pub mod error;
pub mod harness;
pub mod mesh;
pub mod problems;
pub mod solver;
pub mod tridiag;

pub use conv_quad::{SchemeOrder, SubstantialFactor, WeightTable};
pub use error::{Error, Result};
pub use mesh::{Grid1D, GridFn, TimeGrid};
pub use num_complex::Complex64;

// The guide under `book/` is compiled as doc-tests so its snippets cannot
// drift from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/weights.md")]
    mod weights {}
    #[doc = include_str!("../../../book/src/compact.md")]
    mod compact {}
    #[doc = include_str!("../../../book/src/scheme.md")]
    mod scheme {}
    #[doc = include_str!("../../../book/src/stability.md")]
    mod stability {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
