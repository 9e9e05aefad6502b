//! Uniform grids, difference operators and the discrete energy norms.
//!
//! Grid functions are stored on all nodes `0..=M`, boundary nodes included.
//! Half-node quantities `δ_x u_{j−1/2}` are indexed by `j − 1` in the
//! returned vectors, interior quantities `δ_x² u_i` by `i − 1`.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    length: f64,
    intervals: usize,
    h: f64,
}

impl Grid1D {
    pub fn new(length: f64, intervals: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::param("length", format!("must be positive, got {length}")));
        }
        if intervals < 2 {
            return Err(Error::param(
                "M",
                format!("at least 2 intervals are required, got {intervals}"),
            ));
        }
        Ok(Grid1D {
            length,
            intervals,
            h: length / intervals as f64,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of intervals `M`.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.intervals {
            self.length
        } else {
            i as f64 * self.h
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.intervals).map(move |i| self.node(i))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
    tau: f64,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::param("T", format!("must be positive, got {horizon}")));
        }
        if steps == 0 {
            return Err(Error::param("N", "at least one time step is required"));
        }
        Ok(TimeGrid {
            horizon,
            steps,
            tau: horizon / steps as f64,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn time(&self, n: usize) -> f64 {
        if n == self.steps {
            self.horizon
        } else {
            n as f64 * self.tau
        }
    }
}

/// Complex values on the nodes `0..=M`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn {
    values: Vec<Complex64>,
}

impl GridFn {
    pub fn zeros(grid: &Grid1D) -> Self {
        GridFn {
            values: vec![Complex64::new(0.0, 0.0); grid.intervals() + 1],
        }
    }

    pub fn from_fn(grid: &Grid1D, mut f: impl FnMut(f64) -> Complex64) -> Self {
        GridFn {
            values: grid.nodes().map(&mut f).collect(),
        }
    }

    pub fn from_values(values: Vec<Complex64>) -> Self {
        GridFn { values }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn interior(&self) -> &[Complex64] {
        let n = self.values.len();
        &self.values[1..n.saturating_sub(1).max(1)]
    }

    /// Membership in `𝒱_h`: both boundary values exactly zero.
    pub fn vanishes_on_boundary(&self) -> bool {
        let zero = Complex64::new(0.0, 0.0);
        self.values.first() == Some(&zero) && self.values.last() == Some(&zero)
    }

    pub fn sub(&self, other: &GridFn) -> Result<GridFn> {
        check_same(self, other)?;
        Ok(GridFn {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }
}

impl Index<usize> for GridFn {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.values[i]
    }
}

impl IndexMut<usize> for GridFn {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.values[i]
    }
}

fn check_same(u: &GridFn, v: &GridFn) -> Result<()> {
    if u.len() == v.len() {
        Ok(())
    } else {
        Err(Error::GridMismatch {
            left: u.len(),
            right: v.len(),
        })
    }
}

fn assert_on_grid(grid: &Grid1D, u: &GridFn) {
    assert_eq!(
        u.len(),
        grid.intervals() + 1,
        "grid function length does not match the grid"
    );
}

/// `δ_x u_{j−1/2} = (u_j − u_{j−1})/h` for `j = 1..=M`.
///
/// # Panics
///
/// If `u` does not have `M + 1` entries.
pub fn delta_x(grid: &Grid1D, u: &GridFn) -> Vec<Complex64> {
    assert_on_grid(grid, u);
    let inv_h = 1.0 / grid.h();
    u.values().windows(2).map(|w| (w[1] - w[0]) * inv_h).collect()
}

/// `δ_x² u_i = (u_{i+1} − 2u_i + u_{i−1})/h²` for `i = 1..M`.
///
/// # Panics
///
/// If `u` does not have `M + 1` entries.
pub fn delta_x2(grid: &Grid1D, u: &GridFn) -> Vec<Complex64> {
    assert_on_grid(grid, u);
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    u.values()
        .windows(3)
        .map(|w| (w[2] - w[1] * 2.0 + w[0]) * inv_h2)
        .collect()
}

/// `(u_{i−1} + 10 u_i + u_{i+1})/12` at one interior node.
#[inline]
pub(crate) fn compact_stencil(left: Complex64, mid: Complex64, right: Complex64) -> Complex64 {
    (left + mid * 10.0 + right) / 12.0
}

/// The compact operator `ℋ_h`: the (1, 10, 1)/12 average on interior
/// nodes, identity on the two boundary nodes.
pub fn compact_apply(grid: &Grid1D, u: &GridFn) -> GridFn {
    assert_on_grid(grid, u);
    let v = u.values();
    let m = v.len() - 1;
    let mut out = v.to_vec();
    for i in 1..m {
        out[i] = compact_stencil(v[i - 1], v[i], v[i + 1]);
    }
    GridFn { values: out }
}

/// `⟨u, v⟩ = h Σ δ_x u · conj(δ_x v) − (h²/12) h Σ δ_x²u · conj(δ_x²v)`,
/// defined on `𝒱_h`; the second argument is conjugated.
pub fn inner_product(grid: &Grid1D, u: &GridFn, v: &GridFn) -> Result<Complex64> {
    check_same(u, v)?;
    if u.len() != grid.intervals() + 1 {
        return Err(Error::GridMismatch {
            left: u.len(),
            right: grid.intervals() + 1,
        });
    }
    if !u.vanishes_on_boundary() || !v.vanishes_on_boundary() {
        return Err(Error::NonZeroBoundary);
    }
    let h = grid.h();
    let first: Complex64 = delta_x(grid, u)
        .iter()
        .zip(delta_x(grid, v))
        .map(|(a, b)| a * b.conj())
        .sum();
    let second: Complex64 = delta_x2(grid, u)
        .iter()
        .zip(delta_x2(grid, v))
        .map(|(a, b)| a * b.conj())
        .sum();
    Ok(first * h - second * (h * h * h / 12.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridNorms {
    /// Maximum modulus over interior nodes.
    pub inf: f64,
    pub l2: f64,
    /// `‖δ_x u‖`.
    pub grad: f64,
    /// `‖δ_x² u‖`.
    pub lap: f64,
}

fn weighted_l2<'a>(h: f64, values: impl Iterator<Item = &'a Complex64>) -> f64 {
    (h * values.map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
}

pub fn max_norm(u: &GridFn) -> f64 {
    u.interior().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn norms(grid: &Grid1D, u: &GridFn) -> GridNorms {
    let h = grid.h();
    GridNorms {
        inf: max_norm(u),
        l2: weighted_l2(h, u.interior().iter()),
        grad: weighted_l2(h, delta_x(grid, u).iter()),
        lap: weighted_l2(h, delta_x2(grid, u).iter()),
    }
}
