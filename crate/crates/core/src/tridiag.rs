//! Complex tridiagonal systems solved by the Thomas algorithm (no pivoting).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tridiagonal matrix of order `n`: `sub[i] = A[i+1][i]`,
/// `sup[i] = A[i][i+1]` (both length `n − 1`), `diag` length `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<Complex64>,
    pub diag: Vec<Complex64>,
    pub sup: Vec<Complex64>,
}

impl Tridiagonal {
    pub fn constant(n: usize, sub: Complex64, diag: Complex64, sup: Complex64) -> Self {
        let off = n.saturating_sub(1);
        Tridiagonal {
            sub: vec![sub; off],
            diag: vec![diag; n],
            sup: vec![sup; off],
        }
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }

    fn check_shape(&self) -> Result<()> {
        let n = self.diag.len();
        if n == 0 {
            return Err(Error::param("matrix", "empty tridiagonal system"));
        }
        if self.sub.len() + 1 != n || self.sup.len() + 1 != n {
            return Err(Error::param(
                "matrix",
                format!(
                    "off-diagonal lengths {} and {} do not match order {n}",
                    self.sub.len(),
                    self.sup.len()
                ),
            ));
        }
        Ok(())
    }

    /// `A·x`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.sup[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalSystem {
    pub matrix: Tridiagonal,
    pub rhs: Vec<Complex64>,
}

/// LU factors of a tridiagonal matrix, reusable across right-hand sides.
#[derive(Clone, Debug)]
pub struct ThomasFactor {
    sub: Vec<Complex64>,
    /// Reciprocal pivots `1/d'_i`.
    inv_pivot: Vec<Complex64>,
    /// Modified super-diagonal `c'_i = c_i / d'_i`.
    sup_scaled: Vec<Complex64>,
}

impl ThomasFactor {
    pub fn new(matrix: &Tridiagonal) -> Result<Self> {
        matrix.check_shape()?;
        let n = matrix.order();
        let mut inv_pivot = Vec::with_capacity(n);
        let mut sup_scaled = Vec::with_capacity(n.saturating_sub(1));
        let mut pivot = matrix.diag[0];
        for i in 0..n {
            if i > 0 {
                pivot = matrix.diag[i] - matrix.sub[i - 1] * sup_scaled[i - 1];
            }
            if pivot.norm() == 0.0 || !pivot.is_finite() {
                return Err(Error::SingularPivot { index: i });
            }
            let inv = pivot.inv();
            inv_pivot.push(inv);
            if i + 1 < n {
                sup_scaled.push(matrix.sup[i] * inv);
            }
        }
        Ok(ThomasFactor {
            sub: matrix.sub.clone(),
            inv_pivot,
            sup_scaled,
        })
    }

    pub fn order(&self) -> usize {
        self.inv_pivot.len()
    }

    /// Solves in place: `rhs` is overwritten with the solution.
    pub fn solve_in_place(&self, rhs: &mut [Complex64]) -> Result<()> {
        let n = self.order();
        if rhs.len() != n {
            return Err(Error::param(
                "rhs",
                format!("length {} does not match order {n}", rhs.len()),
            ));
        }
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.sub[i - 1] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] = rhs[i] - self.sup_scaled[i] * rhs[i + 1];
        }
        Ok(())
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }
}

pub fn thomas_solve(system: &TridiagonalSystem) -> Result<Vec<Complex64>> {
    ThomasFactor::new(&system.matrix)?.solve(&system.rhs)
}
