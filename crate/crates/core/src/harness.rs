//! Refinement studies, stability experiments and their CSV form.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::conv_quad::SchemeOrder;
use crate::error::{Error, Result};
use crate::mesh::{max_norm, norms, Grid1D, GridFn};
use crate::problems::{max_error, ProblemFamily};
use crate::solver::{march, ProblemSpec};

pub const CSV_HEADER: &str = "axis,q,alpha,step,error,rate";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    Temporal,
    Spatial,
    Coupled,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Temporal => "temporal",
            Axis::Spatial => "spatial",
            Axis::Coupled => "coupled",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "temporal" => Ok(Axis::Temporal),
            "spatial" => Ok(Axis::Spatial),
            "coupled" => Ok(Axis::Coupled),
            other => Err(format!("unknown axis `{other}` (expected temporal, spatial or coupled)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateRow {
    /// `τ` for temporal studies, `h` otherwise.
    pub step: f64,
    pub error: f64,
    pub rate: Option<f64>,
}

/// Errors and pairwise observed orders for one refinement sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct RateTable {
    pub axis: Axis,
    pub order: SchemeOrder,
    pub alpha: f64,
    pub rows: Vec<RateRow>,
}

/// `log(e0/e1) / log(s0/s1)`; works for non-dyadic refinements.
pub fn observed_rate(step0: f64, error0: f64, step1: f64, error1: f64) -> f64 {
    (error0 / error1).ln() / (step0 / step1).ln()
}

impl RateTable {
    pub fn from_measurements(
        axis: Axis,
        order: SchemeOrder,
        alpha: f64,
        measurements: &[(f64, f64)],
    ) -> Self {
        let rows = measurements
            .iter()
            .enumerate()
            .map(|(j, &(step, error))| RateRow {
                step,
                error,
                rate: (j > 0).then(|| {
                    let (s0, e0) = measurements[j - 1];
                    observed_rate(s0, e0, step, error)
                }),
            })
            .collect();
        RateTable {
            axis,
            order,
            alpha,
            rows,
        }
    }

    /// Observed order between the two finest refinements.
    pub fn finest_rate(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.rate)
    }
}

/// Number of whole steps of size `step` that fit in `extent`.
///
/// Ratios within rounding of an integer (as for `1/80`) are taken as that
/// integer; otherwise the count is truncated, so the march keeps the
/// requested step and stops at the last level not beyond `extent`.
pub fn step_count(extent: f64, step: f64) -> Result<usize> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::param("step", format!("must be positive, got {step}")));
    }
    let ratio = extent / step;
    let nearest = ratio.round();
    let count = if (ratio - nearest).abs() <= 1e-9 * ratio.max(1.0) {
        nearest
    } else {
        ratio.floor()
    };
    if count < 1.0 || count > u32::MAX as f64 {
        return Err(Error::param("step", format!("yields {count} subdivisions")));
    }
    Ok(count as usize)
}

/// Step count and final time for a march with step `tau` over `[0, horizon]`.
/// The final time is `horizon` itself when `tau` divides it.
pub fn time_levels(horizon: f64, tau: f64) -> Result<(usize, f64)> {
    let n = step_count(horizon, tau)?;
    let exact = ((horizon / tau) - n as f64).abs() <= 1e-9 * (n as f64);
    Ok((n, if exact { horizon } else { n as f64 * tau }))
}

/// Time step as a power of the mesh width: `τ = c·h^p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TauRule {
    pub c: f64,
    pub p: f64,
}

impl TauRule {
    /// `p = 4/q`, which balances `τ^q` against `h^4`.
    pub fn balanced(order: SchemeOrder) -> Self {
        TauRule {
            c: 1.0,
            p: 4.0 / order.get() as f64,
        }
    }

    pub fn tau(&self, h: f64) -> f64 {
        self.c * h.powf(self.p)
    }
}

fn check_decreasing(values: &[f64], what: &'static str) -> Result<()> {
    if values.windows(2).all(|w| w[1] < w[0]) {
        Ok(())
    } else {
        Err(Error::NotDecreasing(what))
    }
}

/// Runs every `(alpha, h, tau)` configuration, in parallel, and returns the
/// final-time errors in input order.
fn run_grid(
    family: &ProblemFamily,
    order: SchemeOrder,
    alphas: &[f64],
    configs: &[(f64, f64)],
) -> Result<Vec<Vec<f64>>> {
    let (length, horizon) = family.extent();
    let jobs: Vec<(usize, f64, f64)> = alphas
        .iter()
        .enumerate()
        .flat_map(|(a, _)| configs.iter().map(move |&(h, tau)| (a, h, tau)))
        .collect();
    let errors = jobs
        .par_iter()
        .map(|&(a, h, tau)| {
            let mut problem = family.build(alphas[a])?;
            let m = step_count(length, h)?;
            let (n, final_time) = time_levels(horizon, tau)?;
            problem.spec.horizon = final_time;
            let run = march(&problem.spec, order, m, n)?;
            Ok(max_error(&run, &problem))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(errors.chunks(configs.len().max(1)).map(<[f64]>::to_vec).collect())
}

/// Fixed `h`, decreasing `τ`; one table per `α`.
pub fn temporal_study(
    family: &ProblemFamily,
    order: SchemeOrder,
    alphas: &[f64],
    h: f64,
    taus: &[f64],
) -> Result<Vec<RateTable>> {
    check_decreasing(taus, "tau list")?;
    let (_, horizon) = family.extent();
    let configs: Vec<(f64, f64)> = taus.iter().map(|&tau| (h, tau)).collect();
    let errors = run_grid(family, order, alphas, &configs)?;
    alphas
        .iter()
        .zip(errors)
        .map(|(&alpha, errs)| {
            let measurements = taus
                .iter()
                .zip(errs)
                .map(|(&tau, e)| {
                    let (n, final_time) = time_levels(horizon, tau)?;
                    Ok((final_time / n as f64, e))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(RateTable::from_measurements(Axis::Temporal, order, alpha, &measurements))
        })
        .collect()
}

fn mesh_study(
    axis: Axis,
    family: &ProblemFamily,
    order: SchemeOrder,
    alphas: &[f64],
    hs: &[f64],
    rule: TauRule,
) -> Result<Vec<RateTable>> {
    check_decreasing(hs, "h list")?;
    let configs: Vec<(f64, f64)> = hs.iter().map(|&h| (h, rule.tau(h))).collect();
    let errors = run_grid(family, order, alphas, &configs)?;
    Ok(alphas
        .iter()
        .zip(errors)
        .map(|(&alpha, errs)| {
            let measurements: Vec<(f64, f64)> = hs.iter().copied().zip(errs).collect();
            RateTable::from_measurements(axis, order, alpha, &measurements)
        })
        .collect())
}

/// Decreasing `h` with `τ = c·h^p` chosen so the temporal error is not
/// dominant; rates are taken with respect to `h`.
pub fn spatial_study(
    family: &ProblemFamily,
    order: SchemeOrder,
    alphas: &[f64],
    hs: &[f64],
    rule: TauRule,
) -> Result<Vec<RateTable>> {
    mesh_study(Axis::Spatial, family, order, alphas, hs, rule)
}

/// Joint refinement in both directions, typically `τ = h` with `q = 4`.
pub fn coupled_study(
    family: &ProblemFamily,
    order: SchemeOrder,
    alphas: &[f64],
    hs: &[f64],
    rule: TauRule,
) -> Result<Vec<RateTable>> {
    mesh_study(Axis::Coupled, family, order, alphas, hs, rule)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityViolation {
    pub trial: usize,
    pub level: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    /// `√(3l/8)`.
    pub bound: f64,
    /// Largest `‖ε^n‖_∞ / ‖δ_x ε^0‖` over all trials and levels.
    pub worst_ratio: f64,
    pub trials: usize,
    pub violations: Vec<StabilityViolation>,
}

impl StabilityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Uniform random values in the complex disk of radius `scale` at interior
/// nodes, zero on the boundary.
pub fn random_perturbation(grid: &Grid1D, scale: f64, seed: u64) -> GridFn {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = grid.intervals();
    let mut values = vec![Complex64::new(0.0, 0.0); m + 1];
    for v in values.iter_mut().take(m).skip(1) {
        let r = scale * rng.gen::<f64>().sqrt();
        let theta = 2.0 * PI * rng.gen::<f64>();
        *v = Complex64::from_polar(r, theta);
    }
    GridFn::from_values(values)
}

/// Perturbs the initial data by random `ε^0 ∈ 𝒱_h` and checks
/// `‖ε^n‖_∞ ≤ √(3l/8) ‖δ_x ε^0‖` at every level of the first-order scheme.
///
/// Trial `k` draws its perturbation from seed `seed + k`.
pub fn stability_study(
    problem: &ProblemSpec,
    m: usize,
    n: usize,
    scale: f64,
    trials: usize,
    seed: u64,
) -> Result<StabilityReport> {
    if !problem.potential.is_unit() {
        return Err(Error::param("U", "the stability experiment requires U(x) = 1"));
    }
    if !(scale >= 0.0 && scale.is_finite()) {
        return Err(Error::param("perturbation scale", format!("must be non-negative, got {scale}")));
    }
    let order = SchemeOrder::FIRST;
    let base = march(problem, order, m, n)?;
    let grid = base.grid;
    let bound = (3.0 * problem.length / 8.0).sqrt();

    let outcomes = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let eps0 = random_perturbation(&grid, scale, seed.wrapping_add(trial as u64));
            let grad = norms(&grid, &eps0).grad;
            let mut perturbed = problem.clone();
            let shift = Arc::new(eps0.into_values());
            let initial = problem.initial.clone();
            let h = grid.h();
            perturbed.initial = Arc::new(move |x| {
                let i = (x / h).round() as usize;
                initial(x) + shift[i]
            });
            let run = march(&perturbed, order, m, n)?;
            let mut worst = 0.0f64;
            let mut violations = Vec::new();
            for (level, (a, b)) in run.history.iter().zip(&base.history).enumerate() {
                let diff = max_norm(&a.sub(b)?);
                let ratio = if grad > 0.0 {
                    diff / grad
                } else if diff == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                };
                worst = worst.max(ratio);
                if ratio > bound {
                    violations.push(StabilityViolation { trial, level, ratio });
                }
            }
            Ok((worst, violations))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = StabilityReport {
        bound,
        worst_ratio: 0.0,
        trials,
        violations: Vec::new(),
    };
    for (worst, violations) in outcomes {
        report.worst_ratio = report.worst_ratio.max(worst);
        report.violations.extend(violations);
    }
    Ok(report)
}

/// Writes the header and one row per refinement of every table.
///
/// Errors use five significant digits in scientific notation, rates four
/// decimals; the first row of each table has an empty rate.
pub fn emit_csv<W: Write>(tables: &[RateTable], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for table in tables {
        for row in &table.rows {
            let rate = row.rate.map(|r| format!("{r:.4}")).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{:.4e},{}",
                table.axis, table.order, table.alpha, row.step, row.error, rate
            )?;
        }
    }
    out.flush()
}

/// [`emit_csv`] to a file, written to a sibling temporary and renamed into
/// place so that a failure never leaves a partial file.
pub fn write_csv(path: &Path, tables: &[RateTable]) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(".partial");
    let tmp = path.with_file_name(tmp_name);
    let result = fs::File::create(&tmp)
        .and_then(|f| emit_csv(tables, io::BufWriter::new(f)))
        .and_then(|_| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(io_err(e));
    }
    Ok(())
}

/// Parses the output of [`emit_csv`]; consecutive rows with the same
/// `(axis, q, alpha)` form one table.
pub fn parse_csv<R: BufRead>(input: R) -> Result<Vec<RateTable>> {
    let mut tables: Vec<RateTable> = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Csv {
            line: line_no,
            reason: e.to_string(),
        })?;
        if idx == 0 {
            if line.trim() != CSV_HEADER {
                return Err(Error::Csv {
                    line: 1,
                    reason: format!("unexpected header `{line}`"),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let bad = |reason: String| Error::Csv {
            line: line_no,
            reason,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(bad(format!("expected 6 fields, found {}", fields.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("`{s}`: {e}")));
        let axis: Axis = fields[0].parse().map_err(bad)?;
        let q: usize = fields[1].parse().map_err(|e| bad(format!("`{}`: {e}", fields[1])))?;
        let order = SchemeOrder::new(q).map_err(|e| bad(e.to_string()))?;
        let alpha = num(fields[2])?;
        let row = RateRow {
            step: num(fields[3])?,
            error: num(fields[4])?,
            rate: if fields[5].is_empty() {
                None
            } else {
                Some(num(fields[5])?)
            },
        };
        match tables.last_mut() {
            Some(t) if t.axis == axis && t.order == order && t.alpha == alpha && row.rate.is_some() => {
                t.rows.push(row)
            }
            _ => tables.push(RateTable {
                axis,
                order,
                alpha,
                rows: vec![row],
            }),
        }
    }
    Ok(tables)
}

/// Human-readable rendering: one block per table.
pub fn format_tables(tables: &[RateTable]) -> String {
    let mut s = String::new();
    for t in tables {
        let label = if t.axis == Axis::Temporal { "tau" } else { "h" };
        s.push_str(&format!("{} study, q = {}, alpha = {}\n", t.axis, t.order, t.alpha));
        s.push_str(&format!("{label:>12} {:>14} {:>8}\n", "max error", "rate"));
        for r in &t.rows {
            let step = if r.step > 0.0 {
                format!("1/{}", fmt_inverse(r.step))
            } else {
                r.step.to_string()
            };
            let rate = r.rate.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
            s.push_str(&format!("{step:>12} {:>14.4e} {rate:>8}\n", r.error));
        }
        s.push('\n');
    }
    s
}

fn fmt_inverse(step: f64) -> String {
    let inv = 1.0 / step;
    if (inv - inv.round()).abs() < 1e-6 * inv {
        format!("{}", inv.round() as u64)
    } else {
        format!("{inv:.3}")
    }
}
