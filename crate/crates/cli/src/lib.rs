//! Argument parsing and dispatch for the `fkac` binary.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_rational::Ratio;

use fkac::conv_quad::fractional_power_weights;
use fkac::harness::{self, step_count, time_levels, Axis, RateTable, TauRule};
use fkac::mesh::max_norm;
use fkac::problems::{self, ManufacturedParams, PotentialKind, ProblemFamily};
use fkac::solver::march;
use fkac::SchemeOrder;

/// Environment variable naming the directory for relative `--output` paths.
pub const OUTPUT_DIR_ENV: &str = "FKAC_OUTPUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "fkac",
    version,
    about = "Compact finite difference solver for the backward fractional Feynman-Kac equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Output path. Relative paths are resolved against $FKAC_OUTPUT_DIR when set.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Worker threads for refinement studies [default: all cores]
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Seed for random perturbations
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print the convolution weights l_0..l_{count-1} as CSV (k,l_k)
    Coeffs {
        /// Scheme order, 1 to 4
        #[arg(long, default_value_t = 1)]
        q: usize,
        /// Fractional order in (0, 1]
        #[arg(long, default_value = "0.5")]
        alpha: String,
        /// Number of weights
        #[arg(long, default_value_t = 16)]
        count: usize,
    },
    /// March one problem to the final time and report the error
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Scheme order, 1 to 4
        #[arg(long, default_value_t = 1)]
        q: usize,
        /// Fractional order in (0, 1)
        #[arg(long, default_value = "0.5")]
        alpha: String,
        /// Mesh width (length units), e.g. 1/1000
        #[arg(long, default_value = "1/1000")]
        h: String,
        /// Time step (time units), e.g. 1/10
        #[arg(long, default_value = "1/10")]
        tau: String,
    },
    /// Run a refinement study and print the error/rate table
    Converge {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Scheme order, 1 to 4
        #[arg(long, default_value_t = 1)]
        q: usize,
        /// Refinement direction
        #[arg(long, value_enum, default_value_t = AxisArg::Temporal)]
        axis: AxisArg,
        /// Comma-separated fractional orders
        #[arg(long, default_value = "0.2,0.5,0.8")]
        alphas: String,
        /// Fixed mesh width for temporal studies [default: 1/1000]
        #[arg(long)]
        h: Option<String>,
        /// Comma-separated decreasing time steps for temporal studies
        /// [default: 1/10,1/20,1/40,1/80]
        #[arg(long)]
        taus: Option<String>,
        /// Comma-separated decreasing mesh widths for spatial or coupled studies
        #[arg(long)]
        hs: Option<String>,
        /// Constant c in tau = c*h^p [default: 1]
        #[arg(long)]
        c: Option<String>,
        /// Exponent p in tau = c*h^p [default: 4/q for spatial, 1 for coupled]
        #[arg(long)]
        p: Option<String>,
        /// Treat --output as a directory and write one file per (example, q, axis, alpha)
        #[arg(long)]
        split: bool,
    },
    /// Check the perturbation bound of the first-order scheme with random initial errors
    Stability {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Fractional order in (0, 1)
        #[arg(long, default_value = "0.5")]
        alpha: String,
        /// Spatial intervals
        #[arg(long, default_value_t = 50)]
        m: usize,
        /// Time steps
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Number of random trials
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Largest perturbation modulus
        #[arg(long, default_value = "1e-2")]
        scale: String,
    },
}

#[derive(Args, Debug)]
struct ProblemArgs {
    /// Built-in problem: 1 (U=1), 2 (U=x) or zero
    #[arg(long, default_value = "1", conflicts_with = "problem")]
    example: String,
    /// key = value file describing a manufactured problem
    #[arg(long, value_name = "FILE")]
    problem: Option<PathBuf>,
    /// Override rho, written a+bi
    #[arg(long)]
    rho: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AxisArg {
    Temporal,
    Spatial,
    Coupled,
}

/// Which problem a command runs on.
#[derive(Clone, Debug, PartialEq)]
pub enum ProblemChoice {
    Example1,
    Example2,
    Zero,
    Custom(ManufacturedParams),
}

impl ProblemChoice {
    pub fn family(&self) -> ProblemFamily {
        match self {
            ProblemChoice::Example1 => ProblemFamily::Example1,
            ProblemChoice::Example2 => ProblemFamily::Example2,
            ProblemChoice::Zero => ProblemFamily::ZeroData,
            ProblemChoice::Custom(p) => ProblemFamily::Custom(*p),
        }
    }

    pub fn name(&self) -> &'static str {
        self.family().name()
    }

    /// `α` fixed by a problem file, if any.
    fn alpha(&self) -> Option<f64> {
        match self {
            ProblemChoice::Custom(p) => Some(p.alpha),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Study {
    Temporal { h: f64, taus: Vec<f64> },
    Mesh { axis: Axis, hs: Vec<f64>, rule: TauRule },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Coeffs {
        order: SchemeOrder,
        alpha: f64,
        count: usize,
    },
    Solve {
        problem: ProblemChoice,
        order: SchemeOrder,
        alpha: f64,
        m: usize,
        n: usize,
        /// `t_N`, below `T` when `τ` does not divide it.
        final_time: f64,
    },
    Converge {
        problem: ProblemChoice,
        order: SchemeOrder,
        alphas: Vec<f64>,
        study: Study,
        split: bool,
    },
    Stability {
        problem: ProblemChoice,
        alpha: f64,
        m: usize,
        n: usize,
        trials: usize,
        scale: f64,
    },
}

/// A validated invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub output: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub seed: u64,
}

/// Parses `a/b` exactly or a decimal literal.
pub fn parse_number(text: &str) -> std::result::Result<f64, String> {
    let text = text.trim();
    if text.contains('/') {
        let r = Ratio::<i64>::from_str(text).map_err(|e| format!("bad fraction {text:?}: {e}"))?;
        if *r.denom() == 0 {
            return Err(format!("bad fraction {text:?}: zero denominator"));
        }
        return Ok(*r.numer() as f64 / *r.denom() as f64);
    }
    let v: f64 = text.parse().map_err(|_| format!("bad number {text:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("bad number {text:?}"))
    }
}

pub fn parse_list(text: &str) -> std::result::Result<Vec<f64>, String> {
    text.split(',').map(parse_number).collect()
}

/// Parses `a+bi`, `a-bi`, `bi` or `a`.
pub fn parse_complex(text: &str) -> std::result::Result<Complex64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    Complex64::from_str(&t).map_err(|_| format!("bad complex number {text:?}, expected a+bi"))
}

/// Reads a `key = value` problem file. Keys: alpha, k_alpha, rho,
/// potential (one or x), length, horizon. `#` starts a comment.
pub fn parse_problem_file(text: &str) -> std::result::Result<ManufacturedParams, String> {
    let mut params = ManufacturedParams::unit(0.5, PotentialKind::One);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let at = |e: String| format!("line {}: {e}", i + 1);
        match key {
            "alpha" => params.alpha = parse_number(value).map_err(at)?,
            "k_alpha" | "K_alpha" => params.k_alpha = parse_number(value).map_err(at)?,
            "rho" => params.rho = parse_complex(value).map_err(at)?,
            "potential" | "U" => {
                params.potential = match value {
                    "one" | "1" => PotentialKind::One,
                    "x" => PotentialKind::Identity,
                    other => return Err(at(format!("potential must be one or x, got {other:?}"))),
                }
            }
            "length" => params.length = parse_number(value).map_err(at)?,
            "horizon" | "T" => params.horizon = parse_number(value).map_err(at)?,
            other => return Err(at(format!("unknown key {other:?}"))),
        }
    }
    Ok(params)
}

fn usage(kind: ErrorKind, msg: impl std::fmt::Display) -> clap::Error {
    Cli::command().error(kind, msg)
}

fn value(flag: &str, r: std::result::Result<f64, String>) -> std::result::Result<f64, clap::Error> {
    r.map_err(|e| usage(ErrorKind::ValueValidation, format!("--{flag}: {e}")))
}

fn values(flag: &str, text: &str) -> std::result::Result<Vec<f64>, clap::Error> {
    let list = parse_list(text).map_err(|e| usage(ErrorKind::ValueValidation, format!("--{flag}: {e}")))?;
    if list.iter().any(|&v| v <= 0.0) {
        return Err(usage(ErrorKind::ValueValidation, format!("--{flag}: entries must be positive")));
    }
    if !list.windows(2).all(|w| w[1] < w[0]) {
        return Err(usage(ErrorKind::ValueValidation, format!("--{flag}: entries must decrease")));
    }
    Ok(list)
}

fn order(q: usize) -> std::result::Result<SchemeOrder, clap::Error> {
    SchemeOrder::new(q).map_err(|_| usage(ErrorKind::ValueValidation, format!("--q: must be 1 to 4, got {q}")))
}

fn check_alpha(flag: &str, alpha: f64) -> std::result::Result<f64, clap::Error> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(alpha)
    } else {
        Err(usage(ErrorKind::ValueValidation, format!("--{flag}: must lie in (0, 1), got {alpha}")))
    }
}

fn problem(args: &ProblemArgs) -> std::result::Result<ProblemChoice, clap::Error> {
    let mut choice = match &args.problem {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                usage(ErrorKind::Io, format!("--problem: cannot read {}: {e}", path.display()))
            })?;
            let params = parse_problem_file(&text)
                .map_err(|e| usage(ErrorKind::ValueValidation, format!("--problem {}: {e}", path.display())))?;
            ProblemChoice::Custom(params)
        }
        None => match args.example.as_str() {
            "1" => ProblemChoice::Example1,
            "2" => ProblemChoice::Example2,
            "zero" | "0" => ProblemChoice::Zero,
            other => {
                return Err(usage(
                    ErrorKind::InvalidValue,
                    format!("--example: expected 1, 2 or zero, got {other:?}"),
                ))
            }
        },
    };
    if let Some(text) = &args.rho {
        let rho = parse_complex(text).map_err(|e| usage(ErrorKind::ValueValidation, format!("--rho: {e}")))?;
        let kind = match &choice {
            ProblemChoice::Example1 => PotentialKind::One,
            ProblemChoice::Example2 => PotentialKind::Identity,
            ProblemChoice::Custom(p) => p.potential,
            ProblemChoice::Zero => {
                return Err(usage(ErrorKind::ArgumentConflict, "--rho: not used by the zero problem"))
            }
        };
        let base = match &choice {
            ProblemChoice::Custom(p) => *p,
            _ => ManufacturedParams::unit(0.5, kind),
        };
        choice = ProblemChoice::Custom(ManufacturedParams { rho, ..base });
    }
    if let ProblemChoice::Custom(p) = &choice {
        let checks = [
            ("k_alpha", p.k_alpha > 0.0),
            ("rho", p.rho.re > 0.0 && p.rho.is_finite()),
            ("length", p.length > 0.0),
            ("horizon", p.horizon > 0.0),
        ];
        if let Some((name, _)) = checks.iter().find(|(_, ok)| !ok) {
            return Err(usage(ErrorKind::ValueValidation, format!("problem: {name} out of range")));
        }
    }
    Ok(choice)
}

/// Grid sizes for one run; `M = l/h` must be an integer of at least 2.
fn mesh(flag: &str, length: f64, h: f64) -> std::result::Result<usize, clap::Error> {
    let m = step_count(length, h).map_err(|e| usage(ErrorKind::ValueValidation, format!("--{flag}: {e}")))?;
    if m < 2 {
        return Err(usage(ErrorKind::ValueValidation, format!("--{flag}: needs at least 2 intervals")));
    }
    Ok(m)
}

/// Parses and validates a full command line (including the program name).
pub fn parse_args<I, T>(argv: I) -> std::result::Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    if cli.jobs == Some(0) {
        return Err(usage(ErrorKind::ValueValidation, "--jobs: must be at least 1"));
    }
    let command = match cli.command {
        Cmd::Coeffs { q, alpha, count } => {
            let alpha = value("alpha", parse_number(&alpha))?;
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(usage(ErrorKind::ValueValidation, format!("--alpha: must lie in (0, 1], got {alpha}")));
            }
            if count == 0 {
                return Err(usage(ErrorKind::ValueValidation, "--count: must be at least 1"));
            }
            Command::Coeffs { order: order(q)?, alpha, count }
        }
        Cmd::Solve { problem: p, q, alpha, h, tau } => {
            let problem = problem(&p)?;
            let alpha = check_alpha("alpha", problem.alpha().map_or_else(|| value("alpha", parse_number(&alpha)), Ok)?)?;
            let (length, horizon) = problem.family().extent();
            let m = mesh("h", length, value("h", parse_number(&h))?)?;
            let (n, final_time) = time_levels(horizon, value("tau", parse_number(&tau))?)
                .map_err(|e| usage(ErrorKind::ValueValidation, format!("--tau: {e}")))?;
            Command::Solve { problem, order: order(q)?, alpha, m, n, final_time }
        }
        Cmd::Converge { problem: p, q, axis, alphas, h, taus, hs, c, p: power, split } => {
            let problem = problem(&p)?;
            let order = order(q)?;
            let alphas = match problem.alpha() {
                Some(a) if p.problem.is_some() && alphas == "0.2,0.5,0.8" => vec![a],
                _ => parse_list(&alphas).map_err(|e| usage(ErrorKind::ValueValidation, format!("--alphas: {e}")))?,
            };
            for &a in &alphas {
                check_alpha("alphas", a)?;
            }
            let (length, horizon) = problem.family().extent();
            let study = match axis {
                AxisArg::Temporal => {
                    if hs.is_some() || c.is_some() || power.is_some() {
                        return Err(usage(
                            ErrorKind::ArgumentConflict,
                            "--hs, --c and --p need --axis spatial or coupled",
                        ));
                    }
                    let h = value("h", parse_number(h.as_deref().unwrap_or("1/1000")))?;
                    mesh("h", length, h)?;
                    let taus = values("taus", taus.as_deref().unwrap_or("1/10,1/20,1/40,1/80"))?;
                    for &tau in &taus {
                        time_levels(horizon, tau).map_err(|e| usage(ErrorKind::ValueValidation, format!("--taus: {e}")))?;
                    }
                    Study::Temporal { h, taus }
                }
                AxisArg::Spatial | AxisArg::Coupled => {
                    if h.is_some() || taus.is_some() {
                        return Err(usage(ErrorKind::ArgumentConflict, "--h and --taus need --axis temporal"));
                    }
                    let hs = values("hs", hs.as_deref().ok_or_else(|| {
                        usage(ErrorKind::MissingRequiredArgument, "--hs is required for spatial and coupled studies")
                    })?)?;
                    let (axis, default_p) = match axis {
                        AxisArg::Spatial => (Axis::Spatial, TauRule::balanced(order).p),
                        _ => (Axis::Coupled, 1.0),
                    };
                    let c = c.as_deref().map_or(Ok(1.0), |t| value("c", parse_number(t)))?;
                    let p = power.as_deref().map_or(Ok(default_p), |t| value("p", parse_number(t)))?;
                    if !(c > 0.0 && p > 0.0) {
                        return Err(usage(ErrorKind::ValueValidation, "--c and --p must be positive"));
                    }
                    let rule = TauRule { c, p };
                    for &h in &hs {
                        mesh("hs", length, h)?;
                        time_levels(horizon, rule.tau(h))
                            .map_err(|e| usage(ErrorKind::ValueValidation, format!("--hs: {e}")))?;
                    }
                    Study::Mesh { axis, hs, rule }
                }
            };
            if split && cli.output.is_none() {
                return Err(usage(ErrorKind::MissingRequiredArgument, "--split needs --output DIR"));
            }
            Command::Converge { problem, order, alphas, study, split }
        }
        Cmd::Stability { problem: p, alpha, m, n, trials, scale } => {
            let problem = problem(&p)?;
            let unit = match &problem {
                ProblemChoice::Example2 => false,
                ProblemChoice::Custom(params) => params.potential == PotentialKind::One,
                _ => true,
            };
            if !unit {
                return Err(usage(ErrorKind::ArgumentConflict, "stability: the bound needs a constant potential U = 1"));
            }
            let alpha = check_alpha("alpha", problem.alpha().map_or_else(|| value("alpha", parse_number(&alpha)), Ok)?)?;
            if m < 2 || n < 1 || trials < 1 {
                return Err(usage(ErrorKind::ValueValidation, "--m >= 2, --n >= 1 and --trials >= 1 are required"));
            }
            let scale = value("scale", parse_number(&scale))?;
            if scale <= 0.0 {
                return Err(usage(ErrorKind::ValueValidation, "--scale: must be positive"));
            }
            Command::Stability { problem, alpha, m, n, trials, scale }
        }
    };
    Ok(RunConfig { command, output: cli.output, jobs: cli.jobs, seed: cli.seed })
}

/// `--output` after applying `$FKAC_OUTPUT_DIR` to relative paths.
pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() && !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Writes `contents` next to `path` and renames it into place.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut partial = path.as_os_str().to_owned();
    partial.push(".partial");
    let partial = PathBuf::from(partial);
    fs::write(&partial, contents).with_context(|| format!("writing {}", partial.display()))?;
    fs::rename(&partial, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn alpha_tag(alpha: f64) -> String {
    format!("{alpha}").replace('.', "p")
}

fn axis_of(study: &Study) -> Axis {
    match study {
        Study::Temporal { .. } => Axis::Temporal,
        Study::Mesh { axis, .. } => *axis,
    }
}

fn execute(config: &RunConfig, out: &mut String) -> Result<()> {
    let output = config.output.as_deref().map(resolve_output);
    match &config.command {
        Command::Coeffs { order, alpha, count } => {
            let table = fractional_power_weights(*order, *alpha, count - 1).context("generating weights")?;
            let mut csv = String::from("k,l_k\n");
            for (k, l) in table.weights().iter().enumerate() {
                writeln!(csv, "{k},{l:.16e}").unwrap();
            }
            out.push_str(&csv);
            if let Some(path) = output {
                write_atomic(&path, &csv)?;
            }
        }
        Command::Solve { problem, order, alpha, m, n, final_time } => {
            let mut p = problem.family().build(*alpha).context("building problem")?;
            p.spec.horizon = *final_time;
            let run = march(&p.spec, *order, *m, *n).context("marching")?;
            let error = problems::max_error(&run, &p);
            writeln!(
                out,
                "problem={} q={order} alpha={alpha} M={m} N={n} t_N={final_time} max|P^N|={:.6e} error={error:.4e}",
                problem.name(),
                max_norm(run.final_level()),
            )
            .unwrap();
            if let Some(path) = output {
                let mut csv = String::from("x,re,im\n");
                for (x, v) in run.grid.nodes().zip(run.final_level().values()) {
                    writeln!(csv, "{x},{:.16e},{:.16e}", v.re, v.im).unwrap();
                }
                write_atomic(&path, &csv)?;
            }
        }
        Command::Converge { problem, order, alphas, study, split } => {
            let family = problem.family();
            let tables: Vec<RateTable> = match study {
                Study::Temporal { h, taus } => harness::temporal_study(&family, *order, alphas, *h, taus),
                Study::Mesh { axis: Axis::Coupled, hs, rule } => {
                    harness::coupled_study(&family, *order, alphas, hs, *rule)
                }
                Study::Mesh { hs, rule, .. } => harness::spatial_study(&family, *order, alphas, hs, *rule),
            }
            .context("running refinement study")?;
            out.push_str(&harness::format_tables(&tables));
            if let Some(path) = output {
                if *split {
                    fs::create_dir_all(&path).with_context(|| format!("creating {}", path.display()))?;
                    for t in &tables {
                        let name = format!(
                            "{}_q{}_{}_alpha{}.csv",
                            problem.name(),
                            order,
                            axis_of(study),
                            alpha_tag(t.alpha)
                        );
                        harness::write_csv(&path.join(name), std::slice::from_ref(t))?;
                    }
                } else {
                    harness::write_csv(&path, &tables)?;
                }
            }
        }
        Command::Stability { problem, alpha, m, n, trials, scale } => {
            let p = problem.family().build(*alpha).context("building problem")?;
            let report = harness::stability_study(&p.spec, *m, *n, *scale, *trials, config.seed)
                .context("running stability trials")?;
            let verdict = if report.passed() { "holds" } else { "VIOLATED" };
            let summary = format!(
                "trials={} worst_ratio={:.6} bound={:.6} violations={} bound {verdict}\n",
                report.trials,
                report.worst_ratio,
                report.bound,
                report.violations.len()
            );
            out.push_str(&summary);
            if let Some(path) = output {
                write_atomic(&path, &summary)?;
            }
            if !report.passed() {
                bail!("stability bound violated in {} level(s)", report.violations.len());
            }
        }
    }
    Ok(())
}

/// Runs a validated configuration, writing results to `out`.
pub fn run_with(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let mut text = String::new();
    let outcome = match config.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .context("starting worker pool")?
            .install(|| execute(config, &mut text)),
        None => execute(config, &mut text),
    };
    out.write_all(text.as_bytes())?;
    outcome
}

/// Runs a configuration against standard output and returns the exit status.
pub fn run(config: &RunConfig) -> i32 {
    let stdout = io::stdout();
    match run_with(config, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#} (config: {:?})", config.command);
            1
        }
    }
}
