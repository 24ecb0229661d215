//! Command-line front end. Every command writes plain `key: value` lines
//! to stdout and is a pure function of its flags.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::applications::rpt_probability;
use crate::bounds::{chernoff_min, clustered_bound, kappa_bounds, phi_bound, tail_bound, Spectrum};
use crate::error::{usage, Error};
use crate::exact::{psi, psi_even, psi_odd, psi_quadrature, Dimensions, MeasureResult, Method, QUAD_TOL};
use crate::montecarlo::estimate_measure;
use crate::numeric::LogValue;
use crate::spectrum_file::SpectrumFile;
use crate::sweep::{fig1_curves, fig2_curves, format_log10, write_curves};

#[derive(Debug, Parser)]
#[command(
    name = "projmeasure",
    version,
    about = "Measure of the set where ‖Ax‖ < δ‖A‖‖x‖ on the unit sphere"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact projection measure ψ(δ) for dimensions m < n.
    Psi {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = PsiMethod::Auto)]
        method: PsiMethod,
    },
    /// Analytic bound for a spectrum.
    Bound {
        #[command(flatten)]
        spectrum: SpectrumArgs,
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, value_enum)]
        kind: BoundKind,
        /// Number of leading singular values below the top cluster;
        /// defaults to the spectrum's own cutoff.
        #[arg(long)]
        m0: Option<u64>,
    },
    /// Monte Carlo estimate with a 99% Wilson interval.
    Mc {
        #[command(flatten)]
        spectrum: SpectrumArgs,
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Write the ψ sweeps for m = 2^k, n = 2m, k = 1..=16 as CSV.
    Fig1 {
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the clustered-bound sweeps for the N-particle matrices, N = 4..=32.
    Fig2 {
        #[arg(long)]
        out: PathBuf,
    },
    /// Probability that ‖Px‖/‖x‖ lies within a factor 1 ± ε of √(m/n).
    Rpt {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, allow_negative_numbers = true)]
        epsilon: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PsiMethod {
    Auto,
    Even,
    Odd,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    Chernoff,
    Phi,
    Kappa,
    Clustered,
    Tail,
}

/// Either a spectrum file or `m`, `n`, `κ`. The latter stands for the
/// spectrum with `m - 1` singular values 1 and one singular value `κ`.
#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[arg(long, conflicts_with_all = ["m", "n", "kappa"])]
    pub spectrum: Option<PathBuf>,
    #[arg(long, requires = "n")]
    pub m: Option<u64>,
    #[arg(long, requires = "m")]
    pub n: Option<u64>,
    #[arg(long, requires = "m", allow_negative_numbers = true)]
    pub kappa: Option<f64>,
}

/// Errors carrying their process exit code.
#[derive(Debug)]
pub enum CliError {
    Library(Error),
    Io(std::io::Error, PathBuf),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(Error::Domain(_) | Error::Usage(_)) => 2,
            CliError::Library(Error::Numerical { .. }) => 4,
            CliError::Io(..) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Library(e) => write!(f, "{e}"),
            CliError::Io(e, path) => write!(f, "I/O error on {}: {e}", path.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Library(e)
    }
}

/// What a command produced: stdout text plus warning lines for stderr.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Output {
    pub stdout: String,
    pub warnings: Vec<String>,
}

impl Output {
    fn line(&mut self, key: &str, value: impl std::fmt::Display) {
        writeln!(self.stdout, "{key}: {value}").expect("writing to a String cannot fail");
    }

    fn measure(&mut self, prefix: &str, r: &MeasureResult) {
        let key = |k: &str| {
            if prefix.is_empty() {
                k.to_string()
            } else {
                format!("{prefix}_{k}")
            }
        };
        self.line(&key("value"), r.value.render());
        self.line(&key("log10"), format_log10(r.value.log10()));
        self.line(&key("method"), r.method);
        self.line(
            &key("bracket"),
            format!("[{}, {}]", r.bracket_lo.render(), r.bracket_hi.render()),
        );
        self.line(
            &key("bracket_log10"),
            format!(
                "[{}, {}]",
                format_log10(r.bracket_lo.log10()),
                format_log10(r.bracket_hi.log10())
            ),
        );
    }

    fn bound(&mut self, v: LogValue) {
        self.line("bound", v.render());
        self.line("log10", format_log10(v.log10()));
    }

    fn trivial(&mut self, why: String) {
        self.warnings
            .push(format!("warning: {why}; reporting the trivial bound 1"));
        self.bound(LogValue::ONE);
    }
}

impl SpectrumArgs {
    pub fn load(&self) -> Result<Spectrum, CliError> {
        if let Some(path) = &self.spectrum {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(e, path.clone()))?;
            return Ok(SpectrumFile::parse(&text)?.to_spectrum()?);
        }
        let (Some(m), Some(n)) = (self.m, self.n) else {
            return Err(usage("give either --spectrum FILE or --m and --n (with optional --kappa)").into());
        };
        let kappa = self.kappa.unwrap_or(1.0);
        if !(kappa >= 1.0) || !kappa.is_finite() {
            return Err(crate::error::domain(format!("kappa must be finite and >= 1, got {kappa}")).into());
        }
        if m == 0 {
            return Err(crate::error::domain("m must be at least 1").into());
        }
        let groups = [(1.0, m - 1), (kappa, 1)];
        Ok(Spectrum::new(groups.into_iter().filter(|g| g.1 > 0), n)?)
    }
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let mut out = Output::default();
    match &cli.command {
        Command::Psi { m, n, delta, method } => {
            let dims = Dimensions::new(*m, *n)?;
            let r = match method {
                PsiMethod::Auto => psi(dims, *delta)?,
                PsiMethod::Even => MeasureResult::exact(psi_even(dims, *delta)?, Method::EvenPolynomial),
                PsiMethod::Odd => psi_odd(dims, *delta)?,
                PsiMethod::Quadrature => {
                    MeasureResult::exact(psi_quadrature(dims, *delta, QUAD_TOL)?, Method::Quadrature)
                }
            };
            out.line("m", m);
            out.line("n", n);
            out.line("delta", delta);
            out.measure("", &r);
        }
        Command::Bound {
            spectrum,
            delta,
            kind,
            m0,
        } => {
            let spec = spectrum.load()?;
            bound(&mut out, &spec, *delta, *kind, *m0)?;
        }
        Command::Mc {
            spectrum,
            delta,
            samples,
            seed,
            workers,
        } => {
            let spec = spectrum.load()?;
            let est = estimate_measure(&spec, *delta, *samples, *seed, *workers)?;
            out.line("m", spec.m());
            out.line("n", spec.n());
            out.line("delta", delta);
            out.line("seed", seed);
            out.line("samples", est.samples);
            out.line("hits", est.hits);
            out.line("p_hat", est.p_hat);
            out.line("std_err", est.std_err());
            out.line("ci99", format!("[{}, {}]", est.ci_lo, est.ci_hi));
            // all singular values equal: the measure is the projection measure
            if spec.groups().len() == 1 {
                let exact = psi(spec.dims(), *delta)?.value.to_linear();
                out.line("exact", exact);
                out.line("in_ci", est.contains(exact));
            }
        }
        Command::Fig1 { out: dir } => figures(&mut out, dir, fig1_curves()?)?,
        Command::Fig2 { out: dir } => figures(&mut out, dir, fig2_curves()?)?,
        Command::Rpt { m, n, epsilon } => {
            let dims = Dimensions::new(*m, *n)?;
            let p = rpt_probability(dims, *epsilon)?;
            out.line("m", m);
            out.line("n", n);
            out.line("epsilon", epsilon);
            out.line("exact", p.exact);
            out.line("lower_bound", p.lower_bound);
            out.line("miss", p.miss.render());
            out.line("miss_bound", p.miss_bound.render());
            out.line("c", p.c);
        }
    }
    Ok(out)
}

fn bound(out: &mut Output, spec: &Spectrum, delta: f64, kind: BoundKind, m0: Option<u64>) -> Result<(), CliError> {
    let dims = spec.dims();
    out.line("m", dims.m());
    out.line("n", dims.n());
    out.line("delta", delta);
    out.line("kappa", spec.kappa());
    match kind {
        BoundKind::Chernoff => {
            let s = chernoff_min(spec, delta)?;
            out.line("kappa_bar", spec.kappa_bar());
            if s.condition_holds {
                out.bound(LogValue::from_ln(s.min_log));
                out.line("t_star", s.t_star);
            } else {
                out.trivial(format!(
                    "kappa_bar * delta = {} is not below sqrt(m/n) = {}",
                    spec.kappa_bar() * delta,
                    dims.xi()
                ));
                out.line("t_star", s.t_star);
            }
            out.line("condition_holds", s.condition_holds);
        }
        BoundKind::Phi => {
            let kd = spec.kappa() * delta;
            if kd >= dims.xi() {
                phi_bound(spec, delta)?;
                out.trivial(format!("kappa * delta = {kd} is not below sqrt(m/n) = {}", dims.xi()));
            } else {
                out.bound(phi_bound(spec, delta)?);
            }
        }
        BoundKind::Kappa => {
            let (lower, upper) = kappa_bounds(dims, delta, spec.kappa())?;
            if spec.kappa() * delta >= 1.0 {
                out.warnings.push(format!(
                    "warning: kappa * delta = {} is not below 1; the upper bound is the trivial bound 1",
                    spec.kappa() * delta
                ));
            }
            out.measure("lower", &lower);
            out.measure("upper", &upper);
        }
        BoundKind::Clustered => {
            let m0 = m0.unwrap_or_else(|| spec.clustered_cutoff());
            if m0 < spec.clustered_cutoff() {
                out.warnings.push(format!(
                    "warning: m0 = {m0} is below the spectrum cutoff {}; the bound assumes sigma_k = sigma_m for k > m0",
                    spec.clustered_cutoff()
                ));
            }
            out.line("m0", m0);
            out.measure("", &clustered_bound(dims, m0, delta)?);
        }
        BoundKind::Tail => {
            if !(0.0..=1.0).contains(&delta) {
                return Err(crate::error::domain(format!("delta must lie in [0, 1], got {delta}")).into());
            }
            if delta <= dims.xi() {
                out.trivial(format!("delta = {delta} is not above sqrt(m/n) = {}", dims.xi()));
            } else {
                out.bound(tail_bound(dims, delta)?);
            }
        }
    }
    Ok(())
}

fn figures(out: &mut Output, dir: &std::path::Path, curves: Vec<crate::sweep::FigureCurve>) -> Result<(), CliError> {
    let paths = write_curves(dir, &curves).map_err(|e| CliError::Io(e, dir.to_path_buf()))?;
    for p in paths {
        writeln!(out.stdout, "{}", p.display()).expect("writing to a String cannot fail");
    }
    Ok(())
}
