#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ptwell::pwell::{
    self, coefficients, find_spectrum, locate_doublet_birth, secular_value_alpha, sweep,
    threshold_alpha,
};
use ptwell::xwell::{secular_residual, spectrum_with_policy, XWaveFunction};
use ptwell::{Error, MpReal, PrecisionPolicy, Real};

use table::{Cell, Format, Meta, Table};

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

/// Real spectra of PT-symmetric square wells in coordinate and momentum space.
///
/// Arguments may be given as `--key value`, `--key=value` or bare `key=value`.
#[derive(Debug, Parser)]
#[command(name = "ptwell", version)]
struct Cli {
    /// Working precision in significant decimal digits.
    #[arg(long, global = true, env = "PTWELL_DIGITS", default_value_t = 16)]
    digits: u32,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Never raise the precision above `--digits`.
    #[arg(long, global = true)]
    fixed: bool,
    /// Ceiling for automatic precision escalation.
    #[arg(long, global = true, default_value_t = 120)]
    max_digits: u32,
    /// Grid density of the root scan.
    #[arg(long, global = true, default_value_t = 512)]
    scan_points: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Levels of the coordinate-space imaginary square well.
    XwellSpectrum {
        #[arg(long)]
        t: f64,
        /// Number of levels, starting at N = 0.
        #[arg(long, default_value_t = 10)]
        levels: u32,
    },
    /// Bound states of the momentum-space well at one coupling.
    PwellSpectrum {
        #[arg(long)]
        z: f64,
    },
    /// Level counts over a range of couplings.
    PwellSweep {
        /// `logspace(a,b,n)`, `linspace(a,b,n)`, a comma list or one value.
        #[arg(long)]
        z: String,
    },
    /// Samples of one wave function: `T` and `N`, or `Z` and `level`.
    Wavefunction {
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        z: Option<f64>,
        /// Zero-based level index of the momentum-space spectrum.
        #[arg(long)]
        level: Option<usize>,
        #[arg(long, default_value_t = 401)]
        samples: usize,
        /// Half-width of the sampled interval; `2 pi` in x, `3` in p by default.
        #[arg(long)]
        extent: Option<f64>,
    },
    /// Secular function samples: against omega for `T` and `N`, against alpha for `Z`.
    SecularPlot {
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        z: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Coupling at which a new pair of levels appears inside `(z-lo, z-hi)`.
    Doublet {
        #[arg(long)]
        z_lo: f64,
        #[arg(long)]
        z_hi: f64,
    },
}

enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let mut inner = &e;
        while let Error::AtCoupling { source, .. } | Error::AtLevel { source, .. } = inner {
            inner = source;
        }
        match inner {
            Error::Domain(_) | Error::InvalidPolicy(_) | Error::EmptyInterval { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

fn at_z(z: f64) -> impl Fn(Error) -> Error {
    move |e| match e {
        e @ (Error::AtCoupling { .. } | Error::PrecisionExhausted { .. }) => e,
        e => Error::AtCoupling { z, source: Box::new(e) },
    }
}

fn at_n(n: u32) -> impl Fn(Error) -> Error {
    move |e| match e {
        e @ Error::AtLevel { .. } => e,
        e => Error::AtLevel { n, source: Box::new(e) },
    }
}

fn positive(name: &str, v: f64) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::Usage(format!("{name} must be positive and finite, got {v}")))
    }
}

fn at_least(name: &str, v: usize, min: usize) -> Result<usize, Failure> {
    if v >= min {
        Ok(v)
    } else {
        Err(Failure::Usage(format!("{name} must be at least {min}, got {v}")))
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn f(v: f64) -> Cell {
    Cell::Float(v)
}

fn xwell_spectrum(t: f64, levels: u32, policy: &PrecisionPolicy) -> Result<Table, Failure> {
    let t = positive("T", t)?;
    if levels == 0 {
        return Err(Failure::Usage("levels must be at least 1".into()));
    }
    let mut table = Table::new(vec![
        ("N", "level index, 0-based"),
        ("parity", "+ for even N, - for odd N"),
        ("omega", "secular root in (0,1)"),
        ("k", "interior wavenumber (2N+2-omega)/4"),
        ("E", "energy k^2"),
        ("G", "imaginary log-derivative at x=0"),
    ]);
    for l in spectrum_with_policy(t, levels - 1, policy)? {
        table.push(vec![
            Cell::Int(i64::from(l.n)),
            Cell::Text(l.parity.symbol().into()),
            f(l.omega),
            f(l.k),
            f(l.energy),
            f(l.g),
        ]);
    }
    Ok(table)
}

fn pwell_spectrum(z: f64, policy: &PrecisionPolicy) -> Result<Table, Failure> {
    let z = positive("Z", z)?;
    let s = find_spectrum(z, policy).map_err(at_z(z))?;
    let mut table = Table::new(vec![
        ("idx", "level index, 0-based, increasing alpha"),
        ("alpha", "alpha = (E/8)^(1/3)"),
        ("E", "energy E = 8 alpha^3"),
        ("residual", "secular function at the root"),
        ("digits", "working digits used"),
    ]);
    for (i, r) in s.roots.iter().enumerate() {
        table.push(vec![
            Cell::Int(i as i64),
            f(r.alpha),
            f(r.energy),
            f(r.residual),
            Cell::Int(i64::from(s.digits_used)),
        ]);
    }
    Ok(table)
}

fn pwell_sweep(z: &str, policy: &PrecisionPolicy) -> Result<Table, Failure> {
    let zs = args::parse_z_values(z).map_err(Failure::Usage)?;
    let mut table = Table::new(vec![
        ("Z", "coupling Z"),
        ("N", "number of real levels"),
        ("delta", "change of N from the previous row"),
        ("events", "threshold_entry, doublet_birth, doublet_loss"),
    ]);
    for r in sweep(&zs, policy)? {
        table.push(vec![
            f(r.z),
            Cell::Int(r.n_levels as i64),
            Cell::Int(r.delta),
            Cell::List(r.events.iter().map(|e| e.name().to_string()).collect()),
        ]);
    }
    Ok(table)
}

/// Momentum-space wave function samples at the precision the spectrum needed.
fn p_psi_samples<R: Real>(z: &R, alpha: f64, ps: &[f64]) -> Result<Vec<f64>, Error> {
    let pp = pwell::params_from_alpha(&z.lit(alpha), z)?;
    let co = coefficients(&pp);
    Ok(ps
        .iter()
        .map(|p| pwell::psi(&z.lit(*p), &pp, &co).to_f64())
        .collect())
}

#[allow(clippy::too_many_arguments)]
fn wavefunction(
    t: Option<f64>,
    n: Option<u32>,
    z: Option<f64>,
    level: Option<usize>,
    samples: usize,
    extent: Option<f64>,
    policy: &PrecisionPolicy,
) -> Result<Table, Failure> {
    let samples = at_least("samples", samples, 2)?;
    let extent = extent.map(|e| positive("extent", e)).transpose()?;
    match (t, n, z, level) {
        (Some(t), Some(n), None, None) => {
            let t = positive("T", t)?;
            let lvl = spectrum_with_policy(t, n, policy)?
                .pop()
                .expect("spectrum holds N + 1 levels");
            let w = XWaveFunction::new(&lvl);
            let half = extent.unwrap_or(2.0 * std::f64::consts::PI);
            let mut table = Table::new(vec![
                ("x", "coordinate, well edges at +-pi"),
                ("re", "Re psi(x), psi(0) = 1"),
                ("im", "Im psi(x)"),
            ]);
            for x in grid(-half, half, samples) {
                let v = w.eval(&x);
                table.push(vec![f(x), f(v.re), f(v.im)]);
            }
            Ok(table)
        }
        (None, None, Some(z), Some(level)) => {
            let z = positive("Z", z)?;
            let s = find_spectrum(z, policy).map_err(at_z(z))?;
            let Some(root) = s.roots.get(level) else {
                return Err(Failure::Usage(format!(
                    "level {level} out of range: Z = {z} has {} levels",
                    s.len()
                )));
            };
            let half = extent.unwrap_or(3.0);
            let ps: Vec<f64> = grid(-half, half, samples).collect();
            let values = if s.digits_used <= 16 {
                p_psi_samples(&z, root.alpha, &ps)
            } else {
                p_psi_samples(&MpReal::with_digits(z, s.digits_used), root.alpha, &ps)
            }
            .map_err(at_z(z))?;
            let mut table = Table::new(vec![
                ("p", "momentum, kinetic steps at +-1"),
                ("psi", "real wave function in momentum space"),
            ]);
            for (p, v) in ps.into_iter().zip(values) {
                table.push(vec![f(p), f(v)]);
            }
            Ok(table)
        }
        _ => Err(Failure::Usage(
            "wavefunction needs either T and N, or Z and level".into(),
        )),
    }
}

fn p_secular_samples<R: Real>(z: &R, alphas: &[f64]) -> Result<Vec<f64>, Error> {
    alphas
        .iter()
        .map(|a| secular_value_alpha(&z.lit(*a), z).map(|v| v.to_f64()))
        .collect()
}

fn secular_plot(
    t: Option<f64>,
    n: Option<u32>,
    z: Option<f64>,
    samples: usize,
    policy: &PrecisionPolicy,
) -> Result<Table, Failure> {
    let samples = at_least("samples", samples, 2)?;
    match (t, n, z) {
        (Some(t), Some(n), None) => {
            let t = positive("T", t)?;
            let mut table = Table::new(vec![
                ("omega", "omega in (0,1), k = (2N+2-omega)/4"),
                ("value", "cos(pi omega/2) - 1/(R + sqrt(R^2+1))"),
            ]);
            for w in (1..=samples).map(|i| i as f64 / (samples + 1) as f64) {
                let v = if policy.is_native() {
                    secular_residual(&w, n, &t)
                } else {
                    let tm = MpReal::with_digits(t, policy.digits);
                    secular_residual(&tm.lit(w), n, &tm).map(|v| v.to_f64())
                }
                .map_err(at_n(n))?;
                table.push(vec![f(w), f(v)]);
            }
            Ok(table)
        }
        (None, None, Some(z)) => {
            let z = positive("Z", z)?;
            let a_max = threshold_alpha(z);
            // open interval: both ends are singular for the secular function
            let alphas: Vec<f64> = (1..=samples)
                .map(|i| a_max * i as f64 / (samples + 1) as f64)
                .collect();
            let values = if policy.is_native() {
                p_secular_samples(&z, &alphas)
            } else {
                p_secular_samples(&MpReal::with_digits(z, policy.digits), &alphas)
            }
            .map_err(at_z(z))?;
            let mut table = Table::new(vec![
                ("alpha", "alpha = (E/8)^(1/3) in (0, (Z/8)^(1/3))"),
                ("value", "secular function of alpha"),
            ]);
            for (a, v) in alphas.into_iter().zip(values) {
                table.push(vec![f(a), f(v)]);
            }
            Ok(table)
        }
        _ => Err(Failure::Usage(
            "secular-plot needs either T and N, or Z".into(),
        )),
    }
}

fn doublet(z_lo: f64, z_hi: f64, policy: &PrecisionPolicy) -> Result<Table, Failure> {
    let z_lo = positive("z-lo", z_lo)?;
    let z_hi = positive("z-hi", z_hi)?;
    if z_lo >= z_hi {
        return Err(Failure::Usage(format!("need z-lo < z-hi, got {z_lo} and {z_hi}")));
    }
    let b = locate_doublet_birth(z_lo, z_hi, policy)?;
    let mut table = Table::new(vec![
        ("Z_star", "coupling at the birth"),
        ("alpha_star", "alpha of the new pair"),
        ("E_star", "energy 8 alpha_star^3"),
        ("Z_lo", "final bracket, lower"),
        ("Z_hi", "final bracket, upper"),
    ]);
    table.push(vec![f(b.z_star), f(b.alpha_star), f(b.energy_star), f(b.z_lo), f(b.z_hi)]);
    Ok(table)
}

fn run(cli: Cli) -> Result<Table, Failure> {
    let policy = PrecisionPolicy {
        digits: cli.digits,
        scan_points: cli.scan_points,
        escalate: !cli.fixed,
        max_digits: cli.max_digits,
        ..PrecisionPolicy::default()
    };
    policy.validate()?;
    match cli.command {
        Command::XwellSpectrum { t, levels } => xwell_spectrum(t, levels, &policy),
        Command::PwellSpectrum { z } => pwell_spectrum(z, &policy),
        Command::PwellSweep { z } => pwell_sweep(&z, &policy),
        Command::Wavefunction { t, n, z, level, samples, extent } => {
            wavefunction(t, n, z, level, samples, extent, &policy)
        }
        Command::SecularPlot { t, n, z, samples } => secular_plot(t, n, z, samples, &policy),
        Command::Doublet { z_lo, z_hi } => doublet(z_lo, z_hi, &policy),
    }
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let command = std::iter::once("ptwell")
        .chain(raw.iter().skip(1).map(String::as_str))
        .collect::<Vec<_>>()
        .join(" ");
    let cli = match Cli::try_parse_from(args::rewrite(raw)) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let meta = Meta { digits: cli.digits, command };
    let (format, out) = (cli.format, cli.out.clone());
    let text = match run(cli) {
        Ok(table) => table.render(format, &meta),
        Err(Failure::Usage(msg)) => {
            eprintln!("ptwell: invalid arguments: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("ptwell: {msg}");
            return ExitCode::from(EXIT_NUMERIC);
        }
    };
    let written = match out {
        Some(path) => std::fs::write(&path, text.as_bytes())
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| format!("cannot write output: {e}")),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("ptwell: {msg}");
            ExitCode::FAILURE
        }
    }
}
