//! Precision policy and one-dimensional root and extremum localization.
//!
//! Everything here works on plain closures `Fn(&R) -> R` so that the same
//! scanner drives the coordinate-space secular function, the momentum-space
//! secular function and the brute-force determinants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{Real, NATIVE_DIGITS};

/// Endpoints of every scanned interval are pulled inwards by this fraction
/// of its length; the secular functions only have one-sided limits there.
pub const EDGE_FRACTION: f64 = 1e-8;

/// Lower bound on the number of grid intervals used by a scan, whatever
/// the interval length.
pub const MIN_SCAN_INTERVALS: usize = 64;

/// Number of uniform samples used to orient a golden-section search.
const EXTREMUM_PROBES: usize = 32;

const MAX_BISECTIONS: u32 = 2_000;
const MAX_GOLDEN_STEPS: u32 = 400;

/// Working-precision contract shared by every root search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    /// Significant decimal digits of the working arithmetic.
    pub digits: u32,
    /// Initial grid density per unit length of the scanned interval.
    pub scan_points: u32,
    /// Absolute tolerance on a root abscissa.
    pub root_tol: f64,
    /// Largest |f| accepted at a reported root.
    pub residual_tol: f64,
    /// Whether solvers may raise `digits` when the problem demands it.
    pub escalate: bool,
    /// Ceiling for escalated precision.
    pub max_digits: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            digits: NATIVE_DIGITS,
            scan_points: 512,
            root_tol: 1e-12,
            residual_tol: 1e-10,
            escalate: true,
            max_digits: 120,
        }
    }
}

impl PrecisionPolicy {
    pub fn with_digits(mut self, digits: u32) -> Self {
        self.digits = digits;
        self
    }

    /// Same policy with escalation disabled.
    pub fn fixed(mut self) -> Self {
        self.escalate = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.digits < 15 {
            return Err(Error::InvalidPolicy(format!("digits = {} < 15", self.digits)));
        }
        if self.scan_points < 64 {
            return Err(Error::InvalidPolicy(format!(
                "scan_points = {} < 64",
                self.scan_points
            )));
        }
        if !(self.root_tol > 0.0) || !(self.residual_tol > 0.0) {
            return Err(Error::InvalidPolicy("tolerances must be positive".into()));
        }
        if self.max_digits < self.digits {
            return Err(Error::InvalidPolicy(format!(
                "max_digits = {} below digits = {}",
                self.max_digits, self.digits
            )));
        }
        Ok(())
    }

    /// True when `digits` can be served by native `f64`.
    pub fn is_native(&self) -> bool {
        self.digits <= NATIVE_DIGITS
    }
}

/// An interval on which `f` changes sign.
#[derive(Debug, Clone, PartialEq)]
pub struct Bracket<R = f64> {
    pub lo: R,
    pub hi: R,
    pub f_lo: R,
    pub f_hi: R,
}

/// Sign class used for bracketing: zero counts as non-negative.
fn non_negative<R: Real>(v: &R) -> bool {
    !v.is_negative()
}

impl<R: Real> Bracket<R> {
    pub fn new(lo: R, hi: R, f_lo: R, f_hi: R) -> Result<Self> {
        let b = Bracket { lo, hi, f_lo, f_hi };
        b.check()?;
        Ok(b)
    }

    fn check(&self) -> Result<()> {
        if !(self.f_lo.is_finite() && self.f_hi.is_finite()) {
            let x = if self.f_lo.is_finite() { &self.hi } else { &self.lo };
            return Err(Error::NonFiniteEvaluation { x: x.to_f64() });
        }
        if !(self.lo < self.hi) || non_negative(&self.f_lo) == non_negative(&self.f_hi) {
            return Err(Error::NotABracket {
                lo: self.lo.to_f64(),
                hi: self.hi.to_f64(),
                f_lo: self.f_lo.to_f64(),
                f_hi: self.f_hi.to_f64(),
            });
        }
        Ok(())
    }

    pub fn width(&self) -> R {
        self.hi.clone() - self.lo.clone()
    }
}

/// A refined root.
#[derive(Debug, Clone, PartialEq)]
pub struct Root<R = f64> {
    pub x: R,
    pub f_at_x: R,
    /// Width of the final bracket.
    pub width: R,
    /// Number of function evaluations spent.
    pub refinements: u32,
}

/// Bisection on a sign-change bracket.
///
/// Halving continues past `root_tol` while the smaller endpoint residual is
/// still above `residual_tol` and the working precision can split the
/// bracket; steep crossings near a threshold need that.
pub fn bisect<R, F>(f: F, b: &Bracket<R>, policy: &PrecisionPolicy) -> Result<Root<R>>
where
    R: Real,
    F: Fn(&R) -> R,
{
    b.check()?;
    let tol = b.lo.lit(policy.root_tol);
    let res_tol = b.lo.lit(policy.residual_tol);
    let half = b.lo.lit(0.5);
    let (mut lo, mut hi) = (b.lo.clone(), b.hi.clone());
    let (mut f_lo, mut f_hi) = (b.f_lo.clone(), b.f_hi.clone());
    let lo_class = non_negative(&f_lo);
    let mut evals = 0u32;

    loop {
        let width = hi.clone() - lo.clone();
        let best = f_lo.abs().min_of(f_hi.abs());
        if (width <= tol && best <= res_tol) || evals >= MAX_BISECTIONS {
            break;
        }
        let mid = (lo.clone() + hi.clone()) * half.clone();
        if !(mid > lo && mid < hi) {
            break;
        }
        let fm = f(&mid);
        evals += 1;
        if !fm.is_finite() {
            return Err(Error::NonFiniteEvaluation { x: mid.to_f64() });
        }
        if fm == fm.zero() {
            return Ok(Root {
                x: mid,
                f_at_x: fm,
                width,
                refinements: evals,
            });
        }
        if non_negative(&fm) == lo_class {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
    }

    let width = hi.clone() - lo.clone();
    let (x, fx) = if f_lo.abs() <= f_hi.abs() {
        (lo, f_lo)
    } else {
        (hi, f_hi)
    };
    if fx.abs() > res_tol {
        return Err(Error::ResidualTooLarge {
            x: x.to_f64(),
            residual: fx.to_f64(),
            tol: policy.residual_tol,
        });
    }
    Ok(Root {
        x,
        f_at_x: fx,
        width,
        refinements: evals,
    })
}

/// Pulls both endpoints inwards by [`EDGE_FRACTION`] of the length.
pub fn shrink_edges<R: Real>(lo: &R, hi: &R) -> (R, R) {
    let eps = (hi.clone() - lo.clone()) * lo.lit(EDGE_FRACTION);
    (lo.clone() + eps.clone(), hi.clone() - eps)
}

/// Number of grid intervals used to scan `[lo, hi]`.
pub fn grid_intervals(lo: f64, hi: f64, policy: &PrecisionPolicy) -> usize {
    let n = (f64::from(policy.scan_points) * (hi - lo)).ceil();
    (n as usize).max(MIN_SCAN_INTERVALS)
}

/// Samples `f` at `n + 1` equally spaced points of `[lo, hi]`.
pub fn sample_uniform<R, F>(f: &F, lo: &R, hi: &R, n: usize) -> Result<Vec<(R, R)>>
where
    R: Real,
    F: Fn(&R) -> R,
{
    let step = (hi.clone() - lo.clone()) / lo.lit(n as f64);
    (0..=n)
        .map(|i| {
            let x = if i == n {
                hi.clone()
            } else {
                lo.clone() + step.clone() * lo.lit(i as f64)
            };
            let v = f(&x);
            if v.is_finite() {
                Ok((x, v))
            } else {
                Err(Error::NonFiniteEvaluation { x: x.to_f64() })
            }
        })
        .collect()
}

/// Brackets between consecutive samples of opposite sign class.
pub fn brackets_in_samples<R: Real>(samples: &[(R, R)]) -> Vec<Bracket<R>> {
    samples
        .windows(2)
        .filter(|w| non_negative(&w[0].1) != non_negative(&w[1].1))
        .map(|w| Bracket {
            lo: w[0].0.clone(),
            hi: w[1].0.clone(),
            f_lo: w[0].1.clone(),
            f_hi: w[1].1.clone(),
        })
        .collect()
}

/// All sign changes of `f` on a uniform grid over the edge-shrunk `[lo, hi]`.
pub fn scan_sign_changes<R, F>(
    f: F,
    lo: &R,
    hi: &R,
    policy: &PrecisionPolicy,
) -> Result<Vec<Bracket<R>>>
where
    R: Real,
    F: Fn(&R) -> R,
{
    policy.validate()?;
    if !(lo < hi) {
        return Err(Error::EmptyInterval {
            lo: lo.to_f64(),
            hi: hi.to_f64(),
        });
    }
    let (a, b) = shrink_edges(lo, hi);
    let n = grid_intervals(a.to_f64(), b.to_f64(), policy);
    let samples = sample_uniform(&f, &a, &b, n)?;
    Ok(brackets_in_samples(&samples))
}

/// Which way an extremum points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Maximum,
    Minimum,
}

/// Golden-section search for an extremum of known orientation in `[lo, hi]`.
pub fn golden_section<R, F>(
    f: &F,
    lo: &R,
    hi: &R,
    kind: ExtremumKind,
    policy: &PrecisionPolicy,
) -> (R, R)
where
    R: Real,
    F: Fn(&R) -> R,
{
    let better = |a: &R, b: &R| match kind {
        ExtremumKind::Maximum => a > b,
        ExtremumKind::Minimum => a < b,
    };
    let tol = lo.lit(policy.root_tol);
    let inv_phi = (lo.lit(5.0).sqrt() - lo.one()) * lo.lit(0.5);
    let (mut a, mut b) = (lo.clone(), hi.clone());
    let mut c = b.clone() - (b.clone() - a.clone()) * inv_phi.clone();
    let mut d = a.clone() + (b.clone() - a.clone()) * inv_phi.clone();
    let mut fc = f(&c);
    let mut fd = f(&d);
    let mut steps = 0;
    while b.clone() - a.clone() > tol && steps < MAX_GOLDEN_STEPS {
        steps += 1;
        if better(&fc, &fd) {
            b = d;
            d = c.clone();
            fd = fc.clone();
            c = b.clone() - (b.clone() - a.clone()) * inv_phi.clone();
            if !(c > a && c < d) {
                break;
            }
            fc = f(&c);
        } else {
            a = c;
            c = d.clone();
            fc = fd.clone();
            d = a.clone() + (b.clone() - a.clone()) * inv_phi.clone();
            if !(d < b && d > c) {
                break;
            }
            fd = f(&d);
        }
    }
    if better(&fc, &fd) {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Locates the single interior extremum of `f` on `(lo, hi)`.
///
/// The orientation is detected from a coarse probe; a function whose probe
/// is monotone has no interior extremum.
pub fn refine_extremum<R, F>(f: F, lo: &R, hi: &R, policy: &PrecisionPolicy) -> Result<(R, R)>
where
    R: Real,
    F: Fn(&R) -> R,
{
    policy.validate()?;
    if !(lo < hi) {
        return Err(Error::EmptyInterval {
            lo: lo.to_f64(),
            hi: hi.to_f64(),
        });
    }
    let probe = sample_uniform(&f, lo, hi, EXTREMUM_PROBES)?;
    let last = probe.len() - 1;
    let argmax = (0..=last)
        .max_by(|&i, &j| probe[i].1.partial_cmp(&probe[j].1).unwrap())
        .unwrap();
    let argmin = (0..=last)
        .min_by(|&i, &j| probe[i].1.partial_cmp(&probe[j].1).unwrap())
        .unwrap();
    let interior = |i: usize| i > 0 && i < last;
    let ends_hi = probe[0].1.clone().max_of(probe[last].1.clone());
    let ends_lo = probe[0].1.clone().min_of(probe[last].1.clone());
    let choice = match (interior(argmax), interior(argmin)) {
        (true, true) => {
            let rise = probe[argmax].1.clone() - ends_hi;
            let dip = ends_lo - probe[argmin].1.clone();
            if rise >= dip {
                Some((argmax, ExtremumKind::Maximum))
            } else {
                Some((argmin, ExtremumKind::Minimum))
            }
        }
        (true, false) => Some((argmax, ExtremumKind::Maximum)),
        (false, true) => Some((argmin, ExtremumKind::Minimum)),
        (false, false) => None,
    };
    let Some((i, kind)) = choice else {
        return Err(Error::NoInteriorExtremum {
            lo: lo.to_f64(),
            hi: hi.to_f64(),
        });
    };
    Ok(golden_section(&f, &probe[i - 1].0, &probe[i + 1].0, kind, policy))
}
