use rayon::prelude::*;
use serde::Serialize;

use super::{params_from_alpha, secular_from_params, threshold_alpha, threshold_alpha_in};
use crate::error::{Error, Result};
use crate::numerics::{
    bisect, brackets_in_samples, golden_section, grid_intervals, sample_uniform, shrink_edges,
    Bracket, ExtremumKind, PrecisionPolicy,
};
use crate::real::{MpReal, Real};

/// A peak whose refined height is below this fraction of the surrounding
/// function scale is re-examined at higher precision.
const PEAK_GUARD: f64 = 1e-3;
/// Extra digits used when re-examining a near-touching peak.
const PEAK_EXTRA_DIGITS: u32 = 20;
/// Half-width, in grid points, of the neighbourhood defining the local scale.
const PEAK_WINDOW: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PRoot {
    pub alpha: f64,
    /// `8 alpha^3`
    pub energy: f64,
    /// Secular function at the root, at the working precision.
    pub residual: f64,
}

/// Extremum of the secular function that came closest to zero without an
/// accompanying grid sign change.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub alpha: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PSpectrum {
    pub z: f64,
    pub alpha_max: f64,
    pub roots: Vec<PRoot>,
    pub peak: Option<Peak>,
    pub digits_used: u32,
}

impl PSpectrum {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.alpha).collect()
    }
}

/// Digits needed for the `e^(-6 alpha)` term to stay above roundoff up to
/// the threshold.
pub fn required_digits(z: f64) -> u32 {
    let a = threshold_alpha(z);
    (6.0 * a * std::f64::consts::LOG10_E).ceil().max(0.0) as u32 + 10
}

struct PeakCandidate {
    lo: f64,
    hi: f64,
    kind: ExtremumKind,
}

#[derive(Default)]
struct Scan {
    roots: Vec<PRoot>,
    peak: Option<Peak>,
    recheck: Vec<PeakCandidate>,
}

fn keep_closest(peak: &mut Option<Peak>, cand: Peak) {
    if peak.map_or(true, |p| cand.value.abs() < p.value.abs()) {
        *peak = Some(cand);
    }
}

fn to_root<R: Real>(alpha: &R, residual: &R) -> PRoot {
    let e = alpha.square() * alpha.clone() * alpha.lit(8.0);
    PRoot {
        alpha: alpha.to_f64(),
        energy: e.to_f64(),
        residual: residual.to_f64(),
    }
}

/// Splits `[lo, hi]` at the refined extremum when its sign differs from the
/// grid value at `lo`.
fn split_at_peak<R, F>(f: &F, lo: &(R, R), hi: &(R, R), kind: ExtremumKind, policy: &PrecisionPolicy)
    -> (R, R, Vec<Bracket<R>>)
where
    R: Real,
    F: Fn(&R) -> R,
{
    let (xp, fp) = golden_section(f, &lo.0, &hi.0, kind, policy);
    let mut out = Vec::new();
    if fp.is_negative() != lo.1.is_negative() {
        out.push(Bracket {
            lo: lo.0.clone(),
            hi: xp.clone(),
            f_lo: lo.1.clone(),
            f_hi: fp.clone(),
        });
        out.push(Bracket {
            lo: xp.clone(),
            hi: hi.0.clone(),
            f_lo: fp.clone(),
            f_hi: hi.1.clone(),
        });
    }
    (xp, fp, out)
}

fn median_abs(vals: &[f64]) -> f64 {
    let mut v: Vec<f64> = vals.iter().map(|x| x.abs()).collect();
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn scan<R: Real>(z: f64, policy: &PrecisionPolicy) -> Result<Scan> {
    let zr = R::with_digits(z, policy.digits);
    let f = |a: &R| match params_from_alpha(a, &zr) {
        Ok(pp) => secular_from_params(&pp),
        Err(_) => a.lit(f64::NAN),
    };
    let (lo, hi) = shrink_edges(&zr.zero(), &threshold_alpha_in(&zr));
    let n = grid_intervals(lo.to_f64(), hi.to_f64(), policy);
    let samples = sample_uniform(&f, &lo, &hi, n)?;
    let mut brackets = brackets_in_samples(&samples);
    let mut out = Scan::default();

    let vals: Vec<f64> = samples.iter().map(|s| s.1.to_f64()).collect();
    for i in 1..n {
        let (prev, cur, next) = (&samples[i - 1].1, &samples[i].1, &samples[i + 1].1);
        let is_max = cur >= prev && cur >= next && (cur > prev || cur > next);
        let is_min = cur <= prev && cur <= next && (cur < prev || cur < next);
        let kind = match (is_max, is_min, cur.is_negative()) {
            (true, _, true) => ExtremumKind::Maximum,
            (_, true, false) => ExtremumKind::Minimum,
            _ => continue,
        };
        if prev.is_negative() != cur.is_negative() || next.is_negative() != cur.is_negative() {
            continue;
        }
        let (xp, fp, split) = split_at_peak(&f, &samples[i - 1], &samples[i + 1], kind, policy);
        keep_closest(&mut out.peak, Peak { alpha: xp.to_f64(), value: fp.to_f64() });
        if !split.is_empty() {
            brackets.extend(split);
            continue;
        }
        let w0 = i.saturating_sub(PEAK_WINDOW);
        let w1 = (i + PEAK_WINDOW).min(n);
        if fp.to_f64().abs() < PEAK_GUARD * median_abs(&vals[w0..=w1]) {
            out.recheck.push(PeakCandidate {
                lo: samples[i - 1].0.to_f64(),
                hi: samples[i + 1].0.to_f64(),
                kind,
            });
        }
    }

    brackets.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
    for b in &brackets {
        let root = bisect(f, b, policy)?;
        out.roots.push(to_root(&root.x, &root.f_at_x));
    }
    Ok(out)
}

fn recheck_peak(z: f64, cand: &PeakCandidate, policy: &PrecisionPolicy) -> Result<Vec<PRoot>> {
    let zr = MpReal::with_digits(z, policy.digits);
    let f = |a: &MpReal| secular_from_params(&params_from_alpha(a, &zr).expect("inside scan range"));
    let lo = zr.lit(cand.lo);
    let hi = zr.lit(cand.hi);
    let lo = (lo.clone(), f(&lo));
    let hi = (hi.clone(), f(&hi));
    let (_, _, split) = split_at_peak(&f, &lo, &hi, cand.kind, policy);
    split
        .iter()
        .map(|b| bisect(f, b, policy).map(|r| to_root(&r.x, &r.f_at_x)))
        .collect()
}

/// All roots of the secular function in `alpha` over `(0, threshold_alpha(Z))`.
pub fn find_spectrum(z: f64, policy: &PrecisionPolicy) -> Result<PSpectrum> {
    policy.validate()?;
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Domain(format!("Z = {z} must be positive")));
    }
    let digits = if policy.escalate {
        policy.digits.max(required_digits(z))
    } else {
        policy.digits
    };
    if digits > policy.max_digits {
        return Err(Error::PrecisionExhausted {
            required: digits,
            ceiling: policy.max_digits,
            z,
        });
    }
    let work = policy.clone().with_digits(digits);
    let mut s = if work.is_native() {
        scan::<f64>(z, &work)?
    } else {
        scan::<MpReal>(z, &work)?
    };

    let extra = (digits + PEAK_EXTRA_DIGITS).min(policy.max_digits);
    if extra > digits {
        let fine = policy.clone().with_digits(extra);
        for cand in &s.recheck {
            s.roots.extend(recheck_peak(z, cand, &fine)?);
        }
    }
    s.roots.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    s.roots.dedup_by(|b, a| (b.alpha - a.alpha).abs() <= policy.root_tol);

    Ok(PSpectrum {
        z,
        alpha_max: threshold_alpha(z),
        roots: s.roots,
        peak: s.peak,
        digits_used: digits,
    })
}

pub fn count_levels(z: f64, policy: &PrecisionPolicy) -> Result<usize> {
    Ok(find_spectrum(z, policy)?.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepEvent {
    DoubletBirth,
    DoubletLoss,
    ThresholdEntry,
}

impl SweepEvent {
    pub fn name(self) -> &'static str {
        match self {
            SweepEvent::DoubletBirth => "doublet_birth",
            SweepEvent::DoubletLoss => "doublet_loss",
            SweepEvent::ThresholdEntry => "threshold_entry",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub z: f64,
    pub n_levels: usize,
    pub delta: i64,
    pub events: Vec<SweepEvent>,
    pub spectrum: PSpectrum,
}

fn classify(prev: &PSpectrum, cur: &PSpectrum) -> (i64, Vec<SweepEvent>) {
    let delta = cur.len() as i64 - prev.len() as i64;
    let mut events = Vec::new();
    // roots beyond the previous threshold can only have entered through it
    let entered = cur.roots.iter().filter(|r| r.alpha >= prev.alpha_max).count() as i64;
    if delta > 0 && entered > 0 {
        events.push(SweepEvent::ThresholdEntry);
    }
    if delta - entered.min(delta.max(0)) >= 2 {
        events.push(SweepEvent::DoubletBirth);
    }
    if delta <= -2 {
        events.push(SweepEvent::DoubletLoss);
    }
    (delta, events)
}

/// Level counts over strictly increasing `Z`, evaluated in parallel and
/// returned in input order.
pub fn sweep(z_values: &[f64], policy: &PrecisionPolicy) -> Result<Vec<SweepRecord>> {
    policy.validate()?;
    if let Some(w) = z_values.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::Domain(format!(
            "Z values must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    let spectra = z_values
        .par_iter()
        .map(|&z| {
            find_spectrum(z, policy).map_err(|e| match e {
                e @ Error::PrecisionExhausted { .. } => e,
                e => Error::AtCoupling { z, source: Box::new(e) },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<SweepRecord> = Vec::with_capacity(spectra.len());
    for s in spectra {
        let (delta, events) = match out.last() {
            Some(prev) => classify(&prev.spectrum, &s),
            None => (0, Vec::new()),
        };
        out.push(SweepRecord {
            z: s.z,
            n_levels: s.len(),
            delta,
            events,
            spectrum: s,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoubletBirth {
    pub z_star: f64,
    pub alpha_star: f64,
    /// `8 alpha_star^3`
    pub energy_star: f64,
    /// Final bracket on `Z`.
    pub z_lo: f64,
    pub z_hi: f64,
}

/// Relative width of the final `Z` bracket.
const BIRTH_Z_TOL: f64 = 1e-7;
const BIRTH_MAX_STEPS: u32 = 80;

/// Bisects on `Z` for the point where the level count jumps by two through a
/// new interior pair of roots.
pub fn locate_doublet_birth(z_lo: f64, z_hi: f64, policy: &PrecisionPolicy) -> Result<DoubletBirth> {
    if !(z_lo > 0.0 && z_lo < z_hi && z_hi.is_finite()) {
        return Err(Error::Domain(format!("invalid Z interval ({z_lo}, {z_hi})")));
    }
    let none = || Error::NoBirthInInterval { z_lo, z_hi };
    let mut lo = find_spectrum(z_lo, policy)?;
    let mut hi = find_spectrum(z_hi, policy)?;
    if hi.len() != lo.len() + 2 {
        return Err(none());
    }
    let mut steps = 0;
    while hi.z - lo.z > BIRTH_Z_TOL * hi.z && steps < BIRTH_MAX_STEPS {
        steps += 1;
        let mid = find_spectrum(0.5 * (lo.z + hi.z), policy)?;
        if mid.len() == lo.len() {
            lo = mid;
        } else if mid.len() == hi.len() {
            hi = mid;
        } else {
            // two separate single-level transitions
            return Err(none());
        }
    }
    let pair = new_pair(&lo, &hi).ok_or_else(none)?;
    let alpha_star = 0.5 * (hi.roots[pair].alpha + hi.roots[pair + 1].alpha);
    Ok(DoubletBirth {
        z_star: 0.5 * (lo.z + hi.z),
        alpha_star,
        energy_star: 8.0 * alpha_star.powi(3),
        z_lo: lo.z,
        z_hi: hi.z,
    })
}

/// Index of the adjacent pair in `hi` whose removal best reproduces `lo`,
/// provided it lies strictly inside the scan range.
fn new_pair(lo: &PSpectrum, hi: &PSpectrum) -> Option<usize> {
    let a = lo.alphas();
    let b = hi.alphas();
    let mismatch = |i: usize| {
        let rest = b[..i].iter().chain(b[i + 2..].iter());
        rest.zip(a.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    };
    let i = (0..b.len() - 1).min_by(|&i, &j| mismatch(i).total_cmp(&mismatch(j)))?;
    let spacing = hi.alpha_max / grid_intervals(0.0, hi.alpha_max, &PrecisionPolicy::default()) as f64;
    (b[i + 1] < hi.alpha_max - spacing).then_some(i)
}
