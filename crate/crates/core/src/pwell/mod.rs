//! Third-order momentum-space problem with a square-well kinetic term.
//!
//! The kinetic energy is `T(p) = Z` for `|p| > 1` and zero inside. With
//! `E = 8 alpha^3` and `Z = E + 8 beta^3` the regional solutions are
//!
//! ```text
//! psi_-(p) = c e^(beta p) cos(sqrt3 beta p + eta)                   p < -1
//! psi_0(p) = d e^(2 alpha p) + f e^(-alpha p) cos(sqrt3 alpha p + theta)
//! psi_+(p) = g e^(-2 beta p)                                        p > 1
//! ```
//!
//! and bound states are the zeros of
//!
//! ```text
//! (1 - 4t + t^2) cos(2 sqrt3 alpha) + sqrt3 (1 - t^2) sin(2 sqrt3 alpha)
//!     - ((1 - t + t^2) / (1 + t) e^(-3 alpha))^2
//! ```
//!
//! with `t = beta / alpha`.

mod spectrum;

pub use spectrum::{
    count_levels, find_spectrum, locate_doublet_birth, required_digits, sweep, DoubletBirth,
    PRoot, PSpectrum, Peak, SweepEvent, SweepRecord,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{bisect, brackets_in_samples, sample_uniform, PrecisionPolicy};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PWellModel {
    pub z: f64,
}

impl PWellModel {
    pub fn new(z: f64) -> Result<Self> {
        if z > 0.0 && z.is_finite() {
            Ok(PWellModel { z })
        } else {
            Err(Error::Domain(format!("well height Z = {z} must be positive")))
        }
    }

    pub fn threshold_alpha(&self) -> f64 {
        threshold_alpha(self.z)
    }

    pub fn spectrum(&self, policy: &PrecisionPolicy) -> Result<PSpectrum> {
        find_spectrum(self.z, policy)
    }
}

/// Energy parametrization of one trial energy `E` in `(0, Z)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PParams<R = f64> {
    pub z: R,
    pub energy: R,
    pub alpha: R,
    pub beta: R,
    /// `beta / alpha`
    pub t: R,
    /// `(1 - t + t^2)^(-1/2)`
    pub r_e: R,
}

impl<R: Real> PParams<R> {
    pub fn to_f64(&self) -> PParams<f64> {
        PParams {
            z: self.z.to_f64(),
            energy: self.energy.to_f64(),
            alpha: self.alpha.to_f64(),
            beta: self.beta.to_f64(),
            t: self.t.to_f64(),
            r_e: self.r_e.to_f64(),
        }
    }
}

fn check_z<R: Real>(z: &R) -> Result<()> {
    if *z > z.zero() && z.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("Z = {} must be positive", z.to_f64())))
    }
}

fn build_params<R: Real>(z: &R, energy: R, alpha: R, beta: R) -> PParams<R> {
    let t = beta.clone() / alpha.clone();
    let r_e = t.one() / (t.one() - t.clone() + t.square()).sqrt();
    PParams {
        z: z.clone(),
        energy,
        alpha,
        beta,
        t,
        r_e,
    }
}

pub fn params<R: Real>(energy: &R, z: &R) -> Result<PParams<R>> {
    check_z(z)?;
    if !(*energy > energy.zero() && energy < z) {
        return Err(Error::Domain(format!(
            "E = {} outside (0, Z = {})",
            energy.to_f64(),
            z.to_f64()
        )));
    }
    let eighth = z.lit(0.125);
    let alpha = (energy.clone() * eighth.clone()).cbrt();
    let beta = ((z.clone() - energy.clone()) * eighth).cbrt();
    Ok(build_params(z, energy.clone(), alpha, beta))
}

/// Parameters from `alpha` in `(0, threshold_alpha(Z))`.
pub fn params_from_alpha<R: Real>(alpha: &R, z: &R) -> Result<PParams<R>> {
    check_z(z)?;
    let a3 = alpha.square() * alpha.clone();
    let rest = z.clone() * z.lit(0.125) - a3.clone();
    if !(*alpha > alpha.zero() && rest > rest.zero()) {
        return Err(Error::Domain(format!(
            "alpha = {} outside (0, {})",
            alpha.to_f64(),
            threshold_alpha(z.to_f64())
        )));
    }
    Ok(build_params(z, a3 * z.lit(8.0), alpha.clone(), rest.cbrt()))
}

/// `(Z / 8)^(1/3)`, where `E` reaches `Z`.
pub fn threshold_alpha(z: f64) -> f64 {
    (z / 8.0).cbrt()
}

pub(crate) fn threshold_alpha_in<R: Real>(z: &R) -> R {
    (z.clone() * z.lit(0.125)).cbrt()
}

/// Secular function at fixed parameters.
///
/// For `t > 1` the common factor `t^2` is pulled out and the bracket is
/// evaluated in `u = 1 / t`, so nothing of size `t^2` is cancelled.
pub fn secular_from_params<R: Real>(pp: &PParams<R>) -> R {
    let alpha = &pp.alpha;
    let s3 = alpha.lit(3.0).sqrt();
    let phase = alpha.lit(2.0) * s3.clone() * alpha.clone();
    let (c, s) = (phase.cos(), phase.sin());
    let decay = (-(alpha.lit(6.0) * alpha.clone())).exp();
    let one = alpha.one();
    let quad = |x: &R, k: f64| x.square() - x.lit(k) * x.clone() + x.one();
    if pp.t > one {
        let u = alpha.clone() / pp.beta.clone();
        let ratio = quad(&u, 1.0) / (u.clone() + one.clone());
        let inner = quad(&u, 4.0) * c + s3 * (u.square() - one) * s - ratio.square() * decay;
        pp.t.square() * inner
    } else {
        let t = &pp.t;
        let ratio = quad(t, 1.0) / (t.clone() + one.clone());
        quad(t, 4.0) * c + s3 * (one - t.square()) * s - ratio.square() * decay
    }
}

pub fn secular_value<R: Real>(energy: &R, z: &R) -> Result<R> {
    Ok(secular_from_params(&params(energy, z)?))
}

pub fn secular_value_alpha<R: Real>(alpha: &R, z: &R) -> Result<R> {
    Ok(secular_from_params(&params_from_alpha(alpha, z)?))
}

/// Normalization-free size of the secular function, `max(1, t^2)`.
pub(crate) fn secular_scale<R: Real>(pp: &PParams<R>) -> R {
    pp.t.square().max_of(pp.t.one())
}

/// Wave-function coefficients, normalized by `g = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PCoeffs<R = f64> {
    pub g_amp: R,
    /// `d e^(2 alpha)`
    pub d_val: R,
    /// `f e^(-alpha)`
    pub f_val: R,
    pub theta: R,
    pub epsilon: i8,
    pub c_amp: R,
    pub eta: R,
}

impl<R: Real> PCoeffs<R> {
    pub fn d(&self, pp: &PParams<R>) -> R {
        self.d_val.clone() * (-(pp.alpha.lit(2.0) * pp.alpha.clone())).exp()
    }

    pub fn f(&self, pp: &PParams<R>) -> R {
        self.f_val.clone() * pp.alpha.exp()
    }

    pub fn to_f64(&self) -> PCoeffs<f64> {
        PCoeffs {
            g_amp: self.g_amp.to_f64(),
            d_val: self.d_val.to_f64(),
            f_val: self.f_val.to_f64(),
            theta: self.theta.to_f64(),
            epsilon: self.epsilon,
            c_amp: self.c_amp.to_f64(),
            eta: self.eta.to_f64(),
        }
    }
}

fn wrap_angle<R: Real>(x: R) -> R {
    let pi = x.pi();
    let two_pi = pi.clone() * x.lit(2.0);
    let mut y = x;
    while y > pi {
        y = y - two_pi.clone();
    }
    while !(y > -pi.clone()) {
        y = y + two_pi.clone();
    }
    y
}

/// `psi_0` and its first two derivatives at `p`.
fn interior_jet<R: Real>(pp: &PParams<R>, d: &R, f: &R, theta: &R, p: &R) -> [R; 3] {
    let a = &pp.alpha;
    let s3 = a.lit(3.0).sqrt();
    let e2 = d.clone() * (a.lit(2.0) * a.clone() * p.clone()).exp();
    let osc = f.clone() * (-(a.clone() * p.clone())).exp();
    let ph = s3.clone() * a.clone() * p.clone() + theta.clone();
    let (c, s) = (ph.cos(), ph.sin());
    let a2 = a.square();
    [
        e2.clone() + osc.clone() * c.clone(),
        a.lit(2.0) * a.clone() * e2.clone() - a.clone() * osc.clone() * (c.clone() + s3.clone() * s.clone()),
        a.lit(4.0) * a2.clone() * e2
            + a.lit(2.0) * a2 * osc * (s3 * s - c),
    ]
}

fn right_jet<R: Real>(pp: &PParams<R>, g: &R, p: &R) -> [R; 3] {
    let b2 = pp.beta.lit(-2.0) * pp.beta.clone();
    let v = g.clone() * (b2.clone() * p.clone()).exp();
    [v.clone(), b2.clone() * v.clone(), b2.square() * v]
}

fn left_jet<R: Real>(pp: &PParams<R>, c_amp: &R, eta: &R, p: &R) -> [R; 3] {
    let b = &pp.beta;
    let s3 = b.lit(3.0).sqrt();
    let v = c_amp.clone() * (b.clone() * p.clone()).exp();
    let ph = s3.clone() * b.clone() * p.clone() + eta.clone();
    let (c, s) = (ph.cos(), ph.sin());
    [
        v.clone() * c.clone(),
        b.clone() * v.clone() * (c.clone() - s3.clone() * s.clone()),
        b.lit(-2.0) * b.square() * v * (c + s3 * s),
    ]
}

/// Coefficients at `(E, Z)`; away from an eigenvalue `(c, eta)` only satisfy
/// the value and slope conditions at `p = -1`.
pub fn coefficients<R: Real>(pp: &PParams<R>) -> PCoeffs<R> {
    let (alpha, beta, t, r) = (&pp.alpha, &pp.beta, &pp.t, &pp.r_e);
    let s3 = alpha.lit(3.0).sqrt();
    let g_amp = alpha.one();
    let big_g = (alpha.lit(-2.0) * beta.clone()).exp();
    let d_val = big_g.clone() / (alpha.lit(3.0) * r.square());

    let phi = (s3.clone() * t.clone()).atan2(&(alpha.lit(2.0) - t.clone()));
    let theta = wrap_angle(phi.clone() - s3.clone() * alpha.clone());
    let cos_target = (alpha.one() - t.clone() * alpha.lit(0.5)) * r.clone();
    let epsilon: i8 = if (phi.cos() * cos_target).is_negative() { -1 } else { 1 };
    let eps = alpha.lit(f64::from(epsilon));
    let f_val = alpha.lit(2.0) * (t.clone() + t.one()) * big_g / (alpha.lit(3.0) * eps * r.clone());

    let mut co = PCoeffs {
        g_amp,
        d_val,
        f_val,
        theta,
        epsilon,
        c_amp: alpha.zero(),
        eta: alpha.zero(),
    };
    let minus_one = -alpha.one();
    let [l1, l2, _] = interior_jet(pp, &co.d(pp), &co.f(pp), &co.theta, &minus_one);
    let x = l1;
    let y = (x.clone() - l2 / beta.clone()) / s3.clone();
    co.c_amp = (x.square() + y.square()).sqrt() * beta.exp();
    co.eta = wrap_angle(y.atan2(&x) + s3 * beta.clone());
    co
}

/// Continuity defects `interior - outer` of `psi, psi', psi''` at both edges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchingResiduals<R = f64> {
    /// At `p = +1`.
    pub right: [R; 3],
    /// At `p = -1`.
    pub left: [R; 3],
    /// `sqrt3 F sin(theta - sqrt3 alpha) + (2t - 1) F cos(theta - sqrt3 alpha)
    ///  + 2 (1 - t + t^2) / (t + 1) D e^(-6 alpha)`
    pub weighted_sum: R,
}

impl<R: Real> MatchingResiduals<R> {
    pub fn max_abs(&self) -> R {
        self.right
            .iter()
            .chain(self.left.iter())
            .fold(self.weighted_sum.zero(), |m, v| m.max_of(v.abs()))
    }
}

pub fn matching_residuals<R: Real>(pp: &PParams<R>, co: &PCoeffs<R>) -> MatchingResiduals<R> {
    let one = pp.alpha.one();
    let minus_one = -one.clone();
    let (d, f) = (co.d(pp), co.f(pp));
    let inner_r = interior_jet(pp, &d, &f, &co.theta, &one);
    let inner_l = interior_jet(pp, &d, &f, &co.theta, &minus_one);
    let outer_r = right_jet(pp, &co.g_amp, &one);
    let outer_l = left_jet(pp, &co.c_amp, &co.eta, &minus_one);
    let diff = |a: [R; 3], b: [R; 3]| -> [R; 3] {
        let [a0, a1, a2] = a;
        let [b0, b1, b2] = b;
        [a0 - b0, a1 - b1, a2 - b2]
    };

    let (alpha, t) = (&pp.alpha, &pp.t);
    let s3 = alpha.lit(3.0).sqrt();
    let ph = co.theta.clone() - s3.clone() * alpha.clone();
    let quad = t.square() - t.clone() + t.one();
    let weighted_sum = s3 * co.f_val.clone() * ph.sin()
        + (alpha.lit(2.0) * t.clone() - t.one()) * co.f_val.clone() * ph.cos()
        + alpha.lit(2.0) * quad / (t.clone() + t.one())
            * co.d_val.clone()
            * (alpha.lit(-6.0) * alpha.clone()).exp();
    MatchingResiduals {
        right: diff(inner_r, outer_r),
        left: diff(inner_l, outer_l),
        weighted_sum,
    }
}

pub fn psi<R: Real>(p: &R, pp: &PParams<R>, co: &PCoeffs<R>) -> R {
    let one = p.one();
    if *p > one {
        right_jet(pp, &co.g_amp, p)[0].clone()
    } else if *p < -one {
        left_jet(pp, &co.c_amp, &co.eta, p)[0].clone()
    } else {
        interior_jet(pp, &co.d(pp), &co.f(pp), &co.theta, p)[0].clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Left,
    Middle,
    Right,
}

const MIDDLE_SCAN_INTERVALS: usize = 4096;

/// Sign changes of `psi` in one region, ordered away from the origin.
///
/// Left-region zeros are listed from `p = -1` downwards and truncated at
/// `limit`; the middle region is scanned on a fixed grid.
pub fn nodal_zeros(pp: &PParams, co: &PCoeffs, region: Region, limit: usize) -> Result<Vec<f64>> {
    if limit == 0 {
        return Err(Error::Domain("zero limit must be positive".into()));
    }
    let tol = PrecisionPolicy::default().residual_tol;
    let residual = secular_from_params(pp) / secular_scale(pp);
    if residual.abs() > tol {
        return Err(Error::NotAnEigenvalue {
            energy: pp.energy,
            residual,
        });
    }
    match region {
        Region::Right => Ok(Vec::new()),
        Region::Left => {
            let w = 3f64.sqrt() * pp.beta;
            let pi = std::f64::consts::PI;
            // zeros of cos(w p + eta) at p_k = (pi/2 + k pi - eta) / w
            let k_first = ((-w + co.eta - pi / 2.0) / pi).floor();
            let mut out = Vec::with_capacity(limit);
            let mut k = k_first;
            while out.len() < limit {
                let p = (pi / 2.0 + k * pi - co.eta) / w;
                if p < -1.0 {
                    out.push(p);
                }
                k -= 1.0;
            }
            Ok(out)
        }
        Region::Middle => {
            let policy = PrecisionPolicy::default();
            let f = |p: &f64| psi(p, pp, co);
            let samples = sample_uniform(&f, &-1.0, &1.0, MIDDLE_SCAN_INTERVALS)?;
            let mut zeros = brackets_in_samples(&samples)
                .iter()
                .map(|b| bisect(f, b, &policy).map(|r| r.x))
                .collect::<Result<Vec<_>>>()?;
            zeros.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
            zeros.truncate(limit);
            Ok(zeros)
        }
    }
}
