//! PT-symmetric imaginary square well in coordinate representation.
//!
//! The potential is `-i T^2` for `x < -pi`, zero inside `(-pi, pi)` and
//! `+i T^2` for `x > pi`, with `hbar = 2m = 1`. Bound states are labelled by
//! a combined index `N`; even `N` carry the `+` tag and odd `N` the `-` tag.
//! Each level is the root `omega` in `(0, 1)` of
//!
//! ```text
//! sin(pi omega / 2) = (2N + 2 - omega) / (4T) * sqrt(2 cos(pi omega / 2))
//! ```
//!
//! solved in the rearranged form `cos(pi omega / 2) = 1 / (R + sqrt(R^2 + 1))`
//! with `sqrt(R) = (2N + 2 - omega) / (4T)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{bisect, brackets_in_samples, grid_intervals, sample_uniform, PrecisionPolicy};
use crate::real::{Cplx, MpReal, Real};

/// Half-width of the well is fixed at pi; only the height scale varies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XWellModel {
    pub t: f64,
}

impl XWellModel {
    pub fn new(t: f64) -> Result<Self> {
        if t > 0.0 && t.is_finite() {
            Ok(XWellModel { t })
        } else {
            Err(Error::Domain(format!("well height scale T = {t} must be positive")))
        }
    }

    pub fn level(&self, n: u32, policy: &PrecisionPolicy) -> Result<XLevel> {
        solve_level(n, &self.t, policy)
    }

    pub fn spectrum(&self, n_max: u32, policy: &PrecisionPolicy) -> Result<Vec<XLevel>> {
        spectrum_with_policy(self.t, n_max, policy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Plus,
    Minus,
}

impl Parity {
    pub fn of_index(n: u32) -> Self {
        if n % 2 == 0 {
            Parity::Plus
        } else {
            Parity::Minus
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Parity::Plus => "+",
            Parity::Minus => "-",
        }
    }
}

/// One bound state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XLevel<R = f64> {
    pub n: u32,
    pub parity: Parity,
    pub t: R,
    /// Root of the secular equation, in `(0, 1)`.
    pub omega: R,
    /// `pi * omega / 2`
    pub alpha: R,
    /// Interior wavenumber, `(2N + 2 - omega) / 4`.
    pub k: R,
    /// Decay rate `Re sigma` of the outer solution.
    pub p: R,
    /// Oscillation rate `Im sigma` of the outer solution.
    pub q: R,
    pub energy: R,
    /// Imaginary log-derivative at the origin, `psi'(0) = i G`.
    pub g: R,
    /// `R(omega, N) = ((2N + 2 - omega) / (4T))^2`
    pub r_aux: R,
}

impl<R: Real> XLevel<R> {
    pub fn to_f64(&self) -> XLevel<f64> {
        XLevel {
            n: self.n,
            parity: self.parity,
            t: self.t.to_f64(),
            omega: self.omega.to_f64(),
            alpha: self.alpha.to_f64(),
            k: self.k.to_f64(),
            p: self.p.to_f64(),
            q: self.q.to_f64(),
            energy: self.energy.to_f64(),
            g: self.g.to_f64(),
            r_aux: self.r_aux.to_f64(),
        }
    }

    /// `(p + q) / k` and `(p - q) / k`, the two roots for `tan(k pi)`.
    ///
    /// `p - q` is formed as `-k^2 / (p + q)`; the direct difference cancels
    /// when `q >> k`.
    pub fn tangent_branches(&self) -> (R, R) {
        let sum = self.p.clone() + self.q.clone();
        (
            sum.clone() / self.k.clone(),
            -(self.k.clone() / sum),
        )
    }
}

fn sqrt_r<R: Real>(omega: &R, n: u32, t: &R) -> R {
    (omega.lit(f64::from(2 * n + 2)) - omega.clone()) / (t.clone() * t.lit(4.0))
}

fn check_t<R: Real>(t: &R) -> Result<()> {
    if *t > t.zero() && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("T = {} must be positive", t.to_f64())))
    }
}

/// `(p, q, k)` from the angle `alpha` in `(0, pi/2)`.
pub fn params_from_alpha<R: Real>(alpha: &R, t: &R) -> Result<(R, R, R)> {
    check_t(t)?;
    let half_pi = alpha.pi() / alpha.lit(2.0);
    if !(*alpha > alpha.zero() && *alpha < half_pi) {
        return Err(Error::Domain(format!(
            "alpha = {} outside (0, pi/2)",
            alpha.to_f64()
        )));
    }
    let c = alpha.cos();
    let q = t.clone() / (alpha.lit(2.0) * c.clone()).sqrt();
    let p = q.clone() * c;
    let k = q.clone() * alpha.sin();
    Ok((p, q, k))
}

/// `sin(pi w / 2) - (2N + 2 - w) / (4T) * sqrt(2 cos(pi w / 2))`.
pub fn secular_residual<R: Real>(omega: &R, n: u32, t: &R) -> Result<R> {
    check_t(t)?;
    if !(*omega > omega.zero() && *omega < omega.one()) {
        return Err(Error::Domain(format!(
            "omega = {} outside (0, 1)",
            omega.to_f64()
        )));
    }
    let a = omega.pi() * omega.clone() / omega.lit(2.0);
    Ok(a.sin() - sqrt_r(omega, n, t) * (a.lit(2.0) * a.cos()).sqrt())
}

/// `cos(pi w / 2) - 1 / (R + sqrt(R^2 + 1))`; positive at `0+`, negative at `1-`.
fn rearranged<R: Real>(omega: &R, n: u32, t: &R) -> R {
    let r = sqrt_r(omega, n, t).square();
    let rhs = omega.one() / (r.clone() + (r.square() + r.one()).sqrt());
    (omega.pi() * omega.clone() / omega.lit(2.0)).cos() - rhs
}

/// Outer decay parameters from `(k, T)`: `q^2 - p^2 = k^2`, `2 p q = T^2`.
fn decay_split<R: Real>(k: &R, t: &R) -> (R, R) {
    let k2 = k.square();
    let t2 = t.square();
    let root = (k2.square() + t2.square()).sqrt();
    let q = ((k2 + root) * k.lit(0.5)).sqrt();
    let p = t2 / (q.clone() * k.lit(2.0));
    (p, q)
}

/// Builds the level record for a given `omega`, root or not.
pub fn level_from_omega<R: Real>(n: u32, t: &R, omega: R) -> XLevel<R> {
    let parity = Parity::of_index(n);
    let alpha = omega.pi() * omega.clone() / omega.lit(2.0);
    let k = (omega.lit(f64::from(2 * n + 2)) - omega.clone()) / omega.lit(4.0);
    let (p, q) = decay_split(&k, t);
    let k2 = k.square();
    // q - p = k^2 / (q + p), so the minus branch -k^2 / (q - p) is -(q + p)
    let g = match parity {
        Parity::Plus => -(k2.clone() / (q.clone() + p.clone())),
        Parity::Minus => -(q.clone() + p.clone()),
    };
    let r_aux = sqrt_r(&omega, n, t).square();
    XLevel {
        n,
        parity,
        t: t.clone(),
        omega,
        alpha,
        k,
        p,
        q,
        energy: k2,
        g,
        r_aux,
    }
}

/// Solves for level `N` by bisection on the rearranged secular equation.
pub fn solve_level<R: Real>(n: u32, t: &R, policy: &PrecisionPolicy) -> Result<XLevel<R>> {
    check_t(t)?;
    policy.validate()?;
    // the rearranged form is finite on the closed interval, and in weak
    // coupling the root sits closer to 1 than any edge margin
    let f = |w: &R| rearranged(w, n, t);
    let samples = sample_uniform(&f, &t.zero(), &t.one(), grid_intervals(0.0, 1.0, policy))?;
    let brackets = brackets_in_samples(&samples);
    let bracket = match brackets.as_slice() {
        [b] => b,
        [] => {
            return Err(Error::ConvergenceFailure(format!(
                "no sign change for N = {n}, T = {}",
                t.to_f64()
            )))
        }
        many => {
            return Err(Error::ConvergenceFailure(format!(
                "{} sign changes for N = {n}, T = {}",
                many.len(),
                t.to_f64()
            )))
        }
    };
    let root = bisect(f, bracket, policy)?;
    if !(root.x > t.zero() && root.x < t.one()) {
        return Err(Error::ConvergenceFailure(format!(
            "omega for N = {n}, T = {} is not separable from the interval edge at {} digits",
            t.to_f64(),
            policy.digits
        )));
    }
    Ok(level_from_omega(n, t, root.x))
}

/// Levels `N = 0..=n_max`, increasing in energy.
pub fn spectrum<R: Real>(t: &R, n_max: u32, policy: &PrecisionPolicy) -> Result<Vec<XLevel<R>>> {
    let levels = (0..=n_max)
        .map(|n| {
            solve_level(n, t, policy).map_err(|e| Error::AtLevel {
                n,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(w) = levels.windows(2).find(|w| !(w[0].energy < w[1].energy)) {
        return Err(Error::ConvergenceFailure(format!(
            "levels N = {} and {} are not ordered",
            w[0].n, w[1].n
        )));
    }
    Ok(levels)
}

/// [`spectrum`] at the arithmetic selected by `policy.digits`.
pub fn spectrum_with_policy(t: f64, n_max: u32, policy: &PrecisionPolicy) -> Result<Vec<XLevel>> {
    policy.validate()?;
    if policy.is_native() {
        spectrum(&t, n_max, policy)
    } else {
        let t = MpReal::with_digits(t, policy.digits);
        Ok(spectrum(&t, n_max, policy)?
            .iter()
            .map(XLevel::to_f64)
            .collect())
    }
}

pub fn g_parameter<R: Real>(level: &XLevel<R>) -> R {
    level.g.clone()
}

/// Complex value of `G - (-i k tan((k + Omega) pi))` with `tan(Omega pi) = -sigma / k`.
///
/// The tangent quotient is evaluated as
/// `(k sin k pi - sigma cos k pi) / (k cos k pi + sigma sin k pi)`, which is
/// regular where `tan(k pi)` itself diverges.
pub fn matching_residual<R: Real>(level: &XLevel<R>) -> Result<Cplx<R>> {
    let k = &level.k;
    let kpi = k.clone() * k.pi();
    let (s, c) = (kpi.sin(), kpi.cos());
    let sigma = Cplx::new(level.p.clone(), level.q.clone());
    let kc = Cplx::real(k.clone());
    let num = kc.scale(&s) - sigma.scale(&c);
    let den = kc.scale(&c) + sigma.scale(&s);
    let scale = k.clone() + sigma.abs();
    if den.abs() < scale * k.lit(1e-10) {
        return Err(Error::TangentPole { k: k.to_f64() });
    }
    let tangent = num / den;
    let rhs = tangent.scale(k).mul_i();
    Ok(Cplx::real(level.g.clone()) + rhs)
}

/// Number of series terms in the weak-coupling estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesTerms {
    One,
    Two,
}

const WEAK_COUPLING_MIN_R: f64 = 10.0;
const STRONG_COUPLING_MAX_R: f64 = 0.1;

/// Large-`R` estimate `omega = 1 - eta`, with `R` frozen at `omega = 1`.
pub fn weak_coupling_estimate(n: u32, t: f64, terms: SeriesTerms) -> Result<f64> {
    check_t(&t)?;
    let r = sqrt_r(&1.0, n, &t).powi(2);
    if r < WEAK_COUPLING_MIN_R {
        return Err(Error::OutOfRegime {
            r,
            why: "weak-coupling series needs R >= 10",
        });
    }
    let mut eta = 1.0 / (2.0 * r);
    if terms == SeriesTerms::Two {
        eta -= 5.0 / (48.0 * r.powi(3));
    }
    Ok(1.0 - eta * 2.0 / std::f64::consts::PI)
}

/// Small-`R` estimate, with `R` frozen at `omega = 0`.
pub fn strong_coupling_estimate(n: u32, t: f64) -> Result<f64> {
    check_t(&t)?;
    let r = sqrt_r(&0.0, n, &t).powi(2);
    if r > STRONG_COUPLING_MAX_R {
        return Err(Error::OutOfRegime {
            r,
            why: "strong-coupling estimate needs R <= 0.1",
        });
    }
    let inner = 0.5 * (r - ((1.0 + r * r).sqrt() - 1.0));
    Ok(4.0 / std::f64::consts::PI * inner.sqrt().asin())
}

/// Infinitely deep Hermitian well of width `2 pi`: `E_N = (N + 1)^2 / 4`.
pub fn hermitian_box_levels(count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Domain("level count must be positive".into()));
    }
    Ok((1..=count).map(|n| (n * n) as f64 / 4.0).collect())
}

/// Wave function of a solved level, normalized by `psi(0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct XWaveFunction<R = f64> {
    pub level: XLevel<R>,
    /// `B = i G / k`, stored as its imaginary part `G / k`.
    pub b_imag: R,
    pub l_out: R,
    pub n_out: R,
    pub sigma_re: R,
    pub sigma_im: R,
}

impl<R: Real> XWaveFunction<R> {
    pub fn new(level: &XLevel<R>) -> Self {
        let b_imag = level.g.clone() / level.k.clone();
        let sigma = Cplx::new(level.p.clone(), level.q.clone());
        let kpi = level.k.clone() * level.k.pi();
        let at_edge = Cplx::new(kpi.cos(), b_imag.clone() * kpi.sin());
        let amp = at_edge * sigma.scale(&level.k.pi()).exp();
        XWaveFunction {
            level: level.clone(),
            b_imag,
            l_out: amp.re,
            n_out: amp.im,
            sigma_re: level.p.clone(),
            sigma_im: level.q.clone(),
        }
    }

    fn sigma(&self) -> Cplx<R> {
        Cplx::new(self.sigma_re.clone(), self.sigma_im.clone())
    }

    fn amplitude(&self) -> Cplx<R> {
        Cplx::new(self.l_out.clone(), self.n_out.clone())
    }

    pub fn eval(&self, x: &R) -> Cplx<R> {
        if x.is_negative() {
            return self.eval(&-x.clone()).conj();
        }
        let k = &self.level.k;
        if *x < x.pi() {
            let kx = k.clone() * x.clone();
            Cplx::new(kx.cos(), self.b_imag.clone() * kx.sin())
        } else {
            self.amplitude() * (-self.sigma().scale(x)).exp()
        }
    }

    pub fn derivative(&self, x: &R) -> Cplx<R> {
        if x.is_negative() {
            // psi(-x) = conj(psi(x)) gives psi'(-x) = -conj(psi'(x))
            return -self.derivative(&-x.clone()).conj();
        }
        let k = &self.level.k;
        if *x < x.pi() {
            let kx = k.clone() * x.clone();
            Cplx::new(
                -(k.clone() * kx.sin()),
                self.level.g.clone() * kx.cos(),
            )
        } else {
            -(self.sigma() * self.eval(x))
        }
    }

    /// Interior-minus-exterior jumps of `psi` and `psi'` at `x = pi`.
    pub fn edge_jumps(&self) -> (Cplx<R>, Cplx<R>) {
        let k = &self.level.k;
        let kpi = k.clone() * k.pi();
        let inside = Cplx::new(kpi.cos(), self.b_imag.clone() * kpi.sin());
        let d_inside = Cplx::new(-(k.clone() * kpi.sin()), self.level.g.clone() * kpi.cos());
        let pi = k.pi();
        let outside = self.eval(&pi);
        let d_outside = -(self.sigma() * outside.clone());
        (inside - outside, d_inside - d_outside)
    }
}

pub fn wavefunction<R: Real>(level: &XLevel<R>, x: &R) -> Cplx<R> {
    XWaveFunction::new(level).eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn policy() -> PrecisionPolicy {
        PrecisionPolicy::default()
    }

    #[test]
    fn params_limits_and_exact_values() {
        let (p, q, k) = params_from_alpha(&1e-9, &1.0).unwrap();
        assert!((q - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!((p - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!(k.abs() < 1e-8);

        let (p, q, k) = params_from_alpha(&(PI / 3.0), &1.0).unwrap();
        assert!((q - 1.0).abs() < 1e-15);
        assert!((p - 0.5).abs() < 1e-15);
        assert!((k - 3f64.sqrt() / 2.0).abs() < 1e-15);

        assert!(params_from_alpha(&0.0, &1.0).is_err());
        assert!(params_from_alpha(&(PI / 2.0), &1.0).is_err());
        assert!(params_from_alpha(&0.5, &-1.0).is_err());
    }

    #[test]
    fn params_satisfy_sigma_split() {
        for i in 1..100 {
            let alpha = f64::from(i) / 100.0 * PI / 2.0;
            for t in [0.01, 1.0, 30.0] {
                let (p, q, k) = params_from_alpha(&alpha, &t).unwrap();
                let scale = q * q;
                assert!((p * p + k * k - q * q).abs() <= 8.0 * f64::EPSILON * scale);
                assert!((2.0 * p * q - t * t).abs() <= 8.0 * f64::EPSILON * t * t);
            }
        }
    }

    #[test]
    fn secular_residual_limits() {
        let t = 1.5;
        for n in 0..4 {
            let at_zero = secular_residual(&1e-12, n, &t).unwrap();
            let expect = -(f64::from(2 * n + 2)) / (4.0 * t) * 2f64.sqrt();
            assert!((at_zero - expect).abs() < 1e-9);
            let at_one = secular_residual(&(1.0 - 1e-15), n, &t).unwrap();
            assert!((at_one - 1.0).abs() < 1e-6);
        }
        assert!(secular_residual(&0.0, 0, &1.0).is_err());
        assert!(secular_residual(&1.0, 0, &1.0).is_err());
    }

    #[test]
    fn secular_residual_single_crossing_on_fine_grid() {
        // 10^4-point grid oracle for N = 0, T = 1
        let vals: Vec<f64> = (1..10_000)
            .map(|i| secular_residual(&(f64::from(i) / 1e4), 0, &1.0).unwrap())
            .collect();
        let crossings = vals.windows(2).filter(|w| (w[0] < 0.0) != (w[1] < 0.0)).count();
        assert_eq!(crossings, 1);
    }

    #[test]
    fn ground_state_matches_brute_force_grid() {
        // independent oracle: minimize |residual| over a 10^6-point grid
        let mut best = (0.0, f64::INFINITY);
        for i in 1..1_000_000 {
            let w = f64::from(i) / 1e6;
            let v = secular_residual(&w, 0, &1.0).unwrap().abs();
            if v < best.1 {
                best = (w, v);
            }
        }
        let level = solve_level(0, &1.0, &policy()).unwrap();
        assert!((level.omega - best.0).abs() <= 1e-6, "{} vs {}", level.omega, best.0);
        assert!(secular_residual(&level.omega, 0, &1.0).unwrap().abs() <= 1e-10);
        assert_eq!(level.parity, Parity::Plus);
    }

    #[test]
    fn level_invariants_hold() {
        for t in [1e-3, 0.1, 1.0, 10.0, 1e3] {
            for n in 0..20 {
                let l = solve_level(n, &t, &policy()).unwrap();
                let nf = f64::from(n);
                assert!(l.omega > 0.0 && l.omega < 1.0);
                assert_eq!(l.k, (2.0 * nf + 2.0 - l.omega) / 4.0);
                let q2 = l.q * l.q;
                assert!((l.p * l.p + l.k * l.k - q2).abs() <= 10.0 * f64::EPSILON * q2);
                assert!((2.0 * l.p * l.q - t * t).abs() <= 10.0 * f64::EPSILON * t * t);
                assert!(l.energy > (nf + 0.5).powi(2) / 4.0);
                assert!(l.energy < (nf + 1.0).powi(2) / 4.0);
                assert_eq!(l.parity, Parity::of_index(n));
                let g = match l.parity {
                    Parity::Plus => -l.k * l.k / (l.q + l.p),
                    Parity::Minus => -l.k * l.k / (l.q - l.p),
                };
                // the direct minus-branch quotient loses (q/k)^2 to cancellation
                let cond = 1.0 + (l.q / l.k).powi(2);
                assert!((l.g - g).abs() <= 10.0 * f64::EPSILON * cond * g.abs());
            }
        }
    }

    #[test]
    fn deep_well_ground_state_is_hermitian_box() {
        let l = solve_level(0, &1e6, &policy()).unwrap();
        assert!((l.energy - 0.25).abs() < 1e-2);
        let boxed = hermitian_box_levels(6).unwrap();
        for (l, e) in spectrum(&1e6, 5, &policy()).unwrap().iter().zip(boxed) {
            assert!((l.energy - e).abs() < 1e-2 * e);
        }
    }

    #[test]
    fn spectrum_intervals_and_ordering() {
        let levels = spectrum(&1.0, 5, &policy()).unwrap();
        assert_eq!(levels.len(), 6);
        assert!(levels.windows(2).all(|w| w[0].energy < w[1].energy));
        for l in &levels {
            let m = f64::from(l.n / 2);
            match l.parity {
                Parity::Plus => assert!(l.k > m + 0.25 && l.k < m + 0.5),
                Parity::Minus => assert!(l.k > m + 0.75 && l.k < m + 1.0),
            }
        }
    }

    #[test]
    fn weak_well_roots_near_one() {
        for l in spectrum(&1e-3, 3, &policy()).unwrap() {
            assert!(1.0 - l.omega < 1e-3);
        }
    }

    #[test]
    fn g_parameter_regimes() {
        let deep = spectrum(&1e3, 5, &policy()).unwrap();
        for l in &deep {
            match l.parity {
                Parity::Plus => assert!(g_parameter(l).abs() < 1e-2),
                Parity::Minus => {
                    assert!(g_parameter(l).abs() > 10.0);
                    assert!((g_parameter(l) + (l.q + l.p)).abs() < 1e-9 * (l.q + l.p));
                }
            }
        }
        let weak = solve_level(0, &1e-3, &policy()).unwrap();
        assert!((weak.g + weak.k).abs() < 1e-3 * weak.k);
    }

    #[test]
    fn matching_residual_vanishes_at_levels() {
        for t in [0.1, 1.0, 10.0] {
            for l in spectrum(&t, 9, &policy()).unwrap() {
                let r = matching_residual(&l).unwrap();
                assert!(r.abs() <= 1e-10, "T={t} N={} |r|={}", l.n, r.abs());
            }
        }
    }

    #[test]
    fn tangent_branches_multiply_to_minus_one() {
        for l in spectrum(&2.0, 6, &policy()).unwrap() {
            let (x1, x2) = l.tangent_branches();
            assert!((x1 * x2 + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn matching_residual_is_sensitive_to_omega() {
        let l = solve_level(1, &1.0, &policy()).unwrap();
        let off = level_from_omega(1, &1.0, l.omega + 1e-4);
        assert!(matching_residual(&off).unwrap().abs() >= 1e-6);
    }

    #[test]
    fn weak_coupling_series() {
        for n in 0..4 {
            let exact = solve_level(n, &1e-2, &policy()).unwrap().omega;
            let two = weak_coupling_estimate(n, 1e-2, SeriesTerms::Two).unwrap();
            assert!((two - exact).abs() <= 1e-6, "N={n}: {two} vs {exact}");
        }
        assert!(matches!(
            weak_coupling_estimate(0, 1.0, SeriesTerms::One),
            Err(Error::OutOfRegime { .. })
        ));
        let far = weak_coupling_estimate(0, 1e-8, SeriesTerms::Two).unwrap();
        assert!(1.0 - far < 1e-15);
    }

    #[test]
    fn two_terms_beat_one_inside_regime() {
        // T = 0.1 puts N = 0 at R = 6.25, outside the guarded regime
        for t in [1e-1, 1e-2, 1e-3] {
            for n in 0..4 {
                let (Ok(one), Ok(two)) = (
                    weak_coupling_estimate(n, t, SeriesTerms::One),
                    weak_coupling_estimate(n, t, SeriesTerms::Two),
                ) else {
                    assert!(t == 1e-1 && n == 0);
                    continue;
                };
                let exact = solve_level(n, &t, &policy()).unwrap().omega;
                assert!((two - exact).abs() <= (one - exact).abs(), "T={t} N={n}");
            }
        }
    }

    #[test]
    fn strong_coupling_estimate_regime() {
        for n in 0..4 {
            let exact = solve_level(n, &1e3, &policy()).unwrap().omega;
            let est = strong_coupling_estimate(n, 1e3).unwrap();
            assert!(est > 0.0 && est < 1.0);
            assert!((est - exact).abs() <= 1e-4);
        }
        assert!(strong_coupling_estimate(0, 1e300).unwrap() < 1e-100);
        assert!(matches!(
            strong_coupling_estimate(0, 1.0),
            Err(Error::OutOfRegime { .. })
        ));
    }

    #[test]
    fn hermitian_levels() {
        assert_eq!(hermitian_box_levels(3).unwrap(), vec![0.25, 1.0, 2.25]);
        assert_eq!(hermitian_box_levels(1).unwrap(), vec![0.25]);
        assert!(hermitian_box_levels(0).is_err());
    }

    #[test]
    fn wavefunction_normalization_and_slope() {
        let l = solve_level(2, &1.0, &policy()).unwrap();
        let psi = XWaveFunction::new(&l);
        let at0 = psi.eval(&0.0);
        assert_eq!((at0.re, at0.im), (1.0, 0.0));
        let h = 1e-7;
        let fd = (psi.eval(&h) - at0).scale(&(1.0 / h));
        assert!(fd.re.abs() < 1e-5);
        assert!((fd.im - l.g).abs() < 1e-5);
    }

    #[test]
    fn wavefunction_is_continuous_at_edge() {
        for l in spectrum(&3.0, 5, &policy()).unwrap() {
            let (jump, djump) = XWaveFunction::new(&l).edge_jumps();
            assert!(jump.abs() <= 1e-10);
            assert!(djump.abs() <= 1e-10, "N={} {}", l.n, djump.abs());
        }
    }

    #[test]
    fn wavefunction_pt_symmetry() {
        let l = solve_level(3, &2.0, &policy()).unwrap();
        let psi = XWaveFunction::new(&l);
        for i in 0..1000 {
            let x = -8.0 + 16.0 * f64::from(i) / 999.0;
            let a = psi.eval(&x);
            let b = psi.eval(&-x).conj();
            assert!((a - b).abs() <= 1e-14);
        }
    }

    #[test]
    fn weak_coupling_decay_is_slow() {
        let l = solve_level(0, &1e-3, &policy()).unwrap();
        assert!(l.p < 1e-5);
        assert!((l.p - l.q / (2.0 * l.r_aux)).abs() < 1e-3 * l.p);
        let psi = XWaveFunction::new(&l);
        let ratio = psi.eval(&200.0).abs() / psi.eval(&100.0).abs();
        assert!((ratio - (-100.0 * l.p).exp()).abs() < 1e-12);
    }

    #[test]
    fn wavefunction_real_part_even_imaginary_odd() {
        let l = solve_level(0, &0.5, &policy()).unwrap();
        let psi = XWaveFunction::new(&l);
        for x in [0.3, 1.7, 3.0, 3.2, 9.0] {
            let (a, b) = (psi.eval(&x), psi.eval(&-x));
            assert_eq!(a.re, b.re);
            assert_eq!(a.im, -b.im);
        }
    }

    proptest::proptest! {
        #[test]
        fn rearranged_rhs_in_unit_interval(r in 0.0f64..1e6) {
            let rhs = 1.0 / (r + (r * r + 1.0).sqrt());
            proptest::prop_assert!(rhs > 0.0 && rhs <= 1.0);
        }

        #[test]
        fn bracket_always_exists(n in 0u32..50, log_t in -4.0f64..4.0) {
            let t = 10f64.powf(log_t);
            proptest::prop_assert!(secular_residual(&1e-12, n, &t).unwrap() < 0.0);
            proptest::prop_assert!(secular_residual(&(1.0 - 1e-12), n, &t).unwrap() > 0.0);
            proptest::prop_assert!(rearranged(&1e-12, n, &t) > 0.0);
            proptest::prop_assert!(rearranged(&(1.0 - 1e-12), n, &t) < 0.0);
        }

        #[test]
        fn solved_levels_obey_bounds(n in 0u32..30, log_t in -3.0f64..3.0) {
            let t = 10f64.powf(log_t);
            let l = solve_level(n, &t, &policy()).unwrap();
            let nf = f64::from(n);
            proptest::prop_assert!(l.energy > (nf + 0.5).powi(2) / 4.0);
            proptest::prop_assert!(l.energy < (nf + 1.0).powi(2) / 4.0);
        }
    }

    #[test]
    fn extended_precision_agrees_with_native() {
        let native = solve_level(4, &1.0, &policy()).unwrap();
        let t = MpReal::with_digits(1.0, 32);
        let ext = solve_level(4, &t, &policy().with_digits(32)).unwrap();
        assert!((ext.omega.to_f64() - native.omega).abs() < 1e-12);
        let r = matching_residual(&ext).unwrap();
        assert!(r.abs().to_f64() < 1e-12);
    }
}
