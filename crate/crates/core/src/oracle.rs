//! Brute-force bound-state detectors built from raw continuity conditions.
//!
//! Nothing here calls the closed-form secular functions; only the regional
//! general solutions are shared with `xwell` and `pwell`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{bisect, scan_sign_changes, sample_uniform, shrink_edges, grid_intervals, PrecisionPolicy};
use crate::real::{Cplx, MpReal, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetSample {
    /// `E` for the coordinate model, `alpha` for the momentum model.
    pub parameter: f64,
    pub det_value: f64,
    pub digits: u32,
}

/// Determinant of the matching of `a cos kx + b sin kx` onto `e^(conj(sigma) x)`
/// at `x = -pi` and `e^(-sigma x)` at `x = pi`, with `sigma^2 = i T^2 - E`.
///
/// The two rows are `(a1, a2)` and `(-conj a1, conj a2)`, so the value is
/// real up to roundoff.
pub fn x_matching_det<R: Real>(energy: &R, t: &R) -> Result<Cplx<R>> {
    if !(*energy > energy.zero()) {
        return Err(Error::Domain(format!("E = {} must be positive", energy.to_f64())));
    }
    if !(*t > t.zero()) {
        return Err(Error::Domain(format!("T = {} must be positive", t.to_f64())));
    }
    let k = energy.sqrt();
    let sigma = Cplx::new(-energy.clone(), t.square()).sqrt();
    let sigma_bar = sigma.conj();
    let pi = k.pi();
    let jet = |x: &R| {
        let kx = k.clone() * x.clone();
        let (s, c) = (kx.sin(), kx.cos());
        // (u, u') for cos and sin
        (
            (c.clone(), -(k.clone() * s.clone())),
            (s, k.clone() * c),
        )
    };
    let row = |x: &R, log_d: &Cplx<R>| {
        let ((u1, d1), (u2, d2)) = jet(x);
        (
            log_d.scale(&u1) + Cplx::real(d1),
            log_d.scale(&u2) + Cplx::real(d2),
        )
    };
    // psi' + sigma psi = 0 at pi, psi' - conj(sigma) psi = 0 at -pi
    let (m11, m12) = row(&pi, &sigma);
    let (m21, m22) = row(&-pi.clone(), &-sigma_bar);
    Ok(m11 * m22 - m12 * m21)
}

/// Size of the matching rows, `(sqrt(E) + |sigma|)^2`.
pub fn x_det_scale<R: Real>(energy: &R, t: &R) -> R {
    let sigma = Cplx::new(-energy.clone(), t.square()).sqrt();
    (energy.sqrt() + sigma.abs()).square()
}

/// Sign changes of the real part of [`x_matching_det`] over `E` in `(e_lo, e_hi)`.
pub fn x_oracle_energies<R: Real>(t: &R, e_lo: f64, e_hi: f64, policy: &PrecisionPolicy) -> Result<Vec<R>> {
    let f = |e: &R| {
        x_matching_det(e, t)
            .map(|d| d.re / x_det_scale(e, t))
            .unwrap_or_else(|_| e.lit(f64::NAN))
    };
    let lo = t.lit(e_lo);
    let hi = t.lit(e_hi);
    scan_sign_changes(f, &lo, &hi, policy)?
        .iter()
        .map(|b| bisect(f, b, policy).map(|r| r.x))
        .collect()
}

struct PBasis<R> {
    alpha: R,
    beta: R,
}

impl<R: Real> PBasis<R> {
    fn new(alpha: R, z: &R) -> Result<Self> {
        let rest = z.clone() * z.lit(0.125) - alpha.square() * alpha.clone();
        if !(alpha > alpha.zero() && rest > rest.zero()) {
            return Err(Error::Domain(format!(
                "alpha = {} outside the bound-state range for Z = {}",
                alpha.to_f64(),
                z.to_f64()
            )));
        }
        Ok(PBasis { alpha, beta: rest.cbrt() })
    }

    /// `(f, f', f'')` of `e^(r p)` for real `r`.
    fn real_exp(r: &R, p: &R) -> [R; 3] {
        let v = (r.clone() * p.clone()).exp();
        [v.clone(), r.clone() * v.clone(), r.square() * v]
    }

    /// Real and imaginary parts of the jet of `e^(r p)` for complex `r`.
    fn complex_exp(r: &Cplx<R>, p: &R) -> ([R; 3], [R; 3]) {
        let v = r.scale(p).exp();
        let d1 = r.clone() * v.clone();
        let d2 = r.clone() * d1.clone();
        ([v.re, d1.re, d2.re], [v.im, d1.im, d2.im])
    }

    /// Interior basis: `e^(2 alpha p)` and `e^((-1 + i sqrt3) alpha p)`.
    fn interior(&self, p: &R) -> [[R; 3]; 3] {
        let a = &self.alpha;
        let s3 = a.lit(3.0).sqrt();
        let r = Cplx::new(-a.clone(), s3 * a.clone());
        let (re, im) = Self::complex_exp(&r, p);
        [Self::real_exp(&(a.lit(2.0) * a.clone()), p), re, im]
    }

    /// Right solution `e^(-2 beta p)`, decaying as `p -> +inf`.
    fn right(&self, p: &R) -> [R; 3] {
        Self::real_exp(&(self.beta.lit(-2.0) * self.beta.clone()), p)
    }

    /// Left solutions `e^((1 + i sqrt3) beta p)`, decaying as `p -> -inf`.
    fn left(&self, p: &R) -> ([R; 3], [R; 3]) {
        let b = &self.beta;
        let r = Cplx::new(b.clone(), b.lit(3.0).sqrt() * b.clone());
        Self::complex_exp(&r, p)
    }
}

/// Determinant of an `n x n` row-major matrix by partial-pivot elimination.
fn determinant<R: Real>(mut m: Vec<Vec<R>>) -> R {
    let n = m.len();
    let mut det = m[0][0].one();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        if m[piv][col] == m[piv][col].zero() {
            return m[0][0].zero();
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det = det * m[col][col].clone();
        for row in col + 1..n {
            let factor = m[row][col].clone() / m[col][col].clone();
            for k in col..n {
                let v = m[col][k].clone() * factor.clone();
                m[row][k] = m[row][k].clone() - v;
            }
        }
    }
    det
}

/// Solves `m x = b` for a small dense system.
fn solve<R: Real>(mut m: Vec<Vec<R>>, mut b: Vec<R>) -> Vec<R> {
    let n = m.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        m.swap(piv, col);
        b.swap(piv, col);
        for row in col + 1..n {
            let factor = m[row][col].clone() / m[col][col].clone();
            for k in col..n {
                let v = m[col][k].clone() * factor.clone();
                m[row][k] = m[row][k].clone() - v;
            }
            let v = b[col].clone() * factor;
            b[row] = b[row].clone() - v;
        }
    }
    let mut x = b.clone();
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc = acc - m[row][k].clone() * x[k].clone();
        }
        x[row] = acc / m[row][row].clone();
    }
    x
}

/// Column-normalized 6x6 continuity determinant in terms of `alpha`.
pub fn p_matching_det_alpha<R: Real>(alpha: &R, z: &R) -> Result<R> {
    let basis = PBasis::new(alpha.clone(), z)?;
    let one = alpha.one();
    let minus_one = -one.clone();
    let zero = alpha.zero();
    let [i0, i1, i2] = basis.interior(&one);
    let [j0, j1, j2] = basis.interior(&minus_one);
    let right = basis.right(&one);
    let (l_re, l_im) = basis.left(&minus_one);

    // columns: three interior, right, two left; rows: psi, psi', psi'' at +1 then -1
    let mut cols: Vec<Vec<R>> = Vec::with_capacity(6);
    for (a, b) in [(i0, j0), (i1, j1), (i2, j2)] {
        cols.push(a.into_iter().chain(b).collect());
    }
    cols.push(right.iter().map(|v| -v.clone()).chain(vec![zero.clone(); 3]).collect());
    for l in [l_re, l_im] {
        cols.push(vec![zero.clone(); 3].into_iter().chain(l.iter().map(|v| -v.clone())).collect());
    }
    for c in cols.iter_mut() {
        let norm = c.iter().fold(zero.clone(), |acc, v| acc + v.square()).sqrt();
        for v in c.iter_mut() {
            *v = v.clone() / norm.clone();
        }
    }
    let rows = (0..6).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
    Ok(determinant(rows))
}

pub fn p_matching_det<R: Real>(energy: &R, z: &R) -> Result<R> {
    if !(*energy > energy.zero() && energy < z) {
        return Err(Error::Domain(format!(
            "E = {} outside (0, Z = {})",
            energy.to_f64(),
            z.to_f64()
        )));
    }
    p_matching_det_alpha(&(energy.clone() * energy.lit(0.125)).cbrt(), z)
}

/// Sign changes of [`p_matching_det_alpha`] over `(0, (Z/8)^(1/3))`, scanned
/// at `policy.digits`.
pub fn p_oracle_alphas(z: f64, policy: &PrecisionPolicy) -> Result<Vec<f64>> {
    fn run<R: Real>(z: f64, policy: &PrecisionPolicy) -> Result<Vec<f64>> {
        let zr = R::with_digits(z, policy.digits);
        let f = |a: &R| p_matching_det_alpha(a, &zr).unwrap_or_else(|_| a.lit(f64::NAN));
        let top = (zr.clone() * zr.lit(0.125)).cbrt();
        scan_sign_changes(f, &zr.zero(), &top, policy)?
            .iter()
            .map(|b| bisect(f, b, policy).map(|r| r.x.to_f64()))
            .collect()
    }
    if policy.is_native() {
        run::<f64>(z, policy)
    } else {
        run::<MpReal>(z, policy)
    }
}

/// Uniform samples of the momentum-model determinant in `alpha`.
pub fn p_det_samples(z: f64, policy: &PrecisionPolicy) -> Result<Vec<DetSample>> {
    fn run<R: Real>(z: f64, policy: &PrecisionPolicy) -> Result<Vec<DetSample>> {
        let zr = R::with_digits(z, policy.digits);
        let f = |a: &R| p_matching_det_alpha(a, &zr).unwrap_or_else(|_| a.lit(f64::NAN));
        let (lo, hi) = shrink_edges(&zr.zero(), &(zr.clone() * zr.lit(0.125)).cbrt());
        let n = grid_intervals(lo.to_f64(), hi.to_f64(), policy);
        Ok(sample_uniform(&f, &lo, &hi, n)?
            .into_iter()
            .map(|(a, d)| DetSample {
                parameter: a.to_f64(),
                det_value: d.to_f64(),
                digits: policy.digits,
            })
            .collect())
    }
    policy.validate()?;
    if policy.is_native() {
        run::<f64>(z, policy)
    } else {
        run::<MpReal>(z, policy)
    }
}

/// Coefficients `(growing, decaying_re, decaying_im)` of the right-normalized
/// solution continued to `p = -1`, in the left basis
/// `e^(-2 beta p)`, `Re e^((1 + i sqrt3) beta p)`, `Im e^((1 + i sqrt3) beta p)`.
pub fn left_decomposition<R: Real>(energy: &R, z: &R) -> Result<[R; 3]> {
    if !(*energy > energy.zero() && energy < z) {
        return Err(Error::Domain(format!(
            "E = {} outside (0, Z = {})",
            energy.to_f64(),
            z.to_f64()
        )));
    }
    let basis = PBasis::new((energy.clone() * energy.lit(0.125)).cbrt(), z)?;
    let one = energy.one();
    let minus_one = -one.clone();
    let transpose = |cols: [[R; 3]; 3]| -> Vec<Vec<R>> {
        (0..3).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect()
    };
    // interior coefficients from the right jet, then the jet at -1
    let inner = solve(transpose(basis.interior(&one)), basis.right(&one).to_vec());
    let at_left = basis.interior(&minus_one);
    let jet: Vec<R> = (0..3)
        .map(|r| {
            (0..3).fold(energy.zero(), |acc, c| acc + inner[c].clone() * at_left[c][r].clone())
        })
        .collect();
    let growing = PBasis::real_exp(&(basis.beta.lit(-2.0) * basis.beta.clone()), &minus_one);
    let (l_re, l_im) = basis.left(&minus_one);
    let x = solve(transpose([growing, l_re, l_im]), jet);
    Ok([x[0].clone(), x[1].clone(), x[2].clone()])
}

/// Size of the growing `e^(-2 beta p)` admixture at `p_probe < -1`.
pub fn left_contamination_probe<R: Real>(energy: &R, z: &R, p_probe: &R) -> Result<R> {
    if !(*p_probe < -p_probe.one()) {
        return Err(Error::Domain(format!("p = {} must be below -1", p_probe.to_f64())));
    }
    let [g, _, _] = left_decomposition(energy, z)?;
    let beta = ((z.clone() - energy.clone()) * z.lit(0.125)).cbrt();
    Ok(g * (z.lit(-2.0) * beta * p_probe.clone()).exp())
}

/// Whether two ascending root lists pair up one-to-one within `tol`.
pub fn root_sets_match(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn policy() -> PrecisionPolicy {
        PrecisionPolicy::default()
    }

    #[test]
    fn x_det_is_real() {
        for e in [0.1, 1.3, 7.7] {
            let d = x_matching_det(&e, &1.0).unwrap();
            assert!(d.im.abs() <= 1e-14 * d.re.abs().max(1.0));
        }
        assert!(x_matching_det(&0.0, &1.0).is_err());
    }

    #[test]
    fn x_det_separates_levels() {
        let roots = x_oracle_energies(&1.0, 1e-6, 25.0, &policy()).unwrap();
        assert_eq!(roots.len(), 10);
        for w in roots.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            assert!(x_matching_det(&mid, &1.0).unwrap().abs() > 1e-3);
        }
    }

    #[test]
    fn x_det_deep_limit() {
        let roots = x_oracle_energies(&1e4, 1e-6, 3.0, &policy()).unwrap();
        assert_eq!(roots.len(), 3);
        for (n, e) in roots.iter().enumerate() {
            let boxed = ((n + 1) * (n + 1)) as f64 / 4.0;
            assert!((e - boxed).abs() < 1e-2);
        }
    }

    #[test]
    fn determinant_and_solve() {
        let m = vec![vec![2.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 4.0]];
        assert!((determinant(m.clone()) - 18.0).abs() < 1e-14);
        let x = solve(m, vec![3.0, 5.0, 5.0]);
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
        assert_eq!(determinant(vec![vec![1.0, 2.0], vec![2.0, 4.0]]), 0.0);
    }

    #[test]
    fn p_det_domain() {
        assert!(p_matching_det(&0.0, &1.0).is_err());
        assert!(p_matching_det(&1.0, &1.0).is_err());
        assert!(p_matching_det_alpha(&0.6, &1.0).is_err());
    }

    #[test]
    fn p_det_nonzero_at_half_energy_of_tiny_well() {
        let z = 1e-4;
        let d = p_matching_det(&(z / 2.0), &z).unwrap();
        assert!(d.abs() > 1e-6);
    }

    #[test]
    fn p_det_scaled_magnitude() {
        for s in p_det_samples(35.0, &policy()).unwrap() {
            assert!(s.det_value.abs() < 1e30);
            assert!(s.det_value == 0.0 || s.det_value.abs() > 1e-30);
        }
    }

    #[test]
    fn p_det_roots_shallow_well() {
        let roots = p_oracle_alphas(0.1, &policy()).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 0.218469108830).abs() < 1e-9);
    }

    #[test]
    fn contamination_flips_across_level() {
        // first level at Z = 1 sits at alpha = 0.41326...
        let z = 1.0;
        let e0 = 8.0 * 0.413263277134f64.powi(3);
        let below = left_contamination_probe(&(e0 - 1e-6), &z, &-10.0).unwrap();
        let above = left_contamination_probe(&(e0 + 1e-6), &z, &-10.0).unwrap();
        assert!(below * above < 0.0);
        let [g, a, b] = left_decomposition(&e0, &z).unwrap();
        assert!(g.abs() <= 1e-8 * a.hypot(b));
        assert!(left_contamination_probe(&e0, &z, &0.0).is_err());
    }

    #[test]
    fn contamination_smooth_below_ground_level() {
        let z = 1.0;
        let vals: Vec<f64> = (1..50)
            .map(|i| left_contamination_probe(&(1e-3 * f64::from(i)), &z, &-5.0).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| (w[0] > 0.0) == (w[1] > 0.0)));
    }

    #[test]
    fn root_set_matching() {
        assert!(root_sets_match(&[1.0, 2.0], &[1.0 + 1e-9, 2.0], 1e-8));
        assert!(!root_sets_match(&[1.0], &[1.0, 2.0], 1e-8));
        assert!(!root_sets_match(&[1.0], &[1.1], 1e-8));
    }
}
