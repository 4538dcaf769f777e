//! Precision-polymorphic scalar arithmetic.
//!
//! Every solver in this crate is generic over [`Real`]. Two backends exist:
//! native `f64` (about 16 significant digits) and [`MpReal`], an
//! arbitrary-precision binary float whose width is chosen from a requested
//! number of decimal digits. Constants are always created through
//! [`Real::lit`] so that they inherit the precision of the operand they are
//! combined with.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

/// Decimal digits carried by native `f64` arithmetic in the policy sense.
pub const NATIVE_DIGITS: u32 = 16;

/// Scalar field used by all solvers.
pub trait Real:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Converts `x` into a value carrying at least `digits` decimal digits.
    fn with_digits(x: f64, digits: u32) -> Self;

    /// A constant at the precision of `self`.
    fn lit(&self, x: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// Significant decimal digits carried by `self`.
    fn digits(&self) -> u32;

    /// Unit roundoff at the precision of `self`.
    fn epsilon(&self) -> Self;

    fn is_finite(&self) -> bool;
    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn cbrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn atan(&self) -> Self;
    fn pi(&self) -> Self;

    fn zero(&self) -> Self {
        self.lit(0.0)
    }

    fn one(&self) -> Self {
        self.lit(1.0)
    }

    fn is_negative(&self) -> bool {
        *self < self.zero()
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    /// Four-quadrant arctangent of `self / x`, in `(-pi, pi]`.
    fn atan2(&self, x: &Self) -> Self {
        let y = self;
        let zero = y.zero();
        if *x > zero {
            (y.clone() / x.clone()).atan()
        } else if *x < zero {
            let base = (y.clone() / x.clone()).atan();
            if *y >= zero {
                base + y.pi()
            } else {
                base - y.pi()
            }
        } else if *y > zero {
            y.pi() / y.lit(2.0)
        } else if *y < zero {
            -(y.pi() / y.lit(2.0))
        } else {
            zero
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Real for f64 {
    fn with_digits(x: f64, _digits: u32) -> Self {
        x
    }

    fn lit(&self, x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn digits(&self) -> u32 {
        NATIVE_DIGITS
    }

    fn epsilon(&self) -> Self {
        f64::EPSILON
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }

    fn cbrt(&self) -> Self {
        f64::cbrt(*self)
    }

    fn exp(&self) -> Self {
        f64::exp(*self)
    }

    fn ln(&self) -> Self {
        f64::ln(*self)
    }

    fn sin(&self) -> Self {
        f64::sin(*self)
    }

    fn cos(&self) -> Self {
        f64::cos(*self)
    }

    fn atan(&self) -> Self {
        f64::atan(*self)
    }

    fn pi(&self) -> Self {
        std::f64::consts::PI
    }

    fn atan2(&self, x: &Self) -> Self {
        f64::atan2(*self, *x)
    }
}

const RM: RoundingMode = RoundingMode::ToEven;
const GUARD_BITS: usize = 8;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Binary precision (bits) needed for `digits` decimal digits.
pub fn bits_for_digits(digits: u32) -> usize {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as usize + GUARD_BITS
}

/// Arbitrary-precision real number.
///
/// Binary operations run at the larger of the two operand precisions.
#[derive(Clone)]
pub struct MpReal {
    value: BigFloat,
    bits: usize,
}

impl MpReal {
    fn wrap(&self, value: BigFloat) -> Self {
        MpReal {
            value,
            bits: self.bits,
        }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn as_bigfloat(&self) -> &BigFloat {
        &self.value
    }
}

impl fmt::Debug for MpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MpReal({}, {} bits)", self.value, self.bits)
    }
}

impl fmt::Display for MpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl PartialEq for MpReal {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for MpReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

macro_rules! mp_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for MpReal {
            type Output = MpReal;

            fn $method(self, rhs: MpReal) -> MpReal {
                let bits = self.bits.max(rhs.bits);
                MpReal {
                    value: self.value.$method(&rhs.value, bits, RM),
                    bits,
                }
            }
        }
    };
}

mp_binop!(Add, add);
mp_binop!(Sub, sub);
mp_binop!(Mul, mul);
mp_binop!(Div, div);

impl Neg for MpReal {
    type Output = MpReal;

    fn neg(self) -> MpReal {
        let value = self.value.neg();
        MpReal {
            value,
            bits: self.bits,
        }
    }
}

fn bigfloat_to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let Some((mantissa, _, sign, exponent, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    let top = mantissa.last().copied().unwrap_or(0);
    if top == 0 {
        return 0.0;
    }
    let next = if mantissa.len() > 1 {
        mantissa[mantissa.len() - 2]
    } else {
        0
    };
    // value = 0.top next ... * 2^exponent, with 64-bit words
    let scaled = top as f64 + next as f64 / 18_446_744_073_709_551_616.0;
    let shift = exponent - 64;
    let half = shift / 2;
    let magnitude = scaled * 2f64.powi(half) * 2f64.powi(shift - half);
    if sign == Sign::Neg {
        -magnitude
    } else {
        magnitude
    }
}

impl Real for MpReal {
    fn with_digits(x: f64, digits: u32) -> Self {
        let bits = bits_for_digits(digits);
        MpReal {
            value: BigFloat::from_f64(x, bits),
            bits,
        }
    }

    fn lit(&self, x: f64) -> Self {
        self.wrap(BigFloat::from_f64(x, self.bits))
    }

    fn to_f64(&self) -> f64 {
        bigfloat_to_f64(&self.value)
    }

    fn digits(&self) -> u32 {
        ((self.bits - GUARD_BITS) as f64 * std::f64::consts::LOG10_2).floor() as u32
    }

    fn epsilon(&self) -> Self {
        let two = BigFloat::from_f64(2.0, self.bits);
        let scale = two.powi(self.bits, self.bits, RM);
        self.wrap(BigFloat::from_f64(1.0, self.bits).div(&scale, self.bits, RM))
    }

    fn is_finite(&self) -> bool {
        !(self.value.is_nan() || self.value.is_inf())
    }

    fn abs(&self) -> Self {
        self.wrap(self.value.abs())
    }

    fn sqrt(&self) -> Self {
        self.wrap(self.value.sqrt(self.bits, RM))
    }

    fn cbrt(&self) -> Self {
        self.wrap(self.value.cbrt(self.bits, RM))
    }

    fn exp(&self) -> Self {
        self.wrap(with_consts(|cc| self.value.exp(self.bits, RM, cc)))
    }

    fn ln(&self) -> Self {
        self.wrap(with_consts(|cc| self.value.ln(self.bits, RM, cc)))
    }

    fn sin(&self) -> Self {
        self.wrap(with_consts(|cc| self.value.sin(self.bits, RM, cc)))
    }

    fn cos(&self) -> Self {
        self.wrap(with_consts(|cc| self.value.cos(self.bits, RM, cc)))
    }

    fn atan(&self) -> Self {
        self.wrap(with_consts(|cc| self.value.atan(self.bits, RM, cc)))
    }

    fn pi(&self) -> Self {
        self.wrap(with_consts(|cc| cc.pi(self.bits, RM)))
    }
}

/// Complex number over a [`Real`] backend, stored as a pair of reals.
#[derive(Clone, Debug, PartialEq)]
pub struct Cplx<R> {
    pub re: R,
    pub im: R,
}

impl<R: Real> Cplx<R> {
    pub fn new(re: R, im: R) -> Self {
        Cplx { re, im }
    }

    pub fn real(re: R) -> Self {
        let im = re.zero();
        Cplx { re, im }
    }

    pub fn conj(&self) -> Self {
        Cplx::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> R {
        self.re.square() + self.im.square()
    }

    pub fn abs(&self) -> R {
        let a = self.re.abs();
        let b = self.im.abs();
        let (big, small) = if a >= b { (a, b) } else { (b, a) };
        if big == big.zero() {
            return big;
        }
        let ratio = small / big.clone();
        big * (ratio.one() + ratio.square()).sqrt()
    }

    pub fn scale(&self, s: &R) -> Self {
        Cplx::new(self.re.clone() * s.clone(), self.im.clone() * s.clone())
    }

    /// `i * self`
    pub fn mul_i(&self) -> Self {
        Cplx::new(-self.im.clone(), self.re.clone())
    }

    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        Cplx::new(m.clone() * self.im.cos(), m * self.im.sin())
    }

    /// Principal square root (non-negative real part).
    pub fn sqrt(&self) -> Self {
        let zero = self.re.zero();
        let r = self.abs();
        if r == zero {
            return Cplx::real(zero);
        }
        let half = self.re.lit(0.5);
        let a = ((r.clone() + self.re.clone()) * half.clone()).sqrt();
        let b = ((r - self.re.clone()) * half).sqrt();
        if self.im.is_negative() {
            Cplx::new(a, -b)
        } else {
            Cplx::new(a, b)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl<R: Real> Add for Cplx<R> {
    type Output = Cplx<R>;

    fn add(self, rhs: Self) -> Self {
        Cplx::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl<R: Real> Sub for Cplx<R> {
    type Output = Cplx<R>;

    fn sub(self, rhs: Self) -> Self {
        Cplx::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl<R: Real> Mul for Cplx<R> {
    type Output = Cplx<R>;

    fn mul(self, rhs: Self) -> Self {
        Cplx::new(
            self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone(),
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl<R: Real> Div for Cplx<R> {
    type Output = Cplx<R>;

    fn div(self, rhs: Self) -> Self {
        let den = rhs.norm_sqr();
        let num = self * rhs.conj();
        Cplx::new(num.re / den.clone(), num.im / den)
    }
}

impl<R: Real> Neg for Cplx<R> {
    type Output = Cplx<R>;

    fn neg(self) -> Self {
        Cplx::new(-self.re, -self.im)
    }
}
