//! Scalars: exact complex rationals or binary64 complex numbers.
//!
//! Every structure picks one [`ScalarMode`]. Exact arithmetic never rounds;
//! float arithmetic is plain IEEE and comparisons go through a tolerance.
//! Mixing modes degrades to float.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative tolerance for float-mode residual checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    #[default]
    Exact,
    Float,
}

/// A structural constant or coefficient.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(Complex<BigRational>),
    Float(Complex<f64>),
}

/// A real quantity (norms, square sums) in the mode it was computed in.
#[derive(Clone, Debug, PartialEq)]
pub enum Real {
    Exact(BigRational),
    Float(f64),
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("invalid rational {text:?}"));
    match text.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(text).map_err(|_| bad())?,
        )),
    }
}

/// Always renders as `p/q`, including `q = 1`.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Smallest binary64 `s` with `s * s >= r` (for `r >= 0`).
pub fn sqrt_upper(r: &BigRational) -> f64 {
    if !r.is_positive() {
        return 0.0;
    }
    let mut s = rational_to_f64(r).sqrt();
    if !s.is_finite() {
        return f64::INFINITY;
    }
    loop {
        let exact = BigRational::from_float(s).expect("finite");
        if &(&exact * &exact) >= r {
            break;
        }
        s = s.next_up();
    }
    // walk back down while still an upper bound
    loop {
        let lower = s.next_down();
        if lower < 0.0 {
            break;
        }
        let exact = BigRational::from_float(lower).expect("finite");
        if &(&exact * &exact) >= r {
            s = lower;
        } else {
            break;
        }
    }
    s
}

impl Scalar {
    pub fn zero(mode: ScalarMode) -> Self {
        match mode {
            ScalarMode::Exact => Scalar::Exact(Complex::new(BigRational::zero(), BigRational::zero())),
            ScalarMode::Float => Scalar::Float(Complex::new(0.0, 0.0)),
        }
    }

    pub fn one(mode: ScalarMode) -> Self {
        match mode {
            ScalarMode::Exact => Scalar::from_rational(BigRational::one()),
            ScalarMode::Float => Scalar::from_f64(1.0),
        }
    }

    pub fn from_rational(re: BigRational) -> Self {
        Scalar::Exact(Complex::new(re, BigRational::zero()))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::from_rational(rational(num, den))
    }

    pub fn integer(n: i64) -> Self {
        Scalar::ratio(n, 1)
    }

    pub fn complex_rational(re: BigRational, im: BigRational) -> Self {
        Scalar::Exact(Complex::new(re, im))
    }

    pub fn from_f64(re: f64) -> Self {
        Scalar::Float(Complex::new(re, 0.0))
    }

    pub fn complex_f64(re: f64, im: f64) -> Self {
        Scalar::Float(Complex::new(re, im))
    }

    pub fn mode(&self) -> ScalarMode {
        match self {
            Scalar::Exact(_) => ScalarMode::Exact,
            Scalar::Float(_) => ScalarMode::Float,
        }
    }

    /// Converts into `mode`. Float to exact is lossless (binary64 values are
    /// dyadic rationals); non-finite floats map to zero.
    pub fn to_mode(&self, mode: ScalarMode) -> Scalar {
        match (self, mode) {
            (Scalar::Exact(_), ScalarMode::Exact) | (Scalar::Float(_), ScalarMode::Float) => {
                self.clone()
            }
            (Scalar::Exact(_), ScalarMode::Float) => Scalar::Float(self.to_complex_f64()),
            (Scalar::Float(z), ScalarMode::Exact) => Scalar::complex_rational(
                BigRational::from_float(z.re).unwrap_or_else(BigRational::zero),
                BigRational::from_float(z.im).unwrap_or_else(BigRational::zero),
            ),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(z) => z.re.is_zero() && z.im.is_zero(),
            Scalar::Float(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            Scalar::Exact(z) => z.im.is_zero(),
            Scalar::Float(z) => z.im == 0.0,
        }
    }

    /// Real part when exact and purely real.
    pub fn as_exact_real(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(z) if z.im.is_zero() => Some(&z.re),
            _ => None,
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(z) => Scalar::Exact(z.conj()),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    /// `|z|^2`, exact when the scalar is exact.
    pub fn norm_sqr(&self) -> Real {
        match self {
            Scalar::Exact(z) => Real::Exact(&z.re * &z.re + &z.im * &z.im),
            Scalar::Float(z) => Real::Float(z.norm_sqr()),
        }
    }

    /// `|z|` as binary64, rounded up for exact scalars.
    pub fn abs_upper(&self) -> f64 {
        match self {
            Scalar::Exact(z) if z.im.is_zero() => {
                let a = z.re.abs();
                let f = rational_to_f64(&a);
                if BigRational::from_float(f).is_some_and(|e| e >= a) {
                    f
                } else {
                    f.next_up()
                }
            }
            Scalar::Exact(z) => sqrt_upper(&(&z.re * &z.re + &z.im * &z.im)),
            Scalar::Float(z) => z.norm(),
        }
    }

    pub fn to_complex_f64(&self) -> Complex<f64> {
        match self {
            Scalar::Exact(z) => Complex::new(rational_to_f64(&z.re), rational_to_f64(&z.im)),
            Scalar::Float(z) => *z,
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Exact(z) => {
                let d = &z.re * &z.re + &z.im * &z.im;
                Scalar::Exact(Complex::new(&z.re / &d, -(&z.im / &d)))
            }
            Scalar::Float(z) => Scalar::Float(z.inv()),
        })
    }

    /// Equality up to `tol` (relative to the larger magnitude, absolute near
    /// zero). Exact pairs compare exactly.
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => {
                let a = self.to_complex_f64();
                let b = other.to_complex_f64();
                let scale = a.norm().max(b.norm()).max(1.0);
                (a - b).norm() <= tol * scale
            }
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => self.to_complex_f64() == other.to_complex_f64(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(z) if z.im.is_zero() => write!(f, "{}", format_rational(&z.re)),
            Scalar::Exact(z) => {
                let sign = if z.im.is_negative() { "-" } else { "+" };
                write!(f, "{}{}{}i", format_rational(&z.re), sign, format_rational(&z.im.abs()))
            }
            Scalar::Float(z) if z.im == 0.0 => write!(f, "{:.16e}", z.re),
            Scalar::Float(z) => write!(f, "{:.16e}{:+.16e}i", z.re, z.im),
        }
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => Scalar::Float(self.to_complex_f64() $op rhs.to_complex_f64()),
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

binary_op!(Add, add, +);
binary_op!(Sub, sub, -);
binary_op!(Mul, mul, *);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(z) => Scalar::Exact(-z.clone()),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Real {
    pub fn zero(mode: ScalarMode) -> Self {
        match mode {
            ScalarMode::Exact => Real::Exact(BigRational::zero()),
            ScalarMode::Float => Real::Float(0.0),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(r) => rational_to_f64(r),
            Real::Float(x) => *x,
        }
    }

    /// Square root rounded up (exact values) or plain `sqrt` (float values).
    pub fn sqrt_upper(&self) -> f64 {
        match self {
            Real::Exact(r) => sqrt_upper(r),
            Real::Float(x) => x.max(0.0).sqrt(),
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Real::Exact(r) => Some(r),
            Real::Float(_) => None,
        }
    }
}

impl Add<&Real> for &Real {
    type Output = Real;
    fn add(self, rhs: &Real) -> Real {
        match (self, rhs) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a + b),
            _ => Real::Float(self.to_f64() + rhs.to_f64()),
        }
    }
}

impl Mul<&Real> for &Real {
    type Output = Real;
    fn mul(self, rhs: &Real) -> Real {
        match (self, rhs) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a * b),
            _ => Real::Float(self.to_f64() * rhs.to_f64()),
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(r) => write!(f, "{}", format_rational(r)),
            Real::Float(x) => write!(f, "{:.16e}", x),
        }
    }
}
