//! Extended-exponent complex scalars.
//!
//! A [`ScaledScalar`] is `significand * 2^exponent` with a complex double
//! significand normalized to `1/2 <= |significand| < 1` and a 64-bit
//! exponent. Products of thousands of quantum integers (whose magnitudes grow
//! like `|t|^(-2n)`) stay representable, and complex phase is carried exactly
//! as in ordinary complex arithmetic.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Exponent gap beyond which the smaller addend cannot affect the larger.
const ALIGN_LIMIT: i64 = 1074;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledScalar {
    sig: Complex64,
    exp: i64,
}

fn ldexp_c(z: Complex64, k: i64) -> Complex64 {
    let k = k.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
    Complex64::new(libm::ldexp(z.re, k), libm::ldexp(z.im, k))
}

impl ScaledScalar {
    pub const ZERO: ScaledScalar = ScaledScalar {
        sig: Complex64 { re: 0.0, im: 0.0 },
        exp: 0,
    };
    pub const ONE: ScaledScalar = ScaledScalar {
        sig: Complex64 { re: 0.5, im: 0.0 },
        exp: 1,
    };

    /// Builds `z * 2^exp` and normalizes. `z` must be finite.
    pub fn from_parts(z: Complex64, exp: i64) -> Self {
        debug_assert!(z.re.is_finite() && z.im.is_finite(), "non-finite significand {z}");
        if z.re == 0.0 && z.im == 0.0 {
            return Self::ZERO;
        }
        let big = z.re.abs().max(z.im.abs());
        let (mut sig, k) = if big.is_normal() && big < 2f64.powi(1000) && big > 2f64.powi(-1000) {
            // frexp by hand: read the biased exponent and scale by an exact power of two
            let k = ((big.to_bits() >> 52) & 0x7ff) as i64 - 1022;
            let scale = f64::from_bits(((1023 - k) as u64) << 52);
            (z * scale, k)
        } else {
            let (_, k) = libm::frexp(big);
            (ldexp_c(z, -(k as i64)), k as i64)
        };
        let mut exp = exp.saturating_add(k);
        if sig.norm_sqr() >= 1.0 {
            sig *= 0.5;
            exp = exp.saturating_add(1);
        }
        ScaledScalar { sig, exp }
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::from_parts(z, 0)
    }

    pub fn from_f64(x: f64) -> Self {
        Self::from_parts(Complex64::new(x, 0.0), 0)
    }

    /// The positive real `2^log2_abs`.
    pub fn from_log2(log2_abs: f64) -> Self {
        if log2_abs == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        let k = log2_abs.floor();
        Self::from_parts(Complex64::new((log2_abs - k).exp2(), 0.0), k as i64)
    }

    pub fn significand(&self) -> Complex64 {
        self.sig
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.sig.re == 0.0 && self.sig.im == 0.0
    }

    pub fn is_real(&self) -> bool {
        self.sig.im == 0.0
    }

    /// Converts back to a complex double; overflows to infinity and
    /// underflows to zero outside the double range.
    pub fn to_complex(&self) -> Complex64 {
        ldexp_c(self.sig, self.exp)
    }

    /// Real part as a double (see [`ScaledScalar::to_complex`]).
    pub fn to_f64(&self) -> f64 {
        self.to_complex().re
    }

    /// Whether [`ScaledScalar::to_complex`] is finite and does not flush to zero.
    pub fn fits_f64(&self) -> bool {
        self.is_zero() || (-1020..=1020).contains(&self.exp)
    }

    pub fn conj(&self) -> Self {
        ScaledScalar { sig: self.sig.conj(), exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        let m = if self.sig.im == 0.0 { self.sig.re.abs() } else { self.sig.norm() };
        Self::from_parts(Complex64::new(m, 0.0), self.exp)
    }

    /// `log2 |self|`, `-inf` for zero.
    pub fn abs_log2(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.sig.norm().log2() + self.exp as f64
        }
    }

    pub fn cmp_abs(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => self
                .exp
                .cmp(&other.exp)
                .then_with(|| self.sig.norm_sqr().total_cmp(&other.sig.norm_sqr())),
        }
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        Ok(Self::from_parts(self.sig / other.sig, self.exp - other.exp))
    }

    pub fn recip(&self) -> Result<Self> {
        Self::ONE.try_div(self)
    }

    pub fn scale_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return *self;
        }
        ScaledScalar { sig: self.sig, exp: self.exp.saturating_add(k) }
    }

    /// Integer power by repeated squaring; negative powers of zero fail.
    pub fn powi(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.powi(-n)?.recip();
        }
        let mut base = *self;
        let mut acc = Self::ONE;
        let mut n = n as u64;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            n >>= 1;
            if n > 0 {
                base = base * base;
            }
        }
        Ok(acc)
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return *self;
        }
        let (sig, exp) = if self.exp % 2 != 0 {
            (self.sig * 2.0, self.exp - 1)
        } else {
            (self.sig, self.exp)
        };
        Self::from_parts(sig.sqrt(), exp / 2)
    }

    /// `(-1)^k` as a scalar.
    pub fn sign_pow(k: i64) -> Self {
        if k.rem_euclid(2) == 0 {
            Self::ONE
        } else {
            -Self::ONE
        }
    }

    /// Relative distance `|a - b| / max(|a|, |b|)`, zero when both vanish.
    pub fn rel_diff(&self, other: &Self) -> f64 {
        let scale = if self.cmp_abs(other) == Ordering::Less { other } else { self };
        if scale.is_zero() {
            return 0.0;
        }
        let diff = *self - *other;
        (diff.abs_log2() - scale.abs_log2()).exp2()
    }
}

impl Default for ScaledScalar {
    fn default() -> Self {
        Self::ZERO
    }
}

impl From<f64> for ScaledScalar {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl From<Complex64> for ScaledScalar {
    fn from(z: Complex64) -> Self {
        Self::from_complex(z)
    }
}

impl Mul for ScaledScalar {
    type Output = ScaledScalar;

    fn mul(self, rhs: ScaledScalar) -> ScaledScalar {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        Self::from_parts(self.sig * rhs.sig, self.exp.saturating_add(rhs.exp))
    }
}

impl Add for ScaledScalar {
    type Output = ScaledScalar;

    fn add(self, rhs: ScaledScalar) -> ScaledScalar {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let gap = self.exp - rhs.exp;
        if gap > ALIGN_LIMIT {
            return self;
        }
        if gap < -ALIGN_LIMIT {
            return rhs;
        }
        if gap >= 0 {
            Self::from_parts(self.sig + ldexp_c(rhs.sig, -gap), self.exp)
        } else {
            Self::from_parts(ldexp_c(self.sig, gap) + rhs.sig, rhs.exp)
        }
    }
}

impl Neg for ScaledScalar {
    type Output = ScaledScalar;

    fn neg(self) -> ScaledScalar {
        if self.is_zero() {
            return self;
        }
        ScaledScalar { sig: -self.sig, exp: self.exp }
    }
}

impl Sub for ScaledScalar {
    type Output = ScaledScalar;

    fn sub(self, rhs: ScaledScalar) -> ScaledScalar {
        self + (-rhs)
    }
}

impl std::iter::Sum for ScaledScalar {
    fn sum<I: Iterator<Item = ScaledScalar>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |acc, x| acc + x)
    }
}

impl std::iter::Product for ScaledScalar {
    fn product<I: Iterator<Item = ScaledScalar>>(iter: I) -> Self {
        iter.fold(Self::ONE, |acc, x| acc * x)
    }
}

impl fmt::Display for ScaledScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.fits_f64() {
            let z = self.to_complex();
            if z.im == 0.0 {
                write!(f, "{}", z.re)
            } else {
                write!(f, "{}", z)
            }
        } else {
            write!(f, "({})*2^{}", self.sig, self.exp)
        }
    }
}
