//! The deformation parameter `t` and its regime.

use std::f64::consts::{LN_2, PI};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::ScaledScalar;

/// `||t| - 1|` below this counts as "on the unit circle".
pub const UNIT_CIRCLE_TOL: f64 = 1e-9;
/// Distance to `±1` or `e^{iπ/2r}` below which `t` is identified with it.
pub const ROOT_TOL: f64 = 1e-12;
/// Largest `r` tried when recognizing `e^{iπ/2r}`.
pub const MAX_ROOT_ORDER: u32 = 1000;

const LN2_HI: f64 = 6.931_471_803_691_238_164_90e-01;
const LN2_LO: f64 = 1.908_214_929_270_587_700_02e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Real `t` with `|t| != 1` (either sign).
    GenericReal,
    /// Non-real `t` off the unit circle.
    GenericComplex,
    /// `t = ±1`; quantum integers are ordinary integers.
    Classical { sign: i8 },
    /// `t = e^{iπ/2r}`, reduced theory.
    RootOfUnity { r: u32 },
    /// `|t| = 1` but neither `±1` nor `e^{iπ/2r}`; no Yang-Mills trace exists.
    Unimodular,
}

impl Regime {
    pub fn tag(&self) -> String {
        match self {
            Regime::GenericReal => "generic-real".into(),
            Regime::GenericComplex => "generic-complex".into(),
            Regime::Classical { sign } => format!("classical({sign:+})"),
            Regime::RootOfUnity { r } => format!("root-of-unity(r={r})"),
            Regime::Unimodular => "unimodular".into(),
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

/// The parameter `t` together with its regime and cached `λ = log t²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Param {
    value: Complex64,
    regime: Regime,
    lambda: Complex64,
    sinh_lambda: Complex64,
}

/// `log(t²)` computed through `t² - 1 = (t - 1)(t + 1)` so that `t` near `±1`
/// keeps full relative accuracy.
fn log_t_squared(t: Complex64) -> Complex64 {
    let z = (t - 1.0) * (t + 1.0);
    if z.norm() < 0.5 {
        let re = 0.5 * (2.0 * z.re + z.norm_sqr()).ln_1p();
        let im = z.im.atan2(1.0 + z.re);
        Complex64::new(re, im)
    } else {
        (t * t).ln()
    }
}

/// Whether `e^{iφ}` is a root of unity of order at most `max_order`.
pub fn is_root_of_unity(t: Complex64, max_order: u32) -> bool {
    if (t.norm() - 1.0).abs() > UNIT_CIRCLE_TOL {
        return false;
    }
    let turns = t.arg() / (2.0 * PI);
    (1..=max_order).any(|d| {
        let x = turns * d as f64;
        (x - x.round()).abs() < 1e-9
    })
}

impl Param {
    fn build(value: Complex64, regime: Regime) -> Self {
        let lambda = match regime {
            Regime::Classical { .. } => Complex64::new(0.0, 0.0),
            Regime::RootOfUnity { r } => Complex64::new(0.0, PI / r as f64),
            _ => log_t_squared(value),
        };
        Param { value, regime, lambda, sinh_lambda: lambda.sinh() }
    }

    /// Classifies an arbitrary nonzero complex `t`.
    pub fn new(value: Complex64) -> Result<Self> {
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::Domain(format!("t = {value} is not finite")));
        }
        if value.norm() == 0.0 {
            return Err(Error::Domain("t must be nonzero".into()));
        }
        if (value.norm() - 1.0).abs() <= UNIT_CIRCLE_TOL {
            for sign in [1i8, -1] {
                if (value - sign as f64).norm() <= ROOT_TOL {
                    return Ok(Self::classical(sign));
                }
            }
            for r in 3..=MAX_ROOT_ORDER {
                let root = Complex64::from_polar(1.0, PI / (2.0 * r as f64));
                if (value - root).norm() <= ROOT_TOL {
                    return Self::root_of_unity(r);
                }
            }
            return Ok(Self::build(value, Regime::Unimodular));
        }
        let regime = if value.im == 0.0 { Regime::GenericReal } else { Regime::GenericComplex };
        Ok(Self::build(value, regime))
    }

    pub fn real(t: f64) -> Result<Self> {
        Self::new(Complex64::new(t, 0.0))
    }

    /// `t = sign` with `sign ∈ {1, -1}`.
    pub fn classical(sign: i8) -> Self {
        let sign = if sign < 0 { -1 } else { 1 };
        Self::build(Complex64::new(sign as f64, 0.0), Regime::Classical { sign })
    }

    /// `t = e^{iπ/2r}`, `r >= 3`.
    pub fn root_of_unity(r: u32) -> Result<Self> {
        if r < 3 {
            return Err(Error::Domain(format!("root of unity needs r >= 3, got {r}")));
        }
        let value = Complex64::from_polar(1.0, PI / (2.0 * r as f64));
        Ok(Self::build(value, Regime::RootOfUnity { r }))
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// `λ = log t²`, so that `[n] = sinh(nλ) / sinh(λ)`.
    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn root_order(&self) -> Option<u32> {
        match self.regime {
            Regime::RootOfUnity { r } => Some(r),
            _ => None,
        }
    }

    /// True when every quantum integer is real (real `t`, `±1`, roots of unity).
    pub fn has_real_quantum_ints(&self) -> bool {
        !matches!(self.regime, Regime::GenericComplex)
    }

    /// The quantum integer `[n] = (t^{2n} - t^{-2n}) / (t² - t^{-2})`.
    pub fn quantum_int(&self, n: u64) -> ScaledScalar {
        match self.regime {
            Regime::Classical { .. } => ScaledScalar::from_f64(n as f64),
            Regime::RootOfUnity { r } => {
                let r = r as u64;
                if n % r == 0 {
                    return ScaledScalar::ZERO;
                }
                let m = (n % (2 * r)) as f64;
                let rf = r as f64;
                ScaledScalar::from_f64((m * PI / rf).sin() / (PI / rf).sin())
            }
            _ => {
                if n == 0 {
                    return ScaledScalar::ZERO;
                }
                let num = scaled_sinh(self.lambda * n as f64);
                let q = num.try_div(&ScaledScalar::from_complex(self.sinh_lambda));
                let q = q.expect("sinh(λ) is nonzero off the classical points");
                if self.regime == Regime::GenericReal || self.regime == Regime::Unimodular {
                    // the imaginary part is pure rounding noise here
                    ScaledScalar::from_parts(Complex64::new(q.significand().re, 0.0), q.exponent())
                } else {
                    q
                }
            }
        }
    }
}

/// `sinh(w)` without overflow for large `Re w`.
fn scaled_sinh(w: Complex64) -> ScaledScalar {
    if w.re.abs() <= 300.0 {
        return ScaledScalar::from_complex(w.sinh());
    }
    let (x, y, sign) = if w.re > 0.0 { (w.re, w.im, 1.0) } else { (-w.re, -w.im, -1.0) };
    // sinh(w) = ±e^{x+iy}/2 up to a relative e^{-2x} < 1e-260
    let k = (x / LN_2).floor();
    let rem = (x - k * LN2_HI) - k * LN2_LO;
    let sig = Complex64::from_polar(0.5 * rem.exp(), y) * sign;
    ScaledScalar::from_parts(sig, k as i64)
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t = {} [{}]", self.value, self.regime)
    }
}
