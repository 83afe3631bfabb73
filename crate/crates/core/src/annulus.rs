//! The skein algebra of the annulus in the basis `{s_i}`, where `s_i` is the
//! core circle carrying the `i`-th Jones–Wenzl idempotent.

use std::collections::BTreeMap;
use std::ops::{Add, Sub};

use crate::param::{Param, Regime};
use crate::recoupling::Color;
use crate::scalar::ScaledScalar;

/// A finite linear combination `Σ α_i s_i`. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AnnulusElement {
    coeffs: BTreeMap<Color, ScaledScalar>,
}

impl AnnulusElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The basis element `s_i`.
    pub fn basis(i: Color) -> Self {
        Self::term(i, ScaledScalar::ONE)
    }

    pub fn term(i: Color, coeff: ScaledScalar) -> Self {
        let mut x = Self::zero();
        x.add_term(i, coeff);
        x
    }

    pub fn from_terms<I: IntoIterator<Item = (Color, ScaledScalar)>>(terms: I) -> Self {
        let mut x = Self::zero();
        for (i, c) in terms {
            x.add_term(i, c);
        }
        x
    }

    /// Adds `coeff * s_i` in place.
    pub fn add_term(&mut self, i: Color, coeff: ScaledScalar) {
        let sum = self.coeff(i) + coeff;
        if sum.is_zero() {
            self.coeffs.remove(&i);
        } else {
            self.coeffs.insert(i, sum);
        }
    }

    pub fn coeff(&self, i: Color) -> ScaledScalar {
        self.coeffs.get(&i).copied().unwrap_or(ScaledScalar::ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Color, ScaledScalar)> + '_ {
        self.coeffs.iter().map(|(&i, &c)| (i, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_color(&self) -> Option<Color> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn scale(&self, c: ScaledScalar) -> Self {
        Self::from_terms(self.terms().map(|(i, x)| (i, x * c)))
    }
}

impl Add for &AnnulusElement {
    type Output = AnnulusElement;

    fn add(self, rhs: &AnnulusElement) -> AnnulusElement {
        let mut out = self.clone();
        for (i, c) in rhs.terms() {
            out.add_term(i, c);
        }
        out
    }
}

impl Sub for &AnnulusElement {
    type Output = AnnulusElement;

    fn sub(self, rhs: &AnnulusElement) -> AnnulusElement {
        let mut out = self.clone();
        for (i, c) in rhs.terms() {
            out.add_term(i, -c);
        }
        out
    }
}

/// Largest surviving color: `r - 2` in the reduced theory, unbounded otherwise.
fn color_cap(p: &Param) -> Color {
    match p.regime() {
        Regime::RootOfUnity { r } => r - 2,
        _ => Color::MAX,
    }
}

/// `s_i * s_j = Σ_{q = |i-j|, step 2}^{i+j} s_q`, extended bilinearly. In the
/// reduced theory every `s_q` with `q > r - 2` is zero.
pub fn annulus_mul(p: &Param, x: &AnnulusElement, y: &AnnulusElement) -> AnnulusElement {
    let cap = color_cap(p);
    let mut out = AnnulusElement::zero();
    for (i, a) in x.terms().filter(|&(i, _)| i <= cap) {
        for (j, b) in y.terms().filter(|&(j, _)| j <= cap) {
            let ab = a * b;
            let top = (i + j).min(cap);
            let mut q = i.abs_diff(j);
            while q <= top {
                out.add_term(q, ab);
                q += 2;
            }
        }
    }
    out
}

/// Yang-Mills trace on the annulus: the coefficient of the empty skein `s_0`.
pub fn annulus_ym(x: &AnnulusElement) -> ScaledScalar {
    x.coeff(0)
}

/// `⟨x, y⟩ = YM(x * y)`.
pub fn annulus_pairing(p: &Param, x: &AnnulusElement, y: &AnnulusElement) -> ScaledScalar {
    annulus_ym(&annulus_mul(p, x, y))
}

/// The partial Kirby color `Σ_{i=0}^{n} (-1)^i [i+1] s_i`; capped at `r - 2`
/// in the reduced theory.
pub fn kirby_partial(p: &Param, n: Color) -> AnnulusElement {
    let n = n.min(color_cap(p));
    AnnulusElement::from_terms(
        (0..=n).map(|i| (i, ScaledScalar::sign_pow(i as i64) * p.quantum_int(i as u64 + 1))),
    )
}

/// Solves for the coefficients `α_0..=α_n` of an annulus skein annihilating
/// handle-slides, normalized by `α_0 = 1`.
///
/// A handle-slide of a single strand changes `s_k` into `s_1 * s_k`, and the
/// slid strand's own loop contributes `-[2] s_k`, so annihilation requires
/// `⟨Σ α_i s_i, (s_1 + [2] s_0) * s_k⟩ = 0` for every `k`. That pairing only
/// involves `α_{k-1}, α_k, α_{k+1}` with unit coefficient on `α_{k+1}`, which
/// determines the coefficients one at a time.
pub fn solve_handleslide_coeffs(p: &Param, n: Color) -> Vec<ScaledScalar> {
    let n = n.min(color_cap(p));
    let slide = &AnnulusElement::basis(1) + &AnnulusElement::term(0, p.quantum_int(2));
    let mut alpha = vec![ScaledScalar::ONE];
    for k in 0..n {
        let probe = annulus_mul(p, &slide, &AnnulusElement::basis(k));
        let known: ScaledScalar = (0..=k).map(|i| alpha[i as usize] * probe.coeff(i)).sum();
        let lead = probe.coeff(k + 1);
        if lead.is_zero() {
            break;
        }
        alpha.push(-known.try_div(&lead).expect("nonzero leading coefficient"));
    }
    alpha
}
