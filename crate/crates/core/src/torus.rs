//! The skein algebra of the torus in the `(p, q)` basis.
//!
//! For coprime `(p, q)`, `s_(p,q)` is the `(p, q)` curve; for `d = gcd(p, q) > 1`
//! it is the Chebyshev combination `T_d(s_(p/d, q/d))` with `T_0 = 2`,
//! `T_1 = x`, `T_d = x T_{d-1} - T_{d-2}`. The product is the product-to-sum
//! rule `s_(p,q) * s_(u,v) = t^{pv-qu} s_(p+u,q+v) + t^{-(pv-qu)} s_(p-u,q-v)`,
//! where the index `(0, 0)` stands for twice the empty skein.

use std::collections::BTreeMap;
use std::ops::{Add, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nonzero lattice point up to sign: `p > 0`, or `p = 0` and `q > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairClass {
    p: i64,
    q: i64,
}

impl PairClass {
    /// Canonical representative of `±(p, q)`; `None` for `(0, 0)`.
    pub fn new(p: i64, q: i64) -> Option<Self> {
        if p == 0 && q == 0 {
            return None;
        }
        if p > 0 || (p == 0 && q > 0) {
            Some(PairClass { p, q })
        } else {
            Some(PairClass { p: -p, q: -q })
        }
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// Class in `H_1(T²; Z/2)` of `gcd(p, q)` parallel copies of the primitive curve.
    pub fn homology(&self) -> Z2Class {
        Z2Class(self.p.rem_euclid(2) as u8, self.q.rem_euclid(2) as u8)
    }
}

/// An element of `H_1(T²; Z/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Z2Class(pub u8, pub u8);

impl Z2Class {
    pub const ALL: [Z2Class; 4] = [Z2Class(0, 0), Z2Class(1, 0), Z2Class(0, 1), Z2Class(1, 1)];
}

/// `a_∅ ∅ + Σ a_(p,q) s_(p,q)`; zero coefficients are not stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TorusElement {
    empty: Complex64,
    terms: BTreeMap<PairClass, Complex64>,
}

impl TorusElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The empty skein, the unit of the algebra.
    pub fn empty() -> Self {
        Self::scalar(Complex64::new(1.0, 0.0))
    }

    pub fn scalar(c: Complex64) -> Self {
        TorusElement { empty: c, terms: BTreeMap::new() }
    }

    /// `s_(p,q)`; `s_(0,0)` is twice the empty skein.
    pub fn basis(p: i64, q: i64) -> Self {
        let mut x = Self::zero();
        x.add_basis(p, q, Complex64::new(1.0, 0.0));
        x
    }

    pub fn empty_coeff(&self) -> Complex64 {
        self.empty
    }

    pub fn coeff(&self, class: PairClass) -> Complex64 {
        self.terms.get(&class).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (PairClass, Complex64)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty() && self.empty == Complex64::default()
    }

    pub fn add_empty(&mut self, c: Complex64) {
        self.empty += c;
    }

    /// Adds `c * s_(p,q)`, folding `s_(0,0)` into `2c ∅`.
    pub fn add_basis(&mut self, p: i64, q: i64, c: Complex64) {
        match PairClass::new(p, q) {
            None => self.empty += 2.0 * c,
            Some(k) => {
                let sum = self.coeff(k) + c;
                if sum == Complex64::default() {
                    self.terms.remove(&k);
                } else {
                    self.terms.insert(k, sum);
                }
            }
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::scalar(self.empty * c);
        for (k, v) in self.terms() {
            out.add_basis(k.p, k.q, v * c);
        }
        out
    }

    /// Largest `|c|` over all stored coefficients, including `∅`.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(self.empty.norm(), f64::max)
    }

    /// Image under the mapping class acting on `H_1` by the integer matrix
    /// `[[a, b], [c, d]]` (of determinant 1).
    pub fn transform(&self, m: [[i64; 2]; 2]) -> Self {
        let mut out = Self::scalar(self.empty);
        for (k, v) in self.terms() {
            let (p, q) = (k.p, k.q);
            out.add_basis(m[0][0] * p + m[0][1] * q, m[1][0] * p + m[1][1] * q, v);
        }
        out
    }
}

impl Add for &TorusElement {
    type Output = TorusElement;

    fn add(self, rhs: &TorusElement) -> TorusElement {
        let mut out = self.clone();
        out.empty += rhs.empty;
        for (k, v) in rhs.terms() {
            out.add_basis(k.p, k.q, v);
        }
        out
    }
}

impl Sub for &TorusElement {
    type Output = TorusElement;

    fn sub(self, rhs: &TorusElement) -> TorusElement {
        self + &rhs.scale(Complex64::new(-1.0, 0.0))
    }
}

fn t_pow(t: Complex64, k: i64) -> Complex64 {
    let k = i32::try_from(k).expect("torus exponent out of range");
    t.powi(k)
}

/// Product of two basis curves.
pub fn torus_basis_mul(t: Complex64, x: PairClass, y: PairClass) -> TorusElement {
    let det = x.p * y.q - x.q * y.p;
    let mut out = TorusElement::zero();
    out.add_basis(x.p + y.p, x.q + y.q, t_pow(t, det));
    out.add_basis(x.p - y.p, x.q - y.q, t_pow(t, -det));
    out
}

/// Bilinear extension of [`torus_basis_mul`]; `∅` is the unit.
pub fn torus_mul(t: Complex64, x: &TorusElement, y: &TorusElement) -> TorusElement {
    let mut out = TorusElement::scalar(x.empty * y.empty);
    for (k, v) in y.terms() {
        out.add_basis(k.p, k.q, x.empty * v);
    }
    for (k, v) in x.terms() {
        out.add_basis(k.p, k.q, v * y.empty);
    }
    for (kx, vx) in x.terms() {
        for (ky, vy) in y.terms() {
            let det = kx.p * ky.q - kx.q * ky.p;
            let c = vx * vy;
            out.add_basis(kx.p + ky.p, kx.q + ky.q, c * t_pow(t, det));
            out.add_basis(kx.p - ky.p, kx.q - ky.q, c * t_pow(t, -det));
        }
    }
    out
}

/// `μ(x) = a_∅ ∅ + Σ a_(p,q) [(p, q)]` with `[(p, q)] ∈ H_1(T²; Z/2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MuImage {
    pub empty: Complex64,
    pub homology: BTreeMap<Z2Class, Complex64>,
}

pub fn mu(x: &TorusElement) -> MuImage {
    let mut homology: BTreeMap<Z2Class, Complex64> =
        Z2Class::ALL.iter().map(|&c| (c, Complex64::default())).collect();
    for (k, v) in x.terms() {
        *homology.get_mut(&k.homology()).unwrap() += v;
    }
    MuImage { empty: x.empty, homology }
}

/// The Yang-Mills trace on the closed torus: the coefficient of the empty skein.
pub fn torus_ym(x: &TorusElement) -> Complex64 {
    x.empty
}

/// A diffeomorphism-invariant trace factoring through `μ`. The mapping class
/// group fixes `∅` and the zero class and permutes the three nonzero classes
/// transitively, which leaves three free weights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvariantTrace {
    pub empty: Complex64,
    pub zero_class: Complex64,
    pub nonzero_class: Complex64,
}

impl InvariantTrace {
    /// The Yang-Mills trace as a member of the family.
    pub fn yang_mills() -> Self {
        InvariantTrace {
            empty: Complex64::new(1.0, 0.0),
            zero_class: Complex64::default(),
            nonzero_class: Complex64::default(),
        }
    }

    pub fn eval(&self, x: &TorusElement) -> Complex64 {
        let m = mu(x);
        let mut acc = self.empty * m.empty;
        for (class, v) in m.homology {
            let w = if class == Z2Class(0, 0) { self.zero_class } else { self.nonzero_class };
            acc += w * v;
        }
        acc
    }
}

/// One term of an expression file.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExprTerm {
    pub p: i64,
    pub q: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// JSON form of a torus element: `{"terms": [{"p", "q", "re", "im"}...], "empty": {"re", "im"}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusExpr {
    pub terms: Vec<ExprTerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empty: Option<ComplexJson>,
}

impl TorusExpr {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Domain(format!("bad torus expression: {e}")))
    }

    pub fn to_element(&self) -> TorusElement {
        let mut x = TorusElement::zero();
        if let Some(e) = self.empty {
            x.add_empty(Complex64::new(e.re, e.im));
        }
        for term in &self.terms {
            x.add_basis(term.p, term.q, Complex64::new(term.re, term.im));
        }
        x
    }

    pub fn from_element(x: &TorusElement) -> Self {
        let empty = (x.empty != Complex64::default())
            .then_some(ComplexJson { re: x.empty.re, im: x.empty.im });
        let terms = x
            .terms()
            .map(|(k, v)| ExprTerm { p: k.p, q: k.q, re: v.re, im: v.im })
            .collect();
        TorusExpr { terms, empty }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn pc(p: i64, q: i64) -> PairClass {
        PairClass::new(p, q).unwrap()
    }

    #[test]
    fn canonical_classes() {
        assert_eq!(pc(-1, 2), pc(1, -2));
        assert_eq!(pc(0, -3), pc(0, 3));
        assert!(PairClass::new(0, 0).is_none());
        assert_eq!(pc(2, 0).homology(), Z2Class(0, 0));
        assert_eq!(pc(3, -5).homology(), Z2Class(1, 1));
    }

    #[test]
    fn basis_products() {
        let t = c(0.5);
        let xy = torus_basis_mul(t, pc(1, 0), pc(0, 1));
        let mut expect = TorusElement::zero();
        expect.add_basis(1, 1, c(0.5));
        expect.add_basis(1, -1, c(2.0));
        assert_eq!(xy, expect);

        let xx = torus_basis_mul(t, pc(1, 0), pc(1, 0));
        assert_eq!(xx.empty_coeff(), c(2.0));
        assert_eq!(xx.coeff(pc(2, 0)), c(1.0));
        assert_eq!(xx.len(), 1);

        let x2x = torus_basis_mul(t, pc(2, 0), pc(1, 0));
        assert_eq!(x2x, &TorusElement::basis(3, 0) + &TorusElement::basis(1, 0));
    }

    #[test]
    fn unit_and_expansion() {
        let t = Complex64::from_polar(1.0, PI / 10.0);
        let x = &TorusElement::basis(2, 3) + &TorusElement::basis(-1, 4).scale(c(2.5));
        assert_eq!(torus_mul(t, &TorusElement::empty(), &x), x);
        assert_eq!(torus_mul(t, &x, &TorusElement::empty()), x);

        let s = &TorusElement::basis(1, 0) + &TorusElement::basis(0, 1);
        let sq = torus_mul(t, &s, &s);
        // (1,0)^2 and (0,1)^2 give (2,0),(0,2) and 2∅ each; the cross terms give (1,1),(1,-1) twice
        assert_eq!(sq.empty_coeff(), c(4.0));
        assert_eq!(sq.len(), 4);
        assert!((sq.coeff(pc(1, 1)) - (t + t.inv())).norm() < 1e-15);
        assert!((sq.coeff(pc(1, -1)) - (t + t.inv())).norm() < 1e-15);
    }

    #[test]
    fn commutator_of_generators() {
        let t = c(0.5);
        let a = TorusElement::basis(1, 0);
        let b = TorusElement::basis(0, 1);
        let comm = &torus_mul(t, &a, &b) - &torus_mul(t, &b, &a);
        let k = t - t.inv();
        let expect = &TorusElement::basis(1, 1).scale(k) - &TorusElement::basis(1, -1).scale(k);
        assert_eq!(comm, expect);
    }

    #[test]
    fn mu_and_trace() {
        let e = mu(&TorusElement::empty());
        assert_eq!(e.empty, c(1.0));
        assert!(e.homology.values().all(|v| *v == Complex64::default()));
        let m = mu(&TorusElement::basis(2, 0));
        assert_eq!(m.homology[&Z2Class(0, 0)], c(1.0));
        assert_eq!(torus_ym(&TorusElement::empty()), c(1.0));
        assert_eq!(torus_ym(&TorusElement::basis(3, 5)), c(0.0));
        let xx = torus_mul(c(0.5), &TorusElement::basis(1, 0), &TorusElement::basis(1, 0));
        assert_eq!(torus_ym(&xx), c(2.0));
    }

    #[test]
    fn chebyshev_recursion_matches_basis() {
        let t = Complex64::from_polar(0.7, 0.3);
        for (p, q) in [(1, 0), (0, 1), (1, 1), (2, 3), (-3, 5), (4, -1)] {
            let x = TorusElement::basis(p, q);
            let mut prev = TorusElement::scalar(c(2.0));
            let mut cur = x.clone();
            for d in 2..=6 {
                let next = &torus_mul(t, &x, &cur) - &prev;
                prev = cur;
                cur = next;
                assert_eq!(cur, TorusElement::basis(d * p, d * q), "(p,q)=({p},{q}) d={d}");
            }
        }
    }

    #[test]
    fn expression_round_trip() {
        let text = r#"{"terms": [{"p": 1, "q": 0, "re": 1.5}, {"p": -2, "q": -4, "re": 0.0, "im": 2.0}],
                      "empty": {"re": 3.0}}"#;
        let x = TorusExpr::parse(text).unwrap().to_element();
        assert_eq!(x.empty_coeff(), c(3.0));
        assert_eq!(x.coeff(pc(2, 4)), Complex64::new(0.0, 2.0));
        let back = TorusExpr::from_element(&x).to_element();
        assert_eq!(back, x);
        assert!(TorusExpr::parse("[1, 2]").is_err());
    }

    fn element() -> impl Strategy<Value = TorusElement> {
        let term = (-5i64..=5, -5i64..=5, -3i32..=3, -3i32..=3);
        proptest::collection::vec(term, 1..=6).prop_map(|v| {
            let mut x = TorusElement::zero();
            for (p, q, re, im) in v {
                x.add_basis(p, q, Complex64::new(re as f64, im as f64));
            }
            x
        })
    }

    proptest! {
        #[test]
        fn trace_property_and_commutator_kernel(x in element(), y in element(), which in 0usize..2) {
            let t = [c(0.5), Complex64::from_polar(1.0, PI / 10.0)][which];
            let xy = torus_mul(t, &x, &y);
            let yx = torus_mul(t, &y, &x);
            let scale = xy.max_abs().max(1.0);
            prop_assert!((torus_ym(&xy) - torus_ym(&yx)).norm() <= 1e-12 * scale);
            let comm = &xy - &yx;
            let m = mu(&comm);
            prop_assert!(m.empty.norm() <= 1e-12 * scale);
            for v in m.homology.values() {
                prop_assert!(v.norm() <= 1e-12 * scale);
            }
        }

        #[test]
        fn associativity(x in element(), y in element(), z in element()) {
            let t = c(0.8);
            let l = torus_mul(t, &torus_mul(t, &x, &y), &z);
            let r = torus_mul(t, &x, &torus_mul(t, &y, &z));
            let diff = &l - &r;
            prop_assert!(diff.max_abs() <= 1e-12 * l.max_abs().max(1.0));
        }

        #[test]
        fn invariant_traces_are_invariant(x in element(), y in element(), w in (-3i32..3, -3i32..3, -3i32..3)) {
            let t = c(0.6);
            let tr = InvariantTrace {
                empty: c(w.0 as f64), zero_class: c(w.1 as f64), nonzero_class: c(w.2 as f64),
            };
            let xy = torus_mul(t, &x, &y);
            let scale = xy.max_abs().max(1.0);
            prop_assert!((tr.eval(&xy) - tr.eval(&torus_mul(t, &y, &x))).norm() <= 1e-12 * scale);
            for m in [[[0, -1], [1, 0]], [[1, 1], [0, 1]]] {
                prop_assert!((tr.eval(&x.transform(m)) - tr.eval(&x)).norm() <= 1e-12 * x.max_abs().max(1.0));
                let moved = torus_mul(t, &x.transform(m), &y.transform(m));
                prop_assert!((&moved - &xy.transform(m)).max_abs() <= 1e-12 * scale);
            }
            prop_assert_eq!(InvariantTrace::yang_mills().eval(&x), torus_ym(&x));
        }
    }
}
