//! Quantum integers, theta and tetrahedral networks, 6j symbols.
//!
//! Everything is evaluated from factorial ratios of quantum integers in
//! [`ScaledScalar`] arithmetic. A ratio `Π[n_k]! / Π[d_k]!` is computed by
//! sorting both argument lists and pairing them largest-with-largest, so
//! that only the short quantum-integer ranges between paired arguments are
//! multiplied. With labels like `(i, i, k)` and `i` in the millions this
//! costs `O(k)` instead of `O(i)`.

use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::param::{Param, Regime};
use crate::scalar::ScaledScalar;

pub type Color = u32;

/// Quantum integers are cached up to this index; larger ones are recomputed.
const QINT_CACHE_LIMIT: u64 = 1 << 22;
/// Quantum factorials are cached up to this index.
const QFACT_CACHE_LIMIT: u64 = 1 << 16;

/// Three colors meeting at a trivalent vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub a: Color,
    pub b: Color,
    pub c: Color,
}

impl Triple {
    pub fn new(a: Color, b: Color, c: Color) -> Self {
        Triple { a, b, c }
    }

    /// Even sum and the three triangle inequalities.
    pub fn is_admissible(&self) -> bool {
        let (a, b, c) = (self.a as u64, self.b as u64, self.c as u64);
        (a + b + c) % 2 == 0 && a <= b + c && b <= a + c && c <= a + b
    }

    /// Admissibility in the reduced theory at `t = e^{iπ/2r}`: additionally
    /// every color is at most `r - 2` and the sum at most `2r - 4`.
    pub fn is_admissible_at_root(&self, r: u32) -> bool {
        let r = r as u64;
        let max = self.a.max(self.b).max(self.c) as u64;
        let sum = self.a as u64 + self.b as u64 + self.c as u64;
        self.is_admissible() && max + 2 <= r && sum + 4 <= 2 * r
    }

    fn half_sum(&self) -> u64 {
        (self.a as u64 + self.b as u64 + self.c as u64) / 2
    }
}

/// Admissibility appropriate to the regime of `p`.
pub fn admissible(p: &Param, a: Color, b: Color, c: Color) -> bool {
    let tr = Triple::new(a, b, c);
    match p.regime() {
        Regime::RootOfUnity { r } => tr.is_admissible_at_root(r),
        _ => tr.is_admissible(),
    }
}

/// Both sides of the tetrahedral estimate `|Tet| <= sqrt(θθθθ / ((-1)^{e+f}[e+1][f+1]))`.
#[derive(Clone, Copy, Debug)]
pub struct Est1Check {
    pub lhs: ScaledScalar,
    pub rhs: ScaledScalar,
    pub holds: bool,
}

/// Labels `(a, b, e; c, d, f)` of a tetrahedral network. The four vertices
/// carry `(b, c, e)`, `(a, d, e)`, `(a, b, f)` and `(c, d, f)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TetLabels {
    pub a: Color,
    pub b: Color,
    pub e: Color,
    pub c: Color,
    pub d: Color,
    pub f: Color,
}

impl TetLabels {
    pub fn new(a: Color, b: Color, e: Color, c: Color, d: Color, f: Color) -> Self {
        TetLabels { a, b, e, c, d, f }
    }

    pub fn from_slice(v: &[Color]) -> Result<Self> {
        match *v {
            [a, b, e, c, d, f] => Ok(Self::new(a, b, e, c, d, f)),
            _ => Err(Error::Domain(format!("expected 6 labels, got {}", v.len()))),
        }
    }

    pub fn vertices(&self) -> [Triple; 4] {
        let TetLabels { a, b, e, c, d, f } = *self;
        [Triple::new(b, c, e), Triple::new(a, d, e), Triple::new(a, b, f), Triple::new(c, d, f)]
    }
}

/// Evaluator bound to one parameter, memoizing quantum integers and factorials.
///
/// The caches are behind `RwLock`s; concurrent callers always observe the
/// same values as a fresh evaluator would produce.
#[derive(Debug)]
pub struct Recoupler {
    param: Param,
    qints: RwLock<Vec<ScaledScalar>>,
    qfacts: RwLock<Vec<ScaledScalar>>,
}

impl Clone for Recoupler {
    fn clone(&self) -> Self {
        Recoupler::new(self.param)
    }
}

impl Recoupler {
    pub fn new(param: Param) -> Self {
        Recoupler {
            param,
            qints: RwLock::new(vec![ScaledScalar::ZERO]),
            qfacts: RwLock::new(vec![ScaledScalar::ONE]),
        }
    }

    pub fn param(&self) -> &Param {
        &self.param
    }

    pub fn admissible(&self, a: Color, b: Color, c: Color) -> bool {
        admissible(&self.param, a, b, c)
    }

    fn require(&self, a: Color, b: Color, c: Color) -> Result<()> {
        if self.admissible(a, b, c) {
            Ok(())
        } else {
            Err(Error::Admissibility(a, b, c))
        }
    }

    /// `[n]`.
    pub fn quantum_int(&self, n: u64) -> ScaledScalar {
        if n >= QINT_CACHE_LIMIT || matches!(self.param.regime(), Regime::Classical { .. }) {
            return self.param.quantum_int(n);
        }
        {
            let cache = self.qints.read().unwrap();
            if let Some(v) = cache.get(n as usize) {
                return *v;
            }
        }
        let mut cache = self.qints.write().unwrap();
        let want = (n as usize + 1).max(2 * cache.len()).min(QINT_CACHE_LIMIT as usize);
        for k in cache.len()..want {
            cache.push(self.param.quantum_int(k as u64));
        }
        cache[n as usize]
    }

    /// `[n]! = [1][2]...[n]`.
    pub fn quantum_factorial(&self, n: u64) -> Result<ScaledScalar> {
        if let Regime::RootOfUnity { r } = self.param.regime() {
            if n >= r as u64 {
                return Err(Error::Domain(format!(
                    "[{n}]! contains [{r}] = 0 at the root of unity r = {r}"
                )));
            }
        }
        if n >= QFACT_CACHE_LIMIT {
            return Ok((1..=n).map(|k| self.quantum_int(k)).product());
        }
        {
            let cache = self.qfacts.read().unwrap();
            if let Some(v) = cache.get(n as usize) {
                return Ok(*v);
            }
        }
        let mut cache = self.qfacts.write().unwrap();
        while cache.len() <= n as usize {
            let k = cache.len() as u64;
            let next = cache[k as usize - 1] * self.quantum_int(k);
            cache.push(next);
        }
        Ok(cache[n as usize])
    }

    /// `Π_k [num_k]! / Π_k [den_k]!` via sorted pairing.
    fn factorial_ratio(&self, num: &mut [u64], den: &mut [u64]) -> Result<ScaledScalar> {
        num.sort_unstable_by(|x, y| y.cmp(x));
        den.sort_unstable_by(|x, y| y.cmp(x));
        let mut top = ScaledScalar::ONE;
        let mut bottom = ScaledScalar::ONE;
        let len = num.len().max(den.len());
        for k in 0..len {
            let x = num.get(k).copied().unwrap_or(0);
            let y = den.get(k).copied().unwrap_or(0);
            if x > y {
                for j in y + 1..=x {
                    top = top * self.quantum_int(j);
                }
            } else {
                for j in x + 1..=y {
                    bottom = bottom * self.quantum_int(j);
                }
            }
        }
        top.try_div(&bottom)
            .map_err(|_| Error::Degenerate("vanishing quantum factorial in a denominator".into()))
    }

    /// The theta network `θ(a, b, c)`.
    pub fn theta(&self, a: Color, b: Color, c: Color) -> Result<ScaledScalar> {
        self.require(a, b, c)?;
        let m = Triple::new(a, b, c).half_sum();
        let (a, b, c) = (a as u64, b as u64, c as u64);
        let ratio = self.factorial_ratio(&mut [m + 1, m - c, m - a, m - b], &mut [a, b, c])?;
        Ok(ScaledScalar::sign_pow(m as i64) * ratio)
    }

    /// The tetrahedral network `Tet(a b e; c d f)` by the Kauffman–Lins single
    /// alternating sum.
    pub fn tet(&self, labels: TetLabels) -> Result<ScaledScalar> {
        for tr in labels.vertices() {
            self.require(tr.a, tr.b, tr.c)?;
        }
        let TetLabels { a, b, e, c, d, f } = labels;
        let (a, b, e, c, d, f) = (a as u64, b as u64, e as u64, c as u64, d as u64, f as u64);
        let vertex = [(a + d + e) / 2, (b + c + e) / 2, (a + b + f) / 2, (c + d + f) / 2];
        let square = [(a + b + c + d) / 2, (a + c + e + f) / 2, (b + d + e + f) / 2];
        let lo = *vertex.iter().max().unwrap();
        let hi = *square.iter().min().unwrap();
        if lo > hi {
            return Err(Error::Internal(format!(
                "empty tetrahedral sum range {lo}..={hi} for admissible labels {labels:?}"
            )));
        }

        let mut pre_num = [0u64; 12];
        for (j, &sq) in square.iter().enumerate() {
            for (l, &v) in vertex.iter().enumerate() {
                pre_num[4 * j + l] = sq - v;
            }
        }
        let prefactor = self.factorial_ratio(&mut pre_num, &mut [a, b, c, d, e, f])?;

        let root = self.param.root_order().map(|r| r as u64);
        let mut sum = ScaledScalar::ZERO;
        for s in lo..=hi {
            if root.is_some_and(|r| s + 1 >= r) {
                // [s+1]! contains [r] = 0
                continue;
            }
            let mut den = [
                s - vertex[0],
                s - vertex[1],
                s - vertex[2],
                s - vertex[3],
                square[0] - s,
                square[1] - s,
                square[2] - s,
            ];
            let term = self.factorial_ratio(&mut [s + 1], &mut den)?;
            sum = sum + ScaledScalar::sign_pow(s as i64) * term;
        }
        Ok(prefactor * sum)
    }

    /// `{a b e; c d f} = Tet(a b e; c d f) (-1)^e [e+1] / (θ(a,d,e) θ(c,b,e))`.
    pub fn sixj(&self, labels: TetLabels) -> Result<ScaledScalar> {
        let TetLabels { a, b, e, c, d, f: _ } = labels;
        let tet = self.tet(labels)?;
        let den = self.theta(a, d, e)? * self.theta(c, b, e)?;
        let num = tet * ScaledScalar::sign_pow(e as i64) * self.quantum_int(e as u64 + 1);
        num.try_div(&den)
            .map_err(|_| Error::Degenerate(format!("θ({a},{d},{e}) θ({c},{b},{e}) = 0")))
    }

    /// Right-hand side of the tetrahedral estimate, `sqrt|θθθθ / ([e+1][f+1])|`.
    pub fn est1_rhs(&self, labels: TetLabels) -> Result<ScaledScalar> {
        let mut prod = ScaledScalar::ONE;
        for tr in labels.vertices() {
            prod = prod * self.theta(tr.a, tr.b, tr.c)?;
        }
        let den = self.quantum_int(labels.e as u64 + 1) * self.quantum_int(labels.f as u64 + 1);
        let ratio = prod
            .try_div(&den)
            .map_err(|_| Error::Degenerate("[e+1][f+1] = 0".into()))?;
        Ok(ratio.abs().sqrt())
    }

    pub fn check_est1(&self, labels: TetLabels) -> Result<Est1Check> {
        let lhs = self.tet(labels)?.abs();
        let rhs = self.est1_rhs(labels)?;
        let slack = rhs * ScaledScalar::from_f64(1.0 + 1e-9);
        let holds = lhs.cmp_abs(&slack) != std::cmp::Ordering::Greater;
        Ok(Est1Check { lhs, rhs, holds })
    }

    /// `|Tet(i i i; k1 k2 k3)| / sqrt|θ(i,i,k1) θ(i,i,k2) θ(i,i,k3)|`, the
    /// per-vertex factor of a Yang-Mills series term.
    pub fn vertex_ratio(&self, i: Color, k1: Color, k2: Color, k3: Color) -> Result<ScaledScalar> {
        let tet = self.tet(TetLabels::new(i, i, i, k1, k2, k3))?;
        let th = self.theta(i, i, k1)? * self.theta(i, i, k2)? * self.theta(i, i, k3)?;
        let den = th.abs().sqrt();
        tet.abs()
            .try_div(&den)
            .map_err(|_| Error::Degenerate("vanishing theta in the vertex ratio".into()))
    }

    /// `C(k1, k2, k3) = sqrt|θ(k1,k2,k3) / [k3+1]|`, the color-dependent factor
    /// left after shifting the `i`-dependent thetas across.
    pub fn est2_constant(&self, k1: Color, k2: Color, k3: Color) -> Result<ScaledScalar> {
        let th = self.theta(k1, k2, k3)?;
        let q = self.quantum_int(k3 as u64 + 1);
        Ok(th
            .try_div(&q)
            .map_err(|_| Error::Degenerate(format!("[{}] = 0", k3 + 1)))?
            .abs()
            .sqrt())
    }

    /// The bound `t^i C(k1, k2, k3)` on [`Recoupler::vertex_ratio`], valid
    /// for real `0 < t < 1`.
    pub fn est2_bound(&self, i: Color, k1: Color, k2: Color, k3: Color) -> Result<ScaledScalar> {
        let t = self.param.value();
        let ok = self.param.regime() == Regime::GenericReal && t.re > 0.0 && t.re < 1.0;
        if !ok {
            return Err(Error::Regime(format!(
                "the t^i bound needs real 0 < t < 1, got {}",
                self.param
            )));
        }
        for (x, y, z) in [(i, i, k1), (i, i, k2), (i, i, k3), (k1, k2, k3)] {
            self.require(x, y, z)?;
        }
        let ti = ScaledScalar::from_f64(t.re).powi(i as i64)?;
        Ok(ti * self.est2_constant(k1, k2, k3)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn rc(t: f64) -> Recoupler {
        Recoupler::new(Param::real(t).unwrap())
    }

    fn close(a: ScaledScalar, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn admissibility_rules() {
        assert!(Triple::new(1, 1, 2).is_admissible());
        assert!(Triple::new(0, 0, 0).is_admissible());
        assert!(!Triple::new(1, 1, 1).is_admissible());
        assert!(!Triple::new(1, 1, 4).is_admissible());
        assert!(Triple::new(1, 1, 2).is_admissible_at_root(4));
        assert!(!Triple::new(2, 2, 2).is_admissible_at_root(4));
        assert!(!Triple::new(3, 1, 2).is_admissible_at_root(4));
        assert!(Triple::new(2, 1, 1).is_admissible_at_root(4));
    }

    #[test]
    fn factorials() {
        let p = rc(0.5);
        assert_eq!(p.quantum_factorial(0).unwrap(), ScaledScalar::ONE);
        assert!(close(p.quantum_factorial(2).unwrap(), 4.25, 1e-14));
        let c = Recoupler::new(Param::classical(-1));
        assert_eq!(c.quantum_factorial(4).unwrap().to_f64(), 24.0);
        let r = Recoupler::new(Param::root_of_unity(5).unwrap());
        assert!(r.quantum_factorial(4).is_ok());
        assert!(matches!(r.quantum_factorial(5), Err(Error::Domain(_))));
    }

    #[test]
    fn theta_values() {
        let p = rc(0.5);
        assert_eq!(p.theta(0, 0, 0).unwrap(), ScaledScalar::ONE);
        assert!(close(p.theta(1, 1, 0).unwrap(), -4.25, 1e-14));
        for a in 0..12 {
            let delta = ScaledScalar::sign_pow(a as i64) * p.quantum_int(a as u64 + 1);
            assert!(p.theta(a, a, 0).unwrap().rel_diff(&delta) < 1e-13);
        }
        let c = Recoupler::new(Param::classical(-1));
        assert_eq!(c.theta(1, 1, 2).unwrap().to_f64(), 3.0);
        assert!(matches!(p.theta(1, 1, 1), Err(Error::Admissibility(1, 1, 1))));
    }

    /// θ by plain integer factorials at t = ±1.
    fn theta_integer(a: u64, b: u64, c: u64) -> f64 {
        let fact = |n: u64| (1..=n).map(|k| k as f64).product::<f64>();
        let m = (a + b + c) / 2;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        sign * fact(m + 1) * fact(m - a) * fact(m - b) * fact(m - c) / (fact(a) * fact(b) * fact(c))
    }

    #[test]
    fn classical_theta_is_integer_formula() {
        let c = Recoupler::new(Param::classical(1));
        for a in 0..8u32 {
            for b in 0..8u32 {
                for cc in 0..8u32 {
                    if Triple::new(a, b, cc).is_admissible() {
                        let got = c.theta(a, b, cc).unwrap().to_f64();
                        assert_eq!(got, theta_integer(a as u64, b as u64, cc as u64));
                    }
                }
            }
        }
    }

    #[test]
    fn tet_degenerations() {
        let p = rc(0.5);
        let zero = TetLabels::new(0, 0, 0, 0, 0, 0);
        assert_eq!(p.tet(zero).unwrap(), ScaledScalar::ONE);
        // f = 0 collapses the tetrahedron onto a theta graph
        let (a, b, e) = (1, 1, 2);
        let tet = p.tet(TetLabels::new(a, b, e, b, a, 0)).unwrap();
        assert!(tet.rel_diff(&p.theta(a, b, e).unwrap()) < 1e-13);
        for i in 0..10 {
            let tet = p.tet(TetLabels::new(i, i, i, 0, 0, 0)).unwrap();
            assert!(tet.rel_diff(&p.theta(i, i, 0).unwrap()) < 1e-12);
        }
        assert!(matches!(
            p.tet(TetLabels::new(1, 1, 2, 0, 0, 1)),
            Err(Error::Admissibility(..))
        ));
    }

    #[test]
    fn tet_symmetries() {
        // relabelings that preserve the set of vertex triples
        let p = rc(0.7);
        for a in 0..=6 {
            for b in 0..=6 {
                for e in 0..=6 {
                    for c in 0..=6 {
                        for d in 0..=6 {
                            for f in 0..=6 {
                                let l = TetLabels::new(a, b, e, c, d, f);
                                if !l.vertices().iter().all(|t| t.is_admissible()) {
                                    continue;
                                }
                                let v = p.tet(l).unwrap();
                                for m in [
                                    TetLabels::new(b, a, e, d, c, f),
                                    TetLabels::new(c, d, e, a, b, f),
                                    TetLabels::new(a, d, f, c, b, e),
                                ] {
                                    assert!(p.tet(m).unwrap().rel_diff(&v) < 1e-11, "{l:?} vs {m:?}");
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sixj_trivial_and_degenerate() {
        let p = rc(0.5);
        assert!(p.sixj(TetLabels::new(0, 0, 0, 0, 0, 0)).unwrap().rel_diff(&ScaledScalar::ONE) < 1e-15);
        let r = Recoupler::new(Param::root_of_unity(5).unwrap());
        assert!(matches!(
            r.sixj(TetLabels::new(4, 0, 4, 0, 4, 0)),
            Err(Error::Admissibility(..))
        ));
    }

    fn ort_sweep(p: &Recoupler, max: Color) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..=max {
            for b in 0..=max {
                for c in 0..=max {
                    for d in 0..=max {
                        for f in 0..=max {
                            if !(p.admissible(a, b, f) && p.admissible(c, d, f)) {
                                continue;
                            }
                            for g in 0..=max {
                                if !(p.admissible(a, b, g) && p.admissible(c, d, g)) {
                                    continue;
                                }
                                let mut sum = ScaledScalar::ZERO;
                                for e in 0..=2 * max {
                                    if p.admissible(a, d, e) && p.admissible(c, b, e) {
                                        let x = p.sixj(TetLabels::new(a, b, e, c, d, f)).unwrap();
                                        let y = p.sixj(TetLabels::new(d, a, g, b, c, e)).unwrap();
                                        sum = sum + x * y;
                                    }
                                }
                                let target = if f == g { 1.0 } else { 0.0 };
                                let err = (sum.to_complex() - target).norm();
                                worst = worst.max(err);
                            }
                        }
                    }
                }
            }
        }
        worst
    }

    #[test]
    fn orthogonality_small_colors() {
        assert!(ort_sweep(&rc(0.7), 4) < 1e-10);
        assert!(ort_sweep(&rc(1.5), 3) < 1e-10);
        assert!(ort_sweep(&Recoupler::new(Param::classical(-1)), 4) < 1e-10);
        assert!(ort_sweep(&Recoupler::new(Param::root_of_unity(5).unwrap()), 3) < 1e-10);
        let c = Recoupler::new(Param::new(Complex64::from_polar(0.8, 0.4)).unwrap());
        assert!(ort_sweep(&c, 3) < 1e-10);
    }

    #[test]
    fn est1_examples() {
        let p = rc(0.5);
        let zero = p.check_est1(TetLabels::new(0, 0, 0, 0, 0, 0)).unwrap();
        assert!(zero.holds);
        assert_eq!(zero.lhs, ScaledScalar::ONE);
        assert!(zero.rhs.rel_diff(&ScaledScalar::ONE) < 1e-15);
        for i in 0..=30 {
            for (k1, k2, k3) in [(0, 0, 0), (2, 2, 2), (2, 4, 2), (4, 4, 4), (2, 2, 0)] {
                if !(Triple::new(i, i, k1).is_admissible() && Triple::new(i, i, k3).is_admissible())
                {
                    continue;
                }
                if !Triple::new(i, i, k2).is_admissible() {
                    continue;
                }
                assert!(p.check_est1(TetLabels::new(i, i, i, k1, k2, k3)).unwrap().holds);
            }
        }
    }

    #[test]
    fn est2_examples() {
        let p = rc(0.5);
        let b = p.est2_bound(0, 0, 0, 0).unwrap();
        assert_eq!(b, ScaledScalar::ONE);
        assert_eq!(p.vertex_ratio(0, 0, 0, 0).unwrap(), ScaledScalar::ONE);
        for i in 1..=100 {
            let q = p.vertex_ratio(i, 2, 2, 2).unwrap();
            let bound = p.est2_bound(i, 2, 2, 2).unwrap();
            assert!(q.cmp_abs(&bound).is_le(), "i={i}");
        }
        assert!(matches!(rc(1.5).est2_bound(1, 2, 2, 2), Err(Error::Regime(_))));
    }

    #[test]
    fn root_of_unity_quantum_integer_vanishes() {
        for r in 3..20u32 {
            let p = Recoupler::new(Param::root_of_unity(r).unwrap());
            assert!(p.quantum_int(r as u64).to_f64().abs() <= 1e-12);
        }
        let p = Recoupler::new(Param::new(Complex64::from_polar(1.0, PI / 6.0)).unwrap());
        assert_eq!(p.quantum_int(3).to_f64(), 0.0);
    }

    #[test]
    fn cache_is_invisible() {
        let p = Param::real(0.6).unwrap();
        let warm = Recoupler::new(p);
        let _ = warm.quantum_factorial(300).unwrap();
        let labels = TetLabels::new(7, 9, 4, 5, 3, 8);
        let fresh = Recoupler::new(p);
        assert_eq!(warm.tet(labels).unwrap(), fresh.tet(labels).unwrap());

        let shared = std::sync::Arc::new(Recoupler::new(p));
        let handles: Vec<_> = (0..4)
            .map(|k| {
                let s = shared.clone();
                std::thread::spawn(move || s.theta(10 + k, 10 + k, 2 * k).unwrap())
            })
            .collect();
        for (k, h) in handles.into_iter().enumerate() {
            let k = k as u32;
            assert_eq!(h.join().unwrap(), fresh.theta(10 + k, 10 + k, 2 * k).unwrap());
        }
    }
}
