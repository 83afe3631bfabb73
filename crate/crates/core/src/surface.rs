//! The Yang-Mills trace on closed surfaces of genus `g >= 2`.
//!
//! Gluing the Kirby color `Σ (-1)^i [i+1] s_i` into the boundary of the
//! handlebody and fusing every edge of a colored spine against the `i`-colored
//! core gives the series
//!
//! ```text
//! YM(s_c) = Σ_i (-1)^i [i+1] Π_j 1/θ(i,i,k_j) Π_v Tet(i i i; k_v1 k_v2 k_v3)
//! ```
//!
//! which converges for `|t| != 1`, is a finite sum at `t = e^{iπ/2r}`, and
//! diverges elsewhere on the unit circle.

use std::f64::consts::LN_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::param::{is_root_of_unity, Param, Regime};
use crate::recoupling::{Color, Recoupler, TetLabels};
use crate::scalar::ScaledScalar;
use crate::spine::ColoredSpine;

/// Largest root-of-unity order ruled out by [`divergence_probe`].
pub const PROBE_ROOT_ORDER: u32 = 4000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesOptions {
    /// Absolute tolerance on the certified tail; `0` sums exactly `max_terms` terms.
    pub tol: f64,
    pub max_terms: u64,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions { tol: 1e-10, max_terms: 50_000_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesResult {
    pub value: ScaledScalar,
    pub terms_used: u64,
    /// Bound on the absolute value of the omitted terms.
    pub tail_bound: f64,
    /// `tail_bound <= tol`.
    pub converged: bool,
    pub regime: Regime,
    /// Whether the tail bound is proven for this regime. For non-real `t` the
    /// per-vertex tetrahedral estimate can fail, so the bound is only heuristic.
    pub certified: bool,
}

/// One row of a series trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TermRecord {
    pub index: u64,
    pub term: ScaledScalar,
    pub partial_sum: ScaledScalar,
    pub tail_bound: f64,
}

/// `ln sinh(x)` for `x > 0` without overflow.
fn ln_sinh(x: f64) -> f64 {
    x - LN_2 + (-(-2.0 * x).exp_m1()).ln()
}

/// `ln(1 - e^{-x})` for `x > 0`.
fn ln_one_minus_exp(x: f64) -> f64 {
    (-(-x).exp_m1()).ln()
}

/// Natural log of the tail `Σ_{n > n0} n^{-p}` bound `n0^{1-p} / (p-1)`.
fn ln_pseries_tail(n0: f64, p: f64) -> f64 {
    if p <= 1.0 || n0 < 1.0 {
        return f64::INFINITY;
    }
    (1.0 - p) * n0.ln() - (p - 1.0).ln()
}

/// Precomputed data for the terms of one spine at one parameter.
#[derive(Debug)]
pub struct YmSeries {
    rc: Recoupler,
    genus: u32,
    edges: Vec<(Color, i64)>,
    vertices: Vec<([Color; 3], i64)>,
    spine_constant: ScaledScalar,
}

impl YmSeries {
    pub fn new(param: Param, spine: &ColoredSpine) -> Result<Self> {
        let rc = Recoupler::new(param);
        if let Regime::RootOfUnity { r } = param.regime() {
            for tr in spine.vertex_colors() {
                if !tr.is_admissible_at_root(r) {
                    return Err(Error::Admissibility(tr.a, tr.b, tr.c));
                }
            }
        }
        let edges = spine.color_counts().into_iter().map(|(k, m)| (k, m as i64)).collect();
        let vertices: Vec<([Color; 3], i64)> =
            spine.vertex_counts().into_iter().map(|(k, m)| (k, m as i64)).collect();
        let mut spine_constant = ScaledScalar::ONE;
        for &(k, m) in &vertices {
            let c = vertex_constant(&rc, k)?;
            spine_constant = spine_constant * c.powi(m)?;
        }
        Ok(YmSeries { rc, genus: spine.genus(), edges, vertices, spine_constant })
    }

    pub fn recoupler(&self) -> &Recoupler {
        &self.rc
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    /// `Π_v sqrt|θ(k_v) / [k_v3 + 1]|`, with the slot `k_v3` chosen per vertex
    /// to minimize the factor.
    pub fn spine_constant(&self) -> ScaledScalar {
        self.spine_constant
    }

    /// `Π_j 1/θ(i,i,k_j) Π_v Tet(i i i; k_v)`, zero when some `(i, i, k_j)`
    /// is inadmissible.
    pub fn term(&self, i: Color) -> Result<ScaledScalar> {
        if self.edges.iter().any(|&(k, _)| !self.rc.admissible(i, i, k)) {
            return Ok(ScaledScalar::ZERO);
        }
        let mut acc = ScaledScalar::ONE;
        for &(k, m) in &self.edges {
            let th = self.rc.theta(i, i, k)?;
            let inv = th
                .powi(m)?
                .recip()
                .map_err(|_| Error::Degenerate(format!("θ({i},{i},{k}) = 0")))?;
            acc = acc * inv;
        }
        for &([k1, k2, k3], m) in &self.vertices {
            acc = acc * self.rc.tet(TetLabels::new(i, i, i, k1, k2, k3))?.powi(m)?;
        }
        Ok(acc)
    }

    /// `(-1)^i [i+1] · term(i)`.
    pub fn summand(&self, i: Color) -> Result<ScaledScalar> {
        let t = self.term(i)?;
        if t.is_zero() {
            return Ok(t);
        }
        Ok(ScaledScalar::sign_pow(i as i64) * self.rc.quantum_int(i as u64 + 1) * t)
    }

    /// `C · |[i+1]|^{2-2g}`, the bound on `|summand(i)|` for real `t`.
    pub fn summand_bound(&self, i: Color) -> Result<ScaledScalar> {
        let q = self.rc.quantum_int(i as u64 + 1).abs();
        Ok(self.spine_constant * q.powi(2 - 2 * self.genus as i64)?)
    }

    fn tail_model(&self) -> TailModel {
        let p = self.rc.param();
        let ln_c = self.spine_constant.abs_log2() * LN_2;
        let power = 2.0 * self.genus as f64 - 2.0;
        let lambda = p.lambda();
        let (integer_lower_bound, mu, ln_s) = match p.regime() {
            Regime::Classical { .. } => (true, 0.0, 0.0),
            Regime::GenericReal => (true, lambda.re.abs(), lambda.sinh().norm().ln()),
            _ => (false, lambda.re.abs(), lambda.sinh().norm().ln()),
        };
        TailModel { ln_c, power, integer_lower_bound, mu, ln_s }
    }
}

/// Minimizes `sqrt|θ(k1,k2,k3) / [k_slot + 1]|` over the three slots.
fn vertex_constant(rc: &Recoupler, k: [Color; 3]) -> Result<ScaledScalar> {
    let mut best: Option<ScaledScalar> = None;
    for slot in 0..3 {
        let others: Vec<Color> = (0..3).filter(|&s| s != slot).map(|s| k[s]).collect();
        let c = rc.est2_constant(others[0], others[1], k[slot])?;
        if best.is_none_or(|b| c.cmp_abs(&b) == std::cmp::Ordering::Less) {
            best = Some(c);
        }
    }
    Ok(best.expect("three slots"))
}

/// Tail bound for `Σ_{n > N} C |[n]|^{-p}` after `N` terms.
#[derive(Clone, Copy, Debug)]
struct TailModel {
    ln_c: f64,
    power: f64,
    /// `|[n]| >= n` (real `t` and `t = ±1`).
    integer_lower_bound: bool,
    /// `|[n]| >= sinh(n mu) / e^{ln_s}`.
    mu: f64,
    ln_s: f64,
}

impl TailModel {
    fn ln_tail(&self, n_terms: u64) -> f64 {
        if self.ln_c == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let mut best = f64::INFINITY;
        if self.integer_lower_bound {
            best = best.min(ln_pseries_tail(n_terms as f64, self.power));
        }
        if self.mu > 0.0 && self.power > 0.0 {
            let first = (n_terms + 1) as f64 * self.mu;
            let geom = self.power * (self.ln_s - ln_sinh(first))
                - ln_one_minus_exp(self.power * self.mu);
            best = best.min(geom);
        }
        self.ln_c + best
    }

    fn tail(&self, n_terms: u64) -> f64 {
        self.ln_tail(n_terms).exp()
    }
}

/// `Π_j 1/θ(i,i,k_j) Π_v Tet(i i i; k_v)` for one index.
pub fn ym_term(p: &Param, spine: &ColoredSpine, i: Color) -> Result<ScaledScalar> {
    YmSeries::new(*p, spine)?.term(i)
}

fn check_genus(spine: &ColoredSpine) -> Result<()> {
    if spine.genus() < 2 {
        return Err(Error::Genus(
            spine.genus(),
            "the closed-surface series needs genus >= 2; use the torus trace for genus 1".into(),
        ));
    }
    Ok(())
}

fn color_index(i: u64) -> Result<Color> {
    Color::try_from(i).map_err(|_| Error::Domain(format!("index {i} exceeds the color range")))
}

/// The series for `|t| != 1` or `t = ±1`, summed until the tail bound drops
/// below `opts.tol`. `observer` sees every term.
pub fn ym_closed_with(
    p: &Param,
    spine: &ColoredSpine,
    opts: SeriesOptions,
    observer: &mut dyn FnMut(&TermRecord),
) -> Result<SeriesResult> {
    check_genus(spine)?;
    match p.regime() {
        Regime::Unimodular => {
            return Err(Error::Divergence(format!(
                "|t| = 1 and t = {} is not a root of unity",
                p.value()
            )))
        }
        Regime::RootOfUnity { r } => {
            return Err(Error::Regime(format!(
                "t = e^(iπ/2r) with r = {r} is a finite sum; use the root-of-unity evaluation"
            )))
        }
        _ => {}
    }
    let series = YmSeries::new(*p, spine)?;
    let model = series.tail_model();
    let mut sum = ScaledScalar::ZERO;
    let mut tail = f64::INFINITY;
    let mut used = 0;
    while used < opts.max_terms {
        let term = series.summand(color_index(used)?)?;
        sum = sum + term;
        used += 1;
        tail = model.tail(used);
        observer(&TermRecord { index: used - 1, term, partial_sum: sum, tail_bound: tail });
        if opts.tol > 0.0 && tail <= opts.tol {
            break;
        }
    }
    Ok(SeriesResult {
        value: sum,
        terms_used: used,
        tail_bound: tail,
        converged: tail <= opts.tol,
        regime: p.regime(),
        certified: p.has_real_quantum_ints(),
    })
}

pub fn ym_closed(p: &Param, spine: &ColoredSpine, opts: SeriesOptions) -> Result<SeriesResult> {
    ym_closed_with(p, spine, opts, &mut |_| {})
}

/// The finite sum over `i = 0..=r-2` at `t = e^{iπ/2r}`.
pub fn ym_root(p: &Param, spine: &ColoredSpine) -> Result<ScaledScalar> {
    let r = p.root_order().ok_or_else(|| {
        Error::Regime(format!("the finite sum needs t = e^(iπ/2r), got {}", p.regime()))
    })?;
    check_genus(spine)?;
    let series = YmSeries::new(*p, spine)?;
    let mut sum = ScaledScalar::ZERO;
    for i in 0..=r - 2 {
        sum = sum + series.summand(i)?;
    }
    Ok(sum)
}

/// Dispatches on the regime: finite sum at roots of unity, otherwise the series.
pub fn ym(
    p: &Param,
    spine: &ColoredSpine,
    opts: SeriesOptions,
    observer: &mut dyn FnMut(&TermRecord),
) -> Result<SeriesResult> {
    match p.regime() {
        Regime::RootOfUnity { r } => {
            let value = ym_root(p, spine)?;
            Ok(SeriesResult {
                value,
                terms_used: r as u64 - 1,
                tail_bound: 0.0,
                converged: true,
                regime: p.regime(),
                certified: true,
            })
        }
        _ => ym_closed_with(p, spine, opts, observer),
    }
}

/// `c₂(i) = i(i+2)/4`.
pub fn casimir(i: u64) -> f64 {
    let i = i as f64;
    i * (i + 2.0) / 4.0
}

/// Witten's area-damped series at `t = -1`:
/// `Σ (-1)^i (i+1) e^{-ρ c₂(i)} Π 1/θ Π Tet`.
pub fn ym_witten_with(
    spine: &ColoredSpine,
    rho: f64,
    opts: SeriesOptions,
    observer: &mut dyn FnMut(&TermRecord),
) -> Result<SeriesResult> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Domain(format!("the area ρ must be positive, got {rho}")));
    }
    let p = Param::classical(-1);
    let series = YmSeries::new(p, spine)?;
    let mut model = series.tail_model();
    model.mu = 0.0;
    let ln_c = model.ln_c;
    let g = spine.genus() as f64;
    let tail_at = |n: u64| -> f64 {
        let n1 = (n + 1) as f64;
        let damped = ln_c + (2.0 - 2.0 * g) * n1.ln() - rho * casimir(n)
            - ln_one_minus_exp(rho * (2.0 * n as f64 + 3.0) / 4.0);
        damped.min(model.ln_tail(n)).exp()
    };
    let mut sum = ScaledScalar::ZERO;
    let mut tail = f64::INFINITY;
    let mut used = 0;
    while used < opts.max_terms {
        let i = color_index(used)?;
        let damping = ScaledScalar::from_log2(-rho * casimir(used) / LN_2);
        let term = series.summand(i)? * damping;
        sum = sum + term;
        used += 1;
        tail = tail_at(used);
        observer(&TermRecord { index: used - 1, term, partial_sum: sum, tail_bound: tail });
        if opts.tol > 0.0 && tail <= opts.tol {
            break;
        }
    }
    Ok(SeriesResult {
        value: sum,
        terms_used: used,
        tail_bound: tail,
        converged: tail <= opts.tol,
        regime: p.regime(),
        certified: true,
    })
}

pub fn ym_witten(spine: &ColoredSpine, rho: f64, opts: SeriesOptions) -> Result<SeriesResult> {
    ym_witten_with(spine, rho, opts, &mut |_| {})
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HandleslideResidual {
    pub residual: ScaledScalar,
    pub bound: ScaledScalar,
    pub within_bound: bool,
    /// Rounding level of the subtraction, `RESIDUAL_FLOOR_ULPS` ulps of the
    /// larger boundary term; residuals below it are cancellation noise.
    pub rounding_floor: ScaledScalar,
}

/// Width of the cancellation band in [`HandleslideResidual::rounding_floor`].
pub const RESIDUAL_FLOOR_ULPS: f64 = 256.0;

/// Difference of the two boundary terms left after sliding the edge `edge`
/// (color `k >= 1`) over the Kirby color truncated at `n`.
///
/// Each boundary term is the local recoupling factor
/// `(-1)^n [n+1] Tet(u u v; 1 k-1 k) Tet(u v u; 1 k k-1) / (θ(u,k,u) θ(u,k-1,v))`
/// times the remaining spine product at color `u`; the residual is the term at
/// `(u, v) = (n, n+1)` minus the one at `(n+1, n)`. The bound is
/// `[n+2] C t^{n(4g-2)}` with `C = (1 + t^{4g-2})` times the spine constant.
pub fn handleslide_residual(
    p: &Param,
    spine: &ColoredSpine,
    edge: usize,
    n: Color,
) -> Result<HandleslideResidual> {
    check_genus(spine)?;
    let t = p.value().re;
    if p.regime() != Regime::GenericReal || t.abs() >= 1.0 {
        return Err(Error::Regime(format!(
            "the handle-slide estimate needs real 0 < |t| < 1, got {}",
            p.value()
        )));
    }
    let k = *spine
        .edge_colors()
        .get(edge)
        .ok_or_else(|| Error::Spine(format!("no edge {edge}")))?;
    if k == 0 {
        return Err(Error::Domain(format!("edge {edge} has color 0; slide a colored edge")));
    }
    let series = YmSeries::new(*p, spine)?;
    let rc = series.recoupler();
    let boundary = |u: Color, v: Color| -> Result<ScaledScalar> {
        let local = [(u, k, u), (u, k - 1, v), (u, 1, v), (1, k - 1, k), (u, u, k), (u, v, k - 1)];
        if local.iter().any(|&(a, b, c)| !rc.admissible(a, b, c)) {
            return Ok(ScaledScalar::ZERO);
        }
        let rest = series.term(u)?;
        if rest.is_zero() {
            return Ok(rest);
        }
        let tets = rc.tet(TetLabels::new(u, u, v, 1, k - 1, k))?
            * rc.tet(TetLabels::new(u, v, u, 1, k, k - 1))?;
        let thetas = rc.theta(u, k, u)? * rc.theta(u, k - 1, v)?;
        let sign = ScaledScalar::sign_pow(n as i64) * rc.quantum_int(n as u64 + 1);
        let local = (sign * tets)
            .try_div(&thetas)
            .map_err(|_| Error::Degenerate("vanishing theta in the handle-slide".into()))?;
        Ok(local * rest)
    };
    let (first, second) = (boundary(n, n + 1)?, boundary(n + 1, n)?);
    let residual = first - second;
    let larger = if first.cmp_abs(&second).is_ge() { first } else { second };
    let rounding_floor = larger.abs() * ScaledScalar::from_f64(RESIDUAL_FLOOR_ULPS * f64::EPSILON);
    let g = spine.genus() as i64;
    let tt = ScaledScalar::from_f64(t.abs());
    let c = (ScaledScalar::ONE + tt.powi(4 * g - 2)?) * series.spine_constant();
    let bound = rc.quantum_int(n as u64 + 2).abs() * c * tt.powi(n as i64 * (4 * g - 2))?;
    let within_bound = residual.cmp_abs(&bound) != std::cmp::Ordering::Greater;
    Ok(HandleslideResidual { residual, bound, within_bound, rounding_floor })
}

/// One evaluation in a classical-limit check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitPoint {
    pub t: Complex64,
    pub result: SeriesResult,
    pub diff: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalLimitReport {
    pub limit: SeriesResult,
    pub points: Vec<LimitPoint>,
    /// The last point is within `tol` of the limit.
    pub holds: bool,
}

/// `t_n = -1 + 0.2 · 2^{-n}` for `n = 0..=n_max`, all inside the unit disk.
pub fn approach_minus_one(n_max: u32) -> Vec<Complex64> {
    (0..=n_max).map(|n| Complex64::new(-1.0 + 0.2 * 0.5f64.powi(n as i32), 0.0)).collect()
}

/// Evaluates the series along `ts` and at the nearer of `±1` to the last
/// point. Each series is summed to `tol / 10`.
pub fn classical_limit_check(
    spine: &ColoredSpine,
    ts: &[Complex64],
    tol: f64,
) -> Result<ClassicalLimitReport> {
    let last = ts.last().ok_or_else(|| Error::Domain("empty parameter sequence".into()))?;
    let sign = if last.re < 0.0 { -1 } else { 1 };
    let opts = SeriesOptions { tol: tol / 10.0, ..SeriesOptions::default() };
    let limit = ym_closed(&Param::classical(sign), spine, opts)?;
    let mut points = Vec::with_capacity(ts.len());
    for &t in ts {
        let p = Param::new(t)?;
        let result = ym_closed(&p, spine, opts)?;
        let diff = (result.value - limit.value).to_complex().norm();
        points.push(LimitPoint { t, result, diff });
    }
    let holds = points.last().is_some_and(|pt| pt.diff < tol && pt.result.converged)
        && limit.converged;
    Ok(ClassicalLimitReport { limit, points, holds })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DivergenceReport {
    /// `(i, 1/|[i+1]|^{2g-2})` for the indices whose term magnitude lies in `(1/2, 2)`.
    pub hits: Vec<(u64, f64)>,
    pub scanned: u64,
}

/// Scans `i = 0..=n` on the unit circle away from roots of unity, listing
/// the indices whose series term has magnitude between `1/2` and `2`.
pub fn divergence_probe(p: &Param, genus: u32, n: u64) -> Result<DivergenceReport> {
    if p.regime() != Regime::Unimodular || is_root_of_unity(p.value(), PROBE_ROOT_ORDER) {
        return Err(Error::Regime(format!(
            "the probe needs |t| = 1 away from roots of unity, got {} ({})",
            p.value(),
            p.regime()
        )));
    }
    if genus < 2 {
        return Err(Error::Genus(genus, "the probe needs genus >= 2".into()));
    }
    let power = 2 * genus as i64 - 2;
    let mut hits = Vec::new();
    for i in 0..=n {
        let q = p.quantum_int(i + 1).to_complex().norm();
        let mag = q.powi(power as i32).recip();
        if mag > 0.5 && mag < 2.0 {
            hits.push((i, mag));
        }
    }
    Ok(DivergenceReport { hits, scanned: n + 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn zero_spine(g: u32) -> ColoredSpine {
        ColoredSpine::canonical(g).unwrap()
    }

    fn opts(tol: f64) -> SeriesOptions {
        SeriesOptions { tol, ..SeriesOptions::default() }
    }

    #[test]
    fn zero_spine_terms() {
        for p in [Param::real(0.5).unwrap(), Param::classical(-1), Param::real(-1.3).unwrap()] {
            for g in [2, 3] {
                let s = YmSeries::new(p, &zero_spine(g)).unwrap();
                assert_eq!(s.summand(0).unwrap(), ScaledScalar::ONE);
                assert!(s.spine_constant().rel_diff(&ScaledScalar::ONE) < 1e-15);
                for i in 0..40 {
                    let q = p.quantum_int(i as u64 + 1);
                    let expect = q.powi(2 - 2 * g as i64).unwrap();
                    assert!(s.summand(i).unwrap().rel_diff(&expect) < 1e-12, "i={i}");
                }
            }
        }
    }

    #[test]
    fn colored_term_matches_direct_product() {
        let p = Param::real(0.5).unwrap();
        let spine = zero_spine(2).with_uniform_color(2).unwrap();
        let rc = Recoupler::new(p);
        let i = 2;
        let th = rc.theta(i, i, 2).unwrap();
        let tet = rc.tet(TetLabels::new(i, i, i, 2, 2, 2)).unwrap();
        let mut direct = ScaledScalar::ONE;
        for _ in 0..9 {
            direct = direct.try_div(&th).unwrap();
        }
        for _ in 0..6 {
            direct = direct * tet;
        }
        assert!(ym_term(&p, &spine, i).unwrap().rel_diff(&direct) < 1e-13);
        assert!(ym_term(&p, &spine, 0).unwrap().is_zero());
    }

    #[test]
    fn zeta_values_at_minus_one() {
        let r = ym_closed(&Param::classical(-1), &zero_spine(3), opts(1e-10)).unwrap();
        assert!(r.converged && r.certified);
        assert!((r.value.to_f64() - PI.powi(4) / 90.0).abs() < 1e-9);
        let r = ym_closed(&Param::classical(-1), &zero_spine(2), opts(1e-4)).unwrap();
        assert!(r.converged);
        assert!((10_000..=10_001).contains(&r.terms_used));
        assert!((r.value.to_f64() - PI * PI / 6.0).abs() < 1e-4);
    }

    #[test]
    fn generic_series() {
        let p = Param::real(0.5).unwrap();
        let mut rows = Vec::new();
        let r = ym_closed_with(&p, &zero_spine(2), opts(1e-12), &mut |row| rows.push(*row))
            .unwrap();
        assert!(r.converged && r.tail_bound <= 1e-12);
        assert_eq!(rows.len() as u64, r.terms_used);
        assert_eq!(rows[0].term, ScaledScalar::ONE);
        assert!((rows[1].term.to_f64() - 1.0 / (4.25f64 * 4.25)).abs() < 1e-15);
        let partial: f64 = (1..=r.terms_used).map(|n| p.quantum_int(n).to_f64().powi(-2)).sum();
        assert!((r.value.to_f64() - partial).abs() < 1e-15);
        let full: f64 = (1..=60).map(|n| p.quantum_int(n).to_f64().powi(-2)).sum();
        assert!((r.value.to_f64() - full).abs() <= r.tail_bound + 1e-15);
    }

    #[test]
    fn tail_bound_is_sound() {
        for t in [0.5, 0.7, -0.9, 1.4] {
            for g in [2, 3] {
                let p = Param::real(t).unwrap();
                for spine in [zero_spine(g), zero_spine(g).with_uniform_color(2).unwrap()] {
                    let r = ym_closed(&p, &spine, opts(1e-9)).unwrap();
                    assert!(r.converged);
                    let long = SeriesOptions { tol: 0.0, max_terms: 10 * r.terms_used };
                    let ext = ym_closed(&p, &spine, long).unwrap();
                    let change = (ext.value - r.value).to_complex().norm();
                    // the bound is nearly tight at real t, so allow for the rounding of the extra additions
                    let rounding = ext.terms_used as f64 * f64::EPSILON * ext.value.to_complex().norm();
                    assert!(
                        change <= r.tail_bound + rounding,
                        "t={t} g={g} {change} > {}",
                        r.tail_bound
                    );
                }
            }
        }
    }

    #[test]
    fn summand_bound_holds_at_real_t() {
        for t in [0.3, 0.5, 0.8, -0.6, 1.5] {
            let p = Param::real(t).unwrap();
            for colors in [0, 2, 4] {
                for g in [2, 3] {
                    let spine = zero_spine(g).with_uniform_color(colors).unwrap();
                    let s = YmSeries::new(p, &spine).unwrap();
                    for i in 0..30 {
                        let lhs = s.summand(i).unwrap();
                        let rhs = s.summand_bound(i).unwrap();
                        let slack = rhs * ScaledScalar::from_f64(1.0 + 1e-9);
                        assert!(lhs.cmp_abs(&slack).is_le(), "t={t} k={colors} g={g} i={i}");
                        if t.abs() < 1.0 {
                            let tt = ScaledScalar::from_f64(t.abs());
                            let coarse = s.spine_constant()
                                * ScaledScalar::from_f64(i as f64 + 1.0)
                                * tt.powi(i as i64 * (4 * g as i64 - 4)).unwrap();
                            assert!(lhs.cmp_abs(&(coarse * ScaledScalar::from_f64(1.0 + 1e-9))).is_le());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn spine_independence_for_zero_colors() {
        let p = Param::real(0.6).unwrap();
        let a = ym_closed(&p, &ColoredSpine::canonical(2).unwrap(), opts(1e-13)).unwrap();
        let b = ym_closed(&p, &ColoredSpine::ring(2).unwrap(), opts(1e-13)).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn roots_of_unity() {
        let spine = zero_spine(2);
        let v3 = ym_root(&Param::root_of_unity(3).unwrap(), &spine).unwrap();
        assert!((v3.to_f64() - 2.0).abs() < 1e-14);
        let v4 = ym_root(&Param::root_of_unity(4).unwrap(), &spine).unwrap();
        assert!((v4.to_f64() - 2.5).abs() < 1e-14);
        for r in 3..=12u32 {
            let oracle: f64 = (1..r)
                .map(|n| {
                    let q = (n as f64 * PI / r as f64).sin() / (PI / r as f64).sin();
                    q.powi(-2)
                })
                .sum();
            let v = ym_root(&Param::root_of_unity(r).unwrap(), &spine).unwrap();
            assert!((v.to_f64() - oracle).abs() < 1e-12, "r={r}");
        }
        let colored = spine.with_uniform_color(4).unwrap();
        assert_eq!(
            ym_root(&Param::root_of_unity(5).unwrap(), &colored),
            Err(Error::Admissibility(4, 4, 4))
        );
    }

    #[test]
    fn regime_errors() {
        let spine = zero_spine(2);
        let unimodular = Param::new(Complex64::from_polar(1.0, 1.0)).unwrap();
        assert!(matches!(ym_closed(&unimodular, &spine, opts(1e-6)), Err(Error::Divergence(_))));
        let torus = zero_spine(1);
        assert!(matches!(
            ym_closed(&Param::real(0.5).unwrap(), &torus, opts(1e-6)),
            Err(Error::Genus(1, _))
        ));
        assert!(matches!(
            ym_closed(&Param::root_of_unity(5).unwrap(), &spine, opts(1e-6)),
            Err(Error::Regime(_))
        ));
        assert!(matches!(ym_witten(&spine, 0.0, opts(1e-6)), Err(Error::Domain(_))));
    }

    #[test]
    fn complex_series_is_uncertified() {
        let p = Param::new(Complex64::from_polar(0.6, 0.4)).unwrap();
        let r = ym_closed(&p, &zero_spine(2), opts(1e-12)).unwrap();
        assert!(r.converged && !r.certified);
        let partial: Complex64 =
            (1..=r.terms_used).map(|n| p.quantum_int(n).to_complex().powi(-2)).sum();
        assert!((r.value.to_complex() - partial).norm() < 1e-15);
        let full: Complex64 = (1..=200).map(|n| p.quantum_int(n).to_complex().powi(-2)).sum();
        assert!((r.value.to_complex() - full).norm() <= r.tail_bound + 1e-15);
    }

    #[test]
    fn witten_series() {
        let spine = zero_spine(2);
        let big = ym_witten(&spine, 200.0, opts(1e-14)).unwrap();
        assert!((big.value.to_f64() - 1.0).abs() < 1e-14);
        let mut prev = 0.0;
        for rho in [1.0, 0.1, 0.01] {
            let r = ym_witten(&spine, rho, opts(1e-12)).unwrap();
            assert!(r.converged);
            let oracle: f64 =
                (0..20_000u64).map(|i| (-rho * casimir(i)).exp() / ((i + 1) * (i + 1)) as f64).sum();
            assert!((r.value.to_f64() - oracle).abs() < 1e-11, "rho={rho}");
            assert!(r.value.to_f64() > prev);
            prev = r.value.to_f64();
        }
        // undamped terms agree with the t = -1 series
        let s = YmSeries::new(Param::classical(-1), &spine).unwrap();
        let mut rows = Vec::new();
        ym_witten_with(&spine, 1e-300, SeriesOptions { tol: 0.0, max_terms: 30 }, &mut |r| {
            rows.push(*r)
        })
        .unwrap();
        for row in rows {
            assert!(row.term.rel_diff(&s.summand(row.index as u32).unwrap()) < 1e-15);
        }
    }

    #[test]
    fn handleslide_residuals() {
        let p = Param::real(0.5).unwrap();
        // a k = 1 edge gives inadmissible local labels throughout
        let odd = zero_spine(2).with_colors(vec![1, 1, 0, 0, 0, 0, 0, 0, 0]).unwrap();
        for n in 1..20 {
            let h = handleslide_residual(&p, &odd, 0, n).unwrap();
            assert!(h.residual.is_zero() && h.within_bound);
        }
        let spine = zero_spine(2).with_uniform_color(2).unwrap();
        let rows: Vec<_> = (1..=60).map(|n| handleslide_residual(&p, &spine, 0, n).unwrap()).collect();
        assert!(rows.iter().all(|h| h.within_bound));
        assert!(rows.last().unwrap().residual.to_complex().norm() < 1e-12);
        let resolved: Vec<_> =
            rows.iter().take_while(|h| h.residual.cmp_abs(&h.rounding_floor).is_gt()).collect();
        assert!(resolved.len() >= 8);
        assert!(resolved.windows(2).all(|w| w[1].residual.cmp_abs(&w[0].residual).is_lt()));
    }

    #[test]
    fn classical_limit_on_short_sequence() {
        let spine = zero_spine(2).with_uniform_color(2).unwrap();
        let report = classical_limit_check(&spine, &approach_minus_one(6), 1e-3).unwrap();
        assert!(report.holds);
        let diffs: Vec<f64> = report.points.iter().map(|p| p.diff).collect();
        assert!(diffs.windows(2).all(|w| w[1] < w[0]), "{diffs:?}");
    }

    #[test]
    fn divergence_probe_on_the_circle() {
        let p = Param::new(Complex64::from_polar(1.0, 1.0)).unwrap();
        let rep = divergence_probe(&p, 2, 10_000).unwrap();
        assert!(rep.hits.len() >= 10);
        assert!(rep.hits.iter().all(|&(_, m)| m > 0.5 && m < 2.0));
        let root = Param::root_of_unity(7).unwrap();
        assert!(matches!(divergence_probe(&root, 2, 100), Err(Error::Regime(_))));
        let e3 = Param::new(Complex64::from_polar(1.0, PI / 3.0)).unwrap();
        assert!(matches!(divergence_probe(&e3, 2, 100), Err(Error::Regime(_))));
    }
}
