//! Covariant jets, connection Wronskians and the auxiliary function ξ.
//!
//! All jets are computed on truncated Taylor series in `z`. Christoffel
//! symbols of the Kähler targets depend on `w̄`, which is antiholomorphic
//! along the curve; its `∂_z`-derivative vanishes, so it enters the series
//! as the constant `conj(w(z₀))` and the expansion carries exact Wirtinger
//! derivatives.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::exprlang::{probe_points, ExprAst, ExprError, MeromorphicFn};
use crate::geometry::{metric_at, Boundary, DivisorComponent, DivisorSpec, GeometryError, TargetSpace};
use crate::numeric::linalg::CMatrix;
use crate::numeric::series::Series;

/// Series length for jets: order ≤ 3 needs three derivatives.
const JET_TERMS: usize = 4;
type Jet = Series<JET_TERMS>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("jet order {order} exceeds the target dimension {dim}")]
    Order { order: usize, dim: usize },
    #[error("no chart contains f({z}): curve point is at every chart boundary")]
    ChartSelection { z: Complex64 },
    #[error("f({z}) lies outside chart {chart}")]
    OutsideChart { z: Complex64, chart: usize },
    #[error("finite-difference stencil around {z} leaves chart {chart}")]
    Stencil { z: Complex64, chart: usize },
    #[error("evaluation at {z} hits a zero or pole of a component")]
    Singular { z: Complex64 },
    #[error("invalid curve: {0}")]
    Invalid(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// A holomorphic curve `C → M`.
///
/// * `ProjectiveFS(n)`: homogeneous entire components `g_0, …, g_n`.
/// * `P1xP1Flat`: the pair `(F, G)` of meromorphic functions.
/// * `BallBergman(n)`: affine components `f_1, …, f_n` with values in the ball.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveMap {
    target: TargetSpace,
    comps: Vec<MeromorphicFn>,
}

impl CurveMap {
    pub fn projective(comps: Vec<ExprAst>) -> Result<Self, JetError> {
        if comps.len() < 2 {
            return Err(JetError::Invalid(String::from("a curve in P^n needs at least two homogeneous components")));
        }
        let mut out = Vec::with_capacity(comps.len());
        for c in &comps {
            if !c.is_entire() {
                return Err(JetError::Invalid(format!("homogeneous component {c} is not entire")));
            }
            out.push(c.to_meromorphic()?);
        }
        let curve = CurveMap { target: TargetSpace::ProjectiveFS(comps.len() - 1), comps: out };
        for p in probe_points() {
            if curve.homogeneous(p).iter().all(|v| v.norm() == 0.0) {
                return Err(JetError::Invalid(format!("components have a common zero at probe point {p}")));
            }
        }
        Ok(curve)
    }

    pub fn flat(f: MeromorphicFn, g: MeromorphicFn) -> Result<Self, JetError> {
        if f.is_constant() && g.is_constant() {
            return Err(JetError::Invalid(String::from("both components are constant")));
        }
        Ok(CurveMap { target: TargetSpace::P1xP1Flat, comps: vec![f, g] })
    }

    pub fn ball(comps: Vec<MeromorphicFn>) -> Result<Self, JetError> {
        if comps.is_empty() {
            return Err(JetError::Invalid(String::from("a curve in the ball needs at least one component")));
        }
        let curve = CurveMap { target: TargetSpace::BallBergman(comps.len()), comps };
        for p in probe_points() {
            let s: f64 = curve.comps.iter().map(|c| c.eval(p).norm_sqr()).sum();
            if !(s < 1.0) {
                return Err(JetError::Invalid(format!("curve leaves the unit ball at probe point {p}")));
            }
        }
        Ok(curve)
    }

    pub fn target(&self) -> TargetSpace {
        self.target
    }

    pub fn components(&self) -> &[MeromorphicFn] {
        &self.comps
    }

    /// Homogeneous coordinates of `f(z)`: `[g_0, …, g_n]` for `P^n`,
    /// `[denF, numF, denG, numG]` for `(P^1)^2`, `[1, f_1, …, f_n]` for the ball.
    pub fn homogeneous(&self, z: Complex64) -> Vec<Complex64> {
        match self.target {
            TargetSpace::ProjectiveFS(_) => self.comps.iter().map(|c| c.eval(z)).collect(),
            TargetSpace::P1xP1Flat => {
                let (xn, xd) = self.comps[0].eval_parts(z);
                let (yn, yd) = self.comps[1].eval_parts(z);
                vec![xd, xn, yd, yn]
            }
            TargetSpace::BallBergman(_) => {
                let mut v = vec![ONE];
                v.extend(self.comps.iter().map(|c| c.eval(z)));
                v
            }
        }
    }

    /// Taylor jets of the homogeneous coordinates (see [`Self::homogeneous`]).
    pub fn homogeneous_series<const N: usize>(&self, z: Complex64) -> Vec<Series<N>> {
        match self.target {
            TargetSpace::ProjectiveFS(_) => self.comps.iter().map(|c| c.series::<N>(z)).collect(),
            TargetSpace::P1xP1Flat => {
                let part = |c: &MeromorphicFn| {
                    (c.numerator_program().series::<N>(z), c.denominator_program().series::<N>(z))
                };
                let (xn, xd) = part(&self.comps[0]);
                let (yn, yd) = part(&self.comps[1]);
                vec![xd, xn, yd, yn]
            }
            TargetSpace::BallBergman(_) => {
                let mut v = vec![Series::constant(ONE)];
                v.extend(self.comps.iter().map(|c| c.series::<N>(z)));
                v
            }
        }
    }

    /// Number of charts in the atlas used for this target.
    pub fn chart_count(&self) -> usize {
        match self.target {
            TargetSpace::ProjectiveFS(n) => n + 1,
            TargetSpace::P1xP1Flat => 4,
            TargetSpace::BallBergman(_) => 1,
        }
    }

    /// Chart whose coordinates at `f(z)` have the smallest maximal
    /// modulus; ties go to the lowest index.
    ///
    /// `P^n`: chart `i` divides by `g_i`, so the rule picks the largest
    /// `|g_i|`. `(P^1)^2`: chart bit 0 inverts `x`, bit 1 inverts `y`.
    pub fn choose_chart(&self, z: Complex64) -> Result<usize, JetError> {
        match self.target {
            TargetSpace::ProjectiveFS(_) => {
                let h = self.homogeneous(z);
                let scale = h.iter().fold(0.0f64, |m, v| m.max(v.norm()));
                if !(scale > 0.0) || !scale.is_finite() {
                    return Err(JetError::ChartSelection { z });
                }
                let mut best = 0;
                for (i, v) in h.iter().enumerate() {
                    if v.norm() > h[best].norm() {
                        best = i;
                    }
                }
                Ok(best)
            }
            TargetSpace::P1xP1Flat => {
                let h = self.homogeneous(z);
                if h[0..2].iter().all(|v| v.norm() == 0.0) || h[2..4].iter().all(|v| v.norm() == 0.0) {
                    return Err(JetError::ChartSelection { z });
                }
                let bx = (h[1].norm() > h[0].norm()) as usize;
                let by = (h[3].norm() > h[2].norm()) as usize;
                Ok(bx | (by << 1))
            }
            TargetSpace::BallBergman(_) => Ok(0),
        }
    }

    /// Affine chart coordinates of `f` near `z` as Taylor jets.
    pub fn chart_series<const N: usize>(&self, z: Complex64, chart: usize) -> Result<Vec<Series<N>>, JetError> {
        if chart >= self.chart_count() {
            return Err(JetError::OutsideChart { z, chart });
        }
        let h = self.homogeneous_series::<N>(z);
        let coords: Vec<Series<N>> = match self.target {
            TargetSpace::ProjectiveFS(_) => {
                let d = h[chart];
                if d.value().norm() == 0.0 {
                    return Err(JetError::OutsideChart { z, chart });
                }
                h.iter().enumerate().filter(|(k, _)| *k != chart).map(|(_, s)| *s / d).collect()
            }
            TargetSpace::P1xP1Flat => {
                let pick = |lo: Series<N>, hi: Series<N>, inv: bool| if inv { lo / hi } else { hi / lo };
                let (cx, cy) = (chart & 1 == 1, chart & 2 == 2);
                let lo = |s: &Series<N>| s.value().norm() == 0.0;
                if lo(if cx { &h[1] } else { &h[0] }) || lo(if cy { &h[3] } else { &h[2] }) {
                    return Err(JetError::OutsideChart { z, chart });
                }
                vec![pick(h[0], h[1], cx), pick(h[2], h[3], cy)]
            }
            TargetSpace::BallBergman(_) => h[1..].to_vec(),
        };
        if coords.iter().any(|s| s.coeffs.iter().any(|c| !c.is_finite())) {
            return Err(JetError::OutsideChart { z, chart });
        }
        Ok(coords)
    }

    pub fn chart_point(&self, z: Complex64, chart: usize) -> Result<Vec<Complex64>, JetError> {
        Ok(self.chart_series::<1>(z, chart)?.iter().map(|s| s.value()).collect())
    }

    /// Entire function whose zeros are the preimages of a divisor component.
    pub fn pullback(&self, comp: &DivisorComponent) -> Result<ExprAst, JetError> {
        match (self.target, comp) {
            (TargetSpace::ProjectiveFS(n), DivisorComponent::Hyperplane(a)) if a.len() == n + 1 => {
                let mut acc = ExprAst::constant(0.0);
                for (ai, gi) in a.iter().zip(&self.comps) {
                    acc = ExprAst::add(acc, ExprAst::mul(ExprAst::Const(*ai), gi.numerator().clone()));
                }
                Ok(acc)
            }
            (TargetSpace::P1xP1Flat, DivisorComponent::TorusCurve { m, n, c }) => {
                let x1 = self.comps[0].numerator().clone();
                let x0 = self.comps[0].denominator().clone();
                let y1 = self.comps[1].numerator().clone();
                let y0 = self.comps[1].denominator().clone();
                let pw = |b: &ExprAst, e: i32| if e == 0 { ExprAst::constant(1.0) } else { ExprAst::pow(b.clone(), e) };
                let (mp, mm) = ((*m).max(0), (-*m).max(0));
                let (np, nm) = ((*n).max(0), (-*n).max(0));
                let lhs = ExprAst::mul(ExprAst::mul(pw(&x1, mp), pw(&x0, mm)), ExprAst::mul(pw(&y1, np), pw(&y0, nm)));
                let rhs = ExprAst::mul(ExprAst::mul(pw(&x0, mp), pw(&x1, mm)), ExprAst::mul(pw(&y0, np), pw(&y1, nm)));
                Ok(ExprAst::sub(lhs, ExprAst::mul(ExprAst::Const(*c), rhs)))
            }
            (TargetSpace::P1xP1Flat, DivisorComponent::Boundary(b)) => Ok(match b {
                Boundary::XZero => self.comps[0].numerator().clone(),
                Boundary::XInfinity => self.comps[0].denominator().clone(),
                Boundary::YZero => self.comps[1].numerator().clone(),
                Boundary::YInfinity => self.comps[1].denominator().clone(),
            }),
            (t, c) => Err(GeometryError::Mismatch(format!("{} on {:?}", c.label(), t)).into()),
        }
    }

    /// Normalized section norm `‖σ(f(z))‖`.
    pub fn section_norm(&self, comp: &DivisorComponent, z: Complex64) -> f64 {
        comp.section_norm(&self.homogeneous(z))
    }
}

/// Jets `f^{(1)}, …, f^{(order)}` at `z` in one chart.
#[derive(Debug, Clone, PartialEq)]
pub struct JetFrame {
    pub z: Complex64,
    pub chart: usize,
    pub target: TargetSpace,
    /// Chart coordinates of `f(z)`.
    pub point: Vec<Complex64>,
    /// `rows[j-1][k]` is the coefficient of `f^{(j)}` on `∂/∂x^k`.
    pub rows: Vec<Vec<Complex64>>,
}

impl JetFrame {
    /// For the flat target: rows expressed in the invariant frame
    /// `x ∂/∂x, y ∂/∂y`, i.e. derivatives of `(log x, log y)`.
    pub fn flat_invariant_rows(&self) -> Option<Vec<Vec<Complex64>>> {
        if self.target != TargetSpace::P1xP1Flat {
            return None;
        }
        let sign = |bit: usize| if self.chart & bit != 0 { -1.0 } else { 1.0 };
        Some(
            self.rows
                .iter()
                .map(|r| vec![r[0] / self.point[0] * sign(1), r[1] / self.point[1] * sign(2)])
                .collect(),
        )
    }

    pub fn determinant(&self) -> Complex64 {
        CMatrix::from_rows(&self.rows).determinant()
    }
}

/// `Γ^k_{ij}` along the curve as jets, indexed `(k·n + i)·n + j`.
fn gamma_series(target: TargetSpace, w: &[Jet]) -> Vec<Jet> {
    let n = w.len();
    let zero = Jet::constant(ZERO);
    let mut out = vec![zero; n * n * n];
    match target {
        TargetSpace::P1xP1Flat => {
            out[0] = -w[0].recip();
            out[(n + 1) * n + 1] = -w[1].recip();
        }
        _ => {
            let eps = if matches!(target, TargetSpace::BallBergman(_)) { -1.0 } else { 1.0 };
            let wbar: Vec<Complex64> = w.iter().map(|s| s.value().conj()).collect();
            let mut s = Jet::constant(ONE);
            for (wi, bi) in w.iter().zip(&wbar) {
                s = s + wi.scale(*bi * eps);
            }
            let factor = s.recip().scale(Complex64::new(-eps, 0.0));
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut c = ZERO;
                        if i == k {
                            c += wbar[j];
                        }
                        if j == k {
                            c += wbar[i];
                        }
                        if c != ZERO {
                            out[(k * n + i) * n + j] = factor.scale(c);
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn covariant_jets(curve: &CurveMap, z: Complex64, order: usize) -> Result<JetFrame, JetError> {
    let chart = curve.choose_chart(z)?;
    covariant_jets_in_chart(curve, z, order, chart)
}

/// `f^{(j)k} = ∂_z f^{(j-1)k} + Σ ∂_z f^{i₁} f^{(j-1)i₂} Γ^k_{i₁i₂}∘f`.
pub fn covariant_jets_in_chart(curve: &CurveMap, z: Complex64, order: usize, chart: usize) -> Result<JetFrame, JetError> {
    let n = curve.target.dim();
    if order > n || order >= JET_TERMS || order == 0 {
        return Err(JetError::Order { order, dim: n });
    }
    let w = curve.chart_series::<JET_TERMS>(z, chart)?;
    if curve.target == TargetSpace::P1xP1Flat && w.iter().any(|s| s.value().norm() == 0.0) {
        return Err(JetError::Singular { z });
    }
    let gamma = gamma_series(curve.target, &w);
    let dw: Vec<Jet> = w.iter().map(|s| s.differentiate()).collect();
    let mut cur = dw.clone();
    let mut rows = vec![cur.iter().map(|s| s.value()).collect::<Vec<_>>()];
    for _ in 1..order {
        let mut next = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = cur[k].differentiate();
            for i1 in 0..n {
                for i2 in 0..n {
                    let g = &gamma[(k * n + i1) * n + i2];
                    if g.coeffs.iter().any(|c| *c != ZERO) {
                        acc = acc + dw[i1] * cur[i2] * *g;
                    }
                }
            }
            next.push(acc);
        }
        cur = next;
        rows.push(cur.iter().map(|s| s.value()).collect());
    }
    if rows.iter().flatten().any(|c| !c.is_finite()) {
        return Err(JetError::Singular { z });
    }
    let point = w.iter().map(|s| s.value()).collect();
    Ok(JetFrame { z, chart, target: curve.target, point, rows })
}

/// `W(∇, f)(z)` with the chart it was computed in.
pub fn wronskian(curve: &CurveMap, z: Complex64) -> Result<(Complex64, usize), JetError> {
    let chart = curve.choose_chart(z)?;
    Ok((wronskian_in_chart(curve, z, chart)?, chart))
}

pub fn wronskian_in_chart(curve: &CurveMap, z: Complex64, chart: usize) -> Result<Complex64, JetError> {
    let n = curve.target.dim();
    Ok(covariant_jets_in_chart(curve, z, n, chart)?.determinant())
}

/// `det[[F'/F, G'/G], [(F'/F)', (G'/G)']]·F·G`, the flat Wronskian in the
/// `(x, y)` chart.
pub fn flat_wronskian_closed_form(f: &MeromorphicFn, g: &MeromorphicFn, z: Complex64) -> Result<Complex64, JetError> {
    let fs = f.series::<3>(z);
    let gs = g.series::<3>(z);
    let (fv, gv) = (fs.value(), gs.value());
    if !(fv.norm() > 0.0 && gv.norm() > 0.0) || !fv.is_finite() || !gv.is_finite() {
        return Err(JetError::Singular { z });
    }
    let lf = fs.differentiate() / fs;
    let lg = gs.differentiate() / gs;
    let det = lf.value() * lg.derivative_at(1) - lg.value() * lf.derivative_at(1);
    let w = det * fv * gv;
    if !w.is_finite() {
        return Err(JetError::Singular { z });
    }
    Ok(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XiStatus {
    Finite,
    Overflow,
    AtDivisorSingularity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiValue {
    pub value: f64,
    pub status: XiStatus,
}

impl XiValue {
    fn singular() -> Self {
        XiValue { value: f64::INFINITY, status: XiStatus::AtDivisorSingularity }
    }
}

const XI_OVERFLOW: f64 = 1e300;

/// Chart-invariant volume factor `Ω` at a chart point.
fn omega(curve: &CurveMap, point: &[Complex64]) -> Result<f64, JetError> {
    Ok(match curve.target {
        TargetSpace::P1xP1Flat => {
            (1.0 + point[0].norm_sqr()).powi(-2) * (1.0 + point[1].norm_sqr()).powi(-2)
        }
        t => metric_at(t, point)?.volume(),
    })
}

/// `‖τ‖` for `E = {xy = 0} ∪ {x, y = ∞}` on `(P^1)^2`, 1 elsewhere.
fn tau_norm(curve: &CurveMap, h: &[Complex64]) -> f64 {
    if curve.target != TargetSpace::P1xP1Flat {
        return 1.0;
    }
    let nx = h[0].norm_sqr() + h[1].norm_sqr();
    let ny = h[2].norm_sqr() + h[3].norm_sqr();
    (h[0].norm() * h[1].norm() / nx) * (h[2].norm() * h[3].norm() / ny)
}

/// `ξ = |W|²·Ω / (Π‖σ_i‖² · ‖τ‖²)`; `τ` only on `(P^1)^2`. Boundary
/// components listed in the divisor are already part of `τ`.
pub fn xi_at(curve: &CurveMap, divisors: &DivisorSpec, z: Complex64) -> Result<XiValue, JetError> {
    if matches!(curve.target, TargetSpace::BallBergman(_)) {
        return Err(JetError::Invalid(String::from("ξ is defined for P^n and (P^1)^2 targets only")));
    }
    if divisors.target != curve.target {
        return Err(GeometryError::Mismatch(String::from("divisor and curve have different targets")).into());
    }
    let h = curve.homogeneous(z);
    let mut denom = tau_norm(curve, &h).powi(2);
    for comp in &divisors.components {
        if !matches!(comp, DivisorComponent::Boundary(_)) {
            denom *= comp.section_norm(&h).powi(2);
        }
    }
    if !(denom > 0.0) {
        return Ok(XiValue::singular());
    }
    let (w, chart) = match wronskian(curve, z) {
        Ok(v) => v,
        Err(JetError::Singular { .. } | JetError::OutsideChart { .. }) => return Ok(XiValue::singular()),
        Err(e) => return Err(e),
    };
    let point = curve.chart_point(z, chart)?;
    let num = w.norm_sqr() * omega(curve, &point)?;
    let value = num / denom;
    if !value.is_finite() || value > XI_OVERFLOW || w.norm_sqr() > XI_OVERFLOW {
        return Ok(XiValue { value, status: XiStatus::Overflow });
    }
    Ok(XiValue { value, status: XiStatus::Finite })
}

/// `|∂̄W|/(1 + |W|)` from an eight-point Cauchy–Riemann stencil with the
/// chart held fixed at the one chosen for `z`.
pub fn cr_residual(curve: &CurveMap, z: Complex64, h: f64) -> Result<f64, JetError> {
    let chart = curve.choose_chart(z)?;
    let at = |p: Complex64| -> Result<Complex64, JetError> {
        if curve.target != TargetSpace::BallBergman(curve.target.dim()) {
            // The chart must stay usable on the disc of radius 2h.
            let here = curve.homogeneous(p);
            let ok = match curve.target {
                TargetSpace::ProjectiveFS(_) => {
                    let big = here.iter().fold(0.0f64, |m, v| m.max(v.norm()));
                    here[chart].norm() > 1e-8 * big
                }
                _ => true,
            };
            if !ok {
                return Err(JetError::Stencil { z, chart });
            }
        }
        wronskian_in_chart(curve, p, chart).map_err(|e| match e {
            JetError::OutsideChart { .. } | JetError::Singular { .. } => JetError::Stencil { z, chart },
            other => other,
        })
    };
    let w0 = at(z)?;
    // Fourth-order central differences: the second-order stencil leaves an
    // O(h²) truncation residual that swamps the check on fast curves.
    let d = |step: Complex64| -> Result<Complex64, JetError> {
        let near = at(z + step)? - at(z - step)?;
        let far = at(z + 2.0 * step)? - at(z - 2.0 * step)?;
        Ok((8.0 * near - far) / (12.0 * h))
    };
    let dx = d(Complex64::new(h, 0.0))?;
    let dy = d(Complex64::new(0.0, h))?;
    let dbar = (dx + Complex64::new(0.0, 1.0) * dy) * 0.5;
    Ok(dbar.norm() / (1.0 + w0.norm()))
}

/// Ordinary Wronskian `det(w', w'', …)` of affine chart coordinates; on
/// `P^n` it coincides with the connection Wronskian.
pub fn affine_wronskian(curve: &CurveMap, z: Complex64, chart: usize) -> Result<Complex64, JetError> {
    let n = curve.target.dim();
    let w = curve.chart_series::<JET_TERMS>(z, chart)?;
    let rows: Vec<Vec<Complex64>> = (1..=n).map(|j| w.iter().map(|s| s.derivative_at(j)).collect()).collect();
    Ok(CMatrix::from_rows(&rows).determinant())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::parse;
    use crate::geometry::christoffel_at;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mf(s: &str) -> MeromorphicFn {
        parse(s).unwrap().to_meromorphic().unwrap()
    }

    fn proj(srcs: &[&str]) -> CurveMap {
        CurveMap::projective(srcs.iter().map(|s| parse(s).unwrap()).collect()).unwrap()
    }

    fn example1() -> CurveMap {
        CurveMap::flat(mf("exp(z)"), mf("(exp(z)+1)/(exp(z)-1)")).unwrap()
    }

    #[test]
    fn first_jet_of_exp_in_p1() {
        let f = proj(&["1", "exp(z)"]);
        let j = covariant_jets_in_chart(&f, c(0.0, 0.0), 1, 0).unwrap();
        assert!((j.rows[0][0] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn p1_wronskian_is_derivative() {
        let f = proj(&["1", "exp(z)"]);
        for z in [c(-0.3, 0.2), c(-1.0, 2.0)] {
            let w = wronskian_in_chart(&f, z, 0).unwrap();
            assert!((w - z.exp()).norm() < 1e-14);
        }
    }

    #[test]
    fn jets_at_chart_origin_are_plain_derivatives() {
        // f(0) = [1 : 0 : 0].
        let f = proj(&["1", "z + z^2", "exp(z) - 1"]);
        let j = covariant_jets_in_chart(&f, c(0.0, 0.0), 2, 0).unwrap();
        assert!((j.rows[0][0] - 1.0).norm() < 1e-15 && (j.rows[0][1] - 1.0).norm() < 1e-15);
        assert!((j.rows[1][0] - 2.0).norm() < 1e-15 && (j.rows[1][1] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn flat_second_jet_vanishes_in_invariant_frame() {
        let f = CurveMap::flat(mf("exp(z)"), mf("exp(2*z)")).unwrap();
        for z in [c(0.1, 0.2), c(2.0, -1.0), c(-3.0, 0.5)] {
            let j = covariant_jets(&f, z, 2).unwrap();
            let inv = j.flat_invariant_rows().unwrap();
            assert!((inv[0][0] - 1.0).norm() < 1e-12 && (inv[0][1] - 2.0).norm() < 1e-12);
            assert!(inv[1][0].norm() < 1e-12 && inv[1][1].norm() < 1e-12);
            assert!(wronskian(&f, z).unwrap().0.norm() < 1e-12);
        }
    }

    #[test]
    fn example1_wronskian_at_one() {
        let f = example1();
        let e = 1.0f64.exp();
        let inv = 2.0 * e * (e * e + 1.0) / (e * e - 1.0).powi(2);
        let g1 = (e + 1.0) / (e - 1.0);
        let want = inv * e * g1;
        let w = wronskian_in_chart(&f, c(1.0, 0.0), 0).unwrap();
        assert!((w - want).norm() < 1e-12 * want.abs(), "{w} vs {want}");
        assert!((want - 6.572_136_305).abs() < 1e-8);
        let cf = flat_wronskian_closed_form(&f.components()[0], &f.components()[1], c(1.0, 0.0)).unwrap();
        assert!((cf - want).norm() < 1e-12 * want.abs());
    }

    #[test]
    fn closed_form_examples() {
        let z = c(0.4, -0.7);
        let w = flat_wronskian_closed_form(&mf("exp(z)"), &mf("exp(z)"), z).unwrap();
        assert!(w.norm() < 1e-13);
        let w = flat_wronskian_closed_form(&mf("exp(z)"), &mf("exp(z^2)"), z).unwrap();
        let want = (z + z * z).exp() * 2.0;
        assert!((w - want).norm() < 1e-13 * want.norm());
    }

    #[test]
    fn fs_connection_wronskian_is_affine_wronskian() {
        let f = proj(&["1", "exp(z)", "exp(2*z)"]);
        for z in crate::exprlang::probe_points() {
            let ch = f.choose_chart(z).unwrap();
            let a = wronskian_in_chart(&f, z, ch).unwrap();
            let b = affine_wronskian(&f, z, ch).unwrap();
            assert!((a - b).norm() < 1e-12 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn jet_recursion_agrees_with_pointwise_christoffel() {
        // Row 2 equals w'' + Γ(w', w') with Γ from the inverse-metric route.
        let f = proj(&["1 + z", "exp(z)", "z^2 - 2"]);
        let z = c(0.3, 0.2);
        let ch = f.choose_chart(z).unwrap();
        let jets = covariant_jets_in_chart(&f, z, 2, ch).unwrap();
        let w = f.chart_series::<4>(z, ch).unwrap();
        let p: Vec<Complex64> = w.iter().map(|s| s.value()).collect();
        let gam = christoffel_at(TargetSpace::ProjectiveFS(2), &p).unwrap();
        for k in 0..2 {
            let mut v = w[k].derivative_at(2);
            for i in 0..2 {
                for j in 0..2 {
                    v += w[i].derivative_at(1) * w[j].derivative_at(1) * gam.get(i, j, k);
                }
            }
            assert!((v - jets.rows[1][k]).norm() < 1e-12 * (1.0 + v.norm()));
        }
    }

    #[test]
    fn cr_residual_small_for_fs_and_flat() {
        let f = proj(&["1", "exp(z)", "exp(2*z)"]);
        assert!(cr_residual(&f, c(0.3, 0.2), 1e-4).unwrap() <= 1e-5);
        assert!(cr_residual(&example1(), c(0.7, 0.4), 1e-4).unwrap() <= 1e-5);
        let k = proj(&["1", "2"]);
        assert_eq!(cr_residual(&k, c(0.3, 0.2), 1e-4).unwrap(), 0.0);
    }

    #[test]
    fn chart_invariance_of_w_squared_omega() {
        let f = example1();
        let z = c(0.8, 0.3);
        let mut vals = Vec::new();
        for chart in 0..4 {
            let w = wronskian_in_chart(&f, z, chart).unwrap();
            let p = f.chart_point(z, chart).unwrap();
            vals.push(w.norm_sqr() * omega(&f, &p).unwrap());
        }
        for v in &vals {
            assert!((v - vals[0]).abs() < 1e-8 * vals[0]);
        }
        let g = proj(&["1 + z", "exp(z)", "z^2 - 2"]);
        let mut vals = Vec::new();
        for chart in 0..3 {
            let w = wronskian_in_chart(&g, z, chart).unwrap();
            let p = g.chart_point(z, chart).unwrap();
            vals.push(w.norm_sqr() * omega(&g, &p).unwrap());
        }
        for v in &vals {
            assert!((v - vals[0]).abs() < 1e-8 * vals[0]);
        }
    }

    #[test]
    fn xi_two_path_agreement_on_example1() {
        let f = example1();
        let d = DivisorSpec::new(
            TargetSpace::P1xP1Flat,
            vec![DivisorComponent::TorusCurve { m: 1, n: 1, c: c(3.0, 0.0) }],
        )
        .unwrap();
        let z = c(1.0, 0.0);
        let xi = xi_at(&f, &d, z).unwrap();
        assert_eq!(xi.status, XiStatus::Finite);
        // Invariant-frame path: ξ = |(log F)'(log G)'' − (log F)''(log G)'|² / ‖σ‖².
        let inv = flat_wronskian_closed_form(&f.components()[0], &f.components()[1], z).unwrap()
            / (f.components()[0].eval(z) * f.components()[1].eval(z));
        let direct = inv.norm_sqr() / f.section_norm(&d.components[0], z).powi(2);
        assert!((xi.value - direct).abs() < 1e-8 * direct);
    }

    #[test]
    fn xi_blows_up_with_exponent_two_near_divisor() {
        // xy = 3 pulls back to e^{2z} − 2e^z + 3 = 0: e^z = 1 ± i√2.
        let f = example1();
        let d = DivisorSpec::new(
            TargetSpace::P1xP1Flat,
            vec![DivisorComponent::TorusCurve { m: 1, n: 1, c: c(3.0, 0.0) }],
        )
        .unwrap();
        let z0 = c(1.0, 2.0f64.sqrt()).ln();
        let dir = c(0.6, 0.8);
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for k in 0..8 {
            let t = 1e-3 * 0.5f64.powi(k);
            let v = xi_at(&f, &d, z0 + dir * t).unwrap().value;
            xs.push(t.ln());
            ys.push(v.ln());
        }
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let slope = sxy / sxx;
        assert!((slope + 2.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn degenerate_curve_has_zero_xi() {
        let f = CurveMap::flat(mf("exp(z)"), mf("exp(2*z)")).unwrap();
        let d = DivisorSpec::new(
            TargetSpace::P1xP1Flat,
            vec![DivisorComponent::TorusCurve { m: 1, n: 1, c: c(3.0, 0.0) }],
        )
        .unwrap();
        assert!(xi_at(&f, &d, c(0.2, 0.1)).unwrap().value < 1e-20);
    }

    #[test]
    fn order_above_dimension_is_rejected() {
        let f = proj(&["1", "exp(z)"]);
        assert!(matches!(covariant_jets(&f, c(0.0, 0.0), 2), Err(JetError::Order { .. })));
    }
}
