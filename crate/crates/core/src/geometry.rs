//! Target spaces, their metrics and connections, and divisor components.
//!
//! Three targets are fixed: `P^n` with the Fubini–Study metric, `(P^1)^2`
//! with the flat logarithmic connection of the torus `(C^*)^2`, and the
//! unit ball with the metric of the potential `-log(1 - |w|^2)`.
//! Both Kähler targets share the closed forms
//!
//! ```text
//! S = 1 + ε|w|²,   g_{j l̄} = δ_{jl}/S − ε w̄_j w_l / S²,
//! Γ^k_{ij}  = −ε (δ_{ik} w̄_j + δ_{jk} w̄_i) / S,
//! ```
//!
//! with `ε = 1` (Fubini–Study) and `ε = −1` (ball).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::numeric::gcd;
use crate::numeric::linalg::CMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("point lies outside the chart domain")]
    OutsideChart,
    #[error("metric is singular (condition number {0:e})")]
    SingularMetric(f64),
    #[error("component does not belong to the target: {0}")]
    Mismatch(String),
    #[error("invalid divisor component: {0}")]
    InvalidComponent(String),
    #[error("coefficient vector has length {got}, expected {expected}")]
    WrongLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetSpace {
    ProjectiveFS(usize),
    P1xP1Flat,
    BallBergman(usize),
}

impl TargetSpace {
    pub fn dim(&self) -> usize {
        match *self {
            TargetSpace::ProjectiveFS(n) | TargetSpace::BallBergman(n) => n,
            TargetSpace::P1xP1Flat => 2,
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.dim() == 0 {
            return Err(GeometryError::InvalidComponent(String::from("target dimension must be at least 1")));
        }
        Ok(())
    }

    fn epsilon(&self) -> f64 {
        match self {
            TargetSpace::BallBergman(_) => -1.0,
            _ => 1.0,
        }
    }
}

/// `g_{ij̄}` at a chart point; entry `(i, j)` of the matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMetric {
    pub point: Vec<Complex64>,
    pub g: CMatrix,
}

impl HermitianMetric {
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.g.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.g.get(i, j) - self.g.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Leading principal minors are real and positive.
    pub fn is_positive_definite(&self) -> bool {
        let n = self.g.dim;
        (1..=n).all(|k| {
            let rows: Vec<Vec<Complex64>> = (0..k).map(|i| (0..k).map(|j| self.g.get(i, j)).collect()).collect();
            let d = CMatrix::from_rows(&rows).determinant();
            d.re > 0.0 && d.im.abs() <= 1e-12 * (1.0 + d.re)
        })
    }

    /// Volume density `det g`.
    pub fn volume(&self) -> f64 {
        self.g.determinant().re
    }
}

/// `Γ^k_{ij}` stored at index `(k·n + i)·n + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelTensor {
    pub point: Vec<Complex64>,
    pub dim: usize,
    pub values: Vec<Complex64>,
}

impl ChristoffelTensor {
    fn zeros(point: Vec<Complex64>, dim: usize) -> Self {
        ChristoffelTensor { point, dim, values: vec![ZERO; dim * dim * dim] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.values[(k * self.dim + i) * self.dim + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, k: usize, v: Complex64) {
        self.values[(k * self.dim + i) * self.dim + j] = v;
    }

    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    worst = worst.max((self.get(i, j, k) - self.get(j, i, k)).norm());
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

fn check_point(target: TargetSpace, w: &[Complex64]) -> Result<(), GeometryError> {
    if w.len() != target.dim() {
        return Err(GeometryError::WrongLength { expected: target.dim(), got: w.len() });
    }
    if w.iter().any(|c| !c.is_finite()) {
        return Err(GeometryError::OutsideChart);
    }
    if let TargetSpace::BallBergman(_) = target {
        if w.iter().map(|c| c.norm_sqr()).sum::<f64>() >= 1.0 {
            return Err(GeometryError::OutsideChart);
        }
    }
    Ok(())
}

fn potential_scale(target: TargetSpace, w: &[Complex64]) -> f64 {
    1.0 + target.epsilon() * w.iter().map(|c| c.norm_sqr()).sum::<f64>()
}

/// `g_{ij̄} = ∂_i ∂̄_j φ` from the closed-form second derivatives of the
/// potential. On `(P^1)^2` this is the product Fubini–Study metric, whose
/// volume form enters the auxiliary function ξ.
pub fn metric_at(target: TargetSpace, w: &[Complex64]) -> Result<HermitianMetric, GeometryError> {
    check_point(target, w)?;
    let n = target.dim();
    let mut g = CMatrix::zeros(n);
    match target {
        TargetSpace::P1xP1Flat => {
            for i in 0..2 {
                g.set(i, i, Complex64::new((1.0 + w[i].norm_sqr()).powi(-2), 0.0));
            }
        }
        _ => {
            let eps = target.epsilon();
            let s = potential_scale(target, w);
            for i in 0..n {
                for j in 0..n {
                    let delta = if i == j { 1.0 / s } else { 0.0 };
                    g.set(i, j, Complex64::new(delta, 0.0) - w[i].conj() * w[j] * (eps / (s * s)));
                }
            }
        }
    }
    Ok(HermitianMetric { point: w.to_vec(), g })
}

/// `∂_i g_{j l̄}` for the Kähler targets, indexed `[i][j][l]`.
fn metric_derivative(target: TargetSpace, w: &[Complex64]) -> Vec<Vec<Vec<Complex64>>> {
    let n = w.len();
    let eps = target.epsilon();
    let s = potential_scale(target, w);
    let mut d = vec![vec![vec![ZERO; n]; n]; n];
    for (i, di) in d.iter_mut().enumerate() {
        for (j, dij) in di.iter_mut().enumerate() {
            for (l, v) in dij.iter_mut().enumerate() {
                let mut acc = w[j].conj() * w[l] * w[i].conj() * (2.0 * eps * eps / (s * s * s));
                if j == l {
                    acc -= w[i].conj() * (eps / (s * s));
                }
                if i == l {
                    acc -= w[j].conj() * (eps / (s * s));
                }
                *v = acc;
            }
        }
    }
    d
}

/// Connection coefficients at a chart point.
///
/// Kähler targets: `Γ^k_{ij} = Σ_l (∂_i g_{j l̄}) g^{l̄ k}`. Flat target, in
/// any of the four affine charts: `Γ^1_{11} = −1/x`, `Γ^2_{22} = −1/y`.
pub fn christoffel_at(target: TargetSpace, w: &[Complex64]) -> Result<ChristoffelTensor, GeometryError> {
    check_point(target, w)?;
    let n = target.dim();
    let mut gamma = ChristoffelTensor::zeros(w.to_vec(), n);
    if target == TargetSpace::P1xP1Flat {
        if w[0].norm() == 0.0 || w[1].norm() == 0.0 {
            return Err(GeometryError::OutsideChart);
        }
        gamma.set(0, 0, 0, -w[0].inv());
        gamma.set(1, 1, 1, -w[1].inv());
        return Ok(gamma);
    }
    let g = metric_at(target, w)?.g;
    let cond = g.condition_number();
    if !(cond <= 1e12) {
        return Err(GeometryError::SingularMetric(cond));
    }
    let ginv = g.inverse().ok_or(GeometryError::SingularMetric(f64::INFINITY))?;
    let dg = metric_derivative(target, w);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for l in 0..n {
                    acc += dg[i][j][l] * ginv.get(l, k);
                }
                gamma.set(i, j, k, acc);
            }
        }
    }
    Ok(gamma)
}

/// The closed form `−ε(δ_ik w̄_j + δ_jk w̄_i)/S`; oracle for `christoffel_at`
/// (the jet recursion evaluates the same form on Taylor series).
#[cfg(test)]
pub(crate) fn kahler_christoffel_closed_form(target: TargetSpace, w: &[Complex64]) -> ChristoffelTensor {
    let n = w.len();
    let eps = target.epsilon();
    let s = potential_scale(target, w);
    let mut gamma = ChristoffelTensor::zeros(w.to_vec(), n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                if i == k {
                    acc += w[j].conj();
                }
                if j == k {
                    acc += w[i].conj();
                }
                gamma.set(i, j, k, acc * (-eps / s));
            }
        }
    }
    gamma
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    XZero,
    XInfinity,
    YZero,
    YInfinity,
}

impl Boundary {
    pub const ALL: [Boundary; 4] = [Boundary::XZero, Boundary::XInfinity, Boundary::YZero, Boundary::YInfinity];

    pub fn label(&self) -> &'static str {
        match self {
            Boundary::XZero => "x=0",
            Boundary::XInfinity => "x=inf",
            Boundary::YZero => "y=0",
            Boundary::YInfinity => "y=inf",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DivisorComponent {
    /// `{Σ a_i w_i = 0}` in homogeneous coordinates of `P^n`.
    Hyperplane(Vec<Complex64>),
    /// Closure of `{x^m y^n = c}` in `(P^1)^2`.
    TorusCurve { m: i32, n: i32, c: Complex64 },
    Boundary(Boundary),
}

impl DivisorComponent {
    pub fn label(&self) -> String {
        match self {
            DivisorComponent::Hyperplane(a) => {
                let parts: Vec<String> = a.iter().map(|c| fmt_c(*c)).collect();
                format!("H({})", parts.join(";"))
            }
            DivisorComponent::TorusCurve { m, n, c } => format!("x^{m}y^{n}={}", fmt_c(*c)),
            DivisorComponent::Boundary(b) => String::from(b.label()),
        }
    }

    /// Bidegree `(a, b)` of the closure in `(P^1)^2`: degree `a` in the
    /// homogeneous coordinates of the first factor and `b` in the second.
    pub fn bidegree(&self) -> Option<(u32, u32)> {
        match self {
            DivisorComponent::TorusCurve { m, n, .. } => Some((m.unsigned_abs(), n.unsigned_abs())),
            DivisorComponent::Boundary(Boundary::XZero | Boundary::XInfinity) => Some((1, 0)),
            DivisorComponent::Boundary(_) => Some((0, 1)),
            DivisorComponent::Hyperplane(_) => None,
        }
    }

    /// Normalized section norm `‖σ‖ ∈ [0, 1]` at a point of the target,
    /// given in homogeneous coordinates. For `(P^1)^2`, `point` is
    /// `[X0, X1, Y0, Y1]` with `x = X1/X0`, `y = Y1/Y0`.
    pub fn section_norm(&self, point: &[Complex64]) -> f64 {
        match self {
            DivisorComponent::Hyperplane(a) => {
                let dot: Complex64 = a.iter().zip(point).map(|(ai, wi)| *ai * *wi).sum();
                (dot.norm() / (l2(a) * l2(point))).min(1.0)
            }
            DivisorComponent::TorusCurve { .. } | DivisorComponent::Boundary(_) => {
                let (nx, ny) = (l2(&point[0..2]), l2(&point[2..4]));
                let x = [point[0] / nx, point[1] / nx];
                let y = [point[2] / ny, point[3] / ny];
                (self.torus_section(&x, &y).norm() / self.torus_section_bound()).min(1.0)
            }
        }
    }

    /// The defining bihomogeneous polynomial evaluated at `X`, `Y`.
    pub fn torus_section<S>(&self, x: &[S; 2], y: &[S; 2]) -> S
    where
        S: crate::numeric::series::Scalar,
    {
        let pw = |b: S, e: i32| if e == 0 { S::constant(Complex64::new(1.0, 0.0)) } else { b.powi(e) };
        match *self {
            DivisorComponent::TorusCurve { m, n, c } => {
                let (mp, mm) = (m.max(0), (-m).max(0));
                let (np, nm) = (n.max(0), (-n).max(0));
                let lhs = pw(x[1], mp) * pw(x[0], mm) * pw(y[1], np) * pw(y[0], nm);
                let rhs = pw(x[0], mp) * pw(x[1], mm) * pw(y[0], np) * pw(y[1], nm);
                lhs - S::constant(c) * rhs
            }
            DivisorComponent::Boundary(b) => match b {
                Boundary::XZero => x[1],
                Boundary::XInfinity => x[0],
                Boundary::YZero => y[1],
                Boundary::YInfinity => y[0],
            },
            DivisorComponent::Hyperplane(_) => S::constant(ZERO),
        }
    }

    /// Upper bound of `|torus_section|` over unit homogeneous vectors.
    fn torus_section_bound(&self) -> f64 {
        match self {
            DivisorComponent::TorusCurve { c, .. } => 1.0 + c.norm(),
            _ => 1.0,
        }
    }
}

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn fmt_c(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else {
        format!("{}{:+}i", c.re, c.im)
    }
}

/// A validated divisor: components in normal form plus notes on any
/// rewriting that normalization performed.
#[derive(Debug, Clone, PartialEq)]
pub struct DivisorSpec {
    pub target: TargetSpace,
    pub components: Vec<DivisorComponent>,
    pub notes: Vec<String>,
}

impl DivisorSpec {
    pub fn new(target: TargetSpace, components: Vec<DivisorComponent>) -> Result<Self, GeometryError> {
        target.validate()?;
        let mut out = Vec::new();
        let mut notes = Vec::new();
        for comp in components {
            check_membership(target, &comp)?;
            match comp {
                DivisorComponent::Hyperplane(a) => {
                    if l2(&a) == 0.0 || a.iter().any(|c| !c.is_finite()) {
                        return Err(GeometryError::InvalidComponent(String::from("zero hyperplane coefficients")));
                    }
                    out.push(DivisorComponent::Hyperplane(a));
                }
                DivisorComponent::TorusCurve { m, n, c } => {
                    let parts = normalize_torus(m, n, c)?;
                    if parts.len() != 1 || parts[0] != (DivisorComponent::TorusCurve { m, n, c }) {
                        let shown: Vec<String> = parts.iter().map(|p| p.label()).collect();
                        notes.push(format!(
                            "x^{m}y^{n}={} normalized to {}",
                            fmt_c(c),
                            shown.join(" + ")
                        ));
                    }
                    out.extend(parts);
                }
                b @ DivisorComponent::Boundary(_) => out.push(b),
            }
        }
        for i in 0..out.len() {
            for j in 0..i {
                if same_support(&out[i], &out[j]) {
                    return Err(GeometryError::InvalidComponent(format!(
                        "components {} and {} coincide",
                        out[j].label(),
                        out[i].label()
                    )));
                }
            }
        }
        Ok(DivisorSpec { target, components: out, notes })
    }

    pub fn hyperplanes(&self) -> Vec<Vec<Complex64>> {
        self.components
            .iter()
            .filter_map(|c| match c {
                DivisorComponent::Hyperplane(a) => Some(a.clone()),
                _ => None,
            })
            .collect()
    }

    /// Bidegree of the union of the torus-curve components.
    pub fn torus_bidegree(&self) -> (u32, u32) {
        self.components
            .iter()
            .filter(|c| matches!(c, DivisorComponent::TorusCurve { .. }))
            .filter_map(|c| c.bidegree())
            .fold((0, 0), |(a, b), (x, y)| (a + x, b + y))
    }
}

fn check_membership(target: TargetSpace, comp: &DivisorComponent) -> Result<(), GeometryError> {
    match (target, comp) {
        (TargetSpace::ProjectiveFS(n), DivisorComponent::Hyperplane(a)) => {
            if a.len() != n + 1 {
                return Err(GeometryError::WrongLength { expected: n + 1, got: a.len() });
            }
            Ok(())
        }
        (TargetSpace::P1xP1Flat, DivisorComponent::TorusCurve { .. } | DivisorComponent::Boundary(_)) => Ok(()),
        (t, c) => Err(GeometryError::Mismatch(format!("{} on {:?}", c.label(), t))),
    }
}

fn same_support(a: &DivisorComponent, b: &DivisorComponent) -> bool {
    match (a, b) {
        (DivisorComponent::Hyperplane(x), DivisorComponent::Hyperplane(y)) => gram_volume(&[x, y]) <= 1e-10,
        (
            DivisorComponent::TorusCurve { m: m1, n: n1, c: c1 },
            DivisorComponent::TorusCurve { m: m2, n: n2, c: c2 },
        ) => m1 == m2 && n1 == n2 && (*c1 - *c2).norm() <= 1e-12 * c1.norm(),
        _ => a == b,
    }
}

/// Splits `x^m y^n = c` with `g = gcd(|m|,|n|) > 1` into the `g` curves
/// `x^{m/g} y^{n/g} = c^{1/g} ω^k`, then fixes the sign so that `m > 0`,
/// or `m = 0` and `n > 0`.
fn normalize_torus(m: i32, n: i32, c: Complex64) -> Result<Vec<DivisorComponent>, GeometryError> {
    if m == 0 && n == 0 {
        return Err(GeometryError::InvalidComponent(String::from("torus curve needs (m, n) != (0, 0)")));
    }
    if c.norm() == 0.0 || !c.is_finite() {
        return Err(GeometryError::InvalidComponent(String::from("torus curve constant must be finite and nonzero")));
    }
    let g = gcd(m as i64, n as i64) as i32;
    let (mut m1, mut n1) = (m / g, n / g);
    let flip = m1 < 0 || (m1 == 0 && n1 < 0);
    if flip {
        m1 = -m1;
        n1 = -n1;
    }
    let root = c.powf(1.0 / g as f64);
    Ok((0..g)
        .map(|k| {
            let ck = root * Complex64::from_polar(1.0, 2.0 * PI * k as f64 / g as f64);
            let ck = if flip { ck.inv() } else { ck };
            DivisorComponent::TorusCurve { m: m1, n: n1, c: ck }
        })
        .collect())
}

/// Confirms that a component is totally geodesic for the target's
/// connection. Representable components always are (linear subspaces of
/// `P^n`; affine lines `mu + nv = log c` in logarithmic coordinates of the
/// torus; the boundary divisors), so this returns `true` or an error for
/// a component that is malformed or foreign to the target.
pub fn is_totally_geodesic(target: TargetSpace, comp: &DivisorComponent) -> Result<bool, GeometryError> {
    check_membership(target, comp)?;
    match comp {
        DivisorComponent::Hyperplane(a) if l2(a) == 0.0 => {
            Err(GeometryError::InvalidComponent(String::from("zero hyperplane coefficients")))
        }
        DivisorComponent::TorusCurve { m, n, c } => {
            let parts = normalize_torus(*m, *n, *c)?;
            if parts.len() != 1 || parts[0] != *comp {
                return Err(GeometryError::InvalidComponent(format!("{} is not in normal form", comp.label())));
            }
            Ok(true)
        }
        _ => Ok(true),
    }
}

/// `sqrt(det(A Aᴴ))` of the rows normalized to unit length.
fn gram_volume(rows: &[&Vec<Complex64>]) -> f64 {
    let k = rows.len();
    let unit: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|r| {
            let s = l2(r);
            r.iter().map(|c| *c / s).collect()
        })
        .collect();
    let mut gram = CMatrix::zeros(k);
    for i in 0..k {
        for j in 0..k {
            let v: Complex64 = unit[i].iter().zip(&unit[j]).map(|(a, b)| *a * b.conj()).sum();
            gram.set(i, j, v);
        }
    }
    gram.determinant().re.max(0.0).sqrt()
}

/// True iff every subset of at most `n + 1` coefficient vectors is
/// linearly independent (checked on subsets of size `min(q, n + 1)`).
pub fn general_position_check(hyperplanes: &[Vec<Complex64>]) -> Result<bool, GeometryError> {
    let Some(first) = hyperplanes.first() else {
        return Ok(true);
    };
    let len = first.len();
    if len < 2 {
        return Err(GeometryError::WrongLength { expected: 2, got: len });
    }
    for h in hyperplanes {
        if h.len() != len {
            return Err(GeometryError::WrongLength { expected: len, got: h.len() });
        }
        if l2(h) == 0.0 {
            return Ok(false);
        }
    }
    let size = hyperplanes.len().min(len);
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        let rows: Vec<&Vec<Complex64>> = idx.iter().map(|&i| &hyperplanes[i]).collect();
        if gram_volume(&rows) <= 1e-10 {
            return Ok(false);
        }
        // Next combination in lexicographic order.
        let q = hyperplanes.len();
        let mut pos = size;
        loop {
            if pos == 0 {
                return Ok(true);
            }
            pos -= 1;
            if idx[pos] < q - size + pos {
                break;
            }
        }
        idx[pos] += 1;
        for t in pos + 1..size {
            idx[t] = idx[t - 1] + 1;
        }
    }
}
