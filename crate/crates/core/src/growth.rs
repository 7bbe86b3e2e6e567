//! Nevanlinna functionals on a radius grid: order functions, counting and
//! proximity functions, circle means of `log⁺ξ`, Jensen checks, and the
//! fitted allowance model for the small error term.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::exec::Executor;
use crate::exprlang::{ExprAst, MeromorphicFn, MAX_VANISHING_ORDER};
use crate::geometry::{DivisorComponent, DivisorSpec, TargetSpace};
use crate::jets::{xi_at, CurveMap, JetError, XiStatus};
use crate::numeric::linalg::solve_real;
use crate::numeric::quad::{circle_mean, circle_mean_adaptive, integrate_vec, CircleRule, IntervalRule, QuadError};
use crate::numeric::series::Series;
use crate::rootcount::{counting_function, locate_zeros, Disc, Entire, RootError, ZeroSet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrowthError {
    #[error("radius {0} is below the base radius 1")]
    BadRadius(f64),
    #[error("radius grid: {0}")]
    BadGrid(String),
    #[error("line bundle {bundle} is not defined on {target}")]
    Bundle { bundle: String, target: String },
    #[error("{0}")]
    Unsupported(String),
    #[error("zero of h on the circle |z| = {0}")]
    ZeroOnCircle(f64),
    #[error("the pullback of {0} vanishes identically")]
    CurveInDivisor(String),
    #[error("allowance fit: design matrix is degenerate")]
    DegenerateDesign,
    #[error("exceptional fraction must lie in [0, 0.1], got {0}")]
    BadEps(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Line bundles whose order functions are available.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineBundle {
    /// `O(k)` on `P^n`.
    O(i32),
    /// `O(a, b)` on `(P^1)^2`.
    Bi(i32, i32),
    /// The canonical bundle of the target.
    Canonical,
}

impl LineBundle {
    pub fn label(&self) -> String {
        match self {
            LineBundle::O(k) => format!("O({k})"),
            LineBundle::Bi(a, b) => format!("O({a},{b})"),
            LineBundle::Canonical => String::from("K"),
        }
    }

    /// Coefficients on the per-factor order functions: one factor for
    /// `P^n` (`T(O(1))`), two for `(P^1)^2` (`T_F`, `T_G`).
    fn weights(&self, target: TargetSpace) -> Result<Vec<f64>, GrowthError> {
        let bad = || GrowthError::Bundle { bundle: self.label(), target: format!("{target:?}") };
        match (target, *self) {
            (TargetSpace::ProjectiveFS(_), LineBundle::O(k)) => Ok(alloc::vec![k as f64]),
            (TargetSpace::ProjectiveFS(n), LineBundle::Canonical) => Ok(alloc::vec![-(n as f64 + 1.0)]),
            (TargetSpace::P1xP1Flat, LineBundle::Bi(a, b)) => Ok(alloc::vec![a as f64, b as f64]),
            (TargetSpace::P1xP1Flat, LineBundle::Canonical) => Ok(alloc::vec![-2.0, -2.0]),
            _ => Err(bad()),
        }
    }
}

/// The bundle whose order function measures the growth of a curve:
/// `O(1)` on `P^n`, `O(1,1)` on `(P^1)^2`.
pub fn reference_bundle(target: TargetSpace) -> LineBundle {
    match target {
        TargetSpace::P1xP1Flat => LineBundle::Bi(1, 1),
        _ => LineBundle::O(1),
    }
}

const RADIAL_RULE: IntervalRule = IntervalRule { rel_tol: 1e-9, abs_tol: 1e-13, max_panels: 4096, initial_panels: 1 };
const ANGULAR_TOL: f64 = 1e-12;
/// `log⁺` of a function with kinks converges algebraically under the
/// trapezoid rule, so circle means of `log⁺` use a looser tolerance.
const LOG_PLUS_TOL: f64 = 1e-8;

fn check_radius(r: f64) -> Result<(), GrowthError> {
    if r >= 1.0 && r.is_finite() {
        Ok(())
    } else {
        Err(GrowthError::BadRadius(r))
    }
}

fn check_grid(radii: &[f64]) -> Result<(), GrowthError> {
    if radii.is_empty() {
        return Err(GrowthError::BadGrid(String::from("empty")));
    }
    for w in radii.windows(2) {
        if !(w[1] > w[0]) {
            return Err(GrowthError::BadGrid(format!("not strictly ascending at {} -> {}", w[0], w[1])));
        }
    }
    check_radius(radii[0])
}

fn angular_rule(s: f64, rel_tol: f64) -> CircleRule {
    CircleRule { rel_tol, abs_tol: rel_tol * 1e-3, ..CircleRule::for_radius(s) }
}

/// Starting panels for adaptive circle means: features of angular width
/// `~1/r` get a few panels each.
fn log_plus_panels(r: f64) -> usize {
    (4.0 * r).ceil().max(16.0) as usize
}

fn point_on(r: f64, theta: f64) -> Complex64 {
    Complex64::from_polar(r, theta)
}

/// Groups of homogeneous coordinates forming the projective factors.
fn factor_ranges(target: TargetSpace) -> Result<Vec<(usize, usize)>, GrowthError> {
    match target {
        TargetSpace::ProjectiveFS(n) => Ok(alloc::vec![(0, n + 1)]),
        TargetSpace::P1xP1Flat => Ok(alloc::vec![(0, 2), (2, 4)]),
        TargetSpace::BallBergman(_) => {
            Err(GrowthError::Unsupported(String::from("order functions are defined for P^n and (P^1)^2 targets")))
        }
    }
}

/// Planar density of the pulled-back Fubini–Study form of one factor,
/// `(1/π) Σ_{i<j} |g_i g_j' − g_j g_i'|² / ‖g‖⁴` (Lagrange's identity, free
/// of cancellation).
fn fs_density(h: &[Series<2>]) -> f64 {
    let big = h.iter().fold(0.0f64, |m, s| m.max(s.value().norm()));
    if !(big > 0.0) || !big.is_finite() {
        return 0.0;
    }
    let g: Vec<(Complex64, Complex64)> = h.iter().map(|s| (s.value() / big, s.coeffs[1] / big)).collect();
    let norm2: f64 = g.iter().map(|(v, _)| v.norm_sqr()).sum();
    let mut num = 0.0;
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            num += (g[i].0 * g[j].1 - g[j].0 * g[i].1).norm_sqr();
        }
    }
    num / (PI * norm2 * norm2)
}

/// `∫_0^{2π} ρ(s e^{iθ}) dθ` for every factor at once.
fn angular_mass(curve: &CurveMap, ranges: &[(usize, usize)], s: f64) -> Result<Vec<f64>, QuadError> {
    let mut out = Vec::with_capacity(ranges.len());
    for &(lo, hi) in ranges {
        let m = circle_mean(
            |t| {
                let h = curve.homogeneous_series::<2>(point_on(s, t));
                Some(fs_density(&h[lo..hi]))
            },
            angular_rule(s, ANGULAR_TOL),
        )?;
        out.push(2.0 * PI * m.value);
    }
    Ok(out)
}

/// Per-factor `∫_a^b Φ(s) s (1, log⁺ s) ds` over a radial interval.
fn radial_moments(curve: &CurveMap, ranges: &[(usize, usize)], a: f64, b: f64) -> Result<Vec<[f64; 2]>, QuadError> {
    let mut out = Vec::with_capacity(ranges.len());
    for r in ranges {
        let one = core::slice::from_ref(r);
        let v = integrate_vec(
            |s| {
                let phi = angular_mass(curve, one, s)?[0];
                Ok::<_, QuadError>([phi * s, phi * s * s.max(1.0).ln()])
            },
            a,
            b,
            RADIAL_RULE,
        )?;
        out.push(v);
    }
    Ok(out)
}

/// Per-factor order functions `T(r) = ∫_{|z|<r} ρ · log(r / max(1,|z|)) dA`
/// on an ascending grid, from cumulative radial moments
/// `A(r) = ∫_0^r Φ s ds`, `B(r) = ∫_0^r Φ s log⁺s ds` as
/// `T(r) = A(r) log r − B(r)`.
pub fn factor_orders<E: Executor>(curve: &CurveMap, radii: &[f64], exec: &E) -> Result<Vec<Vec<f64>>, GrowthError> {
    check_grid(radii)?;
    let ranges = factor_ranges(curve.target())?;
    let mut knots = Vec::with_capacity(radii.len() + 2);
    knots.push(0.0);
    knots.push(1.0);
    knots.extend(radii.iter().copied().filter(|&r| r > 1.0));
    let pieces = exec.map(knots.len() - 1, &|i| radial_moments(curve, &ranges, knots[i], knots[i + 1]));
    let mut cum: Vec<Vec<[f64; 2]>> = Vec::with_capacity(pieces.len());
    let mut acc = alloc::vec![[0.0f64; 2]; ranges.len()];
    for p in pieces {
        let p = p?;
        for (a, v) in acc.iter_mut().zip(&p) {
            a[0] += v[0];
            a[1] += v[1];
        }
        cum.push(acc.clone());
    }
    // `cum[i]` holds the moments up to `knots[i + 1]`.
    let at = |r: f64| -> &Vec<[f64; 2]> {
        let idx = knots.iter().position(|&k| k == r).unwrap_or(1);
        &cum[idx - 1]
    };
    Ok(ranges
        .iter()
        .enumerate()
        .map(|(f, _)| {
            radii
                .iter()
                .map(|&r| {
                    let m = at(r)[f];
                    (m[0] * r.ln() - m[1]).max(0.0)
                })
                .collect()
        })
        .collect())
}

/// `T_f(r, L)` on an ascending grid of radii.
pub fn order_functions<E: Executor>(
    curve: &CurveMap,
    bundle: LineBundle,
    radii: &[f64],
    exec: &E,
) -> Result<Vec<f64>, GrowthError> {
    let w = bundle.weights(curve.target())?;
    let base = factor_orders(curve, radii, exec)?;
    Ok(combine(&w, &base))
}

fn combine(weights: &[f64], base: &[Vec<f64>]) -> Vec<f64> {
    (0..base[0].len()).map(|i| weights.iter().zip(base).map(|(w, t)| w * t[i]).sum()).collect()
}

/// `T_f(r, L)` at one radius.
pub fn order_function(curve: &CurveMap, bundle: LineBundle, r: f64) -> Result<f64, GrowthError> {
    check_radius(r)?;
    Ok(order_functions(curve, bundle, &[r], &crate::exec::Sequential)?[0])
}

/// `m(r, D_i) = ∫ log⁺(1/‖σ(f(re^{iθ}))‖) dθ/2π`; nodes on the divisor
/// are excluded and refined around.
pub fn proximity(curve: &CurveMap, comp: &DivisorComponent, r: f64) -> Result<f64, GrowthError> {
    check_radius(r)?;
    let m = circle_mean_adaptive(
        |t| {
            let s = curve.section_norm(comp, point_on(r, t));
            if s > 0.0 && s.is_finite() {
                Some((1.0 / s).ln().max(0.0))
            } else {
                None
            }
        },
        log_plus_panels(r),
        LOG_PLUS_TOL,
        LOG_PLUS_TOL * 1e-3,
    )?;
    Ok(m)
}

/// The classical `m(r, ∞) = ∫ log⁺|F(re^{iθ})| dθ/2π` of a meromorphic
/// function.
pub fn classical_proximity(f: &MeromorphicFn, r: f64) -> Result<f64, GrowthError> {
    check_radius(r)?;
    let m = circle_mean_adaptive(
        |t| {
            let v = f.eval(point_on(r, t)).norm();
            if v.is_finite() && v > 0.0 {
                Some(v.ln().max(0.0))
            } else if v == 0.0 {
                Some(0.0)
            } else {
                None
            }
        },
        log_plus_panels(r),
        LOG_PLUS_TOL,
        LOG_PLUS_TOL * 1e-3,
    )?;
    Ok(m)
}

/// `∫ log|h(re^{iθ})| dθ/2π`.
pub fn log_modulus_mean(h: &ExprAst, r: f64) -> Result<f64, GrowthError> {
    let e = Entire::new(h)?;
    let m = circle_mean(
        |t| {
            let v = e.eval(point_on(r, t)).norm();
            if v > 0.0 && v.is_finite() {
                Some(v.ln())
            } else {
                None
            }
        },
        angular_rule(r, ANGULAR_TOL),
    )?;
    Ok(m.value)
}

/// `|mean_r log|h| − mean_1 log|h| − N(r)|`, Jensen's formula with base
/// circle `|z| = 1` and `N` from located zeros.
pub fn jensen_residual(h: &ExprAst, r: f64) -> Result<f64, GrowthError> {
    check_radius(r)?;
    let zs = locate_zeros(h, Disc::centered(r * (1.0 + 1e-6))?)?;
    for z in &zs.zeros {
        for c in [1.0, r] {
            if (z.location.norm() - c).abs() <= z.radius + 1e-9 * c {
                return Err(GrowthError::ZeroOnCircle(c));
            }
        }
    }
    let n = counting_function(&zs, r, MAX_VANISHING_ORDER as u32)?;
    Ok((log_modulus_mean(h, r)? - log_modulus_mean(h, 1.0)? - n).abs())
}

/// `∫ log⁺ξ(re^{iθ}) dθ/2π`, with nodes at divisor points excluded.
pub fn log_plus_xi_mean(curve: &CurveMap, divisors: &DivisorSpec, r: f64) -> Result<f64, GrowthError> {
    check_radius(r)?;
    let failure: RefCell<Option<JetError>> = RefCell::new(None);
    let m = circle_mean_adaptive(
        |t| match xi_at(curve, divisors, point_on(r, t)) {
            Ok(x) => match x.status {
                XiStatus::AtDivisorSingularity => None,
                _ if x.value.is_finite() => Some(if x.value > 0.0 { x.value.ln().max(0.0) } else { 0.0 }),
                _ => None,
            },
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                None
            }
        },
        log_plus_panels(r),
        LOG_PLUS_TOL,
        LOG_PLUS_TOL * 1e-3,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e.into());
    }
    Ok(m?)
}

/// One labelled column of a [`GrowthTable`].
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub label: String,
    pub values: Vec<f64>,
}

/// Nevanlinna functionals of one curve over an ascending radius grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthTable {
    pub radii: Vec<f64>,
    /// `T:<bundle>` columns.
    pub order: Vec<Column>,
    /// `N<k>:<component>` columns.
    pub counting: Vec<Column>,
    /// `m:<component>` columns.
    pub proximity: Vec<Column>,
    /// Circle means of `log⁺ξ`; empty when no divisor was given for ξ.
    pub log_xi: Vec<f64>,
    /// Located preimages behind each counting column, labelled by component.
    pub zero_sets: Vec<(String, ZeroSet)>,
}

impl GrowthTable {
    pub fn column(&self, label: &str) -> Option<&[f64]> {
        self.order
            .iter()
            .chain(&self.counting)
            .chain(&self.proximity)
            .find(|c| c.label == label)
            .map(|c| c.values.as_slice())
    }

    /// Checks the table invariants: ascending grid from `r ≥ 1`, all `N`
    /// nonnegative and nondecreasing, and `T` of the positive bundles
    /// nondecreasing (within `tol`, relative).
    pub fn check_invariants(&self, tol: f64) -> Result<(), GrowthError> {
        check_grid(&self.radii)?;
        let monotone = |c: &Column| {
            c.values.windows(2).all(|w| w[1] >= w[0] - tol * w[1].abs().max(1.0)) && c.values.iter().all(|v| *v >= -tol)
        };
        for c in self.order.iter().filter(|c| !c.label.contains('-') && !c.label.ends_with(":K")) {
            if !monotone(c) {
                return Err(GrowthError::BadGrid(format!("{} is not nondecreasing", c.label)));
            }
        }
        for c in &self.counting {
            if !monotone(c) {
                return Err(GrowthError::BadGrid(format!("{} is not nondecreasing", c.label)));
            }
        }
        Ok(())
    }
}

/// What to compute for a [`GrowthTable`].
#[derive(Debug, Clone, Default)]
pub struct TableRequest {
    pub bundles: Vec<LineBundle>,
    /// Components paired with their truncation level.
    pub counting: Vec<(DivisorComponent, u32)>,
    pub proximity: Vec<DivisorComponent>,
    /// Divisor entering `ξ`; `None` skips the `log⁺ξ` column.
    pub xi_divisor: Option<DivisorSpec>,
}

/// Zeros of the pullback of `comp` in `|z| < r`.
pub fn pullback_zeros(curve: &CurveMap, comp: &DivisorComponent, r: f64) -> Result<ZeroSet, GrowthError> {
    let h = curve.pullback(comp)?.normalize();
    if h.as_const() == Some(Complex64::new(0.0, 0.0)) || is_identically_zero(&h) {
        return Err(GrowthError::CurveInDivisor(comp.label()));
    }
    Ok(locate_zeros(&h, Disc::centered(r * (1.0 + 1e-6))?)?)
}

fn is_identically_zero(h: &ExprAst) -> bool {
    let p = h.compile();
    crate::exprlang::probe_points().iter().all(|&z| {
        let (v, s) = p.eval_with_scale(z);
        v.norm() <= 1e-13 * s.max(f64::MIN_POSITIVE)
    })
}

/// Builds a [`GrowthTable`]; radii and components are spread over `exec`,
/// results are assembled in grid order.
pub fn compute_table<E: Executor>(
    curve: &CurveMap,
    request: &TableRequest,
    radii: &[f64],
    exec: &E,
) -> Result<GrowthTable, GrowthError> {
    check_grid(radii)?;
    let r_max = radii[radii.len() - 1];
    let mut order = Vec::new();
    if !request.bundles.is_empty() {
        let base = factor_orders(curve, radii, exec)?;
        for b in &request.bundles {
            order.push(Column { label: format!("T:{}", b.label()), values: combine(&b.weights(curve.target())?, &base) });
        }
    }

    let zero_sets = exec.map(request.counting.len(), &|i| pullback_zeros(curve, &request.counting[i].0, r_max));
    let mut counting = Vec::new();
    let mut sets: Vec<(String, ZeroSet)> = Vec::new();
    for ((comp, k), zs) in request.counting.iter().zip(zero_sets) {
        let zs = zs?;
        let values = radii.iter().map(|&r| counting_function(&zs, r, *k)).collect::<Result<Vec<_>, _>>()?;
        counting.push(Column { label: format!("N{k}:{}", comp.label()), values });
        let label = comp.label();
        if !sets.iter().any(|(l, _)| *l == label) {
            sets.push((label, zs));
        }
    }

    let np = request.proximity.len();
    let m = exec.map(np * radii.len(), &|i| proximity(curve, &request.proximity[i / radii.len()], radii[i % radii.len()]));
    let mut m = m.into_iter();
    let mut prox = Vec::new();
    for comp in &request.proximity {
        let values = (&mut m).take(radii.len()).collect::<Result<Vec<_>, _>>()?;
        prox.push(Column { label: format!("m:{}", comp.label()), values });
    }

    let log_xi = match &request.xi_divisor {
        Some(d) => exec.map(radii.len(), &|i| log_plus_xi_mean(curve, d, radii[i])).into_iter().collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };
    Ok(GrowthTable { radii: radii.to_vec(), order, counting, proximity: prox, log_xi, zero_sets: sets })
}

/// Allowance `c0 + c1 log r + c2 log⁺T` for the small error term, fitted
/// to the deficits of an inequality over a radius grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SfrModel {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Allowed exceptional fraction of the grid.
    pub eps: f64,
    /// Grid indices discarded as exceptional.
    pub exceptional: Vec<usize>,
}

impl SfrModel {
    pub fn zero(eps: f64) -> Self {
        SfrModel { c0: 0.0, c1: 0.0, c2: 0.0, eps, exceptional: Vec::new() }
    }

    pub fn allowance(&self, r: f64, t: f64) -> f64 {
        self.c0 + self.c1 * r.ln() + self.c2 * log_plus(t)
    }
}

fn log_plus(t: f64) -> f64 {
    if t > 1.0 {
        t.ln()
    } else {
        0.0
    }
}

/// Least squares with the given columns active; `None` when singular.
fn least_squares(x: &[[f64; 3]], d: &[f64], rows: &[usize], active: &[usize]) -> Option<[f64; 3]> {
    let k = active.len();
    let mut a = alloc::vec![alloc::vec![0.0; k]; k];
    let mut b = alloc::vec![0.0; k];
    let mut scale = 0.0f64;
    for &i in rows {
        for (p, &cp) in active.iter().enumerate() {
            b[p] += x[i][cp] * d[i];
            for (q, &cq) in active.iter().enumerate() {
                a[p][q] += x[i][cp] * x[i][cq];
            }
        }
    }
    for (p, row) in a.iter().enumerate() {
        scale = scale.max(row[p]);
    }
    // Reject near-collinear designs through a Gram determinant test.
    let gram = det(&a);
    let diag: f64 = (0..k).map(|p| a[p][p]).product();
    if !(scale > 0.0) || !(gram > 1e-12 * diag) {
        return None;
    }
    let sol = solve_real(a, b)?;
    let mut c = [0.0; 3];
    for (p, &cp) in active.iter().enumerate() {
        c[cp] = sol[p];
    }
    Some(c)
}

fn det(a: &[Vec<f64>]) -> f64 {
    match a.len() {
        1 => a[0][0],
        2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
        _ => {
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        }
    }
}

/// Best fit with `c1, c2 ≥ 0` by enumerating active sets.
fn constrained_fit(x: &[[f64; 3]], d: &[f64], rows: &[usize]) -> Result<[f64; 3], GrowthError> {
    // The intercept and log r columns must be independent.
    if least_squares(x, d, rows, &[0, 1]).is_none() {
        return Err(GrowthError::DegenerateDesign);
    }
    let mut best: Option<([f64; 3], f64)> = None;
    for active in [&[0usize, 1, 2][..], &[0, 1], &[0, 2], &[0]] {
        let Some(c) = least_squares(x, d, rows, active) else { continue };
        if c[1] < 0.0 || c[2] < 0.0 {
            continue;
        }
        let sse: f64 = rows.iter().map(|&i| (d[i] - dot(&c, &x[i])).powi(2)).sum();
        if best.as_ref().is_none_or(|(_, s)| sse < *s * (1.0 - 1e-12)) {
            best = Some((c, sse));
        }
    }
    best.map(|(c, _)| c).ok_or(GrowthError::DegenerateDesign)
}

fn dot(c: &[f64; 3], x: &[f64; 3]) -> f64 {
    c[0] * x[0] + c[1] * x[1] + c[2] * x[2]
}

/// Fits the allowance to the deficits `max(0, −margin)`:
/// constrained least squares against `(1, log r, log⁺T)`, the worst
/// `⌊eps·M⌋` radii discarded and refitted, then the intercept raised so
/// the model covers every retained deficit.
pub fn fit_sfr(radii: &[f64], t: &[f64], margins: &[f64], eps: f64) -> Result<SfrModel, GrowthError> {
    check_grid(radii)?;
    if t.len() != radii.len() || margins.len() != radii.len() {
        return Err(GrowthError::BadGrid(String::from("column lengths differ from the grid")));
    }
    if radii.len() < 8 {
        return Err(GrowthError::BadGrid(format!("{} radii, need at least 8", radii.len())));
    }
    if !(0.0..=0.1).contains(&eps) {
        return Err(GrowthError::BadEps(eps));
    }
    let d: Vec<f64> = margins.iter().map(|m| (-m).max(0.0)).collect();
    if d.iter().all(|v| *v == 0.0) {
        return Ok(SfrModel::zero(eps));
    }
    let x: Vec<[f64; 3]> = radii.iter().zip(t).map(|(r, t)| [1.0, r.ln(), log_plus(*t)]).collect();
    let all: Vec<usize> = (0..radii.len()).collect();
    let mut c = constrained_fit(&x, &d, &all)?;
    let drop = (eps * radii.len() as f64 + 1e-9).floor() as usize;
    let mut exceptional = Vec::new();
    if drop > 0 {
        let mut order = all.clone();
        order.sort_by(|&i, &j| {
            let (ri, rj) = (d[i] - dot(&c, &x[i]), d[j] - dot(&c, &x[j]));
            rj.total_cmp(&ri).then(j.cmp(&i))
        });
        exceptional = order[..drop].to_vec();
        exceptional.sort_unstable();
        let kept: Vec<usize> = all.iter().copied().filter(|i| !exceptional.contains(i)).collect();
        c = constrained_fit(&x, &d, &kept)?;
    }
    let lift = all
        .iter()
        .filter(|i| !exceptional.contains(i))
        .map(|&i| d[i] - dot(&c, &x[i]))
        .fold(0.0f64, f64::max);
    // Absorb rounding-level residuals of an exact fit.
    if lift > 1e-12 * (1.0 + d.iter().fold(0.0f64, |m, v| m.max(*v))) {
        c[0] += lift;
    }
    Ok(SfrModel { c0: c[0], c1: c[1], c2: c[2], eps, exceptional })
}

/// The growth summary used in reports: `T` of the reference bundle.
pub fn reference_order<E: Executor>(curve: &CurveMap, radii: &[f64], exec: &E) -> Result<Vec<f64>, GrowthError> {
    order_functions(curve, reference_bundle(curve.target()), radii, exec)
}

impl LineBundle {
    /// Parses `O(k)`, `O(a,b)` or `K`.
    pub fn parse(s: &str) -> Option<LineBundle> {
        let s = s.trim();
        if s == "K" {
            return Some(LineBundle::Canonical);
        }
        let inner = s.strip_prefix("O(")?.strip_suffix(')')?;
        let parts: Vec<&str> = inner.split(',').map(|p| p.trim()).collect();
        match parts.as_slice() {
            [k] => k.parse().ok().map(LineBundle::O),
            [a, b] => Some(LineBundle::Bi(a.parse().ok()?, b.parse().ok()?)),
            _ => None,
        }
    }
}

impl core::fmt::Display for LineBundle {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.label())
    }
}
