//! Second-main-theorem inequalities evaluated over a radius grid, the
//! degeneracy probe, and the hypothesis checks for curves in `(P^1)^2`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::exec::Executor;
use crate::geometry::{
    general_position_check, is_totally_geodesic, Boundary, DivisorComponent, DivisorSpec, GeometryError, TargetSpace,
};
use crate::growth::{compute_table, fit_sfr, GrowthError, GrowthTable, LineBundle, SfrModel, TableRequest};
use crate::jets::{covariant_jets, CurveMap, JetError};
use crate::numeric::gcd;
use crate::numeric::linalg::{hermitian_eigen, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    /// `T(L(D)) + T(K) ≤ Σ N_n(D_i) + S`.
    Thm1_1,
    /// `q T(O(1)) + T(K) ≤ Σ N_n(H_i) + S` on `P^n`.
    Cartan,
    /// `T(O(m,n)) ≤ Σ N_2(D_i) + 2 Σ N_1(E_j) + S` on `(P^1)^2`.
    Smt7,
}

impl Theorem {
    pub fn id(&self) -> &'static str {
        match self {
            Theorem::Thm1_1 => "thm1_1",
            Theorem::Cartan => "cartan",
            Theorem::Smt7 => "smt7",
        }
    }

    pub fn from_id(s: &str) -> Option<Theorem> {
        match s {
            "thm1_1" => Some(Theorem::Thm1_1),
            "cartan" => Some(Theorem::Cartan),
            "smt7" => Some(Theorem::Smt7),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DegeneracyKind {
    Nondegenerate,
    /// `F^m G^n ≡ c`.
    FlatRelation { m: i32, n: i32, c: Complex64 },
    /// `Σ a_i g_i ≡ 0`.
    ProjectiveLinear(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyVerdict {
    pub kind: DegeneracyKind,
    /// Largest Hadamard-normalized `|W|` over the probe points.
    pub evidence: f64,
}

impl DegeneracyVerdict {
    pub fn is_degenerate(&self) -> bool {
        self.kind != DegeneracyKind::Nondegenerate
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            DegeneracyKind::Nondegenerate => format!("nondegenerate (max normalized |W| = {:.3e})", self.evidence),
            DegeneracyKind::FlatRelation { m, n, c } => {
                format!("contained in the torus coset x^{m} y^{n} = {c} (relation m={m}, n={n}, c={c})")
            }
            DegeneracyKind::ProjectiveLinear(a) => {
                let parts: Vec<String> = a.iter().map(|c| format!("{c}")).collect();
                format!("contained in the hyperplane with coefficients ({})", parts.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SmtError {
    #[error("hypothesis '{name}' fails: {detail}")]
    Hypothesis { name: String, detail: String, verdict: Option<DegeneracyVerdict> },
    #[error("degenerate, relation unresolved (max normalized |W| = {evidence:e})")]
    Unresolved { evidence: f64 },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl SmtError {
    fn hypothesis(name: &str, detail: String) -> Self {
        SmtError::Hypothesis { name: String::from(name), detail, verdict: None }
    }
}

const PROBES: usize = 64;
const DEGENERACY_THRESHOLD: f64 = 1e-8;
const RELATION_BOUND: i32 = 8;
const RELATION_TOL: f64 = 1e-10;
const LINEAR_TOL: f64 = 1e-10;

/// Probe points on two rings, clear of the real and imaginary axes.
pub fn degeneracy_probes() -> Vec<Complex64> {
    (0..PROBES)
        .map(|k| {
            let r = if k % 2 == 0 { 0.6 } else { 1.3 };
            Complex64::from_polar(r, 2.0 * PI * (k as f64 + 0.37) / PROBES as f64)
        })
        .collect()
}

/// `|det J| / Π(‖row_k‖ + ‖row_1‖^k)`; flat targets use the invariant
/// frame. The `‖row_1‖^k` term is the natural size of the k-th jet, so a
/// row that vanishes up to rounding cannot inflate the ratio.
fn normalized_wronskian(curve: &CurveMap, z: Complex64) -> Option<f64> {
    let frame = covariant_jets(curve, z, curve.target().dim()).ok()?;
    let rows = frame.flat_invariant_rows().unwrap_or_else(|| frame.rows.clone());
    let norms: Vec<f64> = rows.iter().map(|r| r.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()).collect();
    if norms.iter().any(|n| !n.is_finite()) {
        return None;
    }
    let mut scale = 1.0;
    for (k, n) in norms.iter().enumerate() {
        scale *= n + norms[0].powi(k as i32 + 1);
    }
    if scale == 0.0 {
        return Some(0.0);
    }
    let d = CMatrix::from_rows(&rows).determinant().norm() / scale;
    d.is_finite().then_some(d.min(1.0))
}

/// Decides `W ≡ 0` and, when it holds, names the relation behind it.
pub fn degeneracy_probe(curve: &CurveMap) -> Result<DegeneracyVerdict, SmtError> {
    let probes = degeneracy_probes();
    let evidence = probes.iter().filter_map(|&z| normalized_wronskian(curve, z)).fold(0.0f64, f64::max);
    if evidence > DEGENERACY_THRESHOLD {
        return Ok(DegeneracyVerdict { kind: DegeneracyKind::Nondegenerate, evidence });
    }
    let kind = match curve.target() {
        TargetSpace::P1xP1Flat => flat_relation(curve, &probes),
        _ => linear_relation(curve, &probes),
    };
    kind.map(|kind| DegeneracyVerdict { kind, evidence }).ok_or(SmtError::Unresolved { evidence })
}

fn flat_relation(curve: &CurveMap, probes: &[Complex64]) -> Option<DegeneracyKind> {
    let (f, g) = (&curve.components()[0], &curve.components()[1]);
    let vals: Vec<(Complex64, Complex64)> = probes
        .iter()
        .map(|&z| (f.eval(z), g.eval(z)))
        .filter(|(a, b)| a.is_finite() && b.is_finite() && a.norm() > 0.0 && b.norm() > 0.0)
        .collect();
    if vals.len() < 8 {
        return None;
    }
    for s in 1..=RELATION_BOUND {
        for m in 0..=s {
            for n in -s..=s {
                if m.abs().max(n.abs()) != s || (m == 0 && n <= 0) || gcd(m as i64, n as i64) != 1 {
                    continue;
                }
                let prod: Vec<Complex64> = vals.iter().map(|(a, b)| a.powi(m) * b.powi(n)).collect();
                let c = prod.iter().sum::<Complex64>() / prod.len() as f64;
                if c.norm() > 0.0 && prod.iter().all(|p| (p - c).norm() <= RELATION_TOL * c.norm()) {
                    return Some(DegeneracyKind::FlatRelation { m, n, c: clean(c) });
                }
            }
        }
    }
    None
}

/// Null vector of the probe matrix `[g(z_j)/‖g(z_j)‖]`.
fn linear_relation(curve: &CurveMap, probes: &[Complex64]) -> Option<DegeneracyKind> {
    let rows: Vec<Vec<Complex64>> = probes
        .iter()
        .map(|&z| curve.homogeneous(z))
        .filter_map(|h| {
            let n: f64 = h.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            (n > 0.0 && n.is_finite()).then(|| h.iter().map(|c| *c / n).collect())
        })
        .collect();
    let dim = rows.first()?.len();
    let mut gram = CMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            let v: Complex64 = rows.iter().map(|r| r[i].conj() * r[j]).sum();
            gram.set(i, j, v);
        }
    }
    let (_, vecs) = hermitian_eigen(&gram);
    let a = &vecs[0];
    let residual = rows
        .iter()
        .map(|r| r.iter().zip(a).map(|(x, y)| *x * *y).sum::<Complex64>().norm())
        .fold(0.0f64, f64::max);
    if residual > LINEAR_TOL {
        return None;
    }
    let big = a.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let lead = *a.iter().find(|c| c.norm() > 1e-6 * big)?;
    Some(DegeneracyKind::ProjectiveLinear(a.iter().map(|c| clean(*c / lead)).collect()))
}

/// Rounds parts within 1e-12 of an integer, so exact relations print exactly.
fn clean(c: Complex64) -> Complex64 {
    let snap = |x: f64| if (x - x.round()).abs() <= 1e-12 * x.abs().max(1.0) { x.round() } else { x };
    Complex64::new(snap(c.re), snap(c.im))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisStatus {
    Verified,
    /// Checked on a finite sample only.
    Sampled,
    Assumed,
    Failed,
}

impl HypothesisStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            HypothesisStatus::Verified => "verified",
            HypothesisStatus::Sampled => "sampled, not proven",
            HypothesisStatus::Assumed => "assumed",
            HypothesisStatus::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub name: String,
    pub status: HypothesisStatus,
    pub detail: String,
}

impl Hypothesis {
    fn new(name: &str, status: HypothesisStatus, detail: String) -> Self {
        Hypothesis { name: String::from(name), status, detail }
    }
}

/// An extra inequality reported alongside the main one (not part of the
/// verdict).
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedRow {
    pub label: String,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub margin: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmtReport {
    pub theorem: Theorem,
    pub radii: Vec<f64>,
    pub lhs: Vec<f64>,
    /// Counting side plus allowance.
    pub rhs: Vec<f64>,
    /// `rhs − lhs`.
    pub margin: Vec<f64>,
    pub allowance: Vec<f64>,
    pub pass: Vec<bool>,
    /// Grid indices treated as exceptional.
    pub exceptional: Vec<usize>,
    pub model: SfrModel,
    /// `T` of the reference bundle, the growth the allowance is compared to.
    pub growth: Vec<f64>,
    /// `allowance / T` at the largest radius.
    pub smallness: f64,
    pub verdict: bool,
    pub hypotheses: Vec<Hypothesis>,
    pub derived: Vec<DerivedRow>,
    pub warnings: Vec<String>,
    pub table: GrowthTable,
}

/// Knobs shared by the report builders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmtSettings {
    /// Exceptional fraction of the grid.
    pub eps: f64,
    /// Largest admissible `allowance / T` at the top of the grid.
    pub sfr_ratio: f64,
    /// Also tabulate circle means of `log⁺ξ`.
    pub log_xi: bool,
    /// Also tabulate proximity functions of the divisor components.
    pub proximity: bool,
}

impl Default for SmtSettings {
    fn default() -> Self {
        SmtSettings { eps: 0.05, sfr_ratio: 0.2, log_xi: true, proximity: true }
    }
}

const PASS_ROUNDOFF: f64 = 1e-12;

fn require_nondegenerate(curve: &CurveMap, hyps: &mut Vec<Hypothesis>) -> Result<(), SmtError> {
    let v = degeneracy_probe(curve)?;
    if v.is_degenerate() {
        return Err(SmtError::Hypothesis {
            name: String::from("degeneracy"),
            detail: v.describe(),
            verdict: Some(v),
        });
    }
    hyps.push(Hypothesis::new("degeneracy", HypothesisStatus::Verified, v.describe()));
    Ok(())
}

fn subharmonic_hypothesis(target: TargetSpace) -> Hypothesis {
    match target {
        TargetSpace::ProjectiveFS(_) => Hypothesis::new(
            "log|W| subharmonic",
            HypothesisStatus::Verified,
            String::from("the Fubini–Study Wronskian is holomorphic"),
        ),
        TargetSpace::P1xP1Flat => Hypothesis::new(
            "log|W| subharmonic",
            HypothesisStatus::Verified,
            String::from("W = (u'v'' − u''v')·F·G with u = log F, v = log G is meromorphic"),
        ),
        TargetSpace::BallBergman(_) => {
            Hypothesis::new("log|W| subharmonic", HypothesisStatus::Assumed, String::from("not certified"))
        }
    }
}

fn geodesy(target: TargetSpace, d: &DivisorSpec, hyps: &mut Vec<Hypothesis>) -> Result<(), SmtError> {
    for c in &d.components {
        match is_totally_geodesic(target, c) {
            Ok(true) => {}
            Ok(false) => return Err(SmtError::hypothesis("geodesy", format!("{} is not totally geodesic", c.label()))),
            Err(e) => return Err(SmtError::hypothesis("geodesy", format!("{}: {e}", c.label()))),
        }
    }
    hyps.push(Hypothesis::new(
        "geodesy",
        HypothesisStatus::Verified,
        String::from("linear subspaces, torus cosets and boundary divisors are totally geodesic"),
    ));
    Ok(())
}

/// Pairwise transversality of the implemented component types.
fn snc(d: &DivisorSpec) -> Result<String, String> {
    let hs = d.hyperplanes();
    if !hs.is_empty() && !general_position_check(&hs).map_err(|e| format!("{e}"))? {
        return Err(String::from("hyperplanes are not in general position"));
    }
    let tori: Vec<(i32, i32, String)> = d
        .components
        .iter()
        .filter_map(|c| match c {
            DivisorComponent::TorusCurve { m, n, .. } => Some((*m, *n, c.label())),
            _ => None,
        })
        .collect();
    for i in 0..tori.len() {
        for j in 0..i {
            let (a, b) = (&tori[i], &tori[j]);
            if a.0 * b.1 == a.1 * b.0 {
                return Err(format!("{} and {} have proportional exponents", b.2, a.2));
            }
        }
    }
    Ok(format!("{} hyperplanes in general position, {} torus curves with pairwise independent exponents", hs.len(), tori.len()))
}

fn dedup(bundles: Vec<LineBundle>) -> Vec<LineBundle> {
    let mut out: Vec<LineBundle> = Vec::new();
    for b in bundles {
        if !out.contains(&b) {
            out.push(b);
        }
    }
    out
}

fn column<'a>(table: &'a GrowthTable, label: &str) -> Result<&'a [f64], SmtError> {
    table.column(label).ok_or_else(|| SmtError::Invalid(format!("missing column {label}")))
}

fn sum_columns(table: &GrowthTable, labels: &[(String, f64)]) -> Result<Vec<f64>, SmtError> {
    let mut acc = vec![0.0; table.radii.len()];
    for (l, w) in labels {
        for (a, v) in acc.iter_mut().zip(column(table, l)?) {
            *a += w * v;
        }
    }
    Ok(acc)
}

struct Assembly {
    theorem: Theorem,
    lhs: Vec<f64>,
    counting: Vec<f64>,
    growth: Vec<f64>,
    hypotheses: Vec<Hypothesis>,
    warnings: Vec<String>,
    derived: Vec<(String, Vec<f64>, Vec<f64>)>,
}

fn assemble(a: Assembly, table: GrowthTable, settings: &SmtSettings) -> Result<SmtReport, SmtError> {
    let radii = table.radii.clone();
    let raw: Vec<f64> = a.counting.iter().zip(&a.lhs).map(|(c, l)| c - l).collect();
    let model = fit_sfr(&radii, &a.growth, &raw, settings.eps)?;
    let allowance: Vec<f64> = radii.iter().zip(&a.growth).map(|(r, t)| model.allowance(*r, *t)).collect();
    let rhs: Vec<f64> = a.counting.iter().zip(&allowance).map(|(c, s)| c + s).collect();
    let margin: Vec<f64> = rhs.iter().zip(&a.lhs).map(|(r, l)| r - l).collect();
    let pass: Vec<bool> = margin
        .iter()
        .zip(a.lhs.iter().zip(&rhs))
        .map(|(m, (l, r))| *m >= -PASS_ROUNDOFF * (1.0 + l.abs() + r.abs()))
        .collect();
    let last = radii.len() - 1;
    let smallness = if a.growth[last] > 0.0 {
        allowance[last] / a.growth[last]
    } else if allowance[last] == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    let verdict =
        pass.iter().enumerate().all(|(i, p)| *p || model.exceptional.contains(&i)) && smallness <= settings.sfr_ratio;
    let derived = a
        .derived
        .into_iter()
        .map(|(label, lhs, counting)| {
            let rhs: Vec<f64> = counting.iter().zip(&allowance).map(|(c, s)| c + s).collect();
            let margin = rhs.iter().zip(&lhs).map(|(r, l)| r - l).collect();
            DerivedRow { label, lhs, rhs, margin }
        })
        .collect();
    Ok(SmtReport {
        theorem: a.theorem,
        radii,
        lhs: a.lhs,
        rhs,
        margin,
        allowance,
        pass,
        exceptional: model.exceptional.clone(),
        model,
        growth: a.growth,
        smallness,
        verdict,
        hypotheses: a.hypotheses,
        derived,
        warnings: a.warnings,
        table,
    })
}

fn request(bundles: Vec<LineBundle>, counting: Vec<(DivisorComponent, u32)>, d: &DivisorSpec, s: &SmtSettings) -> TableRequest {
    TableRequest {
        bundles: dedup(bundles),
        counting,
        proximity: if s.proximity { d.components.clone() } else { Vec::new() },
        xi_divisor: s.log_xi.then(|| d.clone()),
    }
}

fn t_label(b: LineBundle) -> String {
    format!("T:{}", b.label())
}

/// `L(D)` for a divisor on `P^n` or `(P^1)^2`.
fn divisor_bundle(d: &DivisorSpec) -> Result<LineBundle, SmtError> {
    match d.target {
        TargetSpace::ProjectiveFS(_) => Ok(LineBundle::O(d.components.len() as i32)),
        TargetSpace::P1xP1Flat => {
            let (a, b) = d
                .components
                .iter()
                .filter_map(|c| c.bidegree())
                .fold((0u32, 0u32), |(a, b), (x, y)| (a + x, b + y));
            Ok(LineBundle::Bi(a as i32, b as i32))
        }
        TargetSpace::BallBergman(_) => Err(SmtError::Invalid(String::from("no line bundle model on the ball"))),
    }
}

/// The general form `T(L(D)) + T(K) ≤ Σ N_n(D_i) + S`.
pub fn check_general<E: Executor>(
    curve: &CurveMap,
    divisors: &DivisorSpec,
    radii: &[f64],
    settings: &SmtSettings,
    exec: &E,
) -> Result<SmtReport, SmtError> {
    let target = curve.target();
    if divisors.target != target {
        return Err(GeometryError::Mismatch(String::from("divisor and curve have different targets")).into());
    }
    let mut hyps = vec![subharmonic_hypothesis(target)];
    require_nondegenerate(curve, &mut hyps)?;
    geodesy(target, divisors, &mut hyps)?;
    match snc(divisors) {
        Ok(detail) => hyps.push(Hypothesis::new("snc", HypothesisStatus::Verified, detail)),
        Err(detail) => return Err(SmtError::hypothesis("snc", detail)),
    }
    let n = target.dim() as u32;
    let ld = divisor_bundle(divisors)?;
    let reference = crate::growth::reference_bundle(target);
    let counting: Vec<(DivisorComponent, u32)> = divisors.components.iter().map(|c| (c.clone(), n)).collect();
    let req = request(vec![ld, LineBundle::Canonical, reference], counting, divisors, settings);
    let table = compute_table(curve, &req, radii, exec)?;
    let lhs = sum_columns(&table, &[(t_label(ld), 1.0), (t_label(LineBundle::Canonical), 1.0)])?;
    let labels: Vec<(String, f64)> = divisors.components.iter().map(|c| (format!("N{n}:{}", c.label()), 1.0)).collect();
    let counting = sum_columns(&table, &labels)?;
    let growth = column(&table, &t_label(reference))?.to_vec();
    let a = Assembly {
        theorem: Theorem::Thm1_1,
        lhs,
        counting,
        growth,
        hypotheses: hyps,
        warnings: divisors.notes.clone(),
        derived: Vec::new(),
    };
    assemble(a, table, settings)
}

/// Cartan's form on `P^n`: `(q − n − 1) T(O(1)) ≤ Σ N_n(H_i) + S`.
pub fn check_cartan<E: Executor>(
    curve: &CurveMap,
    hyperplanes: &[Vec<Complex64>],
    radii: &[f64],
    settings: &SmtSettings,
    exec: &E,
) -> Result<SmtReport, SmtError> {
    let TargetSpace::ProjectiveFS(n) = curve.target() else {
        return Err(SmtError::Invalid(String::from("Cartan's inequality needs a curve in P^n")));
    };
    let mut warnings = Vec::new();
    if n > 3 {
        warnings.push(format!("n = {n} lies outside the range 1 <= n <= 3 of the stated corollary; proceeding"));
    }
    let mut hyps = vec![subharmonic_hypothesis(curve.target())];
    if !general_position_check(hyperplanes)? {
        return Err(SmtError::hypothesis("general_position", String::from("hyperplanes are not in general position")));
    }
    hyps.push(Hypothesis::new(
        "general_position",
        HypothesisStatus::Verified,
        format!("{} hyperplanes, every {} of them independent", hyperplanes.len(), (n + 1).min(hyperplanes.len())),
    ));
    require_nondegenerate(curve, &mut hyps)?;
    let comps: Vec<DivisorComponent> = hyperplanes.iter().cloned().map(DivisorComponent::Hyperplane).collect();
    let divisors = DivisorSpec::new(curve.target(), comps)?;
    let q = hyperplanes.len() as f64;
    let counting: Vec<(DivisorComponent, u32)> = divisors.components.iter().map(|c| (c.clone(), n as u32)).collect();
    let req = request(vec![LineBundle::O(1)], counting, &divisors, settings);
    let table = compute_table(curve, &req, radii, exec)?;
    let t = column(&table, &t_label(LineBundle::O(1)))?.to_vec();
    let lhs: Vec<f64> = t.iter().map(|v| (q - n as f64 - 1.0) * v).collect();
    let labels: Vec<(String, f64)> = divisors.components.iter().map(|c| (format!("N{n}:{}", c.label()), 1.0)).collect();
    let counting = sum_columns(&table, &labels)?;
    let a = Assembly { theorem: Theorem::Cartan, lhs, counting, growth: t, hypotheses: hyps, warnings, derived: Vec::new() };
    assemble(a, table, settings)
}

/// The four points where the boundary lines `x, y ∈ {0, ∞}` cross.
pub const CROSSING_POINTS: [(Boundary, Boundary); 4] = [
    (Boundary::XZero, Boundary::YZero),
    (Boundary::XZero, Boundary::YInfinity),
    (Boundary::XInfinity, Boundary::YZero),
    (Boundary::XInfinity, Boundary::YInfinity),
];

/// Smallest chordal distance allowed between the curve and the crossing
/// points in the sampled check of condition (iii).
pub const CROSSING_CLEARANCE: f64 = 0.05;
const SAMPLE_RADIAL: usize = 100;
const SAMPLE_ANGULAR: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Smt7Conditions {
    pub snc: bool,
    pub snc_detail: String,
    pub geodesic: bool,
    /// Smallest sampled distance to the crossing points, and where.
    pub min_distance: f64,
    pub nearest_point: usize,
    pub nearest_z: Complex64,
    pub certificate_radius: f64,
    pub grid: (usize, usize),
}

impl Smt7Conditions {
    pub fn clearance_ok(&self) -> bool {
        self.min_distance > CROSSING_CLEARANCE
    }

    pub fn passed(&self) -> bool {
        self.snc && self.geodesic && self.clearance_ok()
    }

    pub fn hypotheses(&self) -> Vec<Hypothesis> {
        let st = |ok: bool, good: HypothesisStatus| if ok { good } else { HypothesisStatus::Failed };
        vec![
            Hypothesis::new("snc", st(self.snc, HypothesisStatus::Verified), self.snc_detail.clone()),
            Hypothesis::new(
                "geodesy",
                st(self.geodesic, HypothesisStatus::Verified),
                String::from("torus cosets are totally geodesic"),
            ),
            Hypothesis::new(
                "crossing_clearance",
                st(self.clearance_ok(), HypothesisStatus::Sampled),
                format!(
                    "min chordal distance {:.6} to P{} (at z = {:.4}) over a {}x{} polar grid of |z| <= {}; threshold {}",
                    self.min_distance,
                    self.nearest_point + 1,
                    self.nearest_z,
                    self.grid.0,
                    self.grid.1,
                    self.certificate_radius,
                    CROSSING_CLEARANCE
                ),
            ),
        ]
    }
}

/// Chordal distance on `P^1` from `[h0 : h1]` to `0` (`zero = true`) or `∞`.
fn chordal_to(h0: Complex64, h1: Complex64, zero: bool) -> f64 {
    let n = (h0.norm_sqr() + h1.norm_sqr()).sqrt();
    if zero {
        h1.norm() / n
    } else {
        h0.norm() / n
    }
}

/// Distance in `(P^1)^2` from `f(z)` to each crossing point.
pub fn crossing_distances(curve: &CurveMap, z: Complex64) -> [f64; 4] {
    let h = curve.homogeneous(z);
    let mut out = [0.0; 4];
    for (k, (bx, by)) in CROSSING_POINTS.iter().enumerate() {
        let dx = chordal_to(h[0], h[1], *bx == Boundary::XZero);
        let dy = chordal_to(h[2], h[3], *by == Boundary::YZero);
        out[k] = (dx * dx + dy * dy).sqrt();
    }
    out
}

/// The hypotheses of the `(P^1)^2` theorem: transversality, geodesy, and a
/// sampled certificate that the curve stays away from the crossing points
/// on `|z| ≤ r_max`.
pub fn condition_check_smt7(curve: &CurveMap, d: &DivisorSpec, r_max: f64) -> Smt7Conditions {
    let (snc_ok, snc_detail) = match snc(d) {
        Ok(s) => (true, s),
        Err(s) => (false, s),
    };
    let geodesic = d.components.iter().all(|c| matches!(is_totally_geodesic(d.target, c), Ok(true)));
    let mut best = (f64::INFINITY, 0usize, Complex64::new(0.0, 0.0));
    for i in 0..SAMPLE_RADIAL {
        let r = r_max * i as f64 / (SAMPLE_RADIAL - 1) as f64;
        for j in 0..SAMPLE_ANGULAR {
            let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / SAMPLE_ANGULAR as f64);
            for (k, dist) in crossing_distances(curve, z).iter().enumerate() {
                if dist.is_finite() && *dist < best.0 {
                    best = (*dist, k, z);
                }
            }
        }
    }
    Smt7Conditions {
        snc: snc_ok,
        snc_detail,
        geodesic,
        min_distance: best.0,
        nearest_point: best.1,
        nearest_z: best.2,
        certificate_radius: r_max,
        grid: (SAMPLE_RADIAL, SAMPLE_ANGULAR),
    }
}

/// `T(O(m,n)) ≤ Σ N_2(D_i) + 2 Σ N_1(E_j) + S` on `(P^1)^2`, with the
/// weaker `T(O(m−4, n−4)) ≤ Σ N_2(D_i) + S` as a derived row.
pub fn check_smt7<E: Executor>(
    curve: &CurveMap,
    d: &DivisorSpec,
    radii: &[f64],
    settings: &SmtSettings,
    exec: &E,
) -> Result<SmtReport, SmtError> {
    if curve.target() != TargetSpace::P1xP1Flat || d.target != TargetSpace::P1xP1Flat {
        return Err(SmtError::Invalid(String::from("this inequality needs a curve and divisor in (P^1)^2")));
    }
    if d.components.is_empty() || d.components.iter().any(|c| !matches!(c, DivisorComponent::TorusCurve { .. })) {
        return Err(SmtError::Invalid(String::from("D must consist of torus curves x^m y^n = c")));
    }
    let mut hyps = vec![subharmonic_hypothesis(TargetSpace::P1xP1Flat)];
    require_nondegenerate(curve, &mut hyps)?;
    let r_max = radii.last().copied().unwrap_or(1.0);
    let cond = condition_check_smt7(curve, d, r_max);
    for h in cond.hypotheses() {
        if h.status == HypothesisStatus::Failed {
            return Err(SmtError::hypothesis(&h.name, h.detail));
        }
        hyps.push(h);
    }
    let (m, n) = d.torus_bidegree();
    let (m, n) = (m as i32, n as i32);
    let main = LineBundle::Bi(m, n);
    let weak = LineBundle::Bi(m - 4, n - 4);
    let reference = LineBundle::Bi(1, 1);
    let mut counting: Vec<(DivisorComponent, u32)> = d.components.iter().map(|c| (c.clone(), 2)).collect();
    counting.extend(Boundary::ALL.iter().map(|b| (DivisorComponent::Boundary(*b), 1)));
    let req = request(vec![main, reference, weak], counting, d, settings);
    let table = compute_table(curve, &req, radii, exec)?;
    let lhs = column(&table, &t_label(main))?.to_vec();
    let mut labels: Vec<(String, f64)> = d.components.iter().map(|c| (format!("N2:{}", c.label()), 1.0)).collect();
    let d_only = sum_columns(&table, &labels)?;
    labels.extend(Boundary::ALL.iter().map(|b| (format!("N1:{}", b.label()), 2.0)));
    let counting = sum_columns(&table, &labels)?;
    let growth = column(&table, &t_label(reference))?.to_vec();
    let weak_lhs = column(&table, &t_label(weak))?.to_vec();
    let a = Assembly {
        theorem: Theorem::Smt7,
        lhs,
        counting,
        growth,
        hypotheses: hyps,
        warnings: d.notes.clone(),
        derived: vec![(format!("T:{} <= sum N2 + S", weak.label()), weak_lhs, d_only)],
    };
    assemble(a, table, settings)
}
