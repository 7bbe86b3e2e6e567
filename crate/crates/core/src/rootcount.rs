//! Zeros of entire functions by the argument principle.
//!
//! Winding numbers come from panel-adaptive Gauss–Kronrod quadrature of
//! `h'/h` along the circle. A panel is accepted only when its integral
//! matches the principal logarithm of `h(b)/h(a)`, which rules out a
//! missed turn of the argument inside the panel.
//!
//! Zeros are isolated by quadrisecting a bounding square; each square is
//! tested on its circumscribed disc. A square with winding `w` first tries
//! modified Newton (`z ← z − w·h/h'`); the limit is accepted once a tiny
//! disc around it carries the same winding. Otherwise the square is split
//! until its disc diameter is at most `1e-9`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::exprlang::{ExprAst, Program, MAX_VANISHING_ORDER};
use crate::numeric::pairwise_sum_c;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("disc radius must be positive and finite")]
    BadDisc,
    #[error("function is not entire")]
    NotEntire,
    #[error("winding number did not converge on |z - {center}| = {radius} ({nodes} nodes); zero on or near the contour")]
    NotConverged { center: Complex64, radius: f64, nodes: usize },
    #[error("{count} zeros in the disc exceed the limit {limit}")]
    TooManyZeros { count: i64, limit: i64 },
    #[error("zero cluster of multiplicity {multiplicity} near {location} exceeds the cap")]
    Cluster { location: Complex64, multiplicity: i64 },
    #[error("located multiplicities sum to {found} but the disc winds {expected} times")]
    Conservation { found: i64, expected: i64 },
    #[error("radius {t} exceeds the localized region of radius {radius}")]
    OutsideRegion { t: f64, radius: f64 },
    #[error("counting functions need r >= 1, got {0}")]
    RadiusBelowOne(f64),
    #[error("truncation level must be in 1..=16, got {0}")]
    BadLevel(u32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disc {
    pub center: Complex64,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: Complex64, radius: f64) -> Result<Self, RootError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(RootError::BadDisc);
        }
        Ok(Disc { center, radius })
    }

    pub fn centered(radius: f64) -> Result<Self, RootError> {
        Self::new(Complex64::new(0.0, 0.0), radius)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub location: Complex64,
    pub multiplicity: u32,
    /// Radius of the disc about `location` certified to hold the zero.
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    pub zeros: Vec<Zero>,
    pub disc: Disc,
}

impl ZeroSet {
    pub fn total_multiplicity(&self) -> i64 {
        self.zeros.iter().map(|z| z.multiplicity as i64).sum()
    }
}

/// Most zeros one `locate_zeros` call will isolate.
pub const MAX_ZEROS: i64 = 256;
const MAX_NODES: usize = 1 << 20;
const START_PANELS: usize = 32;
const LEAF_DIAMETER: f64 = 1e-9;
const MERGE_DISTANCE: f64 = 1e-8;
const JITTER_STEPS: usize = 8;
const PANEL_TOL: f64 = 1e-5;
/// Offset and enlargement of the bounding square, in units of the radius,
/// so that dyadic subdivision lines avoid round numbers such as 0 or 1/2.
const GRID_SHIFT: (f64, f64) = (0.003_141_59, 0.002_718_28);
const GRID_PAD: f64 = 1.01;

/// `h` together with its derivative, compiled once.
#[derive(Debug, Clone)]
pub struct Entire {
    prog: Program,
}

impl Entire {
    pub fn new(h: &ExprAst) -> Result<Self, RootError> {
        if !h.is_entire() {
            return Err(RootError::NotEntire);
        }
        Ok(Entire { prog: h.compile() })
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.prog.eval(z)
    }

    /// `(h(z), h'(z))`.
    #[inline]
    pub fn eval_d(&self, z: Complex64) -> (Complex64, Complex64) {
        let s = self.prog.series::<2>(z);
        (s.coeffs[0], s.coeffs[1])
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// `∫ h'/h dz` over the arc `θ ∈ [a, b]` by 15-point Kronrod.
fn arc_integral(h: &Entire, d: &Disc, a: f64, b: f64) -> Option<Complex64> {
    let c = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let term = |t: f64| -> Option<Complex64> {
        let e = Complex64::from_polar(1.0, t);
        let (v, dv) = h.eval_d(d.center + e * d.radius);
        let q = dv / v * e * Complex64::new(0.0, d.radius);
        q.is_finite().then_some(q)
    };
    let mut acc = term(c)? * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        acc += (term(c - dx)? + term(c + dx)?) * WGK[j];
    }
    Some(acc * half)
}

/// Raw `(1/2πi)∮ h'/h dz` on one circle, or `None` past the node budget.
fn contour_winding(h: &Entire, d: &Disc) -> Option<(f64, usize)> {
    let mut stack: Vec<(f64, f64, Complex64, Complex64)> = Vec::new();
    let step = 2.0 * PI / START_PANELS as f64;
    let point = |t: f64| h.eval(d.center + Complex64::from_polar(d.radius, t));
    let vals: Vec<Complex64> = (0..=START_PANELS).map(|k| point(step * k as f64)).collect();
    if vals.iter().any(|v| !v.is_finite() || v.norm() == 0.0) {
        return None;
    }
    for k in (0..START_PANELS).rev() {
        stack.push((step * k as f64, step * (k + 1) as f64, vals[k], vals[k + 1]));
    }
    let mut accepted: Vec<Complex64> = Vec::new();
    let mut nodes = START_PANELS;
    while let Some((a, b, ha, hb)) = stack.pop() {
        let ok = arc_integral(h, d, a, b).and_then(|q| {
            nodes += 15;
            let log_ratio = (hb / ha).ln();
            // The log ratios telescope to an exact multiple of 2πi; the
            // quadrature only certifies that no turn hides inside the panel.
            (log_ratio.im.abs() < 0.5 * PI && (q - log_ratio).norm() <= PANEL_TOL).then_some(q)
        });
        match ok {
            Some(q) => accepted.push(q),
            None => {
                if nodes > MAX_NODES || b - a < 1e-14 {
                    return None;
                }
                let m = 0.5 * (a + b);
                let hm = point(m);
                if !hm.is_finite() || hm.norm() == 0.0 {
                    return None;
                }
                nodes += 1;
                stack.push((m, b, hm, hb));
                stack.push((a, m, ha, hm));
            }
        }
    }
    let total = pairwise_sum_c(&accepted) / Complex64::new(0.0, 2.0 * PI);
    Some((total.re, nodes))
}

/// Winding on `d` with the deterministic jitter rule: the radius becomes
/// `radius·(1 + 1e-6·j)` for `j = 1, 2, …` until the integral converges
/// to an integer. Returns the winding and the radius actually used.
fn winding_jittered(h: &Entire, d: &Disc) -> Result<(i64, f64), RootError> {
    let mut nodes = 0;
    for j in 0..=JITTER_STEPS {
        let r = d.radius * (1.0 + 1e-6 * j as f64);
        if let Some((raw, n)) = contour_winding(h, &Disc { center: d.center, radius: r }) {
            let rounded = raw.round();
            if (raw - rounded).abs() < 0.1 {
                return Ok((rounded as i64, r));
            }
            nodes = n;
        } else {
            nodes = MAX_NODES;
        }
    }
    Err(RootError::NotConverged { center: d.center, radius: d.radius, nodes })
}

pub fn winding_number(h: &ExprAst, disc: Disc) -> Result<i64, RootError> {
    Disc::new(disc.center, disc.radius)?;
    Ok(winding_jittered(&Entire::new(h)?, &disc)?.0)
}

struct Search<'a> {
    h: &'a Entire,
    region: Disc,
    found: Vec<(Complex64, i64, f64)>,
}

impl Search<'_> {
    fn square(&mut self, center: Complex64, half: f64) -> Result<(), RootError> {
        // Prune squares that miss the target disc entirely.
        let dx = ((center.re - self.region.center.re).abs() - half).max(0.0);
        let dy = ((center.im - self.region.center.im).abs() - half).max(0.0);
        if dx * dx + dy * dy > self.region.radius * self.region.radius * (1.0 + 1e-5) {
            return Ok(());
        }
        let disc = Disc { center, radius: half * 2f64.sqrt() };
        let (w, _) = winding_jittered(self.h, &disc)?;
        if w == 0 {
            return Ok(());
        }
        if w <= MAX_VANISHING_ORDER as i64 {
            if let Some((z, rho)) = self.newton(center, disc.radius, w) {
                self.found.push((z, w, rho));
                return Ok(());
            }
        }
        if 2.0 * disc.radius <= LEAF_DIAMETER {
            if w > MAX_VANISHING_ORDER as i64 {
                return Err(RootError::Cluster { location: center, multiplicity: w });
            }
            self.found.push((center, w, disc.radius));
            return Ok(());
        }
        let q = 0.5 * half;
        for (sx, sy) in [(-1.0, 1.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] {
            self.square(center + Complex64::new(sx * q, sy * q), q)?;
        }
        Ok(())
    }

    /// Modified Newton from the square center; the limit must stay in the
    /// disc and be certified by a small disc of the same winding.
    fn newton(&self, start: Complex64, radius: f64, w: i64) -> Option<(Complex64, f64)> {
        let mut z = start;
        let mut converged = false;
        for _ in 0..60 {
            let (v, dv) = self.h.eval_d(z);
            if v.norm() == 0.0 {
                converged = true;
                break;
            }
            let step = v / dv * w as f64;
            if !step.is_finite() {
                return None;
            }
            z -= step;
            if (z - start).norm() > radius {
                return None;
            }
            if step.norm() <= 1e-15 * (1.0 + z.norm()) {
                converged = true;
                break;
            }
        }
        if !converged {
            return None;
        }
        let mut rho = 0.5 * LEAF_DIAMETER;
        while rho <= 1e-6 {
            if let Ok((wc, _)) = winding_jittered(self.h, &Disc { center: z, radius: rho }) {
                if wc == w {
                    return Some((z, rho));
                }
                if wc != 0 {
                    return None;
                }
            }
            rho *= 10.0;
        }
        None
    }
}

/// All zeros of `h` in `disc`, with multiplicities.
pub fn locate_zeros(h: &ExprAst, disc: Disc) -> Result<ZeroSet, RootError> {
    Disc::new(disc.center, disc.radius)?;
    let ent = Entire::new(h)?;
    let mut last_err = None;
    for attempt in 0..3 {
        let (total, radius) = winding_jittered(&ent, &Disc { center: disc.center, radius: disc.radius * (1.0 + 1e-6 * attempt as f64) })?;
        if total > MAX_ZEROS {
            return Err(RootError::TooManyZeros { count: total, limit: MAX_ZEROS });
        }
        let region = Disc { center: disc.center, radius };
        let mut search = Search { h: &ent, region, found: Vec::new() };
        if total > 0 {
            let shift = Complex64::new(GRID_SHIFT.0, GRID_SHIFT.1) * radius;
            search.square(disc.center + shift, radius * GRID_PAD)?;
        }
        // Merge duplicates from overlapping discs, keeping scan order.
        let mut zeros: Vec<Zero> = Vec::new();
        for (z, w, rho) in search.found {
            if (z - disc.center).norm() >= radius {
                continue;
            }
            if zeros.iter().any(|q| (q.location - z).norm() <= MERGE_DISTANCE.max(q.radius + rho)) {
                continue;
            }
            if w > MAX_VANISHING_ORDER as i64 {
                return Err(RootError::Cluster { location: z, multiplicity: w });
            }
            zeros.push(Zero { location: z, multiplicity: w as u32, radius: rho });
        }
        sort_canonical(&mut zeros);
        let found: i64 = zeros.iter().map(|z| z.multiplicity as i64).sum();
        if found == total {
            return Ok(ZeroSet { zeros, disc: Disc { center: disc.center, radius } });
        }
        last_err = Some(RootError::Conservation { found, expected: total });
    }
    Err(last_err.unwrap_or(RootError::BadDisc))
}

fn sort_canonical(zeros: &mut [Zero]) {
    zeros.sort_by(|a, b| {
        a.location
            .norm()
            .total_cmp(&b.location.norm())
            .then(a.location.arg().total_cmp(&b.location.arg()))
    });
}

fn check_level(k: u32) -> Result<(), RootError> {
    if (1..=MAX_VANISHING_ORDER as u32).contains(&k) {
        Ok(())
    } else {
        Err(RootError::BadLevel(k))
    }
}

/// `Σ_{|z_ν| < t} min(λ_ν, k)`.
pub fn n_trunc(zeros: &ZeroSet, t: f64, k: u32) -> Result<u64, RootError> {
    check_level(k)?;
    let reach = zeros.disc.radius - zeros.disc.center.norm();
    if t > reach * (1.0 + 1e-9) {
        return Err(RootError::OutsideRegion { t, radius: reach });
    }
    Ok(zeros
        .zeros
        .iter()
        .filter(|z| z.location.norm() < t)
        .map(|z| z.multiplicity.min(k) as u64)
        .sum())
}

/// `∫_1^r n_k(t) dt/t` in closed form; zeros in the closed unit disc
/// count from the base radius 1.
pub fn counting_function(zeros: &ZeroSet, r: f64, k: u32) -> Result<f64, RootError> {
    check_level(k)?;
    if !(r >= 1.0) {
        return Err(RootError::RadiusBelowOne(r));
    }
    let reach = zeros.disc.radius - zeros.disc.center.norm();
    if r > reach * (1.0 + 1e-9) {
        return Err(RootError::OutsideRegion { t: r, radius: reach });
    }
    let terms: Vec<f64> = zeros
        .zeros
        .iter()
        .filter(|z| z.location.norm() < r)
        .map(|z| z.multiplicity.min(k) as f64 * (r / z.location.norm().max(1.0)).ln())
        .collect();
    Ok(crate::numeric::pairwise_sum(&terms))
}
