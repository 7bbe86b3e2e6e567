//! Quadrature: doubling trapezoid rules on circles and adaptive
//! Gauss–Kronrod on intervals.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use super::pairwise_sum;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum QuadError {
    #[error("quadrature did not converge with {nodes} nodes (last change {change:e})")]
    NotConverged { nodes: usize, change: f64 },
    #[error("integrand is not finite at more than half of the nodes")]
    Singular,
}

/// Settings for [`circle_mean`].
#[derive(Debug, Clone, Copy)]
pub struct CircleRule {
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for CircleRule {
    fn default() -> Self {
        CircleRule { min_nodes: 64, max_nodes: 1 << 20, rel_tol: 1e-9, abs_tol: 1e-11 }
    }
}

impl CircleRule {
    /// Raises the starting node count so that features of angular width
    /// `~1/radius` are resolved from the first level.
    pub fn for_radius(radius: f64) -> Self {
        let want = (16.0 * radius.max(1.0)) as usize;
        CircleRule { min_nodes: want.next_power_of_two().max(64), ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleMean {
    pub value: f64,
    pub nodes: usize,
    /// Nodes whose value was unavailable and replaced by a refined average.
    pub excluded: usize,
}

/// Mean of `f(θ)` over `θ ∈ [0, 2π)` by the periodic trapezoid rule,
/// doubling the node count until two successive levels agree twice in a
/// row.
///
/// `f` returns `None` at nodes where the integrand cannot be evaluated
/// (singular points of an integrable singularity). Such a node is replaced
/// by the average of the valid values at `θ ± h/4`, one level of local
/// refinement on each side.
pub fn circle_mean<F>(f: F, rule: CircleRule) -> Result<CircleMean, QuadError>
where
    F: Fn(f64) -> Option<f64>,
{
    let mut n = rule.min_nodes.max(4).next_power_of_two();
    let mut raw: Vec<Option<f64>> = (0..n).map(|k| f(2.0 * PI * k as f64 / n as f64)).collect();
    let mut prev: Option<f64> = None;
    let mut agreed = 0;
    loop {
        let (value, excluded) = level_mean(&f, &raw)?;
        if let Some(p) = prev {
            let change = (value - p).abs();
            if change <= rule.abs_tol.max(rule.rel_tol * value.abs()) {
                agreed += 1;
                if agreed >= 2 {
                    return Ok(CircleMean { value, nodes: n, excluded });
                }
            } else {
                agreed = 0;
            }
            if 2 * n > rule.max_nodes {
                return Err(QuadError::NotConverged { nodes: n, change });
            }
        }
        prev = Some(value);
        // Interleave the new odd nodes.
        let mut next = Vec::with_capacity(2 * n);
        for (k, v) in raw.iter().enumerate() {
            next.push(*v);
            next.push(f(2.0 * PI * (2 * k + 1) as f64 / (2 * n) as f64));
        }
        raw = next;
        n *= 2;
    }
}

fn level_mean<F>(f: &F, raw: &[Option<f64>]) -> Result<(f64, usize), QuadError>
where
    F: Fn(f64) -> Option<f64>,
{
    let n = raw.len();
    let h = 2.0 * PI / n as f64;
    let mut excluded = 0;
    let mut vals = Vec::with_capacity(n);
    for (k, v) in raw.iter().enumerate() {
        match v {
            Some(x) if x.is_finite() => vals.push(*x),
            _ => {
                excluded += 1;
                let theta = h * k as f64;
                let side: Vec<f64> = [theta - 0.25 * h, theta + 0.25 * h]
                    .iter()
                    .filter_map(|&t| f(t))
                    .filter(|x| x.is_finite())
                    .collect();
                let s = if side.is_empty() { 0.0 } else { pairwise_sum(&side) / side.len() as f64 };
                vals.push(s);
            }
        }
    }
    if 2 * excluded > n {
        return Err(QuadError::Singular);
    }
    Ok((pairwise_sum(&vals) / n as f64, excluded))
}

// Gauss–Kronrod 7/15 nodes and weights on [-1, 1], as tabulated.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One 15-point Kronrod panel: (estimates, error estimate).
fn gk15<const K: usize, F, E>(f: &F, a: f64, b: f64) -> Result<([f64; K], f64), E>
where
    F: Fn(f64) -> Result<[f64; K], E>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = [0.0; K];
    let mut gauss = [0.0; K];
    for i in 0..K {
        kron[i] = fc[i] * WGK[7];
        gauss[i] = fc[i] * WG[3];
    }
    for j in 0..7 {
        let dx = h * XGK[j];
        let (lo, hi) = (f(c - dx)?, f(c + dx)?);
        for i in 0..K {
            let s = lo[i] + hi[i];
            kron[i] += WGK[j] * s;
            if j % 2 == 1 {
                gauss[i] += WG[j / 2] * s;
            }
        }
    }
    let mut err = 0.0f64;
    for i in 0..K {
        err = err.max(((kron[i] - gauss[i]) * h).abs());
        kron[i] *= h;
    }
    Ok((kron, err))
}

#[derive(Debug, Clone, Copy)]
pub struct IntervalRule {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
    /// Uniform panels to start from.
    pub initial_panels: usize,
}

impl Default for IntervalRule {
    fn default() -> Self {
        IntervalRule { rel_tol: 1e-10, abs_tol: 1e-12, max_panels: 4096, initial_panels: 1 }
    }
}

/// Adaptive Gauss–Kronrod integral of `f` over `[a, b]`.
pub fn integrate<F, E>(f: F, a: f64, b: f64, rule: IntervalRule) -> Result<f64, E>
where
    F: Fn(f64) -> Result<f64, E>,
    E: From<QuadError>,
{
    Ok(integrate_vec(|x| f(x).map(|v| [v]), a, b, rule)?[0])
}

struct Panel<const K: usize> {
    a: f64,
    b: f64,
    val: [f64; K],
    err: f64,
    live: bool,
}

/// Heap key: largest error first, ties to the earliest panel.
#[derive(PartialEq)]
struct Key(f64, usize);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.0.total_cmp(&other.0).then(other.1.cmp(&self.1))
    }
}

/// Exact totals over the live panels, summed pairwise in position order.
fn totals<const K: usize>(panels: &[Panel<K>]) -> ([f64; K], f64) {
    let mut live: Vec<&Panel<K>> = panels.iter().filter(|p| p.live).collect();
    live.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut val = [0.0; K];
    for (i, v) in val.iter_mut().enumerate() {
        let xs: Vec<f64> = live.iter().map(|p| p.val[i]).collect();
        *v = pairwise_sum(&xs);
    }
    let errs: Vec<f64> = live.iter().map(|p| p.err).collect();
    (val, pairwise_sum(&errs))
}

/// Adaptive Gauss–Kronrod integral of a vector-valued `f` sharing one
/// panel tree; the tolerance applies to every component.
///
/// Panels are bisected in deterministic order (largest error first, ties
/// by creation order) until the summed error estimate meets the
/// tolerance; the result is summed pairwise in position order.
pub fn integrate_vec<const K: usize, F, E>(f: F, a: f64, b: f64, rule: IntervalRule) -> Result<[f64; K], E>
where
    F: Fn(f64) -> Result<[f64; K], E>,
    E: From<QuadError>,
{
    if a == b {
        return Ok([0.0; K]);
    }
    let n0 = rule.initial_panels.max(1);
    let mut panels: Vec<Panel<K>> = Vec::with_capacity(2 * n0);
    let mut heap = BinaryHeap::new();
    for i in 0..n0 {
        let lo = a + (b - a) * i as f64 / n0 as f64;
        let hi = if i + 1 == n0 { b } else { a + (b - a) * (i + 1) as f64 / n0 as f64 };
        let (val, err) = gk15(&f, lo, hi)?;
        heap.push(Key(err, panels.len()));
        panels.push(Panel { a: lo, b: hi, val, err, live: true });
    }
    let (mut val, mut err) = totals(&panels);
    let mut live = n0;
    let mut splits = 0usize;
    loop {
        let scale = val.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if err <= rule.abs_tol.max(rule.rel_tol * scale) {
            // Confirm with exact sums before accepting.
            let (v, e) = totals(&panels);
            if e <= rule.abs_tol.max(rule.rel_tol * v.iter().fold(0.0f64, |m, x| m.max(x.abs()))) {
                return Ok(v);
            }
            (val, err) = (v, e);
            continue;
        }
        if live >= rule.max_panels {
            return Err(QuadError::NotConverged { nodes: live * 15, change: err }.into());
        }
        let Some(Key(_, id)) = heap.pop() else {
            return Err(QuadError::NotConverged { nodes: live * 15, change: err }.into());
        };
        let (lo, hi) = (panels[id].a, panels[id].b);
        panels[id].live = false;
        let m = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, m)?;
        let (v2, e2) = gk15(&f, m, hi)?;
        for i in 0..K {
            val[i] += v1[i] + v2[i] - panels[id].val[i];
        }
        err += e1 + e2 - panels[id].err;
        heap.push(Key(e1, panels.len()));
        panels.push(Panel { a: lo, b: m, val: v1, err: e1, live: true });
        heap.push(Key(e2, panels.len()));
        panels.push(Panel { a: m, b: hi, val: v2, err: e2, live: true });
        live += 1;
        splits += 1;
        if splits.is_multiple_of(256) {
            (val, err) = totals(&panels);
        }
    }
}

/// Mean over `θ ∈ [0, 2π)` by adaptive Gauss–Kronrod, for integrands
/// with kinks or integrable singularities where the trapezoid rule only
/// converges algebraically. `None` marks an unusable node; it is replaced
/// by the average of two nearby valid samples.
pub fn circle_mean_adaptive<F>(f: F, initial_panels: usize, rel_tol: f64, abs_tol: f64) -> Result<f64, QuadError>
where
    F: Fn(f64) -> Option<f64>,
{
    let g = |t: f64| -> Result<f64, QuadError> {
        if let Some(v) = f(t).filter(|v| v.is_finite()) {
            return Ok(v);
        }
        let side: Vec<f64> = [t - 1e-9, t + 1e-9].iter().filter_map(|&s| f(s)).filter(|v| v.is_finite()).collect();
        if side.is_empty() {
            Err(QuadError::Singular)
        } else {
            Ok(pairwise_sum(&side) / side.len() as f64)
        }
    };
    let rule = IntervalRule { rel_tol, abs_tol: abs_tol * 2.0 * PI, max_panels: 1 << 16, initial_panels };
    Ok(integrate(g, 0.0, 2.0 * PI, rule)? / (2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_mean_of_cos_squared_is_half() {
        let m = circle_mean(|t| Some(t.cos().powi(2)), CircleRule::default()).unwrap();
        assert!((m.value - 0.5).abs() < 1e-14);
    }

    #[test]
    fn circle_mean_tolerates_isolated_singular_node() {
        // log|1 - e^{iθ}| has mean 0 and a singular node at θ = 0.
        let f = |t: f64| {
            let v = ((1.0 - t.cos()).powi(2) + t.sin().powi(2)).sqrt();
            if v == 0.0 { None } else { Some(v.ln()) }
        };
        let rule = CircleRule { rel_tol: 0.0, abs_tol: 1e-4, ..Default::default() };
        let m = circle_mean(f, rule).unwrap();
        assert!(m.excluded >= 1);
        assert!(m.value.abs() < 1e-3, "mean {}", m.value);
    }

    #[test]
    fn kronrod_integrates_polynomial_and_log() {
        let v = integrate(|x| Ok::<_, QuadError>(x * x * x), 0.0, 2.0, IntervalRule::default()).unwrap();
        assert!((v - 4.0).abs() < 1e-13);
        let v = integrate(|x: f64| Ok::<_, QuadError>(x.ln()), 1.0, 1.0f64.exp(), IntervalRule::default())
            .unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }
}
