//! Meromorphic functions as quotients of entire expression trees.

use num_complex::Complex64;

use super::{probe_points, ExprAst, ExprError, Program};
use crate::numeric::series::Series;

/// Largest zero or pole order `evaluate` resolves.
pub const MAX_VANISHING_ORDER: usize = 16;

const ORDER_TERMS: usize = MAX_VANISHING_ORDER + 1;

/// A value on the Riemann sphere, with the limiting value kept when both
/// parts of the quotient vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedComplex {
    Finite(Complex64),
    Pole(u32),
    /// Numerator and denominator both vanish; the limit is recovered from
    /// the first nonvanishing Taylor coefficients.
    Indeterminate(Complex64),
}

impl ExtendedComplex {
    /// The (limiting) finite value, `None` at a pole.
    pub fn value(&self) -> Option<Complex64> {
        match *self {
            ExtendedComplex::Finite(v) | ExtendedComplex::Indeterminate(v) => Some(v),
            ExtendedComplex::Pole(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeromorphicFn {
    num: ExprAst,
    den: ExprAst,
    num_prog: Program,
    den_prog: Program,
}

impl MeromorphicFn {
    /// Builds `num / den` from two division-free entire trees.
    pub fn new(num: ExprAst, den: ExprAst) -> Result<Self, ExprError> {
        if !num.is_div_free() || !den.is_div_free() {
            return Err(ExprError::NotEntire);
        }
        let den_prog = den.compile();
        if probe_points().iter().all(|&p| den_prog.eval(p).norm() == 0.0) {
            return Err(ExprError::ZeroDenominator);
        }
        Ok(MeromorphicFn { num_prog: num.compile(), den_prog, num, den })
    }

    pub fn entire(num: ExprAst) -> Result<Self, ExprError> {
        Self::new(num, ExprAst::constant(1.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(ExprAst::Const(c), ExprAst::constant(1.0)).expect("constant quotient is valid")
    }

    /// Rational normalization of an arbitrary valid tree.
    pub fn from_ast(ast: &ExprAst) -> Result<Self, ExprError> {
        let (n, d) = split(ast);
        Self::new(n, d)
    }

    pub fn numerator(&self) -> &ExprAst {
        &self.num
    }

    pub fn denominator(&self) -> &ExprAst {
        &self.den
    }

    pub fn numerator_program(&self) -> &Program {
        &self.num_prog
    }

    pub fn denominator_program(&self) -> &Program {
        &self.den_prog
    }

    /// Plain quotient; non-finite at poles.
    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.num_prog.eval(z) / self.den_prog.eval(z)
    }

    /// Numerator and denominator values.
    #[inline]
    pub fn eval_parts(&self, z: Complex64) -> (Complex64, Complex64) {
        (self.num_prog.eval(z), self.den_prog.eval(z))
    }

    /// Taylor jet of the quotient about `z` (must not be a pole).
    #[inline]
    pub fn series<const N: usize>(&self, z: Complex64) -> Series<N> {
        self.num_prog.series::<N>(z) / self.den_prog.series::<N>(z)
    }

    /// True when the function takes one value at all probe points.
    pub fn is_constant(&self) -> bool {
        let pts = probe_points();
        let v0 = self.eval(pts[0]);
        pts.iter().all(|&p| {
            let v = self.eval(p);
            (v - v0).norm() <= 1e-12 * (1.0 + v0.norm())
        })
    }

    pub fn evaluate(&self, z: Complex64) -> Result<ExtendedComplex, ExprError> {
        let (nv, ns) = self.num_prog.eval_with_scale(z);
        let (dv, ds) = self.den_prog.eval_with_scale(z);
        if !vanishes(dv, ds) {
            return Ok(ExtendedComplex::Finite(nv / dv));
        }
        let q = order(&self.den_prog, z, dv, ds);
        let p = order(&self.num_prog, z, nv, ns);
        match (p, q) {
            (_, None) => Err(ExprError::OrderOverflow { z }),
            (Some(p), Some(q)) if p < q => Ok(ExtendedComplex::Pole((q - p) as u32)),
            (Some(p), Some(q)) if p == q => {
                let a = self.num_prog.series::<ORDER_TERMS>(z).coeffs[p];
                let b = self.den_prog.series::<ORDER_TERMS>(z).coeffs[q];
                Ok(ExtendedComplex::Indeterminate(a / b))
            }
            // Numerator vanishes to higher (possibly unresolved) order.
            _ => Ok(ExtendedComplex::Indeterminate(Complex64::new(0.0, 0.0))),
        }
    }
}

fn vanishes(v: Complex64, scale: f64) -> bool {
    v.norm() <= 64.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE)
}

/// Vanishing order at `z`, or `None` beyond the cap.
fn order(prog: &Program, z: Complex64, v: Complex64, scale: f64) -> Option<usize> {
    if !vanishes(v, scale) {
        return Some(0);
    }
    let s = prog.series::<ORDER_TERMS>(z);
    let big = s.coeffs.iter().skip(1).fold(0.0f64, |m, c| m.max(c.norm()));
    (1..ORDER_TERMS).find(|&k| s.coeffs[k].norm() > 1e-10 * big.max(f64::MIN_POSITIVE))
}

fn one() -> ExprAst {
    ExprAst::constant(1.0)
}

fn is_unit(e: &ExprAst) -> bool {
    e.as_const() == Some(Complex64::new(1.0, 0.0))
}

/// `(numerator, denominator)` with both parts division-free.
fn split(e: &ExprAst) -> (ExprAst, ExprAst) {
    match e {
        ExprAst::Const(_) | ExprAst::Var => (e.clone(), one()),
        ExprAst::Add(a, b) | ExprAst::Sub(a, b) => {
            let (an, ad) = split(a);
            let (bn, bd) = split(b);
            let join = |x, y| if matches!(e, ExprAst::Add(..)) { ExprAst::add(x, y) } else { ExprAst::sub(x, y) };
            if ad == bd {
                (join(an, bn), ad)
            } else if is_unit(&bd) {
                (join(an, ExprAst::mul(bn, ad.clone())), ad)
            } else if is_unit(&ad) {
                (join(ExprAst::mul(an, bd.clone()), bn), bd)
            } else {
                (join(ExprAst::mul(an, bd.clone()), ExprAst::mul(bn, ad.clone())), ExprAst::mul(ad, bd))
            }
        }
        ExprAst::Mul(a, b) => {
            let (an, ad) = split(a);
            let (bn, bd) = split(b);
            (ExprAst::mul(an, bn), ExprAst::mul(ad, bd))
        }
        ExprAst::Div(a, b) => {
            let (an, ad) = split(a);
            let (bn, bd) = split(b);
            (ExprAst::mul(an, bd), ExprAst::mul(ad, bn))
        }
        ExprAst::PowInt(b, k) => {
            let (bn, bd) = split(b);
            let m = k.unsigned_abs() as i32;
            let (n, d) = if *k > 0 { (bn, bd) } else { (bd, bn) };
            (pow_or_unit(n, m), pow_or_unit(d, m))
        }
        ExprAst::Exp(a) => {
            // The argument is entire, so its denominator folds to a constant.
            let (an, ad) = split(a);
            let arg = match ad.as_const() {
                Some(c) => ExprAst::mul(ExprAst::Const(c.inv()), an),
                None => ExprAst::div(an, ad),
            };
            (ExprAst::exp_unchecked(arg), one())
        }
    }
}

fn pow_or_unit(e: ExprAst, k: i32) -> ExprAst {
    if is_unit(&e) {
        e
    } else {
        ExprAst::pow(e, k)
    }
}
