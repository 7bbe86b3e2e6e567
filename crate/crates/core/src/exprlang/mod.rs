//! Closed-form expressions in one complex variable `z`.
//!
//! The language has complex constants, `z`, the four arithmetic operators,
//! nonzero integer powers and `exp` of an entire argument. Trees are kept
//! in a light normal form (constant folding plus the additive and
//! multiplicative identities); equality beyond that is decided by
//! evaluation at fixed probe points.

mod diff;
mod merom;
mod parse;
mod program;

use alloc::boxed::Box;
use alloc::string::String;
use core::f64::consts::PI;
use core::fmt;
use num_complex::Complex64;
use thiserror::Error;

pub use merom::{ExtendedComplex, MeromorphicFn, MAX_VANISHING_ORDER};
pub use parse::parse;
pub use program::Program;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("essential singularity at byte {offset}: exp() needs an entire argument")]
    EssentialSingularity { offset: usize },
    #[error("denominator vanishes at every probe point")]
    ZeroDenominator,
    #[error("both numerator and denominator vanish to order > {MAX_VANISHING_ORDER} at {z}")]
    OrderOverflow { z: Complex64 },
    #[error("expression is not entire")]
    NotEntire,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Const(Complex64),
    Var,
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Div(Box<ExprAst>, Box<ExprAst>),
    PowInt(Box<ExprAst>, i32),
    Exp(Box<ExprAst>),
}

/// The 32 deterministic probe points `0.7·e^{2πik/32} + 0.1i`.
pub fn probe_points() -> [Complex64; 32] {
    let mut pts = [Complex64::new(0.0, 0.0); 32];
    for (k, p) in pts.iter_mut().enumerate() {
        *p = Complex64::from_polar(0.7, 2.0 * PI * k as f64 / 32.0) + Complex64::new(0.0, 0.1);
    }
    pts
}

fn is_zero(c: Complex64) -> bool {
    c.re == 0.0 && c.im == 0.0
}

fn is_one(c: Complex64) -> bool {
    c.re == 1.0 && c.im == 0.0
}

impl ExprAst {
    pub fn constant(c: impl Into<Complex64>) -> Self {
        ExprAst::Const(c.into())
    }

    pub fn var() -> Self {
        ExprAst::Var
    }

    pub fn as_const(&self) -> Option<Complex64> {
        match self {
            ExprAst::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, ExprAst::Const(_))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: ExprAst, b: ExprAst) -> ExprAst {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => ExprAst::Const(x + y),
            (Some(x), _) if is_zero(x) => b,
            (_, Some(y)) if is_zero(y) => a,
            _ => ExprAst::Add(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: ExprAst, b: ExprAst) -> ExprAst {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => ExprAst::Const(x - y),
            (_, Some(y)) if is_zero(y) => a,
            _ => ExprAst::Sub(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: ExprAst, b: ExprAst) -> ExprAst {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => ExprAst::Const(x * y),
            (Some(x), _) if is_zero(x) => ExprAst::Const(x),
            (_, Some(y)) if is_zero(y) => ExprAst::Const(y),
            (Some(x), _) if is_one(x) => b,
            (_, Some(y)) if is_one(y) => a,
            _ => ExprAst::Mul(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: ExprAst, b: ExprAst) -> ExprAst {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => ExprAst::Const(x / y),
            (_, Some(y)) if is_one(y) => a,
            _ => ExprAst::Div(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: ExprAst) -> ExprAst {
        match a.as_const() {
            Some(x) => ExprAst::Const(-x),
            None => ExprAst::mul(ExprAst::Const(Complex64::new(-1.0, 0.0)), a),
        }
    }

    /// Integer power; `exponent` must be nonzero.
    pub fn pow(base: ExprAst, exponent: i32) -> ExprAst {
        debug_assert!(exponent != 0);
        if exponent == 1 {
            return base;
        }
        match base.as_const() {
            Some(x) => ExprAst::Const(x.powi(exponent)),
            None => ExprAst::PowInt(Box::new(base), exponent),
        }
    }

    /// `exp(arg)`, rejecting arguments that are not entire.
    pub fn exp(arg: ExprAst) -> Result<ExprAst, ExprError> {
        if !arg.is_entire() {
            return Err(ExprError::NotEntire);
        }
        Ok(Self::exp_unchecked(arg))
    }

    pub(crate) fn exp_unchecked(arg: ExprAst) -> ExprAst {
        match arg.as_const() {
            Some(x) => ExprAst::Const(x.exp()),
            None => ExprAst::Exp(Box::new(arg)),
        }
    }

    /// True when the tree denotes an entire function: every division is by
    /// a constant and every negative power has a constant base.
    pub fn is_entire(&self) -> bool {
        match self {
            ExprAst::Const(_) | ExprAst::Var => true,
            ExprAst::Add(a, b) | ExprAst::Sub(a, b) | ExprAst::Mul(a, b) => a.is_entire() && b.is_entire(),
            ExprAst::Div(a, b) => a.is_entire() && b.is_constant(),
            ExprAst::PowInt(b, k) => b.is_entire() && (*k > 0 || b.is_constant()),
            ExprAst::Exp(_) => true,
        }
    }

    /// True when no `Div` node or negative power occurs anywhere.
    pub fn is_div_free(&self) -> bool {
        match self {
            ExprAst::Const(_) | ExprAst::Var => true,
            ExprAst::Add(a, b) | ExprAst::Sub(a, b) | ExprAst::Mul(a, b) => a.is_div_free() && b.is_div_free(),
            ExprAst::Div(..) => false,
            ExprAst::PowInt(b, k) => *k > 0 && b.is_div_free(),
            ExprAst::Exp(a) => a.is_div_free(),
        }
    }

    /// Rebuilds the tree through the normalizing constructors.
    pub fn normalize(&self) -> ExprAst {
        match self {
            ExprAst::Const(c) => ExprAst::Const(*c),
            ExprAst::Var => ExprAst::Var,
            ExprAst::Add(a, b) => ExprAst::add(a.normalize(), b.normalize()),
            ExprAst::Sub(a, b) => ExprAst::sub(a.normalize(), b.normalize()),
            ExprAst::Mul(a, b) => ExprAst::mul(a.normalize(), b.normalize()),
            ExprAst::Div(a, b) => ExprAst::div(a.normalize(), b.normalize()),
            ExprAst::PowInt(b, k) => ExprAst::pow(b.normalize(), *k),
            ExprAst::Exp(a) => ExprAst::exp_unchecked(a.normalize()),
        }
    }

    /// Direct recursive evaluation; poles produce non-finite values.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            ExprAst::Const(c) => *c,
            ExprAst::Var => z,
            ExprAst::Add(a, b) => a.eval(z) + b.eval(z),
            ExprAst::Sub(a, b) => a.eval(z) - b.eval(z),
            ExprAst::Mul(a, b) => a.eval(z) * b.eval(z),
            ExprAst::Div(a, b) => a.eval(z) / b.eval(z),
            ExprAst::PowInt(b, k) => b.eval(z).powi(*k),
            ExprAst::Exp(a) => a.eval(z).exp(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            ExprAst::Const(_) | ExprAst::Var => 1,
            ExprAst::Add(a, b) | ExprAst::Sub(a, b) | ExprAst::Mul(a, b) | ExprAst::Div(a, b) => {
                1 + a.node_count() + b.node_count()
            }
            ExprAst::PowInt(b, _) => 1 + b.node_count(),
            ExprAst::Exp(a) => 1 + a.node_count(),
        }
    }

    pub fn differentiate(&self) -> ExprAst {
        diff::differentiate(self)
    }

    pub fn compile(&self) -> Program {
        Program::compile(self)
    }

    pub fn to_meromorphic(&self) -> Result<MeromorphicFn, ExprError> {
        MeromorphicFn::from_ast(self)
    }
}

fn write_const(f: &mut fmt::Formatter<'_>, c: Complex64) -> fmt::Result {
    let re = if c.re == 0.0 { 0.0 } else { c.re };
    let im = if c.im == 0.0 { 0.0 } else { c.im };
    match (re == 0.0, im == 0.0) {
        (_, true) if re >= 0.0 => write!(f, "{re:?}"),
        (_, true) => write!(f, "({re:?})"),
        (true, false) if im > 0.0 => write!(f, "{im:?}i"),
        (true, false) => write!(f, "(-{:?}i)", -im),
        (false, false) if im > 0.0 => write!(f, "({re:?}+{im:?}i)"),
        (false, false) => write!(f, "({re:?}-{:?}i)", -im),
    }
}

/// Fully parenthesized form that parses back to the same normalized tree.
impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprAst::Const(c) => write_const(f, *c),
            ExprAst::Var => f.write_str("z"),
            ExprAst::Add(a, b) => write!(f, "({a}+{b})"),
            ExprAst::Sub(a, b) => write!(f, "({a}-{b})"),
            ExprAst::Mul(a, b) => write!(f, "({a}*{b})"),
            ExprAst::Div(a, b) => write!(f, "({a}/{b})"),
            ExprAst::PowInt(b, k) => write!(f, "({b}^{k})"),
            ExprAst::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn constants_fold_and_identities_drop() {
        let e = ExprAst::add(ExprAst::mul(ExprAst::constant(1.0), ExprAst::Var), ExprAst::constant(0.0));
        assert_eq!(e, ExprAst::Var);
        let e = ExprAst::mul(ExprAst::constant(2.0), ExprAst::constant(3.0));
        assert_eq!(e, ExprAst::constant(6.0));
    }

    #[test]
    fn printing_of_complex_constants() {
        assert_eq!(ExprAst::Const(Complex64::new(1.5, -2.0)).to_string(), "(1.5-2.0i)");
        assert_eq!(ExprAst::Const(Complex64::new(0.0, -2.0)).to_string(), "(-2.0i)");
        assert_eq!(ExprAst::Const(Complex64::new(-3.0, 0.0)).to_string(), "(-3.0)");
    }

    #[test]
    fn entire_and_div_free_classification() {
        let z = ExprAst::Var;
        let over_z = ExprAst::div(ExprAst::constant(1.0), z.clone());
        assert!(!over_z.is_entire());
        let half_z = ExprAst::div(z.clone(), ExprAst::constant(2.0));
        assert!(half_z.is_entire());
        assert!(!half_z.is_div_free());
        assert!(ExprAst::exp(over_z).is_err());
        assert!(!ExprAst::pow(z, -2).is_entire());
    }

    #[test]
    fn probe_points_avoid_origin() {
        for p in probe_points() {
            assert!(p.norm() > 0.5);
        }
    }
}
