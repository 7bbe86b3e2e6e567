//! Postfix compilation of expression trees for repeated evaluation.

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::ExprAst;
use crate::numeric::series::{Scalar, Series};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Const(Complex64),
    Var,
    Add,
    Sub,
    Mul,
    Div,
    Pow(i32),
    Exp,
}

/// A compiled expression. Evaluation is allocation-light and generic over
/// [`Scalar`], so the same program yields values or Taylor jets.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    ops: Vec<Op>,
    depth: usize,
}

impl Program {
    pub fn compile(e: &ExprAst) -> Program {
        let mut ops = Vec::with_capacity(e.node_count());
        emit(e, &mut ops);
        let mut depth = 0usize;
        let mut cur = 0usize;
        for op in &ops {
            match op {
                Op::Const(_) | Op::Var => cur += 1,
                Op::Add | Op::Sub | Op::Mul | Op::Div => cur -= 1,
                Op::Pow(_) | Op::Exp => {}
            }
            depth = depth.max(cur);
        }
        Program { ops, depth }
    }

    pub fn eval_generic<S: Scalar>(&self, z: S) -> S {
        let mut stack: Vec<S> = Vec::with_capacity(self.depth);
        for op in &self.ops {
            match *op {
                Op::Const(c) => stack.push(S::constant(c)),
                Op::Var => stack.push(z),
                Op::Pow(k) => {
                    let a = stack.pop().expect("stack");
                    stack.push(a.powi(k));
                }
                Op::Exp => {
                    let a = stack.pop().expect("stack");
                    stack.push(a.exp());
                }
                bin => {
                    let b = stack.pop().expect("stack");
                    let a = stack.pop().expect("stack");
                    stack.push(match bin {
                        Op::Add => a + b,
                        Op::Sub => a - b,
                        Op::Mul => a * b,
                        _ => a / b,
                    });
                }
            }
        }
        stack.pop().expect("program leaves one value")
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_generic(z)
    }

    /// Taylor coefficients of length `N` about `z`.
    #[inline]
    pub fn series<const N: usize>(&self, z: Complex64) -> Series<N> {
        self.eval_generic(Series::<N>::variable(z))
    }

    /// Value together with a bound on the magnitude of the terms that
    /// entered it; `|value| / scale` near machine epsilon means the value
    /// is zero to working precision.
    pub fn eval_with_scale(&self, z: Complex64) -> (Complex64, f64) {
        let mut stack: Vec<(Complex64, f64)> = Vec::with_capacity(self.depth);
        for op in &self.ops {
            match *op {
                Op::Const(c) => stack.push((c, c.norm())),
                Op::Var => stack.push((z, z.norm())),
                Op::Pow(k) => {
                    let (a, s) = stack.pop().expect("stack");
                    let v = a.powi(k);
                    let sc = if k > 0 { s.powi(k) } else { v.norm() };
                    stack.push((v, sc));
                }
                Op::Exp => {
                    let (a, s) = stack.pop().expect("stack");
                    let v = a.exp();
                    stack.push((v, v.norm() * (1.0 + s)));
                }
                bin => {
                    let (b, sb) = stack.pop().expect("stack");
                    let (a, sa) = stack.pop().expect("stack");
                    stack.push(match bin {
                        Op::Add => (a + b, sa + sb),
                        Op::Sub => (a - b, sa + sb),
                        Op::Mul => (a * b, sa * sb),
                        _ => (a / b, sa / b.norm()),
                    });
                }
            }
        }
        stack.pop().expect("program leaves one value")
    }
}

fn emit(e: &ExprAst, ops: &mut Vec<Op>) {
    match e {
        ExprAst::Const(c) => ops.push(Op::Const(*c)),
        ExprAst::Var => ops.push(Op::Var),
        ExprAst::Add(a, b) => bin(a, b, Op::Add, ops),
        ExprAst::Sub(a, b) => bin(a, b, Op::Sub, ops),
        ExprAst::Mul(a, b) => bin(a, b, Op::Mul, ops),
        ExprAst::Div(a, b) => bin(a, b, Op::Div, ops),
        ExprAst::PowInt(b, k) => {
            emit(b, ops);
            ops.push(Op::Pow(*k));
        }
        ExprAst::Exp(a) => {
            emit(a, ops);
            ops.push(Op::Exp);
        }
    }
}

fn bin(a: &ExprAst, b: &ExprAst, op: Op, ops: &mut Vec<Op>) {
    emit(a, ops);
    emit(b, ops);
    ops.push(op);
}
