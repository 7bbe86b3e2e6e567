use num_complex::Complex64;

use super::ExprAst;

pub(super) fn differentiate(e: &ExprAst) -> ExprAst {
    match e {
        ExprAst::Const(_) => ExprAst::constant(0.0),
        ExprAst::Var => ExprAst::constant(1.0),
        ExprAst::Add(a, b) => ExprAst::add(differentiate(a), differentiate(b)),
        ExprAst::Sub(a, b) => ExprAst::sub(differentiate(a), differentiate(b)),
        ExprAst::Mul(a, b) => ExprAst::add(
            ExprAst::mul(differentiate(a), (**b).clone()),
            ExprAst::mul((**a).clone(), differentiate(b)),
        ),
        ExprAst::Div(a, b) => {
            // (a'b - ab') / b^2
            let num = ExprAst::sub(
                ExprAst::mul(differentiate(a), (**b).clone()),
                ExprAst::mul((**a).clone(), differentiate(b)),
            );
            ExprAst::div(num, ExprAst::pow((**b).clone(), 2))
        }
        ExprAst::PowInt(b, k) => {
            let lowered = if *k == 1 { ExprAst::constant(1.0) } else { ExprAst::pow((**b).clone(), k - 1) };
            ExprAst::mul(
                ExprAst::mul(ExprAst::Const(Complex64::new(*k as f64, 0.0)), lowered),
                differentiate(b),
            )
        }
        // exp keeps its (entire) argument, so the result stays well formed.
        ExprAst::Exp(a) => ExprAst::mul(e.clone(), differentiate(a)),
    }
}
