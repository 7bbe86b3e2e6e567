//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (("+"|"-") term)* ;
//! term   := factor (("*"|"/") factor)* ;
//! factor := atom ("^" int)? | "-" factor ;
//! atom   := "z" | number | number "i" | "i" | "exp" "(" expr ")" | "(" expr ")" ;
//! ```

use alloc::format;
use alloc::string::String;
use num_complex::Complex64;

use super::{ExprAst, ExprError};

pub fn parse(text: &str) -> Result<ExprAst, ExprError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    check_finite(&e).map_err(|_| ExprError::Syntax { offset: 0, message: String::from("constant is not finite") })?;
    Ok(e)
}

fn check_finite(e: &ExprAst) -> Result<(), ()> {
    match e {
        ExprAst::Const(c) if !(c.re.is_finite() && c.im.is_finite()) => Err(()),
        ExprAst::Const(_) | ExprAst::Var => Ok(()),
        ExprAst::Add(a, b) | ExprAst::Sub(a, b) | ExprAst::Mul(a, b) | ExprAst::Div(a, b) => {
            check_finite(a)?;
            check_finite(b)
        }
        ExprAst::PowInt(a, _) | ExprAst::Exp(a) => check_finite(a),
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ExprError {
        ExprError::Syntax { offset: self.pos, message: String::from(message) }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<ExprAst, ExprError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = ExprAst::add(acc, self.term()?);
            } else if self.eat(b'-') {
                acc = ExprAst::sub(acc, self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst, ExprError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = ExprAst::mul(acc, self.factor()?);
            } else if self.eat(b'/') {
                acc = ExprAst::div(acc, self.factor()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<ExprAst, ExprError> {
        if self.eat(b'-') {
            return Ok(ExprAst::neg(self.factor()?));
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let at = self.pos;
            let k = self.int()?;
            if k == 0 {
                return Err(ExprError::Syntax { offset: at, message: String::from("exponent must be nonzero") });
            }
            return Ok(ExprAst::pow(base, k));
        }
        Ok(base)
    }

    fn int(&mut self) -> Result<i32, ExprError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.src.get(self.pos), Some(b'+') | Some(b'-')) {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits {
            return Err(self.error("expected integer exponent"));
        }
        core::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<i32>().ok())
            .ok_or(ExprError::Syntax { offset: start, message: String::from("exponent out of range") })
    }

    fn atom(&mut self) -> Result<ExprAst, ExprError> {
        let start = match self.peek() {
            None => return Err(self.error("unexpected end of input")),
            Some(_) => self.pos,
        };
        let rest = &self.src[self.pos..];
        if rest.starts_with(b"exp") {
            self.pos += 3;
            self.expect(b'(')?;
            let arg = self.expr()?;
            self.expect(b')')?;
            return ExprAst::exp(arg).map_err(|_| ExprError::EssentialSingularity { offset: start });
        }
        match rest[0] {
            b'z' => {
                self.pos += 1;
                Ok(ExprAst::Var)
            }
            b'i' => {
                self.pos += 1;
                Ok(ExprAst::Const(Complex64::new(0.0, 1.0)))
            }
            b'(' => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            c if c.is_ascii_digit() || c == b'.' => {
                let v = self.number()?;
                // `number "i"` with no intervening space is the imaginary literal;
                // whitespace is insignificant, so allow it too.
                if self.peek() == Some(b'i') {
                    self.pos += 1;
                    Ok(ExprAst::Const(Complex64::new(0.0, v)))
                } else {
                    Ok(ExprAst::Const(Complex64::new(v, 0.0)))
                }
            }
            _ => Err(self.error("expected 'z', a number, 'i', 'exp' or '('")),
        }
    }

    fn number(&mut self) -> Result<f64, ExprError> {
        let start = self.pos;
        let s = self.src;
        let mut p = self.pos;
        while p < s.len() && s[p].is_ascii_digit() {
            p += 1;
        }
        if p < s.len() && s[p] == b'.' {
            p += 1;
            while p < s.len() && s[p].is_ascii_digit() {
                p += 1;
            }
        }
        // Exponent part only if followed by digits, so "2exp" is not eaten.
        if p < s.len() && (s[p] == b'e' || s[p] == b'E') {
            let mut q = p + 1;
            if q < s.len() && (s[q] == b'+' || s[q] == b'-') {
                q += 1;
            }
            if q < s.len() && s[q].is_ascii_digit() {
                while q < s.len() && s[q].is_ascii_digit() {
                    q += 1;
                }
                p = q;
            }
        }
        self.pos = p;
        core::str::from_utf8(&s[start..p])
            .ok()
            .and_then(|t| t.parse::<f64>().ok())
            .ok_or(ExprError::Syntax { offset: start, message: String::from("malformed number") })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::boxed::Box;
    use alloc::string::ToString;

    fn one() -> ExprAst {
        ExprAst::constant(1.0)
    }

    #[test]
    fn exp_of_z() {
        assert_eq!(parse("exp(z)").unwrap(), ExprAst::Exp(Box::new(ExprAst::Var)));
    }

    #[test]
    fn example_curve_component() {
        let e = parse("(exp(z)+1)/(exp(z)-1)").unwrap();
        let ez = || ExprAst::Exp(Box::new(ExprAst::Var));
        let want = ExprAst::Div(
            Box::new(ExprAst::Add(Box::new(ez()), Box::new(one()))),
            Box::new(ExprAst::Sub(Box::new(ez()), Box::new(one()))),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn exp_of_meromorphic_is_rejected() {
        assert_eq!(parse("exp(1/z)"), Err(ExprError::EssentialSingularity { offset: 0 }));
        assert!(matches!(parse("2*exp(z^-1)"), Err(ExprError::EssentialSingularity { offset: 2 })));
        assert!(parse("exp(z/2)").is_ok());
    }

    #[test]
    fn syntax_error_reports_offset() {
        assert!(matches!(parse("exp("), Err(ExprError::Syntax { offset: 4, .. })));
        assert!(matches!(parse("z +* 2"), Err(ExprError::Syntax { offset: 3, .. })));
        assert!(matches!(parse("z^0"), Err(ExprError::Syntax { offset: 2, .. })));
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        let e = parse("-z^2").unwrap();
        assert_eq!(e.eval(Complex64::new(3.0, 0.0)), Complex64::new(-9.0, 0.0));
        let e = parse("2^-1").unwrap();
        assert_eq!(e, ExprAst::constant(0.5));
    }

    #[test]
    fn imaginary_literals() {
        assert_eq!(parse("2.5i").unwrap(), ExprAst::Const(Complex64::new(0.0, 2.5)));
        assert_eq!(parse("1 - i").unwrap(), ExprAst::Const(Complex64::new(1.0, -1.0)));
        assert_eq!(parse("1e-3").unwrap(), ExprAst::constant(1e-3));
    }

    #[test]
    fn printed_form_reparses() {
        for src in ["(exp(z)+1)/(exp(z)-1)", "-z^3 + (2-1.5i)*exp(-z*z)", "z^-2 - 3/z"] {
            let e = parse(src).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{src}");
        }
    }
}
