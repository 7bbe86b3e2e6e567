//! Number formatting shared by every artifact.
//!
//! Values are written with 12 significant digits in the style of C's
//! `%.12g`, so artifacts are stable across platforms and immune to
//! last-bit noise from summation order.

use serde::{Serialize, Serializer};
use wlab_core::Complex64;

pub const SIGNIFICANT: usize = 12;

/// `%.12g`: fixed notation for exponents in `[-4, 12)`, scientific
/// otherwise, trailing zeros removed. `-0` prints as `0`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return String::from("nan");
    }
    if x.is_infinite() {
        return String::from(if x > 0.0 { "inf" } else { "-inf" });
    }
    if x == 0.0 {
        return String::from("0");
    }
    let sci = format!("{:.*e}", SIGNIFICANT - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if exp < -4 || exp >= SIGNIFICANT as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mant), exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (SIGNIFICANT as i32 - 1 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        fmt_num(x).parse().expect("formatted float")
    } else {
        x
    }
}

/// JSON number rounded to 12 significant digits; non-finite values
/// become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(round_sig(self.0))
        } else {
            s.serialize_none()
        }
    }
}

pub fn nums(v: &[f64]) -> Vec<Num> {
    v.iter().map(|x| Num(*x)).collect()
}

/// Complex number as `{"re": …, "im": …}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JsonComplex {
    pub re: Num,
    pub im: Num,
}

impl From<Complex64> for JsonComplex {
    fn from(c: Complex64) -> Self {
        JsonComplex { re: Num(c.re), im: Num(c.im) }
    }
}

/// Human-readable complex number, e.g. `1.5-2i`.
pub fn fmt_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        fmt_num(c.re)
    } else if c.re == 0.0 {
        format!("{}i", fmt_num(c.im))
    } else {
        let im = fmt_num(c.im);
        let sign = if im.starts_with('-') { "" } else { "+" };
        format!("{}{sign}{im}i", fmt_num(c.re))
    }
}
