//! Truncated Taylor series in one complex variable.
//!
//! `Series<N>` holds the coefficients `a_0, …, a_{N-1}` of a function
//! expanded about a base point. Arithmetic is exact on the truncation, so
//! evaluating an expression on `Series` yields its derivatives up to order
//! `N - 1` without symbolic expansion.

use core::ops::{Add, Div, Mul, Neg, Sub};
use num_complex::Complex64;

/// Values an expression program can be evaluated on.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(c: Complex64) -> Self;
    fn exp(self) -> Self;
    fn powi(self, n: i32) -> Self;
}

impl Scalar for Complex64 {
    #[inline]
    fn constant(c: Complex64) -> Self {
        c
    }

    #[inline]
    fn exp(self) -> Self {
        Complex64::exp(self)
    }

    #[inline]
    fn powi(self, n: i32) -> Self {
        Complex64::powi(&self, n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Series<const N: usize> {
    pub coeffs: [Complex64; N],
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl<const N: usize> Series<N> {
    pub fn constant(c: Complex64) -> Self {
        let mut coeffs = [ZERO; N];
        if N > 0 {
            coeffs[0] = c;
        }
        Series { coeffs }
    }

    /// The identity function `z` expanded about `z0`.
    pub fn variable(z0: Complex64) -> Self {
        let mut s = Self::constant(z0);
        if N > 1 {
            s.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        s
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// `k`-th derivative at the base point.
    pub fn derivative_at(&self, k: usize) -> Complex64 {
        let mut fact = 1.0;
        for j in 2..=k {
            fact *= j as f64;
        }
        self.coeffs[k] * fact
    }

    /// Formal derivative; the top coefficient becomes zero (unknown).
    pub fn differentiate(&self) -> Self {
        let mut out = [ZERO; N];
        for k in 0..N.saturating_sub(1) {
            out[k] = self.coeffs[k + 1] * (k as f64 + 1.0);
        }
        Series { coeffs: out }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.coeffs;
        for v in out.iter_mut() {
            *v *= c;
        }
        Series { coeffs: out }
    }

    pub fn recip(&self) -> Self {
        Self::constant(Complex64::new(1.0, 0.0)) / *self
    }
}

impl<const N: usize> Add for Series<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self.coeffs;
        for (o, r) in out.iter_mut().zip(rhs.coeffs.iter()) {
            *o += *r;
        }
        Series { coeffs: out }
    }
}

impl<const N: usize> Sub for Series<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self.coeffs;
        for (o, r) in out.iter_mut().zip(rhs.coeffs.iter()) {
            *o -= *r;
        }
        Series { coeffs: out }
    }
}

impl<const N: usize> Neg for Series<N> {
    type Output = Self;
    fn neg(self) -> Self {
        let mut out = self.coeffs;
        for o in out.iter_mut() {
            *o = -*o;
        }
        Series { coeffs: out }
    }
}

impl<const N: usize> Mul for Series<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = [ZERO; N];
        for k in 0..N {
            let mut acc = ZERO;
            for j in 0..=k {
                acc += self.coeffs[j] * rhs.coeffs[k - j];
            }
            out[k] = acc;
        }
        Series { coeffs: out }
    }
}

impl<const N: usize> Div for Series<N> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let b0 = rhs.coeffs[0];
        let mut out = [ZERO; N];
        for k in 0..N {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc -= rhs.coeffs[j] * out[k - j];
            }
            out[k] = acc / b0;
        }
        Series { coeffs: out }
    }
}

impl<const N: usize> Scalar for Series<N> {
    fn constant(c: Complex64) -> Self {
        Series::constant(c)
    }

    fn exp(self) -> Self {
        // a' = b' a  =>  k a_k = sum_{j=1}^k j b_j a_{k-j}
        let mut out = [ZERO; N];
        out[0] = self.coeffs[0].exp();
        for k in 1..N {
            let mut acc = ZERO;
            for j in 1..=k {
                acc += self.coeffs[j] * out[k - j] * (j as f64);
            }
            out[k] = acc / (k as f64);
        }
        Series { coeffs: out }
    }

    fn powi(self, n: i32) -> Self {
        let one = Series::constant(Complex64::new(1.0, 0.0));
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = one;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        if n < 0 {
            one / acc
        } else {
            acc
        }
    }
}
