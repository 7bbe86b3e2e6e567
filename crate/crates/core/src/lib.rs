//! Numerical value-distribution laboratory for holomorphic curves.
//!
//! The crate evaluates connection Wronskians of holomorphic curves into
//! `P^n` (Fubini–Study connection), `(P^1)^2` (flat logarithmic connection
//! on the torus `(C^*)^2`) and the unit ball (Bergman-type metric), counts
//! zeros of entire functions with the argument principle, computes order,
//! counting and proximity functions, and assembles second-main-theorem
//! style inequalities over a grid of radii.
//!
//! Everything here is pure computation on `alloc` data; file formats,
//! threads and the command line live in the companion `wlab` crate.

#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops mirror the tensor formulas they implement.
#![allow(clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod exec;
pub mod exprlang;
pub mod geometry;
pub mod growth;
pub mod jets;
pub mod numeric;
pub mod rootcount;
pub mod smt;

pub use num_complex::Complex64;

pub use exec::{Executor, Sequential};
pub use exprlang::{ExprAst, ExprError, ExtendedComplex, MeromorphicFn};
pub use geometry::{DivisorComponent, DivisorSpec, GeometryError, TargetSpace};

pub use jets::{CurveMap, JetError, JetFrame, XiStatus, XiValue};
pub use growth::{GrowthError, GrowthTable, LineBundle, SfrModel};
pub use rootcount::{Disc, RootError, Zero, ZeroSet};
pub use smt::{DegeneracyVerdict, SmtError, SmtReport, Theorem};


