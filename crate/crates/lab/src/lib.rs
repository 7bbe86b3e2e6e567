//! Scenario files, artifacts and the command line around [`wlab_core`].
//!
//! A scenario is a TOML file naming a curve, a divisor, a theorem and a
//! radius grid (see `scenarios/README.md`). [`run::run_scenario`] evaluates
//! it and writes CSV/JSON artifacts; [`verify::verify_suite`] runs a whole
//! directory of them.

pub mod artifacts;
pub mod error;
pub mod exec;
pub mod format;
pub mod run;
pub mod scenario;
pub mod verify;

pub use error::{LabError, Relation};
pub use exec::RayonExecutor;
pub use run::{run_scenario, Outcome, RunOptions};
pub use scenario::{Grid, Scenario, Spacing};
pub use verify::{verify_suite, Summary};

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    /// Hypothesis or validation failure.
    pub const HYPOTHESIS: i32 = 1;
    /// The inequality failed outside the exceptional set.
    pub const FAIL: i32 = 2;
    /// The scenario file or an expression in it does not parse.
    pub const CONFIG: i32 = 3;
    /// A quadrature or root count did not converge.
    pub const NUMERIC: i32 = 4;
}
