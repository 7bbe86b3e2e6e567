use thiserror::Error;
use wlab_core::growth::GrowthError;
use wlab_core::rootcount::RootError;
use wlab_core::smt::DegeneracyKind;
use wlab_core::{Complex64, ExprError, GeometryError, JetError, SmtError};

use crate::exit;

/// The algebraic relation behind a degenerate curve.
#[derive(Debug, Clone, PartialEq)]
pub enum Relation {
    /// `x^m y^n = c`.
    Flat { m: i32, n: i32, c: Complex64 },
    /// `Σ a_i w_i = 0`.
    Linear(Vec<Complex64>),
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    /// Unreadable scenario file, TOML error or malformed expression.
    #[error("{message}")]
    Config {
        message: String,
        /// Byte offset into `field` (or into the file when `field` is `None`).
        offset: Option<usize>,
        field: Option<String>,
    },
    #[error("{0}")]
    Validation(String),
    #[error("hypothesis '{name}' fails: {detail}")]
    Hypothesis { name: String, detail: String, relation: Option<Relation> },
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
}

impl LabError {
    pub fn config(message: impl Into<String>) -> Self {
        LabError::Config { message: message.into(), offset: None, field: None }
    }

    /// A malformed expression in `field`.
    pub fn expression(field: &str, text: &str, e: &ExprError) -> Self {
        let offset = match e {
            ExprError::Syntax { offset, .. } | ExprError::EssentialSingularity { offset } => Some(*offset),
            _ => None,
        };
        LabError::Config { message: format!("{field} = {text:?}: {e}"), offset, field: Some(field.to_string()) }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config { .. } | LabError::Io(_) => exit::CONFIG,
            LabError::Validation(_) | LabError::Hypothesis { .. } => exit::HYPOTHESIS,
            LabError::Numeric(_) => exit::NUMERIC,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LabError::Config { .. } => "config",
            LabError::Validation(_) => "validation",
            LabError::Hypothesis { .. } => "hypothesis",
            LabError::Numeric(_) => "numeric",
            LabError::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

impl From<GeometryError> for LabError {
    fn from(e: GeometryError) -> Self {
        LabError::Validation(e.to_string())
    }
}

impl From<JetError> for LabError {
    fn from(e: JetError) -> Self {
        match e {
            JetError::Invalid(_) | JetError::Geometry(_) | JetError::Order { .. } | JetError::Expr(_) => {
                LabError::Validation(e.to_string())
            }
            JetError::ChartSelection { .. }
            | JetError::OutsideChart { .. }
            | JetError::Stencil { .. }
            | JetError::Singular { .. } => LabError::Numeric(e.to_string()),
        }
    }
}

impl From<RootError> for LabError {
    fn from(e: RootError) -> Self {
        match e {
            RootError::NotConverged { .. }
            | RootError::TooManyZeros { .. }
            | RootError::Cluster { .. }
            | RootError::Conservation { .. } => LabError::Numeric(e.to_string()),
            RootError::BadDisc
            | RootError::NotEntire
            | RootError::OutsideRegion { .. }
            | RootError::RadiusBelowOne(_)
            | RootError::BadLevel(_) => LabError::Validation(e.to_string()),
        }
    }
}

impl From<GrowthError> for LabError {
    fn from(e: GrowthError) -> Self {
        match e {
            GrowthError::Root(r) => r.into(),
            GrowthError::Jet(j) => j.into(),
            GrowthError::Quadrature(_) | GrowthError::ZeroOnCircle(_) | GrowthError::DegenerateDesign => {
                LabError::Numeric(e.to_string())
            }
            GrowthError::CurveInDivisor(ref c) => {
                LabError::Hypothesis { name: String::from("curve_in_divisor"), detail: format!("the curve lies in {c}"), relation: None }
            }
            GrowthError::BadRadius(_)
            | GrowthError::BadGrid(_)
            | GrowthError::Bundle { .. }
            | GrowthError::Unsupported(_)
            | GrowthError::BadEps(_) => LabError::Validation(e.to_string()),
        }
    }
}

impl From<SmtError> for LabError {
    fn from(e: SmtError) -> Self {
        match e {
            SmtError::Hypothesis { name, detail, verdict } => {
                let relation = verdict.map(|v| match v.kind {
                    DegeneracyKind::FlatRelation { m, n, c } => Relation::Flat { m, n, c },
                    DegeneracyKind::ProjectiveLinear(a) => Relation::Linear(a),
                    DegeneracyKind::Nondegenerate => Relation::Unresolved,
                });
                LabError::Hypothesis { name, detail, relation }
            }
            SmtError::Unresolved { .. } => LabError::Hypothesis {
                name: String::from("degeneracy"),
                detail: e.to_string(),
                relation: Some(Relation::Unresolved),
            },
            SmtError::Invalid(s) => LabError::Validation(s),
            SmtError::Growth(g) => g.into(),
            SmtError::Jet(j) => j.into(),
            SmtError::Geometry(g) => g.into(),
        }
    }
}
