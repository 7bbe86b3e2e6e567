//! Scenario files: parsing and validation.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use wlab_core::exprlang::parse;
use wlab_core::geometry::Boundary;
use wlab_core::{Complex64, CurveMap, DivisorComponent, ExprAst, Theorem};

use crate::error::LabError;

/// Smallest grid the allowance fit accepts.
pub const MIN_GRID_COUNT: usize = 8;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Option<String>,
    theorem: String,
    expect_exit: Option<i32>,
    output: Option<String>,
    curve: Option<RawCurve>,
    #[serde(default)]
    divisor: Vec<RawDivisor>,
    grid: Option<RawGrid>,
    #[serde(default)]
    settings: RawSettings,
    jensen: Option<RawJensen>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCurve {
    target: String,
    components: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawNumber {
    Real(f64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawDivisor {
    Hyperplane { coeffs: Vec<RawNumber> },
    Torus { m: i32, n: i32, c: RawNumber },
    Boundary { which: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    min: f64,
    max: f64,
    count: usize,
    #[serde(default)]
    spacing: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSettings {
    eps: Option<f64>,
    sfr_ratio: Option<f64>,
    log_xi: Option<bool>,
    proximity: Option<bool>,
    jensen_tol: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJensen {
    functions: Vec<String>,
    radii: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Linear,
}

impl Spacing {
    pub fn parse(s: &str) -> Option<Spacing> {
        match s {
            "log" => Some(Spacing::Log),
            "linear" => Some(Spacing::Linear),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Spacing::Log => "log",
            Spacing::Linear => "linear",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub fn validate(&self) -> Result<(), LabError> {
        if !(self.min >= 1.0 && self.min.is_finite()) {
            return Err(LabError::Validation(format!("grid.min must be >= 1, got {}", self.min)));
        }
        if !(self.max > self.min && self.max.is_finite()) {
            return Err(LabError::Validation(format!("grid.max must exceed grid.min, got {}", self.max)));
        }
        if self.count < MIN_GRID_COUNT {
            return Err(LabError::Validation(format!("grid.count must be >= {MIN_GRID_COUNT}, got {}", self.count)));
        }
        Ok(())
    }

    /// Ascending radii; the endpoints are exact.
    pub fn radii(&self) -> Vec<f64> {
        let last = self.count - 1;
        (0..self.count)
            .map(|i| match (i, self.spacing) {
                (0, _) => self.min,
                (i, _) if i == last => self.max,
                (i, Spacing::Log) => self.min * (self.max / self.min).powf(i as f64 / last as f64),
                (i, Spacing::Linear) => self.min + (self.max - self.min) * i as f64 / last as f64,
            })
            .collect()
    }

    /// `min:max:count[:log|linear]`, as given on the command line.
    pub fn parse_flag(s: &str) -> Result<Grid, LabError> {
        let bad = || LabError::config(format!("--grid expects min:max:count[:log|linear], got {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let min = parts[0].trim().parse().map_err(|_| bad())?;
        let max = parts[1].trim().parse().map_err(|_| bad())?;
        let count = parts[2].trim().parse().map_err(|_| bad())?;
        let spacing = match parts.get(3) {
            Some(p) => Spacing::parse(p.trim()).ok_or_else(bad)?,
            None => Spacing::Log,
        };
        Ok(Grid { min, max, count, spacing })
    }
}

/// Every tunable, with its default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub eps: f64,
    pub sfr_ratio: f64,
    pub log_xi: bool,
    pub proximity: bool,
    pub jensen_tol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        let s = wlab_core::smt::SmtSettings::default();
        Settings { eps: s.eps, sfr_ratio: s.sfr_ratio, log_xi: s.log_xi, proximity: s.proximity, jensen_tol: 1e-5 }
    }
}

impl Settings {
    pub fn smt(&self) -> wlab_core::smt::SmtSettings {
        wlab_core::smt::SmtSettings {
            eps: self.eps,
            sfr_ratio: self.sfr_ratio,
            log_xi: self.log_xi,
            proximity: self.proximity,
        }
    }
}

/// Where a non-default setting came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Scenario,
    CommandLine,
}

impl Source {
    pub fn as_str(&self) -> &'static str {
        match self {
            Source::Scenario => "scenario",
            Source::CommandLine => "command line",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Smt(Theorem),
    Jensen,
}

impl Task {
    pub fn id(&self) -> &'static str {
        match self {
            Task::Smt(t) => t.id(),
            Task::Jensen => "jensen",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CurveInput {
    pub target: String,
    pub components: Vec<String>,
    pub map: CurveMap,
}

#[derive(Debug, Clone)]
pub struct JensenInput {
    pub functions: Vec<(String, ExprAst)>,
    pub radii: Vec<f64>,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub task: Task,
    pub expect_exit: i32,
    /// Output directory requested by the file, resolved against its folder.
    pub output: Option<PathBuf>,
    pub curve: Option<CurveInput>,
    pub divisors: Vec<DivisorComponent>,
    pub grid: Option<Grid>,
    pub settings: Settings,
    /// Settings that differ from the defaults: key, value, source.
    pub overrides: Vec<(String, String, Source)>,
    pub jensen: Option<JensenInput>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario, LabError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::config(format!("cannot read {}: {e}", path.display())))?;
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let mut sc = Scenario::parse(&text, &stem)?;
        if let Some(out) = &sc.output {
            if out.is_relative() {
                sc.output = Some(path.parent().unwrap_or(Path::new(".")).join(out));
            }
        }
        Ok(sc)
    }

    /// Parses scenario text; `default_name` is used when the file has no
    /// `name` key.
    pub fn parse(text: &str, default_name: &str) -> Result<Scenario, LabError> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| LabError::Config {
            message: e.message().to_string(),
            offset: e.span().map(|s| s.start),
            field: None,
        })?;
        let task = match raw.theorem.as_str() {
            "jensen" => Task::Jensen,
            s => Task::Smt(
                Theorem::from_id(s)
                    .ok_or_else(|| LabError::config(format!("unknown theorem {s:?}; expected thm1_1, cartan, smt7 or jensen")))?,
            ),
        };
        let mut overrides = Vec::new();
        let settings = settings(&raw.settings, &mut overrides);
        let curve = raw.curve.as_ref().map(curve).transpose()?;
        let mut divisors = Vec::new();
        for (i, d) in raw.divisor.iter().enumerate() {
            divisors.push(divisor(d, i)?);
        }
        let grid = match &raw.grid {
            Some(g) => {
                let spacing = match &g.spacing {
                    Some(s) => Spacing::parse(s)
                        .ok_or_else(|| LabError::config(format!("grid.spacing must be log or linear, got {s:?}")))?,
                    None => Spacing::Log,
                };
                Some(Grid { min: g.min, max: g.max, count: g.count, spacing })
            }
            None => None,
        };
        let jensen = match &raw.jensen {
            Some(j) => {
                let mut functions = Vec::new();
                for (i, f) in j.functions.iter().enumerate() {
                    let field = format!("jensen.functions[{i}]");
                    functions.push((f.clone(), parse(f).map_err(|e| LabError::expression(&field, f, &e))?));
                }
                Some(JensenInput { functions, radii: j.radii.clone() })
            }
            None => None,
        };
        let sc = Scenario {
            name: raw.name.unwrap_or_else(|| default_name.to_string()),
            task,
            expect_exit: raw.expect_exit.unwrap_or(crate::exit::PASS),
            output: raw.output.map(PathBuf::from),
            curve,
            divisors,
            grid,
            settings,
            overrides,
            jensen,
        };
        Ok(sc)
    }

    /// Checks everything that does not need numerics.
    pub fn validate(&self) -> Result<(), LabError> {
        let s = &self.settings;
        if !(0.0..=0.1).contains(&s.eps) {
            return Err(LabError::Validation(format!("eps must lie in [0, 0.1], got {}", s.eps)));
        }
        let positive = |v: f64| v > 0.0;
        if !positive(s.sfr_ratio) || !positive(s.jensen_tol) {
            return Err(LabError::Validation(String::from("sfr_ratio and jensen_tol must be positive")));
        }
        match self.task {
            Task::Jensen => {
                let j = self.jensen.as_ref().ok_or_else(|| LabError::Validation(String::from("theorem = \"jensen\" needs a [jensen] section")))?;
                if j.functions.is_empty() || j.radii.is_empty() {
                    return Err(LabError::Validation(String::from("[jensen] needs functions and radii")));
                }
                if let Some(r) = j.radii.iter().find(|r| !(**r >= 1.0 && r.is_finite())) {
                    return Err(LabError::Validation(format!("jensen radii must be >= 1, got {r}")));
                }
                if let Some((text, _)) = j.functions.iter().find(|(_, f)| !f.is_entire()) {
                    return Err(LabError::Validation(format!("jensen function {text} is not entire")));
                }
            }
            Task::Smt(_) => {
                if self.curve.is_none() {
                    return Err(LabError::Validation(String::from("missing [curve] section")));
                }
                if self.divisors.is_empty() {
                    return Err(LabError::Validation(String::from("at least one [[divisor]] is required")));
                }
                self.grid.ok_or_else(|| LabError::Validation(String::from("missing [grid] section")))?.validate()?;
            }
        }
        Ok(())
    }

    /// Applies command-line overrides.
    pub fn apply(&mut self, eps: Option<f64>, grid: Option<Grid>) {
        if let Some(e) = eps {
            self.settings.eps = e;
            self.overrides.retain(|(k, _, _)| k != "eps");
            self.overrides.push((String::from("eps"), e.to_string(), Source::CommandLine));
        }
        if let Some(g) = grid {
            self.grid = Some(g);
            let text = format!("{}:{}:{}:{}", g.min, g.max, g.count, g.spacing.as_str());
            self.overrides.push((String::from("grid"), text, Source::CommandLine));
        }
    }
}

fn settings(raw: &RawSettings, overrides: &mut Vec<(String, String, Source)>) -> Settings {
    let d = Settings::default();
    let mut s = d;
    let mut note = |k: &str, v: String| overrides.push((k.to_string(), v, Source::Scenario));
    if let Some(v) = raw.eps.filter(|v| *v != d.eps) {
        s.eps = v;
        note("eps", v.to_string());
    }
    if let Some(v) = raw.sfr_ratio.filter(|v| *v != d.sfr_ratio) {
        s.sfr_ratio = v;
        note("sfr_ratio", v.to_string());
    }
    if let Some(v) = raw.log_xi.filter(|v| *v != d.log_xi) {
        s.log_xi = v;
        note("log_xi", v.to_string());
    }
    if let Some(v) = raw.proximity.filter(|v| *v != d.proximity) {
        s.proximity = v;
        note("proximity", v.to_string());
    }
    if let Some(v) = raw.jensen_tol.filter(|v| *v != d.jensen_tol) {
        s.jensen_tol = v;
        note("jensen_tol", v.to_string());
    }
    s
}

/// Parses a constant such as `2`, `-1.5`, `3i`, `1-2i` or `exp(1)`.
pub fn parse_constant(text: &str, field: &str) -> Result<Complex64, LabError> {
    let ast = parse(text).map_err(|e| LabError::expression(field, text, &e))?;
    if !ast.is_constant() {
        return Err(LabError::config(format!("{field} = {text:?} must be a constant")));
    }
    Ok(ast.eval(Complex64::new(0.0, 0.0)))
}

fn number(n: &RawNumber, field: &str) -> Result<Complex64, LabError> {
    match n {
        RawNumber::Real(x) => Ok(Complex64::new(*x, 0.0)),
        RawNumber::Text(s) => parse_constant(s, field),
    }
}

fn curve(raw: &RawCurve) -> Result<CurveInput, LabError> {
    let mut asts = Vec::new();
    for (i, c) in raw.components.iter().enumerate() {
        let field = format!("curve.components[{i}]");
        asts.push(parse(c).map_err(|e| LabError::expression(&field, c, &e))?);
    }
    let merom = |asts: &[ExprAst]| -> Result<Vec<_>, LabError> {
        asts.iter()
            .zip(&raw.components)
            .map(|(a, text)| a.to_meromorphic().map_err(|e| LabError::Validation(format!("component {text}: {e}"))))
            .collect()
    };
    let map = match raw.target.as_str() {
        "pn" => CurveMap::projective(asts)?,
        "p1xp1" => {
            if asts.len() != 2 {
                return Err(LabError::Validation(format!("target p1xp1 needs 2 components, got {}", asts.len())));
            }
            let mut fs = merom(&asts)?;
            let g = fs.pop().expect("two components");
            let f = fs.pop().expect("two components");
            CurveMap::flat(f, g)?
        }
        "ball" => CurveMap::ball(merom(&asts)?)?,
        t => return Err(LabError::config(format!("unknown curve.target {t:?}; expected pn, p1xp1 or ball"))),
    };
    Ok(CurveInput { target: raw.target.clone(), components: raw.components.clone(), map })
}

fn divisor(raw: &RawDivisor, i: usize) -> Result<DivisorComponent, LabError> {
    match raw {
        RawDivisor::Hyperplane { coeffs } => {
            let a = coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| number(c, &format!("divisor[{i}].coeffs[{j}]")))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(DivisorComponent::Hyperplane(a))
        }
        RawDivisor::Torus { m, n, c } => {
            Ok(DivisorComponent::TorusCurve { m: *m, n: *n, c: number(c, &format!("divisor[{i}].c"))? })
        }
        RawDivisor::Boundary { which } => {
            let b = Boundary::ALL
                .iter()
                .find(|b| b.label() == which)
                .ok_or_else(|| LabError::config(format!("divisor[{i}].which must be x=0, x=inf, y=0 or y=inf, got {which:?}")))?;
            Ok(DivisorComponent::Boundary(*b))
        }
    }
}
