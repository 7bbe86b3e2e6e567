//! CSV and JSON artifacts.
//!
//! Every artifact is rendered to a string before anything touches the
//! disk, with numbers at 12 significant digits, `,` delimiters and LF line
//! endings, so identical inputs give byte-identical files.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use wlab_core::{GrowthTable, SmtReport, ZeroSet};

use crate::error::{LabError, Relation};
use crate::format::{fmt_num, nums, JsonComplex, Num};
use crate::run::JensenReport;
use crate::scenario::Scenario;

pub const GROWTH_CSV: &str = "growth.csv";
pub const REPORT_JSON: &str = "report.json";
pub const ZEROS_CSV: &str = "zeros.csv";
pub const PLOT_CSV: &str = "plot.csv";
pub const JENSEN_CSV: &str = "jensen.csv";
pub const ERROR_JSON: &str = "error.json";
pub const SUMMARY_JSON: &str = "summary.json";

/// Files a scenario run may produce; stale copies are removed first.
pub const SCENARIO_FILES: [&str; 6] = [GROWTH_CSV, REPORT_JSON, ZEROS_CSV, PLOT_CSV, JENSEN_CSV, ERROR_JSON];

pub const ZEROS_HEADER: [&str; 4] = ["re", "im", "multiplicity", "component"];
pub const PLOT_HEADER: [&str; 4] = ["r", "lhs", "rhs", "margin"];
pub const JENSEN_HEADER: [&str; 6] = ["function", "r", "mean_log_r", "mean_log_1", "counting", "residual"];

/// A rendered file: name and contents.
pub type Artifact = (String, String);

pub fn csv_string(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

pub fn json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn strings(h: &[&str]) -> Vec<String> {
    h.iter().map(|s| s.to_string()).collect()
}

/// Header of `growth.csv` for a table: `r`, then the `T:`, `N<k>:` and
/// `m:` columns in table order, then `logxi` when present.
pub fn growth_header(t: &GrowthTable) -> Vec<String> {
    let mut h = vec![String::from("r")];
    h.extend(t.order.iter().chain(&t.counting).chain(&t.proximity).map(|c| c.label.clone()));
    if !t.log_xi.is_empty() {
        h.push(String::from("logxi"));
    }
    h
}

pub fn growth_csv(t: &GrowthTable) -> String {
    let rows: Vec<Vec<String>> = (0..t.radii.len())
        .map(|i| {
            let mut row = vec![fmt_num(t.radii[i])];
            row.extend(t.order.iter().chain(&t.counting).chain(&t.proximity).map(|c| fmt_num(c.values[i])));
            if !t.log_xi.is_empty() {
                row.push(fmt_num(t.log_xi[i]));
            }
            row
        })
        .collect();
    csv_string(&growth_header(t), &rows)
}

pub fn zeros_csv<'a>(sets: impl IntoIterator<Item = (&'a str, &'a ZeroSet)>) -> String {
    let mut rows = Vec::new();
    for (label, zs) in sets {
        for z in &zs.zeros {
            rows.push(vec![fmt_num(z.location.re), fmt_num(z.location.im), z.multiplicity.to_string(), label.to_string()]);
        }
    }
    csv_string(&strings(&ZEROS_HEADER), &rows)
}

pub fn plot_csv(r: &SmtReport) -> String {
    let rows: Vec<Vec<String>> = (0..r.radii.len())
        .map(|i| vec![fmt_num(r.radii[i]), fmt_num(r.lhs[i]), fmt_num(r.rhs[i]), fmt_num(r.margin[i])])
        .collect();
    csv_string(&strings(&PLOT_HEADER), &rows)
}

pub fn jensen_csv(j: &JensenReport) -> String {
    let rows: Vec<Vec<String>> = j
        .rows
        .iter()
        .map(|row| {
            vec![
                row.function.clone(),
                fmt_num(row.r),
                fmt_num(row.mean_r),
                fmt_num(row.mean_1),
                fmt_num(row.counting),
                fmt_num(row.residual),
            ]
        })
        .collect();
    csv_string(&strings(&JENSEN_HEADER), &rows)
}

#[derive(Serialize)]
struct HypothesisJson {
    status: &'static str,
    detail: String,
}

#[derive(Serialize)]
struct ModelJson {
    c0: Num,
    c1: Num,
    c2: Num,
    eps: Num,
}

#[derive(Serialize)]
struct DerivedJson {
    label: String,
    lhs: Vec<Num>,
    rhs: Vec<Num>,
    margin: Vec<Num>,
}

#[derive(Serialize)]
struct CurveJson<'a> {
    target: &'a str,
    components: &'a [String],
}

#[derive(Serialize)]
struct SettingsJson {
    eps: Num,
    sfr_ratio: Num,
    log_xi: bool,
    proximity: bool,
    jensen_tol: Num,
}

#[derive(Serialize)]
struct OverrideJson {
    value: String,
    source: &'static str,
}

fn settings_json(sc: &Scenario) -> (SettingsJson, BTreeMap<String, OverrideJson>) {
    let s = &sc.settings;
    let settings = SettingsJson {
        eps: Num(s.eps),
        sfr_ratio: Num(s.sfr_ratio),
        log_xi: s.log_xi,
        proximity: s.proximity,
        jensen_tol: Num(s.jensen_tol),
    };
    let overrides = sc
        .overrides
        .iter()
        .map(|(k, v, src)| (k.clone(), OverrideJson { value: v.clone(), source: src.as_str() }))
        .collect();
    (settings, overrides)
}

#[derive(Serialize)]
struct ReportJson<'a> {
    scenario: &'a str,
    theorem: &'static str,
    curve: Option<CurveJson<'a>>,
    divisor: Vec<String>,
    radii: Vec<Num>,
    lhs: Vec<Num>,
    rhs: Vec<Num>,
    margin: Vec<Num>,
    allowance: Vec<Num>,
    pass: &'a [bool],
    exceptional: Vec<Num>,
    exceptional_index: &'a [usize],
    verdict: &'static str,
    hypotheses: BTreeMap<String, HypothesisJson>,
    model: ModelJson,
    growth: Vec<Num>,
    smallness: Num,
    derived: Vec<DerivedJson>,
    warnings: &'a [String],
    settings: SettingsJson,
    overrides: BTreeMap<String, OverrideJson>,
}

pub fn verdict_str(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

pub fn report_json(sc: &Scenario, r: &SmtReport) -> String {
    let (settings, overrides) = settings_json(sc);
    let json = ReportJson {
        scenario: &sc.name,
        theorem: r.theorem.id(),
        curve: sc.curve.as_ref().map(|c| CurveJson { target: &c.target, components: &c.components }),
        divisor: sc.divisors.iter().map(|c| c.label()).collect(),
        radii: nums(&r.radii),
        lhs: nums(&r.lhs),
        rhs: nums(&r.rhs),
        margin: nums(&r.margin),
        allowance: nums(&r.allowance),
        pass: &r.pass,
        exceptional: r.exceptional.iter().map(|&i| Num(r.radii[i])).collect(),
        exceptional_index: &r.exceptional,
        verdict: verdict_str(r.verdict),
        hypotheses: r
            .hypotheses
            .iter()
            .map(|h| (h.name.clone(), HypothesisJson { status: h.status.as_str(), detail: h.detail.clone() }))
            .collect(),
        model: ModelJson { c0: Num(r.model.c0), c1: Num(r.model.c1), c2: Num(r.model.c2), eps: Num(r.model.eps) },
        growth: nums(&r.growth),
        smallness: Num(r.smallness),
        derived: r
            .derived
            .iter()
            .map(|d| DerivedJson { label: d.label.clone(), lhs: nums(&d.lhs), rhs: nums(&d.rhs), margin: nums(&d.margin) })
            .collect(),
        warnings: &r.warnings,
        settings,
        overrides,
    };
    json_string(&json)
}

#[derive(Serialize)]
struct JensenFunctionJson<'a> {
    expression: &'a str,
    residual: Vec<Num>,
}

#[derive(Serialize)]
struct JensenJson<'a> {
    scenario: &'a str,
    theorem: &'static str,
    radii: Vec<Num>,
    functions: Vec<JensenFunctionJson<'a>>,
    max_residual: Num,
    tolerance: Num,
    verdict: &'static str,
    settings: SettingsJson,
    overrides: BTreeMap<String, OverrideJson>,
}

pub fn jensen_json(sc: &Scenario, j: &JensenReport) -> String {
    let (settings, overrides) = settings_json(sc);
    let nr = j.radii.len();
    let json = JensenJson {
        scenario: &sc.name,
        theorem: "jensen",
        radii: nums(&j.radii),
        functions: j
            .rows
            .chunks(nr)
            .map(|rows| JensenFunctionJson {
                expression: &rows[0].function,
                residual: rows.iter().map(|r| Num(r.residual)).collect(),
            })
            .collect(),
        max_residual: Num(j.max_residual),
        tolerance: Num(j.tolerance),
        verdict: verdict_str(j.verdict),
        settings,
        overrides,
    };
    json_string(&json)
}

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum RelationJson {
    FlatRelation { m: i32, n: i32, c: JsonComplex },
    ProjectiveLinear { coefficients: Vec<JsonComplex> },
    Unresolved,
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    scenario: &'a str,
    kind: &'static str,
    exit_code: i32,
    message: String,
    field: Option<&'a str>,
    offset: Option<usize>,
    hypothesis: Option<&'a str>,
    relation: Option<RelationJson>,
}

pub fn error_json(scenario: &str, e: &LabError) -> String {
    let (field, offset) = match e {
        LabError::Config { field, offset, .. } => (field.as_deref(), *offset),
        _ => (None, None),
    };
    let (hypothesis, relation) = match e {
        LabError::Hypothesis { name, relation, .. } => (
            Some(name.as_str()),
            relation.as_ref().map(|r| match r {
                Relation::Flat { m, n, c } => RelationJson::FlatRelation { m: *m, n: *n, c: (*c).into() },
                Relation::Linear(a) => RelationJson::ProjectiveLinear { coefficients: a.iter().map(|c| (*c).into()).collect() },
                Relation::Unresolved => RelationJson::Unresolved,
            }),
        ),
        _ => (None, None),
    };
    json_string(&ErrorJson {
        scenario,
        kind: e.kind(),
        exit_code: e.exit_code(),
        message: e.to_string(),
        field,
        offset,
        hypothesis,
        relation,
    })
}

/// Replaces the scenario artifacts in `dir` with `files`.
pub fn write_all(dir: &Path, files: &[Artifact]) -> Result<(), LabError> {
    std::fs::create_dir_all(dir)?;
    for name in SCENARIO_FILES {
        let p = dir.join(name);
        if p.exists() {
            std::fs::remove_file(p)?;
        }
    }
    for (name, contents) in files {
        std::fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_lf_and_quotes_commas() {
        let s = csv_string(&strings(&["r", "T:O(1,1)"]), &[vec![String::from("1"), String::from("2")]]);
        assert_eq!(s, "r,\"T:O(1,1)\"\n1,2\n");
    }

    #[test]
    fn error_json_names_the_relation() {
        let e = LabError::Hypothesis {
            name: String::from("degeneracy"),
            detail: String::from("x"),
            relation: Some(Relation::Flat { m: 2, n: -1, c: wlab_core::Complex64::new(1.0, 0.0) }),
        };
        let v: serde_json::Value = serde_json::from_str(&error_json("s", &e)).unwrap();
        assert_eq!(v["exit_code"], 1);
        assert_eq!(v["relation"]["type"], "flat_relation");
        assert_eq!(v["relation"]["m"], 2);
        assert_eq!(v["relation"]["n"], -1);
        assert_eq!(v["relation"]["c"]["re"], 1.0);
    }
}
