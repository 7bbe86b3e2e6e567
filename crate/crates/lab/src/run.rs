//! Running one scenario.

use std::path::{Path, PathBuf};

use wlab_core::geometry::DivisorSpec;
use wlab_core::growth::log_modulus_mean;
use wlab_core::rootcount::{counting_function, locate_zeros};
use wlab_core::smt::{check_cartan, check_general, check_smt7};
use wlab_core::{DivisorComponent, Disc, Executor, SmtReport, TargetSpace, Theorem, ZeroSet};

use crate::artifacts::{self, Artifact};
use crate::error::LabError;
use crate::exit;
use crate::scenario::{Grid, Scenario, Task};

/// Command-line adjustments applied on top of a scenario file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Output directory; overrides the scenario's `output` key.
    pub out: Option<PathBuf>,
    pub eps: Option<f64>,
    pub grid: Option<Grid>,
}

/// Jensen's formula checked row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct JensenRow {
    pub function: String,
    pub r: f64,
    pub mean_r: f64,
    pub mean_1: f64,
    pub counting: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JensenReport {
    pub radii: Vec<f64>,
    /// Grouped by function, radii ascending within each group.
    pub rows: Vec<JensenRow>,
    pub zero_sets: Vec<(String, ZeroSet)>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Evaluation {
    Smt(Box<SmtReport>),
    Jensen(JensenReport),
}

impl Evaluation {
    pub fn verdict(&self) -> bool {
        match self {
            Evaluation::Smt(r) => r.verdict,
            Evaluation::Jensen(j) => j.verdict,
        }
    }
}

/// Evaluates a validated scenario.
pub fn evaluate<E: Executor>(sc: &Scenario, exec: &E) -> Result<Evaluation, LabError> {
    sc.validate()?;
    match sc.task {
        Task::Jensen => jensen(sc, exec).map(Evaluation::Jensen),
        Task::Smt(theorem) => {
            let curve = &sc.curve.as_ref().expect("validated").map;
            let radii = sc.grid.expect("validated").radii();
            let settings = sc.settings.smt();
            let report = match theorem {
                Theorem::Thm1_1 => {
                    let d = DivisorSpec::new(curve.target(), sc.divisors.clone())?;
                    check_general(curve, &d, &radii, &settings, exec)?
                }
                Theorem::Cartan => {
                    let hs = sc
                        .divisors
                        .iter()
                        .map(|c| match c {
                            DivisorComponent::Hyperplane(a) => Ok(a.clone()),
                            other => Err(LabError::Validation(format!("cartan takes hyperplanes only, got {}", other.label()))),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    check_cartan(curve, &hs, &radii, &settings, exec)?
                }
                Theorem::Smt7 => {
                    let d = DivisorSpec::new(TargetSpace::P1xP1Flat, sc.divisors.clone())?;
                    check_smt7(curve, &d, &radii, &settings, exec)?
                }
            };
            Ok(Evaluation::Smt(Box::new(report)))
        }
    }
}

fn jensen<E: Executor>(sc: &Scenario, exec: &E) -> Result<JensenReport, LabError> {
    let j = sc.jensen.as_ref().expect("validated");
    let mut radii = j.radii.clone();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let r_max = radii[radii.len() - 1];
    let nf = j.functions.len();
    let zero_sets = exec.map(nf, &|i| -> Result<ZeroSet, LabError> {
        Ok(locate_zeros(&j.functions[i].1, Disc::centered(r_max * (1.0 + 1e-6))?)?)
    });
    let zero_sets = zero_sets.into_iter().collect::<Result<Vec<_>, _>>()?;
    let nr = radii.len();
    let cells = exec.map(nf * nr, &|k| -> Result<JensenRow, LabError> {
        let (i, r) = (k / nr, radii[k % nr]);
        let (text, h) = &j.functions[i];
        Ok(JensenRow {
            function: text.clone(),
            r,
            mean_r: log_modulus_mean(h, r)?,
            mean_1: log_modulus_mean(h, 1.0)?,
            counting: counting_function(&zero_sets[i], r, wlab_core::exprlang::MAX_VANISHING_ORDER as u32)?,
            residual: wlab_core::growth::jensen_residual(h, r)?,
        })
    });
    let rows = cells.into_iter().collect::<Result<Vec<_>, _>>()?;
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let tolerance = sc.settings.jensen_tol;
    Ok(JensenReport {
        radii,
        rows,
        zero_sets: j.functions.iter().map(|(t, _)| t.clone()).zip(zero_sets).collect(),
        max_residual,
        tolerance,
        verdict: max_residual <= tolerance,
    })
}

/// Renders the artifacts of a successful evaluation.
pub fn render(sc: &Scenario, ev: &Evaluation) -> Vec<Artifact> {
    let file = |name: &str, s: String| (name.to_string(), s);
    match ev {
        Evaluation::Smt(r) => vec![
            file(artifacts::GROWTH_CSV, artifacts::growth_csv(&r.table)),
            file(artifacts::REPORT_JSON, artifacts::report_json(sc, r)),
            file(artifacts::ZEROS_CSV, artifacts::zeros_csv(r.table.zero_sets.iter().map(|(l, z)| (l.as_str(), z)))),
            file(artifacts::PLOT_CSV, artifacts::plot_csv(r)),
        ],
        Evaluation::Jensen(j) => vec![
            file(artifacts::JENSEN_CSV, artifacts::jensen_csv(j)),
            file(artifacts::REPORT_JSON, artifacts::jensen_json(sc, j)),
            file(artifacts::ZEROS_CSV, artifacts::zeros_csv(j.zero_sets.iter().map(|(l, z)| (l.as_str(), z)))),
        ],
    }
}

/// What happened to one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub name: String,
    pub theorem: String,
    pub exit_code: i32,
    pub expect_exit: i32,
    pub verdict: Option<bool>,
    pub message: String,
    pub out_dir: PathBuf,
    pub files: Vec<String>,
}

impl Outcome {
    /// The run ended the way the scenario says it should.
    pub fn as_expected(&self) -> bool {
        self.exit_code == self.expect_exit
    }
}

fn summary_line(ev: &Evaluation) -> String {
    match ev {
        Evaluation::Smt(r) => format!(
            "verdict {} over {} radii ({} exceptional), allowance/T at r_max = {}",
            artifacts::verdict_str(r.verdict),
            r.radii.len(),
            r.exceptional.len(),
            crate::format::fmt_num((r.smallness * 1e4).round() / 1e4)
        ),
        Evaluation::Jensen(j) => format!(
            "verdict {}: {} functions x {} radii, max residual {:.3e} (tolerance {:e})",
            artifacts::verdict_str(j.verdict),
            j.rows.len() / j.radii.len().max(1),
            j.radii.len(),
            j.max_residual,
            j.tolerance
        ),
    }
}

/// Loads, evaluates and writes the artifacts of the scenario at `path`.
/// Failures are written to `error.json` and reflected in the exit code.
pub fn run_scenario<E: Executor>(path: &Path, opts: &RunOptions, exec: &E) -> Outcome {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| String::from("scenario"));
    let default_out = || PathBuf::from("out").join(&stem);
    let loaded = Scenario::load(path).map(|mut sc| {
        sc.apply(opts.eps, opts.grid);
        sc
    });
    let sc = match loaded {
        Ok(sc) => sc,
        Err(e) => {
            let out_dir = opts.out.clone().unwrap_or_else(default_out);
            return finish(stem, String::from("unknown"), exit::PASS, out_dir, Err(e));
        }
    };
    let out_dir = opts.out.clone().or_else(|| sc.output.clone()).unwrap_or_else(default_out);
    let result = evaluate(&sc, exec).map(|ev| (render(&sc, &ev), ev));
    let result = result.map(|(files, ev)| (files, ev.verdict(), summary_line(&ev)));
    finish(sc.name.clone(), sc.task.id().to_string(), sc.expect_exit, out_dir, result)
}

type Rendered = (Vec<Artifact>, bool, String);

fn finish(name: String, theorem: String, expect_exit: i32, out_dir: PathBuf, result: Result<Rendered, LabError>) -> Outcome {
    let (files, exit_code, verdict, message) = match result {
        Ok((files, verdict, message)) => {
            (files, if verdict { exit::PASS } else { exit::FAIL }, Some(verdict), message)
        }
        Err(e) => {
            let files = vec![(artifacts::ERROR_JSON.to_string(), artifacts::error_json(&name, &e))];
            (files, e.exit_code(), None, e.to_string())
        }
    };
    let names: Vec<String> = files.iter().map(|(n, _)| n.clone()).collect();
    match artifacts::write_all(&out_dir, &files) {
        Ok(()) => Outcome { name, theorem, exit_code, expect_exit, verdict, message, out_dir, files: names },
        Err(e) => Outcome {
            name,
            theorem,
            exit_code: e.exit_code(),
            expect_exit,
            verdict: None,
            message: format!("cannot write artifacts to {}: {e}", out_dir.display()),
            out_dir,
            files: Vec::new(),
        },
    }
}
