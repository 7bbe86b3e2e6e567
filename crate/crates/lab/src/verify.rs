//! Batch runs over a directory of scenarios.

use std::path::{Path, PathBuf};

use serde::Serialize;
use wlab_core::Executor;

use crate::artifacts::{self, json_string};
use crate::error::LabError;
use crate::exit;
use crate::run::{run_scenario, Outcome, RunOptions};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub file: String,
    pub name: String,
    pub theorem: String,
    pub exit_code: i32,
    pub expect_exit: i32,
    pub ok: bool,
    pub verdict: Option<&'static str>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub ok: usize,
    pub scenarios: Vec<SummaryRow>,
}

impl Summary {
    /// Zero iff every scenario ended with its expected exit code.
    pub fn exit_code(&self) -> i32 {
        if self.ok == self.total {
            exit::PASS
        } else {
            exit::HYPOTHESIS
        }
    }
}

/// `*.toml` files directly inside `dir`, sorted by name.
pub fn scenario_files(dir: &Path) -> Result<Vec<PathBuf>, LabError> {
    let entries = std::fs::read_dir(dir).map_err(|e| LabError::config(format!("cannot read {}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let p = entry?.path();
        if p.is_file() && p.extension().is_some_and(|x| x == "toml") {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

fn row(path: &Path, o: &Outcome) -> SummaryRow {
    SummaryRow {
        file: path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        name: o.name.clone(),
        theorem: o.theorem.clone(),
        exit_code: o.exit_code,
        expect_exit: o.expect_exit,
        ok: o.as_expected(),
        verdict: o.verdict.map(artifacts::verdict_str),
        message: o.message.clone(),
    }
}

/// One line per scenario, as printed by `wlab verify`.
pub fn format_row(r: &SummaryRow) -> String {
    format!(
        "{:<4} {:<24} {:<7} exit {} (expected {}): {}",
        if r.ok { "ok" } else { "FAIL" },
        r.name,
        r.theorem,
        r.exit_code,
        r.expect_exit,
        r.message
    )
}

/// Runs every scenario in `dir`, writing each one's artifacts to
/// `out/<file stem>/` and the summary to `out/summary.json`. Scenarios run
/// one after another; each spreads its own work over `exec`. `progress`
/// sees every row as soon as it is known.
pub fn verify_suite<E: Executor>(
    dir: &Path,
    out: &Path,
    opts: &RunOptions,
    exec: &E,
    mut progress: impl FnMut(&SummaryRow),
) -> Result<Summary, LabError> {
    let files = scenario_files(dir)?;
    let mut rows = Vec::new();
    for path in &files {
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let o = run_scenario(path, &RunOptions { out: Some(out.join(stem)), ..opts.clone() }, exec);
        let r = row(path, &o);
        progress(&r);
        rows.push(r);
    }
    let summary = Summary { total: rows.len(), ok: rows.iter().filter(|r| r.ok).count(), scenarios: rows };
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join(artifacts::SUMMARY_JSON), json_string(&summary))?;
    Ok(summary)
}
