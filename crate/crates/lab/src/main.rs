use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wlab::format::{fmt_complex, fmt_num};
use wlab::scenario::parse_constant;
use wlab::{exit, verify, Grid, LabError, RayonExecutor, RunOptions, Scenario};
use wlab_core::exprlang::parse;
use wlab_core::rootcount::locate_zeros;
use wlab_core::{jets, Disc, ExtendedComplex};

/// Connection Wronskians, Nevanlinna functionals and second-main-theorem
/// checks for explicit holomorphic curves.
#[derive(Parser)]
#[command(name = "wlab", version)]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Overrides {
    /// Exceptional fraction of the radius grid.
    #[arg(long)]
    eps: Option<f64>,
    /// Radius grid as min:max:count[:log|linear].
    #[arg(long)]
    grid: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file and write its artifacts.
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run every *.toml scenario in a directory.
    Verify {
        dir: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Evaluate an expression at a point.
    Eval {
        expr: String,
        #[arg(allow_hyphen_values = true)]
        z: String,
    },
    /// Connection Wronskian of a scenario's curve at a point.
    Wronskian {
        scenario: PathBuf,
        #[arg(allow_hyphen_values = true)]
        z: String,
        /// Chart index (default: the best-conditioned chart at z).
        #[arg(long)]
        chart: Option<usize>,
    },
    /// Zeros of an entire expression in |z| < radius, as CSV.
    Zeros { expr: String, radius: f64 },
}

fn options(o: &Overrides) -> Result<RunOptions, LabError> {
    let grid = o.grid.as_deref().map(Grid::parse_flag).transpose()?;
    Ok(RunOptions { out: o.out.clone(), eps: o.eps, grid })
}

fn fail(e: &LabError) -> i32 {
    eprintln!("error: {e}");
    if let LabError::Config { offset: Some(off), .. } = e {
        eprintln!("  at byte offset {off}");
    }
    e.exit_code()
}

fn executor(threads: usize) -> Result<RayonExecutor, LabError> {
    RayonExecutor::new(threads).map_err(|e| LabError::config(format!("cannot build thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(e) => fail(&e),
    };
    ExitCode::from(code as u8)
}

fn dispatch(cli: Cli) -> Result<i32, LabError> {
    match cli.command {
        Command::Run { scenario, overrides } => {
            let opts = options(&overrides)?;
            let o = wlab::run_scenario(&scenario, &opts, &executor(cli.threads)?);
            if o.verdict.is_some() {
                println!("{}: {}", o.name, o.message);
            } else {
                eprintln!("error: {}: {}", o.name, o.message);
            }
            println!("artifacts in {}: {}", o.out_dir.display(), o.files.join(", "));
            Ok(o.exit_code)
        }
        Command::Verify { dir, overrides } => {
            let opts = options(&overrides)?;
            let out = opts.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            let summary =
                verify::verify_suite(&dir, &out, &opts, &executor(cli.threads)?, |r| println!("{}", verify::format_row(r)))?;
            println!("{}/{} scenarios as expected; summary in {}", summary.ok, summary.total, out.join("summary.json").display());
            Ok(summary.exit_code())
        }
        Command::Eval { expr, z } => {
            let f = parse(&expr).map_err(|e| LabError::expression("expr", &expr, &e))?;
            let f = f.to_meromorphic().map_err(|e| LabError::Validation(e.to_string()))?;
            let z = parse_constant(&z, "z")?;
            match f.evaluate(z).map_err(|e| LabError::Numeric(e.to_string()))? {
                ExtendedComplex::Finite(v) => println!("{}", fmt_complex(v)),
                ExtendedComplex::Indeterminate(v) => println!("{} (removable singularity)", fmt_complex(v)),
                ExtendedComplex::Pole(k) => println!("pole of order {k}"),
            }
            Ok(exit::PASS)
        }
        Command::Wronskian { scenario, z, chart } => {
            let sc = Scenario::load(&scenario)?;
            let curve = sc.curve.ok_or_else(|| LabError::Validation(String::from("scenario has no [curve] section")))?;
            let z = parse_constant(&z, "z")?;
            let (w, chart) = match chart {
                Some(k) if k < curve.map.chart_count() => (jets::wronskian_in_chart(&curve.map, z, k)?, k),
                Some(k) => return Err(LabError::Validation(format!("chart {k} out of range 0..{}", curve.map.chart_count()))),
                None => jets::wronskian(&curve.map, z)?,
            };
            println!("W = {} (chart {chart})", fmt_complex(w));
            Ok(exit::PASS)
        }
        Command::Zeros { expr, radius } => {
            let h = parse(&expr).map_err(|e| LabError::expression("expr", &expr, &e))?;
            let disc = Disc::centered(radius).map_err(LabError::from)?;
            let zs = locate_zeros(&h, disc)?;
            println!("re,im,multiplicity");
            for z in &zs.zeros {
                println!("{},{},{}", fmt_num(z.location.re), fmt_num(z.location.im), z.multiplicity);
            }
            Ok(exit::PASS)
        }
    }
}
