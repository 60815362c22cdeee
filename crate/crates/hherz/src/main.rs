use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use hherz::harness::{apply_baseline, ValuesReport, CALIBRATION_BUDGET};
use hherz::report::{write_csv, Tabular};
use hherz::{
    init_threads, run_axioms, run_calibration, run_constants, run_inequality, run_norms, AxiomOptions, BaselineTable,
    HarnessError, InequalityReport, Scenario,
};

#[derive(Parser)]
#[command(name = "hherz", version, about = "Numerical checks for Hausdorff operators and commutators on the Heisenberg group")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Override the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the scenario's evaluation budget.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct ScenarioArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Pinned ratio table; defaults to baselines.json next to the scenario.
    #[arg(long)]
    baselines: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Cmd {
    /// Group identities and graded-matrix properties on random instances.
    Axioms {
        /// Heisenberg dimension; both 1 and 2 when omitted.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Compare every closed-form oracle with the computed value.
    Calibrate {
        #[command(flatten)]
        common: Common,
    },
    /// Herz norm of f, CBMO norm of b and the L^q norm of f over the window.
    Norms(ScenarioArgs),
    /// Kernel integral and the theorem constant.
    Constants(ScenarioArgs),
    /// LHS, constant, norms and ratio for one scenario, checked against its pinned baseline.
    Inequality(ScenarioArgs),
    /// `inequality` over a scenario file or every scenario in a directory.
    Report(ScenarioArgs),
}

const DEFAULT_SEED: u64 = 1;

fn emit<T: Serialize + Tabular>(reports: &[T], common: &Common, single: bool) -> anyhow::Result<()> {
    let mut sink: Box<dyn Write> = match &common.out {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    match common.format {
        Format::Json => {
            if single && reports.len() == 1 {
                serde_json::to_writer_pretty(&mut sink, &reports[0])?;
            } else {
                serde_json::to_writer_pretty(&mut sink, reports)?;
            }
            writeln!(sink)?;
        }
        Format::Csv => write_csv(reports, &mut sink)?,
    }
    sink.flush()?;
    Ok(())
}

fn load(args: &ScenarioArgs, path: &Path) -> Result<Scenario, HarnessError> {
    let mut sc = Scenario::load(path)?;
    if let Some(s) = args.common.seed {
        sc = sc.with_seed(s);
    }
    if let Some(b) = args.common.budget {
        sc = sc.with_budget(b);
    }
    Ok(sc)
}

fn baselines_path(args: &ScenarioArgs, scenario: &Path) -> PathBuf {
    args.baselines
        .clone()
        .unwrap_or_else(|| scenario.parent().unwrap_or_else(|| Path::new(".")).join("baselines.json"))
}

fn scenario_files(path: &Path) -> anyhow::Result<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "json") && p.file_name().is_some_and(|n| n != "baselines.json"))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no scenario files in {}", path.display());
    }
    Ok(files)
}

fn report_failure(e: &HarnessError, path: &Path) -> u8 {
    eprintln!("{}: {e}", path.display());
    if let HarnessError::Hypotheses(v) = e {
        for item in v {
            eprintln!("  - {item}");
        }
    }
    e.exit_code() as u8
}

fn summarize(r: &InequalityReport) {
    let ratio = match r.ratio {
        Some(x) => format!("{x:.6}"),
        None => String::from("0/0 (degenerate)"),
    };
    eprintln!("{}: ratio {ratio} [{}]", r.scenario, if r.pass { "pass" } else { "FAIL" });
    for f in r.flags() {
        eprintln!("  flag: {f}");
    }
    if let Some(b) = &r.baseline {
        if b.newly_pinned {
            eprintln!("  pinned new baseline {:.6}", b.pinned);
        } else if !b.pass {
            eprintln!("  baseline {:.6} differs by {:.2}%", b.pinned, 100.0 * b.rel_diff);
        }
    }
}

/// Runs every scenario in parallel, then applies baselines in file order.
fn inequalities(args: &ScenarioArgs) -> anyhow::Result<u8> {
    let files = scenario_files(&args.scenario)?;
    let results: Vec<Result<InequalityReport, HarnessError>> =
        files.par_iter().map(|p| load(args, p).and_then(|sc| run_inequality(&sc))).collect();

    let mut tables: BTreeMap<PathBuf, (BaselineTable, bool)> = BTreeMap::new();
    let mut reports = Vec::new();
    let mut code = 0u8;
    for (path, res) in files.iter().zip(results) {
        match res {
            Ok(mut rep) => {
                let bp = baselines_path(args, path);
                if !tables.contains_key(&bp) {
                    tables.insert(bp.clone(), (BaselineTable::load(&bp)?, false));
                }
                let (table, dirty) = tables.get_mut(&bp).expect("inserted above");
                apply_baseline(&mut rep, table);
                *dirty |= rep.baseline.as_ref().is_some_and(|b| b.newly_pinned);
                summarize(&rep);
                if !rep.pass {
                    code = code.max(1);
                }
                reports.push(rep);
            }
            Err(e) => code = code.max(report_failure(&e, path)),
        }
    }
    for (path, (table, dirty)) in &tables {
        if *dirty {
            table.save(path)?;
        }
    }
    emit(&reports, &args.common, !args.scenario.is_dir())?;
    Ok(code)
}

fn values(args: &ScenarioArgs, run: fn(&Scenario) -> Result<ValuesReport, HarnessError>) -> anyhow::Result<u8> {
    let files = scenario_files(&args.scenario)?;
    let mut reports = Vec::new();
    let mut code = 0u8;
    for path in &files {
        match load(args, path).and_then(|sc| run(&sc)) {
            Ok(r) => {
                if !r.pass {
                    code = code.max(1);
                }
                reports.push(r);
            }
            Err(e) => code = code.max(report_failure(&e, path)),
        }
    }
    emit(&reports, &args.common, !args.scenario.is_dir())?;
    Ok(code)
}

fn checks(report: hherz::CheckReport) -> hherz::CheckReport {
    for c in report.failures() {
        eprintln!("{}: {} failed (value {:e}, residual {:e}, tolerance {:e})", report.suite, c.name, c.value, c.residual, c.tolerance);
    }
    report
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    init_threads()?;
    match cli.cmd {
        Cmd::Axioms { n, samples, common } => {
            let seed = common.seed.unwrap_or(DEFAULT_SEED);
            let ns = match n {
                Some(0) => bail!("--n must be at least 1"),
                Some(n) => vec![n],
                None => vec![1, 2],
            };
            let reports =
                ns.iter().map(|&n| run_axioms(&AxiomOptions::new(n, samples, seed)).map(checks)).collect::<Result<Vec<_>, _>>()?;
            let pass = reports.iter().all(|r| r.pass);
            emit(&reports, &common, false)?;
            Ok(if pass { 0 } else { 1 })
        }
        Cmd::Calibrate { common } => {
            let r = checks(run_calibration(common.seed.unwrap_or(DEFAULT_SEED), common.budget.unwrap_or(CALIBRATION_BUDGET))?);
            let pass = r.pass;
            emit(&[r], &common, true)?;
            Ok(if pass { 0 } else { 1 })
        }
        Cmd::Norms(a) => values(&a, run_norms),
        Cmd::Constants(a) => values(&a, run_constants),
        Cmd::Inequality(a) | Cmd::Report(a) => inequalities(&a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
