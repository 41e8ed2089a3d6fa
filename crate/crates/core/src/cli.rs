//! The `fellgeom` command line.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on bad input.
//! `FELLGEOM_TOL` overrides the numeric tolerance.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::dirac::{
    connes_distance, constraint_residual, dirac_space, fluctuate, spectrum_report, Constraint, ConstraintSet, Distance,
    FluctuationTerm, SolveOptions, DEFAULT_MAX_UNITS,
};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, DEFAULT_TOLERANCE};
use crate::representation::Representation;
use crate::spec::{parse_spec, solution_to_value, validation_checks, Check, GeometrySpec, Report};

pub const TOLERANCE_VAR: &str = "FELLGEOM_TOL";

#[derive(Debug, Parser)]
#[command(name = "fellgeom", version, about = "Finite Fell bundle geometries and their Dirac operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Structural checks: grading, order zero, J^2, saturation, sheaf axioms.
    Validate {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Solve for the admissible Dirac operators, pattern by pattern.
    DiracSpace {
        file: PathBuf,
        /// Comma separated constraint names; defaults to the file's list.
        #[arg(long)]
        constraints: Option<String>,
        #[arg(long, default_value_t = DEFAULT_MAX_UNITS)]
        max_units: usize,
        /// Solve every pattern instead of pruning first.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        expect_nonempty: bool,
        #[arg(long)]
        json: bool,
    },
    /// Eigenvalues and masses of the Dirac operator.
    Spectrum {
        file: PathBuf,
        #[command(flatten)]
        source: DiracSource,
        #[arg(long)]
        json: bool,
    },
    /// Apply D -> Σ r U D U* and re-check every condition.
    Fluctuate {
        file: PathBuf,
        #[arg(long)]
        terms: PathBuf,
        #[command(flatten)]
        source: DiracSource,
        #[arg(long)]
        json: bool,
    },
    /// Spectral distance between two one-dimensional units.
    Distance {
        file: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 1e-9)]
        resolution: f64,
        #[command(flatten)]
        source: DiracSource,
        #[arg(long)]
        json: bool,
    },
    /// Run everything and write the JSON report to OUT.
    Report {
        file: PathBuf,
        #[arg(long, value_name = "OUT")]
        json: PathBuf,
    },
}

#[derive(Debug, clap::Args)]
struct DiracSource {
    /// Use the representative of solver solution IDX instead of the file's `dirac`.
    #[arg(long, value_name = "IDX")]
    from_solver: Option<usize>,
}

/// Tolerance from the environment, or the default.
pub fn tolerance() -> Result<f64> {
    match std::env::var(TOLERANCE_VAR) {
        Err(_) => Ok(DEFAULT_TOLERANCE),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
            _ => Err(Error::Invalid(format!("{TOLERANCE_VAR}={s} is not a positive number"))),
        },
    }
}

fn load(path: &Path) -> Result<GeometrySpec> {
    parse_spec(&fs::read_to_string(path)?)
}

fn dirac_for(spec: &GeometrySpec, rep: &Representation, source: &DiracSource, tol: f64) -> Result<ComplexMatrix> {
    match source.from_solver {
        Some(idx) => {
            let space = dirac_space(rep, &spec.constraints, SolveOptions { tol, ..Default::default() })?;
            space
                .solutions
                .get(idx)
                .map(|s| s.representative())
                .ok_or_else(|| Error::MissingDirac(format!("solver returned {} solutions, no index {idx}", space.solutions.len())))
        }
        None => spec
            .dirac_matrix()
            .ok_or_else(|| Error::MissingDirac("the file has no `dirac` entry; pass --from-solver".into())),
    }
}

struct Outcome {
    report: Report,
    text: String,
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ")
}

fn validate(spec: &GeometrySpec, tol: f64) -> Result<Outcome> {
    let rep = spec.representation()?;
    let mut report = Report::new("validate", spec, tol);
    for c in validation_checks(&rep, tol)? {
        report.check(c);
    }
    Ok(Outcome { text: String::new(), report })
}

fn solve(
    spec: &GeometrySpec,
    constraints: &ConstraintSet,
    options: SolveOptions,
    expect_nonempty: bool,
    report: &mut Report,
) -> Result<String> {
    let rep = spec.representation()?;
    let space = dirac_space(&rep, constraints, options)?;
    let g = rep.bundle().groupoid();
    let worst = space
        .solutions
        .iter()
        .flat_map(|s| s.residuals.values().copied())
        .fold(0.0, f64::max);
    report.check(Check::new("solutions_verified", worst, options.tol));
    if expect_nonempty {
        report.check(Check::flag("nonempty", !space.solutions.is_empty()));
    }
    let mut text = format!(
        "constraints: {}\npatterns examined: {}\nsolutions: {} (real dimension {})\n",
        constraints.names().join(", "),
        space.patterns_examined,
        space.solutions.len(),
        space.total_real_dimension()
    );
    for (i, s) in space.solutions.iter().enumerate() {
        text.push_str(&format!("  [{i}] {}  dim {}\n", s.pattern.describe(g), s.real_dimension));
    }
    report.section(
        "dirac_space",
        json!({
            "constraints": constraints.names(),
            "patterns_examined": space.patterns_examined,
            "moduli_dimension": space.total_real_dimension(),
            "solutions": space.solutions.iter().map(|s| solution_to_value(&rep, s)).collect::<Vec<_>>(),
        }),
    );
    Ok(text)
}

fn spectrum(rep: &Representation, d: &ComplexMatrix, tol: f64, report: &mut Report) -> Result<String> {
    report.check(Check::new("dirac.self_adjoint", constraint_residual(rep, d, Constraint::SelfAdjoint)?, tol));
    let s = spectrum_report(rep, d, tol)?;
    let text = format!("eigenvalues: {}\nmasses: {}\n", fmt_list(&s.eigenvalues), fmt_list(&s.masses));
    report.section("spectrum", serde_json::to_value(&s).expect("plain data"));
    Ok(text)
}

fn distance_value(d: Distance) -> Value {
    match d {
        Distance::Finite(x) => json!({"unbounded": false, "value": x}),
        Distance::Unbounded => json!({"unbounded": true, "value": null}),
    }
}

fn report_all(spec: &GeometrySpec, tol: f64) -> Result<Outcome> {
    let rep = spec.representation()?;
    let mut report = Report::new("report", spec, tol);
    for c in validation_checks(&rep, tol)? {
        report.check(c);
    }
    let mut text = solve(spec, &spec.constraints, SolveOptions { tol, ..Default::default() }, false, &mut report)?;
    if let Some(d) = spec.dirac_matrix() {
        for c in spec.constraints.iter() {
            report.check(Check::new(format!("dirac.{}", c.name()), constraint_residual(&rep, &d, c)?, tol));
        }
        text.push_str(&spectrum(&rep, &d, tol, &mut report)?);
        let g = rep.bundle().groupoid();
        let mut table = serde_json::Map::new();
        for i in 0..g.len() {
            for j in (i + 1)..g.len() {
                if rep.blocks().dim(i) == 1 && rep.blocks().dim(j) == 1 {
                    let d = connes_distance(&rep, &d, i, j, 1e-9, tol)?;
                    table.insert(format!("{}-{}", g.unit_id(i), g.unit_id(j)), distance_value(d));
                }
            }
        }
        report.section("distances", Value::Object(table));
    }
    Ok(Outcome { report, text })
}

fn dispatch(cli: Cli, tol: f64) -> Result<(Outcome, bool, Option<PathBuf>)> {
    Ok(match cli.command {
        Command::Validate { file, json } => (validate(&load(&file)?, tol)?, json, None),
        Command::DiracSpace {
            file,
            constraints,
            max_units,
            exhaustive,
            expect_nonempty,
            json,
        } => {
            let spec = load(&file)?;
            let cs = match constraints {
                Some(list) => ConstraintSet::parse_list(&list)?,
                None => spec.constraints.clone(),
            };
            let opts = SolveOptions {
                max_units,
                prune: !exhaustive,
                tol,
            };
            let mut report = Report::new("dirac-space", &spec, tol);
            let text = solve(&spec, &cs, opts, expect_nonempty, &mut report)?;
            (Outcome { report, text }, json, None)
        }
        Command::Spectrum { file, source, json } => {
            let spec = load(&file)?;
            let rep = spec.representation()?;
            let d = dirac_for(&spec, &rep, &source, tol)?;
            let mut report = Report::new("spectrum", &spec, tol);
            let text = spectrum(&rep, &d, tol, &mut report)?;
            (Outcome { report, text }, json, None)
        }
        Command::Fluctuate {
            file,
            terms,
            source,
            json,
        } => {
            let spec = load(&file)?;
            let rep = spec.representation()?;
            let d = dirac_for(&spec, &rep, &source, tol)?;
            let terms_text = fs::read_to_string(&terms)?;
            let terms: Vec<FluctuationTerm> = serde_json::from_str(&terms_text).map_err(|e| Error::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
            let f = fluctuate(&rep, &d, &terms, tol)?;
            let mut report = Report::new("fluctuate", &spec, tol);
            for c in spec.constraints.iter() {
                report.check(Check::new(format!("fluctuated.{}", c.name()), f.after[&c], tol));
            }
            let table = |t: &std::collections::BTreeMap<Constraint, f64>| -> Value {
                t.iter().map(|(c, r)| (c.name().to_owned(), json!(r))).collect()
            };
            let mut text = String::from("condition            before       after\n");
            for c in Constraint::ALL {
                text.push_str(&format!("{:<20} {:.3e}   {:.3e}\n", c.name(), f.before[&c], f.after[&c]));
            }
            report.section(
                "fluctuation",
                json!({
                    "terms": terms.len(),
                    "matrix": f.fluctuated,
                    "before": table(&f.before),
                    "after": table(&f.after),
                    "s0_reality": f.s0_reality,
                }),
            );
            (Outcome { report, text }, json, None)
        }
        Command::Distance {
            file,
            from,
            to,
            resolution,
            source,
            json,
        } => {
            let spec = load(&file)?;
            let rep = spec.representation()?;
            let d = dirac_for(&spec, &rep, &source, tol)?;
            let (i, j) = (spec.config.unit_index(&from)?, spec.config.unit_index(&to)?);
            let mut report = Report::new("distance", &spec, tol);
            report.check(Check::new("dirac.self_adjoint", constraint_residual(&rep, &d, Constraint::SelfAdjoint)?, tol));
            let dist = connes_distance(&rep, &d, i, j, resolution, tol)?;
            let text = match dist {
                Distance::Finite(x) => format!("d({from}, {to}) = {x:.9}\n"),
                Distance::Unbounded => format!("d({from}, {to}) = unbounded\n"),
            };
            let mut v = distance_value(dist);
            v["from"] = json!(from);
            v["to"] = json!(to);
            v["resolution"] = json!(resolution);
            report.section("distance", v);
            (Outcome { report, text }, json, None)
        }
        Command::Report { file, json } => (report_all(&load(&file)?, tol)?, false, Some(json)),
    })
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let result = tolerance().and_then(|tol| dispatch(cli, tol));
    let (outcome, json, path) = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let rendered = serde_json::to_string_pretty(&outcome.report.to_json()).expect("report serializes") + "\n";
    let written = match path {
        Some(p) => fs::write(&p, &rendered).map(|_| {
            let _ = write!(out, "{}{}", outcome.report.render_text(), outcome.text);
            let _ = writeln!(out, "report written to {}", p.display());
        }),
        None if json => out.write_all(rendered.as_bytes()),
        None => write!(out, "{}{}", outcome.report.render_text(), outcome.text),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e}");
        return 2;
    }
    if outcome.report.pass() {
        0
    } else {
        1
    }
}
