//! Command-line front end.
//!
//! Inputs are dimensionless: `omega-a` is `Omega_A sigma`, `delta-omega-ratio`
//! is `Delta Omega / Omega_A`, `l` and `dz` are in units of `sigma`. Every
//! option can also come from a `--config` run file (see [`config`]); flags
//! win. Errors are written to stderr as a JSON object and mapped onto the
//! exit codes in [`ErrorKind`].

pub mod config;
pub mod figures;
pub mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{ModelError, OptimizeError, OracleError};
use crate::measures::{rescale_report, CorrelationReport};
use crate::model::Alignment;
use crate::optimize::{
    optimal_gap_curve, optimal_gap_for, sweep, PointSpec, Quantity, Spacing, SweepRange, SweepSpec, SweepVariable,
    DEFAULT_BOUND,
};
use crate::oracle::{certify, CertificationGrid, QuadratureSpec};
use config::{List, RunFile};
use table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Parameter,
    Numerical,
    Certification,
}

impl ErrorKind {
    pub fn exit_code(&self) -> i32 {
        match self {
            ErrorKind::Parameter => 1,
            ErrorKind::Numerical => 2,
            ErrorKind::Certification => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn parameter(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Parameter,
            message: message.into(),
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Numerical,
            message: message.into(),
        }
    }

    fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: &'a CliError,
            exit_code: i32,
        }
        serde_json::to_string(&Wrapper {
            error: self,
            exit_code: self.kind.exit_code(),
        })
        .expect("errors serialize")
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Positivity { .. } => Self::numerical(e.to_string()),
            _ => Self::parameter(e.to_string()),
        }
    }
}

impl From<OptimizeError> for CliError {
    fn from(e: OptimizeError) -> Self {
        match e {
            OptimizeError::Model(m) => m.into(),
            _ => Self::parameter(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Convergence { .. } | OracleError::ExtrapolationUnstable(_) => Self::numerical(e.to_string()),
            OracleError::Model(m) => m.into(),
            _ => Self::parameter(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "harvestlab", version, about = "Correlation harvesting by two detectors near a reflecting boundary")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full state and both measures at one parameter point.
    Point {
        #[command(flatten)]
        params: Physics,
        #[command(flatten)]
        io: Io,
    },
    /// Measures along one parameter.
    Sweep {
        #[command(flatten)]
        params: Physics,
        #[command(flatten)]
        grid: Grid,
        /// L, dz, delta_omega or omega_a.
        #[arg(long)]
        variable: Option<SweepVariable>,
        /// Comma-separated subset of concurrence, mutual_info, p_a, p_b, abs_c, abs_x.
        #[arg(long)]
        quantities: Option<List<Quantity>>,
        #[command(flatten)]
        io: Io,
    },
    /// Gap difference that maximizes a measure at one geometry.
    OptimizeGap {
        #[command(flatten)]
        params: Physics,
        /// concurrence or mutual_info.
        #[arg(long)]
        quantity: Option<Quantity>,
        /// Upper end of the search, in units of 1/sigma.
        #[arg(long)]
        bound: Option<f64>,
        #[command(flatten)]
        io: Io,
    },
    /// Optimal gap difference as a function of dz.
    GapCurve {
        #[command(flatten)]
        params: Physics,
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        quantity: Option<Quantity>,
        #[command(flatten)]
        io: Io,
    },
    /// Data behind one of the published figures.
    Reproduce {
        /// Figure id, e.g. fig3a.
        figure: String,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        lambda: Option<f64>,
        #[command(flatten)]
        io: Io,
    },
    /// Certify the closed forms against the quadrature oracle.
    Validate {
        #[arg(long)]
        rel_tol: Option<f64>,
        #[arg(long)]
        omegas: Option<List<f64>>,
        #[arg(long)]
        delta_omegas: Option<List<f64>>,
        #[arg(long)]
        separations: Option<List<f64>>,
        #[arg(long)]
        dzs: Option<List<f64>>,
        #[arg(long)]
        alignments: Option<List<Alignment>>,
        /// Absolute quadrature tolerance.
        #[arg(long)]
        abs_tol: Option<f64>,
        /// Relative quadrature tolerance.
        #[arg(long)]
        quad_rel_tol: Option<f64>,
        #[arg(long)]
        pv_window: Option<f64>,
        #[arg(long)]
        eps_ladder: Option<List<f64>>,
        #[arg(long)]
        max_subdivisions: Option<usize>,
        #[command(flatten)]
        io: Io,
    },
}

#[derive(Debug, Args)]
struct Physics {
    #[arg(long)]
    alignment: Option<Alignment>,
    /// Omega_A sigma.
    #[arg(long)]
    omega_a: Option<f64>,
    /// Delta Omega / Omega_A.
    #[arg(long, conflicts_with = "delta_omega")]
    delta_omega_ratio: Option<f64>,
    /// Delta Omega sigma, for omega_a = 0.
    #[arg(long)]
    delta_omega: Option<f64>,
    /// L / sigma.
    #[arg(long)]
    l: Option<f64>,
    /// dz / sigma.
    #[arg(long)]
    dz: Option<f64>,
    /// Coupling; outputs scale as lambda^2.
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Debug, Args)]
struct Grid {
    #[arg(long)]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// linear or log.
    #[arg(long)]
    spacing: Option<Spacing>,
}

#[derive(Debug, Args)]
struct Io {
    /// csv or json.
    #[arg(long)]
    format: Option<Format>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Run file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Physics {
    fn resolve(self, cfg: &RunFile) -> Result<PointSpec, CliError> {
        let omega_a = cfg.pick_or(self.omega_a, "omega-a", 0.1)?;
        let ratio = cfg.pick(self.delta_omega_ratio, "delta-omega-ratio")?;
        let absolute = cfg.pick(self.delta_omega, "delta-omega")?;
        let delta_omega = match (ratio, absolute) {
            (Some(_), Some(_)) => {
                return Err(CliError::parameter("give delta-omega-ratio or delta-omega, not both"));
            }
            (Some(r), None) => r * omega_a,
            (None, Some(d)) => d,
            (None, None) => 0.0,
        };
        Ok(PointSpec {
            omega_a,
            delta_omega,
            separation: cfg.pick_or(self.l, "l", 1.0)?,
            dz: cfg.pick_or(self.dz, "dz", 1.0)?,
            alignment: cfg.pick_or(self.alignment, "alignment", Alignment::Parallel)?,
            lambda: cfg.pick_or(self.lambda, "lambda", 1.0)?,
        })
    }
}

fn describe_point(table: &mut Table, p: &PointSpec) {
    table
        .meta("alignment", p.alignment)
        .meta("omega-a", p.omega_a)
        .meta("delta-omega", p.delta_omega)
        .meta("l", p.separation)
        .meta("dz", p.dz)
        .meta("lambda", p.lambda);
}

fn emit(text: &str, output: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::parameter(format!("cannot write {}: {e}", path.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::parameter(format!("cannot write output: {e}"))),
    }
}

struct Outcome {
    text: String,
    /// Set when the run completed but certification failed.
    failure: Option<CliError>,
}

impl From<String> for Outcome {
    fn from(text: String) -> Self {
        Self { text, failure: None }
    }
}

fn render(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    }
}

fn run_point(params: Physics, cfg: &RunFile, format: Format) -> Result<Outcome, CliError> {
    let p = params.resolve(cfg)?;
    let state = p.state()?;
    let report = rescale_report(&CorrelationReport::from_state(&state), p.lambda);
    let l2 = p.lambda * p.lambda;
    let fields = [
        ("p_a", state.p_a * l2),
        ("p_b", state.p_b * l2),
        ("abs_c", state.c.norm() * l2),
        ("abs_x", state.x.norm() * l2),
        ("concurrence", report.concurrence),
        ("mutual_info", report.mutual_info),
    ];
    Ok(match format {
        Format::Json => {
            let mut m = serde_json::Map::new();
            m.insert("parameters".into(), serde_json::to_value(p).expect("serializable"));
            for (k, v) in fields {
                m.insert(k.into(), serde_json::json!(v));
            }
            m.insert("perturbative_ok".into(), report.perturbative_ok.into());
            let mut s = serde_json::to_string_pretty(&m).expect("serializable");
            s.push('\n');
            s.into()
        }
        Format::Csv => {
            let mut t = Table::new(fields.iter().map(|f| f.0.to_string()).chain(["perturbative_ok".into()]).collect());
            t.meta("command", "point");
            describe_point(&mut t, &p);
            let mut row: Vec<Cell> = fields.iter().map(|f| Cell::Num(f.1)).collect();
            row.push(Cell::Bool(report.perturbative_ok));
            t.rows.push(row);
            t.to_csv().into()
        }
    })
}

fn resolve_range(grid: Grid, cfg: &RunFile, default: (f64, f64), spacing: Spacing) -> Result<SweepRange, CliError> {
    Ok(SweepRange {
        lo: cfg.pick_or(grid.from, "from", default.0)?,
        hi: cfg.pick_or(grid.to, "to", default.1)?,
        n_points: cfg.pick_or(grid.points, "points", figures::DEFAULT_POINTS)?,
        spacing: cfg.pick_or(grid.spacing, "spacing", spacing)?,
    })
}

fn run_sweep(
    params: Physics,
    grid: Grid,
    variable: Option<SweepVariable>,
    quantities: Option<List<Quantity>>,
    cfg: &RunFile,
    format: Format,
) -> Result<Outcome, CliError> {
    let fixed = params.resolve(cfg)?;
    let variable = cfg.pick_or(variable, "variable", SweepVariable::Dz)?;
    let quantities = cfg.pick_or(quantities, "quantities", List(Quantity::ALL.to_vec()))?.0;
    let range = resolve_range(grid, cfg, (0.0, 5.0), Spacing::Linear)?;
    let spec = SweepSpec {
        variable,
        range,
        fixed,
        quantities,
    };
    let rows = sweep(&spec)?;
    let mut quantities = spec.quantities.clone();
    quantities.dedup_by(|a, b| a == b);
    let mut seen = Vec::new();
    quantities.retain(|q| {
        let fresh = !seen.contains(q);
        seen.push(*q);
        fresh
    });
    let mut columns = vec![variable.as_str().to_string()];
    columns.extend(quantities.iter().map(|q| q.as_str().to_string()));
    columns.extend(["perturbative_ok".to_string(), "error".to_string()]);
    let mut t = Table::new(columns);
    t.meta("command", "sweep").meta("variable", variable);
    describe_point(&mut t, &spec.fixed);
    t.meta("from", range.lo)
        .meta("to", range.hi)
        .meta("points", range.n_points)
        .meta("spacing", if range.spacing == Spacing::Log { "log" } else { "linear" })
        .meta(
            "quantities",
            quantities.iter().map(|q| q.as_str()).collect::<Vec<_>>().join(","),
        );
    for r in rows {
        let mut row = vec![Cell::Num(r.x)];
        match &r.error {
            None => row.extend(r.values.iter().map(|&v| Cell::Num(v))),
            Some(_) => row.extend(quantities.iter().map(|_| Cell::Empty)),
        }
        row.push(Cell::Bool(r.perturbative_ok));
        row.push(r.error.map_or(Cell::Empty, Cell::Text));
        t.rows.push(row);
    }
    Ok(render(&t, format).into())
}

fn run_optimize(
    params: Physics,
    quantity: Option<Quantity>,
    bound: Option<f64>,
    cfg: &RunFile,
    format: Format,
) -> Result<Outcome, CliError> {
    let p = params.resolve(cfg)?;
    let quantity = cfg.pick_or(quantity, "quantity", Quantity::Concurrence)?;
    let bound = cfg.pick_or(bound, "bound", DEFAULT_BOUND)?;
    let r = optimal_gap_for(&p.pair(), &p.geometry(), quantity, bound)?;
    let ratio = if p.omega_a > 0.0 { r.delta_omega_star / p.omega_a } else { f64::NAN };
    Ok(match format {
        Format::Json => {
            let v = serde_json::json!({
                "parameters": {
                    "alignment": p.alignment,
                    "omega_a": p.omega_a,
                    "separation": p.separation,
                    "dz": p.dz,
                    "lambda": p.lambda,
                    "quantity": quantity,
                    "bound": bound,
                },
                "delta_omega_star": r.delta_omega_star,
                "delta_omega_ratio_star": ratio,
                "value_at_star": r.value_at_star,
                "at_lower_bound": r.at_lower_bound,
                "bracket": [r.bracket.0, r.bracket.1],
                "flat_warning": r.flat_warning,
            });
            let mut s = serde_json::to_string_pretty(&v).expect("serializable");
            s.push('\n');
            s.into()
        }
        Format::Csv => {
            let mut t = Table::new(
                [
                    "delta_omega_star",
                    "delta_omega_ratio_star",
                    "value_at_star",
                    "at_lower_bound",
                    "bracket_lo",
                    "bracket_hi",
                    "flat_warning",
                ]
                .map(String::from)
                .to_vec(),
            );
            t.meta("command", "optimize-gap");
            describe_point(&mut t, &p);
            t.meta("quantity", quantity).meta("bound", bound);
            t.rows.push(vec![
                Cell::Num(r.delta_omega_star),
                Cell::Num(ratio),
                Cell::Num(r.value_at_star),
                Cell::Bool(r.at_lower_bound),
                Cell::Num(r.bracket.0),
                Cell::Num(r.bracket.1),
                Cell::Bool(r.flat_warning),
            ]);
            t.to_csv().into()
        }
    })
}

fn run_gap_curve(
    params: Physics,
    grid: Grid,
    quantity: Option<Quantity>,
    cfg: &RunFile,
    format: Format,
) -> Result<Outcome, CliError> {
    let p = params.resolve(cfg)?;
    let quantity = cfg.pick_or(quantity, "quantity", Quantity::Concurrence)?;
    let range = resolve_range(grid, cfg, (0.1, 4.0), Spacing::Linear)?;
    SweepSpec {
        variable: SweepVariable::Dz,
        range,
        fixed: p,
        quantities: vec![quantity],
    }
    .validate()?;
    let dzs = range.points();
    let rows = optimal_gap_curve(p.omega_a, p.separation, &dzs, p.alignment, quantity)?;
    let mut t = Table::new(
        [
            "dz",
            "delta_omega_star",
            "delta_omega_ratio_star",
            "value_at_star",
            "at_lower_bound",
            "flat_warning",
            "error",
        ]
        .map(String::from)
        .to_vec(),
    );
    t.meta("command", "gap-curve")
        .meta("alignment", p.alignment)
        .meta("omega-a", p.omega_a)
        .meta("l", p.separation)
        .meta("quantity", quantity)
        .meta("from", range.lo)
        .meta("to", range.hi)
        .meta("points", range.n_points)
        .meta("spacing", if range.spacing == Spacing::Log { "log" } else { "linear" });
    for row in rows {
        t.rows.push(match row.result {
            Ok(r) => vec![
                Cell::Num(row.dz),
                Cell::Num(r.delta_omega_star),
                if p.omega_a > 0.0 { Cell::Num(r.delta_omega_star / p.omega_a) } else { Cell::Empty },
                Cell::Num(r.value_at_star),
                Cell::Bool(r.at_lower_bound),
                Cell::Bool(r.flat_warning),
                Cell::Empty,
            ],
            Err(e) => {
                let mut cells = vec![Cell::Num(row.dz)];
                cells.extend(std::iter::repeat_n(Cell::Empty, 5));
                cells.push(Cell::Text(e.to_string()));
                cells
            }
        });
    }
    Ok(render(&t, format).into())
}

#[allow(clippy::too_many_arguments)]
fn run_validate(
    rel_tol: Option<f64>,
    omegas: Option<List<f64>>,
    delta_omegas: Option<List<f64>>,
    separations: Option<List<f64>>,
    dzs: Option<List<f64>>,
    alignments: Option<List<Alignment>>,
    quad_overrides: (Option<f64>, Option<f64>, Option<f64>, Option<List<f64>>, Option<usize>),
    cfg: &RunFile,
) -> Result<Outcome, CliError> {
    let rel_tol = cfg.pick_or(rel_tol, "rel-tol", 1e-6)?;
    let d = CertificationGrid::default();
    let grid = CertificationGrid {
        omegas: cfg.pick_or(omegas, "omegas", List(d.omegas))?.0,
        delta_omegas: cfg.pick_or(delta_omegas, "delta-omegas", List(d.delta_omegas))?.0,
        separations: cfg.pick_or(separations, "separations", List(d.separations))?.0,
        dzs: cfg.pick_or(dzs, "dzs", List(d.dzs))?.0,
        alignments: cfg.pick_or(alignments, "alignments", List(d.alignments))?.0,
    };
    let (abs_tol, quad_rel_tol, pv_window, eps_ladder, max_subdivisions) = quad_overrides;
    let q = QuadratureSpec::default();
    let quad = QuadratureSpec {
        abs_tol: cfg.pick_or(abs_tol, "abs-tol", q.abs_tol)?,
        rel_tol: cfg.pick_or(quad_rel_tol, "quad-rel-tol", q.rel_tol)?,
        pv_window: cfg.pick_or(pv_window, "pv-window", q.pv_window)?,
        eps_ladder: cfg.pick_or(eps_ladder, "eps-ladder", List(q.eps_ladder))?.0,
        max_subdivisions: cfg.pick_or(max_subdivisions, "max-subdivisions", q.max_subdivisions)?,
    };
    let report = certify(&grid, &quad, rel_tol)?;
    let v = serde_json::json!({
        "grid": grid,
        "quadrature": quad,
        "report": report,
    });
    let mut text = serde_json::to_string_pretty(&v).expect("serializable");
    text.push('\n');
    let failure = (!report.passed).then(|| CliError {
        kind: ErrorKind::Certification,
        message: format!(
            "{} of {} points exceed relative tolerance {rel_tol:e}; worst {:e}",
            report.n_failed, report.n_points, report.worst_rel_err
        ),
    });
    Ok(Outcome { text, failure })
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<Option<CliError>, CliError> {
    let (outcome, io) = match cli.command {
        Command::Point { params, io } => {
            let cfg = RunFile::load(io.config.as_deref())?;
            let format = cfg.pick_or(io.format, "format", Format::Json)?;
            let o = run_point(params, &cfg, format)?;
            (o, (cfg, io))
        }
        Command::Sweep {
            params,
            grid,
            variable,
            quantities,
            io,
        } => {
            let cfg = RunFile::load(io.config.as_deref())?;
            let format = cfg.pick_or(io.format, "format", Format::Csv)?;
            let o = run_sweep(params, grid, variable, quantities, &cfg, format)?;
            (o, (cfg, io))
        }
        Command::OptimizeGap {
            params,
            quantity,
            bound,
            io,
        } => {
            let cfg = RunFile::load(io.config.as_deref())?;
            let format = cfg.pick_or(io.format, "format", Format::Json)?;
            let o = run_optimize(params, quantity, bound, &cfg, format)?;
            (o, (cfg, io))
        }
        Command::GapCurve {
            params,
            grid,
            quantity,
            io,
        } => {
            let cfg = RunFile::load(io.config.as_deref())?;
            let format = cfg.pick_or(io.format, "format", Format::Csv)?;
            let o = run_gap_curve(params, grid, quantity, &cfg, format)?;
            (o, (cfg, io))
        }
        Command::Reproduce {
            figure,
            points,
            lambda,
            io,
        } => {
            let cfg = RunFile::load(io.config.as_deref())?;
            let format = cfg.pick_or(io.format, "format", Format::Csv)?;
            let points = cfg.pick_or(points, "points", figures::DEFAULT_POINTS)?;
            let lambda = cfg.pick_or(lambda, "lambda", 1.0)?;
            if !(lambda > 0.0 && lambda.is_finite()) {
                return Err(ModelError::Domain { name: "lambda", value: lambda }.into());
            }
            let t = figures::reproduce(&figure, points, lambda)?;
            (render(&t, format).into(), (cfg, io))
        }
        Command::Validate {
            rel_tol,
            omegas,
            delta_omegas,
            separations,
            dzs,
            alignments,
            abs_tol,
            quad_rel_tol,
            pv_window,
            eps_ladder,
            max_subdivisions,
            io,
        } => {
            let cfg = RunFile::load(io.config.as_deref())?;
            let format = cfg.pick_or(io.format, "format", Format::Json)?;
            if format != Format::Json {
                return Err(CliError::parameter("validate only writes json"));
            }
            let o = run_validate(
                rel_tol,
                omegas,
                delta_omegas,
                separations,
                dzs,
                alignments,
                (abs_tol, quad_rel_tol, pv_window, eps_ladder, max_subdivisions),
                &cfg,
            )?;
            (o, (cfg, io))
        }
    };
    let (cfg, io) = io;
    cfg.pick::<PathBuf>(None, "output")?;
    cfg.finish()?;
    let output = io.output.or(cfg.pick(None, "output")?);
    emit(&outcome.text, output.as_deref(), out)?;
    Ok(outcome.failure)
}

/// Runs the command line `args` (including the program name) and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion | K::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = write!(out, "{}", e.render());
                return if e.kind() == K::DisplayHelpOnMissingArgumentOrSubcommand { 1 } else { 0 };
            }
            let e = CliError::parameter(e.render().to_string().trim().to_string());
            let _ = writeln!(err, "{}", e.to_json());
            return e.kind.exit_code();
        }
    };
    match dispatch(cli, out) {
        Ok(None) => 0,
        Ok(Some(failure)) | Err(failure) => {
            let _ = writeln!(err, "{}", failure.to_json());
            failure.kind.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("harvestlab").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn point_on_boundary_is_zero() {
        let (code, out, _) = call(&[
            "point",
            "--alignment",
            "parallel",
            "--omega-a",
            "0.1",
            "--delta-omega-ratio",
            "0",
            "--l",
            "0.5",
            "--dz",
            "0",
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        for k in ["p_a", "p_b", "abs_c", "abs_x", "concurrence", "mutual_info"] {
            assert_eq!(v[k].as_f64().unwrap(), 0.0, "{k}");
        }
    }

    #[test]
    fn point_without_boundary() {
        let (code, out, _) = call(&["point", "--alignment", "boundaryless", "--omega-a", "0", "--l", "50"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let flat = 1.0 / (4.0 * std::f64::consts::PI);
        assert!((v["p_a"].as_f64().unwrap() - flat).abs() < 1e-15);
        assert!((v["p_b"].as_f64().unwrap() - flat).abs() < 1e-15);
        assert_eq!(v["concurrence"].as_f64().unwrap(), 0.0);
        let mi_far = v["mutual_info"].as_f64().unwrap();
        let (_, near, _) = call(&["point", "--alignment", "boundaryless", "--omega-a", "0", "--l", "5"]);
        let near: serde_json::Value = serde_json::from_str(&near).unwrap();
        assert!(mi_far < 1e-6 && mi_far < near["mutual_info"].as_f64().unwrap() / 100.0);
    }

    #[test]
    fn parameter_errors_exit_1_with_json() {
        let (code, out, err) = call(&["point", "--l", "-1"]);
        assert_eq!(code, 1);
        assert!(out.is_empty());
        let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"]["kind"], "parameter");
        assert_eq!(v["exit_code"], 1);
        let (code, _, _) = call(&["point", "--omega-a", "abc"]);
        assert_eq!(code, 1);
        let (code, _, err) = call(&["reproduce", "fig99"]);
        assert_eq!(code, 1);
        assert!(err.contains("fig3a"));
    }

    #[test]
    fn empty_grid_is_reported() {
        let (code, _, err) = call(&["validate", "--dzs", ""]);
        assert_eq!(code, 1);
        assert!(err.contains("empty grid"));
    }

    #[test]
    fn tight_certification_fails_with_code_3() {
        let (code, out, err) = call(&[
            "validate",
            "--rel-tol",
            "1e-17",
            "--omegas",
            "0.1",
            "--delta-omegas",
            "0.5",
            "--separations",
            "0.5",
            "--dzs",
            "1",
            "--alignments",
            "parallel",
        ]);
        assert_eq!(code, 3);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["report"]["passed"], false);
        assert!(v["report"]["worst"].is_object());
        assert!(err.contains("certification"));
    }

    #[test]
    fn config_fills_missing_flags() {
        let dir = std::env::temp_dir().join(format!("harvestlab-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "omega-a = 0.1\nl = 0.5\ndz = 2\nformat = csv\n").unwrap();
        let p = path.to_str().unwrap();
        let (code, via_file, _) = call(&["point", "--config", p, "--dz", "1"]);
        assert_eq!(code, 0);
        let (_, direct, _) = call(&["point", "--omega-a", "0.1", "--l", "0.5", "--dz", "1", "--format", "csv"]);
        assert_eq!(via_file, direct);
        std::fs::write(&path, "omega-b = 1\n").unwrap();
        assert_eq!(call(&["point", "--config", p]).0, 1);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn sweep_csv_is_deterministic() {
        let args = [
            "sweep",
            "--variable",
            "dz",
            "--from",
            "0.1",
            "--to",
            "3",
            "--points",
            "12",
            "--quantities",
            "mutual_info,concurrence",
        ];
        let (code, a, _) = call(&args);
        assert_eq!(code, 0);
        assert_eq!(a, call(&args).1);
        let header = a.lines().find(|l| !l.starts_with('#')).unwrap();
        assert_eq!(header, "dz,mutual_info,concurrence,perturbative_ok,error");
        assert_eq!(a.lines().filter(|l| !l.starts_with('#')).count(), 13);
    }

    #[test]
    fn optimize_gap_reports_json() {
        let (code, out, _) = call(&["optimize-gap", "--omega-a", "0.1", "--l", "0.1", "--dz", "1"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["at_lower_bound"], true);
    }

    #[test]
    fn conflicting_gap_flags() {
        assert_eq!(call(&["point", "--delta-omega", "0.1", "--delta-omega-ratio", "1"]).0, 1);
    }
}
