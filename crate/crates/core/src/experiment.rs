//! Parameter sweeps over polynomial degree and penalty that produce the
//! condition-number, iteration-count and constants tables, plus a
//! manufactured-solution convergence study.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::assembly::{assemble, load_vector, AssembledSystem, DgConfig, Method};
use crate::error::{Error, Result};
use crate::gll::GaussRule;
use crate::mesh::Mesh;
use crate::operator::Identity;
use crate::precond::Preconditioner;
use crate::space::DofMap;
use crate::spectral::{estimate_condition, estimate_constants, pcg, LanczosOptions, PcgOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Task {
    ConditionNumbers,
    Iterations,
    Constants,
    Convergence,
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "condition-numbers" => Ok(Task::ConditionNumbers),
            "iterations" => Ok(Task::Iterations),
            "constants" => Ok(Task::Constants),
            "convergence" => Ok(Task::Convergence),
            other => Err(Error::InvalidArgument(format!(
                "unknown task `{other}` (expected condition-numbers, iterations, constants or convergence)"
            ))),
        }
    }
}

/// Parses a comma-separated task list; an empty string gives no tasks.
pub fn parse_tasks(s: &str) -> Result<Vec<Task>> {
    let mut tasks = s.split(',').filter(|t| !t.trim().is_empty()).map(Task::from_str).collect::<Result<Vec<_>>>()?;
    tasks.sort();
    tasks.dedup();
    Ok(tasks)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub method: Method,
    pub degrees: Vec<usize>,
    /// Elements per direction.
    pub n: usize,
    pub domain: (f64, f64),
    pub alphas: Vec<f64>,
    /// Only used by LDG.
    pub beta: [f64; 2],
    pub tasks: Vec<Task>,
    /// Relative residual reduction for CG and PCG.
    pub rel_tol: f64,
    /// Relative Ritz residual for the eigenvalue estimates.
    pub eig_tol: f64,
    pub seed: u64,
    /// Record wall-clock time per case (makes reports non-reproducible).
    pub timing: bool,
    /// Meshes of the convergence study.
    pub convergence_meshes: Vec<usize>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            method: Method::Sipg,
            degrees: vec![2, 3, 4, 5, 6],
            n: 16,
            domain: (-1.0, 1.0),
            alphas: vec![10.0],
            beta: [1.0, 1.0],
            tasks: vec![Task::ConditionNumbers, Task::Iterations, Task::Constants],
            rel_tol: 1e-8,
            eig_tol: 1e-4,
            seed: 42,
            timing: true,
            convergence_meshes: vec![4, 8, 16],
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.degrees.is_empty() {
            return Err(Error::InvalidArgument("empty list of polynomial degrees".into()));
        }
        if self.alphas.is_empty() {
            return Err(Error::InvalidArgument("empty list of penalty parameters".into()));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidArgument(format!("rel_tol must lie in (0, 1), got {}", self.rel_tol)));
        }
        if !(self.eig_tol > 0.0 && self.eig_tol < 1.0) {
            return Err(Error::InvalidArgument(format!("eig_tol must lie in (0, 1), got {}", self.eig_tol)));
        }
        if let Some(&p) = self.degrees.iter().find(|&&p| p < 2) {
            return Err(Error::InvalidArgument(format!("polynomial degree must be at least 2, got {p}")));
        }
        if self.n < 2 {
            return Err(Error::InvalidArgument("need at least 2 elements per direction".into()));
        }
        for &alpha in &self.alphas {
            self.config(alpha).validate()?;
        }
        Ok(())
    }

    pub fn config(&self, alpha: f64) -> DgConfig {
        match self.method {
            Method::Sipg => DgConfig::sipg(alpha),
            Method::Ldg => DgConfig::ldg(alpha, self.beta),
        }
    }

    fn has(&self, task: Task) -> bool {
        self.tasks.contains(&task)
    }
}

/// One line of a report. Fields not requested are left empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub method: Method,
    pub p: usize,
    pub n: usize,
    pub h: f64,
    pub alpha: f64,
    pub beta: [f64; 2],
    #[serde(rename = "K_A")]
    pub k_a: Option<f64>,
    #[serde(rename = "K_TDG")]
    pub k_tdg: Option<f64>,
    pub cg_iters: Option<usize>,
    pub pcg_iters: Option<usize>,
    pub c1_jacobi: Option<f64>,
    #[serde(rename = "c2_jacobi_kerQ")]
    pub c2_jacobi_ker_q: Option<f64>,
    #[serde(rename = "c2_jacobi_full_VB")]
    pub c2_jacobi_full_vb: Option<f64>,
    pub c1_schwarz: Option<f64>,
    pub c2_schwarz: Option<f64>,
    pub wall_time_seconds: Option<f64>,
}

pub const CSV_HEADER: [&str; 16] = [
    "method",
    "p",
    "n",
    "h",
    "alpha",
    "beta",
    "K_A",
    "K_TDG",
    "cg_iters",
    "pcg_iters",
    "c1_jacobi",
    "c2_jacobi_kerQ",
    "c2_jacobi_full_VB",
    "c1_schwarz",
    "c2_schwarz",
    "wall_time_seconds",
];

/// Rounds to six significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl ResultRow {
    fn new(spec: &ExperimentSpec, mesh: &Mesh, p: usize, alpha: f64) -> Self {
        ResultRow {
            method: spec.method,
            p,
            n: mesh.n(),
            h: mesh.h(),
            alpha,
            beta: spec.config(alpha).beta,
            k_a: None,
            k_tdg: None,
            cg_iters: None,
            pcg_iters: None,
            c1_jacobi: None,
            c2_jacobi_ker_q: None,
            c2_jacobi_full_vb: None,
            c1_schwarz: None,
            c2_schwarz: None,
            wall_time_seconds: None,
        }
    }

    /// Copy with every float rounded to six significant digits.
    pub fn rounded(&self) -> Self {
        let r = |v: Option<f64>| v.map(round_sig);
        ResultRow {
            h: round_sig(self.h),
            alpha: round_sig(self.alpha),
            beta: [round_sig(self.beta[0]), round_sig(self.beta[1])],
            k_a: r(self.k_a),
            k_tdg: r(self.k_tdg),
            c1_jacobi: r(self.c1_jacobi),
            c2_jacobi_ker_q: r(self.c2_jacobi_ker_q),
            c2_jacobi_full_vb: r(self.c2_jacobi_full_vb),
            c1_schwarz: r(self.c1_schwarz),
            c2_schwarz: r(self.c2_schwarz),
            wall_time_seconds: r(self.wall_time_seconds),
            ..self.clone()
        }
    }

    /// CSV fields in [`CSV_HEADER`] order, rounded to six significant digits.
    pub fn csv_record(&self) -> Vec<String> {
        let r = self.rounded();
        vec![
            r.method.to_string(),
            r.p.to_string(),
            r.n.to_string(),
            r.h.to_string(),
            r.alpha.to_string(),
            format!("{};{}", r.beta[0], r.beta[1]),
            fmt_opt(r.k_a),
            fmt_opt(r.k_tdg),
            fmt_opt(r.cg_iters),
            fmt_opt(r.pcg_iters),
            fmt_opt(r.c1_jacobi),
            fmt_opt(r.c2_jacobi_ker_q),
            fmt_opt(r.c2_jacobi_full_vb),
            fmt_opt(r.c1_schwarz),
            fmt_opt(r.c2_schwarz),
            fmt_opt(r.wall_time_seconds),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidArgument(format!("unknown format `{other}` (expected csv or json)"))),
        }
    }
}

/// Serializes rows in the requested format.
pub fn render(rows: &[ResultRow], format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
            w.write_record(CSV_HEADER).map_err(io)?;
            for row in rows {
                w.write_record(row.csv_record()).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
            String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
        }
        Format::Json => {
            let rounded: Vec<ResultRow> = rows.iter().map(ResultRow::rounded).collect();
            let mut s = serde_json::to_string_pretty(&rounded).map_err(|e| Error::Internal(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}

/// Rewrites the report file after each row, so partial runs leave a valid file.
pub struct ReportWriter {
    path: PathBuf,
    format: Format,
    rows: Vec<ResultRow>,
}

impl ReportWriter {
    pub fn new(path: impl AsRef<Path>, format: Format) -> Result<Self> {
        let w = ReportWriter { path: path.as_ref().to_path_buf(), format, rows: Vec::new() };
        w.flush()?;
        Ok(w)
    }

    pub fn push(&mut self, row: ResultRow) -> Result<()> {
        self.rows.push(row);
        self.flush()
    }

    fn flush(&self) -> Result<()> {
        let tmp = self.path.with_extension("partial");
        let mut f = fs::File::create(&tmp)?;
        f.write_all(render(&self.rows, self.format)?.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, &self.path)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseFailure {
    pub p: usize,
    pub alpha: f64,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub convergence: Vec<ConvergenceTable>,
    pub failures: Vec<CaseFailure>,
}

impl RunOutput {
    pub fn success(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The system and preconditioner of one sweep case.
pub struct Case {
    pub mesh: Mesh,
    pub dofmap: DofMap,
    pub system: AssembledSystem,
    pub preconditioner: Preconditioner,
}

/// Assembles the table problem (`f = 1`) and builds `T_DG`.
pub fn build_case(spec: &ExperimentSpec, p: usize, alpha: f64) -> Result<Case> {
    let mesh = Mesh::new(spec.n, spec.domain)?;
    let dofmap = DofMap::new(&mesh, p)?;
    let system = assemble(&mesh, &dofmap, &spec.config(alpha), &|_, _| 1.0)?;
    let preconditioner = Preconditioner::build(&system, &mesh, &dofmap)?;
    Ok(Case { mesh, dofmap, system, preconditioner })
}

fn run_case(spec: &ExperimentSpec, p: usize, alpha: f64) -> Result<ResultRow> {
    let start = Instant::now();
    let mesh = Mesh::new(spec.n, spec.domain)?;
    let mut row = ResultRow::new(spec, &mesh, p, alpha);
    let table_tasks = [Task::ConditionNumbers, Task::Iterations, Task::Constants];
    if table_tasks.iter().any(|&t| spec.has(t)) {
        let case = build_case(spec, p, alpha)?;
        let eig = LanczosOptions { tol: spec.eig_tol, seed: spec.seed, ..Default::default() };
        let sys = &case.system;
        if spec.has(Task::ConditionNumbers) {
            let c = estimate_condition(sys, &case.preconditioner, &eig)?;
            row.k_a = Some(c.k_a());
            row.k_tdg = Some(c.k_tdg());
        }
        if spec.has(Task::Iterations) {
            let opts = PcgOptions::with_tol(spec.rel_tol);
            let (_, cg) = pcg(&sys.a, &Identity(sys.dim()), &sys.rhs, &opts)?;
            let (_, pc) = pcg(&sys.a, &case.preconditioner, &sys.rhs, &opts)?;
            if !cg.converged || !pc.converged {
                return Err(Error::NumericFailure("CG or PCG did not reach the tolerance".into()));
            }
            row.cg_iters = Some(cg.iterations);
            row.pcg_iters = Some(pc.iterations);
        }
        if spec.has(Task::Constants) {
            let c = estimate_constants(sys, &case.preconditioner, &case.dofmap, &eig)?;
            row.c1_jacobi = Some(c.c1_jacobi);
            row.c2_jacobi_ker_q = Some(c.c2_jacobi_ker_q);
            row.c2_jacobi_full_vb = Some(c.c2_jacobi_full_vb);
            row.c1_schwarz = Some(c.c1_schwarz);
            row.c2_schwarz = Some(c.c2_schwarz);
        }
    }
    if spec.timing {
        row.wall_time_seconds = Some(start.elapsed().as_secs_f64());
    }
    Ok(row)
}

/// Runs every `(p, alpha)` case in order, handing each finished row to
/// `sink`. Failed cases are collected and the sweep continues.
pub fn run_with(spec: &ExperimentSpec, mut sink: impl FnMut(&ResultRow) -> Result<()>) -> Result<RunOutput> {
    spec.validate()?;
    let mut out = RunOutput::default();
    for &p in &spec.degrees {
        for &alpha in &spec.alphas {
            match run_case(spec, p, alpha) {
                Ok(row) => {
                    sink(&row)?;
                    out.rows.push(row);
                }
                Err(e) => out.failures.push(CaseFailure { p, alpha, message: e.to_string() }),
            }
        }
        if spec.has(Task::Convergence) {
            let alpha = spec.alphas[0];
            match convergence_study(&spec.config(alpha), p, &spec.convergence_meshes) {
                Ok(t) => out.convergence.push(t),
                Err(e) => out.failures.push(CaseFailure { p, alpha, message: format!("convergence study: {e}") }),
            }
        }
    }
    Ok(out)
}

pub fn run(spec: &ExperimentSpec) -> Result<RunOutput> {
    run_with(spec, |_| Ok(()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub dofs: usize,
    pub h1_error: f64,
    pub l2_error: f64,
    /// `log2(e(previous n) / e(n))`, absent on the coarsest mesh.
    pub h1_rate: Option<f64>,
    pub l2_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub method: Method,
    pub p: usize,
    pub alpha: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn render(&self) -> String {
        let mut s = format!("{} p={} alpha={}\n{:>5} {:>10} {:>8} {:>12} {:>6} {:>12} {:>6}\n", self.method, self.p, self.alpha, "n", "h", "dofs", "H1 error", "rate", "L2 error", "rate");
        for r in &self.rows {
            let rate = |v: Option<f64>| v.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into());
            s += &format!(
                "{:>5} {:>10.4} {:>8} {:>12.4e} {:>6} {:>12.4e} {:>6}\n",
                r.n,
                r.h,
                r.dofs,
                r.h1_error,
                rate(r.h1_rate),
                r.l2_error,
                rate(r.l2_rate)
            );
        }
        s
    }
}

/// Broken `H^1` seminorm and `L^2` errors of a DG solution against an exact
/// solution, with a Gauss rule of `p + 3` points per direction.
pub fn discretization_errors(
    mesh: &Mesh,
    dofmap: &DofMap,
    coefficients: &[f64],
    exact: &dyn Fn(f64, f64) -> (f64, [f64; 2]),
) -> Result<(f64, f64)> {
    let p = dofmap.degree();
    let m = p + 1;
    let h = mesh.h();
    let gauss = GaussRule::new(p + 3)?;
    let table = dofmap.basis().eval(&gauss.nodes);
    let (mut e1, mut e0) = (0.0, 0.0);
    for elem in mesh.elements() {
        let base = dofmap.dof(elem.id, 0);
        for (qy, &wy) in gauss.weights.iter().enumerate() {
            let y = elem.origin[1] + 0.5 * h * (gauss.nodes[qy] + 1.0);
            for (qx, &wx) in gauss.weights.iter().enumerate() {
                let x = elem.origin[0] + 0.5 * h * (gauss.nodes[qx] + 1.0);
                let (mut u, mut ux, mut uy) = (0.0, 0.0, 0.0);
                for j in 0..m {
                    for i in 0..m {
                        let c = coefficients[base + i + m * j];
                        u += c * table.values[qx][i] * table.values[qy][j];
                        ux += c * table.derivatives[qx][i] * table.values[qy][j];
                        uy += c * table.values[qx][i] * table.derivatives[qy][j];
                    }
                }
                let (ue, [gx, gy]) = exact(x, y);
                let w = wx * wy * 0.25 * h * h;
                let s = 2.0 / h;
                e1 += w * ((s * ux - gx).powi(2) + (s * uy - gy).powi(2));
                e0 += w * (u - ue).powi(2);
            }
        }
    }
    Ok((e1.sqrt(), e0.sqrt()))
}

/// Solves `-Δu = 2π² sin(πx) sin(πy)` on `(-1, 1)^2` on each mesh and reports
/// the errors and observed rates.
pub fn convergence_study(config: &DgConfig, p: usize, meshes: &[usize]) -> Result<ConvergenceTable> {
    if meshes.is_empty() {
        return Err(Error::InvalidArgument("empty mesh list".into()));
    }
    let exact = |x: f64, y: f64| {
        let (sx, cx) = (PI * x).sin_cos();
        let (sy, cy) = (PI * y).sin_cos();
        (sx * sy, [PI * cx * sy, PI * sx * cy])
    };
    let f = |x: f64, y: f64| 2.0 * PI * PI * (PI * x).sin() * (PI * y).sin();
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for &n in meshes {
        let mesh = Mesh::new(n, (-1.0, 1.0))?;
        let dofmap = DofMap::new(&mesh, p)?;
        let mut system = assemble(&mesh, &dofmap, config, &|_, _| 0.0)?;
        system.rhs = load_vector(&mesh, &dofmap, &f)?;
        let x = if n >= 2 {
            let prec = Preconditioner::build(&system, &mesh, &dofmap)?;
            pcg(&system.a, &prec, &system.rhs, &PcgOptions::with_tol(1e-12))?.0
        } else {
            let d = crate::operator::Diagonal(system.a.diagonal().iter().map(|v| 1.0 / v).collect());
            pcg(&system.a, &d, &system.rhs, &PcgOptions::with_tol(1e-12))?.0
        };
        let (h1, l2) = discretization_errors(&mesh, &dofmap, &x, &exact)?;
        let prev = rows.last().map(|r| (r.h1_error, r.l2_error, r.h));
        let rate = |coarse: f64, fine: f64, hc: f64| (coarse / fine).ln() / (hc / mesh.h()).ln();
        rows.push(ConvergenceRow {
            n,
            h: mesh.h(),
            dofs: dofmap.total_dofs(),
            h1_error: h1,
            l2_error: l2,
            h1_rate: prev.map(|(e, _, hc)| rate(e, h1, hc)),
            l2_rate: prev.map(|(_, e, hc)| rate(e, l2, hc)),
        });
    }
    Ok(ConvergenceTable { method: config.method, p, alpha: config.alpha, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_spec() -> ExperimentSpec {
        ExperimentSpec { degrees: vec![2, 3], n: 4, timing: false, ..Default::default() }
    }

    #[test]
    fn parses_tasks_and_formats() {
        assert_eq!(parse_tasks("iterations,constants").unwrap(), vec![Task::Iterations, Task::Constants]);
        assert!(parse_tasks("").unwrap().is_empty());
        assert!(parse_tasks("bogus").is_err());
        assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
        assert!("xml".parse::<Format>().is_err());
    }

    #[test]
    fn validation() {
        assert!(quick_spec().validate().is_ok());
        assert!(ExperimentSpec { degrees: vec![], ..quick_spec() }.validate().is_err());
        assert!(ExperimentSpec { alphas: vec![], ..quick_spec() }.validate().is_err());
        assert!(ExperimentSpec { rel_tol: 1.0, ..quick_spec() }.validate().is_err());
        assert!(ExperimentSpec { alphas: vec![0.1], ..quick_spec() }.validate().is_err());
    }

    #[test]
    fn empty_task_list_gives_bare_rows() {
        let spec = ExperimentSpec { tasks: vec![], ..quick_spec() };
        let out = run(&spec).unwrap();
        assert_eq!(out.rows.len(), 2);
        let r = &out.rows[0];
        assert!(r.k_a.is_none() && r.cg_iters.is_none() && r.c1_jacobi.is_none());
        assert_eq!(r.h, 0.5);
    }

    #[test]
    fn rows_follow_degree_then_alpha_order() {
        let spec = ExperimentSpec { alphas: vec![10.0, 2.0], tasks: vec![Task::Iterations], ..quick_spec() };
        let out = run(&spec).unwrap();
        let order: Vec<(usize, f64)> = out.rows.iter().map(|r| (r.p, r.alpha)).collect();
        assert_eq!(order, vec![(2, 10.0), (2, 2.0), (3, 10.0), (3, 2.0)]);
        assert!(out.rows.iter().all(|r| r.pcg_iters.unwrap() < r.cg_iters.unwrap()));
    }

    #[test]
    fn reports_are_deterministic() {
        let spec = quick_spec();
        let a = render(&run(&spec).unwrap().rows, Format::Csv).unwrap();
        let b = render(&run(&spec).unwrap().rows, Format::Csv).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with(&CSV_HEADER.join(",")));
        let j = render(&run(&spec).unwrap().rows, Format::Json).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(parsed.as_array().unwrap().len(), 2);
        assert!(parsed[0]["K_TDG"].as_f64().unwrap() > 1.0);
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(round_sig(5258.2512), 5258.25);
        assert_eq!(round_sig(0.40356516), 0.403565);
        assert_eq!(round_sig(0.0), 0.0);
    }

    #[test]
    fn convergence_rates() {
        let t = convergence_study(&DgConfig::sipg(10.0), 2, &[4, 8]).unwrap();
        assert!(t.rows[1].h1_error < t.rows[0].h1_error);
        let rate = t.rows[1].h1_rate.unwrap();
        assert!((rate - 2.0).abs() < 0.4, "{rate}");
    }
}
