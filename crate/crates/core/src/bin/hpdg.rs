//! Command-line front end for the parameter sweeps.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use hpdg::experiment::{parse_tasks, render, run_with, ExperimentSpec, Format, ReportWriter, Task};
use hpdg::{Error, Method, Result};

#[derive(Debug, Parser)]
#[command(name = "hpdg", about = "Condition numbers, iteration counts and preconditioner constants of hp-DG discretizations")]
struct Cli {
    #[arg(long, default_value = "sipg")]
    method: Method,
    /// Polynomial degree; repeat the flag or give a range `a:b`.
    #[arg(long = "p", value_name = "P|A:B", default_values_t = vec!["2:6".to_string()])]
    p: Vec<String>,
    /// Elements per direction on (-1, 1)^2.
    #[arg(long, default_value_t = 16)]
    n: usize,
    /// Penalty parameter; repeat for a sweep.
    #[arg(long, default_values_t = vec![10.0])]
    alpha: Vec<f64>,
    /// LDG switch vector `bx,by`.
    #[arg(long, default_value = "1,1")]
    beta: String,
    /// Comma-separated subset of condition-numbers,iterations,constants,convergence.
    #[arg(long, default_value = "condition-numbers,iterations,constants")]
    tasks: String,
    /// Relative residual reduction for CG and PCG.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Report file; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed of the Lanczos start vectors.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write A and the right-hand side of each case in matrix-market format.
    #[arg(long, value_name = "PATH")]
    export_matrix: Option<PathBuf>,
    /// Leave wall_time_seconds empty so identical runs give identical reports.
    #[arg(long)]
    no_timing: bool,
}

fn parse_degrees(items: &[String]) -> Result<Vec<usize>> {
    let bad = |s: &str| Error::InvalidArgument(format!("invalid degree `{s}`"));
    let mut out = Vec::new();
    for item in items {
        for part in item.split(',') {
            if let Some((a, b)) = part.split_once(':') {
                let a: usize = a.trim().parse().map_err(|_| bad(part))?;
                let b: usize = b.trim().parse().map_err(|_| bad(part))?;
                if a > b {
                    return Err(bad(part));
                }
                out.extend(a..=b);
            } else {
                out.push(part.trim().parse().map_err(|_| bad(part))?);
            }
        }
    }
    Ok(out)
}

fn parse_beta(s: &str) -> Result<[f64; 2]> {
    let parts: Vec<&str> = s.split(',').collect();
    let bad = || Error::InvalidArgument(format!("beta must be `bx,by`, got `{s}`"));
    if parts.len() != 2 {
        return Err(bad());
    }
    Ok([parts[0].trim().parse().map_err(|_| bad())?, parts[1].trim().parse().map_err(|_| bad())?])
}

fn export_path(base: &Path, p: usize, alpha: f64, single: bool) -> PathBuf {
    if single {
        return base.to_path_buf();
    }
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("matrix");
    let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("mtx");
    base.with_file_name(format!("{stem}_p{p}_alpha{alpha}.{ext}"))
}

fn rhs_path(matrix: &Path) -> PathBuf {
    let stem = matrix.file_stem().and_then(|s| s.to_str()).unwrap_or("matrix");
    matrix.with_file_name(format!("{stem}_rhs.mtx"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: Cli) -> Result<bool> {
    let method = cli.method;
    let spec = ExperimentSpec {
        method,
        degrees: parse_degrees(&cli.p)?,
        n: cli.n,
        alphas: cli.alpha.clone(),
        beta: if method == Method::Ldg { parse_beta(&cli.beta)? } else { [0.0, 0.0] },
        tasks: parse_tasks(&cli.tasks)?,
        rel_tol: cli.tol,
        seed: cli.seed,
        timing: !cli.no_timing,
        ..Default::default()
    };
    spec.validate()?;

    if let Some(base) = &cli.export_matrix {
        let single = spec.degrees.len() * spec.alphas.len() == 1;
        for &p in &spec.degrees {
            for &alpha in &spec.alphas {
                let case = hpdg::experiment::build_case(&spec, p, alpha)?;
                let path = export_path(base, p, alpha, single);
                case.system.export(&path, rhs_path(&path))?;
                eprintln!("wrote {}", path.display());
            }
        }
    }

    let mut writer = match &cli.out {
        Some(path) => Some(ReportWriter::new(path, cli.format)?),
        None => None,
    };
    let output = run_with(&spec, |row| {
        if let Some(w) = writer.as_mut() {
            w.push(row.clone())?;
        }
        eprintln!("done p={} alpha={}", row.p, row.alpha);
        Ok(())
    })?;
    if cli.out.is_none() {
        print!("{}", render(&output.rows, cli.format)?);
    }
    if spec.tasks.contains(&Task::Convergence) {
        for table in &output.convergence {
            eprint!("{}", table.render());
        }
        if let Some(path) = &cli.out {
            let conv = path.with_extension("convergence.json");
            let json = serde_json::to_string_pretty(&output.convergence).map_err(|e| Error::Internal(e.to_string()))?;
            std::fs::write(&conv, json + "\n")?;
        }
    }
    for f in &output.failures {
        eprintln!("case p={} alpha={} failed: {}", f.p, f.alpha, f.message);
    }
    Ok(output.success())
}
