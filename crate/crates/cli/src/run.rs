use std::path::{Path, PathBuf};
use std::time::Instant;

use ndarray::Array2;
use serde::Serialize;
use tteig::analysis::{dense_eigenvalues, Ordering};
use tteig::lanczos::{lanczos_ritz, lanczos_truncated};
use tteig::solver::{power_iterate, random_block, subspace_iterate, IterationRecord};
use tteig::{expectation, Target, TTMatrix, C64};

use crate::config::{ExperimentConfig, Method, FORMAT_VERSION};
use crate::failure::{Failure, Status};
use crate::trace::write_trace;

#[derive(Debug, Serialize)]
pub struct OracleSummary {
    pub eigenvalues: Vec<f64>,
    /// Ritz value minus reference, per reported pair.
    pub errors: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub format_version: u32,
    pub run_id: String,
    pub method: Method,
    pub status: Status,
    pub converged: bool,
    pub iterations: usize,
    pub ritz_values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
    pub config: ExperimentConfig,
}

pub struct Written {
    pub status: Status,
    pub trace: PathBuf,
    pub summary: PathBuf,
}

fn ordering(target: Target) -> Ordering {
    match target {
        Target::SmallestAlgebraic => Ordering::Algebraic,
        Target::DominantMagnitude => Ordering::Magnitude,
    }
}

/// Reference eigenvalues of the configured problem, `count` of them.
pub fn oracle_values(cfg: &ExperimentConfig, a: &TTMatrix, count: usize) -> Result<Vec<f64>, Failure> {
    let values = dense_eigenvalues(a, ordering(cfg.solver.target))?;
    Ok(values.iter().take(count).map(|z| z.re).collect())
}

struct Solve {
    records: Vec<IterationRecord>,
    converged: bool,
}

fn lanczos(cfg: &ExperimentConfig, a: &TTMatrix) -> tteig::Result<Solve> {
    let s = &cfg.solver;
    let v0 = random_block(&a.col_sizes(), s)?.swap_remove(0);
    let start = Instant::now();
    let basis = lanczos_truncated(a, &v0, cfg.lanczos_steps, &s.strategy)?;
    let n = basis.len();
    // residual norms come from projected quantities, so they bottom out near
    // sqrt(machine epsilon) relative to ‖A‖; enough to show stagnation
    let av: Vec<_> = basis.vectors.iter().map(|v| a.apply(v)).collect::<tteig::Result<_>>()?;
    let mut p = Array2::<C64>::zeros((n, n));
    let mut q = Array2::<C64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            p[[i, j]] = expectation(&basis.vectors[i], a, &basis.vectors[j])?;
            q[[i, j]] = av[i].inner(&av[j])?;
        }
    }
    let form = |m: &Array2<C64>, c: &ndarray::ArrayView1<C64>, k: usize| -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..k {
            for j in 0..k {
                acc += c[i].conj() * m[[i, j]] * c[j];
            }
        }
        acc.re
    };
    let mut records = Vec::with_capacity(n);
    let mut converged = false;
    for k in 1..=n {
        let ritz = lanczos_ritz(a, &basis, k, s.m.min(k))?;
        let residuals: Vec<f64> = ritz
            .values
            .iter()
            .enumerate()
            .map(|(j, &t)| {
                let c = ritz.coefficients.column(j);
                (form(&q, &c, k) - 2.0 * t * form(&p, &c, k) + t * t * form(&basis.gram, &c, k)).max(0.0).sqrt()
            })
            .collect();
        let rank = basis.vectors[..k].iter().map(|v| v.max_rank()).max().unwrap_or(0);
        converged = ritz.values.len() == s.m && residuals.iter().zip(&ritz.values).all(|(r, t)| r / t.abs().max(1.0) < s.tol);
        records.push(IterationRecord {
            iter: k,
            ritz_values: ritz.values.clone(),
            max_imag: 0.0,
            residuals,
            ranks: vec![rank; ritz.values.len()],
            trunc_err: f64::NAN,
            a: f64::NAN,
            b: f64::NAN,
            seconds: start.elapsed().as_secs_f64(),
            locked: 0,
            dropped: 0,
            reseeded: 0,
        });
        if converged {
            break;
        }
    }
    Ok(Solve { records, converged })
}

fn solve(cfg: &ExperimentConfig, a: &TTMatrix) -> tteig::Result<Solve> {
    match cfg.method {
        Method::Subspace => {
            let v0 = random_block(&a.col_sizes(), &cfg.solver)?;
            let out = subspace_iterate(a, v0, &cfg.solver)?;
            Ok(Solve { records: out.trace.records, converged: out.converged })
        }
        Method::Power => {
            let v0 = random_block(&a.col_sizes(), &cfg.solver)?;
            let out = power_iterate(a, &v0[0], &cfg.solver)?;
            Ok(Solve { records: out.trace.records, converged: out.converged })
        }
        Method::Lanczos => lanczos(cfg, a),
    }
}

/// Runs one experiment and writes `<run_id>.trace.csv` and
/// `<run_id>.summary.json` into `out`.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Written, Failure> {
    std::fs::create_dir_all(out).map_err(|e| Failure::io(format!("{}: {e}", out.display())))?;
    let a = cfg.problem.build()?;
    let start = Instant::now();
    let (records, status, message) = match solve(cfg, &a) {
        Ok(s) => (s.records, if s.converged { Status::Converged } else { Status::MaxIterations }, None),
        Err(e @ tteig::Error::Breakdown(_)) => (Vec::new(), Status::Breakdown, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let seconds = start.elapsed().as_secs_f64();
    let m = cfg.solver.m;
    let problem_json = serde_json::to_string(&cfg.problem).expect("problem serializes");
    let trace = out.join(format!("{}.trace.csv", cfg.run_id));
    write_trace(&trace, &problem_json, m, &records)?;

    let last = records.last();
    let ritz_values = last.map_or_else(Vec::new, |r| r.ritz_values.clone());
    let oracle = if cfg.oracle {
        let eigenvalues = oracle_values(cfg, &a, m)?;
        let errors = ritz_values.iter().zip(&eigenvalues).map(|(r, e)| r - e).collect();
        Some(OracleSummary { eigenvalues, errors })
    } else {
        None
    };
    let summary = Summary {
        format_version: FORMAT_VERSION,
        run_id: cfg.run_id.clone(),
        method: cfg.method,
        status,
        converged: status == Status::Converged,
        iterations: last.map_or(0, |r| r.iter),
        ritz_values,
        residuals: last.map_or_else(Vec::new, |r| r.residuals.clone()),
        seconds,
        message,
        oracle,
        config: cfg.clone(),
    };
    let path = out.join(format!("{}.summary.json", cfg.run_id));
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    std::fs::write(&path, text + "\n").map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    Ok(Written { status, trace, summary: path })
}
