use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use ogl_core::data_io::{
    balanced_error_rate, format_sparse_solution, load_dense_vector, load_groups, load_matrix_csv,
    load_vector, sign_labels, synth_overlap_dataset, write_groups, write_matrix_csv,
    write_sparse_solution, write_vector, SynthSpec,
};
use ogl_core::{
    default_rho_grid, foglasso_solve, group_stats, lambda_max, prox, prox_objective, reg_path,
    GroupStructure, LeastSquaresLoss, OglError, PenaltyParams, ProxOptions, SolverOptions,
};
use serde_json::json;
use thiserror::Error;

use crate::args::{
    Command, EvalArgs, PathArgs, Problem, ProxArgs, SolveArgs, StatsArgs, SynthArgs,
};
use crate::report::{RunReport, SolutionSummary, Stopwatch, Telemetry};

/// The solver stopped without meeting its tolerance. Outputs are still
/// written.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct NotConverged(String);

/// 2 for bad input, 3 for non-convergence, 1 for anything else.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<NotConverged>() {
            return 3;
        }
        if let Some(e) = cause.downcast_ref::<OglError>() {
            return match e {
                OglError::LineSearchOverflow { .. } => 3,
                e if e.is_input_error() => 2,
                _ => 1,
            };
        }
        if cause.is::<std::io::Error>() {
            return 2;
        }
    }
    1
}

pub fn run(command: Command) -> Result<()> {
    let threads = requested_threads()?;
    match command {
        Command::Prox(a) => run_prox(a, threads),
        Command::Solve(a) => run_solve(a, threads),
        Command::Path(a) => run_path(a, threads),
        Command::Synth(a) => run_synth(a),
        Command::Eval(a) => run_eval(a),
        Command::Stats(a) => run_stats(a),
    }
}

/// `OGL_THREADS` is accepted for forward compatibility; solves stay
/// single-threaded so results are reproducible.
fn requested_threads() -> Result<usize> {
    match std::env::var("OGL_THREADS") {
        Err(_) => Ok(1),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(OglError::InvalidParameter(format!(
                "OGL_THREADS must be a positive integer, got {s:?}"
            ))
            .into()),
        },
    }
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn emit_solution(out: Option<&Path>, x: &[f64]) -> Result<()> {
    match out {
        Some(path) => write_sparse_solution(path, x)?,
        None => print!("{}", format_sparse_solution(x)),
    }
    Ok(())
}

fn run_prox(a: ProxArgs, threads: usize) -> Result<()> {
    let mut clock = Stopwatch::start();
    let v = load_dense_vector(&a.input)?;
    let gs = load_groups(&a.groups, v.len())?;
    let params = PenaltyParams::new(a.l1, a.l2)?;
    if a.gap_tol.is_nan() || a.gap_tol <= 0.0 {
        return Err(OglError::InvalidParameter(format!(
            "--gap-tol must be positive, got {}",
            a.gap_tol
        ))
        .into());
    }
    let options = ProxOptions {
        gap_tol: a.gap_tol,
        ..ProxOptions::default()
    };
    clock.lap("load");
    let sol = prox(&v, &gs, &params, &options, None)?;
    clock.lap("prox");
    emit_solution(a.out.as_deref(), &sol.x)?;
    clock.lap("write");

    let obj = prox_objective(&sol.x, &v, &gs, &params)?;
    if let Some(path) = &a.report {
        let report = RunReport {
            command: "prox".into(),
            options: json!({
                "input": a.input, "groups": a.groups, "l1": a.l1, "l2": a.l2,
                "gap_tol": a.gap_tol, "threads": threads,
                "p_reduced": sol.p_reduced, "g_reduced": sol.g_reduced,
            }),
            timings_ms: clock.phases,
            telemetry: Telemetry {
                objective: vec![obj],
                l: vec![1.0],
                inner_iterations: vec![sol.inner_iterations],
                zero_group_fraction: vec![sol.zero_group_fraction()],
                gap: vec![sol.gap],
            },
            solution: SolutionSummary::new(&sol.x, &gs, obj, sol.converged, sol.inner_iterations),
            version: env!("CARGO_PKG_VERSION"),
        };
        write_json(path, &report)?;
    }
    if !sol.converged {
        return Err(NotConverged(format!(
            "dual solver stopped at gap {:e} > {:e}",
            sol.gap, a.gap_tol
        ))
        .into());
    }
    Ok(())
}

fn load_problem(p: &Problem) -> Result<(LeastSquaresLoss, GroupStructure)> {
    let a = load_matrix_csv(&p.matrix)?;
    let b = load_vector(&p.labels)?;
    let gs = load_groups(&p.groups, a.cols())?;
    Ok((LeastSquaresLoss::new(a, b)?, gs))
}

fn solver_options(tol: f64) -> Result<SolverOptions> {
    let options = SolverOptions {
        outer_tol: tol,
        ..SolverOptions::default()
    };
    options.validate()?;
    Ok(options)
}

fn run_solve(a: SolveArgs, threads: usize) -> Result<()> {
    let mut clock = Stopwatch::start();
    let (loss, gs) = load_problem(&a.problem)?;
    let options = solver_options(a.tol)?;
    let lmax = lambda_max(loss.matrix(), loss.response())?;
    let params = match (a.rho, a.l1, a.l2) {
        (Some(rho), _, _) => {
            if !(rho > 0.0 && rho.is_finite()) {
                return Err(OglError::InvalidParameter(format!(
                    "--rho must be positive, got {rho}"
                ))
                .into());
            }
            PenaltyParams::new(rho * lmax, rho * lmax)?
        }
        (None, Some(l1), Some(l2)) => PenaltyParams::new(l1, l2)?,
        _ => unreachable!("clap enforces --rho or both --l1 and --l2"),
    };
    clock.lap("load");
    let r = foglasso_solve(&loss, &gs, &params, &options, &vec![0.0; gs.p()])?;
    clock.lap("solve");
    emit_solution(a.out.as_deref(), &r.x)?;
    clock.lap("write");

    if let Some(path) = &a.report {
        let report = RunReport {
            command: "solve".into(),
            options: json!({
                "matrix": a.problem.matrix, "labels": a.problem.labels, "groups": a.problem.groups,
                "rho": a.rho, "lambda1": params.lambda1, "lambda2": params.lambda2,
                "lambda1_max": lmax, "tol": a.tol, "threads": threads,
                "n": loss.matrix().rows(), "p": gs.p(), "g": gs.len(),
            }),
            timings_ms: clock.phases,
            telemetry: Telemetry::from_records(&r.telemetry),
            solution: SolutionSummary::new(&r.x, &gs, r.objective, r.converged, r.iterations),
            version: env!("CARGO_PKG_VERSION"),
        };
        write_json(path, &report)?;
    }
    if !r.converged {
        return Err(NotConverged(format!(
            "no convergence after {} iterations (tolerance {:e})",
            r.iterations, a.tol
        ))
        .into());
    }
    Ok(())
}

fn rho_tag(rho: f64) -> String {
    format!("{rho}")
}

fn run_path(a: PathArgs, threads: usize) -> Result<()> {
    let mut clock = Stopwatch::start();
    let (loss, gs) = load_problem(&a.problem)?;
    let options = solver_options(a.tol)?;
    let grid = a.rho_grid.clone().unwrap_or_else(default_rho_grid);
    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    clock.lap("load");
    let path = reg_path(&loss, &gs, &grid, &options)?;
    clock.lap("solve");

    let mut failures = Vec::new();
    println!("rho,lambda1,lambda2,nonzeros,objective,converged");
    for e in &path.entries {
        let tag = rho_tag(e.rho);
        let base_options = json!({
            "matrix": a.problem.matrix, "labels": a.problem.labels, "groups": a.problem.groups,
            "rho": e.rho, "lambda1": e.lambda1, "lambda2": e.lambda2,
            "lambda1_max": path.lambda1_max, "tol": a.tol, "threads": threads,
            "n": loss.matrix().rows(), "p": gs.p(), "g": gs.len(),
        });
        let r = match &e.result {
            Ok(r) => r,
            Err(msg) => {
                println!("{tag},{},{},,,false", e.lambda1, e.lambda2);
                failures.push(format!("rho {tag}: {msg}"));
                continue;
            }
        };
        let sol_path: PathBuf = a.out_dir.join(format!("x_rho_{tag}.csv"));
        write_sparse_solution(&sol_path, &r.x)?;
        let report = RunReport {
            command: "path".into(),
            options: base_options,
            timings_ms: Default::default(),
            telemetry: Telemetry::from_records(&r.telemetry),
            solution: SolutionSummary::new(&r.x, &gs, r.objective, r.converged, r.iterations),
            version: env!("CARGO_PKG_VERSION"),
        };
        write_json(&a.out_dir.join(format!("report_rho_{tag}.json")), &report)?;
        println!(
            "{tag},{},{},{},{},{}",
            e.lambda1, e.lambda2, report.solution.nonzeros, r.objective, r.converged
        );
        if !r.converged {
            failures.push(format!(
                "rho {tag}: no convergence after {} iterations",
                r.iterations
            ));
        }
    }
    clock.lap("write");
    write_json(
        &a.out_dir.join("path_timings.json"),
        &json!({ "timings_ms": clock.phases, "rho_grid": grid }),
    )?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(NotConverged(failures.join("; ")).into())
    }
}

fn run_synth(a: SynthArgs) -> Result<()> {
    let spec = SynthSpec {
        p: a.p,
        n: a.n,
        g: a.g,
        group_size: a.group_size,
        overlap: a.overlap,
        active_groups: a.active_groups,
        noise_sigma: a.noise,
        seed: a.seed,
    };
    let (data, gs, x_true) = synth_overlap_dataset(&spec)?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    write_matrix_csv(&a.out.join("A.csv"), &data.a)?;
    write_vector(&a.out.join("b.txt"), &data.b)?;
    write_groups(&a.out.join("groups.txt"), &gs)?;
    write_sparse_solution(&a.out.join("xtrue.csv"), &x_true)?;
    Ok(())
}

fn run_eval(a: EvalArgs) -> Result<()> {
    let scores = load_dense_vector(&a.pred)?;
    let labels = load_vector(&a.labels)?;
    let ber = balanced_error_rate(&sign_labels(&scores), &labels)?;
    println!("{ber:.6}");
    Ok(())
}

fn run_stats(a: StatsArgs) -> Result<()> {
    let gs = load_groups(&a.groups, a.p)?;
    println!("{}", serde_json::to_string_pretty(&group_stats(&gs))?);
    Ok(())
}
