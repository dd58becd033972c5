//! Executes a validated plan and writes its outputs.

use serde::Serialize;

use noisy_qng::channels::NoiseMode;
use noisy_qng::experiments::{
    appendix_checks, build_ansatz, build_heisenberg_ring, derive_seed, landscape_scan, locate_optimum, loglog_slope,
    noise_sweep, perturbed_start, qfi_error_study, scalability, ReferenceOptimum, SweepSummary,
};
use noisy_qng::optim::{optimize, OptimizationProblem, StepRecord};

use crate::config::{OptimizePlan, Plan};
use crate::error::CliError;
use crate::output::{float, OutputDir};

const LOCATE_STREAM: u64 = u64::MAX;

fn strings(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn trajectory_header(n_params: usize) -> Vec<String> {
    let mut h = strings(&["step", "energy", "delta_e", "cond_number", "fallback_flag"]);
    h.extend((0..n_params).map(|i| format!("theta_{i}")));
    h
}

fn record_row(r: &StepRecord) -> Vec<String> {
    let mut row = vec![
        r.step.to_string(),
        float(r.energy),
        r.delta_e.map(float).unwrap_or_default(),
        float(r.cond_number),
        u8::from(r.fallback).to_string(),
    ];
    row.extend(r.theta.iter().map(|&t| float(t)));
    row
}

#[derive(Serialize)]
struct OptimizeSummary<'a> {
    rule: &'static str,
    n_params: usize,
    steps: usize,
    reference: &'a ReferenceOptimum,
    theta0: &'a [f64],
    status: &'a noisy_qng::optim::TerminalStatus,
    final_energy: f64,
    final_delta_e: Option<f64>,
}

fn run_optimize(plan: &OptimizePlan, out: &mut OutputDir) -> Result<(), CliError> {
    let circuit = build_ansatz(&plan.ansatz)?;
    let h = build_heisenberg_ring(&plan.hamiltonian)?;
    let reference = locate_optimum(
        &circuit,
        &h,
        NoiseMode::On,
        &plan.locate,
        derive_seed(plan.master_seed, 0, LOCATE_STREAM),
    )?;
    let theta0 = perturbed_start(&reference.theta, plan.init_radius, derive_seed(plan.master_seed, 0, 0));
    let problem =
        OptimizationProblem::new(circuit.clone(), h, theta0.clone(), NoiseMode::On)?.with_reference_energy(reference.energy);
    let traj = optimize(&problem, &plan.rule, plan.steps)?;
    let rows: Vec<Vec<String>> = traj.records.iter().map(record_row).collect();
    out.write_csv("trajectory.csv", &trajectory_header(circuit.n_params()), &rows)?;
    out.write_json(
        "summary.json",
        &OptimizeSummary {
            rule: traj.rule.label(),
            n_params: circuit.n_params(),
            steps: plan.steps,
            reference: &reference,
            theta0: &theta0,
            status: &traj.status,
            final_energy: traj.final_energy(),
            final_delta_e: traj.final_delta_e(),
        },
    )
}

fn run_landscape(spec: &noisy_qng::experiments::LandscapeSpec, out: &mut OutputDir) -> Result<(), CliError> {
    let result = landscape_scan(spec)?;
    let grid: Vec<Vec<String>> = result
        .grid
        .iter()
        .map(|p| vec![float(p.theta_0), float(p.theta_1), float(p.energy)])
        .collect();
    out.write_csv("landscape_grid.csv", &strings(&["theta_0", "theta_1", "energy"]), &grid)?;

    let mut header = strings(&["rule", "start", "seed"]);
    header.extend(trajectory_header(2));
    let rows: Vec<Vec<String>> = result
        .runs
        .iter()
        .flat_map(|run| {
            run.trajectory.records.iter().map(move |r| {
                let mut row = vec![run.rule().label().to_string(), run.start.to_string(), run.seed.to_string()];
                row.extend(record_row(r));
                row
            })
        })
        .collect();
    out.write_csv("landscape_trajectories.csv", &header, &rows)?;
    out.write_json("landscape_reference.json", &result.reference)
}

#[derive(Serialize)]
struct SweepJson<'a> {
    references: &'a [noisy_qng::experiments::SweepReference],
    summaries: &'a [SweepSummary],
}

fn run_sweep(spec: &noisy_qng::experiments::SweepSpec, out: &mut OutputDir) -> Result<(), CliError> {
    let result = noise_sweep(spec)?;
    let rows: Vec<Vec<String>> = result
        .runs
        .iter()
        .map(|r| {
            vec![
                float(r.p_error),
                r.rule().label().to_string(),
                r.seed.to_string(),
                float(r.final_delta_e()),
                u8::from(r.diverged()).to_string(),
            ]
        })
        .collect();
    out.write_csv(
        "sweep.csv",
        &strings(&["p_error", "rule", "seed", "final_delta_e", "diverged"]),
        &rows,
    )?;
    let summary: Vec<Vec<String>> = result
        .summaries
        .iter()
        .map(|s| {
            vec![
                float(s.p_error),
                s.rule.label().to_string(),
                float(s.mean_log10_delta_e),
                float(s.std_log10_delta_e),
                s.completed.to_string(),
                s.diverged.to_string(),
            ]
        })
        .collect();
    out.write_csv(
        "sweep_summary.csv",
        &strings(&["p_error", "rule", "mean_log10_delta_e", "std_log10_delta_e", "completed", "diverged"]),
        &summary,
    )?;
    out.write_json(
        "sweep_summary.json",
        &SweepJson {
            references: &result.references,
            summaries: &result.summaries,
        },
    )
}

#[derive(Serialize)]
struct SlopeRow {
    n_qubits: usize,
    loglog_slope: Option<f64>,
}

fn run_qfi_error(spec: &noisy_qng::experiments::QfiErrorSpec, out: &mut OutputDir) -> Result<(), CliError> {
    let rows = qfi_error_study(spec)?;
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.n_qubits.to_string(),
                float(r.p_error),
                float(r.one_minus_fidelity),
                float(r.delta_avg),
            ]
        })
        .collect();
    out.write_csv(
        "qfi_error.csv",
        &strings(&["n_qubits", "p_error", "one_minus_fidelity", "delta_avg"]),
        &body,
    )?;
    let slopes: Vec<SlopeRow> = spec
        .n_qubits
        .iter()
        .map(|&n| {
            let (x, y): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.n_qubits == n)
                .map(|r| (r.one_minus_fidelity, r.delta_avg))
                .unzip();
            SlopeRow {
                n_qubits: n,
                loglog_slope: loglog_slope(&x, &y),
            }
        })
        .collect();
    out.write_json("qfi_error_slopes.json", &slopes)
}

/// Runs the plan and registers every output with the manifest.
pub fn execute(plan: &Plan, out: &mut OutputDir) -> Result<(), CliError> {
    match plan {
        Plan::Optimize(p) => run_optimize(p, out),
        Plan::Landscape(s) => run_landscape(s, out),
        Plan::Sweep(s) => run_sweep(s, out),
        Plan::QfiError(s) => run_qfi_error(s, out),
        Plan::AppendixCheck(s) => {
            let report = appendix_checks(s)?;
            out.write_json("appendix.json", &report)
        }
        Plan::Scalability(s) => {
            let report = scalability(s)?;
            out.write_json("scalability.json", &report)
        }
    }
}
