//! The four subcommands. Each returns the files it wants written plus a
//! one-line human summary; writing and the manifest live in [`run`].

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use effham::evolution::EvolutionMethod;
use effham::fidelity::{average_fidelity, overall_fidelity, TrialSet};
use effham::grover::{
    flip_coefficient, ideal_flip, optimal_iterations, run_search, FlipMode, PhaseGrid,
};
use effham::landscape::{argmax, candidate_set, landscape_scan, trotter_curve, ScanMethod};
use effham::tfim::{exact_sw_coefficients, test_hamiltonian};
use effham::variational::{evolve_trajectory, step_count, AnsatzCircuit, VariationalConfig};
use effham::HamiltonianSum;
use serde::Serialize;

use crate::config::{self, Command, Experiment, Method, Overrides, SearchSettings};
use crate::error::{CliError, CliResult};
use crate::output::{num, sha256_hex, Csv, Manifest, OutputDir};

pub struct Produced {
    pub files: Vec<(String, String)>,
    pub summary: String,
}

fn scan_method(e: &Experiment) -> ScanMethod {
    match e.method {
        Method::Exact => ScanMethod::Exact,
        Method::Trotter { steps } => ScanMethod::Trotter { steps },
        Method::Variational => ScanMethod::Variational {
            dt: e.steps.dt,
            layers: e.steps.layers,
            regularization: e.steps.regularization,
            integrator: e.steps.integrator,
        },
    }
}

fn evolution_method(e: &Experiment) -> EvolutionMethod {
    match e.method {
        Method::Trotter { steps } => EvolutionMethod::Trotter { steps },
        _ => EvolutionMethod::Exact,
    }
}

pub fn scan(e: &Experiment) -> CliResult<Produced> {
    let grid = e.grid.as_ref().expect("validated");
    let method = scan_method(e);
    let points = landscape_scan(grid, &e.model, &e.trials, method)?;
    let mut csv = Csv::new(&["lambda", "kappa", "f_ave", "method"]);
    for p in &points {
        csv.row(&[
            num(p.lambda),
            num(p.kappa),
            num(p.f_ave),
            method.name().into(),
        ]);
    }
    let best = &points[argmax(&points).expect("grid is nonempty")];
    Ok(Produced {
        files: vec![("scan.csv".into(), csv.into_string())],
        summary: format!(
            "maximum F_ave = {:.6} at lambda = {:.4}, kappa = {:.4} ({} points, {})",
            best.f_ave,
            best.lambda,
            best.kappa,
            points.len(),
            method.name()
        ),
    })
}

#[derive(Debug, Serialize)]
struct GroverSummary {
    mode: FlipMode,
    theta_th: f64,
    k: usize,
    candidates: usize,
    marked_count: usize,
    no_marked: bool,
    iterations_used: usize,
    best_label: usize,
    best_lambda: f64,
    best_kappa: f64,
    best_fidelity: f64,
    best_probability: f64,
    marked_probability: f64,
    leaked_probability: f64,
    near_threshold: Vec<usize>,
}

pub fn grover(e: &Experiment) -> CliResult<Produced> {
    let grid = e.grid.as_ref().expect("validated");
    let s: SearchSettings = e.search.expect("validated");
    let candidates = candidate_set(grid, &e.model, &e.trials, evolution_method(e))?;
    let marked = candidates.marked_count(s.theta_th);
    let j = match s.iterations {
        Some(j) => j,
        None if marked == 0 => 0,
        None => optimal_iterations(candidates.len(), marked)?,
    };
    let mode = if s.leaky {
        FlipMode::Leaky
    } else {
        FlipMode::Ideal
    };
    let report = run_search(&candidates, s.theta_th, s.k, j, mode)?;

    let mut iterations = Csv::new(&["iteration", "marked_probability", "leaked_probability"]);
    for r in &report.iterations {
        iterations.row(&[
            r.iteration.to_string(),
            num(r.marked_probability),
            num(r.leaked_probability),
        ]);
    }
    let mut per_candidate = Csv::new(&[
        "label",
        "lambda",
        "kappa",
        "fidelity",
        "theta",
        "marked",
        "flip",
        "final_probability",
    ]);
    for (x, p) in grid.iter().enumerate() {
        per_candidate.row(&[
            x.to_string(),
            num(p.lambda),
            num(p.kappa),
            num(candidates.fidelities()[x]),
            num(candidates.thetas()[x]),
            u8::from(report.marked[x]).to_string(),
            num(report.flips[x]),
            num(report.final_probabilities[x]),
        ]);
    }
    let last = report
        .iterations
        .last()
        .expect("iteration 0 is always recorded");
    let best = grid.params(report.best);
    let summary = GroverSummary {
        mode,
        theta_th: s.theta_th,
        k: s.k,
        candidates: candidates.len(),
        marked_count: report.marked_count,
        no_marked: report.no_marked,
        iterations_used: report.iterations_used,
        best_label: report.best,
        best_lambda: best.lambda,
        best_kappa: best.kappa,
        best_fidelity: candidates.fidelities()[report.best],
        best_probability: report.final_probabilities[report.best],
        marked_probability: last.marked_probability,
        leaked_probability: last.leaked_probability,
        near_threshold: report.near_threshold.clone(),
    };
    let text = if report.no_marked {
        "no candidate is marked at this threshold".to_string()
    } else {
        format!(
            "best candidate lambda = {:.4}, kappa = {:.4} with probability {:.6} after {} iterations (M = {}, leaked {:.3e})",
            best.lambda,
            best.kappa,
            summary.best_probability,
            j,
            report.marked_count,
            last.leaked_probability
        )
    };
    Ok(Produced {
        files: vec![
            ("grover_iterations.csv".into(), iterations.into_string()),
            ("grover_candidates.csv".into(), per_candidate.into_string()),
            (
                "grover_summary.json".into(),
                serde_json::to_string_pretty(&summary).expect("plain data") + "\n",
            ),
        ],
        summary: text,
    })
}

pub fn variational(e: &Experiment) -> CliResult<Produced> {
    let v = e.variational.as_ref().expect("validated");
    let trials = TrialSet::shared_time(
        e.trials
            .trials()
            .iter()
            .map(|t| t.initial().clone())
            .collect(),
        v.t_final,
    )?;
    let n_steps = step_count(v.t_final, e.steps.dt);
    let (f_var, params) = if v.h_test.is_empty() {
        (vec![1.0; n_steps + 1], None)
    } else {
        let ansatz = AnsatzCircuit::trotter_layers(&v.h_test, e.steps.layers)?;
        let cfg = VariationalConfig {
            dt: e.steps.dt,
            regularization: e.steps.regularization,
            integrator: e.steps.integrator,
        };
        let tr = evolve_trajectory(
            &ansatz,
            &vec![0.0; ansatz.n_params()],
            &v.h_test,
            &trials,
            v.t_final,
            cfg,
        )?;
        (tr.f_ave, Some(tr.params))
    };
    let f_trot = if v.reference {
        Some(trotter_curve(&v.h_test, &trials, e.steps.dt, n_steps)?)
    } else {
        None
    };

    let mut header = vec!["t", "f_ave_variational"];
    if f_trot.is_some() {
        header.push("f_ave_trotter");
    }
    let mut csv = Csv::new(&header);
    let mut worst = 0.0f64;
    for (k, f) in f_var.iter().enumerate() {
        let mut row = vec![num(k as f64 * e.steps.dt), num(*f)];
        if let Some(tr) = &f_trot {
            row.push(num(tr[k]));
            worst = worst.max((f - tr[k]).abs());
        }
        csv.row(&row);
    }
    let mut files = vec![("variational.csv".into(), csv.into_string())];

    if let (true, Some(params)) = (v.write_params, &params) {
        let p = params[0][0].len();
        let names: Vec<String> = (0..p).map(|i| format!("theta_{i}")).collect();
        let mut header = vec!["t", "trial"];
        header.extend(names.iter().map(String::as_str));
        let mut csv = Csv::new(&header);
        for (i, history) in params.iter().enumerate() {
            for (k, theta) in history.iter().enumerate() {
                let mut row = vec![num(k as f64 * e.steps.dt), i.to_string()];
                row.extend(theta.iter().map(|x| num(*x)));
                csv.row(&row);
            }
        }
        files.push(("variational_params.csv".into(), csv.into_string()));
    }

    let last = *f_var.last().expect("at least one sample");
    let summary = match &f_trot {
        Some(tr) => format!(
            "final F_ave = {last:.6} (trotter {:.6}), max deviation {worst:.3e} over {n_steps} steps",
            tr[n_steps]
        ),
        None => format!("final F_ave = {last:.6} over {n_steps} steps"),
    };
    Ok(Produced { files, summary })
}

/// Fixture rows: `fixture,index,x,y,value`.
pub fn oracle(e: &Experiment) -> CliResult<Produced> {
    let mut csv = Csv::new(&["fixture", "index", "x", "y", "value"]);
    let mut row = |name: &str, index: usize, x: f64, y: f64, value: f64| {
        csv.row(&[name.into(), index.to_string(), num(x), num(y), num(value)]);
    };

    let sw = exact_sw_coefficients(e.model.delta, e.model.j)?;
    let h_sw = test_hamiltonian(&e.model, &sw)?;
    let fa = average_fidelity(&h_sw, &e.trials, EvolutionMethod::Exact)?;
    let f = overall_fidelity(&h_sw, &e.trials, EvolutionMethod::Exact)?;
    row("sw_point_f_ave", 0, sw.lambda, sw.kappa, fa);
    row("sw_point_overall", 0, sw.lambda, sw.kappa, f);
    let empty = HamiltonianSum::empty(e.model.n);
    row(
        "empty_h_test_f_ave",
        0,
        0.0,
        0.0,
        average_fidelity(&empty, &e.trials, EvolutionMethod::Exact)?,
    );

    if let Some(grid) = &e.grid {
        let points = landscape_scan(grid, &e.model, &e.trials, ScanMethod::Exact)?;
        for (x, p) in points.iter().enumerate() {
            row("landscape_f_ave", x, p.lambda, p.kappa, p.f_ave);
        }
    }

    let k = e.search.map_or(effham::grover::DEFAULT_K, |s| s.k);
    let spacing = PhaseGrid::new(k)?.spacing();
    let theta_th = e.search.map_or(10.0 * spacing, |s| s.theta_th);
    let upper = (3.0 * theta_th).min(PI);
    for i in 0..200 {
        let theta = (i as f64 + 0.5) * upper / 200.0;
        row(
            "flip_coefficient",
            i,
            theta,
            ideal_flip(theta, theta_th),
            flip_coefficient(theta, k, theta_th)?,
        );
    }

    if let (Some(grid), Some(s)) = (&e.grid, e.search) {
        let candidates = candidate_set(grid, &e.model, &e.trials, EvolutionMethod::Exact)?;
        let marked = candidates.marked_count(s.theta_th);
        if marked > 0 {
            let j = s
                .iterations
                .map_or_else(|| optimal_iterations(candidates.len(), marked), Ok)?;
            for (name, mode) in [
                ("grover_ideal", FlipMode::Ideal),
                ("grover_leaky", FlipMode::Leaky),
            ] {
                let report = run_search(&candidates, s.theta_th, s.k, j, mode)?;
                for r in &report.iterations {
                    row(
                        name,
                        r.iteration,
                        r.iteration as f64,
                        r.leaked_probability,
                        r.marked_probability,
                    );
                }
            }
        }
    }

    Ok(Produced {
        files: vec![("fixtures.csv".into(), csv.into_string())],
        summary: format!(
            "F_ave = {fa:.15} and F = {f:.15} at lambda = {:.4}, kappa = {:.4}",
            sw.lambda, sw.kappa
        ),
    })
}

pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub summary: String,
    pub warnings: Vec<String>,
}

/// Loads and validates the config, runs `command`, writes its outputs and a
/// manifest into the output directory.
pub fn run(command: Command, config_path: &Path, over: &Overrides) -> CliResult<RunOutcome> {
    let mut timings = BTreeMap::new();
    let start = Instant::now();
    let (source, raw) = config::load(config_path)?;
    let experiment = config::validate(config_path, &source, &raw, command, over)?;
    timings.insert("validate".to_string(), start.elapsed().as_secs_f64());

    let start = Instant::now();
    let produced = match command {
        Command::Scan => scan(&experiment),
        Command::Grover => grover(&experiment),
        Command::Variational => variational(&experiment),
        Command::Oracle => oracle(&experiment),
    }?;
    timings.insert("compute".to_string(), start.elapsed().as_secs_f64());

    let start = Instant::now();
    let mut out = OutputDir::create(&experiment.out_dir)?;
    let mut files = Vec::new();
    for (name, contents) in &produced.files {
        files.push(out.write(name, contents)?);
    }
    timings.insert("write".to_string(), start.elapsed().as_secs_f64());

    let manifest = Manifest {
        tool: "effham",
        version: env!("CARGO_PKG_VERSION"),
        command: command.name(),
        config_path: config_path.display().to_string(),
        config_sha256: sha256_hex(source.as_bytes()),
        config: &raw,
        threads: rayon::current_num_threads(),
        timings_seconds: timings,
        outputs: out.digests().clone(),
    };
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Config(format!("manifest: {e}")))?;
    let manifest_path = out.path().join("manifest.json");
    std::fs::write(&manifest_path, text + "\n").map_err(|source| CliError::Io {
        path: manifest_path.clone(),
        source,
    })?;
    files.push(manifest_path);

    Ok(RunOutcome {
        out_dir: experiment.out_dir,
        files,
        summary: produced.summary,
        warnings: experiment.warnings,
    })
}
