//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use effham::evolution::{exact_evolve, trotter_evolve, EvolutionMethod};
use effham::fidelity::{average_fidelity, composite_fidelity, overall_fidelity, Trial, TrialSet};
use effham::grover::*;
use effham::landscape::{argmax, candidate_set, landscape_scan, trotter_curve, ScanMethod};
use effham::tfim::*;
use effham::variational::*;
use effham::{HamiltonianSum, StateVector};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = fn() -> Outcome;

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn physics() -> (TfimParams, TrialSet) {
    let model = TfimParams::new(5, 10.0, 1.0).unwrap();
    (
        model,
        TrialSet::shared_time(initial_states(5).unwrap(), TAU).unwrap(),
    )
}

fn landscape_maximum() -> Outcome {
    let (model, trials) = physics();
    let grid = CandidateGrid::new(
        linspace(0.8, 1.2, 9).unwrap(),
        linspace(0.01, 0.09, 9).unwrap(),
    )
    .unwrap();
    let start = Instant::now();
    let pts = landscape_scan(&grid, &model, &trials, ScanMethod::Exact).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let best = &pts[argmax(&pts).unwrap()];
    let pass = best.lambda == 1.0
        && best.kappa == 0.05
        && (best.f_ave - 0.989601933446268).abs() < 1e-10
        && elapsed < 60.0;
    outcome(
        pass,
        format!(
            "argmax (λ, κ) = ({}, {}), F_ave = {:.12}, {:.2} s",
            best.lambda, best.kappa, best.f_ave, elapsed
        ),
    )
}

fn sw_formula() -> Outcome {
    let e = exact_sw_coefficients(10.0, 1.0).unwrap();
    outcome(
        e.lambda == 1.0 && e.kappa == 0.05,
        format!("(λ, κ) = ({}, {})", e.lambda, e.kappa),
    )
}

fn qpe_distribution() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_norm = 0.0f64;
    for _ in 0..100 {
        let k = 2 * rng.random_range(1..=2500);
        let theta = rng.random_range(0.0..PI);
        let d = phase_distribution(theta, k).unwrap();
        worst_norm = worst_norm.max((d.total_probability() - 1.0).abs());
    }
    let g = PhaseGrid::new(DEFAULT_K).unwrap();
    let delta_ok = [0, 1, 17, 1250, 2500].iter().all(|&m| {
        let d = phase_distribution(g.angle(m), DEFAULT_K).unwrap();
        d.amplitudes().iter().enumerate().all(|(i, a)| {
            *a == if i == g.slot(m) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    });
    let mut worst_sum = 0.0f64;
    for theta in [0.4321, 0.01 + 7.3 * g.spacing()] {
        let d = phase_distribution(theta, DEFAULT_K).unwrap();
        for m in g.indices() {
            let direct = common::direct_phase_amplitude(theta, g.angle(m), DEFAULT_K);
            worst_sum = worst_sum.max((d.amplitude(m) - direct).norm());
        }
    }
    outcome(
        worst_norm < 1e-10 && delta_ok && worst_sum < 1e-12,
        format!("max |Σ|f|² − 1| = {worst_norm:.1e}, on-grid delta {delta_ok}, closed vs direct {worst_sum:.1e}"),
    )
}

fn flip_error_shape() -> Outcome {
    let k = DEFAULT_K;
    let s = 2.0 * PI / k as f64;
    let th = 10.0 * s;
    let on_grid_exact = (0..=2500i64)
        .filter(|m| (m - 10).abs() > 2)
        .all(|m| flip_coefficient(m as f64 * s, k, th).unwrap() == ideal_flip(m as f64 * s, th));
    let samples: Vec<f64> = (0..20000)
        .map(|i| (i as f64 + 0.37) * PI / 20000.0)
        .collect();
    let err: Vec<f64> = samples
        .iter()
        .map(|&x| (flip_coefficient(x, k, th).unwrap() - ideal_flip(x, th)).abs())
        .collect();
    let far = samples
        .iter()
        .zip(&err)
        .filter(|(x, _)| (*x - th).abs() > 20.0 * s)
        .map(|(_, e)| *e)
        .fold(0.0, f64::max);
    let fine: Vec<f64> = (0..6000)
        .map(|i| (i as f64 + 0.5) * 30.0 * s / 6000.0)
        .collect();
    let (peak, _) = fine
        .iter()
        .map(|&x| {
            (
                x,
                (flip_coefficient(x, k, th).unwrap() - ideal_flip(x, th)).abs(),
            )
        })
        .chain(samples.iter().copied().zip(err.iter().copied()))
        .fold((0.0, -1.0), |b, (x, e)| if e > b.1 { (x, e) } else { b });
    let peak_offset = (peak - th).abs() / s;
    outcome(
        on_grid_exact && far < 0.02 && peak_offset <= 2.0,
        format!("on-grid exact {on_grid_exact}, far-field max |a − η| = {far:.4}, peak at {peak_offset:.2} spacings from θ_th"),
    )
}

fn grover_success() -> Outcome {
    let mut flips = vec![1.0; 64];
    flips[5] = -1.0;
    let mask: Vec<bool> = (0..64).map(|i| i == 5).collect();
    let states = trajectory(&flips, 10).unwrap();
    let worst = states
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let want = ((2 * j + 1) as f64 * (1.0f64 / 64.0).sqrt().asin())
                .sin()
                .powi(2);
            (s.probability_of(&mask) - want).abs()
        })
        .fold(0.0, f64::max);
    let p6 = states[6].probability_of(&mask);
    outcome(
        p6 >= 0.95 && worst < 1e-9,
        format!("P(6) = {p6:.6}, max deviation from sin² law {worst:.1e}"),
    )
}

fn leakage_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let s = 2.0 * PI / DEFAULT_K as f64;
    let mut worst_slack = f64::INFINITY;
    let mut max_distance = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(2..=128);
        let th = rng.random_range(5.0..200.0) * s;
        let thetas = (0..n)
            .map(|_| {
                if rng.random_bool(0.5) {
                    (th + rng.random_range(-20.0..20.0) * s).max(0.0)
                } else {
                    rng.random_range(0.0..PI)
                }
            })
            .collect();
        let c = CandidateSet::from_thetas(thetas).unwrap();
        let ideal = trajectory(&c.ideal_flips(th), 20).unwrap();
        let leaky = trajectory(&c.leaky_flips(th, DEFAULT_K).unwrap(), 20).unwrap();
        let terms = error_terms(&c, th, DEFAULT_K, 20).unwrap();
        for j in 1..=20 {
            let bound: f64 = terms[..j].iter().sum();
            let d = amplitude_distance(&ideal[j], &leaky[j]);
            max_distance = max_distance.max(d);
            worst_slack = worst_slack.min(bound - d);
        }
    }
    outcome(
        worst_slack >= -1e-12,
        format!("min (bound − distance) = {worst_slack:.2e}, max distance {max_distance:.3}"),
    )
}

fn end_to_end_search() -> Outcome {
    let (model, trials) = physics();
    let grid = CandidateGrid::new(
        linspace(0.7, 1.4, 8).unwrap(),
        linspace(0.01, 0.15, 8).unwrap(),
    )
    .unwrap();
    let target = grid.find(1.0, 0.05, 1e-9).unwrap();
    let c = candidate_set(&grid, &model, &trials, EvolutionMethod::Exact).unwrap();
    let mut sorted: Vec<f64> = c.thetas().to_vec();
    sorted.sort_by(f64::total_cmp);
    let th = 0.5 * (sorted[0] + sorted[1]);
    let j = optimal_iterations(c.len(), 1).unwrap();
    let r = run_search(&c, th, DEFAULT_K, j, FlipMode::Leaky).unwrap();
    let p = r.final_probabilities[target];
    outcome(
        r.marked_count == 1 && r.best == target && p >= 0.9,
        format!(
            "θ_th = {th:.6}, M = {}, best = ({:.4}, {:.4}), P = {p:.6} after {j} iterations, leaked {:.2e}",
            r.marked_count,
            grid.params(r.best).lambda,
            grid.params(r.best).kappa,
            r.iterations[j].leaked_probability
        ),
    )
}

fn variational_vs_trotter() -> Outcome {
    let (model, trials) = physics();
    let h = test_hamiltonian(&model, &EffectiveParams::new(1.0, 0.05).unwrap()).unwrap();
    let dt = TAU / 1000.0;
    let ans = AnsatzCircuit::trotter_layers(&h, DEFAULT_LAYERS).unwrap();
    let cfg = VariationalConfig {
        dt,
        ..VariationalConfig::default()
    };
    let var = evolve_trajectory(&ans, &vec![0.0; ans.n_params()], &h, &trials, TAU, cfg).unwrap();
    let trot = trotter_curve(&h, &trials, dt, 1000).unwrap();
    let worst = var
        .f_ave
        .iter()
        .zip(&trot)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    outcome(
        worst <= 0.05 && var.f_ave.len() == trot.len(),
        format!(
            "max |F_var − F_trot| = {worst:.4}, final {:.4} vs {:.4}",
            var.final_f_ave(),
            trot[1000]
        ),
    )
}

fn derivative_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h_step = 1e-5;
    let mut worst = 0.0f64;
    let mut psd = true;
    for _ in 0..20 {
        let n = rng.random_range(2..=4);
        let n_params = rng.random_range(1..=6);
        let gates = (0..n_params + rng.random_range(0..5))
            .map(|g| {
                let mut codes: Vec<u8> = (0..n).map(|_| rng.random_range(0..4)).collect();
                codes[rng.random_range(0..n)] = rng.random_range(1..4);
                let p = if g < n_params {
                    g
                } else {
                    rng.random_range(0..n_params)
                };
                (common::pauli_string(&codes), p)
            })
            .collect();
        let ans = AnsatzCircuit::new(n, n_params, gates).unwrap();
        let theta: Vec<f64> = (0..n_params).map(|_| rng.random_range(-PI..PI)).collect();
        let s = common::random_state(&mut rng, n);
        let h = common::random_hamiltonian(&mut rng, n, 5);

        let fd: Vec<Vec<Complex64>> = (0..n_params)
            .map(|k| {
                let mut p = theta.clone();
                let mut m = theta.clone();
                p[k] += h_step;
                m[k] -= h_step;
                let (p, m) = (
                    ans.prepare_state(&p, &s).unwrap(),
                    ans.prepare_state(&m, &s).unwrap(),
                );
                p.amplitudes()
                    .iter()
                    .zip(m.amplitudes())
                    .map(|(a, b)| (a - b) / (2.0 * h_step))
                    .collect()
            })
            .collect();
        let a = build_a(&ans, &theta, &s).unwrap();
        let c = build_c(&ans, &theta, &h, &s).unwrap();
        let psi = ans.prepare_state(&theta, &s).unwrap();
        let hpsi = h.apply_raw(psi.amplitudes());
        let a_fd = DMatrix::from_fn(n_params, n_params, |i, j| {
            effham::state::inner_raw(&fd[i], &fd[j])
        });
        let c_fd = DMatrix::from_fn(n_params, 1, |i, _| effham::state::inner_raw(&fd[i], &hpsi));
        let c_an = DMatrix::from_column_slice(n_params, 1, c.as_slice());
        worst = worst.max((&a - &a_fd).norm() / a_fd.norm());
        if c_fd.norm() > 1e-8 {
            worst = worst.max((&c_an - &c_fd).norm() / c_fd.norm());
        }
        let hermitian = (&a - a.adjoint()).norm() < 1e-12;
        let min_eig = SymmetricEigen::new(a.map(|z| z.re)).eigenvalues.min();
        psd &= hermitian && min_eig > -1e-12;
    }
    outcome(
        worst < 1e-6 && psd,
        format!("max relative error {worst:.2e}, A Hermitian PSD {psd}"),
    )
}

fn fidelity_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(1..=5);
        let n_terms = rng.random_range(1..8);
        let h = common::random_hamiltonian(&mut rng, n, n_terms);
        let trials = TrialSet::new(
            (0..rng.random_range(1..6))
                .map(|_| {
                    Trial::new(
                        common::random_state(&mut rng, n),
                        rng.random_range(-5.0..5.0),
                    )
                    .unwrap()
                })
                .collect(),
        )
        .unwrap();
        let a = composite_fidelity(&h, &trials, EvolutionMethod::Exact).unwrap();
        let b = overall_fidelity(&h, &trials, EvolutionMethod::Exact).unwrap();
        worst = worst.max((a - b).abs());
    }
    let (_, trials) = physics();
    let empty = HamiltonianSum::empty(5);
    let unit = overall_fidelity(&empty, &trials, EvolutionMethod::Exact).unwrap() == 1.0
        && average_fidelity(&empty, &trials, EvolutionMethod::Exact).unwrap() == 1.0;
    outcome(
        worst < 1e-12 && unit,
        format!("max |composite − overall| = {worst:.1e}, empty H_test gives 1: {unit}"),
    )
}

fn trotter_convergence() -> Outcome {
    let h = build_tfim(&TfimParams::new(3, 10.0, 1.0).unwrap()).unwrap();
    let mut ratios = Vec::new();
    for index in [0, 4] {
        let s = StateVector::basis(3, index).unwrap();
        let exact = exact_evolve(&h, &s, 1.0).unwrap();
        let errors: Vec<f64> = [100, 200, 400, 800, 1600]
            .iter()
            .map(|&n| {
                common::distance(
                    trotter_evolve(&h, &s, 1.0, n).unwrap().amplitudes(),
                    exact.amplitudes(),
                )
            })
            .collect();
        ratios.extend(errors.windows(2).map(|w| w[0] / w[1]));
    }
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
    outcome(
        lo >= 1.8 && hi <= 2.2,
        format!("error ratios in [{lo:.4}, {hi:.4}]"),
    )
}

fn main() {
    let criteria: [(&str, Check); 11] = [
        ("landscape maximum", landscape_maximum),
        ("effective coupling formula", sw_formula),
        ("phase estimation distribution", qpe_distribution),
        ("phase flip error shape", flip_error_shape),
        ("Grover success", grover_success),
        ("leakage bound", leakage_bound),
        ("end-to-end search", end_to_end_search),
        ("variational vs Trotter", variational_vs_trotter),
        ("derivative correctness", derivative_checks),
        ("fidelity identities", fidelity_identities),
        ("Trotter convergence", trotter_convergence),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let o = check();
        println!(
            "{} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failures += usize::from(!o.pass);
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
