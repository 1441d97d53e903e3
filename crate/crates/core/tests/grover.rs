mod common;

use common::direct_phase_amplitude;
use effham::grover::*;
use proptest::prelude::*;
use std::f64::consts::PI;

fn even_k() -> impl Strategy<Value = usize> {
    (1usize..=2500).prop_map(|h| 2 * h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phase_distribution_is_normalized(theta in 0.0f64..PI, k in even_k()) {
        let d = phase_distribution(theta, k).unwrap();
        prop_assert!((d.total_probability() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn flip_coefficient_is_bounded(theta in 0.0f64..PI, th in 1e-3f64..3.0, k in even_k()) {
        let a = flip_coefficient(theta, k, th).unwrap();
        prop_assert!((-1.0..=1.0).contains(&a));
    }

    #[test]
    fn closed_form_matches_direct_sum(theta in 0.0f64..PI, k in (1usize..=64).prop_map(|h| 2 * h)) {
        let d = phase_distribution(theta, k).unwrap();
        let g = d.grid();
        for m in g.indices() {
            let direct = direct_phase_amplitude(theta, g.angle(m), k);
            prop_assert!((d.amplitude(m) - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn ideal_grover_follows_closed_form(n in 2usize..200, m_frac in 0.0f64..0.5, j in 0usize..15) {
        let m = ((n as f64 * m_frac) as usize).max(1);
        let flips: Vec<f64> = (0..n).map(|i| if i < m { -1.0 } else { 1.0 }).collect();
        let mask: Vec<bool> = (0..n).map(|i| i < m).collect();
        let states = trajectory(&flips, j).unwrap();
        let expected = ((2 * j + 1) as f64 * (m as f64 / n as f64).sqrt().asin()).sin().powi(2);
        prop_assert!((states[j].probability_of(&mask) - expected).abs() < 1e-9);
        prop_assert!(states[j].leaked_probability().abs() < 1e-12);
    }

    #[test]
    fn leaky_distance_within_bound(
        thetas in prop::collection::vec(0.0f64..0.1, 2..64),
        th in 0.01f64..0.09,
        j in 1usize..=20,
    ) {
        let c = CandidateSet::from_thetas(thetas).unwrap();
        let ideal = trajectory(&c.ideal_flips(th), j).unwrap();
        let leaky = trajectory(&c.leaky_flips(th, DEFAULT_K).unwrap(), j).unwrap();
        let bound = error_bound(&c, th, DEFAULT_K, j).unwrap();
        prop_assert!(amplitude_distance(&ideal[j], &leaky[j]) <= bound + 1e-12);
        prop_assert!(leaky[j].retained_probability() <= 1.0 + 1e-12);
    }
}

#[test]
fn closed_form_matches_direct_sum_at_full_resolution() {
    let k = DEFAULT_K;
    for theta in [0.3217, 10.5 * 2.0 * PI / k as f64, 2.9] {
        let d = phase_distribution(theta, k).unwrap();
        let g = d.grid();
        let worst = g
            .indices()
            .map(|m| (d.amplitude(m) - direct_phase_amplitude(theta, g.angle(m), k)).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-12, "theta {theta}: {worst}");
    }
}

#[test]
fn on_grid_angles_give_delta_and_exact_flip() {
    let g = PhaseGrid::new(DEFAULT_K).unwrap();
    let th = 10.0 * g.spacing();
    for m in [0, 3, 9, 11, 40, 2500] {
        let d = phase_distribution(g.angle(m), DEFAULT_K).unwrap();
        assert_eq!(d.amplitude(m), num_complex::Complex64::new(1.0, 0.0));
        assert_eq!(d.total_probability(), 1.0);
        assert_eq!(flip_from_distribution(&d, th), ideal_flip(g.angle(m), th));
    }
}

#[test]
fn error_curve_peaks_at_threshold() {
    let k = DEFAULT_K;
    let s = 2.0 * PI / k as f64;
    let th = 10.0 * s;
    let samples: Vec<f64> = (1..4000).map(|i| i as f64 * 0.01 * s + 0.003 * s).collect();
    let err: Vec<f64> = samples
        .iter()
        .map(|&x| (flip_coefficient(x, k, th).unwrap() - ideal_flip(x, th)).abs())
        .collect();
    let (i_max, _) = err
        .iter()
        .enumerate()
        .fold((0, 0.0), |b, (i, &e)| if e > b.1 { (i, e) } else { b });
    assert!((samples[i_max] - th).abs() <= 2.0 * s);
    for (x, e) in samples.iter().zip(&err) {
        if (x - th).abs() > 20.0 * s {
            assert!(*e < 0.02, "theta {x}: {e}");
        }
    }
}

#[test]
fn search_report_finds_single_marked_candidate() {
    let mut thetas = vec![1.0; 64];
    thetas[37] = 0.01;
    let c = CandidateSet::from_thetas(thetas).unwrap();
    let j = optimal_iterations(64, 1).unwrap();
    for mode in [FlipMode::Ideal, FlipMode::Leaky] {
        let r = run_search(&c, 0.5, DEFAULT_K, j, mode).unwrap();
        assert_eq!(r.marked_count, 1);
        assert_eq!(r.best, 37);
        assert!(r.iterations[j].marked_probability > 0.99);
        assert!(r.near_threshold.is_empty());
    }
}

#[test]
fn no_marked_candidates_is_reported() {
    let c = CandidateSet::from_thetas(vec![1.0; 8]).unwrap();
    let r = run_search(&c, 0.5, DEFAULT_K, 3, FlipMode::Ideal).unwrap();
    assert!(r.no_marked);
    assert_eq!(r.marked_count, 0);
}
