#![allow(dead_code)]

use effham::pauli::{HamiltonianSum, HamiltonianTerm, Pauli, PauliString};
use effham::StateVector;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

pub const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

pub fn pauli_string(codes: &[u8]) -> PauliString {
    PauliString::new(codes.iter().map(|&c| PAULIS[c as usize % 4]).collect()).unwrap()
}

/// Strategy for Hamiltonians on `n` sites with up to `max_terms` raw terms.
pub fn arb_hamiltonian(n: usize, max_terms: usize) -> impl Strategy<Value = HamiltonianSum> {
    prop::collection::vec(
        (-2.0f64..2.0, prop::collection::vec(0u8..4, n)),
        0..=max_terms,
    )
    .prop_map(move |raw| {
        let terms = raw
            .into_iter()
            .map(|(c, codes)| HamiltonianTerm::new(c, pauli_string(&codes)).unwrap())
            .collect();
        HamiltonianSum::new(n, terms).unwrap()
    })
}

pub fn arb_state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_filter("nonzero", |v| {
            v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3)
        })
        .prop_map(move |v| {
            StateVector::normalized(
                n,
                v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect(),
            )
            .unwrap()
        })
}

pub fn random_hamiltonian<R: Rng>(rng: &mut R, n: usize, n_terms: usize) -> HamiltonianSum {
    let terms = (0..n_terms)
        .map(|_| {
            let codes: Vec<u8> = (0..n).map(|_| rng.random_range(0..4)).collect();
            HamiltonianTerm::new(rng.random_range(-2.0..2.0), pauli_string(&codes)).unwrap()
        })
        .collect();
    HamiltonianSum::new(n, terms).unwrap()
}

pub fn random_state<R: Rng>(rng: &mut R, n: usize) -> StateVector {
    let v = (0..1 << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(n, v).unwrap()
}

pub fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `f_θm` by explicit summation of `(1/K) Σ_k e^{i(θ_x − θ_m)k}`.
pub fn direct_phase_amplitude(theta_x: f64, theta_m: f64, k: usize) -> Complex64 {
    let d = theta_x - theta_m;
    let sum: Complex64 = (0..k)
        .map(|j| Complex64::from_polar(1.0, d * j as f64))
        .sum();
    sum / k as f64
}
