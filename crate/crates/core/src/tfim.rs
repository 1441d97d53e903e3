//! Transverse-field Ising chain and its second-order Schrieffer-Wolff
//! effective Hamiltonian, with open boundaries.
//!
//! ```text
//! H     = -(Δ/2) Σ_{i=1}^{N} Z_i - J Σ_{i=1}^{N-1} X_i X_{i+1}
//! H_eff = -(λ/2) Σ_{i=1}^{N-1} (X_i X_{i+1} + Y_i Y_{i+1})
//!         -(κ/2) Σ_{i=1}^{N-2} (X_i X_{i+2} + Y_i Y_{i+2}) - Z_1 - Z_N
//! ```
//!
//! `|0⟩` is the +1 eigenstate of `Z`, so `|0…0⟩` is field-aligned for `Δ > 0`
//! and `X_i|0…0⟩` are the single excitations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{HamiltonianSum, HamiltonianTerm, Pauli, PauliString};
use crate::state::StateVector;

/// Ratio `Δ/J` below which the perturbative regime is doubtful.
pub const WEAK_GAP_RATIO: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TfimParams {
    pub n: usize,
    pub delta: f64,
    pub j: f64,
}

impl TfimParams {
    pub fn new(n: usize, delta: f64, j: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "TFIM needs N >= 2, got {n}"
            )));
        }
        if !delta.is_finite() || !j.is_finite() {
            return Err(Error::InvalidArgument(
                "TFIM parameters must be finite".into(),
            ));
        }
        Ok(Self { n, delta, j })
    }

    /// True when `|Δ/J| < 5`, outside the `Δ ≫ J` regime the effective
    /// theory assumes. Callers warn; nothing is rejected.
    pub fn weak_gap(&self) -> bool {
        self.j != 0.0 && (self.delta / self.j).abs() < WEAK_GAP_RATIO
    }
}

/// Coefficients `(λ, κ)` of the effective Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    pub lambda: f64,
    pub kappa: f64,
}

impl EffectiveParams {
    pub fn new(lambda: f64, kappa: f64) -> Result<Self> {
        if !lambda.is_finite() || !kappa.is_finite() {
            return Err(Error::InvalidArgument(
                "effective coefficients must be finite".into(),
            ));
        }
        Ok(Self { lambda, kappa })
    }
}

fn pair(n: usize, i: usize, k: usize, p: Pauli) -> Result<PauliString> {
    PauliString::from_sites(n, &[(i, p), (k, p)])
}

pub fn build_tfim(p: &TfimParams) -> Result<HamiltonianSum> {
    if p.n < 2 {
        return Err(Error::InvalidArgument(format!(
            "TFIM needs N >= 2, got {}",
            p.n
        )));
    }
    let n = p.n;
    let mut terms = Vec::with_capacity(2 * n - 1);
    for i in 1..=n {
        terms.push(HamiltonianTerm::new(
            -p.delta / 2.0,
            PauliString::from_sites(n, &[(i, Pauli::Z)])?,
        )?);
    }
    for i in 1..n {
        terms.push(HamiltonianTerm::new(-p.j, pair(n, i, i + 1, Pauli::X)?)?);
    }
    HamiltonianSum::new(n, terms)
}

/// The effective Hamiltonian with free `(λ, κ)`; boundary `Z` weights are fixed at −1.
/// With `N = 2` there are no next-nearest-neighbour terms.
pub fn build_sw_effective(e: &EffectiveParams, n: usize) -> Result<HamiltonianSum> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "effective model needs N >= 2, got {n}"
        )));
    }
    let mut terms = Vec::new();
    for i in 1..n {
        for p in [Pauli::X, Pauli::Y] {
            terms.push(HamiltonianTerm::new(
                -e.lambda / 2.0,
                pair(n, i, i + 1, p)?,
            )?);
        }
    }
    for i in 1..n.saturating_sub(1) {
        for p in [Pauli::X, Pauli::Y] {
            terms.push(HamiltonianTerm::new(-e.kappa / 2.0, pair(n, i, i + 2, p)?)?);
        }
    }
    terms.push(HamiltonianTerm::new(
        -1.0,
        PauliString::from_sites(n, &[(1, Pauli::Z)])?,
    )?);
    terms.push(HamiltonianTerm::new(
        -1.0,
        PauliString::from_sites(n, &[(n, Pauli::Z)])?,
    )?);
    HamiltonianSum::new(n, terms)
}

/// `(λ, κ) = (J, J²/2Δ)`.
pub fn exact_sw_coefficients(delta: f64, j: f64) -> Result<EffectiveParams> {
    if delta == 0.0 {
        return Err(Error::InvalidArgument(
            "exact SW coefficients need Δ ≠ 0".into(),
        ));
    }
    EffectiveParams::new(j, j * j / (2.0 * delta))
}

/// `H − H_eff(λ, κ)` for the given model.
pub fn test_hamiltonian(p: &TfimParams, e: &EffectiveParams) -> Result<HamiltonianSum> {
    build_tfim(p)?.subtract(&build_sw_effective(e, p.n)?)
}

/// `X_i|0…0⟩` for `i = 1..=n`.
pub fn initial_states(n: usize) -> Result<Vec<StateVector>> {
    (1..=n).map(|i| single_excitation(n, i)).collect()
}

/// `X_site|0…0⟩` with a 1-based site.
pub fn single_excitation(n: usize, site: usize) -> Result<StateVector> {
    if site == 0 || site > n {
        return Err(Error::SiteOutOfRange { site, n_sites: n });
    }
    StateVector::basis(n, 1 << (n - site))
}

/// Evenly spaced values from `lo` to `hi` inclusive; one step yields `[lo]`.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    match steps {
        0 => Err(Error::InvalidArgument(
            "grid needs at least one step".into(),
        )),
        1 => Ok(vec![lo]),
        _ => {
            let h = (hi - lo) / (steps - 1) as f64;
            Ok((0..steps)
                .map(|k| {
                    if k == steps - 1 {
                        hi
                    } else {
                        lo + h * k as f64
                    }
                })
                .collect())
        }
    }
}

/// A Cartesian grid of effective coefficients.
///
/// Candidates are labelled row-major with λ varying fastest: label
/// `x = i_κ · n_λ + i_λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateGrid {
    pub lambdas: Vec<f64>,
    pub kappas: Vec<f64>,
}

impl CandidateGrid {
    pub fn new(lambdas: Vec<f64>, kappas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() || kappas.is_empty() {
            return Err(Error::InvalidArgument(
                "candidate grid axes must be nonempty".into(),
            ));
        }
        if lambdas.iter().chain(&kappas).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "candidate grid values must be finite".into(),
            ));
        }
        Ok(Self { lambdas, kappas })
    }

    pub fn len(&self) -> usize {
        self.lambdas.len() * self.kappas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn params(&self, label: usize) -> EffectiveParams {
        let nl = self.lambdas.len();
        EffectiveParams {
            lambda: self.lambdas[label % nl],
            kappa: self.kappas[label / nl],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = EffectiveParams> + '_ {
        (0..self.len()).map(|x| self.params(x))
    }

    /// Label of the grid point equal to `(λ, κ)` within `tol`.
    pub fn find(&self, lambda: f64, kappa: f64, tol: f64) -> Option<usize> {
        (0..self.len()).find(|&x| {
            let p = self.params(x);
            (p.lambda - lambda).abs() <= tol && (p.kappa - kappa).abs() <= tol
        })
    }

    /// Effective Hamiltonians in label order.
    pub fn hamiltonians(&self, n: usize) -> Result<Vec<HamiltonianSum>> {
        self.iter().map(|p| build_sw_effective(&p, n)).collect()
    }
}

/// Grid over `[λ_lo, λ_hi] × [κ_lo, κ_hi]` with the given number of points per axis.
pub fn candidate_grid(
    lambda_range: (f64, f64),
    kappa_range: (f64, f64),
    steps: (usize, usize),
) -> Result<CandidateGrid> {
    CandidateGrid::new(
        linspace(lambda_range.0, lambda_range.1, steps.0)?,
        linspace(kappa_range.0, kappa_range.1, steps.1)?,
    )
}
