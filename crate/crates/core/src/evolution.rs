//! Exact and first-order Trotterized evolution under a [`HamiltonianSum`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{HamiltonianSum, HamiltonianTerm};
use crate::state::StateVector;

/// How `e^{-iHt}` is realized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "method")]
pub enum EvolutionMethod {
    /// Dense eigendecomposition.
    Exact,
    /// `n` first-order Trotter steps of size `t/n`.
    Trotter { steps: usize },
}

/// Eigendecomposition of a Hamiltonian, reusable for any number of times `t`.
///
/// Immutable once built, so one propagator can be shared across threads.
#[derive(Debug, Clone)]
pub struct Propagator {
    n_sites: usize,
    trivial: bool,
    energies: DVector<f64>,
    vectors: DMatrix<Complex64>,
}

impl Propagator {
    pub fn new(h: &HamiltonianSum) -> Result<Self> {
        let m = h.dense_matrix()?;
        let trivial = h.is_empty();
        let eig = SymmetricEigen::new(m);
        Ok(Self {
            n_sites: h.n_sites(),
            trivial,
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    /// `e^{-iHt}|s⟩`. Returns `s` unchanged when `t == 0` or `H` is empty.
    pub fn evolve(&self, s: &StateVector, t: f64) -> Result<StateVector> {
        if s.n_sites() != self.n_sites {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.n_sites,
                actual: s.dim(),
            });
        }
        if t == 0.0 || self.trivial {
            return Ok(s.clone());
        }
        let v = DVector::from_column_slice(s.amplitudes());
        let mut coeffs = self.vectors.ad_mul(&v);
        for (c, &e) in coeffs.iter_mut().zip(self.energies.iter()) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        let out = &self.vectors * coeffs;
        StateVector::unnormalized(self.n_sites, out.as_slice().to_vec())
    }
}

/// `e^{-iht}|s⟩` through a one-off eigendecomposition.
pub fn exact_evolve(h: &HamiltonianSum, s: &StateVector, t: f64) -> Result<StateVector> {
    if h.n_sites() != s.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: s.dim(),
        });
    }
    if t == 0.0 || h.is_empty() {
        return Ok(s.clone());
    }
    Propagator::new(h)?.evolve(s, t)
}

/// In place: `v ← e^{-i c τ P} v = cos(cτ) v − i sin(cτ) P v`.
pub fn apply_exp_pauli_in_place(term: &HamiltonianTerm, tau: f64, v: &mut [Complex64]) {
    let angle = term.coefficient() * tau;
    if angle == 0.0 {
        return;
    }
    apply_pauli_rotation(term.string().masks(), angle, v);
}

/// In place: `v ← e^{-i angle P} v` for the string with the given masks.
pub(crate) fn apply_pauli_rotation(m: crate::pauli::PauliMasks, angle: f64, v: &mut [Complex64]) {
    let (sin, cos) = angle.sin_cos();
    let minus_i_sin = Complex64::new(0.0, -sin);
    if m.x == 0 {
        for (b, a) in v.iter_mut().enumerate() {
            *a *= cos + minus_i_sin * m.phase(b);
        }
        return;
    }
    // Pair each b with b ^ x, visiting every pair once via its lower index.
    let top = 1usize << (usize::BITS - 1 - m.x.leading_zeros());
    for b in 0..v.len() {
        if b & top != 0 {
            continue;
        }
        let p = b ^ m.x;
        let (vb, vp) = (v[b], v[p]);
        // P|p⟩ = phase(p)|b⟩ and P|b⟩ = phase(b)|p⟩.
        v[b] = cos * vb + minus_i_sin * m.phase(p) * vp;
        v[p] = cos * vp + minus_i_sin * m.phase(b) * vb;
    }
}

/// `e^{-i c P τ}|s⟩` for a single term.
pub fn apply_exp_pauli_term(
    term: &HamiltonianTerm,
    tau: f64,
    s: &StateVector,
) -> Result<StateVector> {
    if term.string().n_sites() != s.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: 1 << term.string().n_sites(),
            actual: s.dim(),
        });
    }
    let mut out = s.clone();
    apply_exp_pauli_in_place(term, tau, out.amplitudes_mut());
    Ok(out)
}

/// One first-order Trotter step of size `tau`, terms in the sum's order.
pub fn trotter_step_in_place(h: &HamiltonianSum, tau: f64, v: &mut [Complex64]) {
    for term in h.terms() {
        apply_exp_pauli_in_place(term, tau, v);
    }
}

/// `(∏_j e^{-i H_j τ})^n |s⟩` with `τ = t/n`.
pub fn trotter_evolve(
    h: &HamiltonianSum,
    s: &StateVector,
    t: f64,
    n: usize,
) -> Result<StateVector> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "trotter steps must be at least 1".into(),
        ));
    }
    if h.n_sites() != s.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: s.dim(),
        });
    }
    let tau = t / n as f64;
    let mut out = s.clone();
    for _ in 0..n {
        trotter_step_in_place(h, tau, out.amplitudes_mut());
    }
    Ok(out)
}

/// Dispatches on `method`.
pub fn evolve(
    h: &HamiltonianSum,
    s: &StateVector,
    t: f64,
    method: EvolutionMethod,
) -> Result<StateVector> {
    match method {
        EvolutionMethod::Exact => exact_evolve(h, s, t),
        EvolutionMethod::Trotter { steps } => trotter_evolve(h, s, t, steps),
    }
}
