//! Classical simulation toolkit for finding the optimal effective Hamiltonian
//! of a many-body system among parameterized candidates.
//!
//! Two search strategies are provided: an accelerated search built from phase
//! estimation and amplitude amplification ([`grover`]), and a variational
//! real-time simulation that scores candidates by their average fidelity
//! ([`variational`], [`landscape`]). The transverse-field Ising chain and its
//! second-order Schrieffer-Wolff effective model ([`tfim`]) serve as the
//! worked example.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evolution;
pub mod fidelity;
pub mod grover;
pub mod landscape;
pub mod pauli;
pub mod state;
pub mod tfim;
pub mod variational;

pub use error::{Error, Result};
pub use evolution::{exact_evolve, trotter_evolve, EvolutionMethod, Propagator};
pub use fidelity::{average_fidelity, composite_fidelity, overall_fidelity, Trial, TrialSet};
pub use pauli::{HamiltonianSum, HamiltonianTerm, Pauli, PauliString};
pub use state::{inner_product, StateVector};
