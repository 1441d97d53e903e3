//! Survival-amplitude fidelities used to score a candidate effective Hamiltonian.
//!
//! For trials `(|ψ_i⟩, t_i)` and a test Hamiltonian `H_test = H − H_eff`,
//! `f_i = ⟨ψ_i| e^{-i H_test t_i} |ψ_i⟩`. The overall fidelity is
//! `|mean f_i|` and the average fidelity is `mean |f_i|²`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{trotter_evolve, EvolutionMethod, Propagator};
use crate::pauli::HamiltonianSum;
use crate::state::{inner_raw, StateVector, NORM_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    initial: StateVector,
    time: f64,
}

impl Trial {
    pub fn new(initial: StateVector, time: f64) -> Result<Self> {
        if (initial.norm_sqr() - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(initial.norm_sqr()));
        }
        if !time.is_finite() {
            return Err(Error::InvalidArgument(format!("trial time {time}")));
        }
        Ok(Self { initial, time })
    }

    pub fn initial(&self) -> &StateVector {
        &self.initial
    }

    pub fn time(&self) -> f64 {
        self.time
    }
}

/// A nonempty list of trials on a common register.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSet {
    trials: Vec<Trial>,
}

impl TrialSet {
    pub fn new(trials: Vec<Trial>) -> Result<Self> {
        let first = trials.first().ok_or(Error::EmptyTrialSet)?;
        let n = first.initial.n_sites();
        if let Some(bad) = trials.iter().find(|t| t.initial.n_sites() != n) {
            return Err(Error::SiteMismatch {
                left: n,
                right: bad.initial.n_sites(),
            });
        }
        Ok(Self { trials })
    }

    /// Every state evolved for the same time `t`.
    pub fn shared_time(states: Vec<StateVector>, t: f64) -> Result<Self> {
        Self::new(
            states
                .into_iter()
                .map(|s| Trial::new(s, t))
                .collect::<Result<_>>()?,
        )
    }

    pub fn trials(&self) -> &[Trial] {
        &self.trials
    }

    pub fn len(&self) -> usize {
        self.trials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trials.is_empty()
    }

    pub fn n_sites(&self) -> usize {
        self.trials[0].initial.n_sites()
    }

    /// The shared evolution time, if every trial has the same one.
    pub fn common_time(&self) -> Option<f64> {
        let t = self.trials[0].time;
        self.trials.iter().all(|tr| tr.time == t).then_some(t)
    }
}

fn check_sites(h: &HamiltonianSum, s: &StateVector) -> Result<()> {
    if h.n_sites() != s.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: s.dim(),
        });
    }
    Ok(())
}

/// `⟨ψ| e^{-i h_test t} |ψ⟩` for one trial.
pub fn trial_fidelity(
    h_test: &HamiltonianSum,
    trial: &Trial,
    method: EvolutionMethod,
) -> Result<Complex64> {
    check_sites(h_test, &trial.initial)?;
    if h_test.is_empty() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let evolved = match method {
        EvolutionMethod::Exact => Propagator::new(h_test)?.evolve(&trial.initial, trial.time)?,
        EvolutionMethod::Trotter { steps } => {
            trotter_evolve(h_test, &trial.initial, trial.time, steps)?
        }
    };
    Ok(inner_raw(trial.initial.amplitudes(), evolved.amplitudes()))
}

/// All `f_i`, sharing one eigendecomposition for the exact method.
pub fn trial_fidelities(
    h_test: &HamiltonianSum,
    trials: &TrialSet,
    method: EvolutionMethod,
) -> Result<Vec<Complex64>> {
    check_sites(h_test, &trials.trials[0].initial)?;
    if h_test.is_empty() {
        return Ok(vec![Complex64::new(1.0, 0.0); trials.len()]);
    }
    match method {
        EvolutionMethod::Exact => {
            let prop = Propagator::new(h_test)?;
            trials
                .trials
                .iter()
                .map(|t| {
                    let e = prop.evolve(&t.initial, t.time)?;
                    Ok(inner_raw(t.initial.amplitudes(), e.amplitudes()))
                })
                .collect()
        }
        _ => trials
            .trials
            .iter()
            .map(|t| trial_fidelity(h_test, t, method))
            .collect(),
    }
}

/// `|(1/N_t) Σ f_i|`.
pub fn overall_from(f: &[Complex64]) -> f64 {
    let mean = f.iter().sum::<Complex64>() / f.len() as f64;
    mean.norm().min(1.0)
}

/// `(1/N_t) Σ |f_i|²`.
pub fn average_from(f: &[Complex64]) -> f64 {
    (f.iter().map(|z| z.norm_sqr()).sum::<f64>() / f.len() as f64).min(1.0)
}

pub fn overall_fidelity(
    h_test: &HamiltonianSum,
    trials: &TrialSet,
    method: EvolutionMethod,
) -> Result<f64> {
    Ok(overall_from(&trial_fidelities(h_test, trials, method)?))
}

pub fn average_fidelity(
    h_test: &HamiltonianSum,
    trials: &TrialSet,
    method: EvolutionMethod,
) -> Result<f64> {
    Ok(average_from(&trial_fidelities(h_test, trials, method)?))
}

/// `|⟨ψ̃|Ũ|ψ̃⟩|` with `|ψ̃⟩ = N_t^{-1/2} Σ |i⟩⊗|ψ_i⟩` and
/// `Ũ = Σ |i⟩⟨i| ⊗ U(t_i)`.
///
/// The ancilla register is a direct sum: the composite vector is the
/// concatenation of the scaled blocks, and `Ũ` acts block by block.
pub fn composite_fidelity(
    h_test: &HamiltonianSum,
    trials: &TrialSet,
    method: EvolutionMethod,
) -> Result<f64> {
    check_sites(h_test, &trials.trials[0].initial)?;
    if h_test.is_empty() {
        return Ok(1.0);
    }
    let scale = 1.0 / (trials.len() as f64).sqrt();
    let dim = h_test.dim();
    let mut composite = Vec::with_capacity(trials.len() * dim);
    for t in &trials.trials {
        composite.extend(t.initial.amplitudes().iter().map(|a| a * scale));
    }

    let prop = match method {
        EvolutionMethod::Exact => Some(Propagator::new(h_test)?),
        _ => None,
    };
    let mut evolved = Vec::with_capacity(composite.len());
    for t in &trials.trials {
        // Block i of Ũ|ψ̃⟩ is U(t_i) applied to block i of |ψ̃⟩.
        let out = match method {
            EvolutionMethod::Exact => prop
                .as_ref()
                .expect("built above")
                .evolve(&t.initial, t.time)?,
            EvolutionMethod::Trotter { steps } => {
                trotter_evolve(h_test, &t.initial, t.time, steps)?
            }
        };
        evolved.extend(out.amplitudes().iter().map(|a| a * scale));
    }
    debug_assert_eq!(evolved.len(), trials.len() * dim);
    Ok(inner_raw(&composite, &evolved).norm().min(1.0))
}
