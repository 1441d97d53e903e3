//! Fidelity landscapes over `(λ, κ)` grids and reference time curves.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{trotter_step_in_place, EvolutionMethod, Propagator};
use crate::fidelity::{average_fidelity, overall_fidelity, TrialSet};
use crate::grover::CandidateSet;
use crate::pauli::HamiltonianSum;
use crate::state::inner_raw;
use crate::tfim::{test_hamiltonian, CandidateGrid, EffectiveParams, TfimParams};
use crate::variational::{evolve_trajectory, AnsatzCircuit, Integrator, VariationalConfig};

/// How each grid point's `F_ave` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "method")]
pub enum ScanMethod {
    Exact,
    Trotter {
        steps: usize,
    },
    Variational {
        dt: f64,
        layers: usize,
        regularization: f64,
        integrator: Integrator,
    },
}

impl ScanMethod {
    pub fn name(&self) -> &'static str {
        match self {
            ScanMethod::Exact => "exact",
            ScanMethod::Trotter { .. } => "trotter",
            ScanMethod::Variational { .. } => "variational",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub lambda: f64,
    pub kappa: f64,
    pub f_ave: f64,
}

/// `F_ave` of `H_test = H − H_eff(λ, κ)` for one point, each trial evolved
/// for its own time. The variational method needs a common trial time.
pub fn point_f_ave(
    model: &TfimParams,
    params: &EffectiveParams,
    trials: &TrialSet,
    method: ScanMethod,
) -> Result<f64> {
    let h_test = test_hamiltonian(model, params)?;
    match method {
        ScanMethod::Exact => average_fidelity(&h_test, trials, EvolutionMethod::Exact),
        ScanMethod::Trotter { steps } => {
            average_fidelity(&h_test, trials, EvolutionMethod::Trotter { steps })
        }
        ScanMethod::Variational {
            dt,
            layers,
            regularization,
            integrator,
        } => {
            let t = trials.common_time().ok_or_else(|| {
                Error::InvalidArgument("variational scan needs a common trial time".into())
            })?;
            if h_test.is_empty() {
                return Ok(1.0);
            }
            let ansatz = AnsatzCircuit::trotter_layers(&h_test, layers)?;
            let theta0 = vec![0.0; ansatz.n_params()];
            let traj = evolve_trajectory(
                &ansatz,
                &theta0,
                &h_test,
                trials,
                t,
                VariationalConfig {
                    dt,
                    regularization,
                    integrator,
                },
            )?;
            Ok(traj.final_f_ave())
        }
    }
}

/// `F_ave` for every grid point, in label order (λ fastest). Points are
/// evaluated in parallel; the output order does not depend on scheduling.
pub fn landscape_scan(
    grid: &CandidateGrid,
    model: &TfimParams,
    trials: &TrialSet,
    method: ScanMethod,
) -> Result<Vec<ScanPoint>> {
    if grid.is_empty() {
        return Err(Error::NoCandidates);
    }
    (0..grid.len())
        .into_par_iter()
        .map(|x| {
            let p = grid.params(x);
            Ok(ScanPoint {
                lambda: p.lambda,
                kappa: p.kappa,
                f_ave: point_f_ave(model, &p, trials, method)?,
            })
        })
        .collect()
}

/// Label of the largest `F_ave`, lowest label on ties.
pub fn argmax(points: &[ScanPoint]) -> Option<usize> {
    points
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, p)| match best {
            Some((_, v)) if v >= p.f_ave => best,
            _ => Some((i, p.f_ave)),
        })
        .map(|(i, _)| i)
}

/// Overall fidelity `F(x)` of every candidate, the quantity whose angle
/// `θ_x = 2 arccos F(x)` the accelerated search thresholds.
pub fn candidate_fidelities(
    grid: &CandidateGrid,
    model: &TfimParams,
    trials: &TrialSet,
    method: EvolutionMethod,
) -> Result<Vec<f64>> {
    (0..grid.len())
        .into_par_iter()
        .map(|x| overall_fidelity(&test_hamiltonian(model, &grid.params(x))?, trials, method))
        .collect()
}

pub fn candidate_set(
    grid: &CandidateGrid,
    model: &TfimParams,
    trials: &TrialSet,
    method: EvolutionMethod,
) -> Result<CandidateSet> {
    CandidateSet::from_fidelities(candidate_fidelities(grid, model, trials, method)?)
}

/// `F_ave(t_k)` along first-order Trotter evolution with step `tau`,
/// `t_k = k·tau` for `k = 0..=n_steps`.
pub fn trotter_curve(
    h_test: &HamiltonianSum,
    trials: &TrialSet,
    tau: f64,
    n_steps: usize,
) -> Result<Vec<f64>> {
    let mut states: Vec<Vec<Complex64>> = trials
        .trials()
        .iter()
        .map(|t| t.initial().amplitudes().to_vec())
        .collect();
    if h_test.n_sites() != trials.n_sites() {
        return Err(Error::SiteMismatch {
            left: h_test.n_sites(),
            right: trials.n_sites(),
        });
    }
    let mut out = Vec::with_capacity(n_steps + 1);
    for k in 0..=n_steps {
        if k > 0 {
            for s in &mut states {
                trotter_step_in_place(h_test, tau, s);
            }
        }
        let f = trials
            .trials()
            .iter()
            .zip(&states)
            .map(|(t, s)| inner_raw(t.initial().amplitudes(), s).norm_sqr())
            .sum::<f64>()
            / trials.len() as f64;
        out.push(f.min(1.0));
    }
    Ok(out)
}

/// `F_ave(t)` under exact evolution at each of `times`.
pub fn exact_curve(h_test: &HamiltonianSum, trials: &TrialSet, times: &[f64]) -> Result<Vec<f64>> {
    let prop = Propagator::new(h_test)?;
    times
        .iter()
        .map(|&t| {
            let mut sum = 0.0;
            for tr in trials.trials() {
                let e = prop.evolve(tr.initial(), t)?;
                sum += inner_raw(tr.initial().amplitudes(), e.amplitudes()).norm_sqr();
            }
            Ok((sum / trials.len() as f64).min(1.0))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_prefers_first_on_ties() {
        let p = |f| ScanPoint {
            lambda: 0.0,
            kappa: 0.0,
            f_ave: f,
        };
        assert_eq!(argmax(&[p(0.2), p(0.9), p(0.9), p(0.1)]), Some(1));
        assert_eq!(argmax(&[]), None);
    }
}
