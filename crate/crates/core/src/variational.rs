//! Variational real-time evolution on a parameterized rotation circuit.
//!
//! The trial state is `|Ψ(θ)⟩ = ∏_g e^{-i θ_{p(g)} G_g} |ψ₀⟩` with Pauli
//! generators `G_g`. Parameters follow `Re(A) θ̇ = Im(C)` where
//! `A_ij = ⟨∂_iΨ|∂_jΨ⟩` and `C_i = ⟨∂_iΨ|H_test|Ψ⟩`; this is the real-valued
//! solution of `A θ̇ = −iC` in the least-squares sense, i.e. it minimizes
//! `‖Σ_j ∂_jΨ θ̇_j + i H_test Ψ‖`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::apply_pauli_rotation;
use crate::fidelity::TrialSet;
use crate::pauli::{HamiltonianSum, PauliMasks, PauliString};
use crate::state::{inner_raw, StateVector};

/// Default Tikhonov weight added to `Re(A)`.
pub const DEFAULT_REGULARIZATION: f64 = 1e-8;

/// Default number of Trotter-form layers.
pub const DEFAULT_LAYERS: usize = 3;

/// Regularized systems with a larger condition number are rejected.
pub const MAX_CONDITION: f64 = 1e14;

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    generator: PauliString,
    param: usize,
    masks: PauliMasks,
}

impl Gate {
    pub fn generator(&self) -> &PauliString {
        &self.generator
    }

    pub fn param(&self) -> usize {
        self.param
    }
}

/// Ordered Pauli rotations `e^{-i θ_p G}`; several gates may share a parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzCircuit {
    n_sites: usize,
    n_params: usize,
    gates: Vec<Gate>,
}

impl AnsatzCircuit {
    /// Every parameter in `0..n_params` must drive at least one gate.
    pub fn new(n_sites: usize, n_params: usize, gates: Vec<(PauliString, usize)>) -> Result<Self> {
        if n_params == 0 {
            return Err(Error::InvalidArgument(
                "ansatz needs at least one parameter".into(),
            ));
        }
        let mut used = vec![false; n_params];
        let mut out = Vec::with_capacity(gates.len());
        for (generator, param) in gates {
            if generator.n_sites() != n_sites {
                return Err(Error::SiteMismatch {
                    left: n_sites,
                    right: generator.n_sites(),
                });
            }
            if param >= n_params {
                return Err(Error::ParameterIndex {
                    index: param,
                    n_params,
                });
            }
            used[param] = true;
            let masks = generator.masks();
            out.push(Gate {
                generator,
                param,
                masks,
            });
        }
        if let Some(unused) = used.iter().position(|u| !u) {
            return Err(Error::InvalidArgument(format!(
                "parameter {unused} drives no gate"
            )));
        }
        Ok(Self {
            n_sites,
            n_params,
            gates: out,
        })
    }

    /// `layers` repetitions of one rotation per term of `template`, in the
    /// template's term order, each gate with its own parameter.
    pub fn trotter_layers(template: &HamiltonianSum, layers: usize) -> Result<Self> {
        if layers == 0 || template.is_empty() {
            return Err(Error::InvalidArgument(
                "layered ansatz needs at least one layer and one template term".into(),
            ));
        }
        let gates: Vec<_> = (0..layers)
            .flat_map(|_| template.terms().iter().map(|t| t.string().clone()))
            .enumerate()
            .map(|(p, g)| (g, p))
            .collect();
        Self::new(template.n_sites(), gates.len(), gates)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    fn check(&self, params: &[f64], initial: &StateVector) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::ParameterCount {
                expected: self.n_params,
                actual: params.len(),
            });
        }
        if initial.n_sites() != self.n_sites {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.n_sites,
                actual: initial.dim(),
            });
        }
        Ok(())
    }

    /// `|Ψ(θ)⟩`.
    pub fn prepare_state(&self, params: &[f64], initial: &StateVector) -> Result<StateVector> {
        self.check(params, initial)?;
        let mut v = initial.amplitudes().to_vec();
        self.apply_gates(params, 0, &mut v);
        StateVector::unnormalized(self.n_sites, v)
    }

    fn apply_gates(&self, params: &[f64], from: usize, v: &mut [Complex64]) {
        for g in &self.gates[from..] {
            apply_pauli_rotation(g.masks, params[g.param], v);
        }
    }

    /// `∂|Ψ⟩/∂θ_k`, summing over every gate driven by `θ_k`.
    pub fn derivative_state(
        &self,
        params: &[f64],
        k: usize,
        initial: &StateVector,
    ) -> Result<Vec<Complex64>> {
        self.check(params, initial)?;
        if k >= self.n_params {
            return Err(Error::ParameterIndex {
                index: k,
                n_params: self.n_params,
            });
        }
        Ok(self.tangents(params, initial).1.swap_remove(k))
    }

    /// `|Ψ⟩` and all `∂_k|Ψ⟩`, inserting `−iG` after each gate.
    fn tangents(
        &self,
        params: &[f64],
        initial: &StateVector,
    ) -> (Vec<Complex64>, Vec<Vec<Complex64>>) {
        let dim = initial.dim();
        let mut derivs = vec![vec![Complex64::new(0.0, 0.0); dim]; self.n_params];
        let mut prefix = initial.amplitudes().to_vec();
        for (gi, g) in self.gates.iter().enumerate() {
            apply_pauli_rotation(g.masks, params[g.param], &mut prefix);
            let mut d = vec![Complex64::new(0.0, 0.0); dim];
            for (b, &a) in prefix.iter().enumerate() {
                d[b ^ g.masks.x] = Complex64::new(0.0, -1.0) * g.masks.phase(b) * a;
            }
            self.apply_gates(params, gi + 1, &mut d);
            for (acc, x) in derivs[g.param].iter_mut().zip(d) {
                *acc += x;
            }
        }
        (prefix, derivs)
    }

    /// State, `A` and `C` at `params` in one pass.
    pub fn linear_system(
        &self,
        params: &[f64],
        h_test: &HamiltonianSum,
        initial: &StateVector,
    ) -> Result<(StateVector, DMatrix<Complex64>, DVector<Complex64>)> {
        self.check(params, initial)?;
        if h_test.n_sites() != self.n_sites {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.n_sites,
                actual: h_test.dim(),
            });
        }
        let (psi, derivs) = self.tangents(params, initial);
        let a = gram(&derivs);
        let h_psi = h_test.apply_raw(&psi);
        let c = DVector::from_iterator(derivs.len(), derivs.iter().map(|d| inner_raw(d, &h_psi)));
        Ok((StateVector::unnormalized(self.n_sites, psi)?, a, c))
    }
}

fn gram(vectors: &[Vec<Complex64>]) -> DMatrix<Complex64> {
    let n = vectors.len();
    let mut a = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        for j in i..n {
            let v = inner_raw(&vectors[i], &vectors[j]);
            a[(i, j)] = v;
            a[(j, i)] = v.conj();
        }
    }
    a
}

/// `A_ij = ⟨∂_iΨ|∂_jΨ⟩`.
pub fn build_a(
    ansatz: &AnsatzCircuit,
    params: &[f64],
    initial: &StateVector,
) -> Result<DMatrix<Complex64>> {
    ansatz.check(params, initial)?;
    Ok(gram(&ansatz.tangents(params, initial).1))
}

/// `C_i = ⟨∂_iΨ|H_test|Ψ⟩`.
pub fn build_c(
    ansatz: &AnsatzCircuit,
    params: &[f64],
    h_test: &HamiltonianSum,
    initial: &StateVector,
) -> Result<DVector<Complex64>> {
    Ok(ansatz.linear_system(params, h_test, initial)?.2)
}

/// `θ' = θ + δt·θ̇` with `(Re A + λ_reg I) θ̇ = Im C`.
pub fn step(
    params: &[f64],
    a: &DMatrix<Complex64>,
    c: &DVector<Complex64>,
    dt: f64,
    regularization: f64,
) -> Result<Vec<f64>> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let velocity = parameter_velocity(a, c, regularization)?;
    if velocity.len() != params.len() {
        return Err(Error::ParameterCount {
            expected: params.len(),
            actual: velocity.len(),
        });
    }
    Ok(params
        .iter()
        .zip(velocity.iter())
        .map(|(p, v)| p + dt * v)
        .collect())
}

/// Solves `(Re A + λ_reg I) θ̇ = Im C`.
///
/// The system is rejected when the Cholesky factorization breaks down or its
/// pivot ratio `(max L_ii / min L_ii)²` exceeds [`MAX_CONDITION`]; the error
/// then carries the eigenvalue condition number.
pub fn parameter_velocity(
    a: &DMatrix<Complex64>,
    c: &DVector<Complex64>,
    regularization: f64,
) -> Result<DVector<f64>> {
    let n = a.nrows();
    if a.ncols() != n || c.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: c.len(),
        });
    }
    let rhs = c.map(|z| z.im);
    if rhs.iter().all(|&x| x == 0.0) {
        return Ok(DVector::zeros(n));
    }
    let m = a.map(|z| z.re) + DMatrix::identity(n, n) * regularization;
    let singular = |m: DMatrix<f64>| Error::SingularSystem {
        condition: condition_number(m),
    };
    let Some(chol) = m.clone().cholesky() else {
        return Err(singular(m));
    };
    let diag = chol.l_dirty().diagonal();
    let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| {
        (lo.min(d.abs()), hi.max(d.abs()))
    });
    if !(lo > 0.0) || (hi / lo).powi(2) > MAX_CONDITION {
        return Err(singular(m));
    }
    let v = chol.solve(&rhs);
    if v.iter().any(|x| !x.is_finite()) {
        return Err(singular(m));
    }
    Ok(v)
}

/// `λ_max / λ_min` of a symmetric matrix; infinite when `λ_min <= 0`.
pub fn condition_number(m: DMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(m).eigenvalues;
    let (lo, hi) = eig
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| {
            (lo.min(e), hi.max(e))
        });
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

/// How the parameter velocity is integrated over one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    /// `θ ← θ + δt·θ̇(θ)`.
    Euler,
    /// `θ ← θ + δt·θ̇(θ + ½δt·θ̇(θ))`.
    Midpoint,
}

/// Velocity at `params` for one trial state.
pub fn velocity_at(
    ansatz: &AnsatzCircuit,
    params: &[f64],
    h_test: &HamiltonianSum,
    initial: &StateVector,
    regularization: f64,
) -> Result<Vec<f64>> {
    let (_, a, c) = ansatz.linear_system(params, h_test, initial)?;
    Ok(parameter_velocity(&a, &c, regularization)?
        .iter()
        .copied()
        .collect())
}

/// Time series of a variational evolution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationalTrajectory {
    pub dt: f64,
    /// `t_k = k·δt`.
    pub times: Vec<f64>,
    /// `per_trial[k][i] = |⟨Ψ_i(θ(t_k))|Ψ_i(θ₀)⟩|²`.
    pub per_trial: Vec<Vec<f64>>,
    pub f_ave: Vec<f64>,
    /// `params[i][k]` is trial `i`'s parameter vector at `t_k`.
    pub params: Vec<Vec<Vec<f64>>>,
}

impl VariationalTrajectory {
    pub fn final_f_ave(&self) -> f64 {
        *self.f_ave.last().expect("trajectory holds t = 0")
    }
}

/// Settings for [`evolve_trajectory`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VariationalConfig {
    pub dt: f64,
    pub regularization: f64,
    pub integrator: Integrator,
}

impl Default for VariationalConfig {
    fn default() -> Self {
        Self {
            dt: std::f64::consts::TAU / 1000.0,
            regularization: DEFAULT_REGULARIZATION,
            integrator: Integrator::Midpoint,
        }
    }
}

/// Number of uniform steps of size `dt` used to reach `t_final`.
pub fn step_count(t_final: f64, dt: f64) -> usize {
    ((t_final / dt).round() as usize).max(1)
}

/// Evolves each trial with its own parameter vector from `theta0` up to
/// `t_final` (rounded to a whole number of steps), recording the survival
/// probability against the state at `theta0`.
pub fn evolve_trajectory(
    ansatz: &AnsatzCircuit,
    theta0: &[f64],
    h_test: &HamiltonianSum,
    trials: &TrialSet,
    t_final: f64,
    cfg: VariationalConfig,
) -> Result<VariationalTrajectory> {
    if !(t_final > 0.0) || !(cfg.dt > 0.0) {
        return Err(Error::InvalidArgument(
            "t_final and dt must be positive".into(),
        ));
    }
    let n_steps = step_count(t_final, cfg.dt);
    let runs: Vec<(Vec<f64>, Vec<Vec<f64>>)> = trials
        .trials()
        .par_iter()
        .map(|trial| single_trajectory(ansatz, theta0, h_test, trial.initial(), n_steps, cfg))
        .collect::<Result<_>>()?;

    let n_trials = runs.len() as f64;
    let per_trial: Vec<Vec<f64>> = (0..=n_steps)
        .map(|k| runs.iter().map(|r| r.0[k]).collect())
        .collect();
    let f_ave = per_trial
        .iter()
        .map(|row| row.iter().sum::<f64>() / n_trials)
        .collect();
    Ok(VariationalTrajectory {
        dt: cfg.dt,
        times: (0..=n_steps).map(|k| k as f64 * cfg.dt).collect(),
        per_trial,
        f_ave,
        params: runs.into_iter().map(|r| r.1).collect(),
    })
}

fn single_trajectory(
    ansatz: &AnsatzCircuit,
    theta0: &[f64],
    h_test: &HamiltonianSum,
    initial: &StateVector,
    n_steps: usize,
    cfg: VariationalConfig,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let reference = ansatz.prepare_state(theta0, initial)?;
    let mut theta = theta0.to_vec();
    let mut fidelities = Vec::with_capacity(n_steps + 1);
    let mut history = Vec::with_capacity(n_steps + 1);
    for k in 0..=n_steps {
        let (psi, a, c) = ansatz.linear_system(&theta, h_test, initial)?;
        fidelities.push(
            inner_raw(reference.amplitudes(), psi.amplitudes())
                .norm_sqr()
                .min(1.0),
        );
        history.push(theta.clone());
        if k == n_steps {
            break;
        }
        let at_step = |e: Error| match e {
            Error::SingularSystem { condition } => Error::SingularAtStep { step: k, condition },
            other => other,
        };
        theta = match cfg.integrator {
            Integrator::Euler => {
                step(&theta, &a, &c, cfg.dt, cfg.regularization).map_err(at_step)?
            }
            Integrator::Midpoint => {
                let v0 = parameter_velocity(&a, &c, cfg.regularization).map_err(at_step)?;
                let mid: Vec<f64> = theta
                    .iter()
                    .zip(v0.iter())
                    .map(|(p, v)| p + 0.5 * cfg.dt * v)
                    .collect();
                let v_mid = velocity_at(ansatz, &mid, h_test, initial, cfg.regularization)
                    .map_err(at_step)?;
                theta
                    .iter()
                    .zip(&v_mid)
                    .map(|(p, v)| p + cfg.dt * v)
                    .collect()
            }
        };
    }
    Ok((fidelities, history))
}
