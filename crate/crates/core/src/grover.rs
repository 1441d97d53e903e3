//! Accelerated effective-Hamiltonian search: phase estimation of the
//! fidelity angle, the approximate fidelity-dependent phase flip, and
//! amplitude amplification over the candidate register.
//!
//! The three-register circuit is never built. For each candidate the phase
//! flip followed by post-selection on the initial phase/system registers
//! reduces to multiplication by a real scalar `a_x`, so the whole search runs
//! on an `N`-dimensional amplitude vector. Norm removed by `|a_x| < 1` is the
//! post-selection failure probability and is tracked as leakage.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default phase-register size.
pub const DEFAULT_K: usize = 5000;

/// Distance (in grid units) below which `θ_x` is treated as lying on the grid.
pub const ON_GRID_TOL: f64 = 1e-9;

/// Tolerance on `F ∈ [0, 1]` before clamping.
pub const FIDELITY_TOL: f64 = 1e-9;

/// Radius, in grid spacings `2π/K`, inside which a candidate counts as
/// close to the threshold.
pub const NEAR_THRESHOLD_RADIUS: f64 = 2.0;

/// `θ = 2 arccos F`.
pub fn theta_of_fidelity(f: f64) -> Result<f64> {
    if !(-FIDELITY_TOL..=1.0 + FIDELITY_TOL).contains(&f) || f.is_nan() {
        return Err(Error::FidelityOutOfRange(f));
    }
    Ok(2.0 * f.clamp(0.0, 1.0).acos())
}

/// `F = cos(θ/2)`.
pub fn fidelity_of_theta(theta: f64) -> f64 {
    (theta / 2.0).cos()
}

/// `K` phase points `θ_m = 2πm/K`, `m = −K/2+1, …, K/2`, with `−π ≡ π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseGrid {
    k: usize,
}

impl PhaseGrid {
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 || !k.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "K must be even and >= 2, got {k}"
            )));
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn spacing(&self) -> f64 {
        TAU / self.k as f64
    }

    pub fn m_min(&self) -> i64 {
        -(self.k as i64) / 2 + 1
    }

    pub fn m_max(&self) -> i64 {
        self.k as i64 / 2
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        self.m_min()..=self.m_max()
    }

    pub fn angle(&self, m: i64) -> f64 {
        TAU * m as f64 / self.k as f64
    }

    /// Position of index `m` in a length-`K` array.
    pub fn slot(&self, m: i64) -> usize {
        (m - self.m_min()) as usize
    }

    /// Folds any integer onto the grid's index range (mod `K`).
    pub fn wrap(&self, m: i64) -> i64 {
        let k = self.k as i64;
        let r = (m - self.m_min()).rem_euclid(k);
        r + self.m_min()
    }

    /// Grid index of `θ` when `θ` is on the grid, within [`ON_GRID_TOL`].
    pub fn on_grid_index(&self, theta: f64) -> Option<i64> {
        let u = theta / self.spacing();
        let r = u.round();
        ((u - r).abs() <= ON_GRID_TOL).then(|| self.wrap(r as i64))
    }

    /// Whether grid point `m` lies strictly inside `(−θ_th, θ_th)`.
    pub fn flipped(&self, m: i64, theta_th: f64) -> bool {
        self.angle(m).abs() < theta_th
    }
}

/// Phase-register amplitudes `f_θ = (1/K) Σ_{k=0}^{K-1} e^{i(θ_x−θ)k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDistribution {
    grid: PhaseGrid,
    theta_x: f64,
    f: Vec<Complex64>,
}

impl PhaseDistribution {
    pub fn grid(&self) -> PhaseGrid {
        self.grid
    }

    pub fn theta_x(&self) -> f64 {
        self.theta_x
    }

    /// Amplitudes in grid order `m = −K/2+1, …, K/2`.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.f
    }

    pub fn amplitude(&self, m: i64) -> Complex64 {
        self.f[self.grid.slot(m)]
    }

    pub fn total_probability(&self) -> f64 {
        self.f.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Grid index of the largest `|f_θ|`.
    pub fn peak(&self) -> i64 {
        let (slot, _) = self.f.iter().enumerate().fold((0, -1.0), |best, (i, z)| {
            if z.norm() > best.1 {
                (i, z.norm())
            } else {
                best
            }
        });
        slot as i64 + self.grid.m_min()
    }
}

/// Geometric sum `(1/K) Σ_{k<K} e^{iδk}`, evaluated as
/// `(1/K) e^{iδ(K−1)/2} sin(Kδ/2) / sin(δ/2)` with `δ` folded into `(−π, π]`.
fn geometric_mean_phase(delta: f64, k: usize) -> Complex64 {
    let d = delta - TAU * (delta / TAU).round();
    let half = d / 2.0;
    let s = half.sin();
    if s == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let kf = k as f64;
    let magnitude = (kf * half).sin() / (kf * s);
    Complex64::from_polar(magnitude, half * (kf - 1.0))
}

/// Closed-form phase distribution for angle `θ_x` on a `K`-point register.
/// On-grid angles give an exact delta.
pub fn phase_distribution(theta_x: f64, k: usize) -> Result<PhaseDistribution> {
    let grid = PhaseGrid::new(k)?;
    let f = match grid.on_grid_index(theta_x) {
        Some(mx) => {
            let mut f = vec![Complex64::new(0.0, 0.0); k];
            f[grid.slot(mx)] = Complex64::new(1.0, 0.0);
            f
        }
        None => grid
            .indices()
            .map(|m| geometric_mean_phase(theta_x - grid.angle(m), k))
            .collect(),
    };
    Ok(PhaseDistribution { grid, theta_x, f })
}

/// Probability that the phase register reads a point inside `(−θ_th, θ_th)`.
fn inside_probability(dist: &PhaseDistribution, theta_th: f64) -> f64 {
    let grid = dist.grid;
    // Only the points within the window contribute; walk outward from 0.
    let reach = (theta_th / grid.spacing()).ceil() as i64;
    let lo = (-reach).max(grid.m_min());
    let hi = reach.min(grid.m_max());
    (lo..=hi)
        .filter(|&m| grid.flipped(m, theta_th))
        .map(|m| dist.amplitude(m).norm_sqr())
        .sum()
}

/// `a_x = ½(⟨A₊|U_th|A₊⟩ + ⟨A₋|U_th|A₋⟩)`.
///
/// `U_th` flips grid points with `|θ| < θ_th`. Because that window is
/// symmetric, both branches give `Σ_θ |f_θ|² s(θ) = 1 − 2·P(inside)`.
pub fn flip_coefficient(theta_x: f64, k: usize, theta_th: f64) -> Result<f64> {
    check_threshold(theta_th)?;
    let dist = phase_distribution(theta_x, k)?;
    Ok(flip_from_distribution(&dist, theta_th))
}

pub fn flip_from_distribution(dist: &PhaseDistribution, theta_th: f64) -> f64 {
    (1.0 - 2.0 * inside_probability(dist, theta_th)).clamp(-1.0, 1.0)
}

fn check_threshold(theta_th: f64) -> Result<()> {
    if !(theta_th > 0.0 && theta_th < PI) {
        return Err(Error::InvalidArgument(format!(
            "θ_th must lie in (0, π), got {theta_th}"
        )));
    }
    Ok(())
}

/// `η_x = −1` if `|θ_x| < θ_th`, else `+1`.
pub fn ideal_flip(theta_x: f64, theta_th: f64) -> f64 {
    if theta_x.abs() < theta_th {
        -1.0
    } else {
        1.0
    }
}

/// Candidate fidelities and their angles `θ_x = 2 arccos F(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    fidelities: Vec<f64>,
    thetas: Vec<f64>,
}

impl CandidateSet {
    pub fn from_fidelities(fidelities: Vec<f64>) -> Result<Self> {
        if fidelities.is_empty() {
            return Err(Error::NoCandidates);
        }
        let thetas = fidelities
            .iter()
            .map(|&f| theta_of_fidelity(f))
            .collect::<Result<Vec<_>>>()?;
        let fidelities = fidelities.into_iter().map(|f| f.clamp(0.0, 1.0)).collect();
        Ok(Self { fidelities, thetas })
    }

    pub fn from_thetas(thetas: Vec<f64>) -> Result<Self> {
        if thetas.is_empty() {
            return Err(Error::NoCandidates);
        }
        if let Some(&bad) = thetas.iter().find(|t| !(0.0..=PI).contains(*t)) {
            return Err(Error::InvalidArgument(format!(
                "θ_x = {bad} outside [0, π]"
            )));
        }
        let fidelities = thetas.iter().map(|&t| fidelity_of_theta(t)).collect();
        Ok(Self { fidelities, thetas })
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn fidelities(&self) -> &[f64] {
        &self.fidelities
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn ideal_flips(&self, theta_th: f64) -> Vec<f64> {
        self.thetas
            .iter()
            .map(|&t| ideal_flip(t, theta_th))
            .collect()
    }

    pub fn leaky_flips(&self, theta_th: f64, k: usize) -> Result<Vec<f64>> {
        check_threshold(theta_th)?;
        self.thetas
            .iter()
            .map(|&t| flip_coefficient(t, k, theta_th))
            .collect()
    }

    pub fn marked(&self, theta_th: f64) -> Vec<bool> {
        self.thetas.iter().map(|&t| t.abs() < theta_th).collect()
    }

    pub fn marked_count(&self, theta_th: f64) -> usize {
        self.marked(theta_th).into_iter().filter(|&m| m).count()
    }

    /// Labels whose `θ_x` lies within `radius · 2π/K` of `θ_th`.
    pub fn near_threshold(&self, theta_th: f64, k: usize, radius: f64) -> Vec<usize> {
        let r = radius * TAU / k as f64;
        (0..self.len())
            .filter(|&x| (self.thetas[x] - theta_th).abs() < r)
            .collect()
    }
}

/// Amplitudes over candidates plus the probability lost to failed phase flips.
#[derive(Debug, Clone, PartialEq)]
pub struct GroverState {
    amplitudes: Vec<Complex64>,
    leaked_probability: f64,
}

impl GroverState {
    /// `|X⟩ = N^{-1/2} Σ_x |x⟩`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoCandidates);
        }
        let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        Ok(Self {
            amplitudes: vec![a; n],
            leaked_probability: 0.0,
        })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn leaked_probability(&self) -> f64 {
        self.leaked_probability
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn retained_probability(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probability_of(&self, mask: &[bool]) -> f64 {
        self.amplitudes
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|(a, _)| a.norm_sqr())
            .sum()
    }
}

/// One iteration `α ← (1 − 2|X⟩⟨X|) · diag(flips) · α`.
///
/// Norm removed by `|flip| < 1` is added to the leaked probability.
pub fn grover_iterate(state: &GroverState, flips: &[f64]) -> Result<GroverState> {
    let n = state.amplitudes.len();
    if flips.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: flips.len(),
        });
    }
    if let Some(&bad) = flips.iter().find(|f| !(f.abs() <= 1.0)) {
        return Err(Error::InvalidArgument(format!(
            "flip coefficient {bad} outside [-1, 1]"
        )));
    }
    let before = state.retained_probability();
    let mut a: Vec<Complex64> = state
        .amplitudes
        .iter()
        .zip(flips)
        .map(|(a, f)| a * *f)
        .collect();
    let after: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let mean = a.iter().sum::<Complex64>() / n as f64;
    for z in &mut a {
        *z -= 2.0 * mean;
    }
    Ok(GroverState {
        amplitudes: a,
        leaked_probability: state.leaked_probability + (before - after),
    })
}

/// States after `0, 1, …, j` iterations from `|X⟩`.
pub fn trajectory(flips: &[f64], j: usize) -> Result<Vec<GroverState>> {
    let mut states = Vec::with_capacity(j + 1);
    states.push(GroverState::uniform(flips.len())?);
    for i in 0..j {
        let next = grover_iterate(&states[i], flips)?;
        states.push(next);
    }
    Ok(states)
}

/// `⌊(π/4)√(N/M)⌋`, at least 1.
pub fn optimal_iterations(n: usize, m: usize) -> Result<usize> {
    if m == 0 {
        return Err(Error::NoMarked);
    }
    if m > n {
        return Err(Error::InvalidArgument(format!("M = {m} exceeds N = {n}")));
    }
    let j = (PI / 4.0 * (n as f64 / m as f64).sqrt()).floor() as usize;
    Ok(j.max(1))
}

/// Which phase flip drives the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlipMode {
    /// Exact `η_x`.
    Ideal,
    /// Finite-resolution `a_x` with leakage.
    Leaky,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub marked_probability: f64,
    pub leaked_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchReport {
    pub mode: FlipMode,
    pub theta_th: f64,
    pub k: usize,
    pub marked: Vec<bool>,
    pub marked_count: usize,
    /// True when no candidate has `|θ_x| < θ_th`; the search still runs.
    pub no_marked: bool,
    pub flips: Vec<f64>,
    pub iterations: Vec<IterationRecord>,
    pub final_probabilities: Vec<f64>,
    /// Most probable candidate after the last iteration (lowest label on ties).
    pub best: usize,
    pub iterations_used: usize,
    /// Candidates within [`NEAR_THRESHOLD_RADIUS`] grid spacings of `θ_th`.
    pub near_threshold: Vec<usize>,
}

/// Runs `j_max` iterations from `|X⟩`, recording the marked probability and
/// leakage after each (iteration 0 is the initial state).
pub fn run_search(
    candidates: &CandidateSet,
    theta_th: f64,
    k: usize,
    j_max: usize,
    mode: FlipMode,
) -> Result<SearchReport> {
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    check_threshold(theta_th)?;
    PhaseGrid::new(k)?;
    let flips = match mode {
        FlipMode::Ideal => candidates.ideal_flips(theta_th),
        FlipMode::Leaky => candidates.leaky_flips(theta_th, k)?,
    };
    let marked = candidates.marked(theta_th);
    let marked_count = marked.iter().filter(|&&m| m).count();
    let states = trajectory(&flips, j_max)?;
    let iterations = states
        .iter()
        .enumerate()
        .map(|(i, s)| IterationRecord {
            iteration: i,
            marked_probability: s.probability_of(&marked),
            leaked_probability: s.leaked_probability(),
        })
        .collect();
    let last = states.last().expect("trajectory holds the initial state");
    let final_probabilities = last.probabilities();
    let best = final_probabilities
        .iter()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |b, (i, &p)| if p > b.1 { (i, p) } else { b },
        )
        .0;
    Ok(SearchReport {
        mode,
        theta_th,
        k,
        marked_count,
        no_marked: marked_count == 0,
        marked,
        flips,
        iterations,
        final_probabilities,
        best,
        iterations_used: j_max,
        near_threshold: candidates.near_threshold(theta_th, k, NEAR_THRESHOLD_RADIUS),
    })
}

/// Per-iteration error terms `ε_i = ‖(V_th^ideal − V_th) α^{(i−1)}‖` for
/// `i = 1..=j`, where `α^{(i−1)}` follows the ideal trajectory.
pub fn error_terms(
    candidates: &CandidateSet,
    theta_th: f64,
    k: usize,
    j: usize,
) -> Result<Vec<f64>> {
    let eta = candidates.ideal_flips(theta_th);
    let a = candidates.leaky_flips(theta_th, k)?;
    let states = trajectory(&eta, j.saturating_sub(1))?;
    Ok(states
        .iter()
        .take(j)
        .map(|s| {
            s.amplitudes
                .iter()
                .zip(eta.iter().zip(&a))
                .map(|(al, (e, ax))| al.norm_sqr() * (e - ax).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect())
}

/// `Σ_{i=1}^{j} ε_i`, an upper bound on `‖(V_X V^ideal)^j|X⟩ − (V_X V_th)^j|X⟩‖`.
pub fn error_bound(candidates: &CandidateSet, theta_th: f64, k: usize, j: usize) -> Result<f64> {
    if j == 0 {
        return Err(Error::InvalidArgument("error bound needs j >= 1".into()));
    }
    Ok(error_terms(candidates, theta_th, k, j)?.iter().sum())
}

/// 2-norm distance between two amplitude vectors.
pub fn amplitude_distance(a: &GroverState, b: &GroverState) -> f64 {
    a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_fidelity_relation() {
        assert_eq!(theta_of_fidelity(1.0).unwrap(), 0.0);
        assert!((theta_of_fidelity(0.0).unwrap() - PI).abs() < 1e-15);
        assert!((theta_of_fidelity(0.1f64.cos()).unwrap() - 0.2).abs() < 1e-12);
        assert!(theta_of_fidelity(1.0 + 1e-12).is_ok());
        assert!(theta_of_fidelity(1.1).is_err());
        assert!(theta_of_fidelity(-0.01).is_err());
    }

    #[test]
    fn grid_layout() {
        let g = PhaseGrid::new(8).unwrap();
        assert_eq!(
            g.indices().collect::<Vec<_>>(),
            vec![-3, -2, -1, 0, 1, 2, 3, 4]
        );
        assert_eq!(g.wrap(-4), 4);
        assert_eq!(g.on_grid_index(-PI), Some(4));
        assert!(PhaseGrid::new(7).is_err());
        assert!(PhaseGrid::new(0).is_err());
    }

    #[test]
    fn on_grid_deltas() {
        let d = phase_distribution(0.0, 16).unwrap();
        assert_eq!(d.amplitude(0), Complex64::new(1.0, 0.0));
        assert_eq!(d.total_probability(), 1.0);
        let g = PhaseGrid::new(16).unwrap();
        let d = phase_distribution(g.angle(1), 16).unwrap();
        assert_eq!(d.amplitude(1), Complex64::new(1.0, 0.0));
        assert_eq!(d.peak(), 1);
    }

    #[test]
    fn off_grid_peak_is_nearest_point() {
        let g = PhaseGrid::new(64).unwrap();
        for frac in [0.1, 0.3, 0.49, 0.51, 0.9] {
            let theta = g.angle(5) + frac * g.spacing();
            let d = phase_distribution(theta, 64).unwrap();
            assert_eq!(d.peak(), if frac < 0.5 { 5 } else { 6 });
            assert!((d.total_probability() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn flip_limits() {
        let k = 5000;
        let g = PhaseGrid::new(k).unwrap();
        let th = 10.0 * g.spacing();
        assert_eq!(flip_coefficient(0.0, k, th).unwrap(), -1.0);
        assert_eq!(flip_coefficient(PI, k, th).unwrap(), 1.0);
        assert!(flip_coefficient(0.0, k, 0.0).is_err());
        assert!(flip_coefficient(0.0, k, PI).is_err());
    }

    #[test]
    fn ideal_flip_boundary_is_unmarked() {
        assert_eq!(ideal_flip(0.0, 0.1), -1.0);
        assert_eq!(ideal_flip(PI, 0.1), 1.0);
        assert_eq!(ideal_flip(0.1, 0.1), 1.0);
    }

    #[test]
    fn pure_reflection_returns_minus_uniform() {
        let s = GroverState::uniform(5).unwrap();
        let out = grover_iterate(&s, &[1.0; 5]).unwrap();
        for (a, b) in out.amplitudes().iter().zip(s.amplitudes()) {
            assert!((a + b).norm() < 1e-15);
        }
    }

    #[test]
    fn four_candidates_one_marked() {
        let s = GroverState::uniform(4).unwrap();
        let out = grover_iterate(&s, &[1.0, 1.0, -1.0, 1.0]).unwrap();
        assert!((out.probabilities()[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn partial_flips_leak() {
        let s = GroverState::uniform(3).unwrap();
        let out = grover_iterate(&s, &[0.5, -0.9, 1.0]).unwrap();
        let lost = 1.0 - out.retained_probability();
        assert!(lost > 0.0);
        assert!((out.leaked_probability() - lost).abs() < 1e-15);
        assert!(grover_iterate(&s, &[1.5, 1.0, 1.0]).is_err());
        assert!(grover_iterate(&s, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn optimal_iteration_counts() {
        assert_eq!(optimal_iterations(64, 1).unwrap(), 6);
        assert_eq!(optimal_iterations(7, 7).unwrap(), 1);
        assert_eq!(optimal_iterations(100, 4).unwrap(), 3);
        assert_eq!(optimal_iterations(10, 0), Err(Error::NoMarked));
    }

    #[test]
    fn all_marked_stays_marked() {
        let c = CandidateSet::from_fidelities(vec![1.0; 6]).unwrap();
        let r = run_search(&c, 0.5, 5000, 4, FlipMode::Ideal).unwrap();
        assert_eq!(r.marked_count, 6);
        for it in &r.iterations {
            assert!((it.marked_probability - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn no_marked_is_flagged() {
        let c = CandidateSet::from_fidelities(vec![0.1, 0.2]).unwrap();
        let r = run_search(&c, 0.01, 5000, 3, FlipMode::Ideal).unwrap();
        assert!(r.no_marked);
        assert_eq!(r.iterations.len(), 4);
    }

    #[test]
    fn on_grid_candidates_have_zero_bound() {
        let g = PhaseGrid::new(5000).unwrap();
        let th = 10.5 * g.spacing();
        let c = CandidateSet::from_thetas(vec![g.angle(3), g.angle(11), g.angle(10), g.angle(400)])
            .unwrap();
        for j in 1..6 {
            assert_eq!(error_bound(&c, th, 5000, j).unwrap(), 0.0);
        }
        assert!(error_bound(&c, th, 5000, 0).is_err());
    }
}
