//! Pure states of `n` qubits as dense amplitude vectors.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::MAX_SITES;

/// Normalization tolerance on `Σ|a|²`.
pub const NORM_TOL: f64 = 1e-10;

/// A normalized amplitude vector of length `2^n_sites`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps `amplitudes`, checking length and normalization.
    pub fn new(n_sites: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let s = Self::unnormalized(n_sites, amplitudes)?;
        let n2 = s.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(s)
    }

    /// Wraps `amplitudes` without the normalization check. Used for the
    /// output of unitary maps, which preserve the norm up to rounding.
    pub(crate) fn unnormalized(n_sites: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(Error::InvalidArgument(format!("n_sites = {n_sites}")));
        }
        if amplitudes.len() != 1 << n_sites {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_sites,
                actual: amplitudes.len(),
            });
        }
        Ok(Self {
            n_sites,
            amplitudes,
        })
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(n_sites: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        for a in &mut amplitudes {
            *a /= n;
        }
        Self::unnormalized(n_sites, amplitudes)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_sites: usize, index: usize) -> Result<Self> {
        let dim = 1usize
            .checked_shl(n_sites as u32)
            .filter(|_| n_sites > 0 && n_sites <= MAX_SITES)
            .ok_or_else(|| Error::InvalidArgument(format!("n_sites = {n_sites}")))?;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: index,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n_sites,
            amplitudes,
        })
    }

    /// Basis state from a bitstring such as `"10000"`; the first character is site 1.
    pub fn from_bitstring(bits: &str) -> Result<Self> {
        let n = bits.len();
        let mut index = 0usize;
        for ch in bits.chars() {
            index <<= 1;
            match ch {
                '0' => {}
                '1' => index |= 1,
                _ => return Err(Error::InvalidArgument(format!("bitstring {bits:?}"))),
            }
        }
        Self::basis(n, index)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        inner_product(self, other)
    }

    /// Index, real and imaginary parts, one amplitude per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,real,imaginary\n");
        for (i, a) in self.amplitudes.iter().enumerate() {
            writeln!(out, "{i},{:.16e},{:.16e}", a.re, a.im).unwrap();
        }
        out
    }
}

/// `⟨a|b⟩`, conjugating `a`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    Ok(inner_raw(a.amplitudes(), b.amplitudes()))
}

/// `Σ conj(a_k) b_k` on raw slices of equal length.
pub fn inner_raw(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
