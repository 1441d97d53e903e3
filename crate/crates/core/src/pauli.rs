//! Pauli strings and real-weighted sums of them.
//!
//! Sites are numbered from 1 in every public interface. In the computational
//! basis, site 1 is the most significant bit of a basis index: for `n` sites,
//! site `s` corresponds to bit `n - s`. So `|10000⟩` (site 1 flipped) is
//! index 16 on five sites.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::StateVector;

/// Largest register for which [`HamiltonianSum::dense_matrix`] will build a matrix.
pub const DENSE_LIMIT: usize = 12;

/// Largest register a bit-mask Pauli string can address.
pub const MAX_SITES: usize = 30;

/// Single-site Pauli operator. The derived ordering `I < X < Y < Z` defines
/// the canonical term order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// A tensor product of single-site Paulis over a fixed number of sites.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    axes: Vec<Pauli>,
}

impl PauliString {
    pub fn new(axes: Vec<Pauli>) -> Result<Self> {
        if axes.is_empty() || axes.len() > MAX_SITES {
            return Err(Error::InvalidAxes(
                axes.iter().map(|p| p.as_char()).collect(),
            ));
        }
        Ok(Self { axes })
    }

    pub fn identity(n_sites: usize) -> Result<Self> {
        Self::new(vec![Pauli::I; n_sites])
    }

    /// Build a string from `(site, axis)` pairs with 1-based sites; unlisted
    /// sites are identity. A repeated site keeps the last axis given.
    pub fn from_sites(n_sites: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::identity(n_sites)?;
        for &(site, p) in ops {
            if site == 0 || site > n_sites {
                return Err(Error::SiteOutOfRange { site, n_sites });
            }
            s.axes[site - 1] = p;
        }
        Ok(s)
    }

    pub fn n_sites(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Pauli] {
        &self.axes
    }

    /// Axis acting on 1-based `site`.
    pub fn axis(&self, site: usize) -> Pauli {
        self.axes[site - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.axes.iter().all(|&p| p == Pauli::I)
    }

    /// Number of non-identity sites.
    pub fn weight(&self) -> usize {
        self.axes.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Bit-mask form: `P|b⟩ = i^{n_y} (-1)^{popcount(b & z)} |b ^ x⟩`.
    pub fn masks(&self) -> PauliMasks {
        let n = self.axes.len();
        let mut m = PauliMasks { x: 0, z: 0, n_y: 0 };
        for (k, &p) in self.axes.iter().enumerate() {
            let bit = 1usize << (n - 1 - k);
            match p {
                Pauli::I => {}
                Pauli::X => m.x |= bit,
                Pauli::Z => m.z |= bit,
                Pauli::Y => {
                    m.x |= bit;
                    m.z |= bit;
                    m.n_y += 1;
                }
            }
        }
        m
    }

    /// Returns `P|ψ⟩` as a fresh vector.
    pub fn apply(&self, amplitudes: &[Complex64]) -> Vec<Complex64> {
        let m = self.masks();
        let mut out = vec![Complex64::new(0.0, 0.0); amplitudes.len()];
        for (b, &a) in amplitudes.iter().enumerate() {
            out[b ^ m.x] = m.phase(b) * a;
        }
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.axes {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let axes = s
            .chars()
            .map(Pauli::from_char)
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidAxes(s.to_string()))?;
        Self::new(axes).map_err(|_| Error::InvalidAxes(s.to_string()))
    }
}

/// Bit masks of a Pauli string; see [`PauliString::masks`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliMasks {
    pub x: usize,
    pub z: usize,
    pub n_y: u32,
}

impl PauliMasks {
    /// Phase acquired by basis state `b`.
    #[inline]
    pub fn phase(&self, b: usize) -> Complex64 {
        let k = (self.n_y + 2 * ((b & self.z).count_ones() & 1)) % 4;
        match k {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

/// A real coefficient times a Pauli string.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerm {
    coefficient: f64,
    string: PauliString,
}

impl HamiltonianTerm {
    pub fn new(coefficient: f64, string: PauliString) -> Result<Self> {
        if !coefficient.is_finite() {
            return Err(Error::NonFiniteCoefficient(coefficient));
        }
        Ok(Self {
            coefficient,
            string,
        })
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn string(&self) -> &PauliString {
        &self.string
    }
}

/// A Hermitian operator `Σ c_k P_k` with real `c_k`.
///
/// Sums built through [`HamiltonianSum::new`] are canonical: one term per
/// distinct string, no zero coefficients, terms sorted lexicographically by
/// axes with `I < X < Y < Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSum {
    n_sites: usize,
    terms: Vec<HamiltonianTerm>,
}

impl HamiltonianSum {
    pub fn empty(n_sites: usize) -> Self {
        Self {
            n_sites,
            terms: Vec::new(),
        }
    }

    /// Builds a canonical sum from arbitrary terms.
    pub fn new(n_sites: usize, terms: Vec<HamiltonianTerm>) -> Result<Self> {
        for t in &terms {
            if t.string.n_sites() != n_sites {
                return Err(Error::SiteMismatch {
                    left: n_sites,
                    right: t.string.n_sites(),
                });
            }
        }
        Ok(Self { n_sites, terms }.canonicalize())
    }

    /// Builds a sum without merging, keeping the given term order.
    pub fn from_raw_terms(n_sites: usize, terms: Vec<HamiltonianTerm>) -> Result<Self> {
        for t in &terms {
            if t.string.n_sites() != n_sites {
                return Err(Error::SiteMismatch {
                    left: n_sites,
                    right: t.string.n_sites(),
                });
            }
        }
        Ok(Self { n_sites, terms })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `string`, zero if absent. Assumes canonical form.
    pub fn coefficient_of(&self, string: &PauliString) -> f64 {
        self.terms
            .iter()
            .filter(|t| &t.string == string)
            .map(|t| t.coefficient)
            .sum()
    }

    /// Sum of absolute coefficients, an upper bound on the operator norm.
    pub fn l1_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }

    /// Merges duplicate strings, drops zero coefficients, sorts by axes.
    pub fn canonicalize(&self) -> Self {
        let mut merged: BTreeMap<PauliString, f64> = BTreeMap::new();
        for t in &self.terms {
            *merged.entry(t.string.clone()).or_insert(0.0) += t.coefficient;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(string, coefficient)| HamiltonianTerm {
                coefficient,
                string,
            })
            .collect();
        Self {
            n_sites: self.n_sites,
            terms,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| HamiltonianTerm {
                coefficient: t.coefficient * factor,
                string: t.string.clone(),
            })
            .collect();
        Self {
            n_sites: self.n_sites,
            terms,
        }
        .canonicalize()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n_sites != other.n_sites {
            return Err(Error::SiteMismatch {
                left: self.n_sites,
                right: other.n_sites,
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self {
            n_sites: self.n_sites,
            terms,
        }
        .canonicalize())
    }

    /// Canonical `self - other`.
    pub fn subtract(&self, other: &Self) -> Result<Self> {
        if self.n_sites != other.n_sites {
            return Err(Error::SiteMismatch {
                left: self.n_sites,
                right: other.n_sites,
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|t| HamiltonianTerm {
            coefficient: -t.coefficient,
            string: t.string.clone(),
        }));
        Ok(Self {
            n_sites: self.n_sites,
            terms,
        }
        .canonicalize())
    }

    /// `H|s⟩`, term by term.
    pub fn apply(&self, s: &StateVector) -> Result<Vec<Complex64>> {
        if s.n_sites() != self.n_sites {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: s.dim(),
            });
        }
        Ok(self.apply_raw(s.amplitudes()))
    }

    /// `H|v⟩` for an arbitrary (possibly unnormalized) amplitude vector of
    /// the right length.
    pub fn apply_raw(&self, v: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(v.len(), self.dim());
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for t in &self.terms {
            let m = t.string.masks();
            for (b, &a) in v.iter().enumerate() {
                out[b ^ m.x] += m.phase(b) * a * t.coefficient;
            }
        }
        out
    }

    /// Dense `2^n × 2^n` matrix, `M[r, c] = ⟨r|H|c⟩`.
    pub fn dense_matrix(&self) -> Result<DMatrix<Complex64>> {
        self.dense_matrix_with_limit(DENSE_LIMIT)
    }

    pub fn dense_matrix_with_limit(&self, limit: usize) -> Result<DMatrix<Complex64>> {
        if self.n_sites > limit {
            return Err(Error::DenseLimit {
                n_sites: self.n_sites,
                limit,
            });
        }
        let dim = self.dim();
        let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for t in &self.terms {
            let masks = t.string.masks();
            for b in 0..dim {
                m[(b ^ masks.x, b)] += masks.phase(b) * t.coefficient;
            }
        }
        Ok(m)
    }

    /// Serializable record form, in term order.
    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|t| TermRecord {
                coefficient: t.coefficient,
                axes: t.string.to_string(),
            })
            .collect()
    }

    /// Rebuilds a sum from records; the result is canonical.
    pub fn from_records(records: &[TermRecord]) -> Result<Self> {
        let first = records
            .first()
            .ok_or_else(|| Error::InvalidArgument("no terms; site count unknown".into()))?;
        let n_sites = first.axes.len();
        let terms = records
            .iter()
            .map(|r| HamiltonianTerm::new(r.coefficient, r.axes.parse()?))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n_sites, terms)
    }

    /// JSON document `{"n_sites": n, "terms": [{"coefficient", "axes"}, ...]}`.
    pub fn to_json(&self) -> String {
        let doc = HamiltonianDoc {
            n_sites: self.n_sites,
            terms: self.to_records(),
        };
        serde_json::to_string_pretty(&doc).expect("records always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: HamiltonianDoc =
            serde_json::from_str(text).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let terms = doc
            .terms
            .iter()
            .map(|r| HamiltonianTerm::new(r.coefficient, r.axes.parse()?))
            .collect::<Result<Vec<_>>>()?;
        Self::new(doc.n_sites, terms)
    }
}

/// One serialized term: coefficient plus an axes string such as `"ZIIXI"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    pub coefficient: f64,
    pub axes: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HamiltonianDoc {
    n_sites: usize,
    terms: Vec<TermRecord>,
}
