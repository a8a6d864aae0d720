//! Vectors of the Fock space truncated to levels at most `level`.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{FockError, Result};
use crate::words::{BasisIndexer, Word};

pub type C64 = Complex64;

/// Default tolerance for identities that hold exactly in exact arithmetic.
pub const EXACT_TOL: f64 = 1e-12;

/// One `{word, re, im}` record of the interchange format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordCoeff {
    pub word: String,
    pub re: f64,
    pub im: f64,
}

pub(crate) fn to_records(coeffs: &BTreeMap<Word, C64>) -> Vec<WordCoeff> {
    coeffs
        .iter()
        .map(|(w, c)| WordCoeff { word: w.to_string(), re: c.re, im: c.im })
        .collect()
}

pub(crate) fn from_records(records: &[WordCoeff], n: usize) -> Result<BTreeMap<Word, C64>> {
    let mut out = BTreeMap::new();
    for r in records {
        let w: Word = r.word.parse()?;
        w.check_alphabet(n)?;
        *out.entry(w).or_insert(C64::new(0.0, 0.0)) += C64::new(r.re, r.im);
    }
    Ok(out)
}

/// A finitely supported vector `sum_w c_w xi_w` with `|w| <= level`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    n: usize,
    level: usize,
    coeffs: BTreeMap<Word, C64>,
}

impl FockVector {
    pub fn zero(n: usize, level: usize) -> Self {
        FockVector { n, level, coeffs: BTreeMap::new() }
    }

    /// The basis vector `xi_w`.
    pub fn basis(n: usize, level: usize, w: &Word) -> Result<Self> {
        let mut v = FockVector::zero(n, level);
        v.set(w.clone(), C64::new(1.0, 0.0))?;
        Ok(v)
    }

    /// The vacuum vector `xi_1`.
    pub fn vacuum(n: usize, level: usize) -> Self {
        FockVector::basis(n, level, &Word::unit()).expect("unit word always fits")
    }

    pub fn from_coeffs(n: usize, level: usize, coeffs: impl IntoIterator<Item = (Word, C64)>) -> Result<Self> {
        let mut v = FockVector::zero(n, level);
        for (w, c) in coeffs {
            v.add_at(w, c)?;
        }
        Ok(v)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn coeffs(&self) -> &BTreeMap<Word, C64> {
        &self.coeffs
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &C64)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, w: &Word) -> C64 {
        self.coeffs.get(w).copied().unwrap_or_default()
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        w.check_alphabet(self.n)?;
        if w.len() > self.level {
            return Err(FockError::DegreeOverflow { degree: w.len(), level: self.level });
        }
        Ok(())
    }

    pub fn set(&mut self, w: Word, c: C64) -> Result<()> {
        self.check_word(&w)?;
        self.coeffs.insert(w, c);
        Ok(())
    }

    pub fn add_at(&mut self, w: Word, c: C64) -> Result<()> {
        self.check_word(&w)?;
        *self.coeffs.entry(w).or_default() += c;
        Ok(())
    }

    /// Adds `c` at `w`, silently dropping words beyond the truncation level.
    pub(crate) fn add_truncated(&mut self, w: Word, c: C64) {
        if w.len() <= self.level {
            *self.coeffs.entry(w).or_default() += c;
        }
    }

    fn check_shape(&self, other: &FockVector) -> Result<()> {
        if self.n != other.n || self.level != other.level {
            return Err(FockError::DimensionMismatch(format!(
                "(n={}, N={}) vs (n={}, N={})",
                self.n, self.level, other.n, other.level
            )));
        }
        Ok(())
    }

    /// `(self, other) = sum_w self_w * conj(other_w)`; linear in the first slot.
    pub fn inner(&self, other: &FockVector) -> Result<C64> {
        self.check_shape(other)?;
        let (small, large, flip) = if self.coeffs.len() <= other.coeffs.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = C64::new(0.0, 0.0);
        for (w, a) in &small.coeffs {
            if let Some(b) = large.coeffs.get(w) {
                acc += if flip { b * a.conj() } else { a * b.conj() };
            }
        }
        Ok(acc)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// The level projection `P_k`.
    pub fn project_level(&self, k: usize) -> FockVector {
        self.filter(|w| w.len() == k)
    }

    pub fn filter(&self, keep: impl Fn(&Word) -> bool) -> FockVector {
        FockVector {
            n: self.n,
            level: self.level,
            coeffs: self.coeffs.iter().filter(|(w, _)| keep(w)).map(|(w, c)| (w.clone(), *c)).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> FockVector {
        FockVector {
            n: self.n,
            level: self.level,
            coeffs: self.coeffs.iter().map(|(w, c)| (w.clone(), c * s)).collect(),
        }
    }

    pub fn axpy(&self, s: C64, other: &FockVector) -> Result<FockVector> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (w, c) in &other.coeffs {
            *out.coeffs.entry(w.clone()).or_default() += s * c;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &FockVector) -> Result<FockVector> {
        self.axpy(C64::new(-1.0, 0.0), other)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Same coefficients viewed at another truncation level (words beyond it dropped).
    pub fn with_level(&self, level: usize) -> FockVector {
        FockVector {
            n: self.n,
            level,
            coeffs: self.coeffs.iter().filter(|(w, _)| w.len() <= level).map(|(w, c)| (w.clone(), *c)).collect(),
        }
    }

    pub fn to_dense(&self, indexer: &BasisIndexer) -> Result<DVector<C64>> {
        if indexer.n() != self.n || indexer.level() != self.level {
            return Err(FockError::DimensionMismatch("indexer does not match vector".into()));
        }
        let mut out = DVector::zeros(indexer.size());
        for (w, c) in &self.coeffs {
            let i = indexer.index_of(w).expect("word within level");
            out[i] = *c;
        }
        Ok(out)
    }

    /// Dense array back to a sparse vector; exact zeros are not stored.
    pub fn from_dense(indexer: &BasisIndexer, values: &DVector<C64>) -> FockVector {
        let coeffs = values
            .iter()
            .enumerate()
            .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
            .map(|(i, c)| (indexer.word_at(i).expect("index in range"), *c))
            .collect();
        FockVector { n: indexer.n(), level: indexer.level(), coeffs }
    }

    pub fn to_records(&self) -> Vec<WordCoeff> {
        to_records(&self.coeffs)
    }

    pub fn from_records(n: usize, level: usize, records: &[WordCoeff]) -> Result<Self> {
        FockVector::from_coeffs(n, level, from_records(records, n)?)
    }
}

/// Deterministic pseudo-random unit vector with complex Gaussian entries on
/// every basis word of length at most `level`.
pub fn random_vector(n: usize, level: usize, seed: u64) -> Result<FockVector> {
    let indexer = BasisIndexer::new(n, level)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = FockVector::zero(n, level);
    for w in indexer.words() {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        v.coeffs.insert(w, C64::new(re, im));
    }
    let norm = v.norm();
    Ok(v.scale(C64::new(1.0 / norm, 0.0)))
}
