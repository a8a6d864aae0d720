//! Non-commutative power series over the free semigroup: the Fourier symbols
//! `sum_w a_w L_w` of elements of the left algebra.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fock::{from_records, to_records, FockVector, WordCoeff, C64};
use crate::words::Word;

/// Sparse map `Word -> coefficient` on an `n`-letter alphabet.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FreeSeries {
    n: usize,
    coeffs: BTreeMap<Word, C64>,
}

/// Interchange form: `{n, terms: [{word, re, im}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeSeriesRecord {
    pub n: usize,
    pub terms: Vec<WordCoeff>,
}

impl FreeSeries {
    pub fn zero(n: usize) -> Self {
        FreeSeries { n, coeffs: BTreeMap::new() }
    }

    /// `c * delta_w`.
    pub fn monomial(n: usize, w: Word, c: C64) -> Self {
        let mut s = FreeSeries::zero(n);
        s.add_term(w, c);
        s
    }

    pub fn one(n: usize) -> Self {
        FreeSeries::monomial(n, Word::unit(), C64::new(1.0, 0.0))
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Word, C64)>) -> Result<Self> {
        let mut s = FreeSeries::zero(n);
        for (w, c) in terms {
            w.check_alphabet(n)?;
            s.add_term(w, c);
        }
        Ok(s)
    }

    /// Convenience for real coefficients given as `("z1 z2", 0.5)` pairs.
    pub fn from_real(n: usize, terms: &[(&str, f64)]) -> Result<Self> {
        let parsed = terms
            .iter()
            .map(|(w, c)| Ok((w.parse::<Word>()?, C64::new(*c, 0.0))))
            .collect::<Result<Vec<_>>>()?;
        FreeSeries::from_terms(n, parsed)
    }

    pub fn n(&self) -> usize {
        self.n
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

    pub fn add_term(&mut self, w: Word, c: C64) {
        *self.coeffs.entry(w).or_default() += c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.norm() == 0.0)
    }

    /// Length of the longest word with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().filter(|(_, c)| c.norm() != 0.0).map(|(w, _)| w.len()).max().unwrap_or(0)
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.values().filter(|c| c.norm() != 0.0).count()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn scale(&self, s: C64) -> FreeSeries {
        FreeSeries { n: self.n, coeffs: self.coeffs.iter().map(|(w, c)| (w.clone(), c * s)).collect() }
    }

    pub fn add(&self, other: &FreeSeries) -> FreeSeries {
        let mut out = self.clone();
        for (w, c) in &other.coeffs {
            out.add_term(w.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &FreeSeries) -> FreeSeries {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Drops words longer than `max_len`.
    pub fn truncate(&self, max_len: usize) -> FreeSeries {
        FreeSeries {
            n: self.n,
            coeffs: self.coeffs.iter().filter(|(w, _)| w.len() <= max_len).map(|(w, c)| (w.clone(), *c)).collect(),
        }
    }

    /// Symbol of the product `L_self L_other`: `(st)_u = sum_{xy=u} s_x t_y`,
    /// keeping only words of length at most `max_len` when given.
    pub fn mul(&self, other: &FreeSeries, max_len: Option<usize>) -> FreeSeries {
        let mut out = FreeSeries::zero(self.n.max(other.n));
        for (x, a) in &self.coeffs {
            for (y, b) in &other.coeffs {
                if max_len.is_some_and(|m| x.len() + y.len() > m) {
                    continue;
                }
                out.add_term(x.concat(y), a * b);
            }
        }
        out
    }

    /// Largest coefficient modulus of `self - other`.
    pub fn max_diff(&self, other: &FreeSeries) -> f64 {
        self.sub(other).coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// The vector `sum_w a_w xi_w` in the Fock space truncated at `level`.
    pub fn as_vector(&self, level: usize) -> Result<FockVector> {
        FockVector::from_coeffs(self.n, level, self.truncate(level).coeffs)
    }

    pub fn from_vector(v: &FockVector) -> FreeSeries {
        FreeSeries { n: v.n(), coeffs: v.coeffs().clone() }
    }

    /// Symbol `sum_{k} c_k (z_letter)^k` for a one-variable coefficient list.
    pub fn along_letter(n: usize, letter: u32, coeffs: &[C64]) -> FreeSeries {
        let mut s = FreeSeries::zero(n);
        for (k, c) in coeffs.iter().enumerate() {
            s.add_term(Word::power(letter, k), *c);
        }
        s
    }

    pub fn to_record(&self) -> FreeSeriesRecord {
        FreeSeriesRecord { n: self.n, terms: to_records(&self.coeffs) }
    }

    pub fn from_record(r: &FreeSeriesRecord) -> Result<FreeSeries> {
        Ok(FreeSeries { n: r.n, coeffs: from_records(&r.terms, r.n)? })
    }
}

/// Splits `sum_w |a_w|^2` into the vacuum part `|a_1|^2` and the rest.
///
/// For a unitary element the total is 1 and `|a_1| = 1`, forcing every other
/// coefficient to vanish.
pub fn bessel_split(s: &FreeSeries) -> (f64, f64) {
    let vac = s.coeff(&Word::unit()).norm_sqr();
    (vac, s.norm_sqr() - vac)
}
