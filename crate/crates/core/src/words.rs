//! Words of the unital free semigroup on `n` letters and the canonical
//! indexing of the truncated Fock basis.
//!
//! Words are ordered length-first, then lexicographically, so that every
//! level `{w : |w| = k}` occupies a contiguous block of basis indices.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::error::{FockError, Result};

/// Default hard cap on the number of basis vectors (and enumerated words).
pub const DEFAULT_BASIS_CAP: usize = 1_000_000;

/// Environment variable overriding [`DEFAULT_BASIS_CAP`].
pub const BASIS_CAP_ENV: &str = "FOCKALG_BASIS_CAP";

/// Basis cap in effect, honouring `FOCKALG_BASIS_CAP` when it parses.
pub fn basis_cap() -> usize {
    std::env::var(BASIS_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BASIS_CAP)
}

/// A finite word `z_{i1} z_{i2} ... z_{ik}`; the empty word is the unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn unit() -> Self {
        Word(Vec::new())
    }

    /// Builds a word from 1-based letters. Letters equal to zero are rejected.
    pub fn new(letters: impl IntoIterator<Item = u32>) -> Result<Self> {
        let letters: Vec<u32> = letters.into_iter().collect();
        if let Some(&bad) = letters.iter().find(|&&l| l == 0) {
            return Err(FockError::InvalidLetter { letter: bad as usize, n: 0 });
        }
        Ok(Word(letters))
    }

    /// Builds a word and checks every letter against the alphabet size.
    pub fn over(n: usize, letters: impl IntoIterator<Item = u32>) -> Result<Self> {
        let w = Word::new(letters)?;
        w.check_alphabet(n)?;
        Ok(w)
    }

    /// The single-letter word `z_i`.
    pub fn letter(i: u32) -> Self {
        assert!(i >= 1, "letters are 1-based");
        Word(vec![i])
    }

    /// `z_i^k`.
    pub fn power(i: u32, k: usize) -> Self {
        assert!(i >= 1, "letters are 1-based");
        Word(vec![i; k])
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_unit()
    }

    pub fn max_letter(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn check_alphabet(&self, n: usize) -> Result<()> {
        match self.0.iter().find(|&&l| l == 0 || l as usize > n) {
            Some(&bad) => Err(FockError::InvalidLetter { letter: bad as usize, n }),
            None => Ok(()),
        }
    }

    /// The product `uv` in the free semigroup.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn reverse(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// Returns `t` with `self = t u`, or `None` when `u` is not a suffix.
    pub fn strip_suffix(&self, u: &Word) -> Option<Word> {
        self.0.strip_suffix(u.0.as_slice()).map(|t| Word(t.to_vec()))
    }

    /// Returns `t` with `self = u t`, or `None` when `u` is not a prefix.
    pub fn strip_prefix(&self, u: &Word) -> Option<Word> {
        self.0.strip_prefix(u.0.as_slice()).map(|t| Word(t.to_vec()))
    }

    pub fn ends_with(&self, u: &Word) -> bool {
        self.0.ends_with(&u.0)
    }

    pub fn starts_with(&self, u: &Word) -> bool {
        self.0.starts_with(&u.0)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "z{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = FockError;

    /// Parses space-separated `z<i>` tokens; the empty string is the unit.
    fn from_str(s: &str) -> Result<Self> {
        s.split_whitespace()
            .map(|tok| {
                tok.strip_prefix('z')
                    .and_then(|d| d.parse::<u32>().ok())
                    .filter(|&l| l >= 1)
                    .ok_or_else(|| FockError::Parse(format!("bad letter token {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

fn checked_pow(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, _| acc.saturating_mul(n as u128))
}

/// All words of length exactly `k` over `n` letters, in lexicographic order.
pub fn enumerate_words(n: usize, k: usize) -> Result<Vec<Word>> {
    enumerate_words_capped(n, k, basis_cap())
}

pub fn enumerate_words_capped(n: usize, k: usize, cap: usize) -> Result<Vec<Word>> {
    assert!(n >= 1, "alphabet must be nonempty");
    let count = checked_pow(n, k);
    if count > cap as u128 {
        return Err(FockError::BasisTooLarge { size: count, cap });
    }
    let count = count as usize;
    let mut out = Vec::with_capacity(count);
    let mut digits = vec![0u32; k];
    for _ in 0..count {
        out.push(Word(digits.iter().map(|d| d + 1).collect()));
        for pos in (0..k).rev() {
            digits[pos] += 1;
            if (digits[pos] as usize) < n {
                break;
            }
            digits[pos] = 0;
        }
    }
    Ok(out)
}

/// Bijection between words of length at most `level` and `0..size()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisIndexer {
    n: usize,
    level: usize,
    offsets: Vec<usize>,
}

impl BasisIndexer {
    pub fn new(n: usize, level: usize) -> Result<Self> {
        Self::with_cap(n, level, basis_cap())
    }

    pub fn with_cap(n: usize, level: usize, cap: usize) -> Result<Self> {
        assert!(n >= 1, "alphabet must be nonempty");
        let size = total_size(n, level);
        if size > cap as u128 {
            return Err(FockError::BasisTooLarge { size, cap });
        }
        let mut offsets = Vec::with_capacity(level + 2);
        let mut acc = 0usize;
        let mut block = 1usize;
        for _ in 0..=level {
            offsets.push(acc);
            acc += block;
            block *= n;
        }
        offsets.push(acc);
        Ok(BasisIndexer { n, level, offsets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn size(&self) -> usize {
        self.offsets[self.level + 1]
    }

    /// Index range occupied by words of length exactly `k`.
    pub fn level_range(&self, k: usize) -> Range<usize> {
        self.offsets[k]..self.offsets[k + 1]
    }

    /// Index range of all words with length at most `k`.
    pub fn up_to(&self, k: usize) -> Range<usize> {
        0..self.offsets[k.min(self.level) + 1]
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        if w.len() > self.level || w.letters().iter().any(|&l| l == 0 || l as usize > self.n) {
            return None;
        }
        let rank = w
            .letters()
            .iter()
            .fold(0usize, |acc, &l| acc * self.n + (l as usize - 1));
        Some(self.offsets[w.len()] + rank)
    }

    pub fn word_at(&self, index: usize) -> Option<Word> {
        if index >= self.size() {
            return None;
        }
        let k = self.offsets.partition_point(|&o| o <= index) - 1;
        let mut rank = index - self.offsets[k];
        let mut letters = vec![0u32; k];
        for slot in letters.iter_mut().rev() {
            *slot = (rank % self.n) as u32 + 1;
            rank /= self.n;
        }
        Some(Word(letters))
    }

    pub fn words(&self) -> impl Iterator<Item = Word> + '_ {
        (0..self.size()).map(move |i| self.word_at(i).expect("index in range"))
    }
}

/// `sum_{k=0}^{level} n^k`, saturating.
pub fn total_size(n: usize, level: usize) -> u128 {
    (0..=level).fold(0u128, |acc, k| acc.saturating_add(checked_pow(n, k)))
}
