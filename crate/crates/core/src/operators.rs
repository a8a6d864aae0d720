//! Elements of the left and right algebras compressed to the truncated Fock
//! space, plus the diagnostics run on them.
//!
//! A [`TruncOp`] is either *symbolic* (a Fourier symbol acting by left or right
//! concatenation, possibly adjointed) or a dense compression matrix. Symbolic
//! operators act on sparse vectors at any truncation level; anything that needs
//! an SVD is densified through the canonical basis ordering, which is only
//! allowed up to [`DENSE_LIMIT`] basis vectors.
//!
//! Every operator carries an exactness frontier: the largest level `m` such
//! that its action on vectors supported in levels `<= m` loses nothing to
//! truncation.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{FockError, Result};
use crate::fock::{FockVector, C64};
use crate::linalg::{numerical_rank, singular_values, spectral_norm, DENSE_LIMIT};
use crate::series::FreeSeries;
use crate::words::{enumerate_words, total_size, BasisIndexer, Word};

/// Basis size used when a symbolic operator's norm is probed on a smaller
/// compression.
const PROBE_LIMIT: usize = 512;

/// Tolerance on `||L|| <= 1` for contraction preconditions.
pub const CONTRACTION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug)]
enum Action {
    /// `sum_w a_w L_w` (left) or `sum_w a_w R_w` (right), stored truncated to
    /// the level; `degree` is the degree of the untruncated symbol.
    Symbol { side: Side, symbol: FreeSeries, degree: usize, adjoint: bool },
    Matrix(DMatrix<C64>),
}

/// A compressed operator on `span{xi_w : |w| <= level}`.
#[derive(Clone, Debug)]
pub struct TruncOp {
    n: usize,
    level: usize,
    frontier: usize,
    action: Action,
}

impl TruncOp {
    fn symbolic(side: Side, symbol: FreeSeries, degree: usize, n: usize, level: usize) -> TruncOp {
        TruncOp {
            n,
            level,
            frontier: level.saturating_sub(degree),
            action: Action::Symbol { side, symbol: symbol.truncate(level), degree, adjoint: false },
        }
    }

    /// `L_w` (left) or `R_w` (right).
    pub fn creation(side: Side, w: &Word, n: usize, level: usize) -> Result<TruncOp> {
        w.check_alphabet(n)?;
        if w.len() > level {
            return Err(FockError::DegreeOverflow { degree: w.len(), level });
        }
        let s = FreeSeries::monomial(n, w.clone(), C64::new(1.0, 0.0));
        Ok(TruncOp::symbolic(side, s, w.len(), n, level))
    }

    /// The left generator `L_i`.
    pub fn left_letter(i: u32, n: usize, level: usize) -> Result<TruncOp> {
        TruncOp::creation(Side::Left, &Word::letter(i), n, level)
    }

    /// The right generator `R_i`.
    pub fn right_letter(i: u32, n: usize, level: usize) -> Result<TruncOp> {
        TruncOp::creation(Side::Right, &Word::letter(i), n, level)
    }

    /// The element of the left algebra with Fourier symbol `s`.
    pub fn from_series(s: &FreeSeries, n: usize, level: usize) -> Result<TruncOp> {
        TruncOp::from_side_series(Side::Left, s, n, level)
    }

    /// `sum_w a_w L_w` or `sum_w a_w R_w`.
    pub fn from_side_series(side: Side, s: &FreeSeries, n: usize, level: usize) -> Result<TruncOp> {
        check_series_alphabet(s, n)?;
        let degree = s.degree();
        if degree > level {
            return Err(FockError::DegreeOverflow { degree, level });
        }
        Ok(TruncOp::symbolic(side, s.clone(), degree, n, level))
    }

    /// Like [`TruncOp::from_series`] but accepts symbols longer than the level,
    /// keeping the compression (words beyond the level never act).
    pub fn from_series_truncated(s: &FreeSeries, n: usize, level: usize) -> Result<TruncOp> {
        check_series_alphabet(s, n)?;
        Ok(TruncOp::symbolic(Side::Left, s.clone(), s.degree(), n, level))
    }

    pub fn identity(n: usize, level: usize) -> TruncOp {
        TruncOp::symbolic(Side::Left, FreeSeries::one(n), 0, n, level)
    }

    pub fn zero(n: usize, level: usize) -> TruncOp {
        TruncOp::symbolic(Side::Left, FreeSeries::zero(n), 0, n, level)
    }

    /// Wraps an arbitrary compression matrix; its frontier is taken to be the level.
    pub fn from_matrix(n: usize, level: usize, m: DMatrix<C64>) -> Result<TruncOp> {
        let size = total_size(n, level);
        if m.nrows() as u128 != size || m.ncols() as u128 != size {
            return Err(FockError::DimensionMismatch(format!(
                "matrix is {}x{}, basis has {size} vectors",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(TruncOp { n, level, frontier: level, action: Action::Matrix(m) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn frontier(&self) -> usize {
        self.frontier
    }

    /// How far the operator can raise word length, when known.
    fn raise(&self) -> Option<usize> {
        match &self.action {
            Action::Symbol { adjoint: true, .. } => Some(0),
            Action::Symbol { degree, .. } => Some(*degree),
            Action::Matrix(_) => None,
        }
    }

    /// Fourier symbol of a (non-adjointed) left operator.
    pub fn symbol(&self) -> Option<&FreeSeries> {
        match &self.action {
            Action::Symbol { side: Side::Left, symbol, adjoint: false, .. } => Some(symbol),
            _ => None,
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.action, Action::Matrix(_))
    }

    fn check_vector(&self, v: &FockVector) -> Result<()> {
        if v.n() != self.n || v.level() != self.level {
            return Err(FockError::DimensionMismatch(format!(
                "operator on (n={}, N={}) applied to vector on (n={}, N={})",
                self.n,
                self.level,
                v.n(),
                v.level()
            )));
        }
        Ok(())
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        self.check_vector(v)?;
        let mut out = FockVector::zero(self.n, self.level);
        match &self.action {
            Action::Symbol { side, symbol, adjoint, .. } => {
                for (u, x) in v.iter() {
                    for (w, a) in symbol.iter() {
                        match (side, adjoint) {
                            (Side::Left, false) => out.add_truncated(w.concat(u), a * x),
                            (Side::Right, false) => out.add_truncated(u.concat(w), a * x),
                            (Side::Left, true) => {
                                if let Some(t) = u.strip_prefix(w) {
                                    out.add_truncated(t, a.conj() * x);
                                }
                            }
                            (Side::Right, true) => {
                                if let Some(t) = u.strip_suffix(w) {
                                    out.add_truncated(t, a.conj() * x);
                                }
                            }
                        }
                    }
                }
            }
            Action::Matrix(m) => {
                let idx = BasisIndexer::new(self.n, self.level)?;
                let dense = m * v.to_dense(&idx)?;
                out = FockVector::from_dense(&idx, &dense);
            }
        }
        Ok(out)
    }

    /// Image of the basis vector `xi_w`.
    pub fn column(&self, w: &Word) -> Result<FockVector> {
        self.apply(&FockVector::basis(self.n, self.level, w)?)
    }

    /// The compression matrix in the canonical basis order.
    pub fn to_matrix(&self) -> Result<DMatrix<C64>> {
        if let Action::Matrix(m) = &self.action {
            return Ok(m.clone());
        }
        let idx = BasisIndexer::with_cap(self.n, self.level, DENSE_LIMIT)?;
        let size = idx.size();
        let mut m = DMatrix::zeros(size, size);
        for (j, w) in idx.words().enumerate() {
            for (u, c) in self.column(&w)?.iter() {
                m[(idx.index_of(u).expect("within level"), j)] = *c;
            }
        }
        Ok(m)
    }

    fn densified(&self) -> Result<TruncOp> {
        Ok(TruncOp { n: self.n, level: self.level, frontier: self.frontier, action: Action::Matrix(self.to_matrix()?) })
    }

    pub fn adjoint(&self) -> TruncOp {
        match &self.action {
            Action::Symbol { side, symbol, degree, adjoint } => {
                let adjoint = !adjoint;
                TruncOp {
                    n: self.n,
                    level: self.level,
                    // adjoints only shorten words, so nothing is lost to truncation
                    frontier: if adjoint { self.level } else { self.level.saturating_sub(*degree) },
                    action: Action::Symbol { side: *side, symbol: symbol.clone(), degree: *degree, adjoint },
                }
            }
            Action::Matrix(m) => {
                TruncOp { n: self.n, level: self.level, frontier: self.frontier, action: Action::Matrix(m.adjoint()) }
            }
        }
    }

    fn check_same_space(&self, other: &TruncOp) -> Result<()> {
        if self.n != other.n || self.level != other.level {
            return Err(FockError::DimensionMismatch(format!(
                "(n={}, N={}) vs (n={}, N={})",
                self.n, self.level, other.n, other.level
            )));
        }
        Ok(())
    }

    /// The product `self * other` of compressions.
    ///
    /// Products of same-side symbols stay symbolic: word-lengthening operators
    /// satisfy `P X P Y P = P X Y P`, so the symbol product is exact.
    pub fn compose(&self, other: &TruncOp) -> Result<TruncOp> {
        self.check_same_space(other)?;
        if let (
            Action::Symbol { side: s1, symbol: a, degree: d1, adjoint: j1 },
            Action::Symbol { side: s2, symbol: b, degree: d2, adjoint: j2 },
        ) = (&self.action, &other.action)
        {
            if s1 == s2 && j1 == j2 {
                let level = self.level;
                // L_a L_b has symbol ab; R_a R_b = R_{ba}; adjoint pairs reverse order
                let left_first = (*s1 == Side::Left) != *j1;
                let symbol = if left_first { a.mul(b, Some(level)) } else { b.mul(a, Some(level)) };
                let op = TruncOp::symbolic(*s1, symbol, d1 + d2, self.n, level);
                return Ok(if *j1 { op.adjoint() } else { op });
            }
        }
        let product = self.to_matrix()? * other.to_matrix()?;
        let frontier = match other.raise() {
            Some(d) => other.frontier.min(self.frontier.saturating_sub(d)),
            None => self.frontier.min(other.frontier),
        };
        Ok(TruncOp { n: self.n, level: self.level, frontier, action: Action::Matrix(product) })
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: C64, other: &TruncOp) -> Result<TruncOp> {
        self.check_same_space(other)?;
        if let (
            Action::Symbol { side: s1, symbol: a, degree: d1, adjoint: j1 },
            Action::Symbol { side: s2, symbol: b, degree: d2, adjoint: j2 },
        ) = (&self.action, &other.action)
        {
            if s1 == s2 && j1 == j2 {
                let b = if *j1 { b.scale(s.conj()) } else { b.scale(s) };
                let op = TruncOp::symbolic(*s1, a.add(&b), (*d1).max(*d2), self.n, self.level);
                return Ok(if *j1 { op.adjoint() } else { op });
            }
        }
        let sum = self.to_matrix()? + other.to_matrix()? * s;
        Ok(TruncOp {
            n: self.n,
            level: self.level,
            frontier: self.frontier.min(other.frontier),
            action: Action::Matrix(sum),
        })
    }

    pub fn add(&self, other: &TruncOp) -> Result<TruncOp> {
        self.axpy(C64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &TruncOp) -> Result<TruncOp> {
        self.axpy(C64::new(-1.0, 0.0), other)
    }

    pub fn scale(&self, s: C64) -> TruncOp {
        let mut out = self.clone();
        match &mut out.action {
            Action::Symbol { symbol, adjoint, .. } => {
                *symbol = symbol.scale(if *adjoint { s.conj() } else { s });
            }
            Action::Matrix(m) => *m *= s,
        }
        out
    }

    /// Same operator compressed to another level. Raising the level is only
    /// possible for symbolic operators whose stored symbol is complete.
    pub fn with_level(&self, level: usize) -> Result<TruncOp> {
        match &self.action {
            Action::Symbol { side, symbol, degree, adjoint } => {
                if level > self.level && *degree > self.level {
                    return Err(FockError::OutsideExactRegion(
                        "symbol was truncated and cannot be extended".into(),
                    ));
                }
                let op = TruncOp::symbolic(*side, symbol.clone(), *degree, self.n, level);
                Ok(if *adjoint { op.adjoint() } else { op })
            }
            Action::Matrix(m) => {
                if level > self.level {
                    return Err(FockError::OutsideExactRegion("dense operators cannot be extended".into()));
                }
                let keep = BasisIndexer::new(self.n, level)?.size();
                let sub = m.view((0, 0), (keep, keep)).into_owned();
                Ok(TruncOp { n: self.n, level, frontier: self.frontier.min(level), action: Action::Matrix(sub) })
            }
        }
    }

    /// Fourier coefficients `a_w = (X xi_1, xi_w)` for `|w| <= depth`.
    pub fn fourier_of(&self, depth: usize) -> Result<FreeSeries> {
        if depth > self.level {
            return Err(FockError::OutsideExactRegion(format!("depth {depth} > level {}", self.level)));
        }
        let col = self.apply(&FockVector::vacuum(self.n, self.level))?;
        Ok(FreeSeries::from_vector(&col.with_level(depth)))
    }

    /// Compression norm: the largest singular value of the compression matrix.
    /// It is a lower bound for the norm of the untruncated operator.
    pub fn op_norm(&self) -> Result<f64> {
        Ok(spectral_norm(&self.to_matrix()?))
    }

    pub fn singular_values(&self) -> Result<Vec<f64>> {
        Ok(singular_values(&self.to_matrix()?))
    }

    /// Compression norm at the largest level not exceeding this one whose
    /// basis fits a small dense probe. Still a lower bound for the true norm.
    pub fn norm_estimate(&self) -> Result<f64> {
        let mut level = self.level;
        while level > 0 && total_size(self.n, level) > PROBE_LIMIT as u128 {
            level -= 1;
        }
        self.with_level(level)?.op_norm()
    }

    /// `max_i || (X R_i - R_i X) restricted to levels <= frontier - 1 ||`.
    ///
    /// Vanishes (to rounding) exactly when `X` agrees with an element of the
    /// left algebra on its exact region.
    pub fn commutant_residual(&self) -> Result<f64> {
        if self.frontier == 0 {
            return Ok(0.0);
        }
        let x = self.densified()?;
        let idx = BasisIndexer::with_cap(self.n, self.level, DENSE_LIMIT)?;
        let cols = idx.up_to(self.frontier - 1).end;
        let xm = x.to_matrix()?;
        let mut worst: f64 = 0.0;
        for i in 1..=self.n as u32 {
            let r = TruncOp::right_letter(i, self.n, self.level)?.to_matrix()?;
            let diff = &xm * &r - &r * &xm;
            worst = worst.max(spectral_norm(&diff.columns(0, cols).into_owned()));
        }
        Ok(worst)
    }

    /// `max |(X xi_a, X xi_b) - delta_ab|` over basis words in the exact
    /// region, shrunk to at most `PROBE_LIMIT` words.
    pub fn isometry_defect(&self) -> Result<f64> {
        let mut region = self.frontier;
        while region > 0 && total_size(self.n, region) > PROBE_LIMIT as u128 {
            region -= 1;
        }
        let cols = BasisIndexer::new(self.n, region)?.words().map(|w| self.column(&w)).collect::<Result<Vec<_>>>()?;
        let mut worst: f64 = 0.0;
        for (i, a) in cols.iter().enumerate() {
            for (j, b) in cols.iter().enumerate().skip(i) {
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.inner(b)? - C64::new(expected, 0.0)).norm());
            }
        }
        Ok(worst)
    }

    /// `||(L*)^k xi||` for `k = 0..=kmax`.
    pub fn adjoint_power_orbit(&self, xi: &FockVector, kmax: usize) -> Result<Vec<f64>> {
        Ok(self.adjoint_power_orbits(std::slice::from_ref(xi), kmax)?.remove(0))
    }

    /// Orbits of several vectors; the contraction check runs once.
    pub fn adjoint_power_orbits(&self, xis: &[FockVector], kmax: usize) -> Result<Vec<Vec<f64>>> {
        let norm = self.norm_estimate()?;
        if norm > 1.0 + CONTRACTION_TOL {
            return Err(FockError::NotContraction(norm));
        }
        let adj = self.adjoint();
        xis.iter()
            .map(|xi| {
                let mut v = xi.clone();
                let mut orbit = Vec::with_capacity(kmax + 1);
                orbit.push(v.norm());
                for _ in 0..kmax {
                    v = adj.apply(&v)?;
                    orbit.push(v.norm());
                }
                Ok(orbit)
            })
            .collect()
    }

    /// Numerical ranks of `I - L L*` and `I - L* L`.
    pub fn defect_ranks(&self, tol: f64) -> Result<(usize, usize)> {
        let m = self.to_matrix()?;
        let id = DMatrix::<C64>::identity(m.nrows(), m.ncols());
        let range_defect = &id - &m * m.adjoint();
        let kernel_defect = &id - m.adjoint() * &m;
        Ok((numerical_rank(&range_defect, tol), numerical_rank(&kernel_defect, tol)))
    }

    /// `n^k - rank(P_k L P_{<k})`: the level-`k` dimension of the complement of
    /// the range, for operators with vanishing vacuum coefficient.
    pub fn range_complement_level_dims(&self, k: usize, tol: f64) -> Result<usize> {
        let vac = FockVector::vacuum(self.n, self.level);
        let a0 = self.apply(&vac)?.inner(&vac)?;
        if a0.norm() > 1e-12 {
            return Err(FockError::HypothesisViolated(format!("(L xi_1, xi_1) = {a0} is not zero")));
        }
        if k > self.frontier {
            return Err(FockError::OutsideExactRegion(format!("level {k} > frontier {}", self.frontier)));
        }
        let targets = enumerate_words(self.n, k)?;
        let row_of: BTreeMap<&Word, usize> = targets.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let sources: Vec<Word> = (0..k).map(|j| enumerate_words(self.n, j)).collect::<Result<Vec<_>>>()?.concat();
        let mut m = DMatrix::<C64>::zeros(targets.len(), sources.len());
        for (j, w) in sources.iter().enumerate() {
            for (u, c) in self.column(w)?.project_level(k).iter() {
                m[(row_of[u], j)] = *c;
            }
        }
        Ok(targets.len() - numerical_rank(&m, tol))
    }
}

fn check_series_alphabet(s: &FreeSeries, n: usize) -> Result<()> {
    if s.n() > n {
        return Err(FockError::DimensionMismatch(format!("series over {} letters, space over {n}", s.n())));
    }
    s.iter().try_for_each(|(w, _)| w.check_alphabet(n))
}

/// The graded decomposition `X = sum_{|w|<k} x_w L_w + sum_{|w|=k} L_w X_w`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub k: usize,
    /// Scalars `x_w` for `|w| < k`.
    pub scalars: FreeSeries,
    /// Corner symbols `X_w` for every word of length exactly `k`.
    pub corners: BTreeMap<Word, FreeSeries>,
}

impl Decomposition {
    pub fn reconstruct(&self) -> FreeSeries {
        let n = self.scalars.n();
        let mut out = self.scalars.clone();
        for (w, corner) in &self.corners {
            let lw = FreeSeries::monomial(n, w.clone(), C64::new(1.0, 0.0));
            out = out.add(&lw.mul(corner, None));
        }
        out
    }
}

/// Splits a symbol at word length `k >= 1`: `(X_w)_v = a_{wv}`.
pub fn decompose_at(s: &FreeSeries, k: usize) -> Result<Decomposition> {
    assert!(k >= 1, "decomposition level must be at least 1");
    let n = s.n();
    let mut corners: BTreeMap<Word, FreeSeries> =
        enumerate_words(n, k)?.into_iter().map(|w| (w, FreeSeries::zero(n))).collect();
    let mut scalars = FreeSeries::zero(n);
    for (w, c) in s.iter() {
        if w.len() < k {
            scalars.add_term(w.clone(), *c);
        } else {
            let (head, tail) = w.letters().split_at(k);
            let head = Word::new(head.iter().copied())?;
            let tail = Word::new(tail.iter().copied())?;
            corners.get_mut(&head).expect("all prefixes enumerated").add_term(tail, *c);
        }
    }
    Ok(Decomposition { k, scalars, corners })
}

/// Cesaro mean `sum_{|v|<k} (1 - |v|/k) a_v L_v`.
pub fn cesaro_sum(s: &FreeSeries, k: usize) -> FreeSeries {
    assert!(k >= 1, "Cesaro index must be at least 1");
    let mut out = FreeSeries::zero(s.n());
    for (w, c) in s.iter().filter(|(w, _)| w.len() < k) {
        out.add_term(w.clone(), c * (1.0 - w.len() as f64 / k as f64));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RANK_TOL;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn creation_operators_act_by_concatenation() {
        let l1 = TruncOp::creation(Side::Left, &w("z1"), 2, 3).unwrap();
        let r1 = TruncOp::creation(Side::Right, &w("z1"), 2, 3).unwrap();
        assert_eq!(l1.column(&w("z2")).unwrap(), FockVector::basis(2, 3, &w("z1 z2")).unwrap());
        assert_eq!(r1.column(&w("z2")).unwrap(), FockVector::basis(2, 3, &w("z2 z1")).unwrap());
        let l1_small = TruncOp::left_letter(1, 2, 1).unwrap();
        assert_eq!(l1_small.column(&w("z1")).unwrap().norm(), 0.0);
        assert_eq!(l1.frontier(), 2);
        assert!(TruncOp::creation(Side::Left, &w("z1 z1 z1"), 2, 2).is_err());
    }

    #[test]
    fn series_operator_columns() {
        let s = FreeSeries::from_real(2, &[("", 0.3), ("z1 z2", 0.5)]).unwrap();
        let x = TruncOp::from_series(&s, 2, 3).unwrap();
        let col = x.column(&Word::unit()).unwrap();
        assert_eq!(col.coeff(&Word::unit()), c(0.3));
        assert_eq!(col.coeff(&w("z1 z2")), c(0.5));
        assert_eq!(x.frontier(), 1);
        let id = TruncOp::from_series(&FreeSeries::one(2), 2, 2).unwrap().to_matrix().unwrap();
        assert_eq!(id, DMatrix::identity(7, 7));
        let single = TruncOp::from_series(&FreeSeries::monomial(2, w("z1"), c(1.0)), 2, 2).unwrap();
        assert_eq!(single.to_matrix().unwrap(), TruncOp::left_letter(1, 2, 2).unwrap().to_matrix().unwrap());
    }

    #[test]
    fn fourier_extraction() {
        let lw = TruncOp::creation(Side::Left, &w("z2 z1"), 2, 4).unwrap();
        assert_eq!(lw.fourier_of(4).unwrap(), FreeSeries::monomial(2, w("z2 z1"), c(1.0)));
        assert_eq!(TruncOp::identity(2, 3).fourier_of(3).unwrap(), FreeSeries::one(2));
        assert!(lw.fourier_of(5).is_err());
    }

    #[test]
    fn adjoint_strips_prefixes() {
        let l1 = TruncOp::left_letter(1, 2, 3).unwrap().adjoint();
        assert_eq!(l1.column(&w("z1 z2")).unwrap(), FockVector::basis(2, 3, &w("z2")).unwrap());
        assert_eq!(l1.column(&w("z2")).unwrap().norm(), 0.0);
        let m = TruncOp::left_letter(1, 2, 3).unwrap().to_matrix().unwrap();
        assert_eq!(l1.to_matrix().unwrap(), m.adjoint());
        let r2 = TruncOp::right_letter(2, 2, 3).unwrap();
        assert_eq!(r2.adjoint().adjoint().to_matrix().unwrap(), r2.to_matrix().unwrap());
    }

    #[test]
    fn symbolic_products_match_matrix_products() {
        let n = 2;
        let level = 4;
        let a = FreeSeries::from_real(n, &[("", 0.5), ("z1", 1.0), ("z2 z1", -0.25)]).unwrap();
        let b = FreeSeries::from_real(n, &[("z2", 2.0), ("z1 z1", 0.75)]).unwrap();
        for side in [Side::Left, Side::Right] {
            let x = TruncOp::from_side_series(side, &a, n, level).unwrap();
            let y = TruncOp::from_side_series(side, &b, n, level).unwrap();
            let dense = x.to_matrix().unwrap() * y.to_matrix().unwrap();
            let sym = x.compose(&y).unwrap();
            assert!(!sym.is_dense());
            assert!((sym.to_matrix().unwrap() - &dense).norm() < 1e-13);
            let adj = y.adjoint().compose(&x.adjoint()).unwrap();
            assert!((adj.to_matrix().unwrap() - dense.adjoint()).norm() < 1e-13);
        }
        let l1 = TruncOp::left_letter(1, n, level).unwrap();
        let l2 = TruncOp::left_letter(2, n, level).unwrap();
        let l12 = TruncOp::creation(Side::Left, &w("z1 z2"), n, level).unwrap();
        assert_eq!(l1.compose(&l2).unwrap().to_matrix().unwrap(), l12.to_matrix().unwrap());
    }

    #[test]
    fn mixed_products_are_dense_with_conservative_frontier() {
        let l1 = TruncOp::left_letter(1, 2, 3).unwrap();
        let x = l1.adjoint().compose(&l1).unwrap();
        assert!(x.is_dense());
        assert_eq!(x.frontier(), 2);
        // L1* L1 = I on the frontier
        for v in BasisIndexer::new(2, 2).unwrap().words() {
            assert_eq!(x.column(&v).unwrap(), FockVector::basis(2, 3, &v).unwrap());
        }
    }

    #[test]
    fn normalized_sum_of_generators_is_isometric_on_frontier() {
        let s = FreeSeries::from_real(2, &[("z1", 1.0), ("z2", 1.0)]).unwrap().scale(c(0.5f64.sqrt()));
        let l = TruncOp::from_series(&s, 2, 4).unwrap();
        let g = l.adjoint().compose(&l).unwrap();
        let idx = BasisIndexer::new(2, 4).unwrap();
        let gm = g.to_matrix().unwrap();
        let exact = idx.up_to(l.frontier()).end;
        let block = gm.view((0, 0), (exact, exact)).into_owned();
        assert!((block - DMatrix::<C64>::identity(exact, exact)).norm() < 1e-13);
    }

    #[test]
    fn norms() {
        assert!((TruncOp::left_letter(1, 2, 3).unwrap().op_norm().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(TruncOp::zero(2, 3).op_norm().unwrap(), 0.0);
        let s = FreeSeries::from_real(2, &[("z1", 1.0), ("z2", 1.0)]).unwrap();
        let x = TruncOp::from_series(&s, 2, 3).unwrap();
        assert!((x.op_norm().unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn commutant_residuals() {
        let lw = TruncOp::creation(Side::Left, &w("z1 z2"), 2, 4).unwrap();
        assert!(lw.commutant_residual().unwrap() < 1e-12);
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(15, |i, _| c(1.0 + i as f64)));
        assert!(TruncOp::from_matrix(2, 3, diag).unwrap().commutant_residual().unwrap() > 0.1);
        assert!(TruncOp::right_letter(1, 2, 4).unwrap().commutant_residual().unwrap() > 0.1);
        assert!(TruncOp::right_letter(1, 1, 4).unwrap().commutant_residual().unwrap() < 1e-12);
    }

    #[test]
    fn defect_ranks_of_shift() {
        let l1 = TruncOp::left_letter(1, 2, 2).unwrap();
        assert_eq!(l1.defect_ranks(RANK_TOL).unwrap(), (4, 4));
        let unimodular = TruncOp::identity(2, 2).scale(C64::from_polar(1.0, 0.7));
        assert_eq!(unimodular.defect_ranks(RANK_TOL).unwrap(), (0, 0));
        let lw = TruncOp::creation(Side::Left, &w("z2 z1"), 2, 3).unwrap();
        // killed basis vectors: |v| + 2 > 3, i.e. levels 2 and 3
        assert_eq!(lw.defect_ranks(RANK_TOL).unwrap().1, 4 + 8);
    }

    #[test]
    fn complement_dimensions() {
        let l1 = TruncOp::left_letter(1, 2, 4).unwrap();
        assert_eq!(l1.range_complement_level_dims(2, RANK_TOL).unwrap(), 2);
        let s = FreeSeries::from_real(2, &[("z1", 1.0), ("z2", 1.0)]).unwrap().scale(c(0.5f64.sqrt()));
        let l = TruncOp::from_series(&s, 2, 3).unwrap();
        assert_eq!(l.range_complement_level_dims(1, RANK_TOL).unwrap(), 1);
        let bad = TruncOp::identity(2, 3);
        assert!(matches!(bad.range_complement_level_dims(1, RANK_TOL), Err(FockError::HypothesisViolated(_))));
    }

    #[test]
    fn adjoint_orbit_of_shift() {
        let l1 = TruncOp::left_letter(1, 2, 5).unwrap();
        let xi = FockVector::basis(2, 5, &Word::power(1, 3)).unwrap();
        let orbit = l1.adjoint_power_orbit(&xi, 5).unwrap();
        assert_eq!(orbit, vec![1.0, 1.0, 1.0, 1.0, 0.0, 0.0]);
        let big = TruncOp::identity(2, 3).scale(c(1.5));
        assert!(matches!(big.adjoint_power_orbit(&FockVector::vacuum(2, 3), 2), Err(FockError::NotContraction(_))));
    }

    #[test]
    fn decomposition_regroups_by_prefix() {
        let s = FreeSeries::from_real(2, &[("", 1.0), ("z1", 2.0), ("z1 z2", 3.0)]).unwrap();
        let d = decompose_at(&s, 1).unwrap();
        assert_eq!(d.scalars, FreeSeries::one(2));
        let x1 = FreeSeries::from_real(2, &[("", 2.0), ("z2", 3.0)]).unwrap();
        assert_eq!(d.corners[&w("z1")], x1);
        assert!(d.corners[&w("z2")].is_zero());
        assert_eq!(d.reconstruct().max_diff(&s), 0.0);
        let d1 = decompose_at(&FreeSeries::one(2), 1).unwrap();
        assert!(d1.corners.values().all(|c| c.is_zero()));
    }

    #[test]
    fn cesaro_weights() {
        let s = FreeSeries::monomial(2, w("z1"), c(1.0));
        assert_eq!(cesaro_sum(&s, 2), FreeSeries::monomial(2, w("z1"), c(0.5)));
        assert_eq!(cesaro_sum(&FreeSeries::one(2), 7), FreeSeries::one(2));
        assert!(cesaro_sum(&s, 1).is_zero());
    }
}
