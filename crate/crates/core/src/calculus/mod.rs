//! H-infinity / H^2 functional calculus on truncated operators, and the
//! explicit factorization constructions built from it.

mod search;

pub use search::{
    classify, search_ball_factorizations, Candidate, Classification, SearchConfig, CLASSIFY_TOL,
    SOLVED_RESIDUAL,
};

use crate::error::{FockError, Result};
use crate::fock::{FockVector, C64};
use crate::hardy::{theta_grid, ScalarSeries};
use crate::operators::{TruncOp, CONTRACTION_TOL};
use crate::report::Report;
use crate::series::FreeSeries;
use crate::words::{total_size, BasisIndexer, Word};

/// Coefficient tolerance for factorization identities.
pub const FACTORIZATION_TOL: f64 = 1e-9;

/// Largest number of basis vectors compared pairwise in orthogonality checks.
const ORTHO_PROBE: usize = 256;

/// Powers `X^0, ..., X^K` of a contraction, computed once.
pub struct CalculusContext {
    powers: Vec<TruncOp>,
}

impl CalculusContext {
    pub fn new(x: &TruncOp, order: usize) -> Result<Self> {
        let norm = x.norm_estimate()?;
        if norm > 1.0 + CONTRACTION_TOL {
            return Err(FockError::NotContraction(norm));
        }
        let mut powers = Vec::with_capacity(order + 1);
        powers.push(TruncOp::identity(x.n(), x.level()));
        for k in 1..=order {
            let next = x.compose(&powers[k - 1])?;
            powers.push(next);
        }
        Ok(CalculusContext { powers })
    }

    pub fn order(&self) -> usize {
        self.powers.len() - 1
    }

    pub fn power(&self, k: usize) -> &TruncOp {
        &self.powers[k]
    }

    /// `sum_{k<=K} h_k X^k`, using as many cached powers as `h` has coefficients.
    pub fn apply(&self, h: &ScalarSeries) -> Result<TruncOp> {
        if h.order() > self.order() {
            return Err(FockError::DimensionMismatch(format!(
                "series of order {} but only {} powers cached",
                h.order(),
                self.order()
            )));
        }
        let first = &self.powers[0];
        let mut acc = TruncOp::zero(first.n(), first.level());
        for (k, c) in h.coeffs().iter().enumerate() {
            if c.norm() != 0.0 {
                acc = acc.axpy(*c, &self.powers[k])?;
            }
        }
        Ok(acc)
    }
}

/// `h(X) = sum_k h_k X^k` for a contraction `X`.
pub fn apply_series(h: &ScalarSeries, x: &TruncOp) -> Result<TruncOp> {
    CalculusContext::new(x, h.order())?.apply(h)
}

/// Largest `|(X xi_a, Y xi_b)|` over basis vectors in the common exact region.
pub fn range_orthogonality(x: &TruncOp, y: &TruncOp) -> Result<f64> {
    if x.n() != y.n() || x.level() != y.level() {
        return Err(FockError::DimensionMismatch("operators on different spaces".into()));
    }
    let mut region = x.frontier().min(y.frontier());
    while region > 0 && total_size(x.n(), region) > ORTHO_PROBE as u128 {
        region -= 1;
    }
    let words: Vec<Word> = BasisIndexer::new(x.n(), region)?.words().collect();
    let xs = words.iter().map(|w| x.column(w)).collect::<Result<Vec<FockVector>>>()?;
    let ys = words.iter().map(|w| y.column(w)).collect::<Result<Vec<FockVector>>>()?;
    let mut worst: f64 = 0.0;
    for a in &xs {
        for b in &ys {
            worst = worst.max(a.inner(b)?.norm());
        }
    }
    Ok(worst)
}

fn check_isometry_on_frontier(op: &TruncOp, label: &str) -> Result<()> {
    if op.isometry_defect()? > 1e-10 {
        return Err(FockError::HypothesisViolated(format!("{label} is not isometric on its exact region")));
    }
    Ok(())
}

/// Number of leading powers whose ranges are checked for mutual orthogonality.
const ORTHO_POWERS: usize = 8;

/// `h(X) L = sum_k h_k X^k L` for isometries `X`, `L` whose products `X^k L`
/// have pairwise orthogonal ranges. Then `h -> h(X) L` is isometric from `H^2`.
pub fn h2_times_isometry(h: &ScalarSeries, x: &TruncOp, l: &TruncOp) -> Result<TruncOp> {
    check_isometry_on_frontier(x, "X")?;
    check_isometry_on_frontier(l, "L")?;
    let ctx = CalculusContext::new(x, h.order())?;
    let terms: Vec<TruncOp> = (0..=h.order()).map(|k| ctx.power(k).compose(l)).collect::<Result<_>>()?;
    let checked = terms.len().min(ORTHO_POWERS);
    for j in 0..checked {
        for k in (j + 1)..checked {
            let overlap = range_orthogonality(&terms[j], &terms[k])?;
            if overlap > 1e-10 {
                return Err(FockError::HypothesisViolated(format!(
                    "ranges of X^{j} L and X^{k} L overlap ({overlap:e})"
                )));
            }
        }
    }
    let mut acc = TruncOp::zero(l.n(), l.level());
    for (k, c) in h.coeffs().iter().enumerate() {
        if c.norm() != 0.0 {
            acc = acc.axpy(*c, &terms[k])?;
        }
    }
    Ok(acc)
}

/// Compares the Fourier coefficients of `g(X) A` and `target` up to `depth`.
pub fn verify_factorization(
    g: &ScalarSeries,
    x: &TruncOp,
    a: &TruncOp,
    target: &TruncOp,
    depth: usize,
) -> Result<Report> {
    let level = x.level().min(a.level()).min(target.level());
    if depth > level {
        return Err(FockError::OutsideExactRegion(format!("depth {depth} > level {level}")));
    }
    let product = apply_series(g, x)?.compose(a)?;
    let lhs = product.fourier_of(depth)?;
    let rhs = target.fourier_of(depth)?;
    let diff = lhs.sub(&rhs);
    let (worst_word, worst) = diff
        .iter()
        .map(|(w, c)| (w.clone(), c.norm()))
        .fold((Word::unit(), 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });

    let mut r = Report::new("verify-factorization");
    r.param("depth", depth)
        .param("order", g.order())
        .measure("max_coefficient_error", worst)
        .measure("worst_word", worst_word.to_string())
        .tolerance("max_coefficient_error", FACTORIZATION_TOL)
        .check(
            "fourier coefficients of g(X)A match the target",
            worst <= FACTORIZATION_TOL,
            "g(X)A = L coefficientwise",
        );
    Ok(r)
}

/// The isometry `L = L_1 f(L_1) + L_2 g(L_1)` and the operator
/// `X = (beta L_1 L_2 - lambda alpha L_2^2) / (|alpha|^2 + |beta|^2)` with
/// orthogonal range.
#[derive(Clone, Debug)]
pub struct RemarkPair {
    pub l: TruncOp,
    pub x: TruncOp,
    pub alpha: C64,
    pub beta: C64,
    pub lambda: C64,
    /// Largest deviation of `|f|^2 + |g|^2` from 1 on the boundary grid.
    pub modulus_defect: f64,
}

const REMARK_GRID: usize = 512;

pub fn remark_pair(f: &ScalarSeries, g: &ScalarSeries, level: usize) -> Result<RemarkPair> {
    let n = 2;
    let modulus_defect = theta_grid(REMARK_GRID, 0.0)
        .into_iter()
        .map(|t| {
            let z = C64::from_polar(1.0, t);
            (f.eval(z).norm_sqr() + g.eval(z).norm_sqr() - 1.0).abs()
        })
        .fold(0.0, f64::max);
    if modulus_defect > 1e-6 {
        return Err(FockError::HypothesisViolated(format!(
            "|f|^2 + |g|^2 deviates from 1 by {modulus_defect:e} on the circle"
        )));
    }
    let alpha = f.coeff(0);
    let beta = g.coeff(0);
    let denom = alpha.norm_sqr() + beta.norm_sqr();
    if denom == 0.0 {
        return Err(FockError::HypothesisViolated("f(0) and g(0) both vanish".into()));
    }
    let lambda = if alpha.norm() > 0.0 && beta.norm() > 0.0 {
        let l = alpha.conj() * beta / (alpha * beta.conj());
        l / l.norm()
    } else {
        C64::new(1.0, 0.0)
    };

    let z1 = FreeSeries::monomial(n, Word::letter(1), C64::new(1.0, 0.0));
    let z2 = FreeSeries::monomial(n, Word::letter(2), C64::new(1.0, 0.0));
    let f_of_l1 = FreeSeries::along_letter(n, 1, f.coeffs());
    let g_of_l1 = FreeSeries::along_letter(n, 1, g.coeffs());
    let l_symbol = z1.mul(&f_of_l1, None).add(&z2.mul(&g_of_l1, None));
    let x_symbol = FreeSeries::from_terms(
        n,
        [
            ("z1 z2".parse::<Word>()?, beta / denom),
            ("z2 z2".parse::<Word>()?, -lambda * alpha / denom),
        ],
    )?;
    Ok(RemarkPair {
        l: TruncOp::from_series(&l_symbol, n, level)?,
        x: TruncOp::from_series(&x_symbol, n, level)?,
        alpha,
        beta,
        lambda,
        modulus_defect,
    })
}

fn words_ending_in(s: &FreeSeries, i: u32) -> Vec<&Word> {
    s.iter()
        .filter(|(w, c)| c.norm() != 0.0 && w.letters().last() == Some(&i))
        .map(|(w, _)| w)
        .collect()
}

fn is_normalized_without_vacuum(s: &FreeSeries) -> bool {
    (s.norm_sqr() - 1.0).abs() <= 1e-9 && s.coeff(&Word::unit()).norm() <= 1e-12
}

/// True when `R_i R_i^*(L xi_1) = a_{z_i} xi_{z_i}` with `a_{z_i} != 0`: the
/// only word ending in `z_i` carrying a coefficient is `z_i` itself.
/// Symbols that are not unit-norm or have a vacuum term never qualify.
pub fn irreducibility_hypothesis(s: &FreeSeries, i: u32) -> bool {
    is_normalized_without_vacuum(s) && words_ending_in(s, i) == [&Word::letter(i)]
}

/// The broader form `R_i R_i^*(L xi_1) = a_{w z_i} xi_{w z_i}`: returns `w`
/// when exactly one word ending in `z_i` carries a coefficient.
pub fn extended_irreducibility_hypothesis(s: &FreeSeries, i: u32) -> Option<Word> {
    if !is_normalized_without_vacuum(s) {
        return None;
    }
    match words_ending_in(s, i).as_slice() {
        [only] => only.strip_suffix(&Word::letter(i)),
        _ => None,
    }
}
