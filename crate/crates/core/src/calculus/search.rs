//! Numerical search for factorizations `L_w = B C` with `B`, `C` polynomial
//! elements of the unit ball.
//!
//! Alternating least squares on the Fourier coefficients of `B` and `C`
//! (the product symbol is bilinear in the two blocks). The scaling freedom
//! `(tB, C/t)` is rebalanced after every sweep; a constrained search then
//! rescales both factors onto the compression-norm unit ball.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{FockError, Result};
use crate::fock::C64;
use crate::linalg::least_squares;
use crate::operators::TruncOp;
use crate::series::FreeSeries;
use crate::words::{BasisIndexer, Word};

/// Residual below which a candidate counts as a factorization.
pub const SOLVED_RESIDUAL: f64 = 1e-6;

/// Distance to the word-factorization family accepted as "the same as the word".
pub const CLASSIFY_TOL: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub word: Word,
    pub n: usize,
    /// Maximum word length in the symbols of `B` and `C`.
    pub degree: usize,
    /// Truncation level on which norms and residuals are measured.
    pub level: usize,
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Rescale the converged factors onto the unit ball.
    pub constrained: bool,
}

impl SearchConfig {
    pub fn new(word: Word, n: usize, degree: usize, level: usize) -> Self {
        SearchConfig { word, n, degree, level, restarts: 32, seed: 0, max_iters: 2000, constrained: true }
    }
}

/// Nearest point `(lambda L_u, conj(lambda) L_v)` with `uv = w`.
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub prefix: Word,
    pub suffix: Word,
    pub lambda: C64,
    /// Coefficient-space distance from `(B, C)` to that point.
    pub distance: f64,
}

#[derive(Clone, Debug)]
pub struct Candidate {
    pub b: FreeSeries,
    pub c: FreeSeries,
    /// Compression norm of `BC - L_w`.
    pub residual: f64,
    pub b_norm: f64,
    pub c_norm: f64,
    pub iterations: usize,
    /// Present when `residual <= SOLVED_RESIDUAL`.
    pub classification: Option<Classification>,
}

impl Candidate {
    pub fn is_solution(&self) -> bool {
        self.residual <= SOLVED_RESIDUAL
    }

    pub fn is_word_factorization(&self) -> bool {
        self.classification.as_ref().is_some_and(|c| c.distance <= CLASSIFY_TOL)
    }
}

/// Distance of `(b, c)` to the family `{(lambda L_u, conj(lambda) L_v) : uv = w}`.
pub fn classify(b: &FreeSeries, c: &FreeSeries, w: &Word) -> Classification {
    let base = b.norm_sqr() + c.norm_sqr() + 2.0;
    (0..=w.len())
        .map(|split| {
            let (u, v) = w.letters().split_at(split);
            let u = Word::new(u.iter().copied()).expect("letters of a valid word");
            let v = Word::new(v.iter().copied()).expect("letters of a valid word");
            let overlap = b.coeff(&u) + c.coeff(&v).conj();
            let lambda = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
            let distance = (base - 2.0 * overlap.norm()).max(0.0).sqrt();
            Classification { prefix: u, suffix: v, lambda, distance }
        })
        .min_by(|a, b| a.distance.total_cmp(&b.distance))
        .expect("at least one split")
}

struct Layout {
    unknowns: Vec<Word>,
    products: BasisIndexer,
}

impl Layout {
    fn series(&self, n: usize, x: &DVector<C64>) -> FreeSeries {
        let mut s = FreeSeries::zero(n);
        for (w, c) in self.unknowns.iter().zip(x.iter()) {
            s.add_term(w.clone(), *c);
        }
        s
    }

    /// Matrix of `x -> coefficients of (x * fixed)` (or `fixed * x` when `x_on_left` is false).
    fn product_matrix(&self, fixed: &DVector<C64>, x_on_left: bool) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.products.size(), self.unknowns.len());
        for (j, xw) in self.unknowns.iter().enumerate() {
            for (fw, fc) in self.unknowns.iter().zip(fixed.iter()) {
                let w = if x_on_left { xw.concat(fw) } else { fw.concat(xw) };
                let row = self.products.index_of(&w).expect("product within layout");
                m[(row, j)] += *fc;
            }
        }
        m
    }
}

fn project(cfg: &SearchConfig, layout: &Layout, x: DVector<C64>) -> Result<(DVector<C64>, f64)> {
    let norm = TruncOp::from_series(&layout.series(cfg.n, &x), cfg.n, cfg.level)?.op_norm()?;
    if cfg.constrained && norm > 1.0 {
        Ok((x.unscale(norm), 1.0))
    } else {
        Ok((x, norm))
    }
}

// A ridge term held for the first third of the sweeps turns the flat valleys
// `(1 - t u, 1 + t u + t^2 u^2)` of near-inverses into a basin around `t = 0`;
// it then decays to zero so exact solutions are unbiased.
const RIDGE_START: f64 = 5e-2;
const RIDGE_DECAY: f64 = 0.5;

fn ridge_solve(m: &DMatrix<C64>, target: &DVector<C64>, ridge: f64) -> DVector<C64> {
    if ridge == 0.0 {
        return least_squares(m, target);
    }
    let (rows, cols) = m.shape();
    let mut stacked = DMatrix::zeros(rows + cols, cols);
    stacked.view_mut((0, 0), (rows, cols)).copy_from(m);
    for j in 0..cols {
        stacked[(rows + j, j)] = C64::new(ridge.sqrt(), 0.0);
    }
    let mut rhs = DVector::zeros(rows + cols);
    rhs.rows_mut(0, rows).copy_from(target);
    least_squares(&stacked, &rhs)
}

/// Moves the scalar freedom `(b, c) -> (t b, c / t)` to equal coefficient norms.
fn balance(b: &mut DVector<C64>, c: &mut DVector<C64>) {
    let (nb, nc) = (b.norm(), c.norm());
    if nb > 0.0 && nc > 0.0 {
        let t = (nc / nb).sqrt();
        *b *= C64::new(t, 0.0);
        *c *= C64::new(1.0 / t, 0.0);
    }
}

fn random_block(rng: &mut ChaCha8Rng, len: usize) -> DVector<C64> {
    DVector::from_fn(len, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

fn restart_seed(seed: u64, restart: usize) -> u64 {
    seed ^ (restart as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn run_restart(cfg: &SearchConfig, layout: &Layout, target: &DVector<C64>, restart: usize) -> Result<Candidate> {
    let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(cfg.seed, restart));
    let len = layout.unknowns.len();
    let mut b = random_block(&mut rng, len);
    let mut c = random_block(&mut rng, len);
    let mut previous = f64::INFINITY;
    let mut iterations = 0;
    let mut ridge = RIDGE_START;
    for it in 0..cfg.max_iters {
        iterations = it + 1;
        b = ridge_solve(&layout.product_matrix(&c, true), target, ridge);
        c = ridge_solve(&layout.product_matrix(&b, false), target, ridge);
        balance(&mut b, &mut c);
        let objective = (layout.product_matrix(&c, true) * &b - target).norm_squared();
        if ridge == 0.0
            && (objective < 1e-30 || (previous.is_finite() && (previous - objective).abs() <= 1e-18 * previous.max(1.0)))
        {
            break;
        }
        previous = objective;
        if it + 1 >= cfg.max_iters / 3 {
            ridge = if ridge * RIDGE_DECAY < 1e-16 { 0.0 } else { ridge * RIDGE_DECAY };
        }
    }
    if cfg.constrained {
        b = project(cfg, layout, b)?.0;
        c = project(cfg, layout, c)?.0;
    }
    let bs = layout.series(cfg.n, &b);
    let cs = layout.series(cfg.n, &c);
    let product = TruncOp::from_series(&bs.mul(&cs, None), cfg.n, cfg.level)?;
    let lw = TruncOp::from_series(&FreeSeries::monomial(cfg.n, cfg.word.clone(), C64::new(1.0, 0.0)), cfg.n, cfg.level)?;
    let residual = product.sub(&lw)?.op_norm()?;
    let b_norm = TruncOp::from_series(&bs, cfg.n, cfg.level)?.op_norm()?;
    let c_norm = TruncOp::from_series(&cs, cfg.n, cfg.level)?.op_norm()?;
    let classification = (residual <= SOLVED_RESIDUAL).then(|| classify(&bs, &cs, &cfg.word));
    Ok(Candidate { b: bs, c: cs, residual, b_norm, c_norm, iterations, classification })
}

/// Runs `cfg.restarts` independent searches; restart `r` uses a seed derived
/// from `(cfg.seed, r)`, so results do not depend on scheduling.
pub fn search_ball_factorizations(cfg: &SearchConfig) -> Result<Vec<Candidate>> {
    cfg.word.check_alphabet(cfg.n)?;
    if cfg.word.len() > 2 * cfg.degree || 2 * cfg.degree > cfg.level {
        return Err(FockError::HypothesisViolated(format!(
            "need |w| <= 2 * degree <= level (|w| = {}, degree = {}, level = {})",
            cfg.word.len(),
            cfg.degree,
            cfg.level
        )));
    }
    let layout = Layout {
        unknowns: BasisIndexer::new(cfg.n, cfg.degree)?.words().collect(),
        products: BasisIndexer::new(cfg.n, 2 * cfg.degree)?,
    };
    let mut target = DVector::zeros(layout.products.size());
    target[layout.products.index_of(&cfg.word).expect("word fits")] = C64::new(1.0, 0.0);
    (0..cfg.restarts).into_par_iter().map(|r| run_restart(cfg, &layout, &target, r)).collect()
}
