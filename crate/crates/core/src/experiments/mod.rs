//! Named, parameterized experiments. Each returns a [`Report`] whose verdict is
//! decided only from measurements inside the exact region of the truncation.

mod decay;
mod factor;
mod ideals;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{FockError, Result};
use crate::fock::C64;
use crate::hardy::{harmonic_series, ScalarSeries};
use crate::report::Report;
use crate::series::FreeSeries;
use crate::words::Word;

pub use decay::{adjoint_decay_sweep, exp_adjoint_decay, exp_codim_counts, exp_eigenvector, orbit_bound, p_weight};
pub use factor::{exp_ball_search, exp_factor_generator, exp_remark_pair, exp_thin_isometry, thin_vector};
pub use ideals::{
    counterexample_lambdas, exp_cesaro, exp_flip_examples, exp_ideal_counterexample, exp_membership_witness,
    membership_deviation, MembershipCandidate, COUNTEREXAMPLE_M,
};

/// Experiment names accepted by [`run`], in `run-all` order.
pub const EXPERIMENTS: &[&str] = &[
    "adjoint-decay",
    "codim-counts",
    "factor-generator",
    "thin-isometry",
    "remark-pair",
    "ball-search",
    "ideal-counterexample",
    "membership-witness",
    "eigenvector",
    "cesaro",
    "flip-examples",
];

/// Optional overrides shared by all experiments; `None` picks the experiment's default.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Params {
    pub n: Option<usize>,
    pub level: Option<usize>,
    pub terms: Option<usize>,
    pub kmax: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub grid: Option<usize>,
}

pub const DEFAULT_SEED: u64 = 7;

/// Complex Gaussian tuple rescaled to Euclidean norm `radius`.
pub fn random_lambda(n: usize, radius: f64, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<C64> = (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        })
        .collect();
    let norm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    raw.into_iter().map(|c| c * (radius / norm)).collect()
}

/// Label for a word in measurement keys; the empty word prints as `1`.
pub(crate) fn word_key(w: &Word) -> String {
    if w.is_unit() {
        "1".to_string()
    } else {
        w.to_string()
    }
}

/// The symbol `sum_{k<=order} c_k z_1^k`, e.g. the harmonic series along `z_1`.
pub(crate) fn along_z1(n: usize, s: &ScalarSeries) -> FreeSeries {
    FreeSeries::along_letter(n, 1, s.coeffs())
}

pub fn run(name: &str, p: &Params) -> Result<Report> {
    let seed = p.seed.unwrap_or(DEFAULT_SEED);
    match name {
        "adjoint-decay" => {
            let lambdas = [0.0, 0.3, 0.5, 0.9].map(|x| C64::new(x, 0.0));
            adjoint_decay_sweep(&lambdas, p.level.unwrap_or(8), p.kmax.unwrap_or(200))
        }
        "codim-counts" => {
            let n = p.n.unwrap_or(2);
            let l1 = FreeSeries::monomial(n, Word::letter(1), C64::new(1.0, 0.0));
            exp_codim_counts(&l1, p.level.unwrap_or(6), p.tol.unwrap_or(crate::linalg::RANK_TOL))
        }
        "factor-generator" => exp_factor_generator(p.terms.unwrap_or(64), p.level.unwrap_or(66)),
        "thin-isometry" => {
            let kmax = p.kmax.unwrap_or(2);
            exp_thin_isometry(kmax, p.level.unwrap_or(3 * kmax + 1))
        }
        "remark-pair" => {
            let level = p.level.unwrap_or(6);
            let half = 0.5;
            let mut r = Report::new("remark-pair");
            let f = ScalarSeries::from_real(&[half, half]);
            let g = ScalarSeries::from_real(&[half, -half]);
            r.absorb("f=(1+z)/2: ", &exp_remark_pair(&f, &g, level)?);
            let f0 = ScalarSeries::from_real(&[0.0, half, half]);
            r.absorb("f=z(1+z)/2: ", &exp_remark_pair(&f0, &g, level)?);
            Ok(r)
        }
        "ball-search" => exp_ball_search(p.terms.unwrap_or(2), p.level.unwrap_or(4), 32, seed),
        "ideal-counterexample" => {
            let a = FreeSeries::from_real(2, &[("z1", 1.0), ("z2 z1", 0.5), ("z1 z2", -0.25)])?;
            exp_ideal_counterexample(&a, &COUNTEREXAMPLE_M, p.level.unwrap_or(10), p.grid.unwrap_or(4096))
        }
        "membership-witness" => {
            let order = p.terms.unwrap_or(64);
            exp_membership_witness(&MembershipCandidate::defaults(order / 2)?, order)
        }
        "eigenvector" => {
            let n = p.n.unwrap_or(2);
            exp_eigenvector(&random_lambda(n, 0.7, seed), p.level.unwrap_or(12))
        }
        "cesaro" => {
            let n = p.n.unwrap_or(2);
            let s = along_z1(n, &harmonic_series(p.terms.unwrap_or(32)));
            exp_cesaro(&s, p.kmax.unwrap_or(512))
        }
        "flip-examples" => exp_flip_examples(p.level.unwrap_or(8), p.grid.unwrap_or(4096), seed),
        other => Err(FockError::Parse(format!("unknown experiment '{other}' (known: {})", EXPERIMENTS.join(", ")))),
    }
}

/// Every experiment at its defaults and the given seed. Experiments run in
/// parallel; an experiment that errors yields a failed report.
pub fn run_all(seed: u64) -> Vec<Report> {
    let p = Params { seed: Some(seed), ..Params::default() };
    EXPERIMENTS.par_iter().map(|name| run(name, &p).unwrap_or_else(|e| Report::errored(name, &e))).collect()
}
