//! Left ideals and flips: the trivial-ideal counterexample, membership
//! witnesses, Cesaro convergence and word flips.

use std::f64::consts::PI;

use serde_json::json;

use crate::error::{FockError, Result};
use crate::fock::{FockVector, C64};
use crate::hardy::{harmonic_series, partial_sum_sup, reciprocal, ScalarSeries};
use crate::operators::{cesaro_sum, Side, TruncOp};
use crate::report::Report;
use crate::series::FreeSeries;
use crate::words::Word;

use super::{along_z1, random_lambda, word_key};

/// Partial-sum orders scanned for sup-norm growth.
pub const COUNTEREXAMPLE_M: [usize; 5] = [10, 30, 100, 300, 1000];

/// `lambda_k = c / (k+1)` with `c = (sum_{k>=1} 1/k^2)^{-1/2} = sqrt(6)/pi`.
pub fn counterexample_lambdas(order: usize) -> ScalarSeries {
    let c = 6f64.sqrt() / PI;
    ScalarSeries::new((0..=order).map(|k| C64::new(c / (k + 1) as f64, 0.0)).collect())
}

fn is_power_of_z1(w: &Word) -> bool {
    w.letters().iter().all(|&l| l == 1)
}

/// Least-squares slope of `ys` against `ln(xs)`.
fn log_slope(xs: &[usize], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|&x| (x as f64).ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let num: f64 = lx.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

/// Sup-norm growth of the partial sums of `s` at the orders `ms` (ascending).
fn growth(r: &mut Report, s: &ScalarSeries, ms: &[usize], grid: usize, anchor: &str) {
    let sups: Vec<f64> = ms.iter().map(|&m| partial_sum_sup(s, m, grid)).collect();
    let ratio = sups[sups.len() - 1] / sups[0];
    let monotone = sups.windows(2).all(|p| p[1] >= p[0]);
    r.measure("sup_orders", ms.to_vec())
        .measure("sup_norms", sups.clone())
        .measure("growth_ratio", ratio)
        .measure("log_fit_slope", log_slope(ms, &sups))
        .check(&format!("sup norm ratio m={} vs m={} exceeds 2", ms[ms.len() - 1], ms[0]), ratio > 2.0, anchor)
        .check("sup norms grow with m", monotone, anchor);
}

/// `J ~ sum a_w lambda_k L_w L_2 L_1^k` and the compression identity
/// `Q L_2* L_v* J Q = a_v sum_k lambda_k L_1^k Q` for the shortest word `v` of `a`.
pub fn exp_ideal_counterexample(a: &FreeSeries, ms: &[usize], level: usize, grid: usize) -> Result<Report> {
    let n = a.n();
    if n < 2 || ms.is_empty() {
        return Err(FockError::HypothesisViolated("need n >= 2 and at least one partial-sum order".into()));
    }
    let (v, av) = a
        .iter()
        .find(|(_, c)| c.norm() != 0.0)
        .map(|(w, c)| (w.clone(), *c))
        .ok_or_else(|| FockError::HypothesisViolated("a has empty support".into()))?;
    if level < v.len() + 1 {
        return Err(FockError::OutsideExactRegion(format!("level {level} leaves no room after L_v L_2")));
    }
    let lambdas = counterexample_lambdas(level.max(*ms.iter().max().expect("non-empty")));
    let mut j_symbol = FreeSeries::zero(n);
    let tail = Word::letter(2);
    for (w, c) in a.iter().filter(|(_, c)| c.norm() != 0.0) {
        for k in 0..=level.saturating_sub(w.len() + 1) {
            j_symbol.add_term(w.concat(&tail).concat(&Word::power(1, k)), c * lambdas.coeff(k));
        }
    }
    let j = TruncOp::from_series(&j_symbol, n, level)?;
    let lv_adj = TruncOp::creation(Side::Left, &v, n, level)?.adjoint();
    let l2_adj = TruncOp::left_letter(2, n, level)?.adjoint();
    let exact = level - v.len() - 1;
    let mut identity_err: f64 = 0.0;
    for jj in 0..=exact {
        let out = l2_adj.apply(&lv_adj.apply(&j.apply(&FockVector::basis(n, level, &Word::power(1, jj))?)?)?)?;
        let lhs = out.filter(|w| is_power_of_z1(w) && w.len() <= exact);
        let mut rhs = FockVector::zero(n, level);
        for k in 0..=(exact - jj) {
            rhs.add_at(Word::power(1, k + jj), av * lambdas.coeff(k))?;
        }
        identity_err = identity_err.max(lhs.sub(&rhs)?.max_abs());
    }

    let c = 6f64.sqrt() / PI;
    let m0 = ms[0];
    let at_zero = c * harmonic_series(m0).coeffs().iter().map(|h| h.re).sum::<f64>();
    let lambda_l2_sqr: f64 = lambdas.partial(*ms.iter().max().expect("non-empty")).l2_norm().powi(2);

    let mut r = Report::new("ideal-counterexample");
    r.param("n", n)
        .param("level", level)
        .param("grid", grid)
        .param("a", serde_json::to_value(a.to_record()).expect("records serialize"))
        .measure("minimal_word", word_key(&v))
        .measure("exact_output_level", exact)
        .measure("compression_identity_error", identity_err)
        .measure("lambda_l2_norm_sqr", lambda_l2_sqr)
        .measure("sup_at_theta0_expected", at_zero)
        .tolerance("compression_identity_error", 1e-12)
        .check(
            "Q L2* Lv* J Q = a_v sum lambda_k L1^k Q on the exact region",
            identity_err <= 1e-12,
            "compression of J onto the z1-diagonal",
        );
    growth(&mut r, &lambdas, ms, grid, "the z1-diagonal of J is unbounded");
    let sup0 = r.array("sup_norms").expect("growth measured")[0];
    r.check("partial-sum sup is attained at theta = 0", (sup0 - at_zero).abs() <= 1e-12, "positive coefficients peak at z = 1");
    Ok(r)
}

/// Candidate families `A = sum_i B_i L_2 C_i` for the membership test.
#[derive(Clone, Debug)]
pub struct MembershipCandidate {
    pub label: String,
    pub b: Vec<FreeSeries>,
    pub c: Vec<FreeSeries>,
}

impl MembershipCandidate {
    /// Families built from polynomial heads of degree `d`.
    pub fn defaults(d: usize) -> Result<Vec<MembershipCandidate>> {
        let n = 2;
        let head = along_z1(n, &harmonic_series(d));
        let g_head = along_z1(n, &reciprocal(&harmonic_series(d), d)?);
        let one = FreeSeries::one(n);
        let junk = FreeSeries::from_real(n, &[("z2", 0.3), ("z2 z1", 0.2)])?;
        Ok(vec![
            MembershipCandidate { label: "harmonic-head".into(), b: vec![head.clone()], c: vec![one.clone()] },
            MembershipCandidate { label: "reciprocal-head".into(), b: vec![g_head], c: vec![one] },
            MembershipCandidate {
                label: "two-term".into(),
                b: vec![head.add(&junk), head.clone()],
                c: vec![FreeSeries::from_real(n, &[("", 0.5), ("z1 z2", 1.0)])?, FreeSeries::from_real(n, &[("", 0.5), ("z2", -0.4)])?],
            },
            MembershipCandidate { label: "empty".into(), b: vec![], c: vec![] },
        ])
    }
}

/// `|sum_i b^i_{z1^k} c^i_0 - 1/(k+1)|` for `k = 0..=order`.
pub fn membership_deviation(b: &[FreeSeries], c: &[FreeSeries], order: usize) -> Result<Vec<f64>> {
    if b.len() != c.len() {
        return Err(FockError::DimensionMismatch(format!("{} left factors but {} right factors", b.len(), c.len())));
    }
    Ok((0..=order)
        .map(|k| {
            let zk = Word::power(1, k);
            let s: C64 = b.iter().zip(c).map(|(bi, ci)| bi.coeff(&zk) * ci.coeff(&Word::unit())).sum();
            (s - C64::new(1.0 / (k + 1) as f64, 0.0)).norm()
        })
        .collect())
}

pub fn exp_membership_witness(candidates: &[MembershipCandidate], order: usize) -> Result<Report> {
    let mut r = Report::new("membership-witness");
    r.param("order", order);
    let mut all_certified = true;
    for cand in candidates {
        let dev = membership_deviation(&cand.b, &cand.c, order)?;
        // The identity read off the full product sum_i B_i z2 C_i.
        let n = cand.b.iter().chain(&cand.c).map(FreeSeries::n).max().unwrap_or(2).max(2);
        let z2 = FreeSeries::monomial(n, Word::letter(2), C64::new(1.0, 0.0));
        let mut product = FreeSeries::zero(n);
        for (bi, ci) in cand.b.iter().zip(&cand.c) {
            product = product.add(&bi.mul(&z2, None).mul(ci, Some(order + 1)));
        }
        let consistency = (0..=order)
            .map(|k| {
                let diag = product.coeff(&Word::power(1, k).concat(&Word::letter(2)));
                ((diag - C64::new(1.0 / (k + 1) as f64, 0.0)).norm() - dev[k]).abs()
            })
            .fold(0.0, f64::max);
        let max_dev = dev.iter().copied().fold(0.0, f64::max);
        let first = dev.iter().position(|d| *d > 1e-9);
        let certified = max_dev > 1e-9;
        all_certified &= certified;
        let p = format!("{}: ", cand.label);
        r.measure(&format!("{p}deviation"), dev)
            .measure(&format!("{p}max_deviation"), max_dev)
            .measure(&format!("{p}first_failing_k"), json!(first))
            .measure(&format!("{p}product_consistency"), consistency)
            .check(&format!("{p}identity read from the product matches the diagonal formula"), consistency <= 1e-12, "coefficient of z1^k z2 in sum B_i L2 C_i");
    }
    r.tolerance("certification_threshold", 1e-9).check(
        "every candidate is certified not to represent A",
        all_certified,
        "A = sum 1/(k+1) L1^k L2 is not in the algebraic left ideal generated by L2",
    );
    Ok(r)
}

/// `||(cesaro_sum(s, k) - s) xi_1||` for `k = 1..=kmax`, from the weight formula.
fn cesaro_errors(s: &FreeSeries, kmax: usize) -> Vec<f64> {
    (1..=kmax)
        .map(|k| {
            s.iter()
                .map(|(w, c)| {
                    let weight = if w.len() < k { w.len() as f64 / k as f64 } else { 1.0 };
                    weight * weight * c.norm_sqr()
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

pub fn exp_cesaro(s: &FreeSeries, kmax: usize) -> Result<Report> {
    if kmax == 0 {
        return Err(FockError::HypothesisViolated("kmax must be at least 1".into()));
    }
    let n = s.n();
    let deg = s.degree();
    let errors = cesaro_errors(s, kmax);
    let mut consistency: f64 = 0.0;
    for k in 1..=kmax {
        let diff = cesaro_sum(s, k).sub(s);
        let applied = TruncOp::from_series(&diff, n, deg)?.apply(&FockVector::vacuum(n, deg))?.norm();
        consistency = consistency.max((applied - errors[k - 1]).abs());
    }
    let beyond: Vec<f64> = errors.iter().skip(deg).copied().collect();
    let nonincreasing = beyond.windows(2).all(|p| p[1] <= p[0] + 1e-15);
    let norm = s.norm_sqr().sqrt();
    let bound_ok = (deg + 1..=kmax).all(|k| errors[k - 1] <= deg as f64 * norm / k as f64 + 1e-15);
    let radial: f64 = s.iter().map(|(w, c)| (w.len() * w.len()) as f64 * c.norm_sqr()).sum::<f64>().sqrt();
    let last = errors[kmax - 1];
    let decays = kmax <= deg + 1 || last < errors[deg];

    let mut r = Report::new("cesaro");
    r.param("n", n).param("kmax", kmax).param("degree", deg).param("s", serde_json::to_value(s.to_record()).expect("records serialize"));
    r.measure("errors", errors)
        .measure("operator_consistency", consistency)
        .measure("k_times_error_limit", radial)
        .measure("kmax_times_final_error", kmax as f64 * last)
        .tolerance("operator_consistency", 1e-12)
        .check("weight formula matches the operator at xi_1", consistency <= 1e-12, "Cesaro means act through their symbols")
        .check("error is nonincreasing beyond the support radius", nonincreasing, "Cesaro means converge strongly")
        .check("error <= degree * ||s|| / k beyond the support radius", bound_ok, "Cesaro means converge strongly")
        .check("error decreases toward 0", decays, "Cesaro means converge strongly");
    Ok(r)
}

const FLIP_WORDS: [&str; 4] = ["", "z1", "z1 z2", "z2 z1 z1"];

pub fn exp_flip_examples(level: usize, grid: usize, seed: u64) -> Result<Report> {
    let n = 2;
    let mut r = Report::new("flip-examples");
    r.param("level", level).param("grid", grid).param("seed", seed);

    // Word flips: R_w xi_1 = xi_w = L_w xi_1.
    let vacuum = FockVector::vacuum(n, level);
    let mut flip_err: f64 = 0.0;
    for text in FLIP_WORDS {
        let w: Word = text.parse()?;
        let right = TruncOp::creation(Side::Right, &w, n, level)?.apply(&vacuum)?;
        let left = TruncOp::creation(Side::Left, &w, n, level)?.apply(&vacuum)?;
        flip_err = flip_err.max(right.sub(&left)?.max_abs());
    }
    r.measure("word_flip_error", flip_err)
        .check("R_w xi_1 = L_w xi_1 for word isometries and the identity", flip_err == 0.0, "word isometries are flips");

    // Cesaro sums of an element of the left ideal generated by L_w stay in it.
    let w: Word = "z1 z2".parse()?;
    let lam = random_lambda(7, 1.0, seed);
    let b = FreeSeries::from_terms(
        n,
        crate::words::BasisIndexer::new(n, 2)?.words().zip(lam).collect::<Vec<_>>(),
    )?;
    let a = b.mul(&FreeSeries::monomial(n, w.clone(), C64::new(1.0, 0.0)), None);
    let in_ideal = (1..=8).all(|k| cesaro_sum(&a, k).iter().all(|(u, _)| u.ends_with(&w)));
    let errs = cesaro_errors(&a, 64);
    r.measure("ideal_cesaro_errors", errs.clone())
        .check("Cesaro sums of B L_w stay in the ideal generated by L_w", in_ideal, "Cesaro sums of elements of the ideal")
        .check("Cesaro sums of B L_w converge at xi_1", errs[63] < errs[a.degree()], "Cesaro means converge strongly");

    // Non-flip R = sum lambda_k R_1^k R_2: a J with J xi_1 = R xi_1 has an unbounded z1-diagonal.
    let mut counter = Report::new("counterexample");
    counter.absorb("", &exp_ideal_counterexample(&FreeSeries::one(n), &COUNTEREXAMPLE_M, level, grid)?);
    let lambdas = counterexample_lambdas(level);
    let right_symbol = FreeSeries::from_terms(
        n,
        (0..level).map(|k| (Word::letter(2).concat(&Word::power(1, k)), lambdas.coeff(k))),
    )?;
    let rxi = TruncOp::from_side_series(Side::Right, &right_symbol, n, level)?.apply(&vacuum)?;
    counter.measure("r_xi1_norm_sqr", rxi.norm_sqr());
    r.absorb("counterexample: ", &counter);

    // The z1-diagonal f = sum z^k/(k+1): square summable, unbounded partial sums.
    let big = *COUNTEREXAMPLE_M.last().expect("non-empty");
    let f = harmonic_series(big);
    let limit = PI * PI / 6.0;
    let l2: Vec<f64> = COUNTEREXAMPLE_M.iter().map(|&m| f.partial(m).l2_norm()).collect();
    let l2_ok = l2.iter().all(|v| *v <= PI / 6f64.sqrt())
        && (l2[l2.len() - 1].powi(2) - limit).abs() <= 1.0 / (big as f64 + 1.0);
    let mut diag = Report::new("diagonal");
    diag.measure("l2_norms", l2)
        .measure("l2_limit", limit.sqrt())
        .check("sum xi_{z1^k}/(k+1) has finite l2 norm pi/sqrt(6)", l2_ok, "the diagonal vector is square summable");
    growth(&mut diag, &f, &COUNTEREXAMPLE_M, grid, "the diagonal vector is not the symbol of a bounded operator");
    // Printed J_m = sum_{k<=m} L1^m/(k+1) sends xi_1 to H_{m+1} xi_{z1^m}; the sum over L1^k converges instead.
    let harmonic_number = |m: usize| (0..=m).map(|k| 1.0 / (k + 1) as f64).sum::<f64>();
    let tail = |m: usize| (m + 1..=big).map(|k| 1.0 / ((k + 1) * (k + 1)) as f64).sum::<f64>().sqrt();
    diag.measure("printed_formula_norms", COUNTEREXAMPLE_M.iter().map(|&m| harmonic_number(m)).collect::<Vec<_>>())
        .measure("corrected_formula_distance", COUNTEREXAMPLE_M.iter().map(|&m| tail(m)).collect::<Vec<_>>())
        .note("the partial sums use L1^k; with L1^m in every term the vectors J_m xi_1 = H_(m+1) xi_(z1^m) diverge");
    r.absorb("diagonal: ", &diag);
    Ok(r)
}
