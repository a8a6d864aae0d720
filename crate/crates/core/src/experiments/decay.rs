//! Adjoint-orbit decay, range codimension counts and eigenvectors of the
//! adjoint right shifts.

use crate::error::{FockError, Result};
use crate::fock::{FockVector, C64};
use crate::linalg::numerical_rank;
use crate::operators::{Side, TruncOp};
use crate::report::Report;
use crate::series::FreeSeries;
use crate::words::{BasisIndexer, Word};

use super::word_key;

const DECAY_WORDS: [&str; 5] = ["", "z1", "z2", "z1 z2", "z2 z1 z1"];

/// `p_j(k) = k (k-1) ... (k-j+1) / j!`.
pub fn p_weight(j: usize, k: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (k as f64 - i as f64) / (i + 1) as f64)
}

/// `sum_{j <= min(k, len-1)} p_j(k) |lambda|^{k-j} norms[j]`, where `norms[j]`
/// bounds `||(A*)^j xi||` and vanishes beyond the word length.
pub fn orbit_bound(lambda_abs: f64, k: usize, norms: &[f64]) -> f64 {
    (0..norms.len().min(k + 1)).map(|j| p_weight(j, k) * lambda_abs.powi((k - j) as i32) * norms[j]).sum()
}

/// Orbit `||(L*)^k xi_w||` for `L = lambda I + (1 - |lambda|) L_1` on two letters,
/// compared with the binomial bound built from `A = (1 - |lambda|) L_1`.
pub fn exp_adjoint_decay(lambda: C64, level: usize, kmax: usize) -> Result<Report> {
    if lambda.norm() >= 1.0 {
        return Err(FockError::HypothesisViolated(format!("|lambda| = {} is not below 1", lambda.norm())));
    }
    let n = 2;
    let mu = 1.0 - lambda.norm();
    let a_symbol = FreeSeries::monomial(n, Word::letter(1), C64::new(mu, 0.0));
    let l = TruncOp::from_series(&a_symbol.add(&FreeSeries::monomial(n, Word::unit(), lambda)), n, level)?;
    let a_adj = TruncOp::from_series(&a_symbol, n, level)?.adjoint();

    let mut r = Report::new("adjoint-decay");
    r.param("lambda_re", lambda.re).param("lambda_im", lambda.im).param("level", level).param("kmax", kmax);
    let words: Vec<Word> = DECAY_WORDS.iter().map(|t| t.parse()).collect::<Result<Vec<Word>>>()?;
    let words: Vec<Word> = words.into_iter().filter(|w| w.len() <= level).collect();
    let xis = words.iter().map(|w| FockVector::basis(n, level, w)).collect::<Result<Vec<_>>>()?;
    let orbits = l.adjoint_power_orbits(&xis, kmax)?;
    let (mut tight_ok, mut loose_ok) = (true, true);
    let mut final_max: f64 = 0.0;
    for ((w, xi), orbit) in words.iter().zip(xis).zip(orbits) {
        let mut v = xi;
        let mut a_norms = vec![v.norm()];
        for _ in 0..w.len() {
            v = a_adj.apply(&v)?;
            a_norms.push(v.norm());
        }
        let powers_of_two: Vec<f64> = (0..=w.len()).map(|j| 2f64.powi(j as i32)).collect();
        let bound: Vec<f64> = (0..=kmax).map(|k| orbit_bound(lambda.norm(), k, &a_norms)).collect();
        let loose: Vec<f64> = (0..=kmax).map(|k| orbit_bound(lambda.norm(), k, &powers_of_two)).collect();
        let below = |b: &[f64]| orbit.iter().zip(b).all(|(o, b)| *o <= b * (1.0 + 1e-12) + 1e-15);
        tight_ok &= below(&bound);
        loose_ok &= below(&loose);
        final_max = final_max.max(*orbit.last().expect("orbit has kmax + 1 entries"));
        let key = word_key(w);
        if let Some(first_zero) = orbit.iter().position(|o| *o == 0.0) {
            r.measure(&format!("first_zero[{key}]"), first_zero);
        }
        r.measure(&format!("orbit[{key}]"), orbit);
        r.measure(&format!("bound[{key}]"), bound);
        r.measure(&format!("loose_bound[{key}]"), loose);
    }
    let vacuum = r.array("orbit[1]").expect("vacuum orbit measured").to_vec();
    let vacuum_err = vacuum
        .iter()
        .enumerate()
        .map(|(k, o)| (o - lambda.norm().powi(k as i32)).abs())
        .fold(0.0, f64::max);
    r.measure("final_orbit_max", final_max)
        .measure("vacuum_orbit_error", vacuum_err)
        .tolerance("final_orbit_max", 1e-3)
        .tolerance("vacuum_orbit_error", 1e-12)
        .check("orbit below the binomial bound with ||(A*)^j xi_w||", tight_ok, "binomial expansion of (conj(lambda) I + A*)^k")
        .check("orbit below the bound with ||A|| < 2", loose_ok, "||A|| < 2 for the non-scalar part")
        .check("orbit decays below 1e-3", final_max < 1e-3, "adjoint powers of a non-unitary contraction tend to 0")
        .check("vacuum orbit equals |lambda|^k", vacuum_err <= 1e-12, "L* xi_1 = conj(lambda) xi_1");
    Ok(r)
}

pub fn adjoint_decay_sweep(lambdas: &[C64], level: usize, kmax: usize) -> Result<Report> {
    let mut r = Report::new("adjoint-decay");
    r.note("L = lambda I + (1 - |lambda|) L1, a non-unitary contraction of norm 1 for |lambda| < 1");
    for lambda in lambdas {
        r.absorb(&format!("lambda={lambda}: "), &exp_adjoint_decay(*lambda, level, kmax)?);
    }
    Ok(r)
}

/// Level-by-level dimension of the complement of the range of an isometry
/// with vanishing vacuum coefficient.
pub fn exp_codim_counts(symbol: &FreeSeries, level: usize, tol: f64) -> Result<Report> {
    let n = symbol.n();
    if n < 2 {
        return Err(FockError::HypothesisViolated("codimension counts need n >= 2".into()));
    }
    let l = TruncOp::from_series(symbol, n, level)?;
    let defect = l.isometry_defect()?;
    if defect > 1e-10 {
        return Err(FockError::HypothesisViolated(format!("symbol is not isometric (defect {defect:e})")));
    }
    let mut r = Report::new("codim-counts");
    r.param("n", n).param("level", level).param("tol", tol).param("symbol", serde_json::to_value(symbol.to_record()).expect("records serialize"));
    let (mut sizes, mut ranks, mut comps, mut bounds, mut cumulative) = (vec![], vec![], vec![], vec![], vec![]);
    let mut total = 0;
    for k in 0..=l.frontier() {
        let size = n.pow(k as u32);
        let comp = l.range_complement_level_dims(k, tol)?;
        total += comp;
        sizes.push(size);
        ranks.push(size - comp);
        comps.push(comp);
        bounds.push(size - (size - 1) / (n - 1));
        cumulative.push(total);
    }
    let bound_ok = comps.iter().zip(&bounds).all(|(c, b)| c >= b);
    let grows = cumulative.windows(2).all(|p| p[1] > p[0]);
    r.measure("isometry_defect", defect)
        .measure("level_size", sizes)
        .measure("rank", ranks)
        .measure("complement_dim", comps)
        .measure("complement_lower_bound", bounds)
        .measure("cumulative_complement", cumulative)
        .check("complement dim >= n^k - (n^k - 1)/(n - 1) at every level", bound_ok, "per-level count of the range complement")
        .check("total complement grows with the truncation", grows, "range of an isometry with zero vacuum term has infinite codimension");
    Ok(r)
}

/// The eigenvector `v_lambda` of the adjoint right shifts, `R_i* v = conj(lambda_i) v`.
pub fn exp_eigenvector(lambda: &[C64], level: usize) -> Result<Report> {
    let n = lambda.len();
    let r2: f64 = lambda.iter().map(|c| c.norm_sqr()).sum();
    if n == 0 || r2 >= 1.0 {
        return Err(FockError::HypothesisViolated(format!("need 0 < n and ||lambda|| < 1, got ||lambda||^2 = {r2}")));
    }
    let idx = BasisIndexer::new(n, level)?;
    let product = |w: &Word| w.letters().iter().fold(C64::new(1.0, 0.0), |acc, &i| acc * lambda[i as usize - 1].conj());
    let raw = FockVector::from_coeffs(n, level, idx.words().map(|w| (w.clone(), product(&w))))?;

    // Independent recursion c_{w z_i} = conj(lambda_i) c_w, level by level.
    let mut recursion = FockVector::vacuum(n, level);
    let mut frontier = vec![(Word::unit(), C64::new(1.0, 0.0))];
    for _ in 0..level {
        let mut next = Vec::with_capacity(frontier.len() * n);
        for (w, c) in &frontier {
            for (i, li) in lambda.iter().enumerate() {
                let child = w.concat(&Word::letter(i as u32 + 1));
                recursion.set(child.clone(), c * li.conj())?;
                next.push((child, c * li.conj()));
            }
        }
        frontier = next;
    }
    let recursion_err = raw.sub(&recursion)?.max_abs();

    let expected_norm_sqr = (1.0 - r2.powi(level as i32 + 1)) / (1.0 - r2);
    let norm_err = (raw.norm_sqr() - expected_norm_sqr).abs() / expected_norm_sqr;
    let v = raw.scale(C64::new(1.0 / raw.norm(), 0.0));
    let mut residuals = Vec::with_capacity(n);
    for (i, li) in lambda.iter().enumerate() {
        let adj = TruncOp::creation(Side::Right, &Word::letter(i as u32 + 1), n, level)?.adjoint();
        let diff = adj.apply(&v)?.axpy(-li.conj(), &v)?;
        residuals.push(diff.with_level(level.saturating_sub(1)).max_abs());
    }
    let worst = residuals.iter().copied().fold(0.0, f64::max);

    let mut r = Report::new("eigenvector");
    r.param("n", n)
        .param("level", level)
        .param("lambda_re", lambda.iter().map(|c| c.re).collect::<Vec<_>>())
        .param("lambda_im", lambda.iter().map(|c| c.im).collect::<Vec<_>>())
        .measure("lambda_norm", r2.sqrt())
        .measure("eigen_residual", residuals)
        .measure("max_eigen_residual", worst)
        .measure("product_vs_recursion", recursion_err)
        .measure("truncated_norm_sqr_relative_error", norm_err)
        .tolerance("max_eigen_residual", 1e-12)
        .tolerance("product_vs_recursion", 1e-12)
        .check("R_i* v = conj(lambda_i) v below the top level", worst <= 1e-12, "eigenvectors of the adjoint right shifts")
        .check("product coefficients solve the recursion", recursion_err <= 1e-12, "c_{w z_i} = conj(lambda_i) c_w")
        .check("truncated norm matches the geometric sum", norm_err <= 1e-12, "||v_lambda||^2 = 1/(1 - ||lambda||^2)");
    Ok(r)
}

/// Rank of the Gram matrix of `vectors`.
pub(crate) fn gram_rank(vectors: &[FockVector], tol: f64) -> Result<usize> {
    let m = vectors.len();
    let mut g = nalgebra::DMatrix::<C64>::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            g[(i, j)] = vectors[i].inner(&vectors[j])?;
        }
    }
    Ok(numerical_rank(&g, tol))
}
