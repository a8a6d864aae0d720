//! One-variable power series on the disc: the harmonic series
//! `f(z) = sum z^k / (k+1)`, its reciprocal, and boundary diagnostics.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{FockError, Result};
use crate::fock::C64;

/// Default half-width of the excluded band around `theta = 0`.
pub const DEFAULT_GUARD_BAND: f64 = 0.05;

/// Coefficients `c_0, ..., c_K`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ScalarSeries {
    coeffs: Vec<C64>,
}

/// One `{k, re, im}` record of the interchange format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexCoeff {
    pub k: usize,
    pub re: f64,
    pub im: f64,
}

impl ScalarSeries {
    pub fn new(coeffs: Vec<C64>) -> Self {
        ScalarSeries { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        ScalarSeries { coeffs: coeffs.iter().map(|&c| C64::new(c, 0.0)).collect() }
    }

    pub fn one() -> Self {
        ScalarSeries::from_real(&[1.0])
    }

    /// Truncation order `K` (index of the last stored coefficient).
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn set(&mut self, k: usize, c: C64) {
        if self.coeffs.len() <= k {
            self.coeffs.resize(k + 1, C64::default());
        }
        self.coeffs[k] = c;
    }

    /// Largest index with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| c.norm() != 0.0).unwrap_or(0)
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Coefficients of the product up to order `k`.
    pub fn mul(&self, other: &ScalarSeries, k: usize) -> ScalarSeries {
        let mut out = vec![C64::default(); k + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(k + 1) {
            for (j, b) in other.coeffs.iter().enumerate().take(k + 1 - i) {
                out[i + j] += a * b;
            }
        }
        ScalarSeries { coeffs: out }
    }

    /// Horner evaluation of the stored polynomial.
    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::default(), |acc, c| acc * z + c)
    }

    /// The first `m + 1` coefficients.
    pub fn partial(&self, m: usize) -> ScalarSeries {
        ScalarSeries { coeffs: self.coeffs.iter().take(m + 1).copied().collect() }
    }

    pub fn to_records(&self) -> Vec<IndexCoeff> {
        self.coeffs.iter().enumerate().map(|(k, c)| IndexCoeff { k, re: c.re, im: c.im }).collect()
    }

    pub fn from_records(records: &[IndexCoeff]) -> ScalarSeries {
        let mut s = ScalarSeries::default();
        for r in records {
            let prev = s.coeff(r.k);
            s.set(r.k, prev + C64::new(r.re, r.im));
        }
        s
    }
}

/// `c_k = 1/(k+1)` for `0 <= k <= order`.
pub fn harmonic_series(order: usize) -> ScalarSeries {
    ScalarSeries { coeffs: (0..=order).map(|k| C64::new(1.0 / (k + 1) as f64, 0.0)).collect() }
}

/// Series `g` with `(s g)_k = delta_{k0}` for `k <= order`, by the triangular
/// recursion `g_k = -(1/c_0) sum_{j=1..k} c_j g_{k-j}`.
pub fn reciprocal(s: &ScalarSeries, order: usize) -> Result<ScalarSeries> {
    let c0 = s.coeff(0);
    if c0.norm() <= 1e-12 {
        return Err(FockError::ZeroConstantTerm(c0.norm()));
    }
    let inv0 = c0.inv();
    let mut g = Vec::with_capacity(order + 1);
    g.push(inv0);
    for k in 1..=order {
        let acc: C64 = (1..=k.min(s.order())).map(|j| s.coeff(j) * g[k - j]).sum();
        g.push(-inv0 * acc);
    }
    Ok(ScalarSeries { coeffs: g })
}

/// Closed form of `|f(e^{i theta})|` for the harmonic series, `0 < |theta| <= pi`:
/// `sqrt(log^2|2 sin(theta/2)| + ((|theta| - pi)/2)^2)`.
pub fn boundary_modulus(theta: f64) -> Result<f64> {
    Ok(boundary_modulus_sqr(theta)?.sqrt())
}

pub fn boundary_modulus_sqr(theta: f64) -> Result<f64> {
    let t = theta.abs();
    if t == 0.0 || t > PI + 1e-15 {
        return Err(FockError::Singularity(format!("theta = {theta} is outside 0 < |theta| <= pi")));
    }
    let re = (2.0 * (t / 2.0).sin()).abs().ln();
    let im = (t - PI) / 2.0;
    Ok(re * re + im * im)
}

/// `f(z) = -log(1 - z) / z` on the principal branch (`f(0) = 1`).
pub fn harmonic_closed_form(z: C64) -> C64 {
    if z.norm() < 1e-8 {
        return C64::new(1.0, 0.0) + z / 2.0;
    }
    -(C64::new(1.0, 0.0) - z).ln() / z
}

/// Equally spaced angles `-pi + 2 pi j / grid`, dropping `|theta| < guard`.
pub fn theta_grid(grid: usize, guard: f64) -> Vec<f64> {
    (0..grid)
        .map(|j| -PI + 2.0 * PI * j as f64 / grid as f64)
        .filter(|t| t.abs() >= guard)
        .collect()
}

/// `max_theta |sum_{k<=m} c_k e^{ik theta}|` over `grid` equally spaced angles
/// (the grid contains `theta = 0`).
pub fn partial_sum_sup(s: &ScalarSeries, m: usize, grid: usize) -> f64 {
    assert!(grid >= 8, "grid must have at least 8 points");
    let p = s.partial(m);
    (0..grid)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / grid as f64;
            p.eval(C64::from_polar(1.0, theta)).norm()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_coefficients() {
        let f = harmonic_series(2);
        assert_eq!(f.coeffs(), &[C64::new(1.0, 0.0), C64::new(0.5, 0.0), C64::new(1.0 / 3.0, 0.0)]);
    }

    #[test]
    fn reciprocal_matches_gregory_coefficients() {
        let g = reciprocal(&harmonic_series(5), 5).unwrap();
        let expected = [1.0, -1.0 / 2.0, -1.0 / 12.0, -1.0 / 24.0, -19.0 / 720.0, -3.0 / 160.0];
        for (k, e) in expected.iter().enumerate() {
            assert!((g.coeff(k).re - e).abs() < 1e-15, "k = {k}");
        }
        assert_eq!(reciprocal(&ScalarSeries::one(), 4).unwrap().coeffs()[1..], [C64::default(); 4]);
        assert!(reciprocal(&ScalarSeries::from_real(&[0.0, 1.0]), 3).is_err());
    }

    #[test]
    fn boundary_modulus_at_minus_one_is_log_two() {
        assert!((boundary_modulus(PI).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(boundary_modulus(0.0).is_err());
        assert_eq!(boundary_modulus(-1.0).unwrap(), boundary_modulus(1.0).unwrap());
    }

    #[test]
    fn closed_form_matches_series_inside_disc() {
        let z = C64::from_polar(0.5, 1.3);
        let series = harmonic_series(200).eval(z);
        assert!((series - harmonic_closed_form(z)).norm() < 1e-14);
    }

    #[test]
    fn sup_of_constant_is_one() {
        let one = ScalarSeries::one();
        assert!((partial_sum_sup(&one, 5, 64) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn records() {
        let s = ScalarSeries::new(vec![C64::new(1.0, -1.0), C64::new(0.0, 2.0)]);
        let r = s.to_records();
        assert_eq!(r[1], IndexCoeff { k: 1, re: 0.0, im: 2.0 });
        assert_eq!(ScalarSeries::from_records(&r), s);
    }
}
