//! Small dense helpers on top of nalgebra's SVD.

use nalgebra::{DMatrix, DVector};

use crate::fock::C64;

/// Basis size above which operators are never densified.
pub const DENSE_LIMIT: usize = 4096;

/// Default relative threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-9;

pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Largest singular value (0 for an empty matrix).
pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Number of singular values `>= tol * sigma_max`.
pub fn numerical_rank(m: &DMatrix<C64>, tol: f64) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        Some(&top) if top > 0.0 => sv.iter().filter(|&&s| s >= tol * top).count(),
        _ => 0,
    }
}

/// Minimum-norm least-squares solution of `a x = b`.
pub fn least_squares(a: &DMatrix<C64>, b: &DVector<C64>) -> DVector<C64> {
    let svd = a.clone().svd(true, true);
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    svd.solve(b, top * 1e-12).expect("u and v were computed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_norm_of_diagonal() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![
            C64::new(3.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        ]));
        assert!((spectral_norm(&m) - 3.0).abs() < 1e-14);
        assert_eq!(numerical_rank(&m, RANK_TOL), 2);
        assert_eq!(numerical_rank(&DMatrix::<C64>::zeros(3, 3), RANK_TOL), 0);
        assert_eq!(spectral_norm(&DMatrix::<C64>::zeros(0, 4)), 0.0);
    }

    #[test]
    fn least_squares_recovers_exact_solution() {
        let a = DMatrix::from_row_slice(3, 2, &[
            C64::new(1.0, 0.0), C64::new(0.0, 1.0),
            C64::new(2.0, 0.0), C64::new(1.0, 0.0),
            C64::new(0.0, 0.0), C64::new(1.0, -1.0),
        ]);
        let x = DVector::from_vec(vec![C64::new(0.5, 0.25), C64::new(-1.0, 2.0)]);
        let b = &a * &x;
        assert!((least_squares(&a, &b) - x).norm() < 1e-12);
    }
}
