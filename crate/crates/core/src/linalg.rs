//! Dense complex solves with residual and condition diagnostics.

use crate::error::{Error, Result};
use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::{c64, Mat};
use num_complex::Complex64;

/// Result of a dense solve A x = b.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    pub x: Vec<Complex64>,
    /// ‖Ax − b‖₂ / ‖b‖₂
    pub residual: f64,
    /// Estimate of the 1-norm condition number κ₁(A).
    pub condition: f64,
}

/// Run faer kernels single-threaded. The callers already parallelize over
/// independent solves, and a fixed kernel schedule makes results independent
/// of the thread count.
pub fn use_sequential_kernels() {
    faer::set_global_parallelism(faer::Par::Seq);
}

pub fn norm1(a: &Mat<c64>) -> f64 {
    (0..a.ncols()).map(|j| (0..a.nrows()).map(|i| a[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
}

fn col(v: &[Complex64]) -> Mat<c64> {
    Mat::from_fn(v.len(), 1, |i, _| v[i])
}

fn to_vec(m: &Mat<c64>) -> Vec<Complex64> {
    (0..m.nrows()).map(|i| m[(i, 0)]).collect()
}

/// Hager's estimate of ‖A⁻¹‖₁ from an existing factorization.
pub fn inverse_norm1_estimate(lu: &PartialPivLu<c64>, n: usize) -> f64 {
    let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
    let mut est = 0.0;
    let mut last_j = usize::MAX;
    for _ in 0..5 {
        let y = to_vec(&lu.solve(col(&x)));
        est = y.iter().map(|v| v.norm()).sum();
        let sgn: Vec<Complex64> = y.iter().map(|v| if v.norm() > 0.0 { v / v.norm() } else { Complex64::new(1.0, 0.0) }).collect();
        let z = to_vec(&lu.solve_adjoint(col(&sgn)));
        let (j, zmax) = z.iter().enumerate().map(|(i, v)| (i, v.norm())).fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
        let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
        if zmax <= ztx || j == last_j {
            break;
        }
        last_j = j;
        x = vec![Complex64::new(0.0, 0.0); n];
        x[j] = Complex64::new(1.0, 0.0);
    }
    est
}

/// LU solve with partial pivoting, relative residual and condition estimate.
pub fn solve_dense(a: &Mat<c64>, b: &[Complex64]) -> Result<DenseSolution> {
    let n = a.nrows();
    if n != a.ncols() || n != b.len() {
        return Err(Error::Invalid(format!("system shape {}x{} with rhs {}", a.nrows(), a.ncols(), b.len())));
    }
    let lu = a.partial_piv_lu();
    let x = to_vec(&lu.solve(col(b)));
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Singular(f64::INFINITY));
    }
    let ax = a * col(&x);
    let rn: f64 = (0..n).map(|i| (ax[(i, 0)] - b[i]).norm_sqr()).sum::<f64>().sqrt();
    let bn: f64 = b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
    let condition = norm1(a) * inverse_norm1_estimate(&lu, n);
    Ok(DenseSolution { x, residual: rn / bn, condition })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_and_estimates_condition() {
        let n = 6;
        let a = Mat::from_fn(n, n, |i, j| {
            let d = if i == j { 10.0 } else { 0.0 };
            c64::new(d + 1.0 / (1.0 + i as f64 + j as f64), 0.1 * (i as f64 - j as f64))
        });
        let b: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let s = solve_dense(&a, &b).unwrap();
        assert!(s.residual < 1e-14);
        assert!(s.condition > 1.0 && s.condition < 10.0);
    }

    #[test]
    fn diagonal_condition_is_exact() {
        let a = Mat::from_fn(3, 3, |i, j| if i == j { c64::new([1.0, 1e-4, 2.0][i], 0.0) } else { c64::new(0.0, 0.0) });
        let s = solve_dense(&a, &[Complex64::new(1.0, 0.0); 3]).unwrap();
        assert!((s.condition - 2e4).abs() < 1e-6);
    }
}
