//! Dense linear-algebra helpers: factorization wrappers with library error
//! mapping and smallest-eigenpair extraction for symmetric matrices, which
//! switches from a full dense decomposition to warm-started shifted inverse
//! iteration beyond a size threshold.

use crate::error::{Error, Result};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn, LU};

/// Above this many unknowns the smallest eigenpair comes from shifted
/// inverse iteration; below it a dense symmetric decomposition is cheaper.
pub const DENSE_EIGEN_LIMIT: usize = 1200;

/// Reusable Cholesky factorization of a symmetric positive definite matrix.
pub struct SpdSolver {
    chol: Cholesky<f64, Dyn>,
    n: usize,
}

impl SpdSolver {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        let chol = a
            .cholesky()
            .ok_or_else(|| Error::NumericalFailure("matrix is not positive definite".into()))?;
        Ok(SpdSolver { chol, n })
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(b)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// Reusable LU factorization with partial pivoting for general square
/// systems (Newton corrections are not symmetric).
pub struct LuSolver {
    lu: LU<f64, Dyn, Dyn>,
}

impl LuSolver {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        let lu = a.lu();
        if !lu.is_invertible() {
            return Err(Error::NumericalFailure("matrix is singular".into()));
        }
        Ok(LuSolver { lu })
    }

    pub fn solve(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        self.lu
            .solve(b)
            .ok_or_else(|| Error::NumericalFailure("back-substitution failed".into()))
    }
}

/// Smallest eigenvalue of a symmetric matrix together with a unit
/// eigenvector.
#[derive(Debug, Clone)]
pub struct SmallestEigen {
    pub value: f64,
    pub vector: DVector<f64>,
}

/// Smallest eigenpair of the symmetric matrix `k`. `warm` seeds the inverse
/// iteration (ignored on the dense path); passing the previous eigenvector
/// across a continuation step cuts the iteration count sharply.
pub fn smallest_eigenpair(
    k: &DMatrix<f64>,
    warm: Option<&DVector<f64>>,
) -> Result<SmallestEigen> {
    let n = k.nrows();
    if n == 0 || k.ncols() != n {
        return Err(Error::NumericalFailure(format!(
            "eigenproblem needs a nonempty square matrix, got {}x{}",
            n,
            k.ncols()
        )));
    }
    if n <= DENSE_EIGEN_LIMIT {
        return dense_smallest(k);
    }
    match inverse_iteration(k, warm) {
        Some(pair) => Ok(pair),
        // Slow spectral gap; correctness beats the size heuristic.
        None => dense_smallest(k),
    }
}

fn dense_smallest(k: &DMatrix<f64>) -> Result<SmallestEigen> {
    let eig = k.clone().symmetric_eigen();
    let (idx, value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, &v)| (i, v))
        .ok_or_else(|| Error::NumericalFailure("empty spectrum".into()))?;
    if !value.is_finite() {
        return Err(Error::NumericalFailure("eigensolver returned a non-finite value".into()));
    }
    Ok(SmallestEigen { value, vector: eig.eigenvectors.column(idx).into_owned() })
}

fn inverse_iteration(k: &DMatrix<f64>, warm: Option<&DVector<f64>>) -> Option<SmallestEigen> {
    let n = k.nrows();
    let mut gersh_lo = f64::INFINITY;
    let mut knorm = 0.0_f64;
    for i in 0..n {
        let mut off = 0.0;
        for j in 0..n {
            if i != j {
                off += k[(i, j)].abs();
            }
        }
        gersh_lo = gersh_lo.min(k[(i, i)] - off);
        knorm = knorm.max(k[(i, i)].abs() + off);
    }
    enum Factor {
        Chol(Cholesky<f64, Dyn>),
        Lu(LU<f64, Dyn, Dyn>),
    }
    let factorize = |sigma: f64| -> Option<Factor> {
        let mut shifted = k.clone();
        for i in 0..n {
            shifted[(i, i)] -= sigma;
        }
        match shifted.clone().cholesky() {
            Some(c) => Some(Factor::Chol(c)),
            None => {
                let lu = shifted.lu();
                lu.is_invertible().then_some(Factor::Lu(lu))
            }
        }
    };
    let mut x = match warm {
        Some(v) if v.len() == n && v.norm() > 0.0 => v.normalize(),
        _ => DVector::from_element(n, (n as f64).sqrt().recip()),
    };
    let tol = 1e-10 * knorm.max(1.0);
    // A single shift converges at rate (mu_1 - sigma)/(mu_2 - sigma), which
    // is useless when the bottom of the spectrum sits far above the
    // Gershgorin bound. Each round refactors just below the current
    // Rayleigh quotient, so the rate improves as the estimate sharpens.
    let mut sigma = gersh_lo - 1e-3 * knorm.max(1.0);
    for _round in 0..6 {
        let factor = factorize(sigma)?;
        for _ in 0..40 {
            let y = match &factor {
                Factor::Chol(c) => c.solve(&x),
                Factor::Lu(lu) => lu.solve(&x)?,
            };
            let norm = y.norm();
            if !norm.is_finite() || norm == 0.0 {
                return None;
            }
            x = y / norm;
        }
        let kx = k * &x;
        let rho = x.dot(&kx);
        let resid = (&kx - rho * &x).norm();
        if resid <= tol {
            return Some(SmallestEigen { value: rho, vector: x });
        }
        sigma = rho - resid.max(1e-8 * knorm.max(1.0));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = 2.0;
            if i + 1 < n {
                a[(i, i + 1)] = -1.0;
                a[(i + 1, i)] = -1.0;
            }
        }
        a
    }

    #[test]
    fn spd_and_lu_roundtrip() {
        let a = laplacian_1d(40);
        let b = DVector::from_fn(40, |i, _| (i as f64 * 0.37).sin());
        let x = SpdSolver::new(a.clone()).unwrap().solve(&b);
        assert!((&a * &x - &b).norm() <= 1e-12 * b.norm());
        let y = LuSolver::new(a.clone()).unwrap().solve(&b).unwrap();
        assert!((&x - &y).norm() <= 1e-10 * x.norm());
        assert!(SpdSolver::new(-a).is_err());
        assert!(LuSolver::new(DMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn smallest_eigen_matches_closed_form() {
        // Second difference matrix: eigenvalues 2 - 2 cos(pi k / (n+1)).
        let n = 60;
        let a = laplacian_1d(n);
        let want = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        let got = smallest_eigenpair(&a, None).unwrap();
        assert!((got.value - want).abs() <= 1e-12, "{} vs {want}", got.value);
        // Residual check on the vector.
        assert!((&a * &got.vector - want * &got.vector).norm() <= 1e-10);
    }

    #[test]
    fn iterative_path_agrees_with_dense() {
        // Force the iterative branch by shrinking nothing: call the internal
        // routine directly on a mid-size matrix and compare with the dense
        // answer, warm start included.
        let n = 150;
        let a = laplacian_1d(n);
        let dense = dense_smallest(&a).unwrap();
        let iter = inverse_iteration(&a, None).unwrap();
        assert!((dense.value - iter.value).abs() <= 1e-9);
        let warm = inverse_iteration(&a, Some(&dense.vector)).unwrap();
        assert!((warm.value - dense.value).abs() <= 1e-11);
        // Eigenvectors agree up to sign.
        let alignment = dense.vector.dot(&warm.vector).abs();
        assert!((alignment - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn indefinite_matrix_smallest_is_negative() {
        let mut a = laplacian_1d(30);
        for i in 0..30 {
            a[(i, i)] -= 3.0; // shift spectrum below zero
        }
        let got = smallest_eigenpair(&a, None).unwrap();
        assert!(got.value < -0.9);
        let iter = inverse_iteration(&a, None).unwrap();
        assert!((iter.value - got.value).abs() <= 1e-9);
    }
}
