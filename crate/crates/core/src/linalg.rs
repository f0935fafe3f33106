//! Small dense complex-matrix helpers used across the crate.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Complex identity matrix.
pub fn identity(n: usize) -> Array2<Complex64> {
    Array2::from_diag_elem(n, C_ONE)
}

/// Conjugate transpose.
pub fn adjoint(m: &Array2<Complex64>) -> Array2<Complex64> {
    m.t().mapv(|z| z.conj())
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    debug_assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest absolute entry of `m - m†`.
pub fn hermitian_residual(m: &Array2<Complex64>) -> f64 {
    max_abs_diff(m, &adjoint(m))
}

/// Largest absolute entry of `m² - I`.
pub fn involution_residual(m: &Array2<Complex64>) -> f64 {
    max_abs_diff(&m.dot(m), &identity(m.nrows()))
}

/// Largest absolute entry of `m†m - I`.
pub fn unitarity_residual(m: &Array2<Complex64>) -> f64 {
    max_abs_diff(&adjoint(m).dot(m), &identity(m.ncols()))
}

/// Outer product `v · v†` scaled by 2, accumulated into `acc`.
pub fn add_twice_projector(acc: &mut Array2<Complex64>, v: &Array1<Complex64>) {
    let n = v.len();
    for i in 0..n {
        if v[i] == C_ZERO {
            continue;
        }
        for j in 0..n {
            if v[j] == C_ZERO {
                continue;
            }
            acc[[i, j]] += 2.0 * v[i] * v[j].conj();
        }
    }
}

/// Euclidean norm of a complex vector.
pub fn vector_norm(v: &Array1<Complex64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
