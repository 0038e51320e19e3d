//! Dense Hermitian helpers used by the matrix oracles.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending with
/// matching eigenvector columns.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

pub fn eigenvalues(m: &CMatrix) -> Vec<f64> {
    eigh(m).0
}

/// `exp(-i t M)` for Hermitian `M`.
pub fn expm_hermitian(m: &CMatrix, t: f64) -> CMatrix {
    let (vals, vecs) = eigh(m);
    let phases = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| Complex64::from_polar(1.0, -t * l)),
    ));
    &vecs * phases * vecs.adjoint()
}

/// `exp(A)` for anti-Hermitian `A`, via the Hermitian matrix `iA`.
pub fn expm_anti_hermitian(a: &CMatrix) -> CMatrix {
    let k = a * Complex64::new(0.0, 1.0);
    // A = -iK  =>  exp(A) = exp(-i K)
    expm_hermitian(&k, 1.0)
}

/// Gershgorin enclosure `[lo, hi]` of the spectrum of a Hermitian matrix.
pub fn gershgorin_bounds(m: &CMatrix) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for r in 0..m.nrows() {
        let radius: f64 = (0..m.ncols())
            .filter(|&c| c != r)
            .map(|c| m[(r, c)].norm())
            .sum();
        let centre = m[(r, r)].re;
        lo = lo.min(centre - radius);
        hi = hi.max(centre + radius);
    }
    if m.nrows() == 0 {
        (0.0, 0.0)
    } else {
        (lo, hi)
    }
}

/// Largest entrywise deviation.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Spectral-norm distance computed from the singular values.
pub fn operator_norm(a: &CMatrix) -> f64 {
    a.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_reconstructs() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, -0.5),
                Complex64::new(0.0, 0.5),
                Complex64::new(-1.0, 0.0),
            ],
        );
        let (vals, vecs) = eigh(&m);
        let expected = 1.25f64.sqrt();
        assert!((vals[0] + expected).abs() < 1e-14);
        assert!((vals[1] - expected).abs() < 1e-14);
        let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            2,
            vals.iter().map(|&v| Complex64::new(v, 0.0)),
        ));
        assert!(max_abs_diff(&(&vecs * diag * vecs.adjoint()), &m) < 1e-14);
    }

    #[test]
    fn expm_of_pauli_x() {
        // exp(-i t X) = cos t I - i sin t X
        let x = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::default(),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::default(),
            ],
        );
        let t = 0.3;
        let u = expm_hermitian(&x, t);
        assert!((u[(0, 0)] - Complex64::new(t.cos(), 0.0)).norm() < 1e-14);
        assert!((u[(0, 1)] - Complex64::new(0.0, -t.sin())).norm() < 1e-14);
    }
}
