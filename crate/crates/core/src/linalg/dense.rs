use crate::prelude::*;
use nalgebra::{DVector, SymmetricEigen};

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching unitary (columns are eigenvectors).
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = CMatrix::zeros(h.nrows(), h.ncols());
    for (c, &i) in order.iter().enumerate() {
        vecs.set_column(c, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// `exp(−i tau H) v` for dense Hermitian `H`.
pub fn expm_hermitian_apply(h: &CMatrix, v: &[C64], tau: f64) -> Vec<C64> {
    let (vals, u) = hermitian_eigen(h);
    let x = DVector::from_column_slice(v);
    let mut c = u.adjoint() * x;
    for (ci, &lam) in c.iter_mut().zip(&vals) {
        *ci *= C64::new(0.0, -tau * lam).exp();
    }
    (u * c).iter().copied().collect()
}

/// Trace norm `Tr|A|` (sum of singular values).
pub fn trace_norm(a: &CMatrix) -> f64 {
    a.clone().singular_values().iter().sum()
}

/// Square root of a real symmetric positive semi-definite matrix.
pub fn psd_sqrt(a: &RMatrix) -> RMatrix {
    let eig = SymmetricEigen::new(a.clone());
    let d = eig.eigenvalues.map(|x| x.max(0.0).sqrt());
    &eig.eigenvectors * RMatrix::from_diagonal(&d) * eig.eigenvectors.transpose()
}
