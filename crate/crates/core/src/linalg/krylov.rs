use super::{axpy, dot, norm, LinearOperator};
use crate::prelude::*;
use nalgebra::SymmetricEigen;

/// Settings for the Lanczos exponential `exp(−i τ H) v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions {
    /// Largest Krylov subspace before the step is split.
    pub max_dim: usize,
    /// Absolute a-posteriori error target per (sub)step.
    pub tolerance: f64,
    /// How many times a step may be halved when the subspace is too small.
    pub max_halvings: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self {
            max_dim: 30,
            tolerance: 1e-12,
            max_halvings: 10,
        }
    }
}

/// Bookkeeping from one call to [`expm_apply`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KrylovInfo {
    pub substeps: usize,
    pub max_subspace: usize,
    pub error_estimate: f64,
}

/// `exp(−i τ H) v` for Hermitian `H`. Splits `τ` into halves until every
/// substep meets the tolerance.
pub fn expm_apply<A: LinearOperator + ?Sized>(
    h: &A,
    v: &[C64],
    tau: f64,
    opts: &KrylovOptions,
) -> Result<(Vec<C64>, KrylovInfo)> {
    if v.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: v.len(),
        });
    }
    let mut last = f64::INFINITY;
    for halvings in 0..=opts.max_halvings {
        let pieces = 1usize << halvings;
        let sub = tau / pieces as f64;
        let mut x = v.to_vec();
        let mut info = KrylovInfo {
            substeps: pieces,
            ..Default::default()
        };
        let mut ok = true;
        for _ in 0..pieces {
            match lanczos_step(h, &x, sub, opts) {
                Some((y, m, err)) => {
                    x = y;
                    info.max_subspace = info.max_subspace.max(m);
                    info.error_estimate += err;
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok((x, info));
        }
        last = last.min(info.error_estimate);
    }
    Err(Error::KrylovNotConverged {
        estimate: last,
        halvings: opts.max_halvings,
    })
}

// Returns (result, subspace size, error estimate), or None when max_dim is
// reached without meeting the tolerance.
fn lanczos_step<A: LinearOperator + ?Sized>(
    h: &A,
    v: &[C64],
    tau: f64,
    opts: &KrylovOptions,
) -> Option<(Vec<C64>, usize, f64)> {
    let n = v.len();
    let beta0 = norm(v);
    if beta0 == 0.0 {
        return Some((v.to_vec(), 0, 0.0));
    }
    let m_max = opts.max_dim.min(n).max(1);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m_max + 1);
    basis.push(v.iter().map(|x| x / beta0).collect());
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![C64::new(0.0, 0.0); n];
    for j in 0..m_max {
        h.apply(&basis[j], &mut w);
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        // full reorthogonalization, twice
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                axpy(-c, b, &mut w);
            }
        }
        let b = norm(&w);
        let m = j + 1;
        let y = tridiag_expm_e1(&alpha, &beta, tau);
        let err = beta0 * b * y[m - 1].norm();
        let happy = b <= 1e-14 * (1.0 + a.abs());
        if err <= opts.tolerance || happy || m == n {
            let mut out = vec![C64::new(0.0, 0.0); n];
            for (i, bi) in basis.iter().enumerate().take(m) {
                axpy(y[i] * beta0, bi, &mut out);
            }
            return Some((out, m, if happy { 0.0 } else { err }));
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    None
}

// exp(−i τ T) e_1 for the symmetric tridiagonal T(alpha, beta).
fn tridiag_expm_e1(alpha: &[f64], beta: &[f64], tau: f64) -> Vec<C64> {
    let m = alpha.len();
    let mut t = RMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut out = vec![C64::new(0.0, 0.0); m];
    for k in 0..m {
        let phase = C64::new(0.0, -tau * eig.eigenvalues[k]).exp();
        let c = eig.eigenvectors[(0, k)] * phase;
        for (i, o) in out.iter_mut().enumerate() {
            *o += c * eig.eigenvectors[(i, k)];
        }
    }
    out
}
