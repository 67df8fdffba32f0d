use super::{axpy, dot, norm, LinearOperator};
use crate::prelude::*;
use nalgebra::SymmetricEigen;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Krylov dimension per restart cycle.
    pub cycle_dim: usize,
    pub max_restarts: usize,
    /// Target for `‖H x − E x‖`.
    pub residual_tolerance: f64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            cycle_dim: 120,
            max_restarts: 40,
            residual_tolerance: 1e-9,
        }
    }
}

/// Lowest eigenpair of a Hermitian operator by restarted Lanczos with full
/// reorthogonalization. Returns `(E, x, ‖Hx − Ex‖)`.
pub fn lowest_eigenpair<A: LinearOperator + ?Sized>(
    h: &A,
    start: Option<&[C64]>,
    opts: &LanczosOptions,
) -> Result<(f64, Vec<C64>, f64)> {
    let n = h.dim();
    if n == 0 {
        return Err(Error::InvalidParameter("empty operator".into()));
    }
    let mut x: Vec<C64> = match start {
        Some(s) if s.len() == n && norm(s) > 0.0 => s.to_vec(),
        Some(s) if s.len() != n => {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: s.len(),
            })
        }
        _ => (0..n)
            .map(|i| C64::new(1.0 + 0.1 * ((i * 7919) % 13) as f64, 0.01 * (i % 5) as f64))
            .collect(),
    };
    let nx = norm(&x);
    x.iter_mut().for_each(|c| *c /= nx);
    let mut hx = vec![C64::new(0.0, 0.0); n];
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    let mut energy = 0.0;
    for _ in 0..=opts.max_restarts {
        let m_max = opts.cycle_dim.min(n);
        let mut basis: Vec<Vec<C64>> = vec![x.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut w = vec![C64::new(0.0, 0.0); n];
        for j in 0..m_max {
            h.apply(&basis[j], &mut w);
            iterations += 1;
            alpha.push(dot(&basis[j], &w).re);
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &w);
                    axpy(-c, b, &mut w);
                }
            }
            let b = norm(&w);
            if b <= 1e-13 || j + 1 == m_max {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|c| c / b).collect());
        }
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
        let mut k0 = 0;
        for k in 1..m {
            if eig.eigenvalues[k] < eig.eigenvalues[k0] {
                k0 = k;
            }
        }
        energy = eig.eigenvalues[k0];
        let mut y = vec![C64::new(0.0, 0.0); n];
        for (i, b) in basis.iter().enumerate().take(m) {
            axpy(C64::new(eig.eigenvectors[(i, k0)], 0.0), b, &mut y);
        }
        let ny = norm(&y);
        y.iter_mut().for_each(|c| *c /= ny);
        h.apply(&y, &mut hx);
        axpy(C64::new(-energy, 0.0), &y, &mut hx);
        residual = norm(&hx);
        x = y;
        if residual <= opts.residual_tolerance {
            // refine the eigenvalue with the Rayleigh quotient
            h.apply(&x, &mut hx);
            energy = dot(&x, &hx).re;
            return Ok((energy, x, residual));
        }
    }
    let _ = energy;
    Err(Error::EigenNotConverged {
        residual,
        iterations,
    })
}
