use super::operators::annihilate_mode;
use super::{FockBasis, ManyBodyState};
use crate::linalg::dot;
use crate::prelude::*;

/// Reduced density matrix `γ^(k)_Ψ`, trace one, for `k ∈ {1, 2}`.
///
/// `γ^(1)_{xy} = ⟨a†_y a_x⟩ / N` and
/// `γ^(2)_{(x₁x₂),(y₁y₂)} = ⟨a†_{y₁} a†_{y₂} a_{x₂} a_{x₁}⟩ / (N(N−1))`.
pub fn reduced_density(psi: &ManyBodyState, k: usize) -> Result<CMatrix> {
    let n = psi.particles();
    let m = psi.basis().modes();
    match k {
        1 => {
            if n < 1 {
                return Err(Error::TooFewParticles(n));
            }
            let b1 = FockBasis::new(n - 1, m)?;
            let ax: Vec<Vec<C64>> = (0..m)
                .map(|x| annihilate_mode(x, psi.basis(), &b1, psi.amplitudes()))
                .collect();
            Ok(CMatrix::from_fn(m, m, |x, y| {
                dot(&ax[y], &ax[x]) / n as f64
            }))
        }
        2 => {
            if n < 2 {
                return Err(Error::TooFewParticles(n));
            }
            let b1 = FockBasis::new(n - 1, m)?;
            let b2 = FockBasis::new(n - 2, m)?;
            let ax: Vec<Vec<C64>> = (0..m)
                .map(|x| annihilate_mode(x, psi.basis(), &b1, psi.amplitudes()))
                .collect();
            let mut pairs = Vec::with_capacity(m * m);
            for x1 in 0..m {
                for x2 in 0..m {
                    pairs.push(annihilate_mode(x2, &b1, &b2, &ax[x1]));
                }
            }
            let norm = (n * (n - 1)) as f64;
            Ok(CMatrix::from_fn(m * m, m * m, |r, c| {
                dot(&pairs[c], &pairs[r]) / norm
            }))
        }
        _ => Err(Error::DensityOrder(k)),
    }
}
