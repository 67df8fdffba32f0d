//! Mode rotations `Γ(R)` on a Fock sector, built from Givens rotations.

use super::FockBasis;
use crate::prelude::*;

/// Unitary `R` on the one-body space with `R φ = e_0`, stored as a product
/// of two-mode rotations.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeRotation {
    modes: usize,
    // (i, i+1, g) with g = [[g00, g01], [g10, g11]] (row = output mode);
    // applied in list order.
    givens: Vec<(usize, usize, [C64; 4])>,
}

impl ModeRotation {
    /// Rotation sending the normalized vector `u` to the first basis vector.
    pub fn aligning(u: &[C64]) -> Self {
        let m = u.len();
        let mut w = u.to_vec();
        let mut givens = Vec::with_capacity(m.saturating_sub(1));
        for k in (0..m.saturating_sub(1)).rev() {
            let (a, b) = (w[k], w[k + 1]);
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let g = if r == 0.0 {
                [
                    C64::new(1.0, 0.0),
                    C64::new(0.0, 0.0),
                    C64::new(0.0, 0.0),
                    C64::new(1.0, 0.0),
                ]
            } else {
                [a.conj() / r, b.conj() / r, -b / r, a / r]
            };
            w[k] = C64::new(r, 0.0);
            w[k + 1] = C64::new(0.0, 0.0);
            givens.push((k, k + 1, g));
        }
        Self { modes: m, givens }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// `R` as a dense matrix.
    pub fn matrix(&self) -> CMatrix {
        let m = self.modes;
        let mut r = CMatrix::identity(m, m);
        for &(i, j, g) in &self.givens {
            let mut gm = CMatrix::identity(m, m);
            gm[(i, i)] = g[0];
            gm[(i, j)] = g[1];
            gm[(j, i)] = g[2];
            gm[(j, j)] = g[3];
            r = gm * r;
        }
        r
    }

    /// `Γ(R) ψ`.
    pub fn apply(&self, basis: &FockBasis, psi: &[C64]) -> Vec<C64> {
        let mut x = psi.to_vec();
        for &(i, j, g) in &self.givens {
            x = apply_two_mode(basis, i, j, g, &x);
        }
        x
    }

    /// `Γ(R)† ψ`.
    pub fn apply_inverse(&self, basis: &FockBasis, psi: &[C64]) -> Vec<C64> {
        let mut x = psi.to_vec();
        for &(i, j, g) in self.givens.iter().rev() {
            let gd = [g[0].conj(), g[2].conj(), g[1].conj(), g[3].conj()];
            x = apply_two_mode(basis, i, j, gd, &x);
        }
        x
    }
}

// Γ(G) for a unitary acting on modes (i, j): a†_i → g00 a†_i + g10 a†_j,
// a†_j → g01 a†_i + g11 a†_j.
fn apply_two_mode(basis: &FockBasis, i: usize, j: usize, g: [C64; 4], psi: &[C64]) -> Vec<C64> {
    let nmax = basis.particles();
    let mut fact = vec![1.0f64; nmax + 1];
    for k in 1..=nmax {
        fact[k] = fact[k - 1] * k as f64;
    }
    let binom = |n: usize, k: usize| fact[n] / (fact[k] * fact[n - k]);
    // table[n][p][n1]
    let mut table: Vec<Vec<Vec<C64>>> = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        let mut tn = vec![vec![C64::new(0.0, 0.0); n + 1]; n + 1];
        for n1 in 0..=n {
            let n2 = n - n1;
            for r in 0..=n1 {
                let a = g[0].powu(r as u32) * g[2].powu((n1 - r) as u32) * binom(n1, r);
                for s in 0..=n2 {
                    let b = g[1].powu(s as u32) * g[3].powu((n2 - s) as u32) * binom(n2, s);
                    tn[r + s][n1] += a * b;
                }
            }
            for p in 0..=n {
                let norm = (fact[p] * fact[n - p] / (fact[n1] * fact[n2])).sqrt();
                tn[p][n1] *= norm;
            }
        }
        table.push(tn);
    }
    let mut out = vec![C64::new(0.0, 0.0); psi.len()];
    let mut occ = vec![0u8; basis.modes()];
    for (s, &a) in psi.iter().enumerate() {
        if a == C64::new(0.0, 0.0) {
            continue;
        }
        occ.copy_from_slice(basis.occupation(s));
        let n1 = occ[i] as usize;
        let n = n1 + occ[j] as usize;
        for p in 0..=n {
            let c = table[n][p][n1];
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            occ[i] = p as u8;
            occ[j] = (n - p) as u8;
            out[basis.rank(&occ)] += c * a;
        }
    }
    out
}
