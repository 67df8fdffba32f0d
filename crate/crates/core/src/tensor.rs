//! Dense first-quantized representation on `(ℂ^M)^{⊗N}` for small systems.
//!
//! Operators act on labelled slots here, which the Fock representation
//! cannot express; the module serves as an independent reference for the
//! second-quantized machinery.

use crate::fock::{FockBasis, ManyBodyState, WeightFunction};
use crate::prelude::*;

/// Largest tensor dimension accepted.
pub const MAX_TENSOR_DIM: usize = 1 << 20;

/// `(ℂ^M)^{⊗N}`, slot 0 is the most significant digit of the index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorSpace {
    particles: usize,
    modes: usize,
    dim: usize,
}

impl TensorSpace {
    pub fn new(particles: usize, modes: usize) -> Result<Self> {
        let dim = (modes as u128)
            .checked_pow(particles as u32)
            .unwrap_or(u128::MAX);
        if dim > MAX_TENSOR_DIM as u128 || modes == 0 {
            return Err(Error::InvalidParameter(format!(
                "tensor space M^N = {modes}^{particles} too large"
            )));
        }
        Ok(Self {
            particles,
            modes,
            dim: dim as usize,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    fn stride(&self, slot: usize) -> usize {
        self.modes.pow((self.particles - 1 - slot) as u32)
    }

    pub fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut d = vec![0; self.particles];
        for slot in (0..self.particles).rev() {
            d[slot] = idx % self.modes;
            idx /= self.modes;
        }
        d
    }

    fn occupation(&self, idx: usize) -> Vec<u8> {
        let mut occ = vec![0u8; self.modes];
        for x in self.digits(idx) {
            occ[x] += 1;
        }
        occ
    }

    fn weight(&self, occ: &[u8]) -> f64 {
        // √(Π n_x! / N!)
        let f = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
        (occ.iter().map(|&n| f(n as usize)).product::<f64>() / f(self.particles)).sqrt()
    }

    /// Symmetric tensor of a Fock state.
    pub fn embed(&self, psi: &ManyBodyState) -> Vec<C64> {
        let b = psi.basis();
        (0..self.dim)
            .map(|idx| {
                let occ = self.occupation(idx);
                psi.amplitudes()[b.index_of(&occ).expect("same sector")] * self.weight(&occ)
            })
            .collect()
    }

    /// Adjoint of [`embed`](Self::embed); its inverse on symmetric tensors.
    pub fn project(&self, t: &[C64], basis: Arc<FockBasis>) -> ManyBodyState {
        let mut amps = vec![C64::new(0.0, 0.0); basis.dim()];
        for (idx, &a) in t.iter().enumerate() {
            let occ = self.occupation(idx);
            amps[basis.index_of(&occ).expect("same sector")] += a * self.weight(&occ);
        }
        ManyBodyState::new(basis, amps).expect("dimension matches")
    }

    /// `A` on one slot.
    pub fn apply_one_body(&self, a: &CMatrix, slot: usize, t: &[C64]) -> Vec<C64> {
        let st = self.stride(slot);
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for (idx, &c) in t.iter().enumerate() {
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            let x = (idx / st) % self.modes;
            let base = idx - x * st;
            for xp in 0..self.modes {
                out[base + xp * st] += a[(xp, x)] * c;
            }
        }
        out
    }

    /// `B` on the ordered slot pair `(i, j)`; pair index `x_i M + x_j`.
    pub fn apply_two_body(&self, b: &CMatrix, i: usize, j: usize, t: &[C64]) -> Vec<C64> {
        assert_ne!(i, j);
        let (si, sj) = (self.stride(i), self.stride(j));
        let m = self.modes;
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for (idx, &c) in t.iter().enumerate() {
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            let xi = (idx / si) % m;
            let xj = (idx / sj) % m;
            let base = idx - xi * si - xj * sj;
            for yi in 0..m {
                for yj in 0..m {
                    let e = b[(yi * m + yj, xi * m + xj)];
                    if e != C64::new(0.0, 0.0) {
                        out[base + yi * si + yj * sj] += e * c;
                    }
                }
            }
        }
        out
    }

    /// `Σ_i A_i`.
    pub fn one_body_sum(&self, a: &CMatrix, t: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for slot in 0..self.particles {
            for (o, v) in out.iter_mut().zip(self.apply_one_body(a, slot, t)) {
                *o += v;
            }
        }
        out
    }

    /// `Σ_{i≠j} B_ij`.
    pub fn pair_sum(&self, b: &CMatrix, t: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for i in 0..self.particles {
            for j in 0..self.particles {
                if i != j {
                    for (o, v) in out.iter_mut().zip(self.apply_two_body(b, i, j, t)) {
                        *o += v;
                    }
                }
            }
        }
        out
    }

    /// `P_{N,k} = Σ_{|S| = k} Π_{i∈S} q_i Π_{i∉S} p_i`, summed over slot
    /// subsets.
    pub fn sector_projector(&self, p: &CMatrix, q: &CMatrix, k: usize, t: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for mask in 0u32..(1u32 << self.particles) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let mut x = t.to_vec();
            for slot in 0..self.particles {
                let proj = if mask >> slot & 1 == 1 { q } else { p };
                x = self.apply_one_body(proj, slot, &x);
            }
            for (o, v) in out.iter_mut().zip(x) {
                *o += v;
            }
        }
        out
    }

    /// `f̂ = Σ f(k) P_{N,k}`.
    pub fn counting(&self, p: &CMatrix, q: &CMatrix, f: &WeightFunction, t: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for k in 0..=self.particles {
            let w = f.at(k);
            if w == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(self.sector_projector(p, q, k, t)) {
                *o += v * w;
            }
        }
        out
    }

    /// Dense matrix of a linear map given by its action.
    pub fn matrix_of(&self, apply: impl Fn(&[C64]) -> Vec<C64>) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        let mut e = vec![C64::new(0.0, 0.0); self.dim];
        for c in 0..self.dim {
            e[c] = C64::new(1.0, 0.0);
            for (r, v) in apply(&e).into_iter().enumerate() {
                m[(r, c)] = v;
            }
            e[c] = C64::new(0.0, 0.0);
        }
        m
    }
}

/// `(ψ ⊗_s χ)(x₁…x_{l+k}) = (k! l! (k+l)!)^{-1/2} Σ_σ ψ(x_σ(1…l)) χ(x_σ(l+1…l+k))`
/// for dense arrays `ψ ∈ (ℂ^M)^{⊗l}`, `χ ∈ (ℂ^M)^{⊗k}`.
pub fn symmetric_product(modes: usize, l: usize, psi: &[C64], k: usize, chi: &[C64]) -> Vec<C64> {
    let n = l + k;
    let space = TensorSpace::new(n, modes).expect("small tensor space");
    let fact = |r: usize| (1..=r).map(|i| i as f64).product::<f64>();
    let pref = 1.0 / (fact(k) * fact(l) * fact(n)).sqrt();
    let perms = permutations(n);
    let mut out = vec![C64::new(0.0, 0.0); space.dim()];
    for (idx, o) in out.iter_mut().enumerate() {
        let d = space.digits(idx);
        let mut acc = C64::new(0.0, 0.0);
        for sigma in &perms {
            let left = sigma[..l].iter().fold(0usize, |a, &s| a * modes + d[s]);
            let right = sigma[l..].iter().fold(0usize, |a, &s| a * modes + d[s]);
            acc += psi[left] * chi[right];
        }
        *o = acc * pref;
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    permute(&mut cur, 0, &mut out);
    out
}

fn permute(cur: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if start == cur.len() {
        out.push(cur.clone());
        return;
    }
    for i in start..cur.len() {
        cur.swap(start, i);
        permute(cur, start + 1, out);
        cur.swap(start, i);
    }
}
