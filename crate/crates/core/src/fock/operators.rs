//! Second quantization on a [`FockBasis`]: ladder operators, one-body
//! operators `dΓ(A)` and two-body pair sums, either matrix-free or as
//! reusable sparsity patterns re-filled from kernel values.

use super::{FockBasis, ManyBodyState};
use crate::linalg::{CsrMatrix, LinearOperator};
use crate::prelude::*;

/// Elementary transitions `target ← source` with weight
/// `kernel[index] · coef`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Transitions {
    rows: usize,
    cols: usize,
    target: Vec<u32>,
    source: Vec<u32>,
    index: Vec<u32>,
    coef: Vec<f64>,
}

impl Transitions {
    fn push(&mut self, t: usize, s: usize, k: usize, c: f64) {
        self.target.push(t as u32);
        self.source.push(s as u32);
        self.index.push(k as u32);
        self.coef.push(c);
    }

    pub fn len(&self) -> usize {
        self.coef.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coef.is_empty()
    }

    /// `dΓ(A) = Σ A_xy a†_x a_y`; kernel index `x M + y`.
    pub fn one_body(basis: &FockBasis) -> Self {
        let m = basis.modes();
        let mut tr = Self {
            rows: basis.dim(),
            cols: basis.dim(),
            ..Default::default()
        };
        let mut occ = vec![0u8; m];
        for s in 0..basis.dim() {
            occ.copy_from_slice(basis.occupation(s));
            for y in 0..m {
                let ny = occ[y];
                if ny == 0 {
                    continue;
                }
                let c1 = (ny as f64).sqrt();
                occ[y] -= 1;
                for x in 0..m {
                    let c2 = ((occ[x] + 1) as f64).sqrt();
                    occ[x] += 1;
                    tr.push(basis.rank(&occ), s, x * m + y, c1 * c2);
                    occ[x] -= 1;
                }
                occ[y] += 1;
            }
        }
        tr
    }

    /// Ordered pair sum `Σ_{i≠j} B_ij = Σ B[(x,y),(x',y')] a†_x a†_y a_y' a_x'`;
    /// kernel index `(x M + y) M² + x' M + y'`.
    pub fn pair_sum(basis: &FockBasis) -> Self {
        let m = basis.modes();
        let m2 = m * m;
        let mut tr = Self {
            rows: basis.dim(),
            cols: basis.dim(),
            ..Default::default()
        };
        if basis.particles() < 2 {
            return tr;
        }
        let mut occ = vec![0u8; m];
        for s in 0..basis.dim() {
            occ.copy_from_slice(basis.occupation(s));
            for xp in 0..m {
                if occ[xp] == 0 {
                    continue;
                }
                let c1 = (occ[xp] as f64).sqrt();
                occ[xp] -= 1;
                for yp in 0..m {
                    if occ[yp] == 0 {
                        continue;
                    }
                    let c2 = c1 * (occ[yp] as f64).sqrt();
                    occ[yp] -= 1;
                    for y in 0..m {
                        let c3 = c2 * ((occ[y] + 1) as f64).sqrt();
                        occ[y] += 1;
                        for x in 0..m {
                            let c4 = c3 * ((occ[x] + 1) as f64).sqrt();
                            occ[x] += 1;
                            tr.push(basis.rank(&occ), s, (x * m + y) * m2 + xp * m + yp, c4);
                            occ[x] -= 1;
                        }
                        occ[y] -= 1;
                    }
                    occ[yp] += 1;
                }
                occ[xp] += 1;
            }
        }
        tr
    }

    /// `a†_x a†_y` from `from` (k − 2 particles) to `to` (k particles);
    /// kernel index `x M + y`.
    pub fn pair_creation(from: &FockBasis, to: &FockBasis) -> Self {
        assert_eq!(from.particles() + 2, to.particles());
        assert_eq!(from.modes(), to.modes());
        let m = from.modes();
        let mut tr = Self {
            rows: to.dim(),
            cols: from.dim(),
            ..Default::default()
        };
        let mut occ = vec![0u8; m];
        for s in 0..from.dim() {
            occ.copy_from_slice(from.occupation(s));
            for y in 0..m {
                let c1 = ((occ[y] + 1) as f64).sqrt();
                occ[y] += 1;
                for x in 0..m {
                    let c2 = c1 * ((occ[x] + 1) as f64).sqrt();
                    occ[x] += 1;
                    tr.push(to.rank(&occ), s, x * m + y, c2);
                    occ[x] -= 1;
                }
                occ[y] -= 1;
            }
        }
        tr
    }

    /// `½ Σ_{x,y} K_xy a†_x a†_y` for symmetric `K`, keeping only `x ≤ y`;
    /// kernel index `x M + y`, off-diagonal coefficients doubled.
    pub fn symmetric_pair_creation(from: &FockBasis, to: &FockBasis) -> Self {
        assert_eq!(from.particles() + 2, to.particles());
        assert_eq!(from.modes(), to.modes());
        let m = from.modes();
        let mut tr = Self {
            rows: to.dim(),
            cols: from.dim(),
            ..Default::default()
        };
        let mut occ = vec![0u8; m];
        for s in 0..from.dim() {
            occ.copy_from_slice(from.occupation(s));
            for y in 0..m {
                let c1 = ((occ[y] + 1) as f64).sqrt();
                occ[y] += 1;
                for x in 0..=y {
                    let c2 = c1 * ((occ[x] + 1) as f64).sqrt();
                    occ[x] += 1;
                    let c = if x == y { c2 } else { 2.0 * c2 };
                    tr.push(to.rank(&occ), s, x * m + y, c);
                    occ[x] -= 1;
                }
                occ[y] -= 1;
            }
        }
        tr
    }

    /// Shift kernel indices by `offset` (to concatenate kernels).
    fn offset_index(mut self, offset: usize) -> Self {
        self.index.iter_mut().for_each(|k| *k += offset as u32);
        self
    }

    fn append(&mut self, other: Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.target.extend(other.target);
        self.source.extend(other.source);
        self.index.extend(other.index);
        self.coef.extend(other.coef);
    }

    /// `y += T(kernel) x`.
    pub fn apply_add(&self, kernel: &[C64], x: &[C64], y: &mut [C64]) {
        for e in 0..self.coef.len() {
            y[self.target[e] as usize] +=
                kernel[self.index[e] as usize] * (self.coef[e] * x[self.source[e] as usize]);
        }
    }

    /// `y += T(kernel)† x`.
    pub fn apply_adjoint_add(&self, kernel: &[C64], x: &[C64], y: &mut [C64]) {
        for e in 0..self.coef.len() {
            y[self.source[e] as usize] +=
                kernel[self.index[e] as usize].conj() * (self.coef[e] * x[self.target[e] as usize]);
        }
    }

    pub fn to_csr(&self, kernel: &[C64]) -> CsrMatrix {
        OperatorPattern::from_transitions(self.clone()).assemble(kernel)
    }
}

/// CSR sparsity pattern of an operator family, with the list of
/// transitions feeding each stored entry. Re-filling from new kernel
/// values costs one pass over the transitions.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorPattern {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    contrib_ptr: Vec<usize>,
    contrib_index: Vec<u32>,
    contrib_coef: Vec<f64>,
    kernel_len: usize,
}

impl OperatorPattern {
    pub fn from_transitions(tr: Transitions) -> Self {
        let kernel_len = tr.index.iter().map(|&k| k as usize + 1).max().unwrap_or(0);
        let mut order: Vec<u32> = (0..tr.coef.len() as u32).collect();
        order.sort_unstable_by_key(|&e| {
            ((tr.target[e as usize] as u64) << 32) | tr.source[e as usize] as u64
        });
        let mut row_ptr = vec![0usize; tr.rows + 1];
        let mut col_idx = Vec::new();
        let mut contrib_ptr = vec![0usize];
        let mut contrib_index = Vec::with_capacity(order.len());
        let mut contrib_coef = Vec::with_capacity(order.len());
        let mut last: Option<(u32, u32)> = None;
        for &e in &order {
            let e = e as usize;
            let key = (tr.target[e], tr.source[e]);
            if last != Some(key) {
                if last.is_some() {
                    contrib_ptr.push(contrib_index.len());
                }
                col_idx.push(key.1);
                row_ptr[key.0 as usize + 1] += 1;
                last = Some(key);
            }
            contrib_index.push(tr.index[e]);
            contrib_coef.push(tr.coef[e]);
        }
        if last.is_some() {
            contrib_ptr.push(contrib_index.len());
        }
        for i in 0..tr.rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            rows: tr.rows,
            cols: tr.cols,
            row_ptr,
            col_idx,
            contrib_ptr,
            contrib_index,
            contrib_coef,
            kernel_len,
        }
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn kernel_len(&self) -> usize {
        self.kernel_len
    }

    pub fn assemble(&self, kernel: &[C64]) -> CsrMatrix {
        assert!(kernel.len() >= self.kernel_len, "kernel too short");
        let mut values = Vec::with_capacity(self.col_idx.len());
        for e in 0..self.col_idx.len() {
            let mut acc = C64::new(0.0, 0.0);
            for c in self.contrib_ptr[e]..self.contrib_ptr[e + 1] {
                acc += kernel[self.contrib_index[c] as usize] * self.contrib_coef[c];
            }
            values.push(acc);
        }
        CsrMatrix::from_parts(
            self.rows,
            self.cols,
            self.row_ptr.clone(),
            self.col_idx.clone(),
            values,
        )
    }
}

/// Cached pattern for `dΓ(A) + Σ_{i≠j} B_ij` on one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticPattern {
    basis: Arc<FockBasis>,
    pattern: OperatorPattern,
}

impl QuadraticPattern {
    pub fn new(basis: Arc<FockBasis>) -> Self {
        let m2 = basis.modes() * basis.modes();
        let mut tr = Transitions::one_body(&basis);
        tr.append(Transitions::pair_sum(&basis).offset_index(m2));
        Self {
            pattern: OperatorPattern::from_transitions(tr),
            basis,
        }
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    /// `dΓ(a) + Σ_{i≠j} b_ij` with `a` of size `M × M` and `b` of size
    /// `M² × M²` (pair index `x M + y`).
    pub fn assemble(&self, a: &CMatrix, b: &CMatrix) -> CsrMatrix {
        let m = self.basis.modes();
        let m2 = m * m;
        assert_eq!((a.nrows(), a.ncols()), (m, m));
        assert_eq!((b.nrows(), b.ncols()), (m2, m2));
        let mut k = Vec::with_capacity(m2 + m2 * m2);
        for x in 0..m {
            for y in 0..m {
                k.push(a[(x, y)]);
            }
        }
        for r in 0..m2 {
            for c in 0..m2 {
                k.push(b[(r, c)]);
            }
        }
        self.pattern.assemble(&k)
    }
}

fn flatten(a: &CMatrix) -> Vec<C64> {
    let mut k = Vec::with_capacity(a.len());
    for r in 0..a.nrows() {
        for c in 0..a.ncols() {
            k.push(a[(r, c)]);
        }
    }
    k
}

fn check_square(a: &CMatrix, n: usize) -> Result<()> {
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.nrows(),
        });
    }
    Ok(())
}

/// `Σ_i A_i = dΓ(A)`.
pub fn second_quantize_one_body(a: &CMatrix, basis: &FockBasis) -> Result<CsrMatrix> {
    check_square(a, basis.modes())?;
    Ok(Transitions::one_body(basis).to_csr(&flatten(a)))
}

/// `Σ_{i≠j} B_ij` for an arbitrary two-body kernel `B`.
pub fn second_quantize_pair_sum(b: &CMatrix, basis: &FockBasis) -> Result<CsrMatrix> {
    check_square(b, basis.modes() * basis.modes())?;
    Ok(Transitions::pair_sum(basis).to_csr(&flatten(b)))
}

/// Largest entry of `|V − S V S|`, `S` the slot exchange.
pub fn exchange_defect(v: &CMatrix, modes: usize) -> f64 {
    let m = modes;
    let mut worst = 0.0f64;
    for x in 0..m {
        for y in 0..m {
            for xp in 0..m {
                for yp in 0..m {
                    let a = v[(x * m + y, xp * m + yp)];
                    let b = v[(y * m + x, yp * m + xp)];
                    worst = worst.max((a - b).norm());
                }
            }
        }
    }
    worst
}

/// `Σ_{i<j} V_ij` for an exchange-symmetric kernel.
pub fn second_quantize_two_body(v: &CMatrix, basis: &FockBasis) -> Result<CsrMatrix> {
    let m = basis.modes();
    check_square(v, m * m)?;
    let scale = 1.0 + v.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    let defect = exchange_defect(v, m);
    if defect > 1e-12 * scale {
        return Err(Error::AsymmetricKernel { defect });
    }
    Ok(Transitions::pair_sum(basis).to_csr(&flatten(&(v * C64::new(0.5, 0.0)))))
}

/// `a_x` from `from` (N particles) to `to` (N − 1).
pub fn annihilate_mode(x: usize, from: &FockBasis, to: &FockBasis, psi: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); to.dim()];
    let mut occ = vec![0u8; from.modes()];
    for (s, &a) in psi.iter().enumerate() {
        occ.copy_from_slice(from.occupation(s));
        if occ[x] == 0 {
            continue;
        }
        let c = (occ[x] as f64).sqrt();
        occ[x] -= 1;
        out[to.rank(&occ)] += a * c;
    }
    out
}

/// `a(f) = Σ conj(f_x) a_x`.
pub fn annihilate(f: &[C64], from: &FockBasis, to: &FockBasis, psi: &[C64]) -> Vec<C64> {
    assert_eq!(from.particles(), to.particles() + 1);
    let mut out = vec![C64::new(0.0, 0.0); to.dim()];
    let mut occ = vec![0u8; from.modes()];
    for (s, &a) in psi.iter().enumerate() {
        if a == C64::new(0.0, 0.0) {
            continue;
        }
        occ.copy_from_slice(from.occupation(s));
        for x in 0..from.modes() {
            if occ[x] == 0 || f[x] == C64::new(0.0, 0.0) {
                continue;
            }
            let c = (occ[x] as f64).sqrt();
            occ[x] -= 1;
            out[to.rank(&occ)] += f[x].conj() * a * c;
            occ[x] += 1;
        }
    }
    out
}

/// `a†(f) = Σ f_x a†_x`.
pub fn create(f: &[C64], from: &FockBasis, to: &FockBasis, psi: &[C64]) -> Vec<C64> {
    assert_eq!(from.particles() + 1, to.particles());
    let mut out = vec![C64::new(0.0, 0.0); to.dim()];
    let mut occ = vec![0u8; from.modes()];
    for (s, &a) in psi.iter().enumerate() {
        if a == C64::new(0.0, 0.0) {
            continue;
        }
        occ.copy_from_slice(from.occupation(s));
        for x in 0..from.modes() {
            if f[x] == C64::new(0.0, 0.0) {
                continue;
            }
            let c = ((occ[x] + 1) as f64).sqrt();
            occ[x] += 1;
            out[to.rank(&occ)] += f[x] * a * c;
            occ[x] -= 1;
        }
    }
    out
}

/// `φ^{⊗N}` as a Fock vector: `(a†(φ))^N / √N! |0⟩`.
pub fn product_state(phi: &[C64], basis: Arc<FockBasis>) -> ManyBodyState {
    let n = basis.particles();
    let mut occ_fact = vec![1.0f64; n + 1];
    for i in 1..=n {
        occ_fact[i] = occ_fact[i - 1] * i as f64;
    }
    let mut amps = Vec::with_capacity(basis.dim());
    for s in 0..basis.dim() {
        // √(N! / Π n_x!) Π φ_x^{n_x}
        let occ = basis.occupation(s);
        let mut c = C64::new(occ_fact[n].sqrt(), 0.0);
        for (x, &k) in occ.iter().enumerate() {
            c *= phi[x].powu(k as u32) / occ_fact[k as usize].sqrt();
        }
        amps.push(c);
    }
    ManyBodyState::new(basis, amps).expect("dimension matches")
}

/// Matrix-free operator built from transitions and a kernel (square
/// transitions only).
pub struct TransitionOperator<'a> {
    pub transitions: &'a Transitions,
    pub kernel: &'a [C64],
}

impl LinearOperator for TransitionOperator<'_> {
    fn dim(&self) -> usize {
        self.transitions.rows
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        self.transitions.apply_add(self.kernel, x, y);
    }
}
