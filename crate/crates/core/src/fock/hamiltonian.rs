//! The N-body Hamiltonian `H^t`, the truncated mean-field Hamiltonian
//! `H̃^t`, their difference and the counting-derivative terms.

use super::operators::Transitions;
use super::{FockBasis, ManyBodyState, QuadraticPattern, SectorResolution, WeightFunction};
use crate::lattice::{
    chemical_phase, condensate_projectors, mean_field_potential, pair_projector, Interaction,
    Model, OneBodyField,
};
use crate::linalg::{dot, CsrMatrix};
use crate::prelude::*;

/// `V`, the two-body multiplication operator `v(x₁ − x₂)` (`Σ_{i<j}` form).
pub fn full_pair_kernel(v: &Interaction) -> CMatrix {
    v.pair_kernel()
}

/// Exchange-symmetric kernel `S` with
/// `H̃ − Σ h^φ_i = λ Σ_{i<j} S_ij`:
/// `S = X + X† + Y + Y†`, `X = (p⊗q) V (q⊗p)`, `Y = (p⊗p) V (q⊗q)`.
pub fn tilde_pair_kernel(v: &Interaction, phi: &OneBodyField) -> Result<CMatrix> {
    let (p, q) = condensate_projectors(phi)?;
    let vk = v.pair_kernel();
    let x = pair_projector(&p, &q) * &vk * pair_projector(&q, &p);
    let y = pair_projector(&p, &p) * &vk * pair_projector(&q, &q);
    Ok(&x + x.adjoint() + &y + y.adjoint())
}

/// Ordered-pair kernel `D` with `H − H̃ = λ Σ_{i≠j} D_ij`:
/// `D = (q⊗q)(V − 1⊗v̄)(q⊗p) + h.c. + (q⊗q)(½V − 1⊗v̄ + μ)(q⊗q)`,
/// where `v̄ = v ∗ |φ|²`.
pub fn difference_pair_kernel(v: &Interaction, phi: &OneBodyField) -> Result<CMatrix> {
    let (p, q) = condensate_projectors(phi)?;
    let m = v.sites();
    let vk = v.pair_kernel();
    let rho = mean_field_potential(v, phi);
    let mu = chemical_phase(v, phi);
    let mut vbar2 = CMatrix::zeros(m * m, m * m);
    for x in 0..m {
        for y in 0..m {
            vbar2[(x * m + y, x * m + y)] = C64::new(rho[y], 0.0);
        }
    }
    let qq = pair_projector(&q, &q);
    let three = &qq * (&vk - &vbar2) * pair_projector(&q, &p);
    let id = CMatrix::identity(m * m, m * m);
    let four = &qq * (&vk * C64::new(0.5, 0.0) - &vbar2 + id * C64::new(mu, 0.0)) * &qq;
    Ok(&three + three.adjoint() + four)
}

/// Builds `H^t` and `H̃^t` on one sector from a cached pattern.
#[derive(Debug, Clone)]
pub struct HamiltonianBuilder {
    model: Model,
    pattern: QuadraticPattern,
    lambda: f64,
}

impl HamiltonianBuilder {
    pub fn new(model: Model, basis: Arc<FockBasis>) -> Result<Self> {
        let n = basis.particles();
        if n < 2 {
            return Err(Error::TooFewParticles(n));
        }
        if basis.modes() != model.sites() {
            return Err(Error::DimensionMismatch {
                expected: model.sites(),
                found: basis.modes(),
            });
        }
        Ok(Self {
            model,
            pattern: QuadraticPattern::new(basis),
            lambda: 1.0 / (n as f64 - 1.0),
        })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        self.pattern.basis()
    }

    /// `λ_N = 1/(N − 1)`.
    pub fn coupling(&self) -> f64 {
        self.lambda
    }

    /// `H^t = Σ h^t_i + λ Σ_{i<j} v_ij`.
    pub fn full(&self, t: f64) -> CsrMatrix {
        let b = full_pair_kernel(&self.model.interaction) * C64::new(0.5 * self.lambda, 0.0);
        self.pattern.assemble(&self.model.one_body(t), &b)
    }

    /// `H̃^t` for the condensate `φ` (the Hartree solution at time `t`).
    pub fn tilde(&self, t: f64, phi: &OneBodyField) -> Result<CsrMatrix> {
        let s = tilde_pair_kernel(&self.model.interaction, phi)?;
        let b = s * C64::new(0.5 * self.lambda, 0.0);
        Ok(self
            .pattern
            .assemble(&self.model.hartree_hamiltonian(phi, t), &b))
    }

    /// `Σ h^{t,φ}_i`.
    pub fn hartree_part(&self, t: f64, phi: &OneBodyField) -> CsrMatrix {
        let m = self.model.sites();
        self.pattern.assemble(
            &self.model.hartree_hamiltonian(phi, t),
            &CMatrix::zeros(m * m, m * m),
        )
    }

    /// `λ Σ_{i≠j} D_ij`, the right-hand side of `H − H̃`.
    pub fn difference(&self, phi: &OneBodyField) -> Result<CsrMatrix> {
        let d = difference_pair_kernel(&self.model.interaction, phi)? * C64::new(self.lambda, 0.0);
        let m = self.model.sites();
        Ok(self.pattern.assemble(&CMatrix::zeros(m, m), &d))
    }
}

/// The three contributions to `d/dt ⟨Ψ_t, f̂^t Ψ_t⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountingTerms {
    pub one: f64,
    pub two: f64,
    pub three: f64,
}

impl CountingTerms {
    pub fn total(&self) -> f64 {
        self.one + self.two + self.three
    }
}

/// Terms (I), (II), (III) for `Z = ½(v − v̄₁ − v̄₂)`:
///
/// * (I)   `4N Im⟨Ψ, p₁p₂ Z q₁p₂ (f̂ − τ₋₁f̂) Ψ⟩`
/// * (II)  `2N Im⟨Ψ, p₁p₂ Z q₁q₂ (f̂ − τ₋₂f̂) Ψ⟩`
/// * (III) `4N Im⟨Ψ, q₁p₂ Z q₁q₂ (f̂ − τ₋₁f̂) Ψ⟩`
///
/// with the inner product linear in its first argument, so that their sum
/// is the derivative along `H^t` (only (II) survives along `H̃^t`). In the
/// usual physics convention each `Im` picks up a minus sign.
pub fn counting_derivative_terms(
    v: &Interaction,
    phi: &OneBodyField,
    f: &WeightFunction,
    psi: &ManyBodyState,
) -> Result<CountingTerms> {
    let n = psi.particles();
    if n < 2 {
        return Err(Error::TooFewParticles(n));
    }
    let m = v.sites();
    let (p, q) = condensate_projectors(phi)?;
    let rho = mean_field_potential(v, phi);
    let mut z = CMatrix::zeros(m * m, m * m);
    for x in 0..m {
        for y in 0..m {
            z[(x * m + y, x * m + y)] = C64::new(0.5 * (v.value(x, y) - rho[x] - rho[y]), 0.0);
        }
    }
    let pp = pair_projector(&p, &p);
    let qp = pair_projector(&q, &p);
    let qq = pair_projector(&q, &q);
    let b1 = &pp * &z * &qp;
    let b2 = &pp * &z * &qq;
    let b3 = &qp * &z * &qq;
    let res = SectorResolution::new(phi, psi)?;
    let g1 = res.apply_diagonal(&shift_difference(f, -1));
    let g2 = res.apply_diagonal(&shift_difference(f, -2));
    let tr = Transitions::pair_sum(psi.basis());
    let norm = (n * (n - 1)) as f64;
    let expect = |b: &CMatrix, g: &ManyBodyState| -> C64 {
        let mut k = Vec::with_capacity(b.len());
        for r in 0..b.nrows() {
            for c in 0..b.ncols() {
                k.push(b[(r, c)]);
            }
        }
        let mut y = vec![C64::new(0.0, 0.0); g.amplitudes().len()];
        tr.apply_add(&k, g.amplitudes(), &mut y);
        dot(psi.amplitudes(), &y) / norm
    };
    let nf = n as f64;
    // Im in the first-linear convention is −Im of the physics bracket.
    Ok(CountingTerms {
        one: -4.0 * nf * expect(&b1, &g1).im,
        two: -2.0 * nf * expect(&b2, &g2).im,
        three: -4.0 * nf * expect(&b3, &g1).im,
    })
}

// f − τ_d f, which may be negative.
fn shift_difference(f: &WeightFunction, d: i64) -> Vec<f64> {
    let s = f.shift(d);
    f.values()
        .iter()
        .zip(s.values())
        .map(|(a, b)| a - b)
        .collect()
}
