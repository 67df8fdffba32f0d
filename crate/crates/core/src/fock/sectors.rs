//! Excitation-number sectors relative to a condensate `φ`: the projectors
//! `P_{N,k}`, weighted counting operators `f̂ = Σ f(k) P_{N,k}` and the
//! parity split.

use super::{FockBasis, ManyBodyState, ModeRotation};
use crate::lattice::OneBodyField;
use crate::prelude::*;

/// Weight `f : {0, …, N} → [0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    values: Vec<f64>,
}

impl WeightFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter(
                "weight needs at least one value".into(),
            ));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter(
                "weights must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { values })
    }

    fn from_fn(n: usize, f: impl Fn(usize) -> f64) -> Self {
        Self {
            values: (0..=n).map(f).collect(),
        }
    }

    /// `m(k) = k/N`.
    pub fn m(n: usize) -> Self {
        Self::from_fn(n, |k| k as f64 / n as f64)
    }

    /// `n(k) = √(k/N)`.
    pub fn n(n: usize) -> Self {
        Self::from_fn(n, |k| (k as f64 / n as f64).sqrt())
    }

    /// `μ(k) = N/k`, zero at `k = 0`.
    pub fn mu(n: usize) -> Self {
        Self::from_fn(n, |k| if k == 0 { 0.0 } else { n as f64 / k as f64 })
    }

    /// `ν(k) = √(N/k)`, zero at `k = 0`.
    pub fn nu(n: usize) -> Self {
        Self::from_fn(n, |k| {
            if k == 0 {
                0.0
            } else {
                (n as f64 / k as f64).sqrt()
            }
        })
    }

    /// Indicator of odd `k`.
    pub fn odd(n: usize) -> Self {
        Self::from_fn(n, |k| (k % 2) as f64)
    }

    /// Indicator of even `k`.
    pub fn even(n: usize) -> Self {
        Self::from_fn(n, |k| ((k + 1) % 2) as f64)
    }

    /// `k(k−1)⋯(k−r+1) / (N(N−1)⋯(N−r+1))`, the weight of `q₁⋯q_r`.
    pub fn falling(n: usize, r: usize) -> Self {
        Self::from_fn(n, |k| {
            (0..r)
                .map(|i| (k as f64 - i as f64).max(0.0) / (n - i) as f64)
                .product()
        })
    }

    /// Indicator of a single sector.
    pub fn indicator(n: usize, k: usize) -> Self {
        Self::from_fn(n, |j| f64::from(u8::from(j == k)))
    }

    pub fn particles(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, k: usize) -> f64 {
        self.values.get(k).copied().unwrap_or(0.0)
    }

    /// `(τ_d f)(k) = f(k + d)`, zero outside `[0, N]`.
    pub fn shift(&self, d: i64) -> Self {
        let n = self.particles() as i64;
        Self::from_fn(n as usize, |k| {
            let j = k as i64 + d;
            if (0..=n).contains(&j) {
                self.values[j as usize]
            } else {
                0.0
            }
        })
    }

    pub fn pow(&self, e: f64) -> Self {
        Self::from_fn(self.particles(), |k| {
            let v = self.values[k];
            if v == 0.0 {
                0.0
            } else {
                v.powf(e)
            }
        })
    }

    pub fn product(&self, other: &Self) -> Self {
        Self::from_fn(self.particles(), |k| self.values[k] * other.at(k))
    }
}

/// `Ψ` expressed in coordinates where the condensate is mode 0; the
/// excitation number of a basis state is `N − n_0`.
#[derive(Debug, Clone)]
pub struct SectorResolution {
    rotation: ModeRotation,
    basis: Arc<FockBasis>,
    rotated: Vec<C64>,
}

impl SectorResolution {
    pub fn new(phi: &OneBodyField, psi: &ManyBodyState) -> Result<Self> {
        let basis = psi.basis().clone();
        if phi.sites() != basis.modes() {
            return Err(Error::DimensionMismatch {
                expected: basis.modes(),
                found: phi.sites(),
            });
        }
        let defect = phi.norm_defect();
        if defect > crate::lattice::NORM_TOLERANCE {
            return Err(Error::NotNormalized { defect });
        }
        let rotation = ModeRotation::aligning(phi.amplitudes());
        let rotated = rotation.apply(&basis, psi.amplitudes());
        Ok(Self {
            rotation,
            basis,
            rotated,
        })
    }

    pub fn particles(&self) -> usize {
        self.basis.particles()
    }

    pub fn rotation(&self) -> &ModeRotation {
        &self.rotation
    }

    /// Amplitudes in rotated coordinates.
    pub fn rotated(&self) -> &[C64] {
        &self.rotated
    }

    pub fn excitations(&self, s: usize) -> usize {
        self.basis.particles() - self.basis.occupation(s)[0] as usize
    }

    /// `‖P_{N,k} Ψ‖²` for `k = 0..=N`.
    pub fn weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.particles() + 1];
        for (s, a) in self.rotated.iter().enumerate() {
            w[self.excitations(s)] += a.norm_sqr();
        }
        w
    }

    /// `⟨Ψ, f̂ Ψ⟩`.
    pub fn expectation(&self, f: &WeightFunction) -> f64 {
        self.weights()
            .iter()
            .enumerate()
            .map(|(k, w)| f.at(k) * w)
            .sum()
    }

    /// `f̂ Ψ` back in lattice coordinates.
    pub fn apply_weight(&self, f: &WeightFunction) -> ManyBodyState {
        self.apply_diagonal(f.values())
    }

    /// `Σ w(k) P_{N,k} Ψ` for an arbitrary real `w` (zero past its end).
    pub fn apply_diagonal(&self, w: &[f64]) -> ManyBodyState {
        let mut x = self.rotated.clone();
        for (s, a) in x.iter_mut().enumerate() {
            *a *= w.get(self.excitations(s)).copied().unwrap_or(0.0);
        }
        let amps = self.rotation.apply_inverse(&self.basis, &x);
        ManyBodyState::new(self.basis.clone(), amps).expect("same basis")
    }

    /// `P_{N,k} Ψ`.
    pub fn component(&self, k: usize) -> Result<ManyBodyState> {
        if k > self.particles() {
            return Err(Error::SectorOutOfRange {
                k,
                particles: self.particles(),
            });
        }
        Ok(self.apply_weight(&WeightFunction::indicator(self.particles(), k)))
    }
}

fn check_weight(f: &WeightFunction, psi: &ManyBodyState) -> Result<()> {
    if f.particles() != psi.particles() {
        return Err(Error::DimensionMismatch {
            expected: psi.particles() + 1,
            found: f.values().len(),
        });
    }
    Ok(())
}

/// `P_{N,k} Ψ`.
pub fn sector_projector(
    k: usize,
    phi: &OneBodyField,
    psi: &ManyBodyState,
) -> Result<ManyBodyState> {
    SectorResolution::new(phi, psi)?.component(k)
}

/// `f̂ Ψ`.
pub fn counting_operator(
    f: &WeightFunction,
    phi: &OneBodyField,
    psi: &ManyBodyState,
) -> Result<ManyBodyState> {
    check_weight(f, psi)?;
    Ok(SectorResolution::new(phi, psi)?.apply_weight(f))
}

/// `⟨Ψ, f̂ Ψ⟩`.
pub fn counting_expectation_weight(
    f: &WeightFunction,
    phi: &OneBodyField,
    psi: &ManyBodyState,
) -> Result<f64> {
    check_weight(f, psi)?;
    Ok(SectorResolution::new(phi, psi)?.expectation(f))
}

/// `(f̂_odd Ψ, f̂_even Ψ)`.
pub fn parity_projectors(
    phi: &OneBodyField,
    psi: &ManyBodyState,
) -> Result<(ManyBodyState, ManyBodyState)> {
    let res = SectorResolution::new(phi, psi)?;
    let n = psi.particles();
    Ok((
        res.apply_weight(&WeightFunction::odd(n)),
        res.apply_weight(&WeightFunction::even(n)),
    ))
}
