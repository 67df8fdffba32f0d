use super::FockBasis;
use crate::linalg;
use crate::prelude::*;

/// Amplitudes of a symmetric `N`-boson state in a [`FockBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct ManyBodyState {
    basis: Arc<FockBasis>,
    amps: Vec<C64>,
}

impl ManyBodyState {
    pub fn new(basis: Arc<FockBasis>, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: amps.len(),
            });
        }
        Ok(Self { basis, amps })
    }

    pub fn zeros(basis: Arc<FockBasis>) -> Self {
        let d = basis.dim();
        Self {
            basis,
            amps: vec![C64::new(0.0, 0.0); d],
        }
    }

    /// Occupation-number basis vector.
    pub fn basis_state(basis: Arc<FockBasis>, occ: &[u8]) -> Result<Self> {
        let i = basis
            .index_of(occ)
            .ok_or_else(|| Error::InvalidParameter("occupation not in sector".into()))?;
        let mut s = Self::zeros(basis);
        s.amps[i] = C64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn particles(&self) -> usize {
        self.basis.particles()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amps)
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            linalg::scale(C64::new(1.0 / n, 0.0), &mut self.amps);
        }
    }

    /// `⟨self, other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        linalg::dot(&self.amps, &other.amps)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        linalg::distance(&self.amps, &other.amps)
    }

    pub fn with_amplitudes(&self, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), self.amps.len());
        Self {
            basis: self.basis.clone(),
            amps,
        }
    }
}
