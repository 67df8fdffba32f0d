//! Periodic one-dimensional lattice, one-body fields, external potentials,
//! pair interactions and the mean-field kernels built from them.
//!
//! Fields are stored as coefficients in the orthonormal site basis, `u_j =
//! √a φ(x_j)`, so `Σ|u_j|² = 1` is the discrete form of `∫|φ|² = 1`. Every
//! matrix returned here acts on those coefficients.

use crate::linalg::{self, hermitian_eigen, kron, psd_sqrt};
use crate::prelude::*;
use core::f64::consts::PI;
use nalgebra::SymmetricEigen;

/// Tolerance on `|Σ|u|² − 1|` accepted for a one-body field.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Ring of `M` sites with spacing `a = L / M`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpace {
    sites: usize,
    length: f64,
    neg_laplacian: RMatrix,
}

impl LatticeSpace {
    pub fn new(sites: usize, length: f64) -> Result<Self> {
        if sites < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 sites, got {sites}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "length must be positive, got {length}"
            )));
        }
        let a = length / sites as f64;
        let mut lap = RMatrix::zeros(sites, sites);
        for j in 0..sites {
            lap[(j, j)] += 2.0 / (a * a);
            lap[(j, (j + 1) % sites)] -= 1.0 / (a * a);
            lap[(j, (j + sites - 1) % sites)] -= 1.0 / (a * a);
        }
        Ok(Self {
            sites,
            length,
            neg_laplacian: lap,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.sites as f64
    }

    /// `−Δ`, the periodic three-point stencil over `a²`.
    pub fn neg_laplacian(&self) -> &RMatrix {
        &self.neg_laplacian
    }

    /// Closed-form spectrum of `−Δ`: `(2 − 2cos(2πk/M)) / a²`.
    pub fn laplacian_eigenvalues(&self) -> Vec<f64> {
        let a = self.spacing();
        (0..self.sites)
            .map(|k| (2.0 - 2.0 * (2.0 * PI * k as f64 / self.sites as f64).cos()) / (a * a))
            .collect()
    }

    pub fn max_kinetic_eigenvalue(&self) -> f64 {
        self.laplacian_eigenvalues().into_iter().fold(0.0, f64::max)
    }

    pub fn position(&self, j: usize) -> f64 {
        self.spacing() * j as f64
    }

    /// Minimum-image distance for a site offset `d`.
    pub fn displacement(&self, d: usize) -> f64 {
        let d = d % self.sites;
        self.spacing() * d.min(self.sites - d) as f64
    }

    /// `√(1 − Δ)`.
    pub fn sqrt_one_minus_laplacian(&self) -> RMatrix {
        psd_sqrt(&(RMatrix::identity(self.sites, self.sites) + &self.neg_laplacian))
    }

    /// Normalized plane wave `e^{2πi k j / M} / √M`.
    pub fn plane_wave(&self, k: i64) -> OneBodyField {
        let m = self.sites as f64;
        let amps = (0..self.sites)
            .map(|j| C64::from_polar(1.0 / m.sqrt(), 2.0 * PI * (k as f64) * j as f64 / m))
            .collect();
        OneBodyField { amps }
    }
}

/// Normalized one-body wave function, stored as orthonormal-basis
/// coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct OneBodyField {
    amps: Vec<C64>,
}

impl OneBodyField {
    /// Wrap coefficients that are already normalized.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let defect = (linalg::norm_sqr(&amps) - 1.0).abs();
        if !(defect <= NORM_TOLERANCE) {
            return Err(Error::NotNormalized { defect });
        }
        Ok(Self { amps })
    }

    /// Normalize arbitrary nonzero coefficients.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let n = linalg::norm(&amps);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::NotNormalized { defect: 1.0 });
        }
        amps.iter_mut().for_each(|c| *c /= n);
        Ok(Self { amps })
    }

    /// From continuum values `φ(x_j)` with `a Σ|φ_j|² = 1`.
    pub fn from_values(space: &LatticeSpace, values: &[C64]) -> Result<Self> {
        if values.len() != space.sites() {
            return Err(Error::DimensionMismatch {
                expected: space.sites(),
                found: values.len(),
            });
        }
        let s = space.spacing().sqrt();
        Self::from_amplitudes(values.iter().map(|v| v * s).collect())
    }

    /// Continuum values `φ(x_j) = u_j / √a`.
    pub fn values(&self, space: &LatticeSpace) -> Vec<C64> {
        let s = space.spacing().sqrt();
        self.amps.iter().map(|u| u / s).collect()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn sites(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_defect(&self) -> f64 {
        (linalg::norm_sqr(&self.amps) - 1.0).abs()
    }

    /// `|u_j|²`.
    pub fn density(&self) -> Vec<f64> {
        self.amps.iter().map(|u| u.norm_sqr()).collect()
    }

    /// `p = |φ⟩⟨φ|`.
    pub fn projector(&self) -> CMatrix {
        let m = self.amps.len();
        CMatrix::from_fn(m, m, |i, j| self.amps[i] * self.amps[j].conj())
    }
}

/// Time profile multiplying the external potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Switch {
    /// `s ≡ 1`.
    Static,
    /// `s(t) = 1 − 3r² + 2r³`, `r = clamp(t/τ, 0, 1)`: switches the profile
    /// off over `[0, τ]` with a continuous derivative.
    SmoothOff { tau: f64 },
}

impl Switch {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Switch::Static => 1.0,
            Switch::SmoothOff { tau } => {
                let r = (t / tau).clamp(0.0, 1.0);
                1.0 - 3.0 * r * r + 2.0 * r * r * r
            }
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            Switch::Static => 0.0,
            Switch::SmoothOff { tau } => {
                let r = t / tau;
                if r <= 0.0 || r >= 1.0 {
                    0.0
                } else {
                    (-6.0 * r + 6.0 * r * r) / tau
                }
            }
        }
    }
}

/// `W^t(x) = s(t) W_0(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSchedule {
    profile: Vec<f64>,
    switch: Switch,
}

impl PotentialSchedule {
    pub fn new(profile: Vec<f64>, switch: Switch) -> Result<Self> {
        if profile.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter("potential must be finite".into()));
        }
        if let Switch::SmoothOff { tau } = switch {
            if !(tau > 0.0 && tau.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "switch-off time must be positive, got {tau}"
                )));
            }
        }
        Ok(Self { profile, switch })
    }

    /// No external potential.
    pub fn free(space: &LatticeSpace) -> Self {
        Self {
            profile: vec![0.0; space.sites()],
            switch: Switch::Static,
        }
    }

    /// Harmonic-like well `A (1 − cos(2π(j − c)/M))`, minimum at site
    /// `c = M/2` (fractional for even `M`).
    pub fn harmonic_trap(space: &LatticeSpace, amplitude: f64, switch: Switch) -> Result<Self> {
        let m = space.sites() as f64;
        let c = (m - 1.0) / 2.0;
        let profile = (0..space.sites())
            .map(|j| amplitude * (1.0 - (2.0 * PI * (j as f64 - c) / m).cos()))
            .collect();
        Self::new(profile, switch)
    }

    pub fn profile(&self) -> &[f64] {
        &self.profile
    }

    pub fn switch(&self) -> Switch {
        self.switch
    }

    pub fn at(&self, t: f64) -> Vec<f64> {
        let s = self.switch.value(t);
        self.profile.iter().map(|w| s * w).collect()
    }

    pub fn derivative_at(&self, t: f64) -> Vec<f64> {
        let s = self.switch.derivative(t);
        self.profile.iter().map(|w| s * w).collect()
    }

    /// `sup_t ‖W^t‖_∞` (the switch never exceeds 1).
    pub fn sup_norm(&self) -> f64 {
        self.profile.iter().fold(0.0, |m, w| m.max(w.abs()))
    }

    /// `sup_t ‖∂_t W^t‖_∞`.
    pub fn sup_derivative(&self) -> f64 {
        let s = match self.switch {
            Switch::Static => 0.0,
            Switch::SmoothOff { tau } => 1.5 / tau,
        };
        s * self.sup_norm()
    }
}

/// Family tag of a pair interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InteractionKind {
    SoftCoulomb {
        strength: f64,
        epsilon: f64,
    },
    Gaussian {
        strength: f64,
        width: f64,
    },
    /// Lattice delta `g / a` on coinciding sites.
    Contact {
        strength: f64,
    },
    Constant {
        value: f64,
    },
    /// User-supplied even profile.
    Custom,
}

/// Even pair potential `v(x_i − x_j)`, stored by site offset.
#[derive(Debug, Clone, PartialEq)]
pub struct Interaction {
    kind: InteractionKind,
    profile: Vec<f64>,
    bound: f64,
}

impl Interaction {
    pub fn soft_coulomb(space: &LatticeSpace, strength: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidParameter(
                "soft-Coulomb epsilon must be positive".into(),
            ));
        }
        let p = (0..space.sites())
            .map(|d| strength / (space.displacement(d).powi(2) + epsilon * epsilon).sqrt())
            .collect();
        Self::build(space, InteractionKind::SoftCoulomb { strength, epsilon }, p)
    }

    pub fn gaussian(space: &LatticeSpace, strength: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::InvalidParameter(
                "gaussian width must be positive".into(),
            ));
        }
        let p = (0..space.sites())
            .map(|d| strength * (-(space.displacement(d) / width).powi(2) / 2.0).exp())
            .collect();
        Self::build(space, InteractionKind::Gaussian { strength, width }, p)
    }

    pub fn contact(space: &LatticeSpace, strength: f64) -> Result<Self> {
        let mut p = vec![0.0; space.sites()];
        p[0] = strength / space.spacing();
        Self::build(space, InteractionKind::Contact { strength }, p)
    }

    pub fn constant(space: &LatticeSpace, value: f64) -> Result<Self> {
        Self::build(
            space,
            InteractionKind::Constant { value },
            vec![value; space.sites()],
        )
    }

    pub fn zero(space: &LatticeSpace) -> Self {
        Self::constant(space, 0.0).expect("zero interaction is valid")
    }

    /// Even profile given by site offset `d = 0..M`.
    pub fn from_profile(space: &LatticeSpace, profile: Vec<f64>) -> Result<Self> {
        Self::build(space, InteractionKind::Custom, profile)
    }

    fn build(space: &LatticeSpace, kind: InteractionKind, profile: Vec<f64>) -> Result<Self> {
        let m = space.sites();
        if profile.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: profile.len(),
            });
        }
        if profile.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("interaction must be finite".into()));
        }
        let defect = (1..m)
            .map(|d| (profile[d] - profile[m - d]).abs())
            .fold(0.0, f64::max);
        if defect > 1e-14 * (1.0 + profile.iter().fold(0.0f64, |a, v| a.max(v.abs()))) {
            return Err(Error::OddInteraction { defect });
        }
        let bound = kinetic_bound(space, &profile);
        let vmax2 = profile.iter().fold(0.0f64, |a, v| a.max(v * v));
        // v² ≤ C (1 − Δ) as operators implies the pointwise witness below.
        assert!(
            vmax2 <= bound * (1.0 + space.max_kinetic_eigenvalue()) * (1.0 + 1e-12) + 1e-300,
            "interaction bound witness failed"
        );
        Ok(Self {
            kind,
            profile,
            bound,
        })
    }

    pub fn kind(&self) -> InteractionKind {
        self.kind
    }

    pub fn sites(&self) -> usize {
        self.profile.len()
    }

    /// `v` by site offset.
    pub fn profile(&self) -> &[f64] {
        &self.profile
    }

    /// `v(x_i − x_j)`.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        let m = self.profile.len();
        self.profile[(i + m - j % m) % m]
    }

    /// Smallest `C` with `v(x₁ − x₂)² ≤ C (1 − Δ₁)` on the lattice.
    pub fn kinetic_bound(&self) -> f64 {
        self.bound
    }

    pub fn is_zero(&self) -> bool {
        self.profile.iter().all(|&v| v == 0.0)
    }

    /// Two-body multiplication operator, `M² × M²` diagonal, pair index
    /// `x M + y`.
    pub fn pair_kernel(&self) -> CMatrix {
        let m = self.sites();
        let mut k = CMatrix::zeros(m * m, m * m);
        for x in 0..m {
            for y in 0..m {
                k[(x * m + y, x * m + y)] = C64::new(self.value(x, y), 0.0);
            }
        }
        k
    }
}

// λ_max((1−Δ)^{-1/2} diag(v²) (1−Δ)^{-1/2}); translation invariance makes
// the second particle a spectator.
fn kinetic_bound(space: &LatticeSpace, profile: &[f64]) -> f64 {
    let m = space.sites();
    let one_minus = RMatrix::identity(m, m) + space.neg_laplacian();
    let eig = SymmetricEigen::new(one_minus);
    let inv_sqrt = &eig.eigenvectors
        * RMatrix::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x.sqrt()))
        * eig.eigenvectors.transpose();
    let v2 = RMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        m,
        profile.iter().map(|v| v * v),
    ));
    let b = &inv_sqrt * v2 * &inv_sqrt;
    SymmetricEigen::new(b)
        .eigenvalues
        .iter()
        .fold(0.0f64, |a, &x| a.max(x))
}

/// `K₁ = q K̃₁ q` and `K₂ = (q ⊗ q) K̃₂` for a condensate `φ`, where
/// `K̃₁(x, y) = φ̄(y) v(x − y) φ(x)` and `K̃₂(x, y) = v(x − y) φ(x) φ(y)`.
/// `k2` is stored as the symmetric matrix of two-particle coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovKernels {
    pub k1: CMatrix,
    pub k2: CMatrix,
}

/// The physical setting shared by all flows: lattice, external potential
/// schedule and pair interaction.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub space: LatticeSpace,
    pub schedule: PotentialSchedule,
    pub interaction: Interaction,
}

impl Model {
    pub fn new(
        space: LatticeSpace,
        schedule: PotentialSchedule,
        interaction: Interaction,
    ) -> Result<Self> {
        let m = space.sites();
        if schedule.profile().len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: schedule.profile().len(),
            });
        }
        if interaction.sites() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: interaction.sites(),
            });
        }
        Ok(Self {
            space,
            schedule,
            interaction,
        })
    }

    pub fn sites(&self) -> usize {
        self.space.sites()
    }

    /// `h^t = −Δ + W^t`.
    pub fn one_body(&self, t: f64) -> CMatrix {
        let mut h = linalg::real_to_complex(self.space.neg_laplacian());
        for (j, w) in self.schedule.at(t).into_iter().enumerate() {
            h[(j, j)] += w;
        }
        h
    }

    /// `h^{t,φ} = h^t + v ∗ |φ|² − μ^φ`.
    pub fn hartree_hamiltonian(&self, phi: &OneBodyField, t: f64) -> CMatrix {
        self.hartree_hamiltonian_with(phi, t, true)
    }

    /// Same, optionally without the constant `−μ^φ`.
    pub fn hartree_hamiltonian_with(&self, phi: &OneBodyField, t: f64, chemical: bool) -> CMatrix {
        let mut h = self.one_body(t);
        let rho = mean_field_potential(&self.interaction, phi);
        let mu = if chemical {
            chemical_phase(&self.interaction, phi)
        } else {
            0.0
        };
        for (j, r) in rho.into_iter().enumerate() {
            h[(j, j)] += r - mu;
        }
        h
    }

    pub fn kernels(&self, phi: &OneBodyField) -> BogoliubovKernels {
        bogoliubov_kernels(&self.interaction, phi)
    }
}

/// `(v ∗ |φ|²)(x) = Σ_y v(x − y) |u_y|²`.
pub fn mean_field_potential(v: &Interaction, phi: &OneBodyField) -> Vec<f64> {
    let m = v.sites();
    let rho = phi.density();
    (0..m)
        .map(|x| (0..m).map(|y| v.value(x, y) * rho[y]).sum())
        .collect()
}

/// `μ^φ = ½ ∫ (v ∗ |φ|²) |φ|²`.
pub fn chemical_phase(v: &Interaction, phi: &OneBodyField) -> f64 {
    let conv = mean_field_potential(v, phi);
    0.5 * conv
        .iter()
        .zip(phi.density())
        .map(|(c, r)| c * r)
        .sum::<f64>()
}

/// `(p, q)` for a normalized field.
pub fn condensate_projectors(phi: &OneBodyField) -> Result<(CMatrix, CMatrix)> {
    let defect = phi.norm_defect();
    if defect > NORM_TOLERANCE {
        return Err(Error::NotNormalized { defect });
    }
    let p = phi.projector();
    let m = phi.sites();
    let q = CMatrix::identity(m, m) - &p;
    Ok((p, q))
}

pub fn bogoliubov_kernels(v: &Interaction, phi: &OneBodyField) -> BogoliubovKernels {
    let m = v.sites();
    let u = phi.amplitudes();
    let q = CMatrix::identity(m, m) - phi.projector();
    let k1t = CMatrix::from_fn(m, m, |x, y| u[x] * u[y].conj() * v.value(x, y));
    let k2t = CMatrix::from_fn(m, m, |x, y| u[x] * u[y] * v.value(x, y));
    let k1 = &q * k1t * &q;
    let k2 = &q * k2t * q.transpose();
    BogoliubovKernels { k1, k2 }
}

/// Lowest eigenvector of a Hermitian one-body matrix, phase fixed so that
/// the largest coefficient is real and positive.
pub fn lowest_orbital(h: &CMatrix) -> OneBodyField {
    let (_, vecs) = hermitian_eigen(h);
    let col: Vec<C64> = vecs.column(0).iter().copied().collect();
    fix_phase(col)
}

pub(crate) fn fix_phase(mut col: Vec<C64>) -> OneBodyField {
    let mut best = 0;
    for (i, c) in col.iter().enumerate() {
        if c.norm() > col[best].norm() + 1e-12 {
            best = i;
        }
    }
    let ph = col[best].conj() / col[best].norm();
    col.iter_mut().for_each(|c| *c *= ph);
    OneBodyField::normalized(col).expect("eigenvector is nonzero")
}

/// `(p ⊗ p)`, `(p ⊗ q)`, ... helpers.
pub(crate) fn pair_projector(a: &CMatrix, b: &CMatrix) -> CMatrix {
    kron(a, b)
}
