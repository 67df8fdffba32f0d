use crate::fock::operators::{annihilate, annihilate_mode, create};
use crate::fock::{FockBasis, ManyBodyState, ModeRotation, Transitions};
use crate::lattice::OneBodyField;
use crate::linalg;
use crate::prelude::*;

/// Slot-orthogonality tolerance for [`symmetric_reconstruct`].
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-8;

/// Residual `φ`-occupation, relative to `‖χ‖`, left by the per-step
/// re-projection.
pub const PROJECTION_CUTOFF: f64 = 1e-15;

/// Excitation sectors `0..=k_max` over `M` modes, with the transition
/// tables used by the hierarchy generators.
#[derive(Debug, Clone)]
pub struct ExcitationSpace {
    modes: usize,
    bases: Vec<Arc<FockBasis>>,
    one_body: Vec<Transitions>,
    // creation[k]: a†a† from sector k − 2 into sector k (empty for k < 2);
    // only valid for symmetric kernels
    creation: Vec<Transitions>,
}

impl ExcitationSpace {
    pub fn new(modes: usize, k_max: usize) -> Result<Self> {
        let bases: Vec<Arc<FockBasis>> = (0..=k_max)
            .map(|k| FockBasis::new(k, modes).map(Arc::new))
            .collect::<Result<_>>()?;
        let one_body = bases.iter().map(|b| Transitions::one_body(b)).collect();
        let creation = (0..=k_max)
            .map(|k| {
                if k < 2 {
                    Transitions::default()
                } else {
                    Transitions::symmetric_pair_creation(&bases[k - 2], &bases[k])
                }
            })
            .collect();
        Ok(Self {
            modes,
            bases,
            one_body,
            creation,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn k_max(&self) -> usize {
        self.bases.len() - 1
    }

    pub fn basis(&self, k: usize) -> &Arc<FockBasis> {
        &self.bases[k]
    }

    pub(crate) fn one_body(&self, k: usize) -> &Transitions {
        &self.one_body[k]
    }

    pub(crate) fn creation(&self, k: usize) -> &Transitions {
        &self.creation[k]
    }

    /// Total number of stored amplitudes.
    pub fn total_dim(&self) -> usize {
        self.bases.iter().map(|b| b.dim()).sum()
    }
}

/// `χ = (χ^(0), …, χ^(k_max))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationVector {
    modes: usize,
    sectors: Vec<Vec<C64>>,
}

impl ExcitationVector {
    pub fn new(modes: usize, sectors: Vec<Vec<C64>>) -> Result<Self> {
        for (k, s) in sectors.iter().enumerate() {
            let d = crate::fock::sector_dimension(k, modes);
            if s.len() as u128 != d {
                return Err(Error::DimensionMismatch {
                    expected: d as usize,
                    found: s.len(),
                });
            }
        }
        Ok(Self { modes, sectors })
    }

    /// `χ = (1, 0, 0, …)`.
    pub fn vacuum(modes: usize, k_max: usize) -> Self {
        let mut v = Self::zeros(modes, k_max);
        v.sectors[0][0] = C64::new(1.0, 0.0);
        v
    }

    pub fn zeros(modes: usize, k_max: usize) -> Self {
        Self {
            modes,
            sectors: (0..=k_max)
                .map(|k| vec![C64::new(0.0, 0.0); crate::fock::sector_dimension(k, modes) as usize])
                .collect(),
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn k_max(&self) -> usize {
        self.sectors.len() - 1
    }

    pub fn sector(&self, k: usize) -> &[C64] {
        &self.sectors[k]
    }

    pub fn sector_mut(&mut self, k: usize) -> &mut Vec<C64> {
        &mut self.sectors[k]
    }

    pub fn sectors(&self) -> &[Vec<C64>] {
        &self.sectors
    }

    /// `‖χ^(k)‖²` for every `k`.
    pub fn sector_weights(&self) -> Vec<f64> {
        self.sectors.iter().map(|s| linalg::norm_sqr(s)).collect()
    }

    pub fn norm(&self) -> f64 {
        self.sector_weights().iter().sum::<f64>().sqrt()
    }

    /// Keep sectors `0..=k_max` (padding with zeros if needed).
    pub fn resized(&self, k_max: usize) -> Self {
        let mut out = Self::zeros(self.modes, k_max);
        for k in 0..=k_max.min(self.k_max()) {
            out.sectors[k].copy_from_slice(&self.sectors[k]);
        }
        out
    }

    /// `Σ_{k ≤ upto} ‖χ^(k) − ξ^(k)‖²`, missing sectors counted as zero.
    pub fn distance_sq(&self, other: &Self, upto: usize) -> f64 {
        let zero = |v: &Vec<C64>| linalg::norm_sqr(v);
        (0..=upto)
            .map(|k| match (self.sectors.get(k), other.sectors.get(k)) {
                (Some(a), Some(b)) => linalg::distance(a, b).powi(2),
                (Some(a), None) | (None, Some(a)) => zero(a),
                (None, None) => 0.0,
            })
            .sum()
    }

    /// `‖a(φ) χ^(k)‖ / √k` per sector (zero for `k = 0`): the overlap of
    /// a slot with `φ`.
    pub fn slot_overlaps(&self, phi: &OneBodyField) -> Vec<f64> {
        let mut out = vec![0.0];
        for k in 1..=self.k_max() {
            let from = FockBasis::new(k, self.modes).expect("sector fits");
            let to = FockBasis::new(k - 1, self.modes).expect("sector fits");
            let a = annihilate(phi.amplitudes(), &from, &to, &self.sectors[k]);
            out.push(linalg::norm(&a) / (k as f64).sqrt());
        }
        out
    }

    pub fn slot_orthogonality_defect(&self, phi: &OneBodyField) -> f64 {
        self.slot_overlaps(phi).into_iter().fold(0.0, f64::max)
    }

    /// Dense symmetric array of `χ^(k)` on `(ℂ^M)^{⊗k}`.
    pub fn symmetric_array(&self, k: usize) -> Result<Vec<C64>> {
        if k == 0 {
            return Ok(vec![self.sectors[0][0]]);
        }
        let basis = Arc::new(FockBasis::new(k, self.modes)?);
        let t = crate::tensor::TensorSpace::new(k, self.modes)?;
        Ok(t.embed(&ManyBodyState::new(basis, self.sectors[k].clone())?))
    }

    pub(crate) fn axpy(&mut self, a: C64, x: &Self) {
        for (s, xs) in self.sectors.iter_mut().zip(&x.sectors) {
            linalg::axpy(a, xs, s);
        }
    }

    /// Apply `q` in every slot of every sector. On sector `k` the projector
    /// onto zero `φ`-occupation is `Π_{j=1..k} (1 − n_φ / j)` with
    /// `n_φ = dΓ(|φ⟩⟨φ|)`; the product stops once `‖n_φ χ^(k)‖` falls below
    /// [`PROJECTION_CUTOFF`] times `‖χ‖`.
    pub(crate) fn project_out(&mut self, phi: &OneBodyField, space: &ExcitationSpace) {
        let u = phi.amplitudes();
        let m = u.len();
        let mut p = Vec::with_capacity(m * m);
        for x in 0..m {
            for y in 0..m {
                p.push(u[x] * u[y].conj());
            }
        }
        let cutoff = PROJECTION_CUTOFF * self.norm();
        for k in 1..=self.k_max() {
            let x = &mut self.sectors[k];
            if linalg::norm(x) == 0.0 {
                continue;
            }
            let mut nx = vec![C64::new(0.0, 0.0); x.len()];
            for j in 1..=k {
                nx.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
                space.one_body(k).apply_add(&p, x, &mut nx);
                if linalg::norm(&nx) <= cutoff {
                    break;
                }
                linalg::axpy(C64::new(-1.0 / j as f64, 0.0), &nx, x);
            }
        }
    }

    /// `γ`-style helpers: `a_x χ^(k)` for every mode.
    pub(crate) fn lowered(&self, k: usize) -> Vec<Vec<C64>> {
        let from = FockBasis::new(k, self.modes).expect("sector fits");
        let to = FockBasis::new(k - 1, self.modes).expect("sector fits");
        (0..self.modes)
            .map(|x| annihilate_mode(x, &from, &to, &self.sectors[k]))
            .collect()
    }
}

/// `χ^(k) = (1/√(N−k)!) Γ_k(q) a(φ)^{N−k} Ψ`, computed by rotating `φ` to
/// the first mode and reading off the blocks with `N − k` condensed
/// particles.
pub fn excitation_decompose(psi: &ManyBodyState, phi: &OneBodyField) -> Result<ExcitationVector> {
    let basis = psi.basis();
    let n = basis.particles();
    let m = basis.modes();
    if phi.sites() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: phi.sites(),
        });
    }
    let defect = phi.norm_defect();
    if defect > crate::lattice::NORM_TOLERANCE {
        return Err(Error::NotNormalized { defect });
    }
    let rot = ModeRotation::aligning(phi.amplitudes());
    let r = rot.apply(basis, psi.amplitudes());
    let mut out = ExcitationVector::zeros(m, n);
    let sub: Vec<FockBasis> = (0..=n)
        .map(|k| FockBasis::new(k, m))
        .collect::<Result<_>>()?;
    let mut occ = vec![0u8; m];
    for (s, &a) in r.iter().enumerate() {
        occ.copy_from_slice(basis.occupation(s));
        let k = n - occ[0] as usize;
        occ[0] = 0;
        out.sectors[k][sub[k].rank(&occ)] = a;
    }
    for k in 1..=n {
        out.sectors[k] = rot.apply_inverse(&sub[k], &out.sectors[k]);
    }
    Ok(out)
}

/// `Ψ = Σ_k φ^{⊗(N−k)} ⊗_s χ^(k) = Σ_k (a†(φ))^{N−k} / √(N−k)! χ^(k)`.
/// Sectors above `N` must vanish.
pub fn symmetric_reconstruct(
    chi: &ExcitationVector,
    phi: &OneBodyField,
    particles: usize,
) -> Result<ManyBodyState> {
    let m = chi.modes();
    let overlaps = chi.slot_overlaps(phi);
    if let Some((k, &defect)) = overlaps
        .iter()
        .enumerate()
        .find(|(_, &d)| d > ORTHOGONALITY_TOLERANCE)
    {
        return Err(Error::NotOrthogonal { k, defect });
    }
    for k in particles + 1..=chi.k_max() {
        if linalg::norm(chi.sector(k)) > ORTHOGONALITY_TOLERANCE {
            return Err(Error::SectorOutOfRange { k, particles });
        }
    }
    let bases: Vec<FockBasis> = (0..=particles)
        .map(|k| FockBasis::new(k, m))
        .collect::<Result<_>>()?;
    let mut out = vec![C64::new(0.0, 0.0); bases[particles].dim()];
    for k in 0..=particles.min(chi.k_max()) {
        let mut x = chi.sector(k).to_vec();
        if linalg::norm(&x) == 0.0 {
            continue;
        }
        for j in k..particles {
            x = create(phi.amplitudes(), &bases[j], &bases[j + 1], &x);
            linalg::scale(C64::new(1.0 / ((j - k + 1) as f64).sqrt(), 0.0), &mut x);
        }
        linalg::axpy(C64::new(1.0, 0.0), &x, &mut out);
    }
    ManyBodyState::new(Arc::new(bases.into_iter().last().expect("nonempty")), out)
}
