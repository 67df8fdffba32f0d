use super::hierarchy::{sample_grid, stages};
use super::ExcitationVector;
use crate::fock::operators::annihilate_mode;
use crate::fock::FockBasis;
use crate::hartree::HartreeTrajectory;
use crate::lattice::{BogoliubovKernels, Model};
use crate::linalg::dot;
use crate::prelude::*;

/// One-body density `γ_{xy} = ⟨χ, a†_y a_x χ⟩` and pairing matrix
/// `α_{xy} = ⟨χ, a_y a_x χ⟩` of an excitation vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationPair {
    pub gamma: CMatrix,
    pub alpha: CMatrix,
}

impl CorrelationPair {
    pub fn zeros(modes: usize) -> Self {
        Self {
            gamma: CMatrix::zeros(modes, modes),
            alpha: CMatrix::zeros(modes, modes),
        }
    }

    /// Largest entry difference in either matrix.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        crate::linalg::max_abs_diff(&self.gamma, &other.gamma)
            .max(crate::linalg::max_abs_diff(&self.alpha, &other.alpha))
    }

    fn axpy(&mut self, a: C64, x: &Self) {
        self.gamma += &x.gamma * a;
        self.alpha += &x.alpha * a;
    }
}

pub fn correlations_from_chi(chi: &ExcitationVector) -> CorrelationPair {
    let m = chi.modes();
    let mut out = CorrelationPair::zeros(m);
    for k in 1..=chi.k_max() {
        let low = chi.lowered(k);
        for x in 0..m {
            for y in 0..m {
                out.gamma[(x, y)] += dot(&low[y], &low[x]);
            }
        }
        if k >= 2 {
            let from = FockBasis::new(k - 1, m).expect("sector fits");
            let to = FockBasis::new(k - 2, m).expect("sector fits");
            let target = chi.sector(k - 2);
            for x in 0..m {
                for y in 0..m {
                    let w = annihilate_mode(y, &from, &to, &low[x]);
                    out.alpha[(x, y)] += dot(target, &w);
                }
            }
        }
    }
    out
}

/// `∂_t (γ, α)` for the quadratic generator with `A = h + K₁`, `K = K₂`:
///
/// * `i∂γ = Aγ − γA + K ᾱ − α K̄`
/// * `i∂α = Aα + α Aᵀ + K + K γᵀ + γ K`
pub fn pair_rhs(
    pair: &CorrelationPair,
    h: &CMatrix,
    kernels: &BogoliubovKernels,
) -> CorrelationPair {
    let a = h + &kernels.k1;
    let k = &kernels.k2;
    let g = &pair.gamma;
    let al = &pair.alpha;
    let i_dg = &a * g - g * &a + k * al.conjugate() - al * k.conjugate();
    let i_da = &a * al + al * a.transpose() + k + k * g.transpose() + g * k;
    let mi = C64::new(0.0, -1.0);
    CorrelationPair {
        gamma: i_dg * mi,
        alpha: i_da * mi,
    }
}

/// `‖α ᾱ − γ(1 + γ)‖_F`, zero for quasi-free pure states.
pub fn purity_defect(pair: &CorrelationPair) -> f64 {
    let m = pair.gamma.nrows();
    let id = CMatrix::identity(m, m);
    (&pair.alpha * pair.alpha.conjugate() - &pair.gamma * (id + &pair.gamma)).norm()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairSolution {
    pub times: Vec<f64>,
    pub states: Vec<CorrelationPair>,
}

/// RK4 for the pair equations on the Hartree trajectory grid, projecting
/// `γ → qγq`, `α → qαqᵀ` after each step.
pub fn evolve_pair(
    model: &Model,
    traj: &HartreeTrajectory,
    pair0: &CorrelationPair,
    t1: f64,
    dt: f64,
    sample_every: usize,
) -> Result<PairSolution> {
    let (steps, every) = sample_grid(t1, dt, sample_every)?;
    let mut x = pair0.clone();
    let mut times = vec![0.0];
    let mut states = vec![x.clone()];
    for j in 0..steps {
        let t = j as f64 * dt;
        let st = stages(model, traj, t, dt)?;
        let h = C64::new(dt, 0.0);
        let k1 = pair_rhs(&x, &st[0].h, &st[0].kernels);
        let mut y = x.clone();
        y.axpy(h / 2.0, &k1);
        let k2 = pair_rhs(&y, &st[1].h, &st[1].kernels);
        let mut y = x.clone();
        y.axpy(h / 2.0, &k2);
        let k3 = pair_rhs(&y, &st[1].h, &st[1].kernels);
        let mut y = x.clone();
        y.axpy(h, &k3);
        let k4 = pair_rhs(&y, &st[2].h, &st[2].kernels);
        x.axpy(h / 6.0, &k1);
        x.axpy(h / 3.0, &k2);
        x.axpy(h / 3.0, &k3);
        x.axpy(h / 6.0, &k4);
        let phi = traj.field_at(t + dt)?;
        let m = phi.sites();
        let q = CMatrix::identity(m, m) - phi.projector();
        x.gamma = &q * &x.gamma * &q;
        x.alpha = &q * &x.alpha * q.transpose();
        if x.gamma
            .iter()
            .chain(x.alpha.iter())
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::StepFailure {
                t: t + dt,
                reason: "non-finite pair".into(),
            });
        }
        if (j + 1) % every == 0 || j + 1 == steps {
            times.push(t + dt);
            states.push(x.clone());
        }
    }
    Ok(PairSolution { times, states })
}
