use super::{ExcitationSpace, ExcitationVector};
use crate::hartree::HartreeTrajectory;
use crate::lattice::{BogoliubovKernels, Model};
use crate::prelude::*;

/// Which generator drives the excitation vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HierarchyKind {
    /// The `N → ∞` limit: `dΓ(h + K₁) + ½∫K₂ a†a† + ½∫K̄₂ aa`.
    Bogoliubov,
    /// The exact image of `H̃` for `N` particles.
    Finite { particles: usize },
}

impl HierarchyKind {
    // (one-body K₁ factor, creation factor into k, annihilation factor into k)
    fn coefficients(self, k: usize) -> (f64, f64, f64) {
        match self {
            HierarchyKind::Bogoliubov => (1.0, 1.0, 1.0),
            HierarchyKind::Finite { particles: n } => {
                let (nf, kf) = (n as f64, k as f64);
                let lam = 1.0 / (nf - 1.0);
                let c1 = if k <= n { (nf - kf) * lam } else { 0.0 };
                let cre = if k >= 2 && k <= n {
                    ((nf - kf + 2.0) * (nf - kf + 1.0)).sqrt() * lam
                } else {
                    0.0
                };
                let ann = if k + 2 <= n {
                    ((nf - kf) * (nf - kf - 1.0)).sqrt() * lam
                } else {
                    0.0
                };
                (c1, cre, ann)
            }
        }
    }
}

/// Evolution settings for the Bogoliubov hierarchy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HierarchyOptions {
    /// Initial truncation order.
    pub k_max: usize,
    /// Largest truncation the adaptive loop may reach.
    pub k_max_limit: usize,
    /// Bound on the weight of the two highest sectors over the run.
    pub tail_tolerance: f64,
}

impl Default for HierarchyOptions {
    fn default() -> Self {
        Self {
            k_max: 8,
            k_max_limit: 24,
            tail_tolerance: 1e-14,
        }
    }
}

/// Sampled trajectory of an excitation vector.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchySolution {
    pub times: Vec<f64>,
    pub states: Vec<ExcitationVector>,
    pub k_max: usize,
    /// Largest weight seen in the two highest sectors (plus any initial
    /// weight cut off by the truncation).
    pub tail_weight: f64,
    /// Largest `|‖χ_t‖ − ‖χ_0‖|`.
    pub max_norm_drift: f64,
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

fn apply_generator(
    space: &ExcitationSpace,
    kind: HierarchyKind,
    chi: &ExcitationVector,
    h: &CMatrix,
    kern: &BogoliubovKernels,
) -> ExcitationVector {
    let kmax = chi.k_max().min(space.k_max());
    let mut out = ExcitationVector::zeros(chi.modes(), chi.k_max());
    let half_k2 = flatten(&(&kern.k2 * C64::new(0.5, 0.0)));
    for k in 0..=kmax {
        let (c1, cre, ann) = kind.coefficients(k);
        let a = flatten(&(h + &kern.k1 * C64::new(c1, 0.0)));
        let (head, tail) = (chi.sectors(), out.sector_mut(k));
        space.one_body(k).apply_add(&a, &head[k], tail);
        if k >= 2 && cre != 0.0 {
            let kk: Vec<C64> = half_k2.iter().map(|z| z * cre).collect();
            space.creation(k).apply_add(&kk, &head[k - 2], tail);
        }
        if k + 2 <= kmax && ann != 0.0 {
            let kk: Vec<C64> = half_k2.iter().map(|z| z * ann).collect();
            space
                .creation(k + 2)
                .apply_adjoint_add(&kk, &head[k + 2], tail);
        }
    }
    out
}

fn times_minus_i(mut v: ExcitationVector) -> ExcitationVector {
    for k in 0..=v.k_max() {
        v.sector_mut(k)
            .iter_mut()
            .for_each(|z| *z *= C64::new(0.0, -1.0));
    }
    v
}

/// `∂_t χ = −i [dΓ(h + K₁) χ + ½ K₂ a†a† χ + ½ K̄₂ aa χ]`, sector by sector,
/// truncated at `χ.k_max()`.
pub fn bogoliubov_rhs(
    space: &ExcitationSpace,
    chi: &ExcitationVector,
    h: &CMatrix,
    kernels: &BogoliubovKernels,
) -> ExcitationVector {
    times_minus_i(apply_generator(
        space,
        HierarchyKind::Bogoliubov,
        chi,
        h,
        kernels,
    ))
}

/// `∂_t χ̃` for the exact `N`-particle hierarchy of `H̃`:
/// one-body part `h + (N−k)/(N−1) K₁`, creation from `k − 2` with
/// `√((N−k+2)(N−k+1))/(N−1)`, annihilation from `k + 2` with
/// `√((N−k)(N−k−1))/(N−1)`.
pub fn finite_hierarchy_rhs(
    space: &ExcitationSpace,
    chi: &ExcitationVector,
    particles: usize,
    h: &CMatrix,
    kernels: &BogoliubovKernels,
) -> ExcitationVector {
    times_minus_i(apply_generator(
        space,
        HierarchyKind::Finite { particles },
        chi,
        h,
        kernels,
    ))
}

pub(crate) struct Stage {
    pub h: CMatrix,
    pub kernels: BogoliubovKernels,
}

/// Generator data at the three RK4 stage times of the step starting at `t`.
pub(crate) fn stages(
    model: &Model,
    traj: &HartreeTrajectory,
    t: f64,
    dt: f64,
) -> Result<[Stage; 3]> {
    let at = |s: f64| -> Result<Stage> {
        let phi = traj.field_at(s)?;
        Ok(Stage {
            h: model.hartree_hamiltonian(phi, s),
            kernels: model.kernels(phi),
        })
    };
    Ok([at(t)?, at(t + dt / 2.0)?, at(t + dt)?])
}

pub(crate) fn sample_grid(t1: f64, dt: f64, every: usize) -> Result<(usize, usize)> {
    let steps = crate::fock::step_count_pub(0.0, t1, dt)?;
    if every == 0 {
        return Err(Error::InvalidParameter(
            "sampling stride must be positive".into(),
        ));
    }
    Ok((steps, every))
}

fn run(
    model: &Model,
    traj: &HartreeTrajectory,
    chi0: &ExcitationVector,
    kind: HierarchyKind,
    k_max: usize,
    t1: f64,
    dt: f64,
    every: usize,
    abort_above: f64,
) -> Result<HierarchySolution> {
    let (steps, every) = sample_grid(t1, dt, every)?;
    let space = ExcitationSpace::new(chi0.modes(), k_max)?;
    let lost: f64 = chi0.sector_weights().iter().skip(k_max + 1).sum();
    let mut chi = chi0.resized(k_max);
    let n0 = chi.norm();
    let top = |c: &ExcitationVector| {
        let w = c.sector_weights();
        w[k_max] + if k_max >= 1 { w[k_max - 1] } else { 0.0 }
    };
    let mut tail = lost + top(&chi);
    let mut drift = 0.0f64;
    let mut times = vec![0.0];
    let mut states = vec![chi.clone()];
    let f = |x: &ExcitationVector, s: &Stage| {
        times_minus_i(apply_generator(&space, kind, x, &s.h, &s.kernels))
    };
    for j in 0..steps {
        let t = j as f64 * dt;
        let st = stages(model, traj, t, dt)?;
        let h = C64::new(dt, 0.0);
        let k1 = f(&chi, &st[0]);
        let mut x = chi.clone();
        x.axpy(h / 2.0, &k1);
        let k2 = f(&x, &st[1]);
        let mut x = chi.clone();
        x.axpy(h / 2.0, &k2);
        let k3 = f(&x, &st[1]);
        let mut x = chi.clone();
        x.axpy(h, &k3);
        let k4 = f(&x, &st[2]);
        chi.axpy(h / 6.0, &k1);
        chi.axpy(h / 3.0, &k2);
        chi.axpy(h / 3.0, &k3);
        chi.axpy(h / 6.0, &k4);
        chi.project_out(traj.field_at(t + dt)?, &space);
        let nrm = chi.norm();
        if !nrm.is_finite() {
            return Err(Error::StepFailure {
                t: t + dt,
                reason: "non-finite excitation vector".into(),
            });
        }
        drift = drift.max((nrm - n0).abs());
        tail = tail.max(lost + top(&chi));
        if tail > abort_above {
            // the caller will retry with a larger truncation
            break;
        }
        if (j + 1) % every == 0 || j + 1 == steps {
            times.push(t + dt);
            states.push(chi.clone());
        }
    }
    Ok(HierarchySolution {
        times,
        states,
        k_max,
        tail_weight: tail,
        max_norm_drift: drift,
    })
}

/// RK4 for the Bogoliubov hierarchy with kernels from the Hartree
/// trajectory at `t`, `t + dt/2`, `t + dt` (which must be grid points).
/// The truncation grows by two until the tail weight is below tolerance.
pub fn evolve_hierarchy(
    model: &Model,
    traj: &HartreeTrajectory,
    chi0: &ExcitationVector,
    t1: f64,
    dt: f64,
    sample_every: usize,
    opts: &HierarchyOptions,
) -> Result<HierarchySolution> {
    let mut k = opts.k_max.max(2);
    loop {
        let last = k + 2 > opts.k_max_limit;
        let abort = if last {
            f64::INFINITY
        } else {
            opts.tail_tolerance
        };
        let sol = run(
            model,
            traj,
            chi0,
            HierarchyKind::Bogoliubov,
            k,
            t1,
            dt,
            sample_every,
            abort,
        )?;
        if sol.tail_weight <= opts.tail_tolerance {
            return Ok(sol);
        }
        if last {
            return Err(Error::TruncationInsufficient {
                k_max: k,
                tail: sol.tail_weight,
                bound: opts.tail_tolerance,
            });
        }
        k += 2;
    }
}

/// RK4 for the exact `N`-particle hierarchy (`k_max = N`).
pub fn evolve_finite_hierarchy(
    model: &Model,
    traj: &HartreeTrajectory,
    chi0: &ExcitationVector,
    particles: usize,
    t1: f64,
    dt: f64,
    sample_every: usize,
) -> Result<HierarchySolution> {
    if particles < 2 {
        return Err(Error::TooFewParticles(particles));
    }
    run(
        model,
        traj,
        chi0,
        HierarchyKind::Finite { particles },
        particles,
        t1,
        dt,
        sample_every,
        f64::INFINITY,
    )
}
