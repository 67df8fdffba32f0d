//! One trap-release run: Hartree, exact, Bogoliubov-truncated and
//! fluctuation layers on a shared clock.

use std::sync::Arc;

use meanfield_core::bogoliubov::{
    correlations_from_chi, evolve_hierarchy, evolve_pair, excitation_decompose, purity_defect,
    symmetric_reconstruct, ExcitationVector, HierarchySolution, PairSolution,
};
use meanfield_core::diagnostics::{
    check_assumptions_a2, energy_trace_norm_distance, trace_norm_distance, AssumptionReport,
    DistanceReport,
};
use meanfield_core::fock::{
    ground_state, parity_projectors, product_state, propagate, reduced_density, FockBasis,
    HamiltonianBuilder, ManyBodyState, PropagatorOptions, SectorResolution, WeightFunction,
};
use meanfield_core::hartree::{evolve_hartree, HartreeTrajectory};
use meanfield_core::lattice::{lowest_orbital, Model, OneBodyField};
use meanfield_core::linalg;

use crate::config::{InitialKind, RunConfig};
use crate::error::{LabError, Result};

/// Self-consistency tolerance for the trapped Hartree minimizer.
pub const SCF_TOLERANCE: f64 = 1e-13;
const SCF_MAX_ITER: usize = 2000;

/// Constant used for single-`N` assumption verdicts.
pub const ASSUMPTION_CONSTANT: f64 = 1.0;

/// Lowest self-consistent orbital of `h^{t,φ}`: iterate `φ ← lowest
/// eigenvector of h^{t,φ}` with even mixing.
pub fn hartree_minimizer(model: &Model, t: f64) -> Result<OneBodyField> {
    let mut phi = lowest_orbital(&model.one_body(t));
    let mut last = f64::INFINITY;
    for _ in 0..SCF_MAX_ITER {
        let next = lowest_orbital(&model.hartree_hamiltonian(&phi, t));
        last = linalg::distance(next.amplitudes(), phi.amplitudes());
        if last < SCF_TOLERANCE {
            return Ok(next);
        }
        let mixed = phi
            .amplitudes()
            .iter()
            .zip(next.amplitudes())
            .map(|(a, b)| (a + b) * 0.5)
            .collect();
        phi = OneBodyField::normalized(mixed)?;
    }
    Err(LabError::Setup(format!(
        "Hartree self-consistency stalled at {last:e} after {SCF_MAX_ITER} iterations"
    )))
}

/// The `N`-independent part of a run: model, initial orbital and the
/// Hartree trajectory on the half-step grid.
#[derive(Debug, Clone)]
pub struct MeanField {
    pub model: Model,
    pub phi0: OneBodyField,
    pub traj: HartreeTrajectory,
}

impl MeanField {
    pub fn prepare(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let model = cfg.model()?;
        let phi0 = hartree_minimizer(&model, 0.0)?;
        // every RK4 stage and every exponential midpoint sits on this grid
        let traj = evolve_hartree(&model, &phi0, cfg.t1, cfg.dt / 2.0)?;
        Ok(Self { model, phi0, traj })
    }

    pub fn field_at(&self, t: f64) -> Result<&OneBodyField> {
        Ok(self.traj.field_at(t)?)
    }
}

/// Bogoliubov hierarchy and pair equations from one initial `χ₀`.
#[derive(Debug, Clone)]
pub struct Fluctuations {
    pub hierarchy: HierarchySolution,
    pub pair: PairSolution,
}

impl Fluctuations {
    pub fn evolve(cfg: &RunConfig, mf: &MeanField, chi0: &ExcitationVector) -> Result<Self> {
        let hierarchy = evolve_hierarchy(
            &mf.model,
            &mf.traj,
            chi0,
            cfg.t1,
            cfg.dt,
            cfg.sample_every,
            &cfg.hierarchy.options(),
        )?;
        let pair = evolve_pair(
            &mf.model,
            &mf.traj,
            &correlations_from_chi(chi0),
            cfg.t1,
            cfg.dt,
            cfg.sample_every,
        )?;
        Ok(Self { hierarchy, pair })
    }
}

/// `Ψ₀` for `N` particles.
pub fn initial_state(cfg: &RunConfig, mf: &MeanField, n: usize) -> Result<ManyBodyState> {
    let basis = Arc::new(FockBasis::with_cap(n, mf.model.sites(), cfg.dimension_cap)?);
    match cfg.initial {
        InitialKind::Product => Ok(product_state(mf.phi0.amplitudes(), basis)),
        InitialKind::GroundState => {
            let b = HamiltonianBuilder::new(mf.model.clone(), basis.clone())?;
            let (_, psi) = ground_state(&b.full(0.0), basis)?;
            Ok(psi)
        }
    }
}

/// Integrity numbers collected along a run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunStats {
    pub k_max: usize,
    pub tail_weight: f64,
    pub hartree_norm_drift: f64,
    pub hierarchy_norm_drift: f64,
    pub full_norm_drift: f64,
    pub tilde_norm_drift: f64,
    pub krylov_error: f64,
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub particles: usize,
    pub reports: Vec<DistanceReport>,
    pub assumptions: AssumptionReport,
    pub stats: RunStats,
}

impl ScenarioRun {
    pub fn last(&self) -> &DistanceReport {
        self.reports
            .last()
            .expect("a run has at least the t = 0 report")
    }
}

/// A run that stopped early, with the reports completed before the error.
#[derive(Debug)]
pub struct Aborted {
    pub particles: usize,
    pub completed: Vec<DistanceReport>,
    /// Other particle numbers that did finish.
    pub finished: Vec<ScenarioRun>,
    pub error: LabError,
}

impl From<Aborted> for LabError {
    fn from(a: Aborted) -> Self {
        a.error
    }
}

struct Snapshot<'a> {
    t: f64,
    psi: &'a ManyBodyState,
    tilde: &'a ManyBodyState,
    phi: &'a OneBodyField,
    chi: &'a ExcitationVector,
    pair: &'a meanfield_core::bogoliubov::CorrelationPair,
    even0: f64,
}

fn distance_report(mf: &MeanField, s: &Snapshot) -> Result<DistanceReport> {
    let n = s.psi.particles();
    let gamma = reduced_density(s.psi, 1)?;
    let chi_tilde = excitation_decompose(s.tilde, s.phi)?;
    let bog = symmetric_reconstruct(&s.chi.resized(n), s.phi, n)?;
    let res = SectorResolution::new(s.phi, s.psi)?;
    let mut counting = [f64::NAN; 3];
    for (r, c) in counting.iter_mut().enumerate() {
        if r < n {
            *c = res.expectation(&WeightFunction::falling(n, r + 1)).max(0.0);
        }
    }
    let (odd, even) = parity_projectors(s.phi, s.tilde)?;
    Ok(DistanceReport {
        t: s.t,
        l2_full: s.psi.distance(s.tilde),
        trace_dist: trace_norm_distance(&gamma, s.phi),
        energy_trace_dist: energy_trace_norm_distance(&mf.model.space, &gamma, s.phi),
        chi_l2_sq: chi_tilde.distance_sq(s.chi, n),
        bog_l2: bog.distance(s.psi),
        counting,
        parity_odd_tilde: odd.norm(),
        parity_defect: (even.norm().powi(2) - s.even0).abs(),
        pair_consistency: correlations_from_chi(s.chi).max_abs_diff(s.pair),
        purity_defect: purity_defect(s.pair),
    })
}

/// Run all layers for `N` particles, reusing `fluct` when given (it must
/// come from the same `χ₀`).
pub fn run_particles(
    cfg: &RunConfig,
    mf: &MeanField,
    n: usize,
    fluct: Option<&Fluctuations>,
) -> std::result::Result<ScenarioRun, Aborted> {
    let mut completed = Vec::new();
    let abort = |completed: Vec<DistanceReport>, error: LabError| Aborted {
        particles: n,
        completed,
        finished: Vec::new(),
        error,
    };
    let setup = (|| -> Result<_> {
        let psi0 = initial_state(cfg, mf, n)?;
        let assumptions = check_assumptions_a2(&mf.model, &psi0, &mf.phi0, ASSUMPTION_CONSTANT)?;
        let owned = match fluct {
            Some(_) => None,
            None => {
                let chi0 = excitation_decompose(&psi0, &mf.phi0)?;
                Some(Fluctuations::evolve(cfg, mf, &chi0)?)
            }
        };
        Ok((psi0, assumptions, owned))
    })();
    let (psi0, assumptions, owned) = match setup {
        Ok(x) => x,
        Err(e) => return Err(abort(completed, e)),
    };
    let fl = owned.as_ref().or(fluct).expect("fluctuations available");
    let builder = match HamiltonianBuilder::new(mf.model.clone(), psi0.basis().clone()) {
        Ok(b) => b,
        Err(e) => return Err(abort(completed, e.into())),
    };
    let opts = PropagatorOptions::default();
    let hier = &fl.hierarchy;
    let even0 = match parity_projectors(&mf.phi0, &psi0) {
        Ok((_, e)) => e.norm().powi(2),
        Err(e) => return Err(abort(completed, e.into())),
    };
    let mut stats = RunStats {
        k_max: hier.k_max,
        tail_weight: hier.tail_weight,
        hartree_norm_drift: mf.traj.max_norm_drift(),
        hierarchy_norm_drift: hier.max_norm_drift,
        ..Default::default()
    };
    let mut psi = psi0.clone();
    let mut tilde = psi0;
    let mut t = 0.0;
    for (i, &ts) in hier.times.iter().enumerate() {
        let step = (|| -> Result<DistanceReport> {
            if ts > t {
                let (p, rep) = propagate(&psi, |s| Ok(builder.full(s)), t, ts, cfg.dt, &opts)?;
                stats.krylov_error = stats.krylov_error.max(rep.error_estimate);
                let (q, rep) = propagate(
                    &tilde,
                    |s| builder.tilde(s, mf.traj.field_at(s)?),
                    t,
                    ts,
                    cfg.dt,
                    &opts,
                )?;
                stats.krylov_error = stats.krylov_error.max(rep.error_estimate);
                psi = p;
                tilde = q;
                t = ts;
            }
            stats.full_norm_drift = stats.full_norm_drift.max((psi.norm() - 1.0).abs());
            stats.tilde_norm_drift = stats.tilde_norm_drift.max((tilde.norm() - 1.0).abs());
            distance_report(
                mf,
                &Snapshot {
                    t: ts,
                    psi: &psi,
                    tilde: &tilde,
                    phi: mf.field_at(ts)?,
                    chi: &hier.states[i],
                    pair: &fl.pair.states[i],
                    even0,
                },
            )
        })();
        match step {
            Ok(r) => completed.push(r),
            Err(e) => return Err(abort(completed, e)),
        }
    }
    Ok(ScenarioRun {
        particles: n,
        reports: completed,
        assumptions,
        stats,
    })
}

/// All layers for every configured `N`. Product initial data share one
/// fluctuation layer (its `χ₀` is the vacuum for every `N`); particle
/// numbers run in parallel.
pub fn run_scenario(cfg: &RunConfig) -> std::result::Result<Vec<ScenarioRun>, Aborted> {
    use rayon::prelude::*;
    let ns = cfg.particle_list();
    let early = |e: LabError| Aborted {
        particles: ns.first().copied().unwrap_or(0),
        completed: Vec::new(),
        finished: Vec::new(),
        error: e,
    };
    let mf = MeanField::prepare(cfg).map_err(early)?;
    let shared = match cfg.initial {
        InitialKind::Product => {
            let vac = ExcitationVector::vacuum(mf.model.sites(), cfg.hierarchy.k_max);
            Some(Fluctuations::evolve(cfg, &mf, &vac).map_err(early)?)
        }
        InitialKind::GroundState => None,
    };
    let runs: Vec<_> = ns
        .par_iter()
        .map(|&n| run_particles(cfg, &mf, n, shared.as_ref()))
        .collect();
    let mut finished = Vec::new();
    let mut failed = None;
    for r in runs {
        match r {
            Ok(run) => finished.push(run),
            Err(a) if failed.is_none() => failed = Some(a),
            Err(_) => {}
        }
    }
    match failed {
        None => Ok(finished),
        Some(mut a) => {
            a.finished = finished;
            Err(a)
        }
    }
}
