use meanfield_lab::config::{InitialKind, InteractionKind, Particles, RunConfig};
use meanfield_lab::scenario::{run_particles, run_scenario, Fluctuations, MeanField};
use meanfield_lab::sweep::{sweep_and_fit, Verdict};

fn small() -> RunConfig {
    let mut cfg = RunConfig {
        particles: Particles::Many(vec![3, 4, 5]),
        t1: 0.1,
        sample_every: 20,
        ..RunConfig::default()
    };
    cfg.lattice.sites = 4;
    cfg.lattice.length = Some(4.0);
    cfg
}

/// Mismatch between the exponential midpoint rule for `Ψ` and RK4 for `φ`
/// while the trap switches off; it scales as `dt²`.
const INTEGRATOR_FLOOR: f64 = 1e-5;

#[test]
fn no_interaction_means_no_distance() {
    let mut cfg = small();
    cfg.interaction.kind = InteractionKind::Zero;
    let sweep = sweep_and_fit(&cfg).unwrap();
    for run in &sweep.runs {
        for r in &run.reports {
            // H and H̃ coincide exactly
            assert_eq!(r.l2_full, 0.0);
            assert!(r.trace_dist < INTEGRATOR_FLOOR, "{}", r.trace_dist);
            assert!(r.energy_trace_dist < INTEGRATOR_FLOOR);
            assert!(r.chi_l2_sq < 1e-10);
            assert!(r.bog_l2 < INTEGRATOR_FLOOR);
            assert!(r.counting.iter().all(|c| *c < INTEGRATOR_FLOOR));
        }
    }
    assert!(sweep
        .rates
        .iter()
        .filter(|r| r.window.is_some())
        .all(|r| r.verdict == Verdict::Degenerate && r.slope.is_none()));
    assert!(sweep.passed());
}

#[test]
fn zero_duration_is_the_initial_state() {
    let cfg = RunConfig { t1: 0.0, ..small() };
    let runs = run_scenario(&cfg).unwrap();
    for run in &runs {
        assert_eq!(run.reports.len(), 1);
        let r = run.last();
        assert_eq!(r.t, 0.0);
        assert_eq!(r.l2_full, 0.0);
        assert!(r.trace_dist < 1e-13);
        assert!(r.chi_l2_sq < 1e-26);
        assert!(r.bog_l2 < 1e-13);
        assert!(r.counting[0] < 1e-13);
    }
}

#[test]
fn all_layers_share_the_sample_clock() {
    let cfg = small();
    let mf = MeanField::prepare(&cfg).unwrap();
    let chi0 = meanfield_core::bogoliubov::ExcitationVector::vacuum(4, cfg.hierarchy.k_max);
    let fl = Fluctuations::evolve(&cfg, &mf, &chi0).unwrap();
    assert_eq!(fl.hierarchy.times, fl.pair.times);
    let run = run_particles(&cfg, &mf, 4, Some(&fl)).unwrap();
    let times: Vec<f64> = run.reports.iter().map(|r| r.t).collect();
    assert_eq!(times, fl.hierarchy.times);
    assert_eq!(times.len(), 6);
    // every sample time is a node of the half-step Hartree grid
    for (j, t) in times.iter().enumerate() {
        let i = mf.traj.index_of(*t).unwrap();
        assert_eq!(i, 2 * j * cfg.sample_every);
        assert_eq!(mf.field_at(*t).unwrap(), &mf.traj.fields()[i]);
    }
}

#[test]
fn repeated_runs_agree_bitwise() {
    let cfg = small();
    let a = run_scenario(&cfg).unwrap();
    let b = run_scenario(&cfg).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.particles, y.particles);
        assert_eq!(x.reports, y.reports);
        assert_eq!(x.stats, y.stats);
    }
}

#[test]
fn shared_fluctuations_match_per_run_ones() {
    // the product state decomposes to the vacuum, so sharing is exact up to rounding
    let cfg = small();
    let mf = MeanField::prepare(&cfg).unwrap();
    let own = run_particles(&cfg, &mf, 4, None).unwrap();
    let shared = run_scenario(&cfg).unwrap();
    let shared = shared.iter().find(|r| r.particles == 4).unwrap();
    for (a, b) in own.reports.iter().zip(&shared.reports) {
        assert!((a.chi_l2_sq - b.chi_l2_sq).abs() < 1e-12);
        assert!((a.bog_l2 - b.bog_l2).abs() < 1e-10);
        assert_eq!(a.l2_full, b.l2_full);
    }
}

#[test]
fn truncation_failure_aborts_with_context() {
    let mut cfg = small();
    cfg.hierarchy.k_max = 2;
    cfg.hierarchy.k_max_limit = 2;
    let a = run_scenario(&cfg).unwrap_err();
    assert!(a.finished.is_empty() && a.completed.is_empty());
    assert!(a.error.to_string().contains("tail weight"), "{}", a.error);
}

#[test]
fn ground_state_runs_complete() {
    let cfg = RunConfig {
        initial: InitialKind::GroundState,
        ..small()
    };
    let sweep = sweep_and_fit(&cfg).unwrap();
    assert_eq!(sweep.runs.len(), 3);
    for run in &sweep.runs {
        let r = run.last();
        assert!(r.l2_full.is_finite() && r.l2_full > 0.0);
        assert!(r.pair_consistency < 1e-6);
        assert!(run
            .assumptions
            .clauses
            .iter()
            .all(|c| c.fitted_exponent.is_some()));
    }
}

#[test]
fn doubling_the_strength_keeps_the_exponents() {
    let base = sweep_and_fit(&RunConfig::default()).unwrap();
    let mut cfg = RunConfig::default();
    cfg.interaction.strength = 2.0;
    let doubled = sweep_and_fit(&cfg).unwrap();
    for (a, b) in base.rates.iter().zip(&doubled.rates) {
        if a.window.is_none() {
            continue;
        }
        assert_eq!(a.verdict, b.verdict, "{}", a.observable);
        let (sa, sb) = (a.slope.unwrap(), b.slope.unwrap());
        assert!((sa - sb).abs() < 0.15, "{}: {sa} vs {sb}", a.observable);
    }
    // stronger coupling, larger distance at every N
    let l2 = |s: &meanfield_lab::Sweep| s.rates[0].intercept.unwrap();
    assert!(l2(&doubled) > l2(&base) + 0.3);
}
