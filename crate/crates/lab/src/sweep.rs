//! Log-log rate fits across particle numbers.

use meanfield_core::diagnostics::{
    fit_assumption_exponents, log_log_slope, DistanceReport, ASSUMPTION_EXPONENT_SLACK,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{LabError, Result};
use crate::scenario::{run_scenario, ScenarioRun};

/// Values at or below this are treated as integrator noise; a fit whose
/// points all sit there is reported as degenerate.
pub const NOISE_FLOOR: f64 = 1e-10;

/// A spread of `ln(value)` across `N` below this is treated as constant:
/// the observable carries no rate (e.g. an integrator floor at `v = 0`).
pub const LOG_SPREAD_FLOOR: f64 = 1e-6;

/// A fitted observable and the window its slope must fall in.
#[derive(Debug, Clone, Copy)]
pub struct Observable {
    pub name: &'static str,
    pub expected: f64,
    /// `None` for report-only observables.
    pub window: Option<(f64, f64)>,
    pub extract: fn(&DistanceReport) -> f64,
}

/// The fitted observables with their acceptance windows.
pub const OBSERVABLES: [Observable; 8] = [
    Observable {
        name: "l2_full",
        expected: -0.5,
        window: Some((-0.80, -0.30)),
        extract: |r| r.l2_full,
    },
    Observable {
        name: "trace_dist",
        expected: -1.0,
        window: Some((-1.35, -0.70)),
        extract: |r| r.trace_dist,
    },
    Observable {
        name: "energy_trace_dist",
        expected: -0.5,
        window: Some((-0.85, -0.25)),
        extract: |r| r.energy_trace_dist,
    },
    Observable {
        name: "chi_l2_sq",
        expected: -1.0,
        window: Some((-1.40, -0.65)),
        extract: |r| r.chi_l2_sq,
    },
    Observable {
        name: "counting_1",
        expected: -1.0,
        window: Some((-1.5, -0.5)),
        extract: |r| r.counting[0],
    },
    Observable {
        name: "counting_2",
        expected: -2.0,
        window: Some((-2.5, -1.5)),
        extract: |r| r.counting[1],
    },
    Observable {
        name: "counting_3",
        expected: -3.0,
        window: Some((-3.5, -2.5)),
        extract: |r| r.counting[2],
    },
    Observable {
        name: "bog_l2",
        expected: -0.5,
        window: None,
        extract: |r| r.bog_l2,
    },
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Zero variance or values at the noise floor; not a failure.
    Degenerate,
    /// No window configured.
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePoint {
    pub particles: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub observable: String,
    pub expected_exponent: f64,
    pub window: Option<[f64; 2]>,
    pub points: Vec<RatePoint>,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// RMS residual of the fit in `log` units.
    pub residual: Option<f64>,
    pub verdict: Verdict,
}

impl RateReport {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

/// Fit one observable over `(N, value)` pairs.
pub fn fit_observable(obs: &Observable, points: Vec<RatePoint>) -> Result<RateReport> {
    if points.len() < 3 {
        return Err(LabError::TooFewPoints(points.len()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.particles as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.value).collect();
    let usable = ys
        .iter()
        .filter(|y| y.is_finite() && **y > NOISE_FLOOR)
        .count();
    let logs = ys.iter().map(|y| y.ln());
    let spread =
        logs.clone().fold(f64::NEG_INFINITY, f64::max) - logs.fold(f64::INFINITY, f64::min);
    let fit = if usable == points.len() && spread > LOG_SPREAD_FLOOR {
        log_log_slope(&xs, &ys)
    } else {
        None
    };
    let verdict = match (fit, obs.window) {
        (None, _) => Verdict::Degenerate,
        (Some(_), None) => Verdict::Report,
        (Some((s, _, _)), Some((lo, hi))) if (lo..=hi).contains(&s) => Verdict::Pass,
        _ => Verdict::Fail,
    };
    Ok(RateReport {
        observable: obs.name.into(),
        expected_exponent: obs.expected,
        window: obs.window.map(|(a, b)| [a, b]),
        points,
        slope: fit.map(|f| f.0),
        intercept: fit.map(|f| f.1),
        residual: fit.map(|f| f.2),
        verdict,
    })
}

/// Rate reports at the final time of each run.
pub fn fit_runs(runs: &[ScenarioRun]) -> Result<Vec<RateReport>> {
    OBSERVABLES
        .iter()
        .map(|obs| {
            let points = runs
                .iter()
                .map(|r| RatePoint {
                    particles: r.particles,
                    value: (obs.extract)(r.last()),
                })
                .collect();
            fit_observable(obs, points)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub runs: Vec<ScenarioRun>,
    pub rates: Vec<RateReport>,
}

impl Sweep {
    pub fn passed(&self) -> bool {
        self.rates.iter().all(RateReport::passed)
    }
}

/// Run every `N` in the config and fit the rates. Assumption reports get
/// fitted exponents as well.
pub fn sweep_and_fit(cfg: &RunConfig) -> Result<Sweep> {
    let ns = cfg.particle_list();
    if ns.len() < 3 {
        return Err(LabError::TooFewPoints(ns.len()));
    }
    let mut runs = run_scenario(cfg)?;
    let mut reports: Vec<_> = runs.iter().map(|r| r.assumptions.clone()).collect();
    fit_assumption_exponents(&mut reports, ASSUMPTION_EXPONENT_SLACK);
    for (r, a) in runs.iter_mut().zip(reports) {
        r.assumptions = a;
    }
    let rates = fit_runs(&runs)?;
    Ok(Sweep { runs, rates })
}
