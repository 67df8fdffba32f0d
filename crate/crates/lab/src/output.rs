//! CSV time series, JSON summary and a gnuplot script.

use std::fs;
use std::path::Path;

use meanfield_core::diagnostics::{AssumptionReport, DistanceReport};
use serde::{Deserialize, Serialize};

use crate::config::{OutputConfig, RunConfig};
use crate::error::{LabError, Result};
use crate::scenario::{Aborted, RunStats, ScenarioRun};
use crate::sweep::{RateReport, OBSERVABLES};

/// CSV columns, in order.
pub const COLUMNS: [&str; 14] = [
    "particles",
    "t",
    "l2_full",
    "trace_dist",
    "energy_trace_dist",
    "chi_l2_sq",
    "bog_l2",
    "counting_1",
    "counting_2",
    "counting_3",
    "parity_odd_tilde",
    "parity_defect",
    "pair_consistency",
    "purity_defect",
];

/// One CSV line: a [`DistanceReport`] tagged with its particle number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub particles: usize,
    pub t: f64,
    pub l2_full: f64,
    pub trace_dist: f64,
    pub energy_trace_dist: f64,
    pub chi_l2_sq: f64,
    pub bog_l2: f64,
    pub counting_1: f64,
    pub counting_2: f64,
    pub counting_3: f64,
    pub parity_odd_tilde: f64,
    pub parity_defect: f64,
    pub pair_consistency: f64,
    pub purity_defect: f64,
}

impl Row {
    pub fn new(particles: usize, r: &DistanceReport) -> Self {
        Self {
            particles,
            t: r.t,
            l2_full: r.l2_full,
            trace_dist: r.trace_dist,
            energy_trace_dist: r.energy_trace_dist,
            chi_l2_sq: r.chi_l2_sq,
            bog_l2: r.bog_l2,
            counting_1: r.counting[0],
            counting_2: r.counting[1],
            counting_3: r.counting[2],
            parity_odd_tilde: r.parity_odd_tilde,
            parity_defect: r.parity_defect,
            pair_consistency: r.pair_consistency,
            purity_defect: r.purity_defect,
        }
    }

    /// Every column after `particles`, in order.
    pub fn values(&self) -> [f64; 13] {
        [
            self.t,
            self.l2_full,
            self.trace_dist,
            self.energy_trace_dist,
            self.chi_l2_sq,
            self.bog_l2,
            self.counting_1,
            self.counting_2,
            self.counting_3,
            self.parity_odd_tilde,
            self.parity_defect,
            self.pair_consistency,
            self.purity_defect,
        ]
    }
}

pub fn rows(runs: &[ScenarioRun]) -> Vec<Row> {
    runs.iter()
        .flat_map(|r| r.reports.iter().map(move |d| Row::new(r.particles, d)))
        .collect()
}

/// `printf("%.12e")`: twelve mantissa digits, signed exponent of at least
/// two digits.
pub fn format_e12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    let s = format!("{x:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let e: i32 = exp.parse().expect("integer exponent");
    let sign = if e < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", e.abs())
}

/// Serialize rows as comma-separated UTF-8 with LF line endings.
pub fn csv_string(rows: &[Row]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(COLUMNS)?;
    for r in rows {
        let mut rec = vec![r.particles.to_string()];
        rec.extend(r.values().iter().map(|&x| format_e12(x)));
        w.write_record(&rec)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| LabError::Setup(format!("csv buffer: {e}")))?;
    Ok(String::from_utf8(bytes).expect("ASCII output"))
}

pub fn read_csv(path: &Path) -> Result<Vec<Row>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in r.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClauseSummary {
    pub name: String,
    pub value: f64,
    pub expected_exponent: f64,
    pub fitted_exponent: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsSummary {
    pub k_max: usize,
    pub tail_weight: f64,
    pub hartree_norm_drift: f64,
    pub hierarchy_norm_drift: f64,
    pub full_norm_drift: f64,
    pub tilde_norm_drift: f64,
    pub krylov_error: f64,
}

impl From<RunStats> for StatsSummary {
    fn from(s: RunStats) -> Self {
        Self {
            k_max: s.k_max,
            tail_weight: s.tail_weight,
            hartree_norm_drift: s.hartree_norm_drift,
            hierarchy_norm_drift: s.hierarchy_norm_drift,
            full_norm_drift: s.full_norm_drift,
            tilde_norm_drift: s.tilde_norm_drift,
            krylov_error: s.krylov_error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub particles: usize,
    pub last: Row,
    pub stats: StatsSummary,
    pub assumptions: Vec<ClauseSummary>,
}

fn clauses(a: &AssumptionReport) -> Vec<ClauseSummary> {
    a.clauses
        .iter()
        .map(|c| ClauseSummary {
            name: c.name.into(),
            value: c.value,
            expected_exponent: c.expected_exponent,
            fitted_exponent: c.fitted_exponent,
            pass: c.pass,
        })
        .collect()
}

/// A named bound on a run-wide maximum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    pub fn below(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            pass: value < bound,
        }
    }
}

/// Bound on norm drift and the parity defect of `Ψ̃`.
pub const CONSERVATION_BOUND: f64 = 1e-7;
/// Bound on the hierarchy against pair-equation mismatch.
pub const PAIR_CONSISTENCY_BOUND: f64 = 1e-6;

/// Conservation checks over all runs.
pub fn run_checks(runs: &[ScenarioRun]) -> Vec<Check> {
    let max = |f: &dyn Fn(&ScenarioRun) -> f64| runs.iter().map(f).fold(0.0, f64::max);
    let over = |f: fn(&DistanceReport) -> f64| {
        max(&|r: &ScenarioRun| r.reports.iter().map(f).fold(0.0, f64::max))
    };
    vec![
        Check::below(
            "hartree_norm_drift",
            max(&|r| r.stats.hartree_norm_drift),
            CONSERVATION_BOUND,
        ),
        Check::below(
            "full_norm_drift",
            max(&|r| r.stats.full_norm_drift),
            CONSERVATION_BOUND,
        ),
        Check::below(
            "tilde_norm_drift",
            max(&|r| r.stats.tilde_norm_drift),
            CONSERVATION_BOUND,
        ),
        Check::below(
            "hierarchy_norm_drift",
            max(&|r| r.stats.hierarchy_norm_drift),
            CONSERVATION_BOUND,
        ),
        Check::below(
            "parity_defect",
            over(|d| d.parity_defect),
            CONSERVATION_BOUND,
        ),
        Check::below(
            "pair_consistency",
            over(|d| d.pair_consistency),
            PAIR_CONSISTENCY_BOUND,
        ),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub config: RunConfig,
    pub runs: Vec<RunSummary>,
    pub checks: Vec<Check>,
    pub rates: Vec<RateReport>,
    pub pass: bool,
}

impl Summary {
    pub fn new(config: &RunConfig, runs: &[ScenarioRun], rates: Vec<RateReport>) -> Self {
        let checks = run_checks(runs);
        let pass = checks.iter().all(|c| c.pass) && rates.iter().all(RateReport::passed);
        Self {
            config: config.clone(),
            runs: runs
                .iter()
                .map(|r| RunSummary {
                    particles: r.particles,
                    last: Row::new(r.particles, r.last()),
                    stats: r.stats.into(),
                    assumptions: clauses(&r.assumptions),
                })
                .collect(),
            checks,
            rates,
            pass,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// gnuplot commands: values at `t1` against `N` on log axes with the
/// fitted lines, and each observable against time.
pub fn plot_script(
    out: &OutputConfig,
    t1: f64,
    particles: &[usize],
    rates: &[RateReport],
) -> String {
    let ns: Vec<String> = particles.iter().map(|n| n.to_string()).collect();
    let mut s = String::new();
    s.push_str("# gnuplot script; run from the output directory\n");
    s.push_str("set datafile separator ','\n");
    s.push_str("set terminal pngcairo size 1200,800\n");
    s.push_str(&format!("CSV = '{}.csv'\n", out.stem));
    s.push_str(&format!("NS = '{}'\n", ns.join(" ")));
    s.push_str(&format!("t1 = {}\n", format_e12(t1)));
    s.push_str("N(i) = word(NS, i) + 0\n");
    s.push_str("at_t1(c) = (abs($2 - t1) < 1e-9 ? column(c) : 1/0)\n\n");

    s.push_str(&format!("set output '{}_rates.png'\n", out.stem));
    s.push_str("set logscale xy\nset xlabel 'N'\nset ylabel 'value at t1'\n");
    let mut plots = Vec::new();
    for (k, obs) in OBSERVABLES.iter().enumerate() {
        plots.push(format!(
            "CSV using 1:(at_t1('{0}')) with points pt {1} lc {1} title '{0}' noenhanced",
            obs.name,
            k + 1
        ));
        if let Some(r) = rates.iter().find(|r| r.observable == obs.name) {
            if let (Some(a), Some(b)) = (r.slope, r.intercept) {
                plots.push(format!(
                    "exp({}) * x**({}) with lines dt 2 lc {} notitle",
                    format_e12(b),
                    format_e12(a),
                    k + 1
                ));
            }
        }
    }
    s.push_str(&format!("plot {}\n\n", plots.join(", \\\n     ")));

    s.push_str(&format!("set output '{}_series.png'\n", out.stem));
    s.push_str("unset logscale x\nset xlabel 't'\nset multiplot layout 2,4\n");
    let names: Vec<&str> = OBSERVABLES.iter().map(|o| o.name).collect();
    s.push_str(&format!("do for [name in '{}'] {{\n", names.join(" ")));
    s.push_str("    set title name noenhanced\n");
    s.push_str(
        "    plot for [i=1:words(NS)] CSV using 2:($1 == N(i) ? column(name) : 1/0) \\\n\
         \x20        with lines title sprintf('N=%d', N(i))\n",
    );
    s.push_str("}\nunset multiplot\n");
    s
}

fn write(path: &Path, content: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
        }
    }
    fs::write(path, content).map_err(|e| LabError::io(path, e))
}

/// Write the CSV, the JSON summary and the plot script.
pub fn emit_outputs(cfg: &RunConfig, rows: &[Row], summary: &Summary) -> Result<()> {
    let out = &cfg.output;
    write(&out.csv(), &csv_string(rows)?)?;
    write(&out.summary(), &summary.to_json()?)?;
    let ns: Vec<usize> = summary.runs.iter().map(|r| r.particles).collect();
    write(&out.plot(), &plot_script(out, cfg.t1, &ns, &summary.rates))?;
    Ok(())
}

/// Write whatever an aborted run finished: complete runs plus the reports
/// of the run that stopped.
pub fn emit_partial(cfg: &RunConfig, a: &Aborted) -> Result<()> {
    let mut rows = rows(&a.finished);
    rows.extend(a.completed.iter().map(|d| Row::new(a.particles, d)));
    let mut summary = Summary::new(cfg, &a.finished, Vec::new());
    summary.pass = false;
    emit_outputs(cfg, &rows, &summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printf_style_exponent() {
        assert_eq!(format_e12(0.0), "0.000000000000e+00");
        assert_eq!(format_e12(1234.5), "1.234500000000e+03");
        assert_eq!(format_e12(-2.5e-7), "-2.500000000000e-07");
        assert_eq!(format_e12(1e-123), "1.000000000000e-123");
        assert_eq!(format_e12(f64::NAN), "nan");
    }

    #[test]
    fn empty_list_gives_header_only() {
        let s = csv_string(&[]).unwrap();
        assert_eq!(s, COLUMNS.join(",") + "\n");
    }

    #[test]
    fn lines_end_with_lf() {
        let row = Row::new(4, &DistanceReport::default());
        let s = csv_string(&[row]).unwrap();
        assert!(!s.contains('\r'));
        assert_eq!(s.lines().count(), 2);
        assert!(s
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("4,0.000000000000e+00,"));
    }
}
