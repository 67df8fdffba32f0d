//! Run configuration: JSON file, defaults, validation.

use std::path::{Path, PathBuf};

use meanfield_core::fock::sector_dimension;
use meanfield_core::lattice::{Interaction, LatticeSpace, Model, PotentialSchedule, Switch};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    /// Number of sites `M`.
    pub sites: usize,
    /// Ring length `L`; defaults to `M` (unit spacing).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
}

impl LatticeConfig {
    pub fn length(&self) -> f64 {
        self.length.unwrap_or(self.sites as f64)
    }
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            sites: 5,
            length: Some(5.0),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionKind {
    /// `s / √(d² + ε²)`.
    #[default]
    SoftCoulomb,
    /// `s exp(−d²/2ε²)`.
    Gaussian,
    /// `s/a` on coincident sites.
    Contact,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InteractionConfig {
    pub kind: InteractionKind,
    pub strength: f64,
    /// Softening length (soft-Coulomb) or width (Gaussian).
    pub epsilon: f64,
}

impl Default for InteractionConfig {
    fn default() -> Self {
        Self {
            kind: InteractionKind::SoftCoulomb,
            strength: 1.0,
            epsilon: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrapConfig {
    /// `A` in `W₀(j) = A (1 − cos(2π(j − c)/M))`.
    pub amplitude: f64,
    /// Switch-off time; `null` keeps the trap on.
    pub tau: Option<f64>,
}

impl Default for TrapConfig {
    fn default() -> Self {
        Self {
            amplitude: 2.0,
            tau: Some(0.1),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    /// `φ₀^{⊗N}` with `φ₀` the trapped Hartree minimizer.
    #[default]
    Product,
    /// Lowest eigenvector of `H⁰` (trap on).
    GroundState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HierarchyConfig {
    pub k_max: usize,
    pub k_max_limit: usize,
    pub tail_tolerance: f64,
}

impl Default for HierarchyConfig {
    fn default() -> Self {
        let d = meanfield_core::bogoliubov::HierarchyOptions::default();
        Self {
            k_max: d.k_max,
            k_max_limit: d.k_max_limit,
            tail_tolerance: d.tail_tolerance,
        }
    }
}

impl HierarchyConfig {
    pub fn options(&self) -> meanfield_core::bogoliubov::HierarchyOptions {
        meanfield_core::bogoliubov::HierarchyOptions {
            k_max: self.k_max,
            k_max_limit: self.k_max_limit,
            tail_tolerance: self.tail_tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// File stem: `<stem>.csv`, `<stem>.summary.json`, `<stem>.gp`.
    pub stem: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            stem: "meanfield".into(),
        }
    }
}

impl OutputConfig {
    pub fn csv(&self) -> PathBuf {
        self.dir.join(format!("{}.csv", self.stem))
    }

    pub fn summary(&self) -> PathBuf {
        self.dir.join(format!("{}.summary.json", self.stem))
    }

    pub fn plot(&self) -> PathBuf {
        self.dir.join(format!("{}.gp", self.stem))
    }
}

/// A single `N` or a list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Particles {
    One(usize),
    Many(Vec<usize>),
}

impl Particles {
    pub fn to_vec(&self) -> Vec<usize> {
        match self {
            Particles::One(n) => vec![*n],
            Particles::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub lattice: LatticeConfig,
    pub interaction: InteractionConfig,
    pub trap: TrapConfig,
    pub initial: InitialKind,
    pub particles: Particles,
    pub t1: f64,
    pub dt: f64,
    /// Report every this many steps (and at `t1`).
    pub sample_every: usize,
    pub hierarchy: HierarchyConfig,
    /// Largest Fock sector and largest excitation space allowed.
    pub dimension_cap: usize,
    pub output: OutputConfig,
    /// Seed for anything randomized (the identity suite); echoed in reports.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            lattice: LatticeConfig::default(),
            interaction: InteractionConfig::default(),
            trap: TrapConfig::default(),
            initial: InitialKind::Product,
            particles: Particles::Many(vec![4, 6, 8, 10, 12]),
            t1: 0.5,
            dt: 1e-3,
            sample_every: 50,
            hierarchy: HierarchyConfig::default(),
            dimension_cap: meanfield_core::fock::DEFAULT_DIMENSION_CAP,
            output: OutputConfig::default(),
            seed: 0,
        }
    }
}

impl Default for Particles {
    fn default() -> Self {
        RunConfig::default().particles
    }
}

/// `Σ_{k ≤ k_max} C(k + M − 1, k)`.
pub fn excitation_space_dimension(modes: usize, k_max: usize) -> u128 {
    (0..=k_max).map(|k| sector_dimension(k, modes)).sum()
}

impl RunConfig {
    pub fn particle_list(&self) -> Vec<usize> {
        self.particles.to_vec()
    }

    pub fn steps(&self) -> usize {
        (self.t1 / self.dt).round() as usize
    }

    /// Every violated constraint, in a fixed order.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let m = self.lattice.sites;
        if m < 2 {
            out.push(format!("lattice.sites must be at least 2, got {m}"));
        }
        let l = self.lattice.length();
        if !(l > 0.0 && l.is_finite()) {
            out.push(format!("lattice.length must be positive, got {l}"));
        }
        let i = &self.interaction;
        if !i.strength.is_finite() {
            out.push(format!(
                "interaction.strength must be finite, got {}",
                i.strength
            ));
        }
        if matches!(
            i.kind,
            InteractionKind::SoftCoulomb | InteractionKind::Gaussian
        ) && !(i.epsilon > 0.0 && i.epsilon.is_finite())
        {
            out.push(format!(
                "interaction.epsilon must be positive, got {}",
                i.epsilon
            ));
        }
        if !self.trap.amplitude.is_finite() {
            out.push(format!(
                "trap.amplitude must be finite, got {}",
                self.trap.amplitude
            ));
        }
        if let Some(tau) = self.trap.tau {
            if !(tau > 0.0 && tau.is_finite()) {
                out.push(format!("trap.tau must be positive or null, got {tau}"));
            }
        }
        let ns = self.particle_list();
        if ns.is_empty() {
            out.push("particles must not be empty".into());
        }
        for &n in &ns {
            if n < 2 {
                out.push(format!(
                    "particles: N = {n} is below 2 (the coupling 1/(N-1) is undefined)"
                ));
            } else if m >= 2 {
                let dim = sector_dimension(n, m);
                if dim > self.dimension_cap as u128 {
                    out.push(format!(
                        "particles: N = {n}, M = {m} gives a sector of dimension {dim}, above dimension_cap {}",
                        self.dimension_cap
                    ));
                }
            }
        }
        let mut sorted = ns.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != ns.len() {
            out.push("particles must not repeat".into());
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            out.push(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t1 >= 0.0 && self.t1.is_finite()) {
            out.push(format!("t1 must be non-negative, got {}", self.t1));
        }
        if self.dt > 0.0 && self.t1 >= 0.0 && self.t1.is_finite() {
            let r = self.t1 / self.dt;
            if (r - r.round()).abs() > 1e-9 * r.max(1.0) {
                out.push(format!(
                    "t1/dt must be an integer, got {} / {} = {r}",
                    self.t1, self.dt
                ));
            }
        }
        if self.sample_every == 0 {
            out.push("sample_every must be positive".into());
        }
        let h = &self.hierarchy;
        if h.k_max > h.k_max_limit {
            out.push(format!(
                "hierarchy.k_max ({}) exceeds hierarchy.k_max_limit ({})",
                h.k_max, h.k_max_limit
            ));
        }
        if !(h.tail_tolerance > 0.0) {
            out.push(format!(
                "hierarchy.tail_tolerance must be positive, got {}",
                h.tail_tolerance
            ));
        }
        if m >= 2 {
            // the finite hierarchy and the decompositions reach k = N
            let top = ns.iter().copied().max().unwrap_or(0).max(h.k_max_limit);
            let dim = excitation_space_dimension(m, top);
            if dim > self.dimension_cap as u128 {
                out.push(format!(
                    "excitation space up to k = {top} has dimension {dim}, above dimension_cap {}",
                    self.dimension_cap
                ));
            }
        }
        if self.output.stem.is_empty() || self.output.stem.contains(['/', '\\']) {
            out.push(format!(
                "output.stem must be a plain file stem, got {:?}",
                self.output.stem
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(LabError::Invalid(v))
        }
    }

    pub fn space(&self) -> Result<LatticeSpace> {
        Ok(LatticeSpace::new(
            self.lattice.sites,
            self.lattice.length(),
        )?)
    }

    pub fn model(&self) -> Result<Model> {
        let space = self.space()?;
        let i = &self.interaction;
        let v = match i.kind {
            InteractionKind::SoftCoulomb => {
                Interaction::soft_coulomb(&space, i.strength, i.epsilon)?
            }
            InteractionKind::Gaussian => Interaction::gaussian(&space, i.strength, i.epsilon)?,
            InteractionKind::Contact => Interaction::contact(&space, i.strength)?,
            InteractionKind::Zero => Interaction::zero(&space),
        };
        let switch = match self.trap.tau {
            Some(tau) => Switch::SmoothOff { tau },
            None => Switch::Static,
        };
        let schedule = PotentialSchedule::harmonic_trap(&space, self.trap.amplitude, switch)?;
        Ok(Model::new(space, schedule, v)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Parse and validate a JSON config.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| LabError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    parse_config_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = RunConfig::default();
        assert!(c.violations().is_empty(), "{:?}", c.violations());
        assert_eq!(c.steps(), 500);
    }

    #[test]
    fn defaults_survive_a_round_trip() {
        let c = RunConfig::default();
        assert_eq!(parse_config_str(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let c =
            parse_config_str(r#"{"lattice": {"sites": 4}, "particles": 6, "t1": 0.2}"#).unwrap();
        assert_eq!(c.lattice.length(), 4.0);
        assert_eq!(c.particle_list(), vec![6]);
        assert_eq!(c.dt, 1e-3);
        assert_eq!(c.interaction, InteractionConfig::default());
        assert_eq!(c.trap, TrapConfig::default());
    }

    #[test]
    fn every_violation_is_listed() {
        let err =
            parse_config_str(r#"{"particles": [1, 4], "dt": 0, "sample_every": 0}"#).unwrap_err();
        match err {
            LabError::Invalid(v) => {
                assert_eq!(v.len(), 3, "{v:?}");
                assert!(v[0].contains("N = 1"));
                assert!(v[1].starts_with("dt"));
                assert!(v[2].starts_with("sample_every"));
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn unknown_keys_report_a_location() {
        let err = parse_config_str("{\n  \"t1\": 0.5,\n  \"tl\": 1\n}").unwrap_err();
        match err {
            LabError::Parse { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("unknown field `tl`"));
            }
            e => panic!("{e}"),
        }
        let err = parse_config_str(r#"{"trap": {"amp": 1}}"#).unwrap_err();
        assert!(matches!(err, LabError::Parse { .. }));
    }

    #[test]
    fn dimension_cap_is_checked_up_front() {
        let mut c = RunConfig::default();
        c.particles = Particles::One(30);
        c.lattice.sites = 8;
        c.lattice.length = None;
        let v = c.violations();
        assert!(v.iter().any(|s| s.contains("above dimension_cap")), "{v:?}");
    }

    #[test]
    fn grid_must_be_integral() {
        let mut c = RunConfig::default();
        c.dt = 3e-3;
        assert!(c.violations().iter().any(|s| s.starts_with("t1/dt")));
    }
}
