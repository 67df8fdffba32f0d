//! The Hartree flow `i∂_t φ = h^{t,φ} φ` and its energy functional.

use crate::lattice::{chemical_phase, Model, OneBodyField};
use crate::linalg;
use crate::prelude::*;
use nalgebra::DVector;

/// Per-step bound on `|‖φ‖ − 1|` before renormalization.
pub const NORM_DRIFT_BOUND: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HartreeOptions {
    /// Keep the constant `−μ^φ` in `h^{t,φ}` (affects only the global phase).
    pub chemical_phase: bool,
}

impl Default for HartreeOptions {
    fn default() -> Self {
        Self {
            chemical_phase: true,
        }
    }
}

/// Hartree solution sampled on a uniform grid `t_i = i dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct HartreeTrajectory {
    dt: f64,
    fields: Vec<OneBodyField>,
    max_norm_drift: f64,
}

impl HartreeTrajectory {
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn fields(&self) -> &[OneBodyField] {
        &self.fields
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.fields.len()).map(|i| i as f64 * self.dt).collect()
    }

    pub fn final_field(&self) -> &OneBodyField {
        self.fields.last().expect("trajectory is never empty")
    }

    /// Largest per-step norm drift before renormalization.
    pub fn max_norm_drift(&self) -> f64 {
        self.max_norm_drift
    }

    /// Grid index of `t`, if `t` is a grid point.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let r = t / self.dt;
        let i = r.round();
        if (r - i).abs() <= 1e-7 && i >= 0.0 && (i as usize) < self.fields.len() {
            Some(i as usize)
        } else {
            None
        }
    }

    /// The stored field at grid time `t`.
    pub fn field_at(&self, t: f64) -> Result<&OneBodyField> {
        self.index_of(t)
            .map(|i| &self.fields[i])
            .ok_or(Error::OffGrid { t })
    }
}

/// `∂_t φ = −i h^{t,φ} φ`.
pub fn hartree_rhs(model: &Model, phi: &OneBodyField, t: f64) -> Vec<C64> {
    rhs_with(model, phi.amplitudes(), t, HartreeOptions::default())
}

fn rhs_with(model: &Model, u: &[C64], t: f64, opts: HartreeOptions) -> Vec<C64> {
    // the intermediate RK stages are not normalized; use the raw density
    let m = u.len();
    let rho: Vec<f64> = u.iter().map(|c| c.norm_sqr()).collect();
    let v = &model.interaction;
    let conv: Vec<f64> = (0..m)
        .map(|x| (0..m).map(|y| v.value(x, y) * rho[y]).sum())
        .collect();
    let mu = if opts.chemical_phase {
        0.5 * conv.iter().zip(&rho).map(|(c, r)| c * r).sum::<f64>()
    } else {
        0.0
    };
    let mut h = model.one_body(t);
    for x in 0..m {
        h[(x, x)] += conv[x] - mu;
    }
    let hu = h * DVector::from_column_slice(u);
    hu.iter().map(|z| z * C64::new(0.0, -1.0)).collect()
}

/// RK4 with renormalization after each step, sampled every `dt`.
pub fn evolve_hartree(
    model: &Model,
    phi0: &OneBodyField,
    t1: f64,
    dt: f64,
) -> Result<HartreeTrajectory> {
    evolve_hartree_with(model, phi0, t1, dt, HartreeOptions::default())
}

pub fn evolve_hartree_with(
    model: &Model,
    phi0: &OneBodyField,
    t1: f64,
    dt: f64,
    opts: HartreeOptions,
) -> Result<HartreeTrajectory> {
    if phi0.sites() != model.sites() {
        return Err(Error::DimensionMismatch {
            expected: model.sites(),
            found: phi0.sites(),
        });
    }
    let defect = phi0.norm_defect();
    if defect > crate::lattice::NORM_TOLERANCE {
        return Err(Error::NotNormalized { defect });
    }
    let steps = crate::fock::step_count_pub(0.0, t1, dt)?;
    let mut fields = Vec::with_capacity(steps + 1);
    fields.push(phi0.clone());
    let mut u = phi0.amplitudes().to_vec();
    let mut worst = 0.0f64;
    for j in 0..steps {
        let t = j as f64 * dt;
        u = rk4(|tt, x| rhs_with(model, x, tt, opts), &u, t, dt);
        let n = linalg::norm(&u);
        let drift = (n - 1.0).abs();
        if !(drift <= NORM_DRIFT_BOUND) {
            return Err(Error::StepFailure {
                t: t + dt,
                reason: format!("Hartree norm drift {drift:e} exceeds {NORM_DRIFT_BOUND:e}"),
            });
        }
        worst = worst.max(drift);
        u.iter_mut().for_each(|c| *c /= n);
        fields.push(OneBodyField::from_amplitudes(u.clone())?);
    }
    Ok(HartreeTrajectory {
        dt,
        fields,
        max_norm_drift: worst,
    })
}

/// Classical fourth-order Runge–Kutta step for `x' = f(t, x)`.
pub fn rk4(f: impl Fn(f64, &[C64]) -> Vec<C64>, x: &[C64], t: f64, dt: f64) -> Vec<C64> {
    let h = C64::new(dt, 0.0);
    let add = |a: &[C64], b: &[C64], s: C64| -> Vec<C64> {
        a.iter().zip(b).map(|(x, y)| x + y * s).collect()
    };
    let k1 = f(t, x);
    let k2 = f(t + dt / 2.0, &add(x, &k1, h / 2.0));
    let k3 = f(t + dt / 2.0, &add(x, &k2, h / 2.0));
    let k4 = f(t + dt, &add(x, &k3, h));
    x.iter()
        .enumerate()
        .map(|(i, xi)| xi + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// `E_h(φ) = ‖∇φ‖² + ⟨φ, W^t φ⟩ + μ^φ`.
pub fn hartree_energy(model: &Model, phi: &OneBodyField, t: f64) -> f64 {
    let u = DVector::from_column_slice(phi.amplitudes());
    let h = model.one_body(t);
    (u.adjoint() * h * &u)[(0, 0)].re + chemical_phase(&model.interaction, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Interaction, LatticeSpace, PotentialSchedule, Switch};

    fn model(switch: Switch) -> Model {
        let s = LatticeSpace::new(5, 5.0).unwrap();
        let w = PotentialSchedule::harmonic_trap(&s, 2.0, switch).unwrap();
        let v = Interaction::soft_coulomb(&s, 1.0, 1.0).unwrap();
        Model::new(s, w, v).unwrap()
    }

    fn start() -> OneBodyField {
        OneBodyField::normalized(
            (0..5)
                .map(|j| C64::new(1.0 + 0.4 * j as f64, 0.3 - 0.1 * j as f64))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn energy_is_conserved_for_static_potential() {
        let m = model(Switch::Static);
        let tr = evolve_hartree(&m, &start(), 1.0, 1e-3).unwrap();
        let e0 = hartree_energy(&m, &tr.fields()[0], 0.0);
        let drift = tr
            .fields()
            .iter()
            .map(|f| (hartree_energy(&m, f, 0.0) - e0).abs())
            .fold(0.0, f64::max);
        assert!(drift < 1e-9, "energy drift {drift}");
        assert!(tr.max_norm_drift() < 1e-12);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let m = model(Switch::SmoothOff { tau: 0.1 });
        let t1 = 0.2;
        let reference = evolve_hartree(&m, &start(), t1, 2.5e-4).unwrap();
        let err = |dt: f64| {
            let tr = evolve_hartree(&m, &start(), t1, dt).unwrap();
            linalg::distance(
                tr.final_field().amplitudes(),
                reference.final_field().amplitudes(),
            )
        };
        let ratio = err(4e-3) / err(2e-3);
        assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
    }

    #[test]
    fn chemical_phase_only_changes_global_phase() {
        let m = model(Switch::SmoothOff { tau: 0.1 });
        let a = evolve_hartree(&m, &start(), 0.3, 1e-3).unwrap();
        let b = evolve_hartree_with(
            &m,
            &start(),
            0.3,
            1e-3,
            HartreeOptions {
                chemical_phase: false,
            },
        )
        .unwrap();
        let pa = a.final_field().projector();
        let pb = b.final_field().projector();
        assert!(linalg::max_abs_diff(&pa, &pb) < 1e-10);
    }

    #[test]
    fn off_grid_lookup_fails() {
        let m = model(Switch::Static);
        let tr = evolve_hartree(&m, &start(), 0.01, 1e-3).unwrap();
        assert!(tr.field_at(0.005).is_ok());
        assert!(matches!(tr.field_at(0.0055), Err(Error::OffGrid { .. })));
    }
}
