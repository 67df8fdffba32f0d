use super::{FockBasis, ManyBodyState};
use crate::linalg::{
    expm_apply, expm_hermitian_apply, lowest_eigenpair, CsrMatrix, KrylovOptions, LanczosOptions,
};
use crate::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorOptions {
    pub krylov: KrylovOptions,
    /// Sector dimensions up to this size use a dense eigendecomposition.
    pub dense_threshold: usize,
}

impl Default for PropagatorOptions {
    fn default() -> Self {
        Self {
            krylov: KrylovOptions::default(),
            dense_threshold: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PropagationReport {
    pub steps: usize,
    /// Steps that had to be split into substeps.
    pub refined_steps: usize,
    pub max_subspace: usize,
    pub error_estimate: f64,
}

/// One exponential step `exp(−i dt H) ψ`.
pub fn step(
    h: &CsrMatrix,
    psi: &[C64],
    dt: f64,
    opts: &PropagatorOptions,
    report: &mut PropagationReport,
) -> Result<Vec<C64>> {
    report.steps += 1;
    if h.nrows() <= opts.dense_threshold {
        return Ok(expm_hermitian_apply(&h.to_dense(), psi, dt));
    }
    let (out, info) = expm_apply(h, psi, dt, &opts.krylov)?;
    if info.substeps > 1 {
        report.refined_steps += 1;
    }
    report.max_subspace = report.max_subspace.max(info.max_subspace);
    report.error_estimate += info.error_estimate;
    Ok(out)
}

/// Exponential-midpoint propagation `Ψ ← exp(−i dt H(t + dt/2)) Ψ` from
/// `t0` to `t1`. `(t1 − t0)/dt` must be an integer.
pub fn propagate<F>(
    psi: &ManyBodyState,
    mut generator: F,
    t0: f64,
    t1: f64,
    dt: f64,
    opts: &PropagatorOptions,
) -> Result<(ManyBodyState, PropagationReport)>
where
    F: FnMut(f64) -> Result<CsrMatrix>,
{
    let steps = step_count(t0, t1, dt)?;
    let mut report = PropagationReport::default();
    let mut x = psi.amplitudes().to_vec();
    for j in 0..steps {
        let tm = t0 + (j as f64 + 0.5) * dt;
        let h = generator(tm)?;
        x = step(&h, &x, dt, opts, &mut report)?;
    }
    Ok((psi.with_amplitudes(x), report))
}

pub(crate) fn step_count(t0: f64, t1: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) || !(t1 >= t0) {
        return Err(Error::InvalidParameter(format!(
            "bad time grid t0 = {t0}, t1 = {t1}, dt = {dt}"
        )));
    }
    let r = (t1 - t0) / dt;
    let n = r.round();
    if (r - n).abs() > 1e-9 * r.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "(t1 - t0)/dt = {r} is not an integer"
        )));
    }
    Ok(n as usize)
}

/// Lowest eigenpair of a Hamiltonian on `basis`.
pub fn ground_state(h: &CsrMatrix, basis: Arc<FockBasis>) -> Result<(f64, ManyBodyState)> {
    let opts = LanczosOptions::default();
    let (e, x, _) = lowest_eigenpair(h, None, &opts)?;
    Ok((e, ManyBodyState::new(basis, x)?))
}
