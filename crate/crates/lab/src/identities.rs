//! Exact operator identities on small sectors, checked on random data.

use std::sync::Arc;

use meanfield_core::bogoliubov::{excitation_decompose, symmetric_reconstruct};
use meanfield_core::diagnostics::sandwich_bounds;
use meanfield_core::fock::{
    counting_derivative_terms, counting_operator, sector_projector, FockBasis, HamiltonianBuilder,
    ManyBodyState, WeightFunction,
};
use meanfield_core::lattice::{
    mean_field_potential, Interaction, LatticeSpace, Model, OneBodyField, PotentialSchedule, Switch,
};
use meanfield_core::linalg::{kron, CsrMatrix};
use meanfield_core::tensor::TensorSpace;
use meanfield_core::{CMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;

/// `(N, M)` pairs checked by default.
pub const DEFAULT_SIZES: [(usize, usize); 4] = [(2, 3), (3, 3), (4, 3), (3, 4)];

pub const TOLERANCE: f64 = 1e-10;
pub const ROUND_TRIP_TOLERANCE: f64 = 1e-12;
pub const SANDWICH_SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    /// Largest deviation over all cases.
    pub worst: f64,
    pub tolerance: f64,
    pub cases: usize,
    pub pass: bool,
}

#[derive(Default)]
struct Tally {
    worst: f64,
    cases: usize,
}

impl Tally {
    fn add(&mut self, d: f64) {
        // a NaN anywhere must fail the check; f64::max would drop it
        self.worst = if d.is_nan() || self.worst.is_nan() {
            f64::NAN
        } else {
            self.worst.max(d)
        };
        self.cases += 1;
    }

    fn finish(self, name: &'static str, tolerance: f64) -> IdentityCheck {
        IdentityCheck {
            name,
            worst: self.worst,
            tolerance,
            cases: self.cases,
            pass: self.worst <= tolerance,
        }
    }
}

fn rng(seed: u64, n: usize, m: usize, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ ((n as u64) << 40) ^ ((m as u64) << 32) ^ salt)
}

fn random_vec(r: &mut ChaCha8Rng, len: usize) -> Vec<C64> {
    (0..len)
        .map(|_| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
        .collect()
}

fn random_field(r: &mut ChaCha8Rng, m: usize) -> Result<OneBodyField> {
    Ok(OneBodyField::normalized(random_vec(r, m))?)
}

fn random_state(r: &mut ChaCha8Rng, n: usize, m: usize) -> Result<ManyBodyState> {
    let basis = Arc::new(FockBasis::new(n, m)?);
    let mut psi = ManyBodyState::new(basis.clone(), random_vec(r, basis.dim()))?;
    psi.normalize();
    Ok(psi)
}

fn diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn matrix_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn dense(op: &CsrMatrix) -> CMatrix {
    op.to_dense()
}

fn projectors(phi: &OneBodyField) -> (CMatrix, CMatrix) {
    let p = phi.projector();
    let q = CMatrix::identity(p.nrows(), p.nrows()) - &p;
    (p, q)
}

fn model(m: usize) -> Result<Model> {
    let space = LatticeSpace::new(m, m as f64)?;
    let sched = PotentialSchedule::harmonic_trap(&space, 2.0, Switch::SmoothOff { tau: 0.5 })?;
    let v = Interaction::soft_coulomb(&space, 1.0, 1.0)?;
    Ok(Model::new(space, sched, v)?)
}

/// `P_{N,k}`: agreement with the symmetrized products of `p`, `q`,
/// idempotence, mutual orthogonality and resolution of the identity.
fn sector_projectors(seed: u64, n: usize, m: usize, t: &mut Tally) -> Result<()> {
    let mut r = rng(seed, n, m, 1);
    let phi = random_field(&mut r, m)?;
    let psi = random_state(&mut r, n, m)?;
    let space = TensorSpace::new(n, m)?;
    let (p, q) = projectors(&phi);
    let emb = space.embed(&psi);
    let mut total = vec![C64::new(0.0, 0.0); psi.basis().dim()];
    for k in 0..=n {
        let pk = sector_projector(k, &phi, &psi)?;
        t.add(diff(
            &space.embed(&pk),
            &space.sector_projector(&p, &q, k, &emb),
        ));
        for l in 0..=n {
            let plk = sector_projector(l, &phi, &pk)?;
            t.add(if l == k {
                diff(plk.amplitudes(), pk.amplitudes())
            } else {
                plk.norm()
            });
        }
        total
            .iter_mut()
            .zip(pk.amplitudes())
            .for_each(|(o, z)| *o += z);
    }
    t.add(diff(&total, psi.amplitudes()));
    Ok(())
}

/// `f̂ P^(i) A P^(j) = P^(i) A P^(j) (τ_{j−i} f)^` on slots 1, 2.
fn pull_through(seed: u64, n: usize, m: usize, t: &mut Tally) -> Result<()> {
    let mut r = rng(seed, n, m, 2);
    let phi = random_field(&mut r, m)?;
    let psi = random_state(&mut r, n, m)?;
    let a = CMatrix::from_vec(m * m, m * m, random_vec(&mut r, m * m * m * m));
    let f = WeightFunction::new((0..=n).map(|_| r.gen_range(0.0..3.0)).collect())?;
    let space = TensorSpace::new(n, m)?;
    let (p, q) = projectors(&phi);
    let blocks = [kron(&p, &p), kron(&p, &q) + kron(&q, &p), kron(&q, &q)];
    let x = space.embed(&psi);
    for i in 0..3usize {
        for j in 0..3usize {
            let op = &blocks[i] * &a * &blocks[j];
            let lhs = space.apply_two_body(&op, 0, 1, &space.counting(&p, &q, &f, &x));
            let g = f.shift(j as i64 - i as i64);
            let rhs = space.counting(&p, &q, &g, &space.apply_two_body(&op, 0, 1, &x));
            t.add(diff(&lhs, &rhs));
        }
    }
    Ok(())
}

/// `(1/N) Σ q_k = m̂`, `m̂ μ̂ = 1 − P_{N,0}`, `(τ_d m)^ = ((τ_d n)^)²`.
fn weight_calculus(seed: u64, n: usize, m: usize, t: &mut Tally) -> Result<()> {
    let mut r = rng(seed, n, m, 3);
    let phi = random_field(&mut r, m)?;
    let psi = random_state(&mut r, n, m)?;
    let space = TensorSpace::new(n, m)?;
    let (_, q) = projectors(&phi);
    let mhat = counting_operator(&WeightFunction::m(n), &phi, &psi)?;
    let avg: Vec<C64> = space
        .one_body_sum(&q, &space.embed(&psi))
        .into_iter()
        .map(|z| z / n as f64)
        .collect();
    t.add(diff(&avg, &space.embed(&mhat)));
    let mu = counting_operator(&WeightFunction::mu(n), &phi, &psi)?;
    let mmu = counting_operator(&WeightFunction::m(n), &phi, &mu)?;
    let p0 = sector_projector(0, &phi, &psi)?;
    let rest: Vec<C64> = psi
        .amplitudes()
        .iter()
        .zip(p0.amplitudes())
        .map(|(a, b)| a - b)
        .collect();
    t.add(diff(mmu.amplitudes(), &rest));
    for d in -2..=2i64 {
        let a = counting_operator(&WeightFunction::m(n).shift(d), &phi, &psi)?;
        let nn = WeightFunction::n(n).shift(d);
        let b = counting_operator(&nn, &phi, &counting_operator(&nn, &phi, &psi)?)?;
        t.add(diff(a.amplitudes(), b.amplitudes()));
    }
    Ok(())
}

/// `p₂ v₁₂ p₂ = p₂ (v ∗ |φ|²)(x₁) p₂`.
fn pvp(seed: u64, m: usize, t: &mut Tally) -> Result<()> {
    let mut r = rng(seed, 0, m, 4);
    let model = model(m)?;
    let v = &model.interaction;
    let phi = random_field(&mut r, m)?;
    let (p, _) = projectors(&phi);
    let id = CMatrix::identity(m, m);
    let p2 = kron(&id, &p);
    let lhs = &p2 * v.pair_kernel() * &p2;
    let vb = mean_field_potential(v, &phi);
    let d = CMatrix::from_fn(m, m, |x, y| C64::new(if x == y { vb[x] } else { 0.0 }, 0.0));
    let rhs = &p2 * kron(&d, &id) * &p2;
    t.add(matrix_diff(&lhs, &rhs));
    Ok(())
}

/// `H − H̃` against the assembled three- and four-`q` remainder.
fn difference_identity(seed: u64, n: usize, m: usize, t: &mut Tally) -> Result<()> {
    let mut r = rng(seed, n, m, 5);
    let model = model(m)?;
    let phi = random_field(&mut r, m)?;
    let basis = Arc::new(FockBasis::new(n, m)?);
    let b = HamiltonianBuilder::new(model, basis)?;
    let time = r.gen_range(0.0..0.5);
    let lhs = dense(&b.full(time)) - dense(&b.tilde(time, &phi)?);
    t.add(matrix_diff(&lhs, &dense(&b.difference(&phi)?)));
    Ok(())
}

fn round_trip(seed: u64, n: usize, m: usize, t: &mut Tally) -> Result<()> {
    let mut r = rng(seed, n, m, 6);
    let phi = random_field(&mut r, m)?;
    let psi = random_state(&mut r, n, m)?;
    let chi = excitation_decompose(&psi, &phi)?;
    let back = symmetric_reconstruct(&chi, &phi, n)?;
    t.add(back.distance(&psi));
    t.add((chi.norm() - 1.0).abs());
    Ok(())
}

/// Violation of `⟨q₁⟩ ≤ Tr|γ − p| ≤ √(8⟨q₁⟩)` (zero when it holds).
fn sandwich(seed: u64, n: usize, m: usize, samples: usize, t: &mut Tally) -> Result<()> {
    let mut r = rng(seed, n, m, 7);
    for _ in 0..samples {
        let phi = random_field(&mut r, m)?;
        let psi = random_state(&mut r, n, m)?;
        let (lo, mid, hi) = sandwich_bounds(&psi, &phi)?;
        t.add((lo - mid).max(mid - hi).max(0.0));
    }
    Ok(())
}

/// The first counting-derivative term for `m̂ⁿ`, `n = 1, 2`.
fn counting_term_one(seed: u64, n: usize, m: usize, t: &mut Tally) -> Result<()> {
    let mut r = rng(seed, n, m, 8);
    let model = model(m)?;
    let phi = random_field(&mut r, m)?;
    let psi = random_state(&mut r, n, m)?;
    for e in [1.0, 2.0] {
        let f = WeightFunction::m(n).pow(e);
        let terms = counting_derivative_terms(&model.interaction, &phi, &f, &psi)?;
        t.add(terms.one.abs());
    }
    Ok(())
}

/// Run every identity for each seed and size.
pub fn check_identities(seeds: &[u64], sizes: &[(usize, usize)]) -> Result<Vec<IdentityCheck>> {
    let mut tallies: Vec<Tally> = (0..8).map(|_| Tally::default()).collect();
    let mut modes: Vec<usize> = sizes.iter().map(|s| s.1).collect();
    modes.sort_unstable();
    modes.dedup();
    for &seed in seeds {
        for &(n, m) in sizes {
            sector_projectors(seed, n, m, &mut tallies[0])?;
            pull_through(seed, n, m, &mut tallies[1])?;
            weight_calculus(seed, n, m, &mut tallies[2])?;
            difference_identity(seed, n, m, &mut tallies[4])?;
            round_trip(seed, n, m, &mut tallies[5])?;
            if n >= 2 {
                counting_term_one(seed, n, m, &mut tallies[7])?;
            }
        }
        for &m in &modes {
            pvp(seed, m, &mut tallies[3])?;
        }
    }
    // the sandwich check samples its own states
    let seed = seeds.first().copied().unwrap_or(0);
    for &(n, m) in sizes {
        let per = SANDWICH_SAMPLES.div_ceil(sizes.len().max(1));
        sandwich(seed, n, m, per, &mut tallies[6])?;
    }
    let names: [(&'static str, f64); 8] = [
        ("sector_projectors", TOLERANCE),
        ("pull_through", TOLERANCE),
        ("weight_calculus", TOLERANCE),
        ("pvp_mean_field", TOLERANCE),
        ("hamiltonian_difference", TOLERANCE),
        ("decompose_round_trip", ROUND_TRIP_TOLERANCE),
        ("sandwich_inequality", TOLERANCE),
        ("counting_term_one", TOLERANCE),
    ];
    Ok(tallies
        .into_iter()
        .zip(names)
        .map(|(t, (name, tol))| t.finish(name, tol))
        .collect())
}

/// Parse one `NxM` pair.
pub fn parse_size(item: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = item
        .trim()
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NxM, got {item:?}"))?;
    let n = a.trim().parse().map_err(|e| format!("{item:?}: {e}"))?;
    let m = b.trim().parse().map_err(|e| format!("{item:?}: {e}"))?;
    Ok((n, m))
}

/// Parse `"2x3,3x3"` into `(N, M)` pairs.
pub fn parse_sizes(s: &str) -> std::result::Result<Vec<(usize, usize)>, String> {
    s.split(',').map(parse_size).collect()
}
