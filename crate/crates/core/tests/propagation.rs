mod common;

use std::sync::Arc;

use common::*;
use meanfield_core::fock::{
    ground_state, parity_projectors, product_state, propagate, second_quantize_one_body, FockBasis,
    HamiltonianBuilder, ManyBodyState, PropagatorOptions,
};
use meanfield_core::hartree::evolve_hartree;
use meanfield_core::lattice::{lowest_orbital, Model};
use meanfield_core::linalg::{hermitian_eigen, lowest_eigenpair, CsrMatrix, LanczosOptions};
use meanfield_core::tensor::TensorSpace;
use meanfield_core::{CMatrix, C64};

fn krylov_only() -> PropagatorOptions {
    PropagatorOptions {
        dense_threshold: 0,
        ..Default::default()
    }
}

fn dense_only() -> PropagatorOptions {
    PropagatorOptions {
        dense_threshold: usize::MAX,
        ..Default::default()
    }
}

// exp(−i dt H) x by a long Taylor series; dt‖H‖ stays well below one.
fn taylor_step(h: &CMatrix, x: &[C64], dt: f64) -> Vec<C64> {
    let mut term = nalgebra::DVector::from_column_slice(x);
    let mut sum = term.clone();
    for k in 1..60 {
        term = (h * term) * c(0.0, -dt / k as f64);
        sum += &term;
    }
    sum.iter().copied().collect()
}

fn builder(model: &Model, n: usize) -> HamiltonianBuilder {
    let basis = Arc::new(FockBasis::new(n, model.sites()).unwrap());
    HamiltonianBuilder::new(model.clone(), basis).unwrap()
}

#[test]
fn zero_generator_is_identity() {
    let mut r = rng(1);
    let psi = random_state(&mut r, 3, 4);
    let dim = psi.basis().dim();
    for opts in [dense_only(), krylov_only()] {
        let (out, rep) = propagate(
            &psi,
            |_| Ok(CsrMatrix::from_triplets(dim, dim, vec![])),
            0.0,
            0.5,
            0.05,
            &opts,
        )
        .unwrap();
        assert_eq!(rep.steps, 10);
        assert!(vec_diff(out.amplitudes(), psi.amplitudes()) < 1e-14);
    }
}

#[test]
fn eigenvector_acquires_phase() {
    let model = static_model(4, 4.0, 1.0);
    let b = builder(&model, 3);
    let h = b.full(0.0);
    let (vals, vecs) = hermitian_eigen(&h.to_dense());
    let e = vals[2];
    let psi =
        ManyBodyState::new(b.basis().clone(), vecs.column(2).iter().copied().collect()).unwrap();
    for opts in [dense_only(), krylov_only()] {
        let (out, _) = propagate(&psi, |_| Ok(h.clone()), 0.0, 1.0, 0.01, &opts).unwrap();
        let target: Vec<C64> = psi
            .amplitudes()
            .iter()
            .map(|z| z * C64::from_polar(1.0, -e))
            .collect();
        assert!(vec_diff(out.amplitudes(), &target) < 1e-10);
    }
}

#[test]
fn krylov_and_dense_match_taylor_oracle() {
    let model = quench_model(4, 4.0, 1.0, 0.1);
    let b = builder(&model, 3);
    let mut r = rng(2);
    let psi = random_state(&mut r, 3, 4);
    let (t1, dt) = (0.2, 0.01);
    let mut x = psi.amplitudes().to_vec();
    for j in 0..20 {
        x = taylor_step(&b.full(0.0 + (j as f64 + 0.5) * dt).to_dense(), &x, dt);
    }
    for opts in [dense_only(), krylov_only()] {
        let (out, _) = propagate(&psi, |t| Ok(b.full(t)), 0.0, t1, dt, &opts).unwrap();
        let d = vec_diff(out.amplitudes(), &x);
        assert!(d < 1e-8, "{d}");
    }
}

#[test]
fn full_and_tilde_flows_are_unitary() {
    let model = quench_model(4, 4.0, 1.0, 0.1);
    let n = 4;
    let b = builder(&model, n);
    let phi0 = lowest_orbital(&model.one_body(0.0));
    let (t1, dt) = (1.0, 1e-2);
    let traj = evolve_hartree(&model, &phi0, t1, dt / 2.0).unwrap();
    let mut r = rng(3);
    let psi = random_state(&mut r, n, 4);
    for opts in [PropagatorOptions::default(), krylov_only()] {
        let (full, _) = propagate(&psi, |t| Ok(b.full(t)), 0.0, t1, dt, &opts).unwrap();
        assert!((full.norm() - 1.0).abs() < 1e-9);
        let (tilde, _) =
            propagate(&psi, |t| b.tilde(t, traj.field_at(t)?), 0.0, t1, dt, &opts).unwrap();
        assert!((tilde.norm() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn bogoliubov_flow_conserves_parity() {
    let model = quench_model(4, 4.0, 1.0, 0.1);
    let n = 4;
    let b = builder(&model, n);
    let phi0 = lowest_orbital(&model.one_body(0.0));
    let (t1, dt) = (1.0, 1e-3);
    let traj = evolve_hartree(&model, &phi0, t1, dt / 2.0).unwrap();
    let mut r = rng(4);
    let psi = random_state(&mut r, n, 4);
    let (_, even0) = parity_projectors(&phi0, &psi).unwrap();
    let w0 = even0.norm();
    assert!(w0 > 0.3 && w0 < 0.95);
    let (out, _) = propagate(
        &psi,
        |t| b.tilde(t, traj.field_at(t)?),
        0.0,
        t1,
        dt,
        &PropagatorOptions::default(),
    )
    .unwrap();
    let (_, even) = parity_projectors(traj.field_at(t1).unwrap(), &out).unwrap();
    let d = (even.norm() - w0).abs();
    assert!(d < 1e-7, "parity drift {d}");

    // the full dynamics has no such conservation law
    let (full, _) = propagate(
        &psi,
        |t| Ok(b.full(t)),
        0.0,
        t1,
        dt,
        &PropagatorOptions::default(),
    )
    .unwrap();
    let (_, even) = parity_projectors(traj.field_at(t1).unwrap(), &full).unwrap();
    assert!((even.norm() - w0).abs() > 1e-4);
}

#[test]
fn product_state_odd_leak_is_second_order_in_dt() {
    let model = quench_model(5, 5.0, 1.0, 0.1);
    let n = 3;
    let b = builder(&model, n);
    let phi0 = lowest_orbital(&model.one_body(0.0));
    let t1 = 0.5;
    let leak = |dt: f64| {
        let traj = evolve_hartree(&model, &phi0, t1, dt / 2.0).unwrap();
        let psi = product_state(phi0.amplitudes(), b.basis().clone());
        let (out, _) = propagate(
            &psi,
            |t| b.tilde(t, traj.field_at(t)?),
            0.0,
            t1,
            dt,
            &PropagatorOptions::default(),
        )
        .unwrap();
        let (odd, even) = parity_projectors(traj.field_at(t1).unwrap(), &out).unwrap();
        assert!((even.norm() - 1.0).abs() < 1e-7);
        odd.norm()
    };
    let (coarse, fine) = (leak(1e-3), leak(5e-4));
    assert!(coarse < 1e-6, "{coarse}");
    let ratio = coarse / fine;
    assert!(ratio > 3.5 && ratio < 4.5, "{ratio}");
}

#[test]
fn lanczos_matches_dense_eigensolver() {
    for (seed, &(n, m)) in [(3usize, 4usize), (4, 4), (5, 3)].iter().enumerate() {
        let model = static_model(m, m as f64, 1.0 + seed as f64);
        let b = builder(&model, n);
        let h = b.full(0.0);
        let (e, psi) = ground_state(&h, b.basis().clone()).unwrap();
        let (vals, _) = hermitian_eigen(&h.to_dense());
        assert!((e - vals[0]).abs() < 1e-10, "{e} vs {}", vals[0]);
        let hx = h.mul_vec(psi.amplitudes());
        let res: f64 = hx
            .iter()
            .zip(psi.amplitudes())
            .map(|(a, x)| (a - x * e).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(res < 1e-8);
    }
}

#[test]
fn ground_state_energy_frozen() {
    // distinguishable-particle ground state of a stoquastic Hamiltonian is
    // symmetric, so the first-quantized minimum is the bosonic one
    const E0: f64 = 5.007300475147443;
    let (n, m) = (3, 4);
    let model = static_model(m, 4.0, 1.0);
    let space = TensorSpace::new(n, m).unwrap();
    let h1 = model.one_body(0.0);
    let mut v = CMatrix::zeros(m * m, m * m);
    for x in 0..m {
        for y in 0..m {
            v[(x * m + y, x * m + y)] = c(model.interaction.value(x, y), 0.0);
        }
    }
    let lam = 1.0 / (n as f64 - 1.0);
    let dense = space.matrix_of(|x| {
        let mut out = space.one_body_sum(&h1, x);
        for i in 0..n {
            for j in i + 1..n {
                for (o, z) in out.iter_mut().zip(space.apply_two_body(&v, i, j, x)) {
                    *o += z * lam;
                }
            }
        }
        out
    });
    let (vals, _) = hermitian_eigen(&dense);
    assert!((vals[0] - E0).abs() < 1e-10, "oracle {}", vals[0]);
    let b = builder(&model, n);
    let (e, _) = ground_state(&b.full(0.0), b.basis().clone()).unwrap();
    assert!((e - E0).abs() < 1e-10, "{e}");
}

#[test]
fn diagonal_one_body_ground_state() {
    let (n, m) = (4, 5);
    let eps = [0.7, -0.3, 1.2, 0.1, 0.4];
    let a = CMatrix::from_fn(
        m,
        m,
        |i, j| if i == j { c(eps[i], 0.0) } else { c(0.0, 0.0) },
    );
    let basis = Arc::new(FockBasis::new(n, m).unwrap());
    let h = second_quantize_one_body(&a, &basis).unwrap();
    let (e, psi) = ground_state(&h, basis.clone()).unwrap();
    assert!((e + 0.3 * n as f64).abs() < 1e-10);
    let target = basis.index_of(&[0, 4, 0, 0, 0]).unwrap();
    assert!((psi.amplitudes()[target].norm() - 1.0).abs() < 1e-9);
}

#[test]
fn zero_operator_ground_state() {
    let dim = 10;
    let h = CsrMatrix::from_triplets(dim, dim, vec![]);
    let (e, x, res) = lowest_eigenpair(&h, None, &LanczosOptions::default()).unwrap();
    assert_eq!(e, 0.0);
    assert!(res < 1e-12);
    assert!((x.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-12);
}
