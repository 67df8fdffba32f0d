mod common;

use std::sync::Arc;

use common::*;
use meanfield_core::bogoliubov::{excitation_decompose, symmetric_reconstruct, ExcitationVector};
use meanfield_core::fock::{product_state, FockBasis};
use meanfield_core::lattice::OneBodyField;
use meanfield_core::tensor::{symmetric_product, TensorSpace};
use meanfield_core::{CMatrix, C64};

const SIZES: [(usize, usize); 4] = [(2, 3), (3, 3), (4, 3), (3, 4)];

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `√C(N,k) (Π_{i≤k} q_i) ∫ Π_{i>k} φ̄(x_i) Ψ`, straight from the dense tensor.
fn oracle_chi(psi: &[C64], phi: &OneBodyField, n: usize, m: usize, k: usize) -> Vec<C64> {
    let u = phi.amplitudes();
    let tail = n - k;
    let mut out = vec![c(0.0, 0.0); m.pow(k as u32)];
    for (idx, &a) in psi.iter().enumerate() {
        let head = idx / m.pow(tail as u32);
        let mut rest = idx % m.pow(tail as u32);
        let mut w = c(1.0, 0.0);
        for _ in 0..tail {
            w *= u[rest % m].conj();
            rest /= m;
        }
        out[head] += w * a;
    }
    if k > 0 {
        let space = TensorSpace::new(k, m).unwrap();
        let q = CMatrix::identity(m, m) - phi.projector();
        for slot in 0..k {
            out = space.apply_one_body(&q, slot, &out);
        }
    }
    let s = binom(n, k).sqrt();
    out.into_iter().map(|z| z * s).collect()
}

fn tensor_power(u: &[C64], l: usize) -> Vec<C64> {
    let mut out = vec![c(1.0, 0.0)];
    for _ in 0..l {
        out = out
            .iter()
            .flat_map(|a| u.iter().map(move |b| a * b))
            .collect();
    }
    out
}

#[test]
fn decomposition_matches_projected_partial_integrals() {
    for seed in 0..5u64 {
        for &(n, m) in &SIZES {
            let mut r = rng(seed * 17 + (n * 10 + m) as u64);
            let phi = random_field(&mut r, m);
            let psi = random_state(&mut r, n, m);
            let chi = excitation_decompose(&psi, &phi).unwrap();
            let t = TensorSpace::new(n, m).unwrap().embed(&psi);
            for k in 0..=n {
                let want = oracle_chi(&t, &phi, n, m, k);
                let got = chi.symmetric_array(k).unwrap();
                let d = vec_diff(&got, &want);
                assert!(d < 1e-12, "seed {seed} (N={n}, M={m}) k={k}: {d}");
            }
            assert!((chi.norm() - 1.0).abs() < 1e-12);
            assert!(chi.slot_orthogonality_defect(&phi) < 1e-12);
        }
    }
}

#[test]
fn reconstruction_matches_symmetric_tensor_products() {
    for &(n, m) in &SIZES {
        let mut r = rng(300 + (n * 10 + m) as u64);
        let phi = random_field(&mut r, m);
        let psi = random_state(&mut r, n, m);
        let chi = excitation_decompose(&psi, &phi).unwrap();
        let mut sum = vec![c(0.0, 0.0); m.pow(n as u32)];
        for k in 0..=n {
            let arr = chi.symmetric_array(k).unwrap();
            let term = symmetric_product(m, n - k, &tensor_power(phi.amplitudes(), n - k), k, &arr);
            for (s, z) in sum.iter_mut().zip(term) {
                *s += z;
            }
        }
        let back = symmetric_reconstruct(&chi, &phi, n).unwrap();
        let t = TensorSpace::new(n, m).unwrap();
        assert!(vec_diff(&t.embed(&back), &sum) < 1e-12);
        assert!(vec_diff(&sum, &t.embed(&psi)) < 1e-12);
    }
}

#[test]
fn round_trip_is_exact() {
    for seed in 0..5u64 {
        for &(n, m) in &[(2usize, 3usize), (3, 3), (4, 3), (3, 4), (6, 4), (5, 5)] {
            let mut r = rng(seed + 1000 * n as u64 + m as u64);
            let phi = random_field(&mut r, m);
            let psi = random_state(&mut r, n, m);
            let chi = excitation_decompose(&psi, &phi).unwrap();
            let back = symmetric_reconstruct(&chi, &phi, n).unwrap();
            assert!(vec_diff(back.amplitudes(), psi.amplitudes()) < 1e-12);
        }
    }
}

#[test]
fn reconstruction_is_isometric_on_random_excitations() {
    let (n, m) = (5, 4);
    let mut r = rng(8);
    let phi = random_field(&mut r, m);
    // random slot-orthogonal χ: decompose a random state, rescale sectors
    let psi = random_state(&mut r, n, m);
    let base = excitation_decompose(&psi, &phi).unwrap();
    let sectors: Vec<Vec<C64>> = base
        .sectors()
        .iter()
        .enumerate()
        .map(|(k, s)| s.iter().map(|z| z * (1.0 + k as f64)).collect())
        .collect();
    let chi = ExcitationVector::new(m, sectors).unwrap();
    let back = symmetric_reconstruct(&chi, &phi, n).unwrap();
    assert!((back.norm() - chi.norm()).abs() < 1e-12);
}

#[test]
fn elementary_excitation_states() {
    let (n, m) = (4, 4);
    let mut r = rng(21);
    let phi = random_field(&mut r, m);
    let basis = Arc::new(FockBasis::new(n, m).unwrap());
    let cond = excitation_decompose(&product_state(phi.amplitudes(), basis.clone()), &phi).unwrap();
    assert!((cond.sector(0)[0].norm() - 1.0).abs() < 1e-12);
    assert!(cond.sector_weights()[1..].iter().all(|&w| w < 1e-24));
    // φ^{⊗(N−1)} ⊗_s ψ with ψ ⊥ φ
    let raw = random_vec(&mut r, m);
    let ov: C64 = phi
        .amplitudes()
        .iter()
        .zip(&raw)
        .map(|(a, b)| a.conj() * b)
        .sum();
    let psi1: Vec<C64> = raw
        .iter()
        .zip(phi.amplitudes())
        .map(|(b, a)| b - a * ov)
        .collect();
    let psi1 = OneBodyField::normalized(psi1).unwrap();
    let t = symmetric_product(
        m,
        n - 1,
        &tensor_power(phi.amplitudes(), n - 1),
        1,
        psi1.amplitudes(),
    );
    let state = TensorSpace::new(n, m).unwrap().project(&t, basis);
    assert!((state.norm() - 1.0).abs() < 1e-12);
    let chi = excitation_decompose(&state, &phi).unwrap();
    assert!(vec_diff(chi.sector(1), psi1.amplitudes()) < 1e-12);
    let w = chi.sector_weights();
    assert!(w[0] < 1e-24 && w[2..].iter().all(|&x| x < 1e-24));
}

#[test]
fn symmetric_product_normalization() {
    // ‖φ ⊗_s ψ‖ = 1 for orthonormal φ, ψ
    let mut r = rng(2);
    let m = 3;
    let phi = random_field(&mut r, m);
    let raw = random_vec(&mut r, m);
    let ov: C64 = phi
        .amplitudes()
        .iter()
        .zip(&raw)
        .map(|(a, b)| a.conj() * b)
        .sum();
    let psi = OneBodyField::normalized(
        raw.iter()
            .zip(phi.amplitudes())
            .map(|(b, a)| b - a * ov)
            .collect(),
    )
    .unwrap();
    let t = symmetric_product(m, 1, phi.amplitudes(), 1, psi.amplitudes());
    let nrm: f64 = t.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    assert!((nrm - 1.0).abs() < 1e-14);
    // φ ⊗_s φ carries weight √2 under the same prefactor
    let t = symmetric_product(m, 1, phi.amplitudes(), 1, phi.amplitudes());
    let nrm: f64 = t.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    assert!((nrm - 2f64.sqrt()).abs() < 1e-14);
}

#[test]
fn reconstruction_rejects_bad_input() {
    let m = 3;
    let mut r = rng(6);
    let phi = random_field(&mut r, m);
    let mut chi = ExcitationVector::zeros(m, 2);
    chi.sector_mut(1).copy_from_slice(phi.amplitudes());
    assert!(symmetric_reconstruct(&chi, &phi, 2).is_err());
    let mut chi = ExcitationVector::zeros(m, 3);
    let e = FockBasis::new(3, m).unwrap();
    let psi = random_state(&mut r, 3, m);
    let full = excitation_decompose(&psi, &phi).unwrap();
    chi.sector_mut(3).copy_from_slice(full.sector(3));
    assert_eq!(chi.sector(3).len(), e.dim());
    assert!(symmetric_reconstruct(&chi, &phi, 2).is_err());
}
