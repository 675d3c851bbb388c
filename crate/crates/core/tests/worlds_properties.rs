mod common;

use common::{joint_dimension, two_step_born, TOL};
use rand::Rng;
use uncertlab_core::linalg::{eig_hermitian, Matrix};
use uncertlab_core::sampling::{random_hermitian, random_observable, rng_from_seed};
use uncertlab_core::states::commutator;
use uncertlab_core::worlds::{joint_eigenvectors, repeated_measurement_chain};
use uncertlab_core::{ComplexMatrix, HermitianObservable};

#[test]
fn chains_conserve_probability_and_recombine() {
    let mut rng = rng_from_seed(41);
    for k in 0..300 {
        let dim = 2 + k % 5;
        let theta: HermitianObservable = random_observable(&mut rng, dim, &TOL).unwrap();
        let a: HermitianObservable = random_observable(&mut rng, dim, &TOL).unwrap();
        let prepared = theta.eigenstate(rng.random_range(0..dim));
        for decoherent in [false, true] {
            let out = repeated_measurement_chain(&prepared, &theta, &a, decoherent, 1.0, &TOL).unwrap();
            for p in out.tree.probability_by_depth() {
                assert!((p - 1.0).abs() <= 1e-10, "sample {k}");
            }
            if decoherent {
                let oracle = two_step_born(&prepared, &theta, &a);
                for (j, want) in oracle.iter().enumerate() {
                    let got = out.probability_of(theta.spectral().eigenvalues[j], 1e-9);
                    assert!((got - want).abs() <= 1e-10, "sample {k}");
                }
            } else {
                assert!(out.fidelity.unwrap() >= 1.0 - 1e-10, "sample {k}");
                let total: f64 = out.final_outcomes.iter().map(|o| o.probability).sum();
                assert!((total - 1.0).abs() <= 1e-10);
            }
        }
    }
}

/// `U (shared ⊕ rest) U†` pairs with a prescribed number of common eigenvectors.
fn pair_with_shared(rng: &mut impl Rng, dim: usize, shared: usize) -> (ComplexMatrix, ComplexMatrix) {
    let u = eig_hermitian(&random_hermitian::<f64, _>(rng, dim), &TOL).unwrap().eigenvectors;
    let levels = [-1.0, 0.0, 1.0, 2.0];
    let a_diag: Vec<f64> = (0..dim).map(|_| levels[rng.random_range(0..levels.len())]).collect();
    let a = &(&u * &Matrix::from_diagonal(&a_diag)) * &u.adjoint();
    let rest = random_hermitian::<f64, _>(rng, dim - shared);
    let mut inner = Matrix::zeros(dim);
    for i in 0..shared {
        inner[(i, i)] = num_complex::Complex::new(rng.random_range(-2.0..2.0), 0.0);
    }
    for i in 0..dim - shared {
        for j in 0..dim - shared {
            inner[(shared + i, shared + j)] = rest[(i, j)];
        }
    }
    let b = &(&u * &inner) * &u.adjoint();
    (a, b)
}

#[test]
fn joint_eigenvector_count_matches_reference() {
    let mut rng = rng_from_seed(42);
    let tol = 1e-8;
    for k in 0..300 {
        let dim = rng.random_range(2..=4);
        let shared = rng.random_range(0..=dim);
        let (am, bm) = pair_with_shared(&mut rng, dim, shared);
        let a = HermitianObservable::new(am.clone(), &TOL).unwrap();
        let b = HermitianObservable::new(bm.clone(), &TOL).unwrap();
        let found = joint_eigenvectors(&a, &b, tol, &TOL).unwrap();
        assert_eq!(found.len(), joint_dimension(&am, &bm), "sample {k} (dim {dim}, shared {shared})");
        let comm = commutator(&a, &b).unwrap();
        for j in &found {
            assert!(j.residual_a <= tol && j.residual_b <= tol);
            let cv = comm.apply(j.vector.amplitudes());
            let n: f64 = cv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!(n <= 10.0 * tol, "sample {k}");
        }
        for (x, y) in found.iter().zip(found.iter().skip(1)) {
            assert!(x.vector.inner(&y.vector).unwrap().norm() < 1e-8);
        }
    }
}
