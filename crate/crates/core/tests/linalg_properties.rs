mod common;

use common::{reference_eigenvalues, TOL};
use proptest::prelude::*;
use uncertlab_core::linalg::{eig_hermitian, unitary_exp, Matrix};
use uncertlab_core::sampling::{random_hermitian, rng_from_seed};
use uncertlab_core::ComplexMatrix;

#[test]
fn reconstruction_on_random_hermitian() {
    let mut rng = rng_from_seed(11);
    for k in 0..500 {
        let dim = 2 + k % 7;
        let m: ComplexMatrix = random_hermitian(&mut rng, dim);
        let d = eig_hermitian(&m, &TOL).unwrap();
        let scale = 1f64.max(m.max_norm());
        assert!(d.reconstruct().distance(&m) <= 1e-9 * scale, "sample {k}");
        assert!(d.orthonormality_defect() <= 1e-10, "sample {k}");
        assert!(d.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        for (got, want) in d.eigenvalues.iter().zip(reference_eigenvalues(&m)) {
            assert!((got - want).abs() <= 1e-10 * scale, "sample {k}: {got} vs {want}");
        }
    }
}

#[test]
fn degenerate_spectrum_reconstructs() {
    let mut rng = rng_from_seed(5);
    let q = eig_hermitian(&random_hermitian::<f64, _>(&mut rng, 5), &TOL).unwrap().eigenvectors;
    let m = &(&q * &Matrix::from_diagonal(&[1.0, 1.0, 1.0, -2.0, -2.0])) * &q.adjoint();
    let d = eig_hermitian(&m, &TOL).unwrap();
    assert!(d.reconstruct().distance(&m) < 1e-12);
    assert!((d.eigenvalues[0] + 2.0).abs() < 1e-12 && (d.eigenvalues[4] - 1.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn group_law_and_unitarity(seed in any::<u64>(), dim in 2usize..=8, t1 in -10.0f64..10.0, t2 in -10.0f64..10.0, hbar in 0.2f64..3.0) {
        let mut rng = rng_from_seed(seed);
        let m: ComplexMatrix = random_hermitian(&mut rng, dim);
        let d = eig_hermitian(&m, &TOL).unwrap();
        let u1 = unitary_exp(&d, t1, hbar).unwrap();
        let u2 = unitary_exp(&d, t2, hbar).unwrap();
        let u12 = unitary_exp(&d, t1 + t2, hbar).unwrap();
        let id = Matrix::identity(dim);
        prop_assert!((&u1.adjoint() * &u1).distance(&id) <= 1e-10);
        prop_assert!((&u1 * &u2).distance(&u12) <= 1e-10);
    }
}
