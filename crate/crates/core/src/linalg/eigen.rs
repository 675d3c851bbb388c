use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::matrix::{inner, Matrix};
use crate::error::{Error, Result};
use crate::scalar::{cis, Real, C};
use crate::tolerance::Tolerances;

/// Eigen-decomposition `M = V diag(λ) V†` of a Hermitian matrix.
///
/// Eigenvalues are ascending; each eigenvector column is phase-fixed so that
/// its first component with modulus above the pivot tolerance is real and
/// positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de> + Real"))]
pub struct SpectralDecomposition<T: Real> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Matrix<T>,
    pub source_hash: u64,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, i: usize) -> Vec<C<T>> {
        self.eigenvectors.column(i)
    }

    /// `V f(λ) V†` for a scalar function of the eigenvalues.
    pub fn map(&self, f: impl Fn(T) -> C<T>) -> Matrix<T> {
        let n = self.dim();
        let v = &self.eigenvectors;
        let weights: Vec<C<T>> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = C::zero();
                for (k, w) in weights.iter().enumerate() {
                    acc = acc + v[(i, k)] * *w * v[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix<T> {
        self.map(|l| C::new(l, T::zero()))
    }

    /// Max-norm of `V†V − I`.
    pub fn orthonormality_defect(&self) -> T {
        let v = &self.eigenvectors;
        (&v.adjoint() * v).distance(&Matrix::identity(self.dim()))
    }
}

pub(crate) fn matrix_hash<T: Real>(m: &Matrix<T>) -> u64 {
    let mut h = DefaultHasher::new();
    m.dim().hash(&mut h);
    for z in m.as_slice() {
        z.re.as_f64().to_bits().hash(&mut h);
        z.im.as_f64().to_bits().hash(&mut h);
    }
    h.finish()
}

/// Diagonalizes a Hermitian matrix with cyclic complex Jacobi rotations.
pub fn eig_hermitian<T: Real>(m: &Matrix<T>, tol: &Tolerances) -> Result<SpectralDecomposition<T>> {
    let (defect, row, col) = m.hermitian_defect();
    if defect > T::lit(tol.hermitian) {
        return Err(Error::NotHermitian { defect: defect.as_f64(), row, col });
    }
    let n = m.dim();
    // Work on the exactly Hermitian part.
    let mut a = (m + &m.adjoint()).scale_real(T::lit(0.5));
    let mut v = Matrix::<T>::identity(n);

    let frobenius = a.as_slice().iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    let threshold = T::lit(4.0) * T::epsilon() * frobenius;
    let max_sweeps = 100 * n * n;
    let mut converged = false;
    for _ in 0..max_sweeps {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(Error::NoConvergence { sweeps: max_sweeps });
    }

    let pivot_tol = T::lit(tol.phase_pivot);
    let mut pairs: Vec<(T, usize, Vec<C<T>>)> = (0..n)
        .map(|k| {
            let mut col = v.column(k);
            let pivot = phase_fix(&mut col, pivot_tol);
            (a[(k, k)].re, pivot, col)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(&y.1)));

    let columns: Vec<Vec<C<T>>> = pairs.iter().map(|p| p.2.clone()).collect();
    Ok(SpectralDecomposition {
        eigenvalues: pairs.iter().map(|p| p.0).collect(),
        eigenvectors: Matrix::from_columns(&columns),
        source_hash: matrix_hash(m),
    })
}

fn off_diagonal_norm<T: Real>(a: &Matrix<T>) -> T {
    let n = a.dim();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc = acc + a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Annihilates `a[p][q]` with the unitary `J = diag(1, e^{-iφ}) · R(θ)` acting on (p, q).
fn rotate<T: Real>(a: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r <= T::min_positive_value() {
        return;
    }
    let phase = cis(-apq.arg());
    let half = T::lit(0.5);
    let theta = half * (T::lit(2.0) * r).atan2(a[(q, q)].re - a[(p, p)].re);
    let (s, c) = theta.sin_cos();
    let (c, s) = (C::new(c, T::zero()), C::new(s, T::zero()));
    let j_pp = c;
    let j_pq = s;
    let j_qp = -s * phase;
    let j_qq = c * phase;

    let n = a.dim();
    let right = |m: &mut Matrix<T>| {
        for k in 0..n {
            let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
            m[(k, p)] = mkp * j_pp + mkq * j_qp;
            m[(k, q)] = mkp * j_pq + mkq * j_qq;
        }
    };
    right(a);
    right(v);
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
        a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    a[(p, q)] = C::zero();
    a[(q, p)] = C::zero();
    a[(p, p)] = C::new(a[(p, p)].re, T::zero());
    a[(q, q)] = C::new(a[(q, q)].re, T::zero());
}

/// Rotates `v` so its first component above `pivot_tol` is real positive.
/// Returns the pivot index.
pub(crate) fn phase_fix<T: Real>(v: &mut [C<T>], pivot_tol: T) -> usize {
    let pivot = v
        .iter()
        .position(|z| z.norm() > pivot_tol)
        .unwrap_or_else(|| (0..v.len()).max_by(|&i, &j| v[i].norm().partial_cmp(&v[j].norm()).unwrap()).unwrap_or(0));
    if let Some(z) = v.get(pivot).copied() {
        if z.norm() > T::zero() {
            let rot = cis(-z.arg());
            for x in v.iter_mut() {
                *x = *x * rot;
            }
            v[pivot] = C::new(v[pivot].norm(), T::zero());
        }
    }
    pivot
}

/// `e^{iθA/ħ}` from a spectral decomposition of `A`.
pub fn unitary_exp<T: Real>(spectral: &SpectralDecomposition<T>, theta: T, hbar: T) -> Result<Matrix<T>> {
    if !(hbar > T::zero()) {
        return Err(Error::InvalidHbar(hbar.as_f64()));
    }
    if theta.is_zero() {
        return Ok(Matrix::identity(spectral.dim()));
    }
    Ok(spectral.map(|l| cis(theta * l / hbar)))
}

/// Gram–Schmidt orthonormalization, dropping vectors whose residual norm
/// falls below `drop_tol`.
pub(crate) fn orthonormalize<T: Real>(vectors: Vec<Vec<C<T>>>, drop_tol: T) -> Vec<Vec<C<T>>> {
    let mut basis: Vec<Vec<C<T>>> = Vec::new();
    for mut w in vectors {
        for _ in 0..2 {
            for b in &basis {
                let proj = inner(b, &w);
                for (x, y) in w.iter_mut().zip(b) {
                    *x = *x - proj * y;
                }
            }
        }
        let nrm = super::matrix::norm(&w);
        if nrm > drop_tol {
            let inv = C::new(T::one() / nrm, T::zero());
            basis.push(w.into_iter().map(|z| z * inv).collect());
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    use super::*;

    const TOL: Tolerances = Tolerances::DEFAULT;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    #[test]
    fn diagonal_input_sorted() {
        let d = eig_hermitian(&Matrix::<f64>::from_diagonal(&[3.0, 1.0]), &TOL).unwrap();
        assert_eq!(d.eigenvalues, vec![1.0, 3.0]);
        assert_eq!(d.eigenvector(0), vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(d.eigenvector(1), vec![c(1.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn pauli_x() {
        let sx = Matrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let d = eig_hermitian(&sx, &TOL).unwrap();
        assert!((d.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((d.eigenvalues[1] - 1.0).abs() < 1e-14);
        // Phase-fixed: first component real positive.
        let minus = d.eigenvector(0);
        assert!((minus[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-14);
        assert!((minus[1] - c(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-14);
        let plus = d.eigenvector(1);
        assert!((plus[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-14);
        assert!((plus[1] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn identity_reconstructs() {
        let id = Matrix::<f64>::identity(4);
        let d = eig_hermitian(&id, &TOL).unwrap();
        assert_eq!(d.eigenvalues, vec![1.0; 4]);
        assert!(d.reconstruct().distance(&id) < 1e-15);
        assert!(d.orthonormality_defect() < 1e-15);
    }

    #[test]
    fn complex_hermitian_reconstructs() {
        let m = Matrix::from_rows(vec![
            vec![c(2.0, 0.0), c(1.0, -1.0), c(0.0, 0.5)],
            vec![c(1.0, 1.0), c(-1.0, 0.0), c(0.3, 0.0)],
            vec![c(0.0, -0.5), c(0.3, 0.0), c(0.5, 0.0)],
        ])
        .unwrap();
        let d = eig_hermitian(&m, &TOL).unwrap();
        assert!(d.reconstruct().distance(&m) < 1e-12);
        assert!(d.orthonormality_defect() < 1e-12);
        assert!(d.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let trace: f64 = d.eigenvalues.iter().sum();
        assert!((trace - 1.5).abs() < 1e-12);
    }

    #[test]
    fn deterministic() {
        let m = Matrix::from_rows(vec![vec![c(1.0, 0.0), c(0.2, 0.7)], vec![c(0.2, -0.7), c(-0.4, 0.0)]]).unwrap();
        assert_eq!(eig_hermitian(&m, &TOL).unwrap(), eig_hermitian(&m, &TOL).unwrap());
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = Matrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(eig_hermitian(&m, &TOL), Err(Error::NotHermitian { row: 0, col: 1, .. })));
    }

    #[test]
    fn single_precision_works() {
        let m = Matrix::<f32>::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let d = eig_hermitian(&m, &TOL).unwrap();
        assert!((d.eigenvalues[0] + 1.0).abs() < 1e-6);
        assert!(d.reconstruct().distance(&m) < 1e-6);
    }

    #[test]
    fn exp_of_sz_at_two_pi_is_minus_identity() {
        let sz = Matrix::<f64>::from_diagonal(&[0.5, -0.5]);
        let d = eig_hermitian(&sz, &TOL).unwrap();
        let u = unitary_exp(&d, 2.0 * PI, 1.0).unwrap();
        assert!(u.distance(&Matrix::identity(2).scale_real(-1.0)) < 1e-14);
    }

    #[test]
    fn exp_zero_and_inverse() {
        let m = Matrix::from_rows(vec![vec![c(0.3, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(-2.0, 0.0)]]).unwrap();
        let d = eig_hermitian(&m, &TOL).unwrap();
        assert_eq!(unitary_exp(&d, 0.0, 1.0).unwrap(), Matrix::identity(2));
        let u = unitary_exp(&d, 1.3, 0.7).unwrap();
        let w = unitary_exp(&d, -1.3, 0.7).unwrap();
        assert!((&u * &w).distance(&Matrix::identity(2)) < 1e-12);
        assert!(matches!(unitary_exp(&d, 1.0, 0.0), Err(Error::InvalidHbar(_))));
    }

    #[test]
    fn gram_schmidt_drops_dependent() {
        let basis = orthonormalize(
            vec![vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(2.0, 0.0), c(2.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 1.0)]],
            1e-9,
        );
        assert_eq!(basis.len(), 2);
        assert!(inner(&basis[0], &basis[1]).norm() < 1e-15);
    }
}
