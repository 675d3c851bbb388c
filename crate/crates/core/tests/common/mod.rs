//! Independent reference computations used by the integration tests.
#![allow(dead_code)]

use nalgebra::{Complex, DMatrix, SymmetricEigen};
use uncertlab_core::states::BornDistribution;
use uncertlab_core::{ComplexMatrix, HermitianObservable, QuantumState, Tolerances};

pub const TOL: Tolerances = Tolerances::DEFAULT;

pub fn to_na(m: &ComplexMatrix) -> DMatrix<Complex<f64>> {
    let n = m.dim();
    DMatrix::from_fn(n, n, |i, j| Complex::new(m[(i, j)].re, m[(i, j)].im))
}

/// Eigenvalues from nalgebra, ascending.
pub fn reference_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(to_na(m)).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Orthonormal bases of the eigenspaces of a Hermitian matrix, grouped by
/// eigenvalues closer than `gap`.
pub fn reference_eigenspaces(m: &ComplexMatrix, gap: f64) -> Vec<(f64, DMatrix<Complex<f64>>)> {
    let eig = SymmetricEigen::new(to_na(m));
    let mut order: Vec<usize> = (0..m.dim()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &k in &order {
        match groups.last_mut() {
            Some(g) if eig.eigenvalues[k] - eig.eigenvalues[*g.last().unwrap()] <= gap => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let cols: Vec<_> = g.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();
            (eig.eigenvalues[g[0]], DMatrix::from_columns(&cols))
        })
        .collect()
}

/// `Σ_{λ,μ} dim(E_λ(A) ∩ E_μ(B))` from the eigenvalue-2 multiplicity of
/// `P_E + P_F`.
pub fn joint_dimension(a: &ComplexMatrix, b: &ComplexMatrix) -> usize {
    let ea = reference_eigenspaces(a, 1e-8);
    let eb = reference_eigenspaces(b, 1e-8);
    let mut total = 0;
    for (_, qa) in &ea {
        for (_, qb) in &eb {
            let p = qa * qa.adjoint() + qb * qb.adjoint();
            let ev = SymmetricEigen::new(p).eigenvalues;
            total += ev.iter().filter(|&&x| (x - 2.0).abs() < 1e-8).count();
        }
    }
    total
}

/// Narrowest window by enumerating every contiguous (i, j) pair.
/// Returns `(lo, hi, width, points)`.
pub fn brute_force_window(d: &BornDistribution<f64>, alpha: f64, mass_slack: f64) -> (f64, f64, f64, usize) {
    let pts = d.points();
    let mut candidates = Vec::new();
    for i in 0..pts.len() {
        for j in i..pts.len() {
            let mut mass = 0.0;
            for p in &pts[i..=j] {
                mass += p.mass;
            }
            if mass >= alpha - mass_slack {
                candidates.push((pts[i].value, pts[j].value, pts[j].value - pts[i].value, j - i + 1));
            }
        }
    }
    candidates
        .into_iter()
        .min_by(|x, y| x.2.total_cmp(&y.2).then(x.3.cmp(&y.3)).then(x.0.total_cmp(&y.0)))
        .expect("full window always qualifies")
}

/// `P(θ_j) = Σ_i |⟨a_i|θ⟩|² |⟨θ_j|a_i⟩|²` over nondegenerate eigenbases.
pub fn two_step_born(prepared: &QuantumState, theta: &HermitianObservable, a: &HermitianObservable) -> Vec<f64> {
    let n = prepared.dim();
    let ip = |u: &[num_complex::Complex<f64>], v: &[num_complex::Complex<f64>]| {
        u.iter().zip(v).map(|(x, y)| x.conj() * y).sum::<num_complex::Complex<f64>>()
    };
    let mut out = vec![0.0; n];
    for i in 0..n {
        let ai = a.spectral().eigenvector(i);
        let first = ip(&ai, prepared.amplitudes()).norm_sqr();
        for (j, slot) in out.iter_mut().enumerate() {
            let tj = theta.spectral().eigenvector(j);
            *slot += first * ip(&tj, &ai).norm_sqr();
        }
    }
    out
}

/// `|⟨ψ_θ|ψ_{θ+θ′}⟩|` with the exponentials taken by nalgebra.
pub fn literal_overlap_reference(
    s: &QuantumState,
    a: &HermitianObservable,
    theta: f64,
    theta_prime: f64,
    hbar: f64,
) -> f64 {
    let eig = SymmetricEigen::new(to_na(a.matrix()));
    let exp = |t: f64| {
        let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex::from_polar(1.0, t * l / hbar)));
        &eig.eigenvectors * d * eig.eigenvectors.adjoint()
    };
    let psi = nalgebra::DVector::from_iterator(s.dim(), s.amplitudes().iter().map(|z| Complex::new(z.re, z.im)));
    let first = exp(theta) * &psi;
    let second = exp(theta + theta_prime) * &psi;
    first.dotc(&second).norm()
}
