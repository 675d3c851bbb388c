//! States, observables, Born-rule distributions and commutator algebra.

use std::ops::Range;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, eig_hermitian, inner, Matrix, SpectralDecomposition};
use crate::scalar::{Real, C};
use crate::tolerance::Tolerances;

/// Normalized pure state in a finite-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de> + Real"))]
#[serde(transparent)]
pub struct StateVector<T: Real> {
    amplitudes: Vec<C<T>>,
}

impl<T: Real> StateVector<T> {
    /// Wraps amplitudes that are already unit-norm within `tol.normalization`.
    pub fn new(amplitudes: Vec<C<T>>, tol: &Tolerances) -> Result<Self> {
        check_finite(&amplitudes)?;
        let n = linalg::norm(&amplitudes);
        if (n - T::one()).abs() > T::lit(tol.normalization) {
            return Err(Error::NotNormalized { norm: n.as_f64() });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales any nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<C<T>>) -> Result<Self> {
        check_finite(&amplitudes)?;
        let n = linalg::norm(&amplitudes);
        if n <= T::min_positive_value() {
            return Err(Error::ZeroVector);
        }
        let inv = C::new(T::one() / n, T::zero());
        Ok(Self { amplitudes: amplitudes.into_iter().map(|z| z * inv).collect() })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(amplitudes.iter().map(|&x| C::new(T::lit(x), T::zero())).collect())
    }

    /// Computational basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![C::zero(); dim];
        amplitudes[index] = C::one();
        Self { amplitudes }
    }

    pub(crate) fn from_unit_unchecked(amplitudes: Vec<C<T>>) -> Self {
        Self { amplitudes }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        check_dims(self.dim(), other.dim())?;
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `U|ψ⟩`, renormalized to absorb round-off.
    pub fn evolve(&self, unitary: &Matrix<T>) -> Result<Self> {
        check_dims(unitary.dim(), self.dim())?;
        Self::normalized(unitary.apply(&self.amplitudes))
    }
}

fn check_finite<T: Real>(v: &[C<T>]) -> Result<()> {
    match v.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        Some(pos) => Err(Error::NonFinite(pos)),
        None if v.is_empty() => Err(Error::ZeroVector),
        None => Ok(()),
    }
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// A set of spectral columns sharing one (merged) eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenspace<T> {
    pub value: T,
    pub columns: Range<usize>,
}

/// Hermitian operator with its spectral decomposition cached at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable<T: Real> {
    name: String,
    unit_label: String,
    matrix: Matrix<T>,
    spectral: SpectralDecomposition<T>,
    eigenspaces: Vec<Eigenspace<T>>,
}

impl<T: Real> Observable<T> {
    pub fn new(matrix: Matrix<T>, tol: &Tolerances) -> Result<Self> {
        let spectral = eig_hermitian(&matrix, tol)?;
        let eigenspaces = merge_degenerate(&spectral.eigenvalues, tol.degeneracy_relative);
        Ok(Self { name: "A".to_owned(), unit_label: String::new(), matrix, spectral, eigenspaces })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_unit(mut self, unit: impl Into<String>) -> Self {
        self.unit_label = unit.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn unit_label(&self) -> &str {
        &self.unit_label
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn spectral(&self) -> &SpectralDecomposition<T> {
        &self.spectral
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Distinct eigenvalues in ascending order, degenerate ones merged.
    pub fn eigenspaces(&self) -> &[Eigenspace<T>] {
        &self.eigenspaces
    }

    /// Smallest gap between distinct eigenvalues, if there are at least two.
    pub fn smallest_gap(&self) -> Option<T> {
        self.eigenspaces
            .windows(2)
            .map(|w| w[1].value - w[0].value)
            .fold(None, |acc: Option<T>, g| Some(acc.map_or(g, |a| a.min(g))))
    }

    /// Normalized eigenvector for spectral column `i`.
    pub fn eigenstate(&self, i: usize) -> StateVector<T> {
        StateVector::from_unit_unchecked(self.spectral.eigenvector(i))
    }

    /// `e^{iθA/ħ}`.
    pub fn unitary_exp(&self, theta: T, hbar: T) -> Result<Matrix<T>> {
        linalg::unitary_exp(&self.spectral, theta, hbar)
    }

    /// Orthogonal projection of `v` onto an eigenspace.
    pub(crate) fn project(&self, space: &Eigenspace<T>, v: &[C<T>]) -> Vec<C<T>> {
        let mut out = vec![C::zero(); v.len()];
        for k in space.columns.clone() {
            let col = self.spectral.eigenvector(k);
            let c = inner(&col, v);
            for (o, e) in out.iter_mut().zip(&col) {
                *o = *o + c * e;
            }
        }
        out
    }
}

fn merge_degenerate<T: Real>(eigenvalues: &[T], relative: f64) -> Vec<Eigenspace<T>> {
    let (Some(&first), Some(&last)) = (eigenvalues.first(), eigenvalues.last()) else {
        return Vec::new();
    };
    let tol = T::lit(relative) * T::one().max(last - first);
    let mut spaces = Vec::new();
    let mut start = 0;
    for i in 1..=eigenvalues.len() {
        if i == eigenvalues.len() || eigenvalues[i] - eigenvalues[i - 1] > tol {
            let group = &eigenvalues[start..i];
            let mean = group.iter().copied().sum::<T>() / T::from_usize(group.len()).unwrap();
            spaces.push(Eigenspace { value: mean, columns: start..i });
            start = i;
        }
    }
    spaces
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionPoint<T> {
    pub value: T,
    pub mass: T,
}

/// Probability masses over distinct eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct BornDistribution<T> {
    points: Vec<DistributionPoint<T>>,
}

impl<T: Real> BornDistribution<T> {
    /// Validates strictly ascending values, nonnegative masses summing to one.
    pub fn new(points: Vec<DistributionPoint<T>>, tol: &Tolerances) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidDistribution("no points".into()));
        }
        if points.windows(2).any(|w| !(w[0].value < w[1].value)) {
            return Err(Error::InvalidDistribution("values must be strictly ascending".into()));
        }
        if points.iter().any(|p| !(p.mass >= T::zero()) || !p.value.is_finite()) {
            return Err(Error::InvalidDistribution("masses must be nonnegative and values finite".into()));
        }
        let total: T = points.iter().map(|p| p.mass).sum();
        if (total - T::one()).abs() > T::lit(tol.normalization) {
            return Err(Error::InvalidDistribution(format!("masses sum to {total}")));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[DistributionPoint<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn mean(&self) -> T {
        self.points.iter().map(|p| p.value * p.mass).sum()
    }

    pub fn total_mass(&self) -> T {
        self.points.iter().map(|p| p.mass).sum()
    }
}

/// `⟨ψ|M|ψ⟩` for an arbitrary square matrix.
pub fn matrix_element<T: Real>(s: &StateVector<T>, m: &Matrix<T>) -> Result<C<T>> {
    check_dims(m.dim(), s.dim())?;
    Ok(inner(s.amplitudes(), &m.apply(s.amplitudes())))
}

/// `⟨ψ|A|ψ⟩`.
pub fn expectation<T: Real>(s: &StateVector<T>, a: &Observable<T>, tol: &Tolerances) -> Result<T> {
    let z = matrix_element(s, a.matrix())?;
    if z.im.abs() > T::lit(tol.imaginary_part) {
        return Err(Error::ComplexExpectation(z.im.as_f64()));
    }
    Ok(z.re)
}

/// `⟨A²⟩ − ⟨A⟩²`, with tiny negative round-off clamped to zero.
pub fn variance<T: Real>(s: &StateVector<T>, a: &Observable<T>, tol: &Tolerances) -> Result<T> {
    let mean = expectation(s, a, tol)?;
    let a_psi = a.matrix().apply(s.amplitudes());
    // ⟨A²⟩ = ‖Aψ‖² for Hermitian A.
    let second = linalg::norm(&a_psi).powi(2);
    let var = second - mean * mean;
    if var < -T::lit(tol.negative_variance) {
        return Err(Error::NegativeVariance(var.as_f64()));
    }
    Ok(var.max(T::zero()))
}

/// Standard deviation `sqrt(⟨A²⟩ − ⟨A⟩²)`.
pub fn stddev<T: Real>(s: &StateVector<T>, a: &Observable<T>, tol: &Tolerances) -> Result<T> {
    Ok(variance(s, a, tol)?.sqrt())
}

/// Born-rule masses `Σ_{i∈E_λ} |⟨a_i|ψ⟩|²` per distinct eigenvalue λ.
pub fn eigenvalue_distribution<T: Real>(s: &StateVector<T>, a: &Observable<T>) -> Result<BornDistribution<T>> {
    check_dims(a.dim(), s.dim())?;
    let spectral = a.spectral();
    let points = a
        .eigenspaces()
        .iter()
        .map(|space| {
            let mass = space.columns.clone().map(|k| inner(&spectral.eigenvector(k), s.amplitudes()).norm_sqr()).sum();
            DistributionPoint { value: space.value, mass }
        })
        .collect();
    Ok(BornDistribution { points })
}

/// `AB − BA`.
pub fn commutator<T: Real>(a: &Observable<T>, b: &Observable<T>) -> Result<Matrix<T>> {
    a.matrix().check_dim(b.matrix())?;
    Ok(&(a.matrix() * b.matrix()) - &(b.matrix() * a.matrix()))
}

/// `AB + BA`.
pub fn anticommutator<T: Real>(a: &Observable<T>, b: &Observable<T>) -> Result<Matrix<T>> {
    a.matrix().check_dim(b.matrix())?;
    Ok(&(a.matrix() * b.matrix()) + &(b.matrix() * a.matrix()))
}
