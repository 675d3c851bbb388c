//! Seeded random states, observables and distributions, and the property
//! sweeps built on them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::Matrix;
use crate::relations::{robertson_check, schrodinger_check, uffink_check, Crossing, SearchParams};
use crate::scalar::{Real, C};
use crate::states::{BornDistribution, DistributionPoint, Observable, StateVector};
use crate::tolerance::Tolerances;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar-random pure state (normalized complex Gaussian vector).
pub fn random_state<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> StateVector<T> {
    loop {
        let amps: Vec<C<T>> =
            (0..dim).map(|_| C::new(T::lit(rng.sample(StandardNormal)), T::lit(rng.sample(StandardNormal)))).collect();
        if let Ok(s) = StateVector::normalized(amps) {
            return s;
        }
    }
}

/// Hermitian matrix with independent Gaussian entries (GUE-like).
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Matrix<T> {
    let mut m = Matrix::zeros(dim);
    for i in 0..dim {
        m[(i, i)] = C::new(T::lit(rng.sample(StandardNormal)), T::zero());
        for j in (i + 1)..dim {
            let z = C::new(T::lit(rng.sample(StandardNormal)), T::lit(rng.sample(StandardNormal)));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

pub fn random_observable<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize, tol: &Tolerances) -> Result<Observable<T>> {
    Observable::new(random_hermitian(rng, dim), tol)
}

/// Up to `max_points` distinct sorted values with random masses summing to one.
///
/// Values are drawn from a coarse lattice so equal-width windows occur.
pub fn random_distribution<R: Rng + ?Sized>(
    rng: &mut R,
    max_points: usize,
    tol: &Tolerances,
) -> Result<BornDistribution<f64>> {
    let n = rng.random_range(1..=max_points);
    let mut values: Vec<f64> = Vec::with_capacity(n);
    while values.len() < n {
        let v = rng.random_range(-20i32..=20) as f64 / 4.0;
        if !values.contains(&v) {
            values.push(v);
        }
    }
    values.sort_by(f64::total_cmp);
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0f64).powi(2)).collect();
    let total: f64 = raw.iter().sum();
    let points = values.into_iter().zip(raw).map(|(value, m)| DistributionPoint { value, mass: m / total }).collect();
    BornDistribution::new(points, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationSweepSummary {
    pub samples: usize,
    pub robertson_violations: usize,
    pub schrodinger_violations: usize,
    pub min_robertson_slack: f64,
    pub min_schrodinger_slack: f64,
    /// Samples where the Schrödinger bound fell below the squared commutator term.
    pub ordering_violations: usize,
}

/// Random (state, A, B) triples, cycling through `dims`.
pub fn relation_sweep<R: Rng + ?Sized>(
    rng: &mut R,
    samples: usize,
    dims: &[usize],
    tol: &Tolerances,
) -> Result<RelationSweepSummary> {
    let mut summary = RelationSweepSummary {
        samples,
        robertson_violations: 0,
        schrodinger_violations: 0,
        min_robertson_slack: f64::INFINITY,
        min_schrodinger_slack: f64::INFINITY,
        ordering_violations: 0,
    };
    for k in 0..samples {
        let dim = dims[k % dims.len()];
        let s = random_state::<f64, _>(rng, dim);
        let a = random_observable(rng, dim, tol)?;
        let b = random_observable(rng, dim, tol)?;
        let rob = robertson_check(&s, &a, &b, tol)?;
        let sch = schrodinger_check(&s, &a, &b, tol)?;
        summary.robertson_violations += usize::from(!rob.satisfied);
        summary.schrodinger_violations += usize::from(!sch.satisfied);
        summary.min_robertson_slack = summary.min_robertson_slack.min(rob.slack);
        summary.min_schrodinger_slack = summary.min_schrodinger_slack.min(sch.slack);
        let rel = 1e-12 * (1.0 + sch.rhs);
        summary.ordering_violations += usize::from(sch.rhs < rob.rhs * rob.rhs - rel);
    }
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UffinkSweepSummary {
    pub samples: usize,
    pub reached: usize,
    pub vacuous: usize,
    pub violations: usize,
    pub max_root_residual: f64,
    /// Smallest `lhs − rhs` over non-vacuous samples.
    pub min_slack: Option<f64>,
}

/// Random (state, generator, α, β) with `β ≤ 2α − 1`, so the arccos argument
/// stays in domain. Dimensions cycle through `dims`.
pub fn uffink_sweep<R: Rng + ?Sized>(
    rng: &mut R,
    samples: usize,
    dims: &[usize],
    hbar: f64,
    tol: &Tolerances,
) -> Result<UffinkSweepSummary> {
    let mut summary =
        UffinkSweepSummary { samples, reached: 0, vacuous: 0, violations: 0, max_root_residual: 0.0, min_slack: None };
    let search = SearchParams::default();
    for k in 0..samples {
        let dim = dims[k % dims.len()];
        let s = random_state::<f64, _>(rng, dim);
        let a = random_observable(rng, dim, tol)?;
        let alpha: f64 = rng.random_range(0.51..0.99);
        let beta: f64 = rng.random_range(0.0..1.0) * (2.0 * alpha - 1.0);
        let beta = beta.max(1e-3);
        let report = uffink_check(&s, &a, alpha, beta, hbar, &search, tol)?;
        debug_assert!(report.domain_ok);
        if let Crossing::Reached { residual, .. } = report.crossing {
            summary.reached += 1;
            summary.max_root_residual = summary.max_root_residual.max(residual);
        }
        summary.vacuous += usize::from(report.vacuous);
        summary.violations += usize::from(!report.satisfied);
        if let (Some(l), Some(r)) = (report.lhs, report.rhs) {
            summary.min_slack = Some(summary.min_slack.map_or(l - r, |m| m.min(l - r)));
        }
    }
    Ok(summary)
}
