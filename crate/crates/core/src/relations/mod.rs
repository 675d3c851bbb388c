//! Uncertainty relations: the commutator bounds on standard deviations and
//! the width/translation-width bound, plus the two numerical kernels the
//! latter needs.

mod crossing;
mod interval;

pub use crossing::{delta_theta, overlap_at, Crossing, NotReachedReason, OverlapProfile, SearchParams};
pub use interval::{minimal_width_interval, Interval};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::Matrix;
use crate::scalar::Real;
use crate::states::{self, commutator, eigenvalue_distribution, matrix_element, Observable, StateVector};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    /// `ΔA ΔB ≥ ½|⟨[A,B]⟩|` with standard deviations.
    Robertson,
    /// `(ΔA)²(ΔB)² ≥ ¼|⟨[A,B]⟩|² + ¼⟨{A−⟨A⟩, B−⟨B⟩}⟩²` with variances.
    Schrodinger,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelationReport<T> {
    pub kind: RelationKind,
    pub lhs: T,
    pub rhs: T,
    pub slack: T,
    pub satisfied: bool,
}

impl<T: Real> RelationReport<T> {
    fn new(kind: RelationKind, lhs: T, rhs: T, tol: &Tolerances) -> Self {
        Self { kind, lhs, rhs, slack: lhs - rhs, satisfied: lhs >= rhs - T::lit(tol.satisfied_slack) }
    }
}

fn half_commutator_expectation<T: Real>(s: &StateVector<T>, a: &Observable<T>, b: &Observable<T>) -> Result<T> {
    let comm = commutator(a, b)?;
    Ok(matrix_element(s, &comm)?.norm() / T::lit(2.0))
}

pub fn robertson_check<T: Real>(
    s: &StateVector<T>,
    a: &Observable<T>,
    b: &Observable<T>,
    tol: &Tolerances,
) -> Result<RelationReport<T>> {
    let rhs = half_commutator_expectation(s, a, b)?;
    let lhs = states::stddev(s, a, tol)? * states::stddev(s, b, tol)?;
    Ok(RelationReport::new(RelationKind::Robertson, lhs, rhs, tol))
}

pub fn schrodinger_check<T: Real>(
    s: &StateVector<T>,
    a: &Observable<T>,
    b: &Observable<T>,
    tol: &Tolerances,
) -> Result<RelationReport<T>> {
    let half_comm = half_commutator_expectation(s, a, b)?;
    let centered = |o: &Observable<T>| -> Result<Matrix<T>> {
        let mean = states::expectation(s, o, tol)?;
        Ok(o.matrix() - &Matrix::identity(o.dim()).scale_real(mean))
    };
    let (ca, cb) = (centered(a)?, centered(b)?);
    let anti = &(&ca * &cb) + &(&cb * &ca);
    // Expectation of a Hermitian operator: real up to round-off.
    let half_anti = matrix_element(s, &anti)?.re / T::lit(2.0);
    let rhs = half_comm * half_comm + half_anti * half_anti;
    let lhs = states::variance(s, a, tol)? * states::variance(s, b, tol)?;
    Ok(RelationReport::new(RelationKind::Schrodinger, lhs, rhs, tol))
}

/// Result of evaluating `δθ · W ≥ ħ arccos((1+β−α)/α)` on one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UffinkReport<T> {
    pub alpha: T,
    pub beta: T,
    pub hbar: T,
    pub w_interval: Interval<T>,
    pub crossing: Crossing<T>,
    pub delta_theta: Option<T>,
    /// `(1+β−α)/α`.
    pub argument: T,
    pub domain_ok: bool,
    /// `β ≥ 2α − 1`, recorded alongside the arccos domain check.
    pub beta_at_least_two_alpha_minus_one: bool,
    pub lhs: Option<T>,
    pub rhs: Option<T>,
    pub satisfied: bool,
    /// True when there is no bound to violate (out of domain or δθ not reached).
    pub vacuous: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn uffink_check<T: Real>(
    s: &StateVector<T>,
    a: &Observable<T>,
    alpha: T,
    beta: T,
    hbar: T,
    search: &SearchParams,
    tol: &Tolerances,
) -> Result<UffinkReport<T>> {
    interval::check_alpha(alpha.as_f64())?;
    crossing::check_beta(beta.as_f64())?;
    let distribution = eigenvalue_distribution(s, a)?;
    let w_interval = minimal_width_interval(&distribution, alpha, tol)?;
    let crossing = delta_theta(s, a, beta, hbar, search, tol)?;
    let delta = crossing.delta_theta();

    let two = T::lit(2.0);
    let argument = (T::one() + beta - alpha) / alpha;
    let domain_ok = argument.abs() <= T::one() + T::lit(tol.arccos_domain);
    let rhs = domain_ok.then(|| hbar * argument.max(-T::one()).min(T::one()).acos());
    let lhs = delta.map(|d| d * w_interval.width);

    let (satisfied, vacuous) = match (lhs, rhs) {
        (Some(l), Some(r)) => (l >= r - T::lit(tol.satisfied_slack), false),
        _ => (true, true),
    };
    Ok(UffinkReport {
        alpha,
        beta,
        hbar,
        w_interval,
        crossing,
        delta_theta: delta,
        argument,
        domain_ok,
        beta_at_least_two_alpha_minus_one: beta >= two * alpha - T::one(),
        lhs,
        rhs,
        satisfied,
        vacuous,
    })
}

/// Rectangular (α, β) grid; cells are ordered α-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl SweepGrid {
    /// α ∈ {0.55, 0.60, …, 0.95} × β ∈ {0.05, 0.10, …, 0.95}.
    pub fn standard() -> Self {
        Self {
            alphas: (11..=19).map(|k| k as f64 / 20.0).collect(),
            betas: (1..=19).map(|k| k as f64 / 20.0).collect(),
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.alphas.iter().flat_map(move |&a| self.betas.iter().map(move |&b| (a, b)))
    }

    pub fn len(&self) -> usize {
        self.alphas.len() * self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `uffink_check` on every cell of `grid`.
pub fn uffink_grid<T: Real>(
    s: &StateVector<T>,
    a: &Observable<T>,
    grid: &SweepGrid,
    hbar: T,
    search: &SearchParams,
    tol: &Tolerances,
) -> Result<Vec<UffinkReport<T>>> {
    grid.cells().map(|(alpha, beta)| uffink_check(s, a, T::lit(alpha), T::lit(beta), hbar, search, tol)).collect()
}

/// `|⟨ψ_θ|ψ_{θ+θ′}⟩|` by building both states explicitly.
pub fn literal_overlap<T: Real>(s: &StateVector<T>, a: &Observable<T>, theta: T, theta_prime: T, hbar: T) -> Result<T> {
    let psi_theta = s.evolve(&a.unitary_exp(theta, hbar)?)?;
    let psi_shifted = s.evolve(&a.unitary_exp(theta + theta_prime, hbar)?)?;
    Ok(psi_theta.inner(&psi_shifted)?.norm())
}
