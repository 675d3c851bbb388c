use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::inner;
use crate::scalar::{cis, Real, C};
use crate::states::{check_dims, Observable, StateVector};
use crate::tolerance::Tolerances;

/// Scan window and resolution for the δθ search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    /// Upper end Θ_max of the scanned range; `None` means `2πħ/g` with `g`
    /// the smallest gap between distinct eigenvalues of the generator.
    pub window: Option<f64>,
    pub grid_points: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self { window: None, grid_points: 10_000 }
    }
}

impl SearchParams {
    pub fn resolve_window<T: Real>(&self, generator: &Observable<T>, hbar: T) -> T {
        match self.window {
            Some(w) => T::lit(w),
            // A single distinct eigenvalue makes the overlap constant; any window will do.
            None => T::TAU() * hbar / generator.smallest_gap().unwrap_or(T::one()),
        }
    }
}

/// `θ′ ↦ |⟨ψ| e^{iθ′A/ħ} |ψ⟩|` evaluated through the spectral weights of ψ.
#[derive(Debug, Clone)]
pub struct OverlapProfile<T> {
    weights: Vec<T>,
    frequencies: Vec<T>,
}

impl<T: Real> OverlapProfile<T> {
    pub fn new(s: &StateVector<T>, a: &Observable<T>, hbar: T) -> Result<Self> {
        check_dims(a.dim(), s.dim())?;
        if !(hbar > T::zero()) {
            return Err(Error::InvalidHbar(hbar.as_f64()));
        }
        let spectral = a.spectral();
        let weights = (0..spectral.dim()).map(|k| inner(&spectral.eigenvector(k), s.amplitudes()).norm_sqr()).collect();
        let frequencies = spectral.eigenvalues.iter().map(|&l| l / hbar).collect();
        Ok(Self { weights, frequencies })
    }

    pub fn at(&self, theta_prime: T) -> T {
        self.weights
            .iter()
            .zip(&self.frequencies)
            .fold(C::zero(), |acc, (&w, &f)| acc + cis(theta_prime * f) * C::new(w, T::zero()))
            .norm()
    }
}

/// `|⟨ψ_θ|ψ_{θ+θ′}⟩| = |⟨ψ| e^{iθ′A/ħ} |ψ⟩|`.
pub fn overlap_at<T: Real>(s: &StateVector<T>, a: &Observable<T>, theta_prime: T, hbar: T) -> Result<T> {
    Ok(OverlapProfile::new(s, a, hbar)?.at(theta_prime))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NotReachedReason {
    /// The overlap stayed at one across the window: ψ behaves as an eigenstate.
    Stationary,
    /// The overlap dipped but never to the requested level inside the window.
    AboveLevel,
}

/// Outcome of the first-crossing search for δθ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Crossing<T> {
    Reached {
        delta_theta: T,
        /// `|overlap(δθ) − β|`.
        residual: T,
        bracket_lo: T,
        bracket_hi: T,
    },
    NotReached {
        min_overlap: T,
        window: T,
        reason: NotReachedReason,
    },
}

impl<T: Real> Crossing<T> {
    pub fn delta_theta(&self) -> Option<T> {
        match *self {
            Crossing::Reached { delta_theta, .. } => Some(delta_theta),
            Crossing::NotReached { .. } => None,
        }
    }
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidBeta(beta))
    }
}

/// Smallest `θ′ > 0` at which the self-overlap of the family generated by
/// `a` falls to `beta`.
///
/// The window `(0, Θ_max]` is scanned on a uniform grid; the first grid
/// interval where `overlap − β` changes sign is refined by bisection.
pub fn delta_theta<T: Real>(
    s: &StateVector<T>,
    a: &Observable<T>,
    beta: T,
    hbar: T,
    search: &SearchParams,
    tol: &Tolerances,
) -> Result<Crossing<T>> {
    check_beta(beta.as_f64())?;
    if !(hbar > T::zero()) {
        return Err(Error::InvalidHbar(hbar.as_f64()));
    }
    if search.grid_points < 1 {
        return Err(Error::InvalidSearch("grid_points must be at least 1".into()));
    }
    let window = search.resolve_window(a, hbar);
    if !(window > T::zero()) || !window.is_finite() {
        return Err(Error::InvalidSearch(format!("window must be positive and finite, got {window}")));
    }
    let profile = OverlapProfile::new(s, a, hbar)?;
    let f = |t: T| profile.at(t) - beta;

    let n = search.grid_points;
    let step = window / T::from_usize(n).unwrap();
    let mut prev = T::zero();
    let mut min_overlap = profile.at(T::zero());
    for k in 1..=n {
        let theta = if k == n { window } else { step * T::from_usize(k).unwrap() };
        let value = f(theta);
        min_overlap = min_overlap.min(value + beta);
        if value <= T::zero() {
            return Ok(bisect(&f, prev, theta, tol));
        }
        prev = theta;
    }
    let reason = if min_overlap >= T::one() - T::lit(tol.eigenstate) {
        NotReachedReason::Stationary
    } else {
        NotReachedReason::AboveLevel
    };
    Ok(Crossing::NotReached { min_overlap, window, reason })
}

/// Refines a bracket with `f(lo) > 0 >= f(hi)`.
fn bisect<T: Real>(f: &impl Fn(T) -> T, mut lo: T, mut hi: T, tol: &Tolerances) -> Crossing<T> {
    let residual_tol = T::lit(tol.root_residual);
    let interval_tol = T::lit(tol.root_interval);
    let (bracket_lo, bracket_hi) = (lo, hi);
    let mut f_hi = f(hi);
    if f_hi.abs() > residual_tol {
        for _ in 0..200 {
            let mid = lo + (hi - lo) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            let f_mid = f(mid);
            if f_mid > T::zero() {
                lo = mid;
            } else {
                hi = mid;
                f_hi = f_mid;
            }
            if f_mid.abs() <= residual_tol {
                let residual = f_mid.abs();
                return Crossing::Reached { delta_theta: mid, residual, bracket_lo, bracket_hi };
            }
            if hi - lo <= interval_tol {
                break;
            }
        }
    }
    let f_lo = f(lo);
    let (delta_theta, residual) = if f_lo.abs() < f_hi.abs() { (lo, f_lo.abs()) } else { (hi, f_hi.abs()) };
    Crossing::Reached { delta_theta, residual, bracket_lo, bracket_hi }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::linalg::Matrix;

    const TOL: Tolerances = Tolerances::DEFAULT;

    fn sz() -> Observable<f64> {
        Observable::new(Matrix::from_diagonal(&[0.5, -0.5]), &TOL).unwrap()
    }

    fn plus_x() -> StateVector<f64> {
        StateVector::from_real(&[1.0, 1.0]).unwrap()
    }

    #[test]
    fn overlap_closed_form_on_qubit() {
        for t in [PI / 3.0, PI, 2.0 * PI] {
            let got = overlap_at(&plus_x(), &sz(), t, 1.0).unwrap();
            assert!((got - (t / 2.0).cos().abs()).abs() < 1e-14, "θ′ = {t}");
        }
        assert!((overlap_at(&plus_x(), &sz(), 0.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn overlap_of_eigenstate_is_one() {
        let s = StateVector::basis(2, 1);
        for t in [0.1, 1.0, 17.0] {
            assert!((overlap_at(&s, &sz(), t, 1.0).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn delta_theta_qubit() {
        let c = delta_theta(&plus_x(), &sz(), 0.6, 1.0, &SearchParams::default(), &TOL).unwrap();
        let expected = 2.0 * 0.6f64.acos();
        let Crossing::Reached { delta_theta: found, residual, .. } = c else { panic!("{c:?}") };
        assert!((found - expected).abs() < 1e-9);
        assert!((expected - 1.854590).abs() < 1e-6);
        assert!(residual <= 1e-10);

        let c = delta_theta(&plus_x(), &sz(), 0.99, 1.0, &SearchParams::default(), &TOL).unwrap();
        let got = c.delta_theta().unwrap();
        assert!((got - 2.0 * 0.99f64.acos()).abs() < 1e-8);
        assert!((got - 0.283079).abs() < 1e-6);
        assert!(got < found);
    }

    #[test]
    fn eigenstate_never_reaches() {
        let c = delta_theta(&StateVector::basis(2, 0), &sz(), 0.9, 1.0, &SearchParams::default(), &TOL).unwrap();
        let Crossing::NotReached { min_overlap, window, reason } = c else { panic!("{c:?}") };
        assert!((min_overlap - 1.0).abs() < 1e-15);
        assert!((window - 2.0 * PI).abs() < 1e-15);
        assert_eq!(reason, NotReachedReason::Stationary);
    }

    #[test]
    fn short_window_reports_minimum() {
        let search = SearchParams { window: Some(0.5), grid_points: 100 };
        let c = delta_theta(&plus_x(), &sz(), 0.6, 1.0, &search, &TOL).unwrap();
        let Crossing::NotReached { min_overlap, reason, .. } = c else { panic!() };
        assert_eq!(reason, NotReachedReason::AboveLevel);
        assert!((min_overlap - 0.25f64.cos()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = SearchParams::default();
        assert!(matches!(delta_theta(&plus_x(), &sz(), 1.0, 1.0, &s, &TOL), Err(Error::InvalidBeta(_))));
        assert!(matches!(delta_theta(&plus_x(), &sz(), 0.5, -1.0, &s, &TOL), Err(Error::InvalidHbar(_))));
        let zero = SearchParams { window: Some(0.0), grid_points: 10 };
        assert!(matches!(delta_theta(&plus_x(), &sz(), 0.5, 1.0, &zero, &TOL), Err(Error::InvalidSearch(_))));
    }
}
