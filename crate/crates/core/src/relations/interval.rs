use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::states::BornDistribution;
use crate::tolerance::Tolerances;

/// Closed interval `[lo, hi]` of outcome values together with the
/// probability mass it contains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
    pub width: T,
    pub mass: T,
    /// Number of distribution points inside.
    pub points: usize,
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

/// Narrowest contiguous window of distribution points whose mass reaches `alpha`.
///
/// Ties on width go to the window with fewer points, then to the smaller `lo`.
/// Mass comparisons allow `tol.mass` of round-off below `alpha`.
pub fn minimal_width_interval<T: Real>(d: &BornDistribution<T>, alpha: T, tol: &Tolerances) -> Result<Interval<T>> {
    check_alpha(alpha.as_f64())?;
    let pts = d.points();
    let need = alpha - T::lit(tol.mass);
    let mut best: Option<Interval<T>> = None;
    for start in 0..pts.len() {
        // Masses are nonnegative, so the shortest feasible window from
        // `start` is also the narrowest.
        let mut mass = T::zero();
        let mut end = None;
        for (k, p) in pts.iter().enumerate().skip(start) {
            mass = mass + p.mass;
            if mass >= need {
                end = Some(k);
                break;
            }
        }
        let Some(end) = end else { break };
        let candidate = Interval {
            lo: pts[start].value,
            hi: pts[end].value,
            width: pts[end].value - pts[start].value,
            mass,
            points: end - start + 1,
        };
        best = match best {
            Some(b) if !better(&candidate, &b) => Some(b),
            _ => Some(candidate),
        };
    }
    // Total mass is one within tolerance, so some window always qualifies.
    best.ok_or_else(|| Error::InvalidDistribution("total mass below alpha".into()))
}

fn better<T: Real>(a: &Interval<T>, b: &Interval<T>) -> bool {
    if a.width != b.width {
        return a.width < b.width;
    }
    if a.points != b.points {
        return a.points < b.points;
    }
    a.lo < b.lo
}
