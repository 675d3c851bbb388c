//! Every numerical threshold used by the toolkit, in one record.
//!
//! Values are absolute unless the field name says otherwise. The CLI can
//! override any field by name.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Max-norm of `M - M†` accepted as Hermitian.
    pub hermitian: f64,
    /// Allowed deviation of a state's 2-norm from one.
    pub normalization: f64,
    /// Largest imaginary part tolerated in an expectation value.
    pub imaginary_part: f64,
    /// Negative variances above `-negative_variance` are clamped to zero.
    pub negative_variance: f64,
    /// Eigenvalues closer than `degeneracy_relative * max(1, spectral range)` merge.
    pub degeneracy_relative: f64,
    /// A relation holds when `lhs >= rhs - satisfied_slack`.
    pub satisfied_slack: f64,
    /// Branches whose Born mass does not exceed this are dropped.
    pub prune: f64,
    /// Residual `‖Aψ − ⟨A⟩ψ‖` under which ψ counts as an eigenstate.
    pub eigenstate: f64,
    /// Target `|overlap − β|` for the first-crossing search.
    pub root_residual: f64,
    /// Bracket width at which bisection stops regardless of residual.
    pub root_interval: f64,
    /// Slack on `|arg| <= 1` before the arccos bound is declared out of domain.
    pub arccos_domain: f64,
    /// Slack on cumulative mass when comparing to α.
    pub mass: f64,
    /// Smallest eigenvector component modulus used as the phase pivot.
    pub phase_pivot: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-10,
        normalization: 1e-10,
        imaginary_part: 1e-10,
        negative_variance: 1e-12,
        degeneracy_relative: 1e-9,
        satisfied_slack: 1e-9,
        prune: 1e-12,
        eigenstate: 1e-9,
        root_residual: 1e-10,
        root_interval: 1e-12,
        arccos_domain: 1e-12,
        mass: 1e-12,
        phase_pivot: 1e-8,
    };

    /// Sets a field by its serialized name. Returns `false` for unknown names.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        let slot = match name {
            "hermitian" => &mut self.hermitian,
            "normalization" => &mut self.normalization,
            "imaginary_part" => &mut self.imaginary_part,
            "negative_variance" => &mut self.negative_variance,
            "degeneracy_relative" => &mut self.degeneracy_relative,
            "satisfied_slack" => &mut self.satisfied_slack,
            "prune" => &mut self.prune,
            "eigenstate" => &mut self.eigenstate,
            "root_residual" => &mut self.root_residual,
            "root_interval" => &mut self.root_interval,
            "arccos_domain" => &mut self.arccos_domain,
            "mass" => &mut self.mass,
            "phase_pivot" => &mut self.phase_pivot,
            _ => return false,
        };
        *slot = value;
        true
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_by_name() {
        let mut tol = Tolerances::default();
        assert!(tol.set("satisfied_slack", 1e-6));
        assert_eq!(tol.satisfied_slack, 1e-6);
        assert!(!tol.set("nonsense", 1.0));
    }
}
