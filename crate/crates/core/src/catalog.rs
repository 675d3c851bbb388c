//! Named, self-validating scenarios built from spin and orbital angular
//! momentum operators.
//!
//! Each scenario carries its observables, states and a list of expected
//! check results. [`Scenario::run`] evaluates every check through the public
//! operations of the other modules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::relations::{robertson_check, uffink_check, uffink_grid, SearchParams, SweepGrid, UffinkReport};
use crate::scalar::{Real, C};
use crate::states::{commutator, expectation, stddev, Observable, StateVector};
use crate::tolerance::Tolerances;
use crate::worlds::{decompose_worlds, joint_eigenvectors, repeated_measurement_chain, ChainOutcome};
use crate::{HermitianObservable, QuantumState};

/// Cartesian components of the spin-j representation.
#[derive(Debug, Clone)]
pub struct SpinOperators<T: Real> {
    pub x: Observable<T>,
    pub y: Observable<T>,
    pub z: Observable<T>,
}

/// Spin-`j` matrices in the basis `m = j, j−1, …, −j`.
///
/// Built from the ladder operator
/// `J₊|j,m⟩ = ħ√(j(j+1) − m(m+1)) |j,m+1⟩`, so `[S_x, S_y] = iħS_z`.
pub fn spin_operators<T: Real>(j: f64, hbar: T, tol: &Tolerances) -> Result<SpinOperators<T>> {
    let twice = 2.0 * j;
    if !(twice >= 0.0) || twice.fract() != 0.0 || twice > 1e6 {
        return Err(Error::InvalidSpin(j));
    }
    if !(hbar > T::zero()) {
        return Err(Error::InvalidHbar(hbar.as_f64()));
    }
    let dim = twice as usize + 1;
    let mut raise = Matrix::<T>::zeros(dim);
    // Row r holds m = j − r; J₊ maps column r+1 (m) to row r (m+1).
    for r in 0..dim.saturating_sub(1) {
        let m = j - (r + 1) as f64;
        let coef = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
        raise[(r, r + 1)] = C::new(hbar * T::lit(coef), T::zero());
    }
    let lower = raise.adjoint();
    let half = T::lit(0.5);
    let x = (&raise + &lower).scale_real(half);
    let y = (&raise - &lower).scale(C::new(T::zero(), -half));
    let z = Matrix::from_diagonal(&(0..dim).map(|r| hbar * T::lit(j - r as f64)).collect::<Vec<_>>());
    Ok(SpinOperators {
        x: Observable::new(x, tol)?.named("S_x"),
        y: Observable::new(y, tol)?.named("S_y"),
        z: Observable::new(z, tol)?.named("S_z"),
    })
}

/// Checks a scenario knows how to evaluate. Every variant names the
/// observables and states it uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Check {
    Expectation {
        state: String,
        observable: String,
    },
    Stddev {
        state: String,
        observable: String,
    },
    RobertsonLhs {
        state: String,
        a: String,
        b: String,
    },
    RobertsonRhs {
        state: String,
        a: String,
        b: String,
    },
    /// Observed value: `[lhs, rhs]`; `NaN` marks an undefined side.
    UffinkSides {
        state: String,
        generator: String,
        alpha: f64,
        beta: f64,
    },
    /// Observed value: `[1]` when the arccos argument is in domain, else `[0]`.
    UffinkDomain {
        state: String,
        generator: String,
        alpha: f64,
        beta: f64,
    },
    /// Observed value: `[cells whose domain flag disagrees with β ≤ 2α−1, violated cells]`.
    UffinkSweep {
        state: String,
        generator: String,
    },
    CommutatorMaxNorm {
        a: String,
        b: String,
    },
    JointCount {
        a: String,
        b: String,
    },
    /// Observed value: eigenvalue pairs of every joint eigenvector, flattened.
    JointEigenvalues {
        a: String,
        b: String,
    },
    WorldProbabilities {
        state: String,
        basis: String,
    },
    ChainFidelity {
        state: String,
        theta: String,
        a: String,
    },
    ChainLeafCount {
        state: String,
        theta: String,
        a: String,
        decoherent: bool,
    },
    /// Observed value: final θ-probabilities in ascending eigenvalue order.
    ChainFinalDistribution {
        state: String,
        theta: String,
        a: String,
        decoherent: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expected {
    /// Same length, every entry within `tol`.
    Values { values: Vec<f64>, tol: f64 },
    /// A single value strictly above `bound`.
    Above { bound: f64 },
}

impl Expected {
    fn values(values: &[f64], tol: f64) -> Self {
        Expected::Values { values: values.to_vec(), tol }
    }

    pub fn matches(&self, observed: &[f64]) -> bool {
        match self {
            Expected::Values { values, tol } => {
                values.len() == observed.len() && values.iter().zip(observed).all(|(e, o)| (e - o).abs() <= *tol)
            }
            Expected::Above { bound } => observed.len() == 1 && observed[0] > *bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedCheck {
    pub id: String,
    pub check: Check,
    pub expected: Expected,
    /// How the expected value was obtained.
    pub origin: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub id: String,
    /// `None` marks an undefined quantity.
    pub observed: Vec<Option<f64>>,
    pub expected: Expected,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub hbar: f64,
    pub observables: Vec<(String, HermitianObservable)>,
    pub states: Vec<(String, QuantumState)>,
    pub expected: Vec<ExpectedCheck>,
    /// Parameter grid for width/translation sweeps, when the scenario has one.
    pub sweep: Option<SweepGrid>,
}

pub const SCENARIO_NAMES: [&str; 4] = ["spin-half-sy-zero", "l0-joint", "figure1-qubit", "qubit-sz-sweep"];

/// Looks up a built-in scenario by its stable name.
pub fn scenario(name: &str, hbar: f64, tol: &Tolerances) -> Result<Option<Scenario>> {
    Ok(Some(match name {
        "spin-half-sy-zero" => scenario_spin_half_sy_zero(hbar, tol)?,
        "l0-joint" => scenario_l0_joint(hbar, tol)?,
        "figure1-qubit" => scenario_figure1_qubit(hbar, tol)?,
        "qubit-sz-sweep" => scenario_qubit_uffink_sweep(hbar, tol)?,
        _ => return Ok(None),
    }))
}

fn s(x: &str) -> String {
    x.to_owned()
}

fn check(id: &str, check: Check, expected: Expected, origin: &str) -> ExpectedCheck {
    ExpectedCheck { id: s(id), check, expected, origin: s(origin) }
}

/// `2 arccos(0.6)`: first θ′ with `|cos(θ′/2)| = 0.6`.
fn qubit_delta_theta() -> f64 {
    2.0 * 0.6f64.acos()
}

/// |↑⟩ with S_x, S_y, S_z: the commutator bound for (S_x, S_z) is zero
/// while the width bound generated by S_y is not.
pub fn scenario_spin_half_sy_zero(hbar: f64, tol: &Tolerances) -> Result<Scenario> {
    let spin = spin_operators::<f64>(0.5, hbar, tol)?;
    let up = StateVector::basis(2, 0);
    let uffink = |alpha, beta| Check::UffinkSides { state: s("up"), generator: s("S_y"), alpha, beta };
    let expected = vec![
        check(
            "robertson-rhs-sx-sz",
            Check::RobertsonRhs { state: s("up"), a: s("S_x"), b: s("S_z") },
            Expected::values(&[0.0], 1e-12),
            "⟨S_y⟩ = 0 on |↑⟩",
        ),
        check(
            "robertson-lhs-sx-sz",
            Check::RobertsonLhs { state: s("up"), a: s("S_x"), b: s("S_z") },
            Expected::values(&[0.0], 1e-12),
            "|↑⟩ is an S_z eigenstate",
        ),
        check(
            "stddev-sx",
            Check::Stddev { state: s("up"), observable: s("S_x") },
            Expected::values(&[hbar / 2.0], 1e-12),
            "⟨S_x⟩ = 0, ⟨S_x²⟩ = ħ²/4",
        ),
        check(
            "expectation-sy",
            Check::Expectation { state: s("up"), observable: s("S_y") },
            Expected::values(&[0.0], 1e-12),
            "symmetry",
        ),
        check(
            "uffink-sy-0.9-0.6",
            uffink(0.9, 0.6),
            Expected::values(&[qubit_delta_theta() * hbar, hbar * (0.7f64 / 0.9).acos()], 1e-6),
            "|↑⟩ is an equal superposition of S_y eigenstates: δθ = 2 arccos β, W = ħ",
        ),
    ];
    Ok(Scenario {
        name: s("spin-half-sy-zero"),
        description: s("spin-1/2 in |up>: commutator bound silent for (S_x, S_z), width bound informative"),
        hbar,
        observables: vec![(s("S_x"), spin.x), (s("S_y"), spin.y), (s("S_z"), spin.z)],
        states: vec![(s("up"), up)],
        expected,
        sweep: None,
    })
}

/// Orbital l=0 ⊕ l=1 in four dimensions; the l=0 vector is a shared
/// eigenvector of the non-commuting L_x and L_z.
pub fn scenario_l0_joint(hbar: f64, tol: &Tolerances) -> Result<Scenario> {
    let spin1 = spin_operators::<f64>(1.0, hbar, tol)?;
    let zero = Matrix::<f64>::zeros(1);
    let embed = |o: &Observable<f64>, name: &str| -> Result<Observable<f64>> {
        Ok(Observable::new(Matrix::block_diagonal(&[&zero, o.matrix()]), tol)?.named(name))
    };
    let lx = embed(&spin1.x, "L_x")?;
    let ly = embed(&spin1.y, "L_y")?;
    let lz = embed(&spin1.z, "L_z")?;
    let expected = vec![
        check(
            "joint-count",
            Check::JointCount { a: s("L_x"), b: s("L_z") },
            Expected::values(&[1.0], 0.0),
            "only the l=0 vector is annihilated by both",
        ),
        check(
            "joint-eigenvalues",
            Check::JointEigenvalues { a: s("L_x"), b: s("L_z") },
            Expected::values(&[0.0, 0.0], 1e-9),
            "l=0 carries no angular momentum",
        ),
        check(
            "commutator-nonzero",
            Check::CommutatorMaxNorm { a: s("L_x"), b: s("L_z") },
            Expected::Above { bound: 0.1 * hbar * hbar },
            "spin-1 block: [L_x, L_z] = −iħL_y",
        ),
        check(
            "worlds-l0-lz",
            Check::WorldProbabilities { state: s("l0"), basis: s("L_z") },
            Expected::values(&[1.0], 1e-12),
            "eigenstate gives one world",
        ),
    ];
    Ok(Scenario {
        name: s("l0-joint"),
        description: s("l=0 (+) l=1: shared eigenvector of non-commuting L_x and L_z"),
        hbar,
        observables: vec![(s("L_x"), lx), (s("L_y"), ly), (s("L_z"), lz)],
        states: vec![(s("l0"), StateVector::basis(4, 0))],
        expected,
        sweep: None,
    })
}

/// Repeated measurement of a qubit: θ = S_x, a = S_z, prepared in |+x⟩.
pub fn scenario_figure1_qubit(hbar: f64, tol: &Tolerances) -> Result<Scenario> {
    let spin = spin_operators::<f64>(0.5, hbar, tol)?;
    let plus_x = spin.x.eigenstate(1);
    let chain = |decoherent| (s("plus_x"), s("S_x"), s("S_z"), decoherent);
    let (state, theta, a, _) = chain(false);
    let expected = vec![
        check(
            "coherent-fidelity",
            Check::ChainFidelity { state: state.clone(), theta: theta.clone(), a: a.clone() },
            Expected::values(&[1.0], 1e-10),
            "leaf amplitudes αγ+βε = 1, αδ+βζ = 0",
        ),
        check(
            "coherent-final-distribution",
            Check::ChainFinalDistribution {
                state: state.clone(),
                theta: theta.clone(),
                a: a.clone(),
                decoherent: false,
            },
            Expected::values(&[0.0, 1.0], 1e-10),
            "interference restores θ₁",
        ),
        check(
            "decoherent-leaf-count",
            Check::ChainLeafCount { state: state.clone(), theta: theta.clone(), a: a.clone(), decoherent: true },
            Expected::values(&[4.0], 0.0),
            "two a-worlds, each split into two θ-worlds",
        ),
        check(
            "decoherent-final-distribution",
            Check::ChainFinalDistribution { state, theta, a, decoherent: true },
            Expected::values(&[0.5, 0.5], 1e-10),
            "|αγ|² + |βε|² = |αδ|² + |βζ|² = 1/2",
        ),
    ];
    Ok(Scenario {
        name: s("figure1-qubit"),
        description: s("prepare |+x>, measure S_z, then S_x again, with and without decoherence"),
        hbar,
        observables: vec![(s("S_x"), spin.x), (s("S_z"), spin.z)],
        states: vec![(s("plus_x"), plus_x)],
        expected,
        sweep: None,
    })
}

/// |+x⟩ with generator S_z over the standard (α, β) grid.
pub fn scenario_qubit_uffink_sweep(hbar: f64, tol: &Tolerances) -> Result<Scenario> {
    let spin = spin_operators::<f64>(0.5, hbar, tol)?;
    let plus_x = spin.x.eigenstate(1);
    let sides = |alpha, beta| Check::UffinkSides { state: s("plus_x"), generator: s("S_z"), alpha, beta };
    let expected = vec![
        check(
            "cell-0.9-0.6",
            sides(0.9, 0.6),
            Expected::values(&[qubit_delta_theta() * hbar, hbar * (0.7f64 / 0.9).acos()], 1e-6),
            "closed form: δθ = 2 arccos β, W = ħ, rhs = ħ arccos(0.7/0.9)",
        ),
        check(
            "cell-0.8-0.6",
            sides(0.8, 0.6),
            Expected::values(&[qubit_delta_theta() * hbar, 0.0], 1e-6),
            "arccos argument exactly 1",
        ),
        check(
            "cell-0.5-0.6-domain",
            Check::UffinkDomain { state: s("plus_x"), generator: s("S_z"), alpha: 0.5, beta: 0.6 },
            Expected::values(&[0.0], 0.0),
            "argument (1 + 0.6 − 0.5)/0.5 = 2.2",
        ),
        check(
            "grid",
            Check::UffinkSweep { state: s("plus_x"), generator: s("S_z") },
            Expected::values(&[0.0, 0.0], 0.0),
            "domain ⇔ β ≤ 2α − 1; bound holds on every in-domain cell",
        ),
    ];
    Ok(Scenario {
        name: s("qubit-sz-sweep"),
        description: s("|+x> with generator S_z over alpha in 0.55..0.95, beta in 0.05..0.95"),
        hbar,
        observables: vec![(s("S_z"), spin.z), (s("S_x"), spin.x)],
        states: vec![(s("plus_x"), plus_x)],
        expected,
        sweep: Some(SweepGrid::standard()),
    })
}

/// Whether `β ≤ 2α − 1` on a grid of multiples of 1/20, decided in integers.
fn below_line_on_grid(alpha: f64, beta: f64) -> bool {
    let (ka, kb) = ((alpha * 20.0).round() as i64, (beta * 20.0).round() as i64);
    kb <= 2 * ka - 20
}

impl Scenario {
    pub fn observable(&self, name: &str) -> Result<&HermitianObservable> {
        self.observables
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, o)| o)
            .ok_or_else(|| Error::UnknownName(format!("observable {name} in scenario {}", self.name)))
    }

    pub fn state(&self, name: &str) -> Result<&QuantumState> {
        self.states
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
            .ok_or_else(|| Error::UnknownName(format!("state {name} in scenario {}", self.name)))
    }

    /// Every name referenced by a check resolves.
    pub fn validate(&self) -> Result<()> {
        for e in &self.expected {
            let (states, observables) = e.check.references();
            for st in states {
                self.state(st)?;
            }
            for ob in observables {
                self.observable(ob)?;
            }
        }
        Ok(())
    }

    pub fn chain(
        &self,
        state: &str,
        theta: &str,
        a: &str,
        decoherent: bool,
        tol: &Tolerances,
    ) -> Result<ChainOutcome<f64>> {
        repeated_measurement_chain(
            self.state(state)?,
            self.observable(theta)?,
            self.observable(a)?,
            decoherent,
            self.hbar,
            tol,
        )
    }

    fn uffink(
        &self,
        state: &str,
        generator: &str,
        alpha: f64,
        beta: f64,
        tol: &Tolerances,
    ) -> Result<UffinkReport<f64>> {
        uffink_check(
            self.state(state)?,
            self.observable(generator)?,
            alpha,
            beta,
            self.hbar,
            &SearchParams::default(),
            tol,
        )
    }

    /// Evaluates one check, returning the observed values.
    pub fn evaluate(&self, c: &Check, tol: &Tolerances) -> Result<Vec<f64>> {
        Ok(match c {
            Check::Expectation { state, observable } => {
                vec![expectation(self.state(state)?, self.observable(observable)?, tol)?]
            }
            Check::Stddev { state, observable } => vec![stddev(self.state(state)?, self.observable(observable)?, tol)?],
            Check::RobertsonLhs { state, a, b } => {
                vec![robertson_check(self.state(state)?, self.observable(a)?, self.observable(b)?, tol)?.lhs]
            }
            Check::RobertsonRhs { state, a, b } => {
                vec![robertson_check(self.state(state)?, self.observable(a)?, self.observable(b)?, tol)?.rhs]
            }
            Check::UffinkSides { state, generator, alpha, beta } => {
                let r = self.uffink(state, generator, *alpha, *beta, tol)?;
                vec![r.lhs.unwrap_or(f64::NAN), r.rhs.unwrap_or(f64::NAN)]
            }
            Check::UffinkDomain { state, generator, alpha, beta } => {
                let r = self.uffink(state, generator, *alpha, *beta, tol)?;
                vec![if r.domain_ok { 1.0 } else { 0.0 }]
            }
            Check::UffinkSweep { state, generator } => {
                let grid = self.sweep.clone().unwrap_or_else(SweepGrid::standard);
                let reports = uffink_grid(
                    self.state(state)?,
                    self.observable(generator)?,
                    &grid,
                    self.hbar,
                    &SearchParams::default(),
                    tol,
                )?;
                let mismatched = reports.iter().filter(|r| r.domain_ok != below_line_on_grid(r.alpha, r.beta)).count();
                let violated = reports.iter().filter(|r| !r.satisfied).count();
                vec![mismatched as f64, violated as f64]
            }
            Check::CommutatorMaxNorm { a, b } => {
                vec![commutator(self.observable(a)?, self.observable(b)?)?.max_norm()]
            }
            Check::JointCount { a, b } => {
                vec![joint_eigenvectors(self.observable(a)?, self.observable(b)?, 1e-9, tol)?.len() as f64]
            }
            Check::JointEigenvalues { a, b } => {
                joint_eigenvectors(self.observable(a)?, self.observable(b)?, 1e-9, tol)?
                    .iter()
                    .flat_map(|j| [j.value_a, j.value_b])
                    .collect()
            }
            Check::WorldProbabilities { state, basis } => {
                decompose_worlds(self.state(state)?, self.observable(basis)?, tol)?
                    .iter()
                    .map(|w| w.probability)
                    .collect()
            }
            Check::ChainFidelity { state, theta, a } => {
                vec![self.chain(state, theta, a, false, tol)?.fidelity.unwrap_or(f64::NAN)]
            }
            Check::ChainLeafCount { state, theta, a, decoherent } => {
                vec![self.chain(state, theta, a, *decoherent, tol)?.leaf_count as f64]
            }
            Check::ChainFinalDistribution { state, theta, a, decoherent } => {
                self.chain(state, theta, a, *decoherent, tol)?.final_outcomes.iter().map(|o| o.probability).collect()
            }
        })
    }

    /// Runs every expected check.
    pub fn run(&self, tol: &Tolerances) -> Result<Vec<CheckOutcome>> {
        self.expected
            .iter()
            .map(|e| {
                let observed = self.evaluate(&e.check, tol)?;
                Ok(CheckOutcome {
                    id: e.id.clone(),
                    passed: e.expected.matches(&observed),
                    observed: observed.iter().map(|&x| x.is_finite().then_some(x)).collect(),
                    expected: e.expected.clone(),
                })
            })
            .collect()
    }
}

impl Check {
    /// Names of the states and observables this check reads.
    pub fn references(&self) -> (Vec<&str>, Vec<&str>) {
        match self {
            Check::Expectation { state, observable } | Check::Stddev { state, observable } => {
                (vec![state], vec![observable])
            }
            Check::RobertsonLhs { state, a, b } | Check::RobertsonRhs { state, a, b } => (vec![state], vec![a, b]),
            Check::UffinkSides { state, generator, .. }
            | Check::UffinkDomain { state, generator, .. }
            | Check::UffinkSweep { state, generator } => (vec![state], vec![generator]),
            Check::CommutatorMaxNorm { a, b } | Check::JointCount { a, b } | Check::JointEigenvalues { a, b } => {
                (vec![], vec![a, b])
            }
            Check::WorldProbabilities { state, basis } => (vec![state], vec![basis]),
            Check::ChainFidelity { state, theta, a }
            | Check::ChainLeafCount { state, theta, a, .. }
            | Check::ChainFinalDistribution { state, theta, a, .. } => (vec![state], vec![theta, a]),
        }
    }
}
