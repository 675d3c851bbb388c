//! Measurement as branching: first-kind measurements, world decompositions,
//! the repeated-measurement tree with and without decoherence, and shared
//! eigenvectors of two observables.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, eig_hermitian, inner, orthonormalize, phase_fix, Matrix};
use crate::scalar::{Real, C};
use crate::states::{check_dims, matrix_element, Observable, StateVector};
use crate::tolerance::Tolerances;

/// One outcome of a measurement of the first kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de> + Real"))]
pub struct MeasurementBranch<T: Real> {
    pub eigenvalue: T,
    /// Index into the observable's merged eigenspaces.
    pub eigenspace: usize,
    /// `⟨post|ψ⟩`; for a nondegenerate outcome this is `⟨a|ψ⟩`.
    pub amplitude: C<T>,
    pub post_state: StateVector<T>,
}

impl<T: Real> MeasurementBranch<T> {
    pub fn probability(&self) -> T {
        self.amplitude.norm_sqr()
    }
}

/// Splits `s` into one branch per outcome of `a` with non-negligible mass.
///
/// The post-measurement state is the normalized eigenspace projection,
/// phase-fixed like the spectral eigenvectors, so `amplitude · post_state`
/// equals the projection itself.
pub fn measure_first_kind<T: Real>(
    s: &StateVector<T>,
    a: &Observable<T>,
    tol: &Tolerances,
) -> Result<Vec<MeasurementBranch<T>>> {
    check_dims(a.dim(), s.dim())?;
    let mut branches = Vec::new();
    for (index, space) in a.eigenspaces().iter().enumerate() {
        let projected = a.project(space, s.amplitudes());
        let norm = linalg::norm(&projected);
        if norm * norm <= T::lit(tol.prune) {
            continue;
        }
        let inv = C::new(T::one() / norm, T::zero());
        let mut post: Vec<C<T>> = projected.into_iter().map(|z| z * inv).collect();
        phase_fix(&mut post, T::lit(tol.phase_pivot));
        let amplitude = inner(&post, s.amplitudes());
        branches.push(MeasurementBranch {
            eigenvalue: space.value,
            eigenspace: index,
            amplitude,
            post_state: StateVector::from_unit_unchecked(post),
        });
    }
    Ok(branches)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct World<T> {
    pub label: String,
    pub eigenvalue: T,
    pub amplitude: C<T>,
    pub probability: T,
}

/// Worlds of `s` in the eigenbasis of `basis`, one per outcome.
pub fn decompose_worlds<T: Real>(s: &StateVector<T>, basis: &Observable<T>, tol: &Tolerances) -> Result<Vec<World<T>>> {
    Ok(measure_first_kind(s, basis, tol)?
        .into_iter()
        .map(|b| World {
            label: format!("{}={}", basis.name(), format_value(b.eigenvalue)),
            eigenvalue: b.eigenvalue,
            amplitude: b.amplitude,
            probability: b.probability(),
        })
        .collect())
}

/// Short decimal rendering used in pointer labels.
pub fn format_value<T: Real>(x: T) -> String {
    let x = x.as_f64();
    let rounded = (x * 1e9).round() / 1e9;
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    format!("{rounded}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reading<T> {
    pub observable: String,
    pub value: T,
}

/// Apparatus pointer state `R(·)` and the readings that led to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointerRecord<T> {
    pub label: String,
    pub history: Vec<Reading<T>>,
}

impl<T: Real> PointerRecord<T> {
    fn extended(&self, observable: &Observable<T>, value: T) -> Self {
        let mut history = self.history.clone();
        history.push(Reading { observable: observable.name().to_owned(), value });
        Self { label: format!("R({}={})", observable.name(), format_value(value)), history }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de> + Real"))]
pub struct BranchNode<T: Real> {
    pub pointer: PointerRecord<T>,
    pub system_state: StateVector<T>,
    /// Amplitude of this world relative to the root (product along the path).
    pub amplitude: C<T>,
    /// Amplitude of the last split alone, e.g. `⟨a₁|θ₁⟩`.
    pub relative_amplitude: C<T>,
    /// Index of the recorded outcome in the measured observable's eigenspaces.
    pub outcome: usize,
    pub children: Vec<BranchNode<T>>,
}

impl<T: Real> BranchNode<T> {
    pub fn probability(&self) -> T {
        self.amplitude.norm_sqr()
    }

    fn split(&mut self, observable: &Observable<T>, tol: &Tolerances) -> Result<()> {
        for b in measure_first_kind(&self.system_state, observable, tol)? {
            self.children.push(BranchNode {
                pointer: self.pointer.extended(observable, b.eigenvalue),
                amplitude: self.amplitude * b.amplitude,
                relative_amplitude: b.amplitude,
                system_state: b.post_state,
                outcome: b.eigenspace,
                children: Vec::new(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de> + Real"))]
pub struct BranchTree<T: Real> {
    pub root: BranchNode<T>,
    /// Leaves of a decoherent tree never interfere.
    pub decoherent: bool,
    pub hbar: T,
}

impl<T: Real> BranchTree<T> {
    /// Nodes at each depth, root first.
    pub fn levels(&self) -> Vec<Vec<&BranchNode<T>>> {
        let mut levels = vec![vec![&self.root]];
        loop {
            let next: Vec<_> = levels.last().unwrap().iter().flat_map(|n| n.children.iter()).collect();
            if next.is_empty() {
                break;
            }
            levels.push(next);
        }
        levels
    }

    pub fn leaves(&self) -> Vec<&BranchNode<T>> {
        self.levels().pop().unwrap_or_default()
    }

    /// `Σ |amplitude|²` over the nodes at each depth.
    pub fn probability_by_depth(&self) -> Vec<T> {
        self.levels().iter().map(|level| level.iter().map(|n| n.probability()).sum()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalOutcome<T> {
    pub eigenvalue: T,
    /// Summed amplitude for coherent trees; absent for decoherent ones.
    pub amplitude: Option<C<T>>,
    pub probability: T,
    /// Leaves contributing to this outcome.
    pub leaves: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de> + Real"))]
pub struct ChainOutcome<T: Real> {
    pub tree: BranchTree<T>,
    pub prepared_eigenvalue: T,
    pub leaf_count: usize,
    pub final_outcomes: Vec<FinalOutcome<T>>,
    /// Sum of all leaf states, only for coherent trees.
    pub recombined_state: Option<StateVector<T>>,
    /// `|⟨prepared|recombined⟩|²`.
    pub fidelity: Option<T>,
}

impl<T: Real> ChainOutcome<T> {
    pub fn probability_of(&self, eigenvalue: T, tol: T) -> T {
        self.final_outcomes.iter().filter(|o| (o.eigenvalue - eigenvalue).abs() <= tol).map(|o| o.probability).sum()
    }
}

/// Prepared θ-eigenstate, then an `a`-measurement, then a θ-measurement.
///
/// Coherent trees add the leaf states back together before squaring;
/// decoherent trees keep every leaf as a separate world.
pub fn repeated_measurement_chain<T: Real>(
    prepared: &StateVector<T>,
    theta_obs: &Observable<T>,
    a_obs: &Observable<T>,
    decoherent: bool,
    hbar: T,
    tol: &Tolerances,
) -> Result<ChainOutcome<T>> {
    check_dims(theta_obs.dim(), prepared.dim())?;
    check_dims(theta_obs.dim(), a_obs.dim())?;
    if !(hbar > T::zero()) {
        return Err(Error::InvalidHbar(hbar.as_f64()));
    }
    let mean = matrix_element(prepared, theta_obs.matrix())?.re;
    let applied = theta_obs.matrix().apply(prepared.amplitudes());
    let deviation: Vec<C<T>> =
        applied.iter().zip(prepared.amplitudes()).map(|(&x, &p)| x - p * C::new(mean, T::zero())).collect();
    let residual = linalg::norm(&deviation);
    if residual > T::lit(tol.eigenstate) {
        return Err(Error::NotEigenstate { residual: residual.as_f64() });
    }

    let root_pointer = PointerRecord { label: String::new(), history: Vec::new() }.extended(theta_obs, mean);
    let mut root = BranchNode {
        pointer: root_pointer,
        system_state: prepared.clone(),
        amplitude: C::one(),
        relative_amplitude: C::one(),
        outcome: 0,
        children: Vec::new(),
    };
    root.split(a_obs, tol)?;
    for child in &mut root.children {
        child.split(theta_obs, tol)?;
    }
    let tree = BranchTree { root, decoherent, hbar };

    let leaves = tree.leaves();
    let leaf_count = leaves.len();
    let mut groups: Vec<(usize, Vec<&BranchNode<T>>)> = Vec::new();
    for leaf in &leaves {
        match groups.iter_mut().find(|(k, _)| *k == leaf.outcome) {
            Some((_, members)) => members.push(leaf),
            None => groups.push((leaf.outcome, vec![leaf])),
        }
    }
    groups.sort_by_key(|(k, _)| *k);

    let dim = prepared.dim();
    let mut final_outcomes = Vec::with_capacity(groups.len());
    let mut total = vec![C::zero(); dim];
    for (outcome, members) in &groups {
        let eigenvalue = theta_obs.eigenspaces()[*outcome].value;
        if decoherent {
            final_outcomes.push(FinalOutcome {
                eigenvalue,
                amplitude: None,
                probability: members.iter().map(|n| n.probability()).sum(),
                leaves: members.len(),
            });
            continue;
        }
        let mut summed = vec![C::zero(); dim];
        for n in members {
            for (acc, &z) in summed.iter_mut().zip(n.system_state.amplitudes()) {
                *acc = *acc + n.amplitude * z;
            }
        }
        let norm = linalg::norm(&summed);
        let reference = if norm * norm > T::lit(tol.prune) {
            let inv = C::new(T::one() / norm, T::zero());
            let mut r: Vec<C<T>> = summed.iter().map(|&z| z * inv).collect();
            phase_fix(&mut r, T::lit(tol.phase_pivot));
            r
        } else {
            members[0].system_state.amplitudes().to_vec()
        };
        for (acc, &z) in total.iter_mut().zip(&summed) {
            *acc = *acc + z;
        }
        final_outcomes.push(FinalOutcome {
            eigenvalue,
            amplitude: Some(inner(&reference, &summed)),
            probability: norm * norm,
            leaves: members.len(),
        });
    }

    let (recombined_state, fidelity) = if decoherent {
        (None, None)
    } else {
        let state = StateVector::normalized(total)?;
        let fidelity = prepared.fidelity(&state)?;
        (Some(state), Some(fidelity))
    };
    Ok(ChainOutcome { tree, prepared_eigenvalue: mean, leaf_count, final_outcomes, recombined_state, fidelity })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de> + Real"))]
pub struct JointEigenvector<T: Real> {
    pub vector: StateVector<T>,
    pub value_a: T,
    pub value_b: T,
    pub residual_a: T,
    pub residual_b: T,
}

/// Orthonormal vectors that are eigenvectors of both `a` and `b`.
///
/// Inside each eigenspace of `a`, the subspace mapped back into itself by
/// `b` is isolated first; `b` compressed to that subspace is then
/// diagonalized. Only vectors whose residuals under both operators are
/// within `tol` are returned.
pub fn joint_eigenvectors<T: Real>(
    a: &Observable<T>,
    b: &Observable<T>,
    tol: T,
    tolerances: &Tolerances,
) -> Result<Vec<JointEigenvector<T>>> {
    check_dims(a.dim(), b.dim())?;
    if !(tol > T::zero()) {
        return Err(Error::InvalidTolerance(tol.as_f64()));
    }
    let bm = b.matrix();
    let scale = T::one().max(bm.max_norm());
    let candidate_tol = tol.max(T::lit(1e-7) * scale);
    let mut found = Vec::new();
    for space in a.eigenspaces() {
        let basis: Vec<Vec<C<T>>> = space.columns.clone().map(|k| a.spectral().eigenvector(k)).collect();
        // Component of B q_i leaving the eigenspace.
        let leak: Vec<Vec<C<T>>> = basis
            .iter()
            .map(|q| {
                let mut w = bm.apply(q);
                for p in &basis {
                    let c = inner(p, &w);
                    for (x, y) in w.iter_mut().zip(p) {
                        *x = *x - c * y;
                    }
                }
                w
            })
            .collect();
        let gram = gram_matrix(&leak);
        let gram_eig = eig_hermitian(&gram, tolerances)?;
        let invariant: Vec<Vec<C<T>>> = gram_eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &g)| g.max(T::zero()).sqrt() <= candidate_tol)
            .map(|(k, _)| combine(&basis, &gram_eig.eigenvector(k)))
            .collect();
        let invariant = orthonormalize(invariant, T::lit(0.5));
        if invariant.is_empty() {
            continue;
        }
        let images: Vec<Vec<C<T>>> = invariant.iter().map(|v| bm.apply(v)).collect();
        let mut compressed = Matrix::zeros(invariant.len());
        for (i, u) in invariant.iter().enumerate() {
            for (j, bv) in images.iter().enumerate() {
                compressed[(i, j)] = inner(u, bv);
            }
        }
        let hermitian = (&compressed + &compressed.adjoint()).scale_real(T::lit(0.5));
        let inner_eig = eig_hermitian(&hermitian, tolerances)?;
        for k in 0..invariant.len() {
            let mut v = combine(&invariant, &inner_eig.eigenvector(k));
            phase_fix(&mut v, T::lit(tolerances.phase_pivot));
            let state = StateVector::normalized(v)?;
            let value_a = matrix_element(&state, a.matrix())?.re;
            let value_b = matrix_element(&state, bm)?.re;
            let residual_a = eigen_residual(a.matrix(), &state, value_a);
            let residual_b = eigen_residual(bm, &state, value_b);
            if residual_a <= tol && residual_b <= tol {
                found.push(JointEigenvector { vector: state, value_a, value_b, residual_a, residual_b });
            }
        }
    }
    Ok(found)
}

fn gram_matrix<T: Real>(vectors: &[Vec<C<T>>]) -> Matrix<T> {
    let k = vectors.len();
    let mut g = Matrix::zeros(k);
    for i in 0..k {
        for j in 0..k {
            g[(i, j)] = inner(&vectors[i], &vectors[j]);
        }
    }
    (&g + &g.adjoint()).scale_real(T::lit(0.5))
}

fn combine<T: Real>(basis: &[Vec<C<T>>], coefficients: &[C<T>]) -> Vec<C<T>> {
    let mut out = vec![C::zero(); basis[0].len()];
    for (b, &c) in basis.iter().zip(coefficients) {
        for (o, &x) in out.iter_mut().zip(b) {
            *o = *o + c * x;
        }
    }
    out
}

/// `‖Mv − λv‖₂`.
pub fn eigen_residual<T: Real>(m: &Matrix<T>, v: &StateVector<T>, value: T) -> T {
    let mv = m.apply(v.amplitudes());
    let diff: Vec<C<T>> = mv.iter().zip(v.amplitudes()).map(|(&x, &y)| x - y * C::new(value, T::zero())).collect();
    linalg::norm(&diff)
}
