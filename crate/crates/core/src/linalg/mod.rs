//! Dense complex linear algebra: matrices, a Hermitian eigensolver and
//! matrix functions through the spectral theorem.

mod eigen;
mod matrix;

pub use eigen::{eig_hermitian, unitary_exp, SpectralDecomposition};
pub(crate) use eigen::{orthonormalize, phase_fix};
pub use matrix::{inner, norm, Matrix};
