//! Dense complex linear algebra: vectors, matrices, a Jacobi Hermitian
//! eigensolver and seeded random generation.

mod eigen;
mod matrix;
mod random;
mod vector;

pub(crate) use eigen::canonical_phase;
pub use eigen::{eig_hermitian, EigenDecomposition};
pub use matrix::CMatrix;
pub use random::Rng;
pub use vector::{inner, CVector};

pub use num_complex::Complex64;
