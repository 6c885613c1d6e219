//! Geometric quantum mechanics on finite-dimensional projective space.
//!
//! Pure states are points of `CP^{n-1}` with the Fubini-Study metric
//! `g = 2 hbar Re(.|.)` and symplectic form `omega = 2 hbar Im(.|.)`. The crate
//! provides the manifold itself ([`projective`]), its geodesics and totally
//! geodesic submanifolds ([`geodesics`]), observables with their Killing
//! fields and uncertainty relations ([`observables`]), a variational spectral
//! theory with a Riemannian eigensolver ([`spectral`]), and quantum logic and
//! probability ([`probability`]). [`verify`] bundles seeded property suites
//! that check each identity numerically.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geodesics;
pub mod io;
pub mod linalg;
pub mod observables;
pub mod probability;
pub mod projective;
pub mod projector;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, Complex64, Rng};
pub use projective::{Config, Ray, TangentVector};
