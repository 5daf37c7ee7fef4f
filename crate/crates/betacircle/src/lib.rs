//! Simulation and verification library for the circular Jacobi and real
//! orthogonal β-ensembles on the unit circle, their random Dirac operator
//! representations, and their operator-level scaling limits.
//!
//! The pipeline runs in three layers:
//!
//! 1. [`distributions`] / [`opuc`] — exact samplers for the coefficient laws
//!    (B̃, B′, Pearson IV, Θ) and the Verblunsky-coefficient description of
//!    both ensembles, together with Szegő recursions, characteristic
//!    polynomials and support-point extraction.
//! 2. [`dirac`] — the hyperbolic-plane driving paths built from the
//!    coefficients, the induced 2×2 canonical-system (Dirac) operators, their
//!    resolvent kernels, traces, Hilbert–Schmidt distances, transfer-matrix
//!    secular functions and Prüfer-phase eigenvalue counting.
//! 3. [`sde`] — the limit objects: hyperbolic Brownian driving paths, the
//!    counting-function SDE systems, and secular-function engines (analytic
//!    SDE systems and Taylor-coefficient recursions).
//!
//! [`harness`] ties the layers together with a seeded, reproducible
//! statistical test kit (two-sample KS, convergence/CLT/gap experiments).

pub mod distributions;
pub mod dirac;
pub mod error;
pub mod harness;
pub mod opuc;
pub mod rng;
pub mod sde;
pub mod special;

pub use error::{Error, Result};
pub use rng::RngStream;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
