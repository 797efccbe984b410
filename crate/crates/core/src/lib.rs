//! Exact-arithmetic engine for strong homotopy Lie algebras and the graded
//! Poisson geometry they generate.
//!
//! The crate builds, from an n-term L-infinity algebra given by structure
//! constants over the rationals:
//!
//! * the Hamiltonian encoding on a shifted cotangent chart and the master
//!   equation / higher Jacobi verifications ([`linfty`], [`poly`]);
//! * homotopy Poisson presentations, derived brackets and Maurer-Cartan
//!   residuals ([`hpoisson`]);
//! * the Courant algebroid on `g_{-1}* x (g_0* + g_0)`, the induced 2-term
//!   algebra and the canonical homomorphism ([`courant`]);
//! * the Schouten calculus on polynomial multivector fields ([`schouten`]);
//! * the Lie quasi-bialgebroid split, the action-groupoid bivector and the
//!   quasi-Poisson identities ([`quasi`]);
//! * the Ikeda-Uchino algebroid of a 3-term algebra and its induced 2-term
//!   algebra ([`ikeda`]).
//!
//! Every coefficient is an exact rational; every identity is checked
//! symbolically, never numerically.

pub mod base_poly;
pub mod courant;
pub mod error;
pub mod graded;
pub mod hpoisson;
pub mod ikeda;
pub mod instances;
pub mod linalg;
pub mod linfty;
pub mod poly;
pub mod quasi;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod schouten;
pub mod sections;

pub use error::GradedError;
pub use graded::{koszul_sign, koszul_sign_with_sgn, GradedSpace, GradedVector};
pub use linalg::{kernel_basis, kernel_basis_labeled, rank, solve};
pub use linfty::{check_higher_jacobi, check_master_equation, hamiltonian_encode, LInftyStructure};
pub use poly::{big_bracket, GradedPolynomial, Monomial, ShiftedCotangentChart};
pub use report::VerificationReport;
pub use scalar::Scalar;
