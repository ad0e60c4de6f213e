//! Dirichlet and Neumann spectra of weighted elliptic operators
//! `L = (1/rho)(-div A grad + V)` on intervals and planar polygonal or disk
//! domains, together with checks of the coefficient conditions that force
//! Neumann eigenvalues below Dirichlet ones (`mu_{k+r} <= lambda_k`) and the
//! trial-subspace certificates that witness such inequalities.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: meshes, refinement, boundary curvature, mesh text format.
//! * [`fields`]: coefficient fields and the harmonic phase construction.
//! * [`conditions`]: sampled checks of the coefficient hypotheses.
//! * [`fem`]: P1 stiffness/mass assembly and Dirichlet restriction.
//! * [`eigen`]: generalized symmetric eigensolvers, a 1D oracle, extrapolation.
//! * [`verify`]: inequality reports, certificates, the integration-by-parts
//!   identity, the disk comparison chain and the experiment runner.

pub mod conditions;
pub mod config;
pub mod eigen;
pub mod error;
pub mod fem;
pub mod fields;
pub mod geometry;
pub mod linalg;
pub mod sampling;
pub mod sparse;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{Domain, Mesh, Point};
