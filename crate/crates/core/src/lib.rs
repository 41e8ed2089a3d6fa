//! Finite Fell bundle geometries.
//!
//! A geometry is a finite-dimensional Fell bundle over a finite principal
//! groupoid, represented on `H = C^m` with a grading `chi` and a real structure
//! `J`. The crate enumerates tangent and cotangent fields of the bundle, solves
//! for the real-linear space of admissible Dirac operators under a chosen set
//! of conditions, and evaluates the usual spectral-triple relations on the
//! result (order zero, first order, fluctuations, spectrum, distance).
//!
//! Module map:
//!
//! * [`matrix`]: dense complex matrices, realified linear systems, spectra.
//! * [`groupoid`]: finite equivalence relations and pair groupoids.
//! * [`bundle`]: fibers, sections, saturation, the opposite bundle.
//! * [`representation`]: `rho`, `rho_opp`, `chi`, `J` and their checks.
//! * [`sheaf`]: patterns, morphism fields, stalks, sections over members.
//! * [`dirac`]: the constraint solver and the physics-facing operations.
//! * [`spec`]: geometry spec files and machine-readable reports.

pub mod bundle;
pub mod dirac;
pub mod error;
pub mod groupoid;
pub mod matrix;
pub mod representation;
pub mod sheaf;
pub mod spec;
#[cfg(feature = "cli")]
pub mod cli;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, DEFAULT_TOLERANCE};
pub use num_complex::Complex64;
