//! Indexed eigenvalues of regular Sturm-Liouville problems on `[0, 1]`
//! under the full U(2) family of self-adjoint boundary conditions.
//!
//! The operator is `-y'' + q y` with real locally integrable `q`. Every
//! self-adjoint realization is labelled by a unitary `U`, and the crate is
//! organized around three views of that parameter space:
//!
//! * [`fundsol`] integrates the fundamental solutions and their spectral
//!   derivatives; [`spectrum`] turns them into certified, indexed
//!   eigenvalue lists for a single condition.
//! * [`charcurve`] follows the curve of conditions with a prescribed
//!   double eigenvalue, the locus where eigenvalue branches collide.
//! * [`orbits`] studies whole conjugation orbits at once: eigenvalue
//!   bands, band-edge critical points, level sets, and a machine-checkable
//!   verification report for the band theorems.
//!
//! [`fdcheck`] provides an independent finite-difference solver used only
//! for cross-validation, and [`checks`] bundles randomized invariant
//! suites over the whole parameter space.

pub mod bc;
pub mod charcurve;
pub mod checks;
pub mod cli;
pub mod fdcheck;
pub mod fundsol;
pub mod mat2;
mod ode;
pub mod orbits;
pub mod spectrum;

pub use bc::{BcError, BcSpec, Classification, HermitianBC, SeparatedBC, UnitaryBC};
pub use charcurve::{CharCurveValue, CurveError, CurveOrbitHit};
pub use checks::{CheckLevel, CheckReport};
pub use fdcheck::{fd_eigenvalues, FdError};
pub use fundsol::{FundamentalData, FundsolError, Potential};
pub use mat2::{c64, Mat2, C64};
pub use orbits::{
    AdjointOrbit, EigenvalueBand, LevelSet, LevelSetShape, OrbitError, OrbitPoint, OrbitRange,
    OrbitReport, Surface,
};
pub use spectrum::{Certification, EigOptions, SpectrumError, SpectrumSlice};
