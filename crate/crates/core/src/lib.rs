//! Numerical certification of cone admissibility conditions.
//!
//! The crate evaluates associated Legendre functions and spherical harmonics,
//! integrates them over spherical caps cut out by cones with vertex at the
//! origin, and turns the resulting projection matrices into determinant-based
//! admissibility verdicts. It also scans star-shaped deformations of circular
//! cones for parameters where those determinants may vanish, and estimates
//! box-counting dimensions of cross-section boundaries.
//!
//! Verdicts are one-sided: a quantity is certified nonzero when it exceeds ten
//! times its propagated error bound. Nothing in this crate ever claims a
//! quantity is exactly zero.

pub mod admissibility;
pub mod deformation;
pub mod error;
pub mod fractal;
pub mod geometry;
pub mod harmonics;
pub mod legendre;
pub mod linalg;
pub mod quadrature;
pub mod sum;

#[cfg(test)]
#[path = "../tests/common/mod.rs"]
mod oracle;

pub use error::{Error, Result};

pub use admissibility::{
    medium_check, source_check, CapIntegralTable, MediumReport, MediumVerdict, SourceReport, SourceVerdict,
};
pub use deformation::{scan, DeformationScan, NearestAdmissible, ScanConfig, SuspectedZero};
pub use fractal::{box_dimension, sobolev_membership, BoxDimEstimate, Membership, ScaleRange};
pub use geometry::{ConeSpec, IndicatorRegion, RadialProfile};
pub use harmonics::SphericalDirection;
pub use num_complex::Complex64;
pub use quadrature::{QuadStatus, QuadratureSpec};
