//! Numerical construction of the rotationally symmetric gradient
//! Kähler-Ricci solitons on `ℂⁿ`, on the (anti)canonical bundle of `ℙⁿ⁻¹`,
//! and on the compact projective bundles `M_k`, together with checks of
//! their curvature and asymptotic properties.
//!
//! Everything is computed on the `ℂⁿ ∖ {0}` chart in the variable
//! `t = log |z|²`, where the geometry is determined by the single profile
//! `φ(t) = u'(t)` of the Kähler potential `u`.

pub mod compact;
pub mod error;
pub mod geometry;
pub mod poly;
pub mod profile;
pub mod quadrature;
pub mod verification;

pub use compact::{CompactProfile, PolyExpPair, RootCertificate};
pub use error::{Result, SolitonError};
pub use geometry::{CurvatureFrame, CurvatureTensor, HermitianMatrix, TangentPair};
pub use profile::{GridSpec, OpenProfile, ProfileState, RadialProfile, SolitonKind};
pub use verification::CheckReport;
