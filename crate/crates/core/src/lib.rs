//! Numerical laboratory for the spectral resolution of the sub-Laplacian on the
//! free two-step nilpotent group with three generators.
//!
//! The group is R^3 x R^3 with bracket given by the vector cross product on the
//! first layer. The crate builds the adapted frames, the fiber operators obtained
//! by a central character, the two-dimensional twisted Laplacian with its Laguerre
//! projections, and the spectral density operator assembling exact eigenfunctions
//! of the sub-Laplacian. A dense-matrix oracle and a mixed-norm harness verify
//! every identity and estimate at desk scale.

pub mod analytic;
pub mod centralft;
pub mod fieldops;
pub mod gauss;
pub mod nilgeom;
pub mod normharness;
pub mod oracle;
pub mod poly;
pub mod projector;
pub mod quadrature;
pub mod twisted;
