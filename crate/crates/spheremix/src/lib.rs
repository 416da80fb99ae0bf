//! Finite von Mises-Fisher mixtures that approximate continuous probability
//! densities on the unit hypersphere `S^m`, together with the spectral
//! machinery (Funk-Hecke eigenvalues, kernel tail masses, spherical
//! convolution) used to verify the construction numerically.
//!
//! The crate is organized around the construction pipeline:
//!
//! * [`special`] — log Bessel / log gamma / Gegenbauer scalar kernels;
//! * [`quadrature`] — weighted 1D rules, product rules on `S^m`, sup grids;
//! * [`geometry`] — points, spherical coordinates and coordinate-block
//!   partitions of the sphere with exact measures;
//! * [`vmf`] — the vMF density, mixtures, the concentration-indexed kernel
//!   family and samplers;
//! * [`spectral`] — convolution eigenvalues and convergence diagnostics;
//! * [`approximator`] — the mixture-construction engine and its reports;
//! * [`targets`] — the standard test densities used across the suite.

pub mod approximator;
pub mod error;
pub mod geometry;
pub mod quadrature;
pub mod special;
pub mod spectral;
pub mod targets;
pub mod vmf;

pub use error::{Error, Result};
pub use geometry::{CoordinateBlock, SphericalAngles, SphericalPartition, UnitVector};
pub use vmf::{VmfComponent, VmfKernel, VmfMixture};
