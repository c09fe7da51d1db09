//! Gabor orthonormal bases generated by the unit-cube window `χ_[0,1]^d`.
//!
//! The crate builds time-frequency sets `Λ` from finite parameter tables,
//! checks orthogonality through the exact zero set of the window's short-time
//! Fourier transform, checks that the unit cubes placed at `Λ` tile `R^{2d}`,
//! and recovers the structure of verified sets in dimensions one and two.
//! Every check on an infinite set runs on a bounded window.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod cli;
pub mod error;
pub mod frame;
pub mod ortho;
pub mod quadrature;
pub mod random;
pub mod sets;
pub mod stft;
pub mod tiling;

pub use error::{Error, Result};
pub use sets::{BoxRegion, IndexedParam, Point, SetTable, StructuredSet, TfPoint};
pub use stft::Window;
pub use tiling::{CoverageReport, CoverageVerdict};
