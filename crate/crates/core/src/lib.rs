//! Spectral toolkit for periodic and limit-periodic Jacobi matrices.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the thin
//! spectrum construction in [`construct`] works in `f64`. Concrete aliases
//! for both precisions are exported at the crate root.

pub mod construct;
pub mod dosids;
pub mod eigen;
pub mod error;
pub mod intervals;
pub mod io;
pub mod jacobi;
pub mod lattice;
pub mod scalar;
pub mod sl2core;
pub mod spectrum;

pub use error::{Error, Result};
pub use intervals::IntervalUnion;
pub use jacobi::PeriodicJacobi;
pub use scalar::Real;
pub use sl2core::{ComplexPoint, Mat2};
pub use spectrum::{BandStructure, Gap};

pub type Mat2F64 = Mat2<f64>;
pub type Mat2F32 = Mat2<f32>;
pub type ComplexF64 = ComplexPoint<f64>;
pub type ComplexF32 = ComplexPoint<f32>;
pub type JacobiF64 = PeriodicJacobi<f64>;
pub type JacobiF32 = PeriodicJacobi<f32>;
pub type IntervalsF64 = IntervalUnion<f64>;
pub type IntervalsF32 = IntervalUnion<f32>;
pub type BandsF64 = BandStructure<f64>;
pub type BandsF32 = BandStructure<f32>;
pub type IdsProfileF64 = dosids::IdsProfile<f64>;
pub type IdsProfileF32 = dosids::IdsProfile<f32>;
pub type WeightsF64 = lattice::SeparableWeights<f64>;
pub type WeightsF32 = lattice::SeparableWeights<f32>;

/// Library version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
