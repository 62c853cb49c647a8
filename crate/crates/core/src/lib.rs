//! Numerical toolkit for almost complex geometry on a chart: solving the
//! nonlinear Cauchy–Riemann system for pseudoholomorphic discs, Levi
//! forms by two independent methods, bounded strictly plurisubharmonic
//! exhaustion functions with explicit certificates, and the approximation
//! of boundary confoliations by contact structures.
//!
//! All numerics are generic over the real scalar (`f32`/`f64`); the
//! aliases below pin `f64`, which every documented tolerance assumes.

pub mod error;
pub mod num;

pub mod la;
pub mod poly;

pub mod cg;
pub mod field;
pub mod forms;
pub mod grid;

pub mod disc;
pub mod levi;

pub mod exhaustion;

pub mod contact;

pub mod sample;

pub use error::{Error, Result};
pub use num::{Real, C};

/// Concrete `f64` aliases for the main domain types.
pub type PolyField64 = poly::PolyField<f64>;
pub type PolyMap64 = poly::PolyMap<f64>;
pub type StructureField64 = field::StructureField<f64>;
pub type TangentVector64 = forms::TangentVector<f64>;
pub type DiscGrid64 = grid::DiscGrid<f64>;
pub type Disc64 = disc::Disc<f64>;
pub type LeviReport64 = levi::LeviReport<f64>;
pub type DFCertificate64 = exhaustion::DFCertificate<f64>;
pub type DomainSpec64 = exhaustion::DomainSpec<f64>;
pub type ApproximationRecord64 = contact::ApproximationRecord<f64>;
