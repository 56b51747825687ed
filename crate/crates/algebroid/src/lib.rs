//! Exact symbolic workbench for Lie and Courant algebroids given by
//! polynomial structure data on affine charts.
//!
//! Everything is generic over a [`Field`] of coefficients; the aliases at
//! the crate root fix the field to arbitrary-precision rationals.

pub mod courant;
pub mod descent;
pub mod error;
pub mod json;
pub mod lie_algebroid;
pub mod linalg;
pub mod report;
pub mod sample;
pub mod scalar;
pub mod pullback;
pub mod symcalc;
pub mod transgression;

pub use error::{Error, Result};
pub use scalar::Field;
pub use symcalc::Chart;

/// Exact rationals, the default coefficient field.
pub type Rat = num_rational::BigRational;

pub type Poly = symcalc::Poly<Rat>;
pub type KForm = symcalc::KForm<Rat>;
pub type VField = symcalc::VField<Rat>;
pub type ChartMap = symcalc::ChartMap<Rat>;
pub type LieData = lie_algebroid::LieData<Rat>;
pub type MarkedLieData = lie_algebroid::MarkedLieData<Rat>;
pub type OExtensionData = lie_algebroid::OExtensionData<Rat>;
pub type CourantData = courant::CourantData<Rat>;
