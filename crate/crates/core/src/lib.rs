//! Simulation and statistical verification of Poisson-Kirchhoff systems:
//! random networks of weighted horizontal and vertical broken lines in a box
//! whose node transitions conserve intensity.

pub mod error;
pub mod catalog;
pub mod drawing;
pub mod dynamics;
pub mod expr;
pub mod measures;
pub mod rng;
pub mod statistics;

pub use error::{Error, Result};
pub use expr::Expr;
pub use measures::{IntensityMeasure, MeasureKind, PksParams};
pub use rng::Seed;
