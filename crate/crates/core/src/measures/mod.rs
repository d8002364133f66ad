//! Intensity measures and the quantities derived from them: the convolution
//! `G`, split and turn rates, and the crossing kernel.

mod intensity;
mod kernel;
mod pair;
mod params;
pub mod quadrature;
mod validate;

pub use intensity::{IntensityMeasure, Law, MeasureKind, TAIL_CUTOFF};
pub use kernel::{ContinuousKernel, InverseCdf, LatticeKernel};
pub use params::{
    convolution, crossing_kernel_sample, split_rate_horizontal, split_rate_vertical,
    turn_rate_horizontal, turn_rate_vertical, Evaluation, Kernel, PksParams,
};
pub use validate::{probe_points, validate, Rule, Violation, CONTINUOUS_PROBES};
