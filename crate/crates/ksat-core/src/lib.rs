//! Estimation and evaluation of soil saturated hydraulic conductivity (Ksat).
//!
//! The crate covers the full path from raw sample records to per-texture-class
//! error tables:
//!
//! * [`soil`] — sample records, validation, porosity, and the log-normal
//!   particle-size summary (geometric mean diameter and geometric standard
//!   deviation).
//! * [`texture`] — the twelve-class USDA texture triangle.
//! * [`ptf`] — seven closed-form pedotransfer functions from the soil-physics
//!   literature, all normalized to cm/day.
//! * [`cpxr`] — a contrast-pattern ensemble: a baseline linear model in
//!   log10(Ksat) corrected by local linear models gated on feature intervals,
//!   plus a text bundle format for shipping fitted models.
//! * [`metrics`] — log10-space error metrics (RMSLE, MLE) and per-class
//!   evaluation reports.
//! * [`estimator`] — a common estimator interface over the classic and
//!   ensemble models, with applicability filtering.
//! * [`ingest`] — CSV ingestion with row-level diagnostics.
//! * [`synth`] — a seeded synthetic corpus generator for benchmarks and
//!   determinism tests.
//!
//! Numeric kernels are generic over the floating-point type via [`Scalar`]
//! (`f64` and `f32` both satisfy it). The aliases at the crate root fix
//! `F = f64`, which is what the ingestion pipeline and the CLI use.

use std::fmt;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive};

mod accum;
pub mod cpxr;
pub mod estimator;
pub mod features;
pub mod ingest;
pub mod metrics;
pub mod ptf;
pub mod soil;
pub mod synth;
pub mod texture;

/// Floating-point scalar for the numeric kernels.
///
/// Blanket-implemented for every type with `Float` semantics that can absorb
/// `f64` literals and be parsed/printed, so `f32` and `f64` work out of the
/// box.
pub trait Scalar:
    Float + FromPrimitive + FromStr + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + FromStr + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

/// Lift an `f64` coefficient into the working scalar type.
pub(crate) fn real<F: Scalar>(x: f64) -> F {
    F::from_f64(x).expect("finite constant representable in the scalar type")
}

pub use estimator::{ExclusionReason, KsatEstimator, ModelId};
pub use features::Feature;
pub use ptf::{ClassicModelId, JabroForm};
pub use texture::TextureClass;

/// `f64` aliases for the generic types; the pipeline and CLI work in `f64`.
pub type SoilSample = soil::SoilSample<f64>;
pub type PhysicalConstants = soil::PhysicalConstants<f64>;
pub type ValidationOptions = soil::ValidationOptions<f64>;
pub type FeatureVector = features::FeatureVector<f64>;
pub type Conductivity = ptf::Conductivity<f64>;
pub type Interval = cpxr::Interval<f64>;
pub type Pattern = cpxr::Pattern<f64>;
pub type LinearModel = cpxr::LinearModel<f64>;
pub type CpxrModel = cpxr::CpxrModel<f64>;
pub type Prediction = cpxr::Prediction<f64>;
pub type PairedSeries = metrics::PairedSeries<f64>;
pub type EvalReport = metrics::EvalReport<f64>;
pub type SummaryStats = metrics::SummaryStats<f64>;
