//! Common interface over the classic formulas and the pattern ensemble, plus
//! applicability filtering and batch evaluation against measured values.

use thiserror::Error;

use crate::cpxr::{CombinationSpace, CpxrModel, Weighting};
use crate::features::FeatureError;
use crate::ptf::{
    estimate_classic_with, ClassicModelId, Conductivity, EstimateError, JabroForm,
};
use crate::soil::{PhysicalConstants, SoilSample};
use crate::texture::{classify_texture, TextureClass};
use crate::Scalar;

/// All estimators this crate ships: the seven closed forms plus the ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelId {
    Classic(ClassicModelId),
    Cpxr,
}

impl ModelId {
    pub const ALL: [ModelId; 8] = [
        ModelId::Classic(ClassicModelId::Brakensiek84),
        ModelId::Classic(ClassicModelId::CampbellShiozawa94),
        ModelId::Classic(ClassicModelId::Cosby84),
        ModelId::Classic(ClassicModelId::Jabro92),
        ModelId::Classic(ClassicModelId::Puckett85),
        ModelId::Classic(ClassicModelId::DanePuckett94),
        ModelId::Classic(ClassicModelId::Saxton86),
        ModelId::Cpxr,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ModelId::Classic(m) => m.id(),
            ModelId::Cpxr => "cpxr",
        }
    }

    pub fn parse(s: &str) -> Option<ModelId> {
        ModelId::ALL.into_iter().find(|m| m.id() == s)
    }
}

impl std::fmt::Display for ModelId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

impl std::str::FromStr for ModelId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelId::parse(s).ok_or_else(|| {
            let names: Vec<&str> = ModelId::ALL.iter().map(|m| m.id()).collect();
            format!("unknown model `{s}` (expected one of: {})", names.join(", "))
        })
    }
}

/// Why a sample was left out of a model's evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExclusionReason {
    /// Jabro (1992) takes log(silt).
    ZeroSilt,
    /// Jabro (1992) takes log(clay).
    ZeroClay,
    /// The ensemble needs core height and diameter.
    MissingDimension,
    /// Porosity is undefined at or above the particle density.
    NonphysicalDensity,
    /// The model produced a conductivity that is not a positive finite
    /// number (reachable only through audit variants such as the printed
    /// Jabro form).
    NonPositiveEstimate,
}

impl ExclusionReason {
    pub fn label(self) -> &'static str {
        match self {
            ExclusionReason::ZeroSilt => "zero_silt",
            ExclusionReason::ZeroClay => "zero_clay",
            ExclusionReason::MissingDimension => "missing_dimension",
            ExclusionReason::NonphysicalDensity => "nonphysical_density",
            ExclusionReason::NonPositiveEstimate => "non_positive_estimate",
        }
    }
}

impl std::fmt::Display for ExclusionReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Classic(#[from] EstimateError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
}

/// One conductivity estimator. `exclusion` screens samples the model cannot
/// handle; `estimate` is then total over what passes the screen.
pub trait KsatEstimator<F: Scalar> {
    fn id(&self) -> &str;
    fn exclusion(&self, sample: &SoilSample<F>) -> Option<ExclusionReason>;
    fn estimate(&self, sample: &SoilSample<F>) -> Result<Conductivity<F>, ModelError>;
}

/// A classic closed-form model bound to its constants.
#[derive(Debug, Clone)]
pub struct ClassicEstimator<F> {
    model: ClassicModelId,
    constants: PhysicalConstants<F>,
    jabro_form: JabroForm,
}

impl<F: Scalar> ClassicEstimator<F> {
    pub fn new(model: ClassicModelId, constants: PhysicalConstants<F>) -> Self {
        ClassicEstimator {
            model,
            constants,
            jabro_form: JabroForm::default(),
        }
    }

    pub fn with_jabro_form(mut self, form: JabroForm) -> Self {
        self.jabro_form = form;
        self
    }
}

impl<F: Scalar> KsatEstimator<F> for ClassicEstimator<F> {
    fn id(&self) -> &str {
        self.model.id()
    }

    fn exclusion(&self, sample: &SoilSample<F>) -> Option<ExclusionReason> {
        match self.model {
            ClassicModelId::Jabro92 => {
                if !(sample.silt_pct > F::zero()) {
                    Some(ExclusionReason::ZeroSilt)
                } else if !(sample.clay_pct > F::zero()) {
                    Some(ExclusionReason::ZeroClay)
                } else {
                    None
                }
            }
            ClassicModelId::Brakensiek84 => {
                if sample.bulk_density >= self.constants.particle_density {
                    Some(ExclusionReason::NonphysicalDensity)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    fn estimate(&self, sample: &SoilSample<F>) -> Result<Conductivity<F>, ModelError> {
        Ok(estimate_classic_with(
            self.model,
            sample,
            &self.constants,
            self.jabro_form,
        )?)
    }
}

/// The pattern ensemble bound to its constants and blending options.
#[derive(Debug, Clone)]
pub struct CpxrEstimator<F> {
    model: CpxrModel<F>,
    constants: PhysicalConstants<F>,
    weighting: Weighting,
    space: CombinationSpace,
}

impl<F: Scalar> CpxrEstimator<F> {
    /// Use the weighting the bundle declares and log-space blending.
    pub fn new(model: CpxrModel<F>, constants: PhysicalConstants<F>) -> Self {
        let weighting = model.weighting();
        CpxrEstimator {
            model,
            constants,
            weighting,
            space: CombinationSpace::default(),
        }
    }

    pub fn with_options(mut self, weighting: Weighting, space: CombinationSpace) -> Self {
        self.weighting = weighting;
        self.space = space;
        self
    }

    pub fn model(&self) -> &CpxrModel<F> {
        &self.model
    }
}

impl<F: Scalar> KsatEstimator<F> for CpxrEstimator<F> {
    fn id(&self) -> &str {
        "cpxr"
    }

    fn exclusion(&self, sample: &SoilSample<F>) -> Option<ExclusionReason> {
        if sample.height.is_none() || sample.diameter.is_none() {
            Some(ExclusionReason::MissingDimension)
        } else {
            None
        }
    }

    fn estimate(&self, sample: &SoilSample<F>) -> Result<Conductivity<F>, ModelError> {
        let features = crate::features::derive_features(sample, &self.constants)?;
        let prediction = self.model.predict_log_with(&features, self.weighting, self.space);
        let ten: F = crate::real(10.0);
        Ok(Conductivity(ten.powf(prediction.log10_ksat)))
    }
}

/// Split samples into those the estimator accepts (in input order) and the
/// excluded rest, tagged with reasons. Every input lands in exactly one side.
pub fn filter_applicable<'a, F: Scalar>(
    samples: &'a [SoilSample<F>],
    estimator: &dyn KsatEstimator<F>,
) -> (Vec<&'a SoilSample<F>>, Vec<(usize, ExclusionReason)>) {
    let mut kept = Vec::new();
    let mut excluded = Vec::new();
    for (index, sample) in samples.iter().enumerate() {
        match estimator.exclusion(sample) {
            None => kept.push(sample),
            Some(reason) => excluded.push((index, reason)),
        }
    }
    (kept, excluded)
}

/// One accepted sample in a model's evaluation, in cm/day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPoint<F> {
    pub index: usize,
    pub class: TextureClass,
    pub estimated: F,
    pub measured: F,
}

impl<F: Scalar> EvalPoint<F> {
    /// `(log10 measured, log10 estimated)` — scatter-plot coordinates.
    pub fn log10_pair(&self) -> (F, F) {
        (self.measured.log10(), self.estimated.log10())
    }
}

/// Everything one model produced over a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSeries<F> {
    pub model: String,
    pub points: Vec<EvalPoint<F>>,
    pub excluded: Vec<(usize, ExclusionReason)>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("no samples to evaluate")]
    EmptyDataset,
    #[error("sample {index} has no measured ksat")]
    MissingMeasured { index: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Run every estimator over every sample. Requires measured Ksat on all
/// samples; screens each model's exclusions; estimates that come back
/// non-positive are excluded and tagged rather than poisoning the logs.
pub fn evaluate_models<F: Scalar>(
    samples: &[SoilSample<F>],
    estimators: &[&dyn KsatEstimator<F>],
) -> Result<Vec<ModelSeries<F>>, EvalError> {
    if samples.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    let mut series = Vec::with_capacity(estimators.len());
    for estimator in estimators {
        let mut points = Vec::new();
        let mut excluded = Vec::new();
        for (index, sample) in samples.iter().enumerate() {
            let measured = sample
                .ksat_measured
                .ok_or(EvalError::MissingMeasured { index })?;
            if let Some(reason) = estimator.exclusion(sample) {
                excluded.push((index, reason));
                continue;
            }
            let estimated = estimator.estimate(sample)?.cm_per_day();
            if estimated > F::zero() && estimated.is_finite() {
                points.push(EvalPoint {
                    index,
                    class: classify_texture(sample.sand_pct, sample.silt_pct, sample.clay_pct),
                    estimated,
                    measured,
                });
            } else {
                excluded.push((index, ExclusionReason::NonPositiveEstimate));
            }
        }
        series.push(ModelSeries {
            model: estimator.id().to_string(),
            points,
            excluded,
        });
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(id: &str, sand: f64, silt: f64, clay: f64) -> SoilSample<f64> {
        SoilSample {
            id: id.into(),
            source: "test".into(),
            method: String::new(),
            sand_pct: sand,
            silt_pct: silt,
            clay_pct: clay,
            bulk_density: 1.4,
            height: Some(20.0),
            diameter: Some(5.0),
            ksat_measured: Some(100.0),
        }
    }

    #[test]
    fn model_ids_round_trip() {
        for m in ModelId::ALL {
            assert_eq!(ModelId::parse(m.id()), Some(m));
        }
        assert!(ModelId::parse("nope").is_none());
        assert!("dane-puckett94".parse::<ModelId>().is_ok());
        assert!("".parse::<ModelId>().is_err());
    }

    #[test]
    fn filtering_conserves_samples() {
        let samples = vec![
            sample("a", 40.0, 40.0, 20.0),
            sample("b", 80.0, 0.0, 20.0),
            sample("c", 80.0, 20.0, 0.0),
            {
                let mut s = sample("d", 40.0, 40.0, 20.0);
                s.height = None;
                s
            },
        ];
        let constants = PhysicalConstants::default();

        let jabro = ClassicEstimator::new(ClassicModelId::Jabro92, constants);
        let (kept, excluded) = filter_applicable(&samples, &jabro);
        assert_eq!(kept.len() + excluded.len(), samples.len());
        assert_eq!(
            excluded,
            vec![(1, ExclusionReason::ZeroSilt), (2, ExclusionReason::ZeroClay)]
        );

        let cpxr = CpxrEstimator::new(CpxrModel::bundled(), constants);
        let (kept, excluded) = filter_applicable(&samples, &cpxr);
        assert_eq!(kept.len(), 3);
        assert_eq!(excluded, vec![(3, ExclusionReason::MissingDimension)]);
    }

    #[test]
    fn evaluation_screens_and_counts() {
        let samples = vec![
            sample("a", 40.0, 40.0, 20.0),
            sample("b", 80.0, 0.0, 20.0),
            sample("c", 20.0, 50.0, 30.0),
        ];
        let constants = PhysicalConstants::default();
        let jabro = ClassicEstimator::new(ClassicModelId::Jabro92, constants);
        let cosby = ClassicEstimator::new(ClassicModelId::Cosby84, constants);
        let series =
            evaluate_models(&samples, &[&jabro as &dyn KsatEstimator<f64>, &cosby]).unwrap();
        assert_eq!(series[0].points.len(), 2);
        assert_eq!(series[0].excluded.len(), 1);
        assert_eq!(series[1].points.len(), 3);
        assert_eq!(series[1].points[2].class, TextureClass::SiltyClayLoam);

        let mut missing = samples.clone();
        missing[1].ksat_measured = None;
        assert_eq!(
            evaluate_models(&missing, &[&cosby as &dyn KsatEstimator<f64>]).unwrap_err(),
            EvalError::MissingMeasured { index: 1 }
        );
        assert!(matches!(
            evaluate_models::<f64>(&[], &[]),
            Err(EvalError::EmptyDataset)
        ));
    }

    #[test]
    fn printed_jabro_estimates_are_screened_not_fatal() {
        let mut dense = sample("a", 30.0, 50.0, 20.0);
        // Dense enough that the uncorrected bracket goes negative.
        dense.bulk_density = 1.5;
        let samples = vec![dense];
        let constants = PhysicalConstants::default();
        let printed = ClassicEstimator::new(ClassicModelId::Jabro92, constants)
            .with_jabro_form(JabroForm::AsPrinted);
        let series = evaluate_models(&samples, &[&printed as &dyn KsatEstimator<f64>]).unwrap();
        assert!(series[0].points.is_empty());
        assert_eq!(
            series[0].excluded,
            vec![(0, ExclusionReason::NonPositiveEstimate)]
        );
    }
}
