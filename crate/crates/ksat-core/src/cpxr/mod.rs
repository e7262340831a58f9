//! Contrast-pattern ensemble for log10(Ksat).
//!
//! A fitted model is a baseline linear function of the predictors plus a set
//! of (pattern, local model) entries. A pattern is a conjunction of interval
//! criteria over the predictors, each interval closed below and open above.
//! Prediction evaluates the local model of every matching pattern and blends
//! the results; when nothing matches, the baseline answers alone.
//!
//! Models are shipped as plain-text bundles (see [`bundle`]); the fitted
//! model distributed with this crate loads via [`CpxrModel::bundled`].

mod bundle;

pub use bundle::BundleError;

use crate::accum;
use crate::features::{Feature, FeatureVector};
use crate::ptf::Conductivity;
use crate::soil::{PhysicalConstants, SoilSample};
use crate::features::FeatureError;
use crate::{real, Scalar};

/// Half-open interval `[lower, upper)`; either bound may be absent, not both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<F> {
    lower: Option<F>,
    upper: Option<F>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IntervalError {
    #[error("interval needs at least one bound")]
    Unbounded,
    #[error("empty interval: lower {lower} is not below upper {upper}")]
    Empty { lower: f64, upper: f64 },
    #[error("interval bound is not finite")]
    NonFinite,
}

impl<F: Scalar> Interval<F> {
    pub fn new(lower: Option<F>, upper: Option<F>) -> Result<Self, IntervalError> {
        if lower.is_none() && upper.is_none() {
            return Err(IntervalError::Unbounded);
        }
        for bound in [lower, upper].into_iter().flatten() {
            if !bound.is_finite() {
                return Err(IntervalError::NonFinite);
            }
        }
        if let (Some(lo), Some(hi)) = (lower, upper) {
            if !(lo < hi) {
                return Err(IntervalError::Empty {
                    lower: lo.to_f64().unwrap_or(f64::NAN),
                    upper: hi.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(Interval { lower, upper })
    }

    pub fn lower(&self) -> Option<F> {
        self.lower
    }

    pub fn upper(&self) -> Option<F> {
        self.upper
    }

    /// Membership test: lower bound inclusive, upper bound exclusive.
    pub fn contains(&self, x: F) -> bool {
        self.lower.map_or(true, |lo| x >= lo) && self.upper.map_or(true, |hi| x < hi)
    }
}

/// Conjunction of interval criteria, plus the fit diagnostics that ship with
/// it (average residual reduction and training support).
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern<F> {
    pub id: u32,
    /// Criteria in bundle order; a feature appears at most once.
    pub criteria: Vec<(Feature, Interval<F>)>,
    /// Average residual reduction achieved by this pattern's local model.
    pub arr: F,
    /// Share of the training data matching the pattern, percent.
    pub support_pct: F,
}

impl<F: Scalar> Pattern<F> {
    /// True when every criterion accepts the corresponding feature value.
    pub fn matches(&self, features: &FeatureVector<F>) -> bool {
        self.criteria
            .iter()
            .all(|(feature, interval)| interval.contains(features.get(*feature)))
    }
}

/// Linear function of the predictors: intercept plus coefficient terms,
/// accumulated in stored order.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel<F> {
    pub intercept: F,
    pub coefficients: Vec<(Feature, F)>,
}

impl<F: Scalar> LinearModel<F> {
    pub fn evaluate(&self, features: &FeatureVector<F>) -> F {
        let mut acc = self.intercept;
        for (feature, coef) in &self.coefficients {
            acc = acc + *coef * features.get(*feature);
        }
        acc
    }
}

/// How matching local models are weighted when blending.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    /// Weights proportional to each pattern's ARR. If every matching pattern
    /// has zero ARR, falls back to uniform.
    #[default]
    ArrProportional,
    Uniform,
}

/// Which space the weighted average runs in. Local models predict
/// log10(Ksat); blending those predictions directly is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CombinationSpace {
    #[default]
    Log10,
    /// Average the conductivities themselves; computed stably in log space
    /// via a shifted exponential sum.
    Linear,
}

/// One matching pattern's contribution to a prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry<F> {
    pub pattern_id: u32,
    pub weight: F,
}

/// A prediction in log10 space plus the trace of who produced it. An empty
/// trace means the baseline answered alone.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction<F> {
    pub log10_ksat: F,
    pub trace: Vec<TraceEntry<F>>,
}

/// A fitted ensemble: baseline, entries, and the declared predictor set.
#[derive(Debug, Clone, PartialEq)]
pub struct CpxrModel<F> {
    features: Vec<Feature>,
    output: String,
    weighting: Weighting,
    baseline: LinearModel<F>,
    entries: Vec<(Pattern<F>, LinearModel<F>)>,
}

impl<F: Scalar> CpxrModel<F> {
    /// The fitted model shipped with the crate.
    pub fn bundled() -> Self {
        bundle::parse(include_str!("default_bundle.cpxr"))
            .expect("embedded bundle parses")
    }

    /// Parse a model from bundle text.
    pub fn from_bundle_text(text: &str) -> Result<Self, BundleError> {
        bundle::parse(text)
    }

    /// Serialize back to bundle text. Reparsing the output reproduces the
    /// model exactly.
    pub fn to_bundle_text(&self) -> String {
        bundle::serialize(self)
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    /// Declared name of the predicted quantity.
    pub fn output(&self) -> &str {
        &self.output
    }

    pub fn weighting(&self) -> Weighting {
        self.weighting
    }

    pub fn baseline(&self) -> &LinearModel<F> {
        &self.baseline
    }

    pub fn entries(&self) -> &[(Pattern<F>, LinearModel<F>)] {
        &self.entries
    }

    /// Predict log10(Ksat) with the bundle's declared weighting, blending in
    /// log space.
    pub fn predict_log(&self, features: &FeatureVector<F>) -> Prediction<F> {
        self.predict_log_with(features, self.weighting, CombinationSpace::default())
    }

    /// Predict log10(Ksat) with explicit weighting and combination space.
    ///
    /// No matching pattern: the baseline value, untouched, with an empty
    /// trace. Exactly one match: that local model's value, untouched.
    /// Several matches: normalized weights (they sum to 1 up to one part in
    /// 1e15), a weighted average, and a final clamp to the span of the
    /// matching local predictions so the blend is convex even against
    /// floating-point drift.
    pub fn predict_log_with(
        &self,
        features: &FeatureVector<F>,
        weighting: Weighting,
        space: CombinationSpace,
    ) -> Prediction<F> {
        let matching: Vec<usize> = self
            .entries
            .iter()
            .enumerate()
            .filter(|(_, (pattern, _))| pattern.matches(features))
            .map(|(i, _)| i)
            .collect();

        if matching.is_empty() {
            return Prediction {
                log10_ksat: self.baseline.evaluate(features),
                trace: Vec::new(),
            };
        }
        if matching.len() == 1 {
            let (pattern, local) = &self.entries[matching[0]];
            return Prediction {
                log10_ksat: local.evaluate(features),
                trace: vec![TraceEntry {
                    pattern_id: pattern.id,
                    weight: F::one(),
                }],
            };
        }

        let raw: Vec<F> = match weighting {
            Weighting::ArrProportional => {
                let arrs: Vec<F> = matching.iter().map(|&i| self.entries[i].0.arr).collect();
                if arrs.iter().all(|a| *a == F::zero()) {
                    vec![F::one(); matching.len()]
                } else {
                    arrs
                }
            }
            Weighting::Uniform => vec![F::one(); matching.len()],
        };
        let total = accum::sum(raw.iter().copied());
        let weights: Vec<F> = raw.iter().map(|&r| r / total).collect();

        let locals: Vec<F> = matching
            .iter()
            .map(|&i| self.entries[i].1.evaluate(features))
            .collect();

        let combined = match space {
            CombinationSpace::Log10 => {
                accum::sum(weights.iter().zip(&locals).map(|(&w, &v)| w * v))
            }
            CombinationSpace::Linear => {
                // log10 of the weighted mean of 10^v, shifted by max(v) so the
                // exponentials stay in range.
                let m = locals.iter().copied().fold(locals[0], F::max);
                let ten: F = real(10.0);
                let s = accum::sum(
                    weights
                        .iter()
                        .zip(&locals)
                        .map(|(&w, &v)| w * ten.powf(v - m)),
                );
                m + s.log10()
            }
        };
        let lo = locals.iter().copied().fold(locals[0], F::min);
        let hi = locals.iter().copied().fold(locals[0], F::max);
        let combined = combined.max(lo).min(hi);

        Prediction {
            log10_ksat: combined,
            trace: matching
                .iter()
                .zip(weights)
                .map(|(&i, weight)| TraceEntry {
                    pattern_id: self.entries[i].0.id,
                    weight,
                })
                .collect(),
        }
    }

    /// Full pipeline for one sample: derive features, predict, undo the log.
    pub fn predict_ksat(
        &self,
        sample: &SoilSample<F>,
        constants: &PhysicalConstants<F>,
    ) -> Result<(Conductivity<F>, Prediction<F>), FeatureError> {
        self.predict_ksat_with(sample, constants, self.weighting, CombinationSpace::default())
    }

    /// [`predict_ksat`](Self::predict_ksat) with explicit blending options.
    pub fn predict_ksat_with(
        &self,
        sample: &SoilSample<F>,
        constants: &PhysicalConstants<F>,
        weighting: Weighting,
        space: CombinationSpace,
    ) -> Result<(Conductivity<F>, Prediction<F>), FeatureError> {
        let features = crate::features::derive_features(sample, constants)?;
        let prediction = self.predict_log_with(&features, weighting, space);
        let ten: F = real(10.0);
        Ok((Conductivity(ten.powf(prediction.log10_ksat)), prediction))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(sand: f64, silt: f64, clay: f64) -> FeatureVector<f64> {
        let c = PhysicalConstants::default();
        let (dg, sigma_g) = crate::soil::derive_particle_stats(sand, silt, clay, &c);
        FeatureVector {
            sand,
            silt,
            clay,
            dg,
            sigma_g,
            bulk_density: 1.4,
            diameter: 10.0,
            height: 40.0,
        }
    }

    #[test]
    fn interval_bounds_are_half_open() {
        let i = Interval::new(Some(2.5), Some(36.9)).unwrap();
        assert!(i.contains(2.5));
        assert!(i.contains(36.9f64.next_down()));
        assert!(!i.contains(36.9));
        assert!(!i.contains(2.4999999999999996));

        let below = Interval::<f64>::new(None, Some(15.8)).unwrap();
        assert!(below.contains(-1.0e308));
        assert!(!below.contains(15.8));

        assert!(Interval::<f64>::new(None, None).is_err());
        assert!(Interval::new(Some(3.0), Some(3.0)).is_err());
        assert!(Interval::new(Some(f64::NAN), None).is_err());
    }

    #[test]
    fn bundled_model_has_expected_shape() {
        let model = CpxrModel::<f64>::bundled();
        assert_eq!(model.entries().len(), 14);
        assert_eq!(model.features().len(), 8);
        assert_eq!(model.weighting(), Weighting::ArrProportional);
        assert_eq!(model.baseline().intercept, -1180.0);
        assert_eq!(model.baseline().coefficients.len(), 7);
        // Baseline has no height term.
        assert!(model
            .baseline()
            .coefficients
            .iter()
            .all(|(f, _)| *f != Feature::Height));
        for (pattern, local) in model.entries() {
            assert!(!pattern.criteria.is_empty());
            assert!(pattern.arr >= 0.0);
            assert!(local.coefficients.len() >= 7);
        }
    }

    #[test]
    fn no_match_falls_back_to_baseline_exactly() {
        let model = CpxrModel::<f64>::bundled();
        // High clay, tall core: clay >= 15.8 kills most patterns, height
        // 40 >= 36.9 and diameter 10 >= 7.5 kill the rest; sigma_g for this
        // triple sits above 12.38.
        let v = fv(20.0, 40.0, 40.0);
        let p = model.predict_log(&v);
        assert!(p.trace.is_empty());
        assert_eq!(p.log10_ksat, model.baseline().evaluate(&v));
        assert_eq!(p.log10_ksat, 2.4504677400644845);
    }

    #[test]
    fn single_match_returns_local_value_exactly() {
        let model = CpxrModel::<f64>::bundled();
        // Matches pattern 3 alone: silt 50 in [40.5, 60.6), dg ~0.0204 in
        // [0.004, 0.25), sigma_g ~11.18 in [6.96, 12.38), bd 1.4 in
        // [1.23, 1.6); clay 30 >= 15.8 and height 40 >= 36.9 block the rest.
        let v = fv(20.0, 50.0, 30.0);
        let p = model.predict_log(&v);
        assert_eq!(p.trace.len(), 1);
        assert_eq!(p.trace[0].pattern_id, 3);
        assert_eq!(p.trace[0].weight, 1.0);
        let local3 = &model.entries()[2].1;
        assert_eq!(p.log10_ksat, local3.evaluate(&v));
        assert_eq!(p.log10_ksat, 0.33444972606446965);
    }

    #[test]
    fn multi_match_blend_is_convex_and_weights_normalize() {
        let model = CpxrModel::<f64>::bundled();
        // Sandy, shallow, narrow core: matches many of the sand/height
        // patterns at once.
        let mut v = fv(90.0, 5.0, 5.0);
        v.diameter = 5.0;
        v.height = 20.0;
        let p = model.predict_log(&v);
        assert!(p.trace.len() > 1, "expected several matches");

        let wsum: f64 = p.trace.iter().map(|t| t.weight).sum();
        assert!((wsum - 1.0).abs() < 1e-15);

        let locals: Vec<f64> = p
            .trace
            .iter()
            .map(|t| {
                let entry = model
                    .entries()
                    .iter()
                    .find(|(pat, _)| pat.id == t.pattern_id)
                    .unwrap();
                entry.1.evaluate(&v)
            })
            .collect();
        let lo = locals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = locals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(p.log10_ksat >= lo && p.log10_ksat <= hi);

        // Uniform weighting changes weights but stays convex.
        let pu = model.predict_log_with(&v, Weighting::Uniform, CombinationSpace::Log10);
        assert_eq!(pu.trace.len(), p.trace.len());
        for t in &pu.trace {
            assert_eq!(t.weight, 1.0 / p.trace.len() as f64);
        }
        assert!(pu.log10_ksat >= lo && pu.log10_ksat <= hi);

        // Linear-space blending lands within the same span and above the
        // log-space blend (Jensen).
        let pl = model.predict_log_with(&v, Weighting::ArrProportional, CombinationSpace::Linear);
        assert!(pl.log10_ksat >= lo && pl.log10_ksat <= hi);
        assert!(pl.log10_ksat >= p.log10_ksat - 1e-12);
    }

    #[test]
    fn predict_ksat_undoes_the_log() {
        let model = CpxrModel::<f64>::bundled();
        let s = SoilSample {
            id: "t".into(),
            source: "test".into(),
            method: String::new(),
            sand_pct: 20.0,
            silt_pct: 50.0,
            clay_pct: 30.0,
            bulk_density: 1.4,
            height: Some(40.0),
            diameter: Some(10.0),
            ksat_measured: None,
        };
        let (k, p) = model
            .predict_ksat(&s, &PhysicalConstants::default())
            .unwrap();
        assert_eq!(p.trace.len(), 1);
        assert_eq!(k.cm_per_day(), 2.1599799809879485);

        let mut no_dim = s;
        no_dim.diameter = None;
        assert!(model
            .predict_ksat(&no_dim, &PhysicalConstants::default())
            .is_err());
    }
}
