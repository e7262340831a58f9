//! Log-space error metrics and the per-class evaluation report.
//!
//! Both metrics work on base-10 logs of conductivity: RMSLE is the root mean
//! square of `log10(est) - log10(meas)`, MLE the plain mean of the same
//! differences (negative = underestimation). Sums are compensated and run in
//! input order, so results are reproducible bit for bit.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::accum;
use crate::estimator::{evaluate_models, EvalError, KsatEstimator, ModelSeries};
use crate::soil::SoilSample;
use crate::texture::TextureClass;
use crate::{real, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("empty series")]
    EmptySeries,
    #[error("length mismatch: {estimated} estimated vs {measured} measured")]
    LengthMismatch { estimated: usize, measured: usize },
    #[error("{series}[{index}] = {value} is not a positive finite conductivity")]
    NonPositiveValue {
        series: &'static str,
        index: usize,
        value: f64,
    },
    #[error("no samples to summarize")]
    EmptyGroup,
}

/// Paired estimated/measured conductivities (cm/day), all positive and
/// finite, ready for log-space metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSeries<F> {
    log_diffs: Vec<F>,
}

impl<F: Scalar> PairedSeries<F> {
    pub fn new(estimated: &[F], measured: &[F]) -> Result<Self, MetricsError> {
        if estimated.len() != measured.len() {
            return Err(MetricsError::LengthMismatch {
                estimated: estimated.len(),
                measured: measured.len(),
            });
        }
        if estimated.is_empty() {
            return Err(MetricsError::EmptySeries);
        }
        let check = |series: &'static str, values: &[F]| {
            values
                .iter()
                .position(|v| !(*v > F::zero() && v.is_finite()))
                .map_or(Ok(()), |index| {
                    Err(MetricsError::NonPositiveValue {
                        series,
                        index,
                        value: values[index].to_f64().unwrap_or(f64::NAN),
                    })
                })
        };
        check("estimated", estimated)?;
        check("measured", measured)?;
        let log_diffs = estimated
            .iter()
            .zip(measured)
            .map(|(e, m)| e.log10() - m.log10())
            .collect();
        Ok(PairedSeries { log_diffs })
    }

    pub fn len(&self) -> usize {
        self.log_diffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_diffs.is_empty()
    }

    /// Root mean square log10 error.
    pub fn rmsle(&self) -> F {
        let n = real::<F>(self.log_diffs.len() as f64);
        (accum::sum(self.log_diffs.iter().map(|d| *d * *d)) / n).sqrt()
    }

    /// Mean log10 error; negative means underestimation.
    pub fn mle(&self) -> F {
        let n = real::<F>(self.log_diffs.len() as f64);
        accum::sum(self.log_diffs.iter().copied()) / n
    }
}

/// One (model, class) cell of the evaluation report; `class: None` is the
/// overall row. `n == 0` leaves the metrics empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow<F> {
    pub model: String,
    pub class: Option<TextureClass>,
    pub n: usize,
    pub mle: Option<F>,
    pub rmsle: Option<F>,
    /// Lowest RMSLE among the evaluated models for this class (ties within
    /// 1e-12 share the flag).
    pub best_rmsle: bool,
}

/// Per-model, per-class metrics over one dataset. Rows are ordered by model
/// (input order), then the twelve classes in canonical order, then overall.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport<F> {
    pub rows: Vec<ReportRow<F>>,
    pub models: Vec<String>,
}

impl<F: Scalar> EvalReport<F> {
    pub fn row(&self, model: &str, class: Option<TextureClass>) -> Option<&ReportRow<F>> {
        self.rows
            .iter()
            .find(|r| r.model == model && r.class == class)
    }
}

/// Metrics per model and texture class from evaluated series.
pub fn aggregate_report<F: Scalar>(series: &[ModelSeries<F>]) -> EvalReport<F> {
    let columns: Vec<Option<TextureClass>> = TextureClass::ALL
        .iter()
        .copied()
        .map(Some)
        .chain([None])
        .collect();

    let mut rows = Vec::with_capacity(series.len() * columns.len());
    for s in series {
        for class in &columns {
            let estimated: Vec<F> = s
                .points
                .iter()
                .filter(|p| class.map_or(true, |c| p.class == c))
                .map(|p| p.estimated)
                .collect();
            let measured: Vec<F> = s
                .points
                .iter()
                .filter(|p| class.map_or(true, |c| p.class == c))
                .map(|p| p.measured)
                .collect();
            let (mle, rmsle) = match PairedSeries::new(&estimated, &measured) {
                Ok(paired) => (Some(paired.mle()), Some(paired.rmsle())),
                Err(_) => (None, None),
            };
            rows.push(ReportRow {
                model: s.model.clone(),
                class: *class,
                n: estimated.len(),
                mle,
                rmsle,
                best_rmsle: false,
            });
        }
    }

    // Flag the winner(s) of every class column, overall included.
    let tie: F = real(1e-12);
    for class in &columns {
        let best = rows
            .iter()
            .filter(|r| r.class == *class)
            .filter_map(|r| r.rmsle)
            .fold(None::<F>, |acc, v| {
                Some(acc.map_or(v, |a| if v < a { v } else { a }))
            });
        if let Some(best) = best {
            for row in rows.iter_mut().filter(|r| r.class == *class) {
                if let Some(rmsle) = row.rmsle {
                    row.best_rmsle = (rmsle - best).abs() <= tie;
                }
            }
        }
    }

    EvalReport {
        rows,
        models: series.iter().map(|s| s.model.clone()).collect(),
    }
}

/// Evaluate estimators over samples and aggregate per class in one step.
pub fn per_class_report<F: Scalar>(
    samples: &[SoilSample<F>],
    estimators: &[&dyn KsatEstimator<F>],
) -> Result<EvalReport<F>, EvalError> {
    Ok(aggregate_report(&evaluate_models(samples, estimators)?))
}

/// Count of samples in each texture class, in canonical class order.
pub fn texture_distribution<F: Scalar>(samples: &[SoilSample<F>]) -> [(TextureClass, usize); 12] {
    let mut counts = TextureClass::ALL.map(|c| (c, 0usize));
    for s in samples {
        let class = crate::texture::classify_texture(s.sand_pct, s.silt_pct, s.clay_pct);
        let slot = TextureClass::ALL
            .iter()
            .position(|c| *c == class)
            .expect("class in canonical order");
        counts[slot].1 += 1;
    }
    counts
}

/// Mean and sample standard deviation of one field within one group.
/// `n` counts present values; `n == 1` reports a standard deviation of 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldStats<F> {
    pub n: usize,
    pub mean: F,
    pub sd: F,
}

fn field_stats<F: Scalar>(values: &[F]) -> Option<FieldStats<F>> {
    if values.is_empty() {
        return None;
    }
    let n = real::<F>(values.len() as f64);
    let mean = accum::sum(values.iter().copied()) / n;
    let sd = if values.len() < 2 {
        F::zero()
    } else {
        let ss = accum::sum(values.iter().map(|v| (*v - mean) * (*v - mean)));
        (ss / (n - F::one())).sqrt()
    };
    Some(FieldStats {
        n: values.len(),
        mean,
        sd,
    })
}

/// Descriptive statistics for one source group. Optional fields are `None`
/// when no record in the group carries them.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats<F> {
    pub source: String,
    pub n_samples: usize,
    /// Group has a single sample; its standard deviations read 0.
    pub singleton: bool,
    pub bulk_density: FieldStats<F>,
    pub sand: FieldStats<F>,
    pub silt: FieldStats<F>,
    pub clay: FieldStats<F>,
    pub height: Option<FieldStats<F>>,
    pub diameter: Option<FieldStats<F>>,
    pub ksat: Option<FieldStats<F>>,
}

/// Per-source descriptive statistics, groups in sorted source order.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats<F> {
    pub groups: Vec<GroupStats<F>>,
}

pub fn summary_stats<F: Scalar>(samples: &[SoilSample<F>]) -> Result<SummaryStats<F>, MetricsError> {
    if samples.is_empty() {
        return Err(MetricsError::EmptyGroup);
    }
    let mut by_source: BTreeMap<&str, Vec<&SoilSample<F>>> = BTreeMap::new();
    for s in samples {
        by_source.entry(s.source.as_str()).or_default().push(s);
    }
    let groups = by_source
        .into_iter()
        .map(|(source, members)| {
            let collect = |f: &dyn Fn(&SoilSample<F>) -> Option<F>| -> Vec<F> {
                members.iter().filter_map(|s| f(s)).collect()
            };
            GroupStats {
                source: source.to_string(),
                n_samples: members.len(),
                singleton: members.len() == 1,
                bulk_density: field_stats(&collect(&|s| Some(s.bulk_density))).unwrap(),
                sand: field_stats(&collect(&|s| Some(s.sand_pct))).unwrap(),
                silt: field_stats(&collect(&|s| Some(s.silt_pct))).unwrap(),
                clay: field_stats(&collect(&|s| Some(s.clay_pct))).unwrap(),
                height: field_stats(&collect(&|s| s.height)),
                diameter: field_stats(&collect(&|s| s.diameter)),
                ksat: field_stats(&collect(&|s| s.ksat_measured)),
            }
        })
        .collect();
    Ok(SummaryStats { groups })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_metrics_are_exact() {
        let est = [50.0, 200.0, 5.0];
        let meas = [100.0, 100.0, 10.0];
        let p = PairedSeries::new(&est, &meas).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.rmsle(), 0.3010299956639812);
        assert_eq!(p.mle(), -0.10034333188799371);
    }

    #[test]
    fn perfect_agreement_is_zero() {
        let v = [3.5, 120.0, 0.07];
        let p = PairedSeries::new(&v, &v).unwrap();
        assert_eq!(p.rmsle(), 0.0);
        assert_eq!(p.mle(), 0.0);
    }

    #[test]
    fn input_validation() {
        assert_eq!(
            PairedSeries::<f64>::new(&[], &[]).unwrap_err(),
            MetricsError::EmptySeries
        );
        assert_eq!(
            PairedSeries::new(&[1.0], &[1.0, 2.0]).unwrap_err(),
            MetricsError::LengthMismatch {
                estimated: 1,
                measured: 2
            }
        );
        assert!(matches!(
            PairedSeries::new(&[1.0, 0.0], &[1.0, 1.0]).unwrap_err(),
            MetricsError::NonPositiveValue {
                series: "estimated",
                index: 1,
                ..
            }
        ));
        assert!(PairedSeries::new(&[1.0], &[f64::NAN]).is_err());
    }

    #[test]
    fn scaling_estimates_shifts_the_metrics_predictably() {
        let mut state = crate::synth::SplitMix64::new(0xabcdef);
        for _ in 0..200 {
            let est: Vec<f64> = (0..40)
                .map(|_| 10f64.powf(state.next_unit_f64() * 8.0 - 2.0))
                .collect();
            let meas: Vec<f64> = (0..40)
                .map(|_| 10f64.powf(state.next_unit_f64() * 8.0 - 2.0))
                .collect();
            let p = PairedSeries::new(&est, &meas).unwrap();
            let mle = p.mle();
            let rmsle = p.rmsle();
            assert!(rmsle >= mle.abs() - 1e-12, "rmse dominates |mean|");

            // Scaling every estimate by 10 adds exactly 1 to MLE and turns
            // RMSLE^2 into RMSLE^2 + 2*MLE + 1.
            let scaled: Vec<f64> = est.iter().map(|e| e * 10.0).collect();
            let ps = PairedSeries::new(&scaled, &meas).unwrap();
            assert!((ps.mle() - (mle + 1.0)).abs() < 1e-9);
            assert!((ps.rmsle().powi(2) - (rmsle.powi(2) + 2.0 * mle + 1.0)).abs() < 1e-9);

            // Swapping the roles negates MLE and preserves RMSLE.
            let swapped = PairedSeries::new(&meas, &est).unwrap();
            assert!((swapped.mle() + mle).abs() < 1e-12);
            assert!((swapped.rmsle() - rmsle).abs() < 1e-12);
        }
    }

    #[test]
    fn report_groups_by_class_and_flags_best() {
        use crate::estimator::{EvalPoint, ModelSeries};
        let point = |class, est, meas| EvalPoint {
            index: 0,
            class,
            estimated: est,
            measured: meas,
        };
        let series = vec![
            ModelSeries {
                model: "good".into(),
                points: vec![
                    point(TextureClass::Sand, 100.0, 100.0),
                    point(TextureClass::Sand, 10.0, 100.0),
                    point(TextureClass::Clay, 1.0, 1.0),
                ],
                excluded: vec![],
            },
            ModelSeries {
                model: "bad".into(),
                points: vec![
                    point(TextureClass::Sand, 1.0, 100.0),
                    point(TextureClass::Sand, 10000.0, 100.0),
                    point(TextureClass::Clay, 100.0, 1.0),
                ],
                excluded: vec![],
            },
        ];
        let report = aggregate_report(&series);
        assert_eq!(report.rows.len(), 2 * 13);

        let sand_good = report.row("good", Some(TextureClass::Sand)).unwrap();
        assert_eq!(sand_good.n, 2);
        assert!(sand_good.best_rmsle);
        let sand_bad = report.row("bad", Some(TextureClass::Sand)).unwrap();
        assert!(!sand_bad.best_rmsle);

        let silt = report.row("good", Some(TextureClass::Silt)).unwrap();
        assert_eq!(silt.n, 0);
        assert_eq!(silt.rmsle, None);
        assert!(!silt.best_rmsle);

        let overall_good = report.row("good", None).unwrap();
        assert_eq!(overall_good.n, 3);
        assert!(overall_good.best_rmsle);

        // Identical models tie and share the flag.
        let twin = vec![series[0].clone(), {
            let mut t = series[0].clone();
            t.model = "good2".into();
            t
        }];
        let tied = aggregate_report(&twin);
        assert!(tied.row("good", None).unwrap().best_rmsle);
        assert!(tied.row("good2", None).unwrap().best_rmsle);
    }

    #[test]
    fn overall_mle_is_the_weighted_mean_of_class_mle() {
        use crate::estimator::{ClassicEstimator, KsatEstimator};
        use crate::ptf::ClassicModelId;
        use crate::soil::PhysicalConstants;

        let samples = crate::synth::generate_synthetic(&crate::synth::SynthConfig {
            count: 2_000,
            ..Default::default()
        })
        .unwrap();
        let cosby = ClassicEstimator::new(ClassicModelId::Cosby84, PhysicalConstants::default());
        let report =
            per_class_report(&samples, &[&cosby as &dyn KsatEstimator<f64>]).unwrap();

        let mut weighted = 0.0;
        let mut total = 0usize;
        for class in TextureClass::ALL {
            let row = report.row("cosby84", Some(class)).unwrap();
            if let Some(mle) = row.mle {
                weighted += row.n as f64 * mle;
                total += row.n;
            }
        }
        let overall = report.row("cosby84", None).unwrap();
        assert_eq!(overall.n, total);
        assert!((overall.mle.unwrap() - weighted / total as f64).abs() < 1e-12);
    }

    #[test]
    fn summary_stats_group_and_average() {
        let mk = |source: &str, bd: f64, ksat: Option<f64>| SoilSample::<f64> {
            id: "s".into(),
            source: source.into(),
            method: String::new(),
            sand_pct: 40.0,
            silt_pct: 40.0,
            clay_pct: 20.0,
            bulk_density: bd,
            height: None,
            diameter: Some(8.0),
            ksat_measured: ksat,
        };
        let samples = vec![
            mk("b", 1.2, Some(10.0)),
            mk("a", 1.0, None),
            mk("b", 1.6, Some(1000.0)),
        ];
        let stats = summary_stats(&samples).unwrap();
        assert_eq!(stats.groups.len(), 2);
        assert_eq!(stats.groups[0].source, "a");
        assert!(stats.groups[0].singleton);
        assert_eq!(stats.groups[0].bulk_density.sd, 0.0);
        assert_eq!(stats.groups[0].ksat, None);
        assert_eq!(stats.groups[0].height, None);

        let b = &stats.groups[1];
        assert_eq!(b.n_samples, 2);
        assert_eq!(b.bulk_density.mean, 1.4);
        assert!((b.bulk_density.sd - 0.28284271247461906).abs() < 1e-15);
        let k = b.ksat.unwrap();
        assert_eq!(k.n, 2);
        assert_eq!(k.mean, 505.0);

        assert_eq!(
            summary_stats::<f64>(&[]).unwrap_err(),
            MetricsError::EmptyGroup
        );
    }

    #[test]
    fn texture_distribution_counts_every_sample_once() {
        let mk = |sand: f64, silt: f64, clay: f64| SoilSample::<f64> {
            id: "s".into(),
            source: "t".into(),
            method: String::new(),
            sand_pct: sand,
            silt_pct: silt,
            clay_pct: clay,
            bulk_density: 1.4,
            height: None,
            diameter: None,
            ksat_measured: None,
        };
        let samples = vec![
            mk(92.0, 3.0, 5.0),
            mk(92.0, 3.0, 5.0),
            mk(20.0, 20.0, 60.0),
        ];
        let dist = texture_distribution(&samples);
        let total: usize = dist.iter().map(|(_, n)| n).sum();
        assert_eq!(total, 3);
        assert_eq!(dist[0], (TextureClass::Sand, 2));
        assert_eq!(dist[11], (TextureClass::Clay, 1));
    }
}
