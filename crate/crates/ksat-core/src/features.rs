//! Predictor set consumed by the pattern-ensemble model.

use thiserror::Error;

use crate::soil::{PhysicalConstants, SoilSample};
use crate::Scalar;

/// The eight model predictors. `name()` doubles as the wire name in model
/// bundles, so the mapping is part of the bundle format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Feature {
    Sand,
    Silt,
    Clay,
    /// Geometric mean particle diameter, mm.
    GeoMeanDiameter,
    /// Geometric standard deviation of particle diameter.
    GeoStdDev,
    BulkDensity,
    /// Core internal diameter, cm.
    Diameter,
    /// Core height (length), cm.
    Height,
}

impl Feature {
    pub const ALL: [Feature; 8] = [
        Feature::Sand,
        Feature::Silt,
        Feature::Clay,
        Feature::GeoMeanDiameter,
        Feature::GeoStdDev,
        Feature::BulkDensity,
        Feature::Diameter,
        Feature::Height,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::Sand => "sand",
            Feature::Silt => "silt",
            Feature::Clay => "clay",
            Feature::GeoMeanDiameter => "dg",
            Feature::GeoStdDev => "sigma_g",
            Feature::BulkDensity => "bulk_density",
            Feature::Diameter => "diameter",
            Feature::Height => "height",
        }
    }

    pub fn parse(name: &str) -> Option<Feature> {
        Feature::ALL.into_iter().find(|f| f.name() == name)
    }
}

impl std::fmt::Display for Feature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Concrete predictor values for one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector<F> {
    pub sand: F,
    pub silt: F,
    pub clay: F,
    pub dg: F,
    pub sigma_g: F,
    pub bulk_density: F,
    pub diameter: F,
    pub height: F,
}

impl<F: Scalar> FeatureVector<F> {
    pub fn get(&self, feature: Feature) -> F {
        match feature {
            Feature::Sand => self.sand,
            Feature::Silt => self.silt,
            Feature::Clay => self.clay,
            Feature::GeoMeanDiameter => self.dg,
            Feature::GeoStdDev => self.sigma_g,
            Feature::BulkDensity => self.bulk_density,
            Feature::Diameter => self.diameter,
            Feature::Height => self.height,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeatureError {
    #[error("sample {id} is missing {which}, required by the ensemble model")]
    MissingDimension { id: String, which: &'static str },
}

/// Derive the predictor vector from a validated sample: texture and density
/// are copied through, `dg`/`sigma_g` come from the particle-size summary,
/// and both core dimensions must be present.
pub fn derive_features<F: Scalar>(
    sample: &SoilSample<F>,
    constants: &PhysicalConstants<F>,
) -> Result<FeatureVector<F>, FeatureError> {
    let missing = |which| FeatureError::MissingDimension {
        id: sample.id.clone(),
        which,
    };
    let height = sample.height.ok_or_else(|| missing("height"))?;
    let diameter = sample.diameter.ok_or_else(|| missing("diameter"))?;
    let (dg, sigma_g) =
        crate::soil::derive_particle_stats(sample.sand_pct, sample.silt_pct, sample.clay_pct, constants);
    Ok(FeatureVector {
        sand: sample.sand_pct,
        silt: sample.silt_pct,
        clay: sample.clay_pct,
        dg,
        sigma_g,
        bulk_density: sample.bulk_density,
        diameter,
        height,
    })
}
