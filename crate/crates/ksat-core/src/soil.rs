//! Soil sample records, validation, and derived physical quantities.
//!
//! Unit conventions, used consistently across the crate:
//! texture fractions in mass percent, bulk density in g/cm3, core height and
//! diameter in cm, saturated hydraulic conductivity in cm/day, particle
//! diameters in mm.

use thiserror::Error;

use crate::{real, Scalar};

/// Physical constants used when deriving quantities from a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants<F> {
    /// Particle density of the solid phase, g/cm3.
    pub particle_density: F,
    /// Representative clay particle diameter, mm.
    pub clay_diameter: F,
    /// Representative silt particle diameter, mm.
    pub silt_diameter: F,
    /// Representative sand particle diameter, mm.
    pub sand_diameter: F,
}

impl<F: Scalar> Default for PhysicalConstants<F> {
    fn default() -> Self {
        PhysicalConstants {
            particle_density: real(2.65),
            clay_diameter: real(0.001),
            silt_diameter: real(0.026),
            sand_diameter: real(1.025),
        }
    }
}

/// One soil core: identity, texture, density, dimensions, and (when the
/// record comes from a conductivity measurement) measured Ksat.
#[derive(Debug, Clone, PartialEq)]
pub struct SoilSample<F> {
    pub id: String,
    /// Label of the dataset or site the record came from.
    pub source: String,
    /// Measurement method label; carried through verbatim, never interpreted.
    pub method: String,
    pub sand_pct: F,
    pub silt_pct: F,
    pub clay_pct: F,
    /// Dry bulk density, g/cm3.
    pub bulk_density: F,
    /// Core height (length), cm. Optional: some records omit dimensions.
    pub height: Option<F>,
    /// Core internal diameter, cm. Optional: some records omit dimensions.
    pub diameter: Option<F>,
    /// Measured saturated hydraulic conductivity, cm/day.
    pub ksat_measured: Option<F>,
}

/// Controls for [`SoilSample::validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationOptions<F> {
    /// Maximum tolerated |sand+silt+clay - 100|.
    pub tolerance: F,
    /// Rescale the texture triple to sum to exactly 100 when it is merely
    /// within tolerance.
    pub renormalize: bool,
}

impl<F: Scalar> Default for ValidationOptions<F> {
    fn default() -> Self {
        ValidationOptions {
            tolerance: real(0.5),
            renormalize: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("{field} = {value} is outside 0..=100")]
    PercentOutOfRange { field: &'static str, value: f64 },
    #[error("sand+silt+clay = {sum} is off 100 by more than {tolerance}")]
    TextureSumViolation { sum: f64, tolerance: f64 },
    #[error("{field} = {value} must be positive")]
    NonPositiveField { field: &'static str, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DensityError {
    #[error("bulk density {bulk_density} g/cm3 is not in (0, {particle_density})")]
    Nonphysical {
        bulk_density: f64,
        particle_density: f64,
    },
}

fn as_f64<F: Scalar>(x: F) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

impl<F: Scalar> SoilSample<F> {
    /// Check ranges and the texture-sum constraint; optionally renormalize
    /// the triple so it sums to exactly 100.
    ///
    /// The rescaling multiplies each fraction by `100/sum` and then recomputes
    /// clay as `100 - (sand + silt)`, so the stored triple sums to exactly
    /// 100.0 and a second validation pass leaves the sample bit-identical.
    /// In the corner case where absorbing the residual would drive clay
    /// negative (only reachable when clay is essentially zero), clay is
    /// pinned to 0 and silt absorbs the residual instead.
    pub fn validate(mut self, options: &ValidationOptions<F>) -> Result<Self, ValidationError> {
        let zero = F::zero();
        let hundred: F = real(100.0);

        for (field, value) in [
            ("sand_pct", self.sand_pct),
            ("silt_pct", self.silt_pct),
            ("clay_pct", self.clay_pct),
        ] {
            if !(value >= zero && value <= hundred) {
                return Err(ValidationError::PercentOutOfRange {
                    field,
                    value: as_f64(value),
                });
            }
        }

        let sum = self.sand_pct + self.silt_pct + self.clay_pct;
        if !((sum - hundred).abs() <= options.tolerance) {
            return Err(ValidationError::TextureSumViolation {
                sum: as_f64(sum),
                tolerance: as_f64(options.tolerance),
            });
        }

        if !(self.bulk_density > zero) {
            return Err(ValidationError::NonPositiveField {
                field: "bulk_density",
                value: as_f64(self.bulk_density),
            });
        }
        for (field, value) in [
            ("height", self.height),
            ("diameter", self.diameter),
            ("ksat_measured", self.ksat_measured),
        ] {
            if let Some(v) = value {
                if !(v > zero) {
                    return Err(ValidationError::NonPositiveField {
                        field,
                        value: as_f64(v),
                    });
                }
            }
        }

        if options.renormalize && sum != hundred {
            let sand = hundred * self.sand_pct / sum;
            let silt = hundred * self.silt_pct / sum;
            let clay = hundred - (sand + silt);
            if clay >= zero {
                self.sand_pct = sand;
                self.silt_pct = silt;
                self.clay_pct = clay;
            } else {
                self.sand_pct = sand;
                self.silt_pct = hundred - sand;
                self.clay_pct = zero;
            }
        }

        Ok(self)
    }
}

/// Total porosity from dry bulk density: `1 - bulk_density/particle_density`.
pub fn compute_porosity<F: Scalar>(
    bulk_density: F,
    constants: &PhysicalConstants<F>,
) -> Result<F, DensityError> {
    if !(bulk_density > F::zero() && bulk_density < constants.particle_density) {
        return Err(DensityError::Nonphysical {
            bulk_density: as_f64(bulk_density),
            particle_density: as_f64(constants.particle_density),
        });
    }
    Ok(F::one() - bulk_density / constants.particle_density)
}

/// Geometric mean particle diameter (mm) and geometric standard deviation of
/// the three-fraction log-normal particle-size summary.
///
/// With mass fractions `f_i` (clay, silt, sand summing to 1) and the
/// representative diameters `M_i` from `constants`:
///
/// * `dg = prod M_i^(f_i)`
/// * `sigma_g = exp(sqrt(sum f_i (ln M_i)^2 - (sum f_i ln M_i)^2))`
///
/// `dg` is computed as the product of powers (not `exp` of the log sum) so a
/// pure fraction reproduces its representative diameter exactly; the variance
/// radicand is floored at zero so pure fractions give `sigma_g` exactly 1.
///
/// Expects a validated texture triple.
pub fn derive_particle_stats<F: Scalar>(
    sand_pct: F,
    silt_pct: F,
    clay_pct: F,
    constants: &PhysicalConstants<F>,
) -> (F, F) {
    let hundred: F = real(100.0);
    let fractions = [
        (clay_pct / hundred, constants.clay_diameter),
        (silt_pct / hundred, constants.silt_diameter),
        (sand_pct / hundred, constants.sand_diameter),
    ];

    let mut dg = F::one();
    let mut mean_log = F::zero();
    let mut mean_log_sq = F::zero();
    for (f, m) in fractions {
        dg = dg * m.powf(f);
        let ln_m = m.ln();
        mean_log = mean_log + f * ln_m;
        mean_log_sq = mean_log_sq + f * (ln_m * ln_m);
    }

    let variance = (mean_log_sq - mean_log * mean_log).max(F::zero());
    (dg, variance.sqrt().exp())
}
