//! Closed-form pedotransfer functions for saturated hydraulic conductivity.
//!
//! Seven published models, each mapping a subset of {sand %, silt %, clay %,
//! bulk density, porosity} to Ksat in cm/day. Coefficients are transcribed
//! verbatim from the literature; terms are summed left to right exactly as
//! printed, so results are reproducible bit for bit.

use thiserror::Error;

use crate::soil::{compute_porosity, DensityError, PhysicalConstants, SoilSample};
use crate::{real, Scalar};

/// Saturated hydraulic conductivity, cm/day.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Conductivity<F>(pub F);

impl<F: Scalar> Conductivity<F> {
    pub fn cm_per_day(self) -> F {
        self.0
    }
}

/// The seven closed-form models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassicModelId {
    Brakensiek84,
    CampbellShiozawa94,
    Cosby84,
    Jabro92,
    Puckett85,
    DanePuckett94,
    Saxton86,
}

impl ClassicModelId {
    pub const ALL: [ClassicModelId; 7] = [
        ClassicModelId::Brakensiek84,
        ClassicModelId::CampbellShiozawa94,
        ClassicModelId::Cosby84,
        ClassicModelId::Jabro92,
        ClassicModelId::Puckett85,
        ClassicModelId::DanePuckett94,
        ClassicModelId::Saxton86,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ClassicModelId::Brakensiek84 => "brakensiek84",
            ClassicModelId::CampbellShiozawa94 => "campbell-shiozawa94",
            ClassicModelId::Cosby84 => "cosby84",
            ClassicModelId::Jabro92 => "jabro92",
            ClassicModelId::Puckett85 => "puckett85",
            ClassicModelId::DanePuckett94 => "dane-puckett94",
            ClassicModelId::Saxton86 => "saxton86",
        }
    }
}

impl std::fmt::Display for ClassicModelId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// Which reading of the Jabro (1992) equation to evaluate.
///
/// As printed, the equation multiplies the bracketed log-linear expression by
/// 24 directly, which yields negative conductivities for most real soils —
/// the bracket is plainly a base-10 logarithm of Ksat in cm/hr. The corrected
/// form `24 * 10^bracket` is the default everywhere; the printed form stays
/// available for audits of the original text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JabroForm {
    #[default]
    CorrectedLog10,
    AsPrinted,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimateError {
    #[error("{model} is undefined for this sample: {why}")]
    NotApplicable {
        model: ClassicModelId,
        why: String,
    },
    #[error(transparent)]
    NonphysicalDensity(#[from] DensityError),
}

/// Whether the model is defined for the sample. Only Jabro (1992) restricts
/// its domain: it takes logarithms of silt and clay, so zero content of
/// either is out.
pub fn is_applicable<F: Scalar>(model: ClassicModelId, sample: &SoilSample<F>) -> bool {
    match model {
        ClassicModelId::Jabro92 => {
            sample.silt_pct > F::zero() && sample.clay_pct > F::zero()
        }
        _ => true,
    }
}

/// Evaluate one classic model with the default (corrected) Jabro form.
pub fn estimate_classic<F: Scalar>(
    model: ClassicModelId,
    sample: &SoilSample<F>,
    constants: &PhysicalConstants<F>,
) -> Result<Conductivity<F>, EstimateError> {
    estimate_classic_with(model, sample, constants, JabroForm::default())
}

/// Evaluate one classic model, selecting the Jabro form explicitly.
pub fn estimate_classic_with<F: Scalar>(
    model: ClassicModelId,
    sample: &SoilSample<F>,
    constants: &PhysicalConstants<F>,
    jabro_form: JabroForm,
) -> Result<Conductivity<F>, EstimateError> {
    let sa = sample.sand_pct;
    let si = sample.silt_pct;
    let cl = sample.clay_pct;
    let p = |x: f64| -> F { real(x) };

    let value = match model {
        ClassicModelId::Brakensiek84 => {
            let phi = compute_porosity(sample.bulk_density, constants)?;
            let e = p(19.52348) * phi - p(8.96847) - p(0.028212) * cl
                + p(0.00018107) * sa * sa
                - p(0.0094125) * cl * cl
                - p(8.395215) * phi * phi
                + p(0.077718) * phi * sa
                - p(0.00298) * phi * phi * sa * sa
                - p(0.019492) * phi * phi * cl * cl
                + p(0.0000173) * sa * sa * cl
                + p(0.02733) * phi * cl * cl
                + p(0.001434) * phi * sa * sa
                - p(0.0000035) * cl * cl * sa;
            p(24.0) * e.exp()
        }
        ClassicModelId::CampbellShiozawa94 => p(129.6) * (-p(0.07) * si - p(0.167) * cl).exp(),
        ClassicModelId::Cosby84 => {
            p(60.96) * p(10.0).powf(-p(0.6) + p(0.0126) * sa - p(0.0064) * cl)
        }
        ClassicModelId::Jabro92 => {
            if !is_applicable(model, sample) {
                return Err(EstimateError::NotApplicable {
                    model,
                    why: format!(
                        "log of silt and clay requires both nonzero (silt={si}, clay={cl})"
                    ),
                });
            }
            let bracket = p(9.56) - p(0.81) * si.log10() - p(1.09) * cl.log10()
                - p(4.64) * sample.bulk_density;
            match jabro_form {
                JabroForm::CorrectedLog10 => p(24.0) * p(10.0).powf(bracket),
                JabroForm::AsPrinted => p(24.0) * bracket,
            }
        }
        ClassicModelId::Puckett85 => p(376.7) * (-p(0.1975) * cl).exp(),
        ClassicModelId::DanePuckett94 => p(729.22) * (-p(0.144) * cl).exp(),
        ClassicModelId::Saxton86 => p(24.0) * (p(12.012) - p(0.0755) * sa).exp(),
    };
    Ok(Conductivity(value))
}
