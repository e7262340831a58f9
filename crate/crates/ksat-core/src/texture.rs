//! USDA texture triangle: twelve classes over (sand, silt, clay) percents.
//!
//! Classification is an ordered first-match cascade; rule order is part of
//! the contract, so boundary points land deterministically. Every valid
//! triple (components in 0..=100 summing to 100) matches some rule: the
//! final clay rule absorbs whatever the first eleven leave.

use crate::{real, Scalar};

/// The twelve USDA texture classes, coarse to fine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TextureClass {
    Sand,
    LoamySand,
    SandyLoam,
    Loam,
    SiltLoam,
    Silt,
    SandyClayLoam,
    ClayLoam,
    SiltyClayLoam,
    SandyClay,
    SiltyClay,
    Clay,
}

impl TextureClass {
    /// All classes, in the canonical coarse-to-fine order used by reports.
    pub const ALL: [TextureClass; 12] = [
        TextureClass::Sand,
        TextureClass::LoamySand,
        TextureClass::SandyLoam,
        TextureClass::Loam,
        TextureClass::SiltLoam,
        TextureClass::Silt,
        TextureClass::SandyClayLoam,
        TextureClass::ClayLoam,
        TextureClass::SiltyClayLoam,
        TextureClass::SandyClay,
        TextureClass::SiltyClay,
        TextureClass::Clay,
    ];

    /// Conventional short label, e.g. `SaL` for sandy loam.
    pub fn abbreviation(self) -> &'static str {
        match self {
            TextureClass::Sand => "Sa",
            TextureClass::LoamySand => "LSa",
            TextureClass::SandyLoam => "SaL",
            TextureClass::Loam => "L",
            TextureClass::SiltLoam => "SiL",
            TextureClass::Silt => "Si",
            TextureClass::SandyClayLoam => "SaCL",
            TextureClass::ClayLoam => "CL",
            TextureClass::SiltyClayLoam => "SiCL",
            TextureClass::SandyClay => "SaC",
            TextureClass::SiltyClay => "SiC",
            TextureClass::Clay => "C",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TextureClass::Sand => "sand",
            TextureClass::LoamySand => "loamy sand",
            TextureClass::SandyLoam => "sandy loam",
            TextureClass::Loam => "loam",
            TextureClass::SiltLoam => "silt loam",
            TextureClass::Silt => "silt",
            TextureClass::SandyClayLoam => "sandy clay loam",
            TextureClass::ClayLoam => "clay loam",
            TextureClass::SiltyClayLoam => "silty clay loam",
            TextureClass::SandyClay => "sandy clay",
            TextureClass::SiltyClay => "silty clay",
            TextureClass::Clay => "clay",
        }
    }
}

impl std::fmt::Display for TextureClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.abbreviation())
    }
}

/// Classify a validated texture triple (percents, summing to 100).
///
/// The stored percentages are used directly; the rules are the standard
/// triangle boundaries, evaluated top to bottom, first match wins.
pub fn classify_texture<F: Scalar>(sand: F, silt: F, clay: F) -> TextureClass {
    let p = |x: f64| -> F { real(x) };

    if silt + p(1.5) * clay < p(15.0) {
        TextureClass::Sand
    } else if silt + p(2.0) * clay < p(30.0) {
        TextureClass::LoamySand
    } else if (clay >= p(7.0) && clay < p(20.0) && sand > p(52.0) && silt + p(2.0) * clay >= p(30.0))
        || (clay < p(7.0) && silt < p(50.0) && sand > p(43.0))
    {
        TextureClass::SandyLoam
    } else if clay >= p(7.0) && clay < p(27.0) && silt >= p(28.0) && silt < p(50.0) && sand <= p(52.0)
    {
        TextureClass::Loam
    } else if (silt >= p(50.0) && clay >= p(12.0) && clay < p(27.0))
        || (silt >= p(50.0) && silt < p(80.0) && clay < p(12.0))
    {
        TextureClass::SiltLoam
    } else if silt >= p(80.0) && clay < p(12.0) {
        TextureClass::Silt
    } else if clay >= p(20.0) && clay < p(35.0) && silt < p(28.0) && sand > p(45.0) {
        TextureClass::SandyClayLoam
    } else if clay >= p(27.0) && clay < p(40.0) && sand > p(20.0) && sand <= p(45.0) {
        TextureClass::ClayLoam
    } else if clay >= p(27.0) && clay < p(40.0) && sand <= p(20.0) {
        TextureClass::SiltyClayLoam
    } else if clay >= p(35.0) && sand > p(45.0) {
        TextureClass::SandyClay
    } else if clay >= p(40.0) && silt >= p(40.0) {
        TextureClass::SiltyClay
    } else {
        // clay >= 40, sand <= 45, silt < 40: everything the rules above
        // leave. The acceptance grid sweep pins this down.
        TextureClass::Clay
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classify(sand: f64, silt: f64, clay: f64) -> TextureClass {
        assert_eq!(sand + silt + clay, 100.0);
        classify_texture(sand, silt, clay)
    }

    #[test]
    fn interior_points_hit_expected_classes() {
        assert_eq!(classify(92.0, 3.0, 5.0), TextureClass::Sand);
        assert_eq!(classify(82.0, 10.0, 8.0), TextureClass::LoamySand);
        assert_eq!(classify(60.0, 30.0, 10.0), TextureClass::SandyLoam);
        assert_eq!(classify(40.0, 40.0, 20.0), TextureClass::Loam);
        assert_eq!(classify(20.0, 60.0, 20.0), TextureClass::SiltLoam);
        assert_eq!(classify(5.0, 85.0, 10.0), TextureClass::Silt);
        assert_eq!(classify(55.0, 15.0, 30.0), TextureClass::SandyClayLoam);
        assert_eq!(classify(32.0, 35.0, 33.0), TextureClass::ClayLoam);
        assert_eq!(classify(10.0, 57.0, 33.0), TextureClass::SiltyClayLoam);
        assert_eq!(classify(50.0, 8.0, 42.0), TextureClass::SandyClay);
        assert_eq!(classify(7.0, 48.0, 45.0), TextureClass::SiltyClay);
        assert_eq!(classify(20.0, 20.0, 60.0), TextureClass::Clay);
    }

    #[test]
    fn boundary_points_resolve_deterministically() {
        // sand/loamy sand edge: silt + 1.5*clay == 15 fails the strict sand rule
        assert_eq!(classify(85.0, 15.0, 0.0), TextureClass::LoamySand);
        assert_eq!(classify(90.0, 10.0, 0.0), TextureClass::Sand);
        // quadruple point of SaCL/CL/SaC/C territory
        assert_eq!(classify(45.0, 20.0, 35.0), TextureClass::ClayLoam);
        assert_eq!(classify(46.0, 19.0, 35.0), TextureClass::SandyClay);
        // loam/sandy clay loam edge at clay == 20 with low silt
        assert_eq!(classify(52.0, 28.0, 20.0), TextureClass::Loam);
        assert_eq!(classify(53.0, 27.0, 20.0), TextureClass::SandyClayLoam);
        // silt loam / silt edge
        assert_eq!(classify(8.0, 80.0, 12.0), TextureClass::SiltLoam);
        assert_eq!(classify(9.0, 80.0, 11.0), TextureClass::Silt);
        assert_eq!(classify(9.5, 79.5, 11.0), TextureClass::SiltLoam);
        // clay loam / silty clay loam edge at sand == 20
        assert_eq!(classify(20.0, 53.0, 27.0), TextureClass::SiltyClayLoam);
        assert_eq!(classify(21.0, 52.0, 27.0), TextureClass::ClayLoam);
        // silty clay / clay edge
        assert_eq!(classify(20.0, 40.0, 40.0), TextureClass::SiltyClay);
        assert_eq!(classify(21.0, 39.0, 40.0), TextureClass::Clay);
    }

    #[test]
    fn class_order_and_labels_are_stable() {
        let abbrevs: Vec<&str> = TextureClass::ALL.iter().map(|c| c.abbreviation()).collect();
        assert_eq!(
            abbrevs,
            ["Sa", "LSa", "SaL", "L", "SiL", "Si", "SaCL", "CL", "SiCL", "SaC", "SiC", "C"]
        );
    }
}
