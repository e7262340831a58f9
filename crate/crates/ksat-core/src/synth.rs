//! Seeded synthetic sample corpus for benchmarks and determinism tests.
//!
//! The generator is a fixed, documented contract: the same seed and count
//! produce the same samples on every platform, and sample `i` is a pure
//! function of `(seed, i)`, independent of how many samples surround it.

use thiserror::Error;

use crate::soil::SoilSample;

/// SplitMix64. State advances by the golden-gamma constant; each output is
/// the finalization mix of the new state. Simple, fast, and good enough for
/// corpus synthesis; not cryptographic.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix(self.state)
    }

    /// Uniform in [0, 1): the top 53 bits over 2^53.
    pub fn next_unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Draw `index` of the stream seeded by `seed`, without stepping through the
/// preceding draws: `mix(seed + (index+1)*GAMMA)`.
pub fn indexed_draw(seed: u64, index: u64) -> u64 {
    mix(seed.wrapping_add(GAMMA.wrapping_mul(index.wrapping_add(1))))
}

/// Ranges for the synthetic corpus. Texture is always a uniform draw over
/// the whole simplex; conductivity is log-uniform.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub count: usize,
    /// Bulk density range, g/cm3.
    pub bulk_density: (f64, f64),
    /// Core height range, cm.
    pub height: (f64, f64),
    /// Core diameter range, cm.
    pub diameter: (f64, f64),
    /// log10 of measured conductivity range, cm/day.
    pub log10_ksat: (f64, f64),
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 42,
            count: 10_000,
            bulk_density: (1.05, 1.85),
            height: (2.0, 60.0),
            diameter: (2.5, 16.0),
            log10_ksat: (-2.0, 6.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("count must be positive")]
    ZeroCount,
    #[error("{which} range [{lo}, {hi}] is not a bounded nondegenerate interval")]
    DegenerateRange { which: &'static str, lo: f64, hi: f64 },
}

fn check_range(which: &'static str, (lo, hi): (f64, f64)) -> Result<(), SynthError> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(SynthError::DegenerateRange { which, lo, hi })
    }
}

/// Texture lattice resolution. Two cuts on a 2^20 lattice give triples whose
/// percentages are exact multiples of 100/2^20, so sand+silt+clay is exactly
/// 100 in floating point.
const LATTICE: u64 = 1 << 20;

fn lerp(lo: f64, hi: f64, u: f64) -> f64 {
    lo + (hi - lo) * u
}

/// Generate the corpus. Sample `i` consumes draws `6i .. 6i+5` of the seeded
/// stream: two lattice cuts for texture, then bulk density, height, diameter,
/// and log-conductivity. Every sample passes default validation, carries
/// both dimensions and a measured conductivity, and has `source` set to
/// `synthetic`.
pub fn generate_synthetic(config: &SynthConfig) -> Result<Vec<SoilSample<f64>>, SynthError> {
    if config.count == 0 {
        return Err(SynthError::ZeroCount);
    }
    check_range("bulk_density", config.bulk_density)?;
    check_range("height", config.height)?;
    check_range("diameter", config.diameter)?;
    check_range("log10_ksat", config.log10_ksat)?;
    if config.bulk_density.0 <= 0.0 {
        return Err(SynthError::DegenerateRange {
            which: "bulk_density",
            lo: config.bulk_density.0,
            hi: config.bulk_density.1,
        });
    }

    let unit = |draw: u64| (draw >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let samples = (0..config.count)
        .map(|i| {
            let base = 6 * i as u64;
            let cut_a = indexed_draw(config.seed, base) % (LATTICE + 1);
            let cut_b = indexed_draw(config.seed, base + 1) % (LATTICE + 1);
            let (lo, hi) = if cut_a <= cut_b {
                (cut_a, cut_b)
            } else {
                (cut_b, cut_a)
            };
            // 100 * k / 2^20 is exact: the numerator stays well under 2^53.
            let pct = |k: u64| 100.0 * k as f64 / LATTICE as f64;
            let sand = pct(lo);
            let silt = pct(hi - lo);
            let clay = pct(LATTICE - hi);

            let bd = lerp(
                config.bulk_density.0,
                config.bulk_density.1,
                unit(indexed_draw(config.seed, base + 2)),
            );
            let height = lerp(
                config.height.0,
                config.height.1,
                unit(indexed_draw(config.seed, base + 3)),
            );
            let diameter = lerp(
                config.diameter.0,
                config.diameter.1,
                unit(indexed_draw(config.seed, base + 4)),
            );
            let ksat = 10f64.powf(lerp(
                config.log10_ksat.0,
                config.log10_ksat.1,
                unit(indexed_draw(config.seed, base + 5)),
            ));

            SoilSample {
                id: format!("synth-{i:06}"),
                source: "synthetic".to_string(),
                method: "synthetic".to_string(),
                sand_pct: sand,
                silt_pct: silt,
                clay_pct: clay,
                bulk_density: bd,
                height: Some(height),
                diameter: Some(diameter),
                ksat_measured: Some(ksat),
            }
        })
        .collect();
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::soil::ValidationOptions;

    #[test]
    fn deterministic_and_prefix_stable() {
        let a = generate_synthetic(&SynthConfig {
            count: 50,
            ..SynthConfig::default()
        })
        .unwrap();
        let b = generate_synthetic(&SynthConfig {
            count: 50,
            ..SynthConfig::default()
        })
        .unwrap();
        assert_eq!(a, b);

        // Shorter runs are prefixes of longer ones.
        let c = generate_synthetic(&SynthConfig {
            count: 10,
            ..SynthConfig::default()
        })
        .unwrap();
        assert_eq!(&a[..10], &c[..]);

        // A different seed changes the data.
        let d = generate_synthetic(&SynthConfig {
            seed: 43,
            count: 50,
            ..SynthConfig::default()
        })
        .unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn every_sample_validates_with_exact_texture_sum() {
        let config = SynthConfig {
            count: 5_000,
            ..SynthConfig::default()
        };
        for s in generate_synthetic(&config).unwrap() {
            assert_eq!(s.sand_pct + s.silt_pct + s.clay_pct, 100.0, "id {}", s.id);
            let bd = s.bulk_density;
            let (h, d, k) = (s.height.unwrap(), s.diameter.unwrap(), s.ksat_measured.unwrap());
            s.validate(&ValidationOptions::default()).unwrap();
            assert!((1.05..1.85).contains(&bd));
            assert!((2.0..60.0).contains(&h));
            assert!((2.5..16.0).contains(&d));
            assert!(k >= 0.01 && k < 1.0e6);
        }
    }

    #[test]
    fn config_validation() {
        let mut config = SynthConfig {
            count: 0,
            ..SynthConfig::default()
        };
        assert_eq!(generate_synthetic(&config).unwrap_err(), SynthError::ZeroCount);
        config.count = 1;
        config.height = (5.0, 5.0);
        assert!(matches!(
            generate_synthetic(&config).unwrap_err(),
            SynthError::DegenerateRange { which: "height", .. }
        ));
        config.height = (2.0, 60.0);
        config.bulk_density = (-0.5, 1.0);
        assert!(matches!(
            generate_synthetic(&config).unwrap_err(),
            SynthError::DegenerateRange { which: "bulk_density", .. }
        ));
    }

    #[test]
    fn default_corpus_covers_every_class_and_pattern() {
        let samples = generate_synthetic(&SynthConfig::default()).unwrap();
        assert_eq!(samples.len(), 10_000);

        let mut class_seen = [false; 12];
        for s in &samples {
            let class = crate::texture::classify_texture(s.sand_pct, s.silt_pct, s.clay_pct);
            let slot = crate::texture::TextureClass::ALL
                .iter()
                .position(|c| *c == class)
                .unwrap();
            class_seen[slot] = true;
        }
        assert!(class_seen.iter().all(|&b| b), "classes hit: {class_seen:?}");

        let model = crate::cpxr::CpxrModel::<f64>::bundled();
        let constants = crate::soil::PhysicalConstants::default();
        let mut pattern_seen = [false; 14];
        for s in &samples {
            let features = crate::features::derive_features(s, &constants).unwrap();
            for entry in model.predict_log(&features).trace {
                pattern_seen[entry.pattern_id as usize - 1] = true;
            }
        }
        assert!(
            pattern_seen.iter().all(|&b| b),
            "patterns hit: {pattern_seen:?}"
        );
    }

    #[test]
    fn indexed_draws_match_sequential_stream() {
        let mut seq = SplitMix64::new(1234);
        for i in 0..100 {
            assert_eq!(seq.next_u64(), indexed_draw(1234, i));
        }
    }

    #[test]
    fn unit_draws_cover_the_interval() {
        let mut rng = SplitMix64::new(7);
        let mut lo = 1.0f64;
        let mut hi = 0.0f64;
        for _ in 0..10_000 {
            let u = rng.next_unit_f64();
            assert!((0.0..1.0).contains(&u));
            lo = lo.min(u);
            hi = hi.max(u);
        }
        assert!(lo < 0.001 && hi > 0.999);
    }
}
