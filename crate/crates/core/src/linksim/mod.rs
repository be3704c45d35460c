//! End-to-end link evaluation.
//!
//! Each constellation point is mixed from three LEDs, attenuated per band by
//! the water column and detected by one photodiode per band. The noiseless
//! received vectors form a [`HypothesisSet`]; detection, symbol error rate
//! and mutual information are computed over additive white Gaussian noise.

mod curve;
mod rng;
mod sim;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::channel::{attenuation_coefficient, path_loss, WaterProperties};
use crate::colorimetry::{locus_point, photopic_efficiency, solve_fluxes, ChromaticityPoint};
use crate::constellation::{Constellation4, Symbol, PRIMARY_BLUE};
use crate::{Error, Result};

pub use curve::{CurveKind, CurvePoint, RateCurve, SerCurve, SnrCurve};
pub use sim::{
    achievable_rate, mutual_information, q_function, rate_curve, reference_sigma, sigma_for_snr,
    simulate_ser, simulate_ser_hypotheses, union_bound, union_bound_curve, union_bound_ser,
    MiEstimate,
};

/// Luminous efficacy of radiation at 555 nm, lm/W.
pub const LUMENS_PER_WATT: f64 = 683.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Primary {
    /// Emission wavelength used for attenuation and V(λ).
    pub wavelength_nm: f64,
    /// Chromaticity used for intensity mixing.
    pub point: ChromaticityPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinkConfig {
    pub primaries: [Primary; 3],
    pub distance_m: f64,
    pub total_luminous_flux: f64,
    pub responsivity: f64,
    pub electro_optic_factor: f64,
    pub bandwidth_hz: f64,
    pub water: WaterProperties,
    /// V(λ) for each primary.
    pub luminous_efficacy: [f64; 3],
}

impl Default for LinkConfig {
    /// Red 700 nm, green 550 nm and blue 460 nm LEDs in seawater at 10 m.
    /// The green LED mixes at the 510 nm locus chromaticity and the blue at
    /// the fixed blue symbol, so every reference design is producible.
    fn default() -> Self {
        let primaries = [
            Primary {
                wavelength_nm: 700.0,
                point: locus_point(700.0).expect("700 nm on the locus"),
            },
            Primary {
                wavelength_nm: 550.0,
                point: locus_point(510.0).expect("510 nm on the locus"),
            },
            Primary {
                wavelength_nm: 460.0,
                point: PRIMARY_BLUE,
            },
        ];
        let luminous_efficacy =
            primaries.map(|p| photopic_efficiency(p.wavelength_nm).expect("in table"));
        LinkConfig {
            primaries,
            distance_m: 10.0,
            total_luminous_flux: 12.0,
            responsivity: 0.85,
            electro_optic_factor: 0.55,
            bandwidth_hz: 1e8,
            water: WaterProperties::seawater(),
            luminous_efficacy,
        }
    }
}

impl LinkConfig {
    pub fn with_distance(mut self, distance_m: f64) -> Self {
        self.distance_m = distance_m;
        self
    }

    pub fn with_water(mut self, water: WaterProperties) -> Self {
        self.water = water;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("total_luminous_flux", self.total_luminous_flux),
            ("responsivity", self.responsivity),
            ("electro_optic_factor", self.electro_optic_factor),
            ("bandwidth_hz", self.bandwidth_hz),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.distance_m >= 0.0) || !self.distance_m.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "distance must be >= 0, got {}",
                self.distance_m
            )));
        }
        let (lo, hi) = self.water.range();
        for (p, v) in self.primaries.iter().zip(self.luminous_efficacy) {
            if !(p.wavelength_nm >= lo && p.wavelength_nm <= hi) {
                return Err(Error::WavelengthOutOfRange {
                    wavelength: p.wavelength_nm,
                    min: lo,
                    max: hi,
                });
            }
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "V({} nm) must lie in (0, 1], got {v}",
                    p.wavelength_nm
                )));
            }
            p.point.validate()?;
        }
        Ok(())
    }

    /// Chromaticities of the three primaries.
    pub fn primary_points(&self) -> [ChromaticityPoint; 3] {
        self.primaries.map(|p| p.point)
    }

    /// Squared amplitude of the full flux emitted at peak efficacy and
    /// detected without loss. This is the fixed noise reference for rates.
    pub fn reference_power(&self) -> f64 {
        let a = self.responsivity * self.electro_optic_factor * self.total_luminous_flux
            / LUMENS_PER_WATT;
        a * a
    }

    /// SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        sha256_hex(
            serde_json::to_string(self)
                .expect("config serializes")
                .as_bytes(),
        )
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisTrace {
    pub wavelengths_nm: Vec<f64>,
    /// Per symbol, per band luminous flux (lm).
    pub fluxes: Vec<Vec<f64>>,
    /// Per symbol, per band transmitted optical power (W).
    pub optical_power: Vec<Vec<f64>>,
    /// Per band loss factor.
    pub losses: Vec<f64>,
}

/// Noiseless received vectors, one per symbol, each with `dims` bands.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisSet {
    dims: usize,
    signals: Vec<f64>,
    pub trace: HypothesisTrace,
}

impl HypothesisSet {
    /// Builds a set from explicit vectors; used for synthetic channels.
    pub fn from_vectors(vectors: &[Vec<f64>]) -> Result<Self> {
        let dims = vectors.first().map_or(0, Vec::len);
        if vectors.len() < 2 {
            return Err(Error::InvalidArgument(
                "need at least two hypotheses".into(),
            ));
        }
        if dims == 0 || dims > 3 || vectors.iter().any(|v| v.len() != dims) {
            return Err(Error::InvalidArgument(
                "hypotheses must share a dimension between 1 and 3".into(),
            ));
        }
        if vectors.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite hypothesis entry".into()));
        }
        Ok(HypothesisSet {
            dims,
            signals: vectors.concat(),
            trace: HypothesisTrace {
                wavelengths_nm: Vec::new(),
                fluxes: Vec::new(),
                optical_power: Vec::new(),
                losses: Vec::new(),
            },
        })
    }

    pub fn len(&self) -> usize {
        self.signals.len() / self.dims
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.signals[i * self.dims..(i + 1) * self.dims]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.signals.chunks_exact(self.dims)
    }

    /// (1 / (dims · M)) Σ ‖h_i‖².
    pub fn average_power(&self) -> f64 {
        self.signals.iter().map(|v| v * v).sum::<f64>() / self.signals.len() as f64
    }

    pub fn digest(&self) -> String {
        sha256_hex(
            serde_json::to_string(&(self.dims, &self.signals))
                .expect("serializes")
                .as_bytes(),
        )
    }
}

fn distance_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Symbols in hypothesis order.
pub const SYMBOL_ORDER: [Symbol; 4] = Symbol::ALL;

pub fn build_hypotheses(c: &Constellation4, cfg: &LinkConfig) -> Result<HypothesisSet> {
    cfg.validate()?;
    let prims = cfg.primary_points();
    let losses: Vec<f64> = cfg
        .primaries
        .iter()
        .map(|p| {
            path_loss(
                attenuation_coefficient(&cfg.water, p.wavelength_nm)?,
                cfg.distance_m,
            )
        })
        .collect::<Result<_>>()?;
    let mut fluxes = Vec::with_capacity(4);
    let mut optical_power = Vec::with_capacity(4);
    let mut signals = Vec::with_capacity(12);
    for s in SYMBOL_ORDER {
        let y = solve_fluxes(&prims, c.point(s), cfg.total_luminous_flux).map_err(|e| match e {
            Error::OutOfTriangle { index, flux, .. } => Error::InfeasibleConstellation {
                label: s.to_string(),
                index,
                flux,
            },
            other => other,
        })?;
        let p: Vec<f64> = (0..3)
            .map(|k| cfg.electro_optic_factor * y[k] / (LUMENS_PER_WATT * cfg.luminous_efficacy[k]))
            .collect();
        signals.extend((0..3).map(|k| cfg.responsivity * p[k] * losses[k]));
        fluxes.push(y.to_vec());
        optical_power.push(p);
    }
    Ok(HypothesisSet {
        dims: 3,
        signals,
        trace: HypothesisTrace {
            wavelengths_nm: cfg.primaries.iter().map(|p| p.wavelength_nm).collect(),
            fluxes,
            optical_power,
            losses,
        },
    })
}

/// On-off keying with a single LED emitting the full flux: hypotheses
/// {0, ρ·P·loss} on one band.
pub fn ook_hypotheses(wavelength_nm: f64, cfg: &LinkConfig) -> Result<HypothesisSet> {
    cfg.validate()?;
    let v = cfg
        .primaries
        .iter()
        .zip(cfg.luminous_efficacy)
        .find(|(p, _)| p.wavelength_nm == wavelength_nm)
        .map_or_else(|| photopic_efficiency(wavelength_nm), |(_, v)| Ok(v))?;
    let loss = path_loss(
        attenuation_coefficient(&cfg.water, wavelength_nm)?,
        cfg.distance_m,
    )?;
    let p = cfg.electro_optic_factor * cfg.total_luminous_flux / (LUMENS_PER_WATT * v);
    Ok(HypothesisSet {
        dims: 1,
        signals: vec![0.0, cfg.responsivity * p * loss],
        trace: HypothesisTrace {
            wavelengths_nm: vec![wavelength_nm],
            fluxes: vec![vec![0.0], vec![cfg.total_luminous_flux]],
            optical_power: vec![vec![0.0], vec![p]],
            losses: vec![loss],
        },
    })
}

/// Index of the nearest hypothesis; ties go to the lowest index.
pub fn detect_ml(received: &[f64], h: &HypothesisSet) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, hi) in h.iter().enumerate() {
        let d = distance_sq(received, hi);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::channel::path_loss_at;
    use crate::colorimetry::GamutPolygon;
    use crate::constellation::{build_constellation, table1};

    /// A design producible at the default primaries.
    pub(crate) fn inside_triangle() -> Constellation4 {
        let tri = {
            let [a, b, c] = LinkConfig::default().primary_points();
            GamutPolygon::triangle(a, b, c).unwrap()
        };
        build_constellation(
            ChromaticityPoint::xy(0.6, 0.33),
            ChromaticityPoint::xy(0.1, 0.6),
            PRIMARY_BLUE,
            &tri,
        )
        .unwrap()
    }

    #[test]
    fn default_config_is_valid() {
        let cfg = LinkConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.luminous_efficacy, [0.004102, 0.9949501, 0.06]);
        assert!((cfg.reference_power().sqrt() - 0.85 * 0.55 * 12.0 / 683.0).abs() < 1e-15);
        assert_eq!(cfg.digest(), LinkConfig::default().digest());
        assert_ne!(cfg.digest(), cfg.clone().with_distance(50.0).digest());
    }

    #[test]
    fn invalid_config() {
        let mut cfg = LinkConfig::default();
        cfg.responsivity = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = LinkConfig::default();
        cfg.primaries[0].wavelength_nm = 800.0;
        assert!(matches!(
            cfg.validate(),
            Err(Error::WavelengthOutOfRange { .. })
        ));
    }

    #[test]
    fn zero_distance_has_unit_losses() {
        let cfg = LinkConfig::default().with_distance(0.0);
        let h = build_hypotheses(&inside_triangle(), &cfg).unwrap();
        assert_eq!(h.trace.losses, vec![1.0; 3]);
        for (i, hi) in h.iter().enumerate() {
            for k in 0..3 {
                assert_eq!(hi[k], cfg.responsivity * h.trace.optical_power[i][k]);
            }
        }
    }

    #[test]
    fn blue_symbol_uses_only_blue_band() {
        let h = build_hypotheses(&inside_triangle(), &LinkConfig::default()).unwrap();
        let b = SYMBOL_ORDER.iter().position(|s| *s == Symbol::B).unwrap();
        assert_eq!(h.trace.fluxes[b], vec![0.0, 0.0, 12.0]);
        assert_eq!(&h.get(b)[..2], &[0.0, 0.0]);
        assert!(h.get(b)[2] > 0.0);
    }

    #[test]
    fn hypotheses_compose_the_pipeline() {
        let cfg = LinkConfig::default();
        let c = inside_triangle();
        let h = build_hypotheses(&c, &cfg).unwrap();
        assert_eq!(h.len(), 4);
        for (i, s) in SYMBOL_ORDER.iter().enumerate() {
            let y = solve_fluxes(&cfg.primary_points(), c.point(*s), 12.0).unwrap();
            for k in 0..3 {
                let wl = cfg.primaries[k].wavelength_nm;
                let loss = path_loss_at(&cfg.water, wl, 10.0).unwrap().loss_factor;
                let p = 0.55 * y[k] / (683.0 * photopic_efficiency(wl).unwrap());
                let expect = 0.85 * p * loss;
                assert!(
                    (h.get(i)[k] - expect).abs() <= 1e-15 * expect.max(1e-300),
                    "{s} band {k}"
                );
                assert!(h.get(i)[k] >= 0.0);
            }
        }
    }

    #[test]
    fn out_of_triangle_is_infeasible() {
        let locus = GamutPolygon::spectral_locus();
        let b = PRIMARY_BLUE;
        let c = build_constellation(
            ChromaticityPoint::xy(0.6, 0.33),
            ChromaticityPoint::xy(0.1, 0.8),
            b,
            locus,
        )
        .unwrap();
        let err = build_hypotheses(&c, &LinkConfig::default()).unwrap_err();
        assert!(
            matches!(err, Error::InfeasibleConstellation { .. }),
            "{err}"
        );
    }

    #[test]
    fn reference_designs_exceed_the_source_triangle() {
        let cfg = LinkConfig::default();
        for row in table1() {
            let c = row.constellation().unwrap();
            assert!(
                matches!(
                    build_hypotheses(&c, &cfg),
                    Err(Error::InfeasibleConstellation { .. })
                ),
                "{}",
                row.name
            );
        }
    }

    #[test]
    fn ook_levels() {
        let cfg = LinkConfig::default();
        let h = ook_hypotheses(460.0, &cfg).unwrap();
        assert_eq!(h.dims(), 1);
        assert_eq!(h.get(0), &[0.0]);
        let loss = (-(0.0156f64 + 0.004) * 10.0).exp();
        let expect = 0.85 * 0.55 * 12.0 / (683.0 * 0.06) * loss;
        assert!((h.get(1)[0] - expect).abs() < 1e-15);
        assert!(ook_hypotheses(900.0, &cfg).is_err());
    }

    #[test]
    fn detection_rules() {
        let h = HypothesisSet::from_vectors(&[
            vec![0.0, 0.0],
            vec![2.0, 0.0],
            vec![0.0, 2.0],
            vec![2.0, 2.0],
        ])
        .unwrap();
        assert_eq!(detect_ml(h.get(2), &h), 2);
        assert_eq!(detect_ml(&[1.0, 0.0], &h), 0);
        assert_eq!(detect_ml(&[1.0, 1.0], &h), 0);
        // Nudge h_1 toward h_3 by less than half their separation.
        let d13 = distance_sq(h.get(1), h.get(3)).sqrt();
        let dir: Vec<f64> = h
            .get(3)
            .iter()
            .zip(h.get(1))
            .map(|(a, b)| (a - b) / d13)
            .collect();
        let y: Vec<f64> = h
            .get(1)
            .iter()
            .zip(&dir)
            .map(|(a, u)| a + 0.49 * d13 * u)
            .collect();
        assert_eq!(detect_ml(&y, &h), 1);
    }

    #[test]
    fn from_vectors_rejects_bad_shapes() {
        assert!(HypothesisSet::from_vectors(&[vec![1.0]]).is_err());
        assert!(HypothesisSet::from_vectors(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(HypothesisSet::from_vectors(&[vec![0.0; 4], vec![1.0; 4]]).is_err());
    }
}
