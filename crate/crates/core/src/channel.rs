//! Per-wavelength seawater attenuation.
//!
//! Loss over a path follows Beer-Lambert, `exp(-c d)`, with the attenuation
//! coefficient `c = a + b` the sum of absorption and scattering.

use std::path::Path;

use serde::Serialize;

use crate::{Error, Result};

const SEAWATER_CSV: &str = include_str!("../data/seawater.csv");

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WaterSample {
    pub wavelength_nm: f64,
    pub absorption: f64,
    pub scattering: f64,
}

/// Absorption and scattering coefficients (1/m) sampled over wavelength.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WaterProperties {
    pub name: String,
    samples: Vec<WaterSample>,
}

impl WaterProperties {
    /// Sorts by wavelength and validates the table.
    pub fn new(name: impl Into<String>, mut samples: Vec<WaterSample>) -> Result<Self> {
        let name = name.into();
        if samples.is_empty() {
            return Err(Error::Empty("water table has no samples"));
        }
        for s in &samples {
            if !(s.wavelength_nm > 0.0) || !s.wavelength_nm.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-positive wavelength {}",
                    s.wavelength_nm
                )));
            }
            if !(s.absorption >= 0.0)
                || !(s.scattering >= 0.0)
                || !s.absorption.is_finite()
                || !s.scattering.is_finite()
            {
                return Err(Error::InvalidArgument(format!(
                    "negative coefficient at {} nm",
                    s.wavelength_nm
                )));
            }
        }
        samples.sort_by(|a, b| a.wavelength_nm.total_cmp(&b.wavelength_nm));
        if let Some(w) = samples
            .windows(2)
            .find(|w| w[0].wavelength_nm == w[1].wavelength_nm)
        {
            return Err(Error::InvalidArgument(format!(
                "duplicate wavelength {} nm",
                w[0].wavelength_nm
            )));
        }
        Ok(WaterProperties { name, samples })
    }

    /// The bundled seawater table: 460, 550 and 700 nm.
    pub fn seawater() -> Self {
        parse_water_csv(SEAWATER_CSV, "seawater").expect("bundled seawater table parses")
    }

    pub fn samples(&self) -> &[WaterSample] {
        &self.samples
    }

    pub fn range(&self) -> (f64, f64) {
        (
            self.samples[0].wavelength_nm,
            self.samples[self.samples.len() - 1].wavelength_nm,
        )
    }

    /// Interpolated (a, b) at a wavelength inside the table range.
    pub fn coefficients(&self, wavelength_nm: f64) -> Result<(f64, f64)> {
        let (min, max) = self.range();
        if !(wavelength_nm >= min && wavelength_nm <= max) {
            return Err(Error::WavelengthOutOfRange {
                wavelength: wavelength_nm,
                min,
                max,
            });
        }
        let i = self
            .samples
            .partition_point(|s| s.wavelength_nm <= wavelength_nm)
            - 1;
        let lo = self.samples[i];
        if lo.wavelength_nm == wavelength_nm {
            return Ok((lo.absorption, lo.scattering));
        }
        let hi = self.samples[i + 1];
        let t = (wavelength_nm - lo.wavelength_nm) / (hi.wavelength_nm - lo.wavelength_nm);
        Ok((
            lo.absorption + t * (hi.absorption - lo.absorption),
            lo.scattering + t * (hi.scattering - lo.scattering),
        ))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PathLossResult {
    pub wavelength_nm: f64,
    pub attenuation: f64,
    pub distance_m: f64,
    pub loss_factor: f64,
}

/// c(λ) = a(λ) + b(λ), in 1/m.
pub fn attenuation_coefficient(w: &WaterProperties, wavelength_nm: f64) -> Result<f64> {
    let (a, b) = w.coefficients(wavelength_nm)?;
    Ok(a + b)
}

/// Beer-Lambert loss factor exp(-c d).
pub fn path_loss(attenuation: f64, distance_m: f64) -> Result<f64> {
    if !(attenuation >= 0.0) || !(distance_m >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "attenuation and distance must be nonnegative, got c={attenuation}, d={distance_m}"
        )));
    }
    Ok((-attenuation * distance_m).exp())
}

pub fn path_loss_at(
    w: &WaterProperties,
    wavelength_nm: f64,
    distance_m: f64,
) -> Result<PathLossResult> {
    let c = attenuation_coefficient(w, wavelength_nm)?;
    Ok(PathLossResult {
        wavelength_nm,
        attenuation: c,
        distance_m,
        loss_factor: path_loss(c, distance_m)?,
    })
}

/// Distance at which the loss factor falls to `threshold`: -ln(τ)/c.
pub fn effective_range(attenuation: f64, threshold: f64) -> Result<f64> {
    if !(attenuation > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "attenuation must be positive, got {attenuation}"
        )));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold must lie in (0, 1), got {threshold}"
        )));
    }
    Ok(-threshold.ln() / attenuation)
}

/// Parses a `wavelength_nm,a_per_m,b_per_m` table. Rows may appear in any
/// order; `#` starts a comment line.
pub fn parse_water_csv(text: &str, name: &str) -> Result<WaterProperties> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse(name, 1, e.to_string()))?
        .clone();
    let header_line = headers.position().map_or(1, |p| p.line());
    if headers.iter().collect::<Vec<_>>() != ["wavelength_nm", "a_per_m", "b_per_m"] {
        return Err(Error::parse(
            name,
            header_line,
            "expected header wavelength_nm,a_per_m,b_per_m",
        ));
    }
    let mut samples: Vec<(u64, WaterSample)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec
            .map_err(|e| Error::parse(name, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(name, line, format!("non-numeric cell {:?}", &rec[i])))
        };
        let s = WaterSample {
            wavelength_nm: num(0)?,
            absorption: num(1)?,
            scattering: num(2)?,
        };
        if s.wavelength_nm <= 0.0 {
            return Err(Error::parse(
                name,
                line,
                format!("non-positive wavelength {}", s.wavelength_nm),
            ));
        }
        if s.absorption < 0.0 || s.scattering < 0.0 {
            return Err(Error::parse(name, line, "negative coefficient"));
        }
        if let Some((first, _)) = samples
            .iter()
            .find(|(_, o)| o.wavelength_nm == s.wavelength_nm)
        {
            return Err(Error::parse(
                name,
                line,
                format!(
                    "duplicate wavelength {} nm (first on line {first})",
                    s.wavelength_nm
                ),
            ));
        }
        samples.push((line, s));
    }
    if samples.is_empty() {
        return Err(Error::parse(name, header_line + 1, "no data rows"));
    }
    WaterProperties::new(name, samples.into_iter().map(|(_, s)| s).collect())
}

pub fn load_water_csv(path: impl AsRef<Path>) -> Result<WaterProperties> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path.file_stem().map_or_else(
        || path.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    );
    parse_water_csv(&text, &name)
}
