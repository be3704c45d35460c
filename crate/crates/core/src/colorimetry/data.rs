//! Bundled CIE 1931 tables: the spectral locus and the photopic luminous
//! efficiency function, both at 5 nm.

use std::path::Path;
use std::sync::OnceLock;

use super::ChromaticityPoint;
use crate::{Error, Result};

const LOCUS_CSV: &str = include_str!("../../data/cie1931_locus_5nm.csv");
const PHOTOPIC_CSV: &str = include_str!("../../data/cie1931_photopic_5nm.csv");

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocusSample {
    pub wavelength_nm: f64,
    pub point: ChromaticityPoint,
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

/// Parses `wavelength_nm,x,y` rows. Wavelengths must be strictly increasing.
pub fn parse_locus_csv(text: &str, source_name: &str) -> Result<Vec<LocusSample>> {
    let mut rdr = reader(text);
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse(source_name, 1, e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["wavelength_nm", "x", "y"] {
        return Err(Error::parse(
            source_name,
            1,
            "expected header wavelength_nm,x,y",
        ));
    }
    let mut out: Vec<LocusSample> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::parse(source_name, line, e.to_string())
        })?;
        let line = line_of(&rec);
        let num = |i: usize| -> Result<f64> {
            rec[i].parse::<f64>().map_err(|_| {
                Error::parse(source_name, line, format!("non-numeric cell {:?}", &rec[i]))
            })
        };
        let (w, x, y) = (num(0)?, num(1)?, num(2)?);
        let point = ChromaticityPoint::new(x, y)
            .map_err(|e| Error::parse(source_name, line, e.to_string()))?;
        if let Some(prev) = out.last() {
            if w <= prev.wavelength_nm {
                return Err(Error::parse(
                    source_name,
                    line,
                    "wavelengths must be strictly increasing",
                ));
            }
        }
        out.push(LocusSample {
            wavelength_nm: w,
            point,
        });
    }
    if out.len() < 3 {
        return Err(Error::parse(
            source_name,
            0,
            "need at least 3 locus samples",
        ));
    }
    Ok(out)
}

pub fn load_locus_csv(path: impl AsRef<Path>) -> Result<Vec<LocusSample>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_locus_csv(&text, &path.display().to_string())
}

/// The bundled spectral locus, 380–700 nm.
pub fn spectral_locus_samples() -> &'static [LocusSample] {
    static TABLE: OnceLock<Vec<LocusSample>> = OnceLock::new();
    TABLE.get_or_init(|| {
        parse_locus_csv(LOCUS_CSV, "cie1931_locus_5nm.csv").expect("bundled locus table parses")
    })
}

fn photopic_table() -> &'static [(f64, f64)] {
    static TABLE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut rdr = reader(PHOTOPIC_CSV);
        rdr.records()
            .map(|r| {
                let r = r.expect("bundled photopic table parses");
                (r[0].parse().unwrap(), r[1].parse().unwrap())
            })
            .collect()
    })
}

fn interpolate(table: &[(f64, f64)], at: f64) -> Result<f64> {
    let (min, max) = (table[0].0, table[table.len() - 1].0);
    if !(at >= min && at <= max) {
        return Err(Error::WavelengthOutOfRange {
            wavelength: at,
            min,
            max,
        });
    }
    let i = table.partition_point(|(w, _)| *w <= at) - 1;
    let (w0, v0) = table[i];
    if w0 == at || i + 1 == table.len() {
        return Ok(v0);
    }
    let (w1, v1) = table[i + 1];
    Ok(v0 + (v1 - v0) * (at - w0) / (w1 - w0))
}

/// CIE photopic luminous efficiency V(λ), linearly interpolated.
pub fn photopic_efficiency(wavelength_nm: f64) -> Result<f64> {
    interpolate(photopic_table(), wavelength_nm)
}

/// Spectral-locus chromaticity at a wavelength, linearly interpolated between
/// the bundled samples.
pub fn locus_point(wavelength_nm: f64) -> Result<ChromaticityPoint> {
    let s = spectral_locus_samples();
    let xs: Vec<(f64, f64)> = s.iter().map(|s| (s.wavelength_nm, s.point.x)).collect();
    let ys: Vec<(f64, f64)> = s.iter().map(|s| (s.wavelength_nm, s.point.y)).collect();
    Ok(ChromaticityPoint::xy(
        interpolate(&xs, wavelength_nm)?,
        interpolate(&ys, wavelength_nm)?,
    ))
}
