use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CurveKind {
    Ser,
    UnionBound,
    Rate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub snr_db: f64,
    pub value: f64,
    /// Monte Carlo standard error; not stored in CSV.
    pub std_err: f64,
}

/// A value over an SNR grid with its provenance metadata.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SnrCurve {
    pub kind: CurveKind,
    pub seed: u64,
    /// Symbols or samples per grid point.
    pub n: u64,
    pub config_sha: String,
    pub points: Vec<CurvePoint>,
}

pub type SerCurve = SnrCurve;
pub type RateCurve = SnrCurve;

impl SnrCurve {
    /// CSV text: three comment lines, then `snr_db,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# seed={}", self.seed).unwrap();
        writeln!(s, "# n={}", self.n).unwrap();
        writeln!(s, "# config_sha={}", self.config_sha).unwrap();
        s.push_str("snr_db,value\n");
        for p in &self.points {
            writeln!(s, "{},{:.9e}", p.snr_db, p.value).unwrap();
        }
        s
    }

    /// Parses CSV text and checks the grid and value range for `kind`.
    /// `cap` bounds rate values from above.
    pub fn from_csv(
        text: &str,
        kind: CurveKind,
        cap: Option<f64>,
        source_name: &str,
    ) -> Result<Self> {
        let mut seed = None;
        let mut n = None;
        let mut sha = None;
        let mut header = false;
        let mut points: Vec<CurvePoint> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i as u64 + 1;
            let err = |m: String| Error::parse(source_name, lineno, m);
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                let (key, value) = meta
                    .trim()
                    .split_once('=')
                    .ok_or_else(|| err("malformed comment".into()))?;
                match key.trim() {
                    "seed" => {
                        seed = Some(value.trim().parse().map_err(|_| err("bad seed".into()))?)
                    }
                    "n" => n = Some(value.trim().parse().map_err(|_| err("bad n".into()))?),
                    "config_sha" => sha = Some(value.trim().to_string()),
                    _ => {}
                }
                continue;
            }
            if !header {
                if line != "snr_db,value" {
                    return Err(err("expected header snr_db,value".into()));
                }
                header = true;
                continue;
            }
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| err("expected two columns".into()))?;
            let snr_db: f64 = a
                .trim()
                .parse()
                .map_err(|_| err(format!("bad snr {a:?}")))?;
            let value: f64 = b
                .trim()
                .parse()
                .map_err(|_| err(format!("bad value {b:?}")))?;
            if let Some(prev) = points.last() {
                if snr_db <= prev.snr_db {
                    return Err(err("snr grid must be strictly increasing".into()));
                }
            }
            let in_range = match kind {
                CurveKind::Ser | CurveKind::UnionBound => {
                    value >= 0.0 && (kind == CurveKind::UnionBound || value <= 1.0)
                }
                CurveKind::Rate => value >= 0.0 && cap.is_none_or(|c| value <= c),
            };
            if !in_range || !value.is_finite() {
                return Err(err(format!("value {value} out of range")));
            }
            points.push(CurvePoint {
                snr_db,
                value,
                std_err: f64::NAN,
            });
        }
        let missing = |what| Error::parse(source_name, 0, format!("missing {what}"));
        if !header {
            return Err(missing("header"));
        }
        if points.is_empty() {
            return Err(missing("data rows"));
        }
        Ok(SnrCurve {
            kind,
            seed: seed.ok_or_else(|| missing("# seed="))?,
            n: n.ok_or_else(|| missing("# n="))?,
            config_sha: sha.ok_or_else(|| missing("# config_sha="))?,
            points,
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<Path>, kind: CurveKind, cap: Option<f64>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text, kind, cap, &path.display().to_string())
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }
}
