use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{build_constellation, BlueTarget, Constellation4};
use crate::colorimetry::{xy_distance, ChromaticityPoint, GamutPolygon};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetDoc {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsDoc {
    #[serde(rename = "R")]
    pub r: [f64; 2],
    #[serde(rename = "G")]
    pub g: [f64; 2],
    #[serde(rename = "B")]
    pub b: [f64; 2],
    #[serde(rename = "X")]
    pub x: [f64; 2],
}

/// On-disk constellation document. Values are kept exactly as written;
/// [`ConstellationDoc::to_constellation`] re-derives X and d_min.
///
/// Floats are written in shortest round-trip form, so a write/read cycle is
/// bit-exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationDoc {
    pub target: TargetDoc,
    pub points: PointsDoc,
    pub d_min: f64,
    pub provenance: String,
}

fn point(v: [f64; 2], label: &str) -> Result<ChromaticityPoint> {
    ChromaticityPoint::new(v[0], v[1])
        .map_err(|e| Error::InvalidArgument(format!("point {label}: {e}")))
}

impl ConstellationDoc {
    pub fn from_constellation(
        c: &Constellation4,
        target: &BlueTarget,
        provenance: impl Into<String>,
    ) -> Self {
        ConstellationDoc {
            target: TargetDoc {
                center: target.center.to_array(),
                radius: target.radius,
            },
            points: PointsDoc {
                r: c.r().to_array(),
                g: c.g().to_array(),
                b: c.b().to_array(),
                x: c.x().to_array(),
            },
            d_min: c.d_min(),
            provenance: provenance.into(),
        }
    }

    pub fn target(&self) -> Result<BlueTarget> {
        BlueTarget::new(
            point(self.target.center, "target center")?,
            self.target.radius,
        )
    }

    pub fn to_constellation(&self, gamut: &GamutPolygon) -> Result<Constellation4> {
        build_constellation(
            point(self.points.r, "R")?,
            point(self.points.g, "G")?,
            point(self.points.b, "B")?,
            gamut,
        )
    }

    /// Like [`ConstellationDoc::to_constellation`] without the gamut check.
    pub fn to_constellation_unchecked(&self) -> Result<Constellation4> {
        Constellation4::new(
            point(self.points.r, "R")?,
            point(self.points.g, "G")?,
            point(self.points.b, "B")?,
        )
    }

    /// Distance between the stored X and the centroid of the stored R, G, B.
    pub fn centroid_mismatch(&self) -> f64 {
        let [r, g, b] = [self.points.r, self.points.g, self.points.b];
        let c = ChromaticityPoint::xy((r[0] + g[0] + b[0]) / 3.0, (r[1] + g[1] + b[1]) / 3.0);
        xy_distance(c, ChromaticityPoint::xy(self.points.x[0], self.points.x[1]))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{table1, table1_row};
    use proptest::prelude::*;

    #[test]
    fn fixture_documents_round_trip() {
        for row in table1() {
            let doc = row.document();
            let back = ConstellationDoc::from_json(&doc.to_json()).unwrap();
            assert_eq!(back, doc);
        }
    }

    #[test]
    fn mismatch_flags_t1o2_only() {
        for row in table1() {
            let bad = row.document().centroid_mismatch() > super::super::CENTROID_TOLERANCE;
            assert_eq!(bad, row.name == "table1-t1o2", "{}", row.name);
        }
    }

    #[test]
    fn rejects_truncated_and_invalid() {
        let json = table1_row("table1-t3o1").unwrap().document().to_json();
        assert!(ConstellationDoc::from_json(&json[..json.len() / 2]).is_err());
        let bad = json.replace("\"radius\"", "\"radios\"");
        assert!(ConstellationDoc::from_json(&bad).is_err());
    }

    proptest! {
        #[test]
        fn json_is_bit_exact(rx in 0.2f64..0.5, ry in 0.1f64..0.3, gx in 0.05f64..0.2, gy in 0.3f64..0.6, r in 0.0f64..0.1) {
            let doc = ConstellationDoc {
                target: TargetDoc { center: [0.15, 0.15], radius: r },
                points: PointsDoc { r: [rx, ry], g: [gx, gy], b: [0.1355, 0.03988], x: [(rx + gx + 0.1355) / 3.0, (ry + gy + 0.03988) / 3.0] },
                d_min: rx * gy,
                provenance: "prop".into(),
            };
            let back = ConstellationDoc::from_json(&doc.to_json()).unwrap();
            prop_assert_eq!(back.points.r[0].to_bits(), rx.to_bits());
            prop_assert_eq!(back.points.x[1].to_bits(), doc.points.x[1].to_bits());
            prop_assert_eq!(back.d_min.to_bits(), doc.d_min.to_bits());
            prop_assert_eq!(back.target.radius.to_bits(), r.to_bits());
        }
    }
}
