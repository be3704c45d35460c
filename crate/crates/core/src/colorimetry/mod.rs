//! CIE 1931 chromaticity-plane mathematics.
//!
//! Points live on the (x, y) chromaticity plane. Luminance enters only
//! through tristimulus conversion, where the Y component carries the
//! luminous flux of a source.

mod data;
mod gamut;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use data::{
    load_locus_csv, locus_point, parse_locus_csv, photopic_efficiency, spectral_locus_samples,
    LocusSample,
};
pub use gamut::GamutPolygon;

/// Smallest y accepted by tristimulus conversion.
pub const MIN_Y: f64 = 1e-6;

/// Relative slack on barycentric weights before a mixing target is declared
/// outside the primaries' triangle.
const BARYCENTRIC_SLACK: f64 = 1e-9;

/// A point (x, y) on the CIE 1931 chromaticity plane.
///
/// Fields are public so intermediate geometry (for example optimizer
/// iterates) can leave the physical region; [`ChromaticityPoint::new`] and
/// deserialization enforce `0 <= x`, `0 < y`, `x + y <= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct ChromaticityPoint {
    pub x: f64,
    pub y: f64,
}

impl ChromaticityPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        let p = ChromaticityPoint { x, y };
        p.validate()?;
        Ok(p)
    }

    /// Construct without checking the chromaticity invariants.
    pub const fn xy(x: f64, y: f64) -> Self {
        ChromaticityPoint { x, y }
    }

    pub fn validate(&self) -> Result<()> {
        const EPS: f64 = 1e-12;
        let ok = self.x.is_finite()
            && self.y.is_finite()
            && self.x >= 0.0
            && self.y > 0.0
            && self.x <= 1.0
            && self.y <= 1.0
            && self.x + self.y <= 1.0 + EPS;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidChromaticity {
                x: self.x,
                y: self.y,
            })
        }
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.x, self.y]
    }
}

impl TryFrom<[f64; 2]> for ChromaticityPoint {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        ChromaticityPoint::new(v[0], v[1])
    }
}

impl From<ChromaticityPoint> for [f64; 2] {
    fn from(p: ChromaticityPoint) -> Self {
        p.to_array()
    }
}

impl fmt::Display for ChromaticityPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.5}, {:.5})", self.x, self.y)
    }
}

/// CIE XYZ tristimulus values. `y` carries luminance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tristimulus {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Tristimulus {
    pub fn sum(&self) -> f64 {
        self.x + self.y + self.z
    }
}

impl std::ops::Add for Tristimulus {
    type Output = Tristimulus;

    fn add(self, o: Tristimulus) -> Tristimulus {
        Tristimulus {
            x: self.x + o.x,
            y: self.y + o.y,
            z: self.z + o.z,
        }
    }
}

/// Euclidean distance on the chromaticity plane.
pub fn xy_distance(p: ChromaticityPoint, q: ChromaticityPoint) -> f64 {
    (p.x - q.x).hypot(p.y - q.y)
}

/// Unweighted mean of the given points.
pub fn centroid(points: &[ChromaticityPoint]) -> Result<ChromaticityPoint> {
    if points.is_empty() {
        return Err(Error::Empty("centroid of an empty point list"));
    }
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Ok(ChromaticityPoint::xy(sx / n, sy / n))
}

/// X = xY/y, Z = (1 - x - y)Y/y.
pub fn xy_to_tristimulus(p: ChromaticityPoint, luminance: f64) -> Result<Tristimulus> {
    if p.y < MIN_Y {
        return Err(Error::DegenerateChromaticity(p));
    }
    if !(luminance >= 0.0) || !luminance.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "luminance must be a finite nonnegative value, got {luminance}"
        )));
    }
    let k = luminance / p.y;
    Ok(Tristimulus {
        x: p.x * k,
        y: luminance,
        z: (1.0 - p.x - p.y) * k,
    })
}

/// Projects tristimulus values back onto the chromaticity plane.
pub fn tristimulus_to_xy(t: Tristimulus) -> Result<ChromaticityPoint> {
    let s = t.sum();
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(
            "tristimulus sum must be positive".into(),
        ));
    }
    Ok(ChromaticityPoint::xy(t.x / s, t.y / s))
}

/// Chromaticity of the additive mix of three primaries driven at the given
/// luminous fluxes.
pub fn mix_chromaticity(
    primaries: &[ChromaticityPoint; 3],
    fluxes: &[f64; 3],
) -> Result<ChromaticityPoint> {
    if fluxes.iter().any(|f| !(*f >= 0.0) || !f.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "fluxes must be finite and nonnegative, got {fluxes:?}"
        )));
    }
    if fluxes.iter().all(|f| *f == 0.0) {
        return Err(Error::InvalidArgument("all fluxes are zero".into()));
    }
    let mut total = Tristimulus {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };
    for (p, f) in primaries.iter().zip(fluxes) {
        total = total + xy_to_tristimulus(*p, *f)?;
    }
    tristimulus_to_xy(total)
}

/// Barycentric weights of `p` in the triangle `tri`, or `None` when the
/// triangle is degenerate.
pub(crate) fn barycentric(tri: &[ChromaticityPoint; 3], p: ChromaticityPoint) -> Option<[f64; 3]> {
    let [a, b, c] = *tri;
    let det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    let scale = xy_distance(a, b)
        .max(xy_distance(b, c))
        .max(xy_distance(c, a));
    if scale == 0.0 || det.abs() <= 1e-12 * scale * scale {
        return None;
    }
    let wb = ((p.x - a.x) * (c.y - a.y) - (c.x - a.x) * (p.y - a.y)) / det;
    let wc = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) / det;
    Some([1.0 - wb - wc, wb, wc])
}

/// Luminous fluxes (Y tristimulus) of three primaries that sum to `y_total`
/// and mix to `target`.
///
/// The mix of sources is a mass-weighted average on the chromaticity plane
/// with masses X + Y + Z = Y/y, so the mass fractions are the barycentric
/// coordinates of the target in the primaries' triangle.
pub fn solve_fluxes(
    primaries: &[ChromaticityPoint; 3],
    target: ChromaticityPoint,
    y_total: f64,
) -> Result<[f64; 3]> {
    if !(y_total > 0.0) || !y_total.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "total flux must be positive, got {y_total}"
        )));
    }
    if let Some(p) = primaries.iter().find(|p| p.y < MIN_Y) {
        return Err(Error::DegenerateChromaticity(*p));
    }
    let mut w = barycentric(primaries, target).ok_or(Error::SingularPrimaries)?;
    for (index, wk) in w.iter_mut().enumerate() {
        if *wk < 0.0 {
            if *wk >= -BARYCENTRIC_SLACK {
                *wk = 0.0;
            } else {
                return Err(Error::OutOfTriangle {
                    target,
                    index,
                    flux: *wk,
                });
            }
        }
    }
    let raw = [
        w[0] * primaries[0].y,
        w[1] * primaries[1].y,
        w[2] * primaries[2].y,
    ];
    let norm = y_total / (raw[0] + raw[1] + raw[2]);
    Ok([raw[0] * norm, raw[1] * norm, raw[2] * norm])
}

/// Inside-or-on-boundary test against a gamut polygon.
pub fn in_gamut(p: ChromaticityPoint, g: &GamutPolygon) -> bool {
    g.contains(p)
}
