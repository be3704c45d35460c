//! Four-symbol constellation model: R, G and B vertices plus their centroid X.

mod document;
mod fixtures;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::colorimetry::{centroid, xy_distance, ChromaticityPoint, GamutPolygon};
use crate::{Error, Result};

pub use document::{ConstellationDoc, PointsDoc, TargetDoc};
pub use fixtures::{table1, table1_row, Table1Row};

/// The blue primary, kept fixed in every design.
pub const PRIMARY_BLUE: ChromaticityPoint = ChromaticityPoint::xy(0.1355, 0.03988);

/// Slack used when deciding whether X sits inside a target disk.
pub const DISK_TOLERANCE: f64 = 1e-6;

/// Centroid agreement required for a stored X to count as consistent.
pub const CENTROID_TOLERANCE: f64 = 5e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    R,
    G,
    B,
    X,
}

impl Symbol {
    pub const ALL: [Symbol; 4] = [Symbol::R, Symbol::G, Symbol::B, Symbol::X];
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Symbol::R => "R",
            Symbol::G => "G",
            Symbol::B => "B",
            Symbol::X => "X",
        };
        f.write_str(s)
    }
}

/// Disk on the chromaticity plane that must contain the mixed output color.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlueTarget {
    pub center: ChromaticityPoint,
    pub radius: f64,
}

impl BlueTarget {
    pub fn new(center: ChromaticityPoint, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "target radius must be >= 0, got {radius}"
            )));
        }
        Ok(BlueTarget { center, radius })
    }

    /// The three reference targets: larger (1), average (2) and smaller (3)
    /// blue spectrum.
    pub fn preset(index: u8) -> Result<Self> {
        let (c, r) = match index {
            1 => ((0.15, 0.22), 0.1),
            2 => ((0.15, 0.15), 0.07),
            3 => ((0.15, 0.1), 0.04),
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown preset {index}; expected 1, 2 or 3"
                )))
            }
        };
        Ok(BlueTarget {
            center: ChromaticityPoint::xy(c.0, c.1),
            radius: r,
        })
    }

    /// Signed margin `radius - |p - center|`; nonnegative means inside.
    pub fn margin(&self, p: ChromaticityPoint) -> f64 {
        self.radius - xy_distance(p, self.center)
    }

    /// Whether the closed disk meets the gamut polygon.
    pub fn intersects(&self, gamut: &GamutPolygon) -> bool {
        gamut.contains(self.center) || gamut.signed_distance(self.center) >= -self.radius
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinDistance {
    pub value: f64,
    pub pair: (Symbol, Symbol),
}

fn pair_min(points: &[(Symbol, ChromaticityPoint); 4]) -> MinDistance {
    let mut best = MinDistance {
        value: f64::INFINITY,
        pair: (Symbol::R, Symbol::G),
    };
    for i in 0..4 {
        for j in i + 1..4 {
            let d = xy_distance(points[i].1, points[j].1);
            if d < best.value {
                best = MinDistance {
                    value: d,
                    pair: (points[i].0, points[j].0),
                };
            }
        }
    }
    best
}

/// A validated 4-point constellation. X is always the centroid of R, G, B.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constellation4 {
    r: ChromaticityPoint,
    g: ChromaticityPoint,
    b: ChromaticityPoint,
    x: ChromaticityPoint,
    d_min: MinDistance,
}

impl Constellation4 {
    /// X = centroid(R, G, B) with no gamut check; see [`build_constellation`].
    pub fn new(r: ChromaticityPoint, g: ChromaticityPoint, b: ChromaticityPoint) -> Result<Self> {
        let x = centroid(&[r, g, b])?;
        let pts = [
            (Symbol::R, r),
            (Symbol::G, g),
            (Symbol::B, b),
            (Symbol::X, x),
        ];
        Ok(Constellation4 {
            r,
            g,
            b,
            x,
            d_min: pair_min(&pts),
        })
    }

    pub fn r(&self) -> ChromaticityPoint {
        self.r
    }
    pub fn g(&self) -> ChromaticityPoint {
        self.g
    }
    pub fn b(&self) -> ChromaticityPoint {
        self.b
    }
    pub fn x(&self) -> ChromaticityPoint {
        self.x
    }

    pub fn d_min(&self) -> f64 {
        self.d_min.value
    }

    pub fn point(&self, s: Symbol) -> ChromaticityPoint {
        match s {
            Symbol::R => self.r,
            Symbol::G => self.g,
            Symbol::B => self.b,
            Symbol::X => self.x,
        }
    }

    pub fn points(&self) -> [(Symbol, ChromaticityPoint); 4] {
        Symbol::ALL.map(|s| (s, self.point(s)))
    }
}

/// Builds a constellation with X = centroid(R, G, B); every point must be in
/// `gamut`.
pub fn build_constellation(
    r: ChromaticityPoint,
    g: ChromaticityPoint,
    b: ChromaticityPoint,
    gamut: &GamutPolygon,
) -> Result<Constellation4> {
    let c = Constellation4::new(r, g, b)?;
    for (label, p) in c.points() {
        if !gamut.contains(p) {
            return Err(Error::OutOfGamut {
                label: label.to_string(),
                point: p,
            });
        }
    }
    Ok(c)
}

/// Minimum pairwise distance and the pair attaining it.
pub fn min_distance(c: &Constellation4) -> MinDistance {
    pair_min(&c.points())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TargetReport {
    pub x_inside: bool,
    /// `radius - |X - center|`.
    pub x_margin: f64,
    pub x_center_distance: f64,
    pub in_gamut: [(Symbol, bool); 4],
    pub all_in_gamut: bool,
    pub d_min: f64,
    pub min_pair: (Symbol, Symbol),
}

/// Reports target-disk membership of X, gamut membership of every point and
/// d_min. Never fails on a violation.
pub fn validate_against_target(
    c: &Constellation4,
    t: &BlueTarget,
    gamut: &GamutPolygon,
) -> TargetReport {
    let dist = xy_distance(c.x, t.center);
    let margin = t.radius - dist;
    let in_gamut = c.points().map(|(s, p)| (s, gamut.contains(p)));
    let md = min_distance(c);
    TargetReport {
        x_inside: margin >= -DISK_TOLERANCE,
        x_margin: margin,
        x_center_distance: dist,
        all_in_gamut: in_gamut.iter().all(|(_, ok)| *ok),
        in_gamut,
        d_min: md.value,
        min_pair: md.pair,
    }
}

/// Bijection between 2-bit symbols and constellation points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymbolMap {
    by_bits: [Symbol; 4],
}

impl SymbolMap {
    pub fn symbol(&self, bits: u8) -> Symbol {
        self.by_bits[(bits & 0b11) as usize]
    }

    pub fn bits(&self, s: Symbol) -> u8 {
        self.by_bits
            .iter()
            .position(|t| *t == s)
            .expect("symbol map is bijective") as u8
    }

    pub fn point(&self, c: &Constellation4, bits: u8) -> ChromaticityPoint {
        c.point(self.symbol(bits))
    }
}

/// 00 → B, 01 → G, 10 → R, 11 → X.
pub fn default_symbol_map(_c: &Constellation4) -> SymbolMap {
    SymbolMap {
        by_bits: [Symbol::B, Symbol::G, Symbol::R, Symbol::X],
    }
}
