//! The nine tabulated reference designs (three targets × three options),
//! with coordinates exactly as published.

use super::{
    build_constellation, BlueTarget, Constellation4, ConstellationDoc, PointsDoc, TargetDoc,
    PRIMARY_BLUE,
};
use crate::colorimetry::{ChromaticityPoint, GamutPolygon};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Table1Row {
    pub name: &'static str,
    pub target: u8,
    pub option: u8,
    pub r: ChromaticityPoint,
    pub g: ChromaticityPoint,
    /// X as tabulated; not necessarily the centroid of R, G, B.
    pub x: ChromaticityPoint,
    pub d_min: f64,
}

const fn row(
    name: &'static str,
    target: u8,
    option: u8,
    g: (f64, f64),
    r: (f64, f64),
    x: (f64, f64),
    d_min: f64,
) -> Table1Row {
    Table1Row {
        name,
        target,
        option,
        r: ChromaticityPoint::xy(r.0, r.1),
        g: ChromaticityPoint::xy(g.0, g.1),
        x: ChromaticityPoint::xy(x.0, x.1),
        d_min,
    }
}

const TABLE1: [Table1Row; 9] = [
    row(
        "table1-t1o1",
        1,
        1,
        (0.0594, 0.6751),
        (0.5000, 0.1600),
        (0.2316, 0.2917),
        0.2695,
    ),
    row(
        "table1-t1o2",
        1,
        2,
        (0.0448, 0.5945),
        (0.5800, 0.2000),
        (0.2058, 0.3018),
        0.2658,
    ),
    row(
        "table1-t1o3",
        1,
        3,
        (0.0268, 0.5256),
        (0.5423, 0.3031),
        (0.2348, 0.2895),
        0.2687,
    ),
    row(
        "table1-t2o1",
        2,
        1,
        (0.0330, 0.5081),
        (0.3152, 0.1055),
        (0.1613, 0.2179),
        0.1737,
    ),
    row(
        "table1-t2o2",
        2,
        2,
        (0.03185, 0.4744),
        (0.3822, 0.1063),
        (0.1832, 0.2069),
        0.1798,
    ),
    row(
        "table1-t2o3",
        2,
        3,
        (0.02871, 0.4428),
        (0.4099, 0.1233),
        (0.1914, 0.2020),
        0.1715,
    ),
    row(
        "table1-t3o1",
        3,
        1,
        (0.0821, 0.2023),
        (0.3340, 0.1178),
        (0.1839, 0.1200),
        0.0936,
    ),
    row(
        "table1-t3o2",
        3,
        2,
        (0.0550, 0.2643),
        (0.2924, 0.1093),
        (0.1610, 0.1379),
        0.1012,
    ),
    row(
        "table1-t3o3",
        3,
        3,
        (0.0701, 0.2643),
        (0.2717, 0.1101),
        (0.1591, 0.1381),
        0.1010,
    ),
];

pub fn table1() -> &'static [Table1Row] {
    &TABLE1
}

pub fn table1_row(name: &str) -> Option<&'static Table1Row> {
    TABLE1.iter().find(|r| r.name == name)
}

impl Table1Row {
    /// Constellation from the tabulated R, G and the fixed blue, with X
    /// recomputed as the centroid, checked against the spectral locus.
    pub fn constellation(&self) -> Result<Constellation4> {
        build_constellation(self.r, self.g, PRIMARY_BLUE, GamutPolygon::spectral_locus())
    }

    pub fn blue_target(&self) -> BlueTarget {
        BlueTarget::preset(self.target).expect("fixture targets are presets")
    }

    /// JSON document carrying the tabulated values verbatim.
    pub fn document(&self) -> ConstellationDoc {
        let t = self.blue_target();
        ConstellationDoc {
            target: TargetDoc {
                center: t.center.to_array(),
                radius: t.radius,
            },
            points: PointsDoc {
                r: self.r.to_array(),
                g: self.g.to_array(),
                b: PRIMARY_BLUE.to_array(),
                x: self.x.to_array(),
            },
            d_min: self.d_min,
            provenance: format!("{} (tabulated reference design)", self.name),
        }
    }
}
