use std::path::Path;
use std::sync::OnceLock;

use super::{data, ChromaticityPoint};
use crate::{Error, Result};

/// Points within this distance of the boundary count as inside.
const BOUNDARY_EPS: f64 = 1e-12;

/// A simple closed polygon on the chromaticity plane, stored counter-clockwise.
#[derive(Clone, Debug, PartialEq)]
pub struct GamutPolygon {
    vertices: Vec<ChromaticityPoint>,
}

impl GamutPolygon {
    pub fn new(mut vertices: Vec<ChromaticityPoint>) -> Result<Self> {
        if vertices.len() >= 2 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "need at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices
            .iter()
            .any(|v| !v.x.is_finite() || !v.y.is_finite())
        {
            return Err(Error::InvalidPolygon("non-finite vertex".into()));
        }
        let n = vertices.len();
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(Error::InvalidPolygon(format!(
                    "zero-length edge at vertex {i}"
                )));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                // Adjacent edges share a vertex and are allowed to touch there.
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                let (c, d) = (vertices[j], vertices[(j + 1) % n]);
                if segments_intersect(a, b, c, d) {
                    return Err(Error::InvalidPolygon(format!(
                        "edges {i} and {j} intersect; polygon is not simple"
                    )));
                }
            }
        }
        let area = signed_area(&vertices);
        if area.abs() < 1e-15 {
            return Err(Error::InvalidPolygon("polygon has zero area".into()));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        Ok(GamutPolygon { vertices })
    }

    pub fn triangle(
        a: ChromaticityPoint,
        b: ChromaticityPoint,
        c: ChromaticityPoint,
    ) -> Result<Self> {
        GamutPolygon::new(vec![a, b, c])
    }

    /// The bundled CIE 1931 2° spectral locus (380–700 nm at 5 nm) closed by
    /// the purple line.
    pub fn spectral_locus() -> &'static GamutPolygon {
        static LOCUS: OnceLock<GamutPolygon> = OnceLock::new();
        LOCUS.get_or_init(|| {
            let pts = data::spectral_locus_samples()
                .iter()
                .filter(|s| (380.0..=700.0).contains(&s.wavelength_nm))
                .map(|s| s.point)
                .collect();
            GamutPolygon::new(pts).expect("bundled spectral locus is a simple polygon")
        })
    }

    /// Spectral-locus polygon from a user CSV (`wavelength_nm,x,y`), closed by
    /// the line joining its end points.
    pub fn from_locus_csv(path: impl AsRef<Path>) -> Result<Self> {
        let samples = data::load_locus_csv(path)?;
        GamutPolygon::new(samples.into_iter().map(|s| s.point).collect())
    }

    pub fn vertices(&self) -> &[ChromaticityPoint] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    /// (min_x, min_y, max_x, max_y).
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        self.vertices.iter().fold(
            (
                f64::INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::NEG_INFINITY,
            ),
            |(a, b, c, d), v| (a.min(v.x), b.min(v.y), c.max(v.x), d.max(v.y)),
        )
    }

    fn edges(&self) -> impl Iterator<Item = (ChromaticityPoint, ChromaticityPoint)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Crossing-number test; the boundary counts as inside.
    pub fn contains(&self, p: ChromaticityPoint) -> bool {
        if self.boundary_distance(p).0 <= BOUNDARY_EPS {
            return true;
        }
        self.strictly_inside(p)
    }

    fn strictly_inside(&self, p: ChromaticityPoint) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Distance to the boundary and the closest boundary point.
    fn boundary_distance(&self, p: ChromaticityPoint) -> (f64, ChromaticityPoint) {
        self.edges()
            .map(|(a, b)| {
                let q = closest_on_segment(p, a, b);
                (super::xy_distance(p, q), q)
            })
            .fold(
                (f64::INFINITY, p),
                |best, cur| if cur.0 < best.0 { cur } else { best },
            )
    }

    pub fn nearest_boundary_point(&self, p: ChromaticityPoint) -> ChromaticityPoint {
        self.boundary_distance(p).1
    }

    /// Distance to the boundary, positive inside and negative outside.
    pub fn signed_distance(&self, p: ChromaticityPoint) -> f64 {
        self.signed_distance_with_gradient(p).0
    }

    /// Signed distance together with its gradient with respect to `p`.
    pub fn signed_distance_with_gradient(&self, p: ChromaticityPoint) -> (f64, [f64; 2]) {
        let (d, q) = self.boundary_distance(p);
        let inside = self.strictly_inside(p);
        if d == 0.0 {
            return (0.0, [0.0, 0.0]);
        }
        let g = [(p.x - q.x) / d, (p.y - q.y) / d];
        if inside {
            (d, g)
        } else {
            (-d, [-g[0], -g[1]])
        }
    }
}

fn signed_area(v: &[ChromaticityPoint]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            a.x * b.y - b.x * a.y
        })
        .sum::<f64>()
}

fn closest_on_segment(
    p: ChromaticityPoint,
    a: ChromaticityPoint,
    b: ChromaticityPoint,
) -> ChromaticityPoint {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0)
    };
    ChromaticityPoint::xy(a.x + t * dx, a.y + t * dy)
}

fn orient(a: ChromaticityPoint, b: ChromaticityPoint, c: ChromaticityPoint) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: ChromaticityPoint, b: ChromaticityPoint, p: ChromaticityPoint) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segments_intersect(
    a: ChromaticityPoint,
    b: ChromaticityPoint,
    c: ChromaticityPoint,
    d: ChromaticityPoint,
) -> bool {
    let (o1, o2, o3, o4) = (
        orient(a, b, c),
        orient(a, b, d),
        orient(c, d, a),
        orient(c, d, b),
    );
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0))
        && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0))
    {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> ChromaticityPoint {
        ChromaticityPoint::xy(x, y)
    }

    fn unit_square() -> GamutPolygon {
        GamutPolygon::new(vec![p(0.0, 0.0), p(0.0, 1.0), p(1.0, 1.0), p(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn rejects_bad_polygons() {
        assert!(GamutPolygon::new(vec![p(0.1, 0.1), p(0.2, 0.2)]).is_err());
        // bow tie
        assert!(
            GamutPolygon::new(vec![p(0.0, 0.0), p(1.0, 1.0), p(1.0, 0.0), p(0.0, 1.0)]).is_err()
        );
        assert!(GamutPolygon::new(vec![p(0.0, 0.0), p(0.5, 0.5), p(1.0, 1.0)]).is_err());
    }

    #[test]
    fn orientation_is_normalised() {
        let sq = unit_square();
        assert!(sq.area() > 0.0);
        assert!((sq.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn closing_vertex_is_dropped() {
        let g =
            GamutPolygon::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(0.0, 0.0)]).unwrap();
        assert_eq!(g.vertices().len(), 3);
    }

    #[test]
    fn containment_and_boundary() {
        let sq = unit_square();
        assert!(sq.contains(p(0.5, 0.5)));
        assert!(sq.contains(p(0.0, 0.5)));
        assert!(sq.contains(p(1.0, 1.0)));
        assert!(!sq.contains(p(1.0 + 1e-9, 0.5)));
    }

    #[test]
    fn signed_distance_sign_and_gradient() {
        let sq = unit_square();
        let (d, g) = sq.signed_distance_with_gradient(p(0.25, 0.5));
        assert!((d - 0.25).abs() < 1e-15);
        assert!((g[0] - 1.0).abs() < 1e-15 && g[1].abs() < 1e-15);
        let (d, g) = sq.signed_distance_with_gradient(p(1.5, 0.5));
        assert!((d + 0.5).abs() < 1e-15);
        assert!((g[0] + 1.0).abs() < 1e-15);
        // finite-difference check outside a corner
        let q = p(1.2, 1.3);
        let (_, g) = sq.signed_distance_with_gradient(q);
        let h = 1e-7;
        let fx =
            (sq.signed_distance(p(q.x + h, q.y)) - sq.signed_distance(p(q.x - h, q.y))) / (2.0 * h);
        let fy =
            (sq.signed_distance(p(q.x, q.y + h)) - sq.signed_distance(p(q.x, q.y - h))) / (2.0 * h);
        assert!((fx - g[0]).abs() < 1e-6 && (fy - g[1]).abs() < 1e-6);
    }

    #[test]
    fn spectral_locus_is_simple_and_sane() {
        let locus = GamutPolygon::spectral_locus();
        assert_eq!(locus.vertices().len(), 65);
        // Roughly the area of the CIE 1931 horseshoe.
        assert!(
            locus.area() > 0.3 && locus.area() < 0.35,
            "{}",
            locus.area()
        );
        assert!(locus.contains(p(1.0 / 3.0, 1.0 / 3.0)));
        assert!(!locus.contains(p(0.05, 0.05)));
        assert!(!locus.contains(p(0.9, 0.9)));
        let (x0, y0, x1, y1) = locus.bounding_box();
        assert!(x0 < 0.01 && y0 < 0.005 && x1 > 0.73 && y1 > 0.83);
    }
}
