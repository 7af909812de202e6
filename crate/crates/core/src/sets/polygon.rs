//! Convex polygons in the plane, stored as counterclockwise vertex lists.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolygon")]
pub struct Polygon2D {
    vertices: Vec<Point>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolygon {
    vertices: Vec<Point>,
}

impl TryFrom<RawPolygon> for Polygon2D {
    type Error = Error;

    fn try_from(raw: RawPolygon) -> Result<Self> {
        Polygon2D::new(&raw.vertices)
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn xy(p: &Point) -> [f64; 2] {
    [p[0], p[1]]
}

fn pt(v: [f64; 2]) -> Point {
    Point::from_vec_unchecked(vec![v[0], v[1]])
}

/// Closest point to `x` on the segment `[a, b]`.
fn closest_on_segment(a: [f64; 2], b: [f64; 2], x: [f64; 2]) -> [f64; 2] {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len_sq = ab[0] * ab[0] + ab[1] * ab[1];
    if len_sq == 0.0 {
        return a;
    }
    let t = (((x[0] - a[0]) * ab[0] + (x[1] - a[1]) * ab[1]) / len_sq).clamp(0.0, 1.0);
    [a[0] + t * ab[0], a[1] + t * ab[1]]
}

impl Polygon2D {
    /// Convex hull of the given points, in counterclockwise order with duplicate and collinear
    /// points removed. Fewer than three hull vertices is an error.
    pub fn new(points: &[Point]) -> Result<Self> {
        for p in points {
            p.check_dim(2)?;
        }
        let mut pts: Vec<[f64; 2]> = points.iter().map(xy).collect();
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        pts.dedup();
        if pts.len() < 3 {
            return Err(Error::InvalidSet(
                "polygon needs at least three distinct vertices".into(),
            ));
        }
        // Andrew's monotone chain; `<= 0` drops collinear points.
        let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
        for (pass, chain) in [pts.clone(), pts.iter().rev().skip(1).copied().collect()]
            .into_iter()
            .enumerate()
        {
            // The upper chain must not pop vertices of the finished lower chain.
            let floor = if pass == 0 { 2 } else { hull.len() + 1 };
            for p in chain {
                while hull.len() >= floor
                    && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
                {
                    hull.pop();
                }
                hull.push(p);
            }
        }
        hull.pop();
        if hull.len() < 3 {
            return Err(Error::InvalidSet("polygon vertices are collinear".into()));
        }
        let poly = Polygon2D {
            vertices: hull.into_iter().map(pt).collect(),
        };
        debug_assert!(poly.is_ccw_convex());
        Ok(poly)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    fn edges(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (xy(&self.vertices[i]), xy(&self.vertices[(i + 1) % n])))
    }

    /// Every consecutive vertex triple turns left.
    pub fn is_ccw_convex(&self) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            cross(
                xy(&self.vertices[i]),
                xy(&self.vertices[(i + 1) % n]),
                xy(&self.vertices[(i + 2) % n]),
            ) > 0.0
        })
    }

    pub fn contains(&self, x: &Point) -> bool {
        let p = xy(x);
        self.edges().all(|(a, b)| cross(a, b, p) >= 0.0)
    }

    pub fn project(&self, x: &Point) -> Point {
        if self.contains(x) {
            return x.clone();
        }
        let p = xy(x);
        let mut best = xy(&self.vertices[0]);
        let mut best_d = f64::INFINITY;
        for (a, b) in self.edges() {
            let c = closest_on_segment(a, b, p);
            let d = (c[0] - p[0]).powi(2) + (c[1] - p[1]).powi(2);
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        pt(best)
    }

    pub fn support_value(&self, f: &Point) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dot(f))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// A point where `f` attains its maximum; the midpoint of the maximizing face when an edge is
    /// orthogonal to `f`.
    pub fn support_point(&self, f: &Point) -> Point {
        let sup = self.support_value(f);
        let tol = 1e-12 * (1.0 + sup.abs());
        let on_face: Vec<&Point> = self
            .vertices
            .iter()
            .filter(|v| v.dot(f) >= sup - tol)
            .collect();
        let k = on_face.len() as f64;
        let sx = on_face.iter().map(|v| v[0]).sum::<f64>() / k;
        let sy = on_face.iter().map(|v| v[1]).sum::<f64>() / k;
        pt([sx, sy])
    }

    /// Vertices of `{x ∈ P : ⟨f, x⟩ ≥ level}` (possibly empty or degenerate).
    pub fn clip_above(&self, f: &Point, level: f64) -> Vec<Point> {
        let n = self.vertices.len();
        let g = |v: [f64; 2]| v[0] * f[0] + v[1] * f[1] - level;
        let mut out = Vec::new();
        for i in 0..n {
            let a = xy(&self.vertices[i]);
            let b = xy(&self.vertices[(i + 1) % n]);
            let (ga, gb) = (g(a), g(b));
            if ga >= 0.0 {
                out.push(pt(a));
            }
            if (ga >= 0.0) != (gb >= 0.0) {
                let t = ga / (ga - gb);
                out.push(pt([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]));
            }
        }
        out
    }

    pub fn translated(&self, v: &Point) -> Result<Self> {
        v.check_dim(2)?;
        Ok(Polygon2D {
            vertices: self.vertices.iter().map(|p| p + v).collect(),
        })
    }

    /// Signed distances of the edges' supporting lines from the origin (positive when the origin
    /// lies inside).
    pub fn edge_offsets_from_origin(&self) -> Vec<f64> {
        self.edges()
            .map(|(a, b)| {
                let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
                cross(a, b, [0.0, 0.0]) / len
            })
            .collect()
    }
}
