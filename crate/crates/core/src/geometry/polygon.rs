//! Planar convex polygons: hulls, half-plane membership, clipping, and
//! intersection with disks.

use std::f64::consts::PI;

use super::MEMBERSHIP_TOL;

pub type P2 = [f64; 2];

#[inline]
fn cross(o: P2, a: P2, b: P2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

#[inline]
fn sub(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
fn dot(a: P2, b: P2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
fn norm(a: P2) -> f64 {
    a[0].hypot(a[1])
}

/// Shoelace area of a simple polygon given in order (signed, CCW positive).
pub fn signed_area(pts: &[P2]) -> f64 {
    let n = pts.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s
}

/// Convex hull by Andrew's monotone chain; collinear and duplicate points are
/// dropped. Output is counter-clockwise starting at the lexicographically
/// smallest point. Fewer than three points come back for degenerate input.
pub fn convex_hull(points: &[P2]) -> Vec<P2> {
    let mut pts: Vec<P2> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<P2> = Vec::with_capacity(pts.len() * 2);
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    if hull.len() < 3 {
        // All points collinear: keep the two extremes.
        return vec![pts[0], pts[pts.len() - 1]];
    }
    hull
}

/// Closed edge half-plane `n . x <= c` with unit normal.
#[derive(Clone, Copy, Debug)]
struct Edge {
    nx: f64,
    ny: f64,
    c: f64,
}

/// A convex polygon in counter-clockwise order, possibly degenerate (a
/// segment or a single point), prepared for repeated membership tests.
#[derive(Clone, Debug)]
pub struct ConvexPolygon {
    verts: Vec<P2>,
    edges: Vec<Edge>,
    bbox: [f64; 4],
}

impl ConvexPolygon {
    pub fn hull(points: &[P2]) -> Self {
        let verts = convex_hull(points);
        let mut edges = Vec::new();
        if verts.len() >= 3 {
            for i in 0..verts.len() {
                let a = verts[i];
                let b = verts[(i + 1) % verts.len()];
                let d = sub(b, a);
                let len = norm(d);
                // outward normal of a CCW edge
                let (nx, ny) = (d[1] / len, -d[0] / len);
                edges.push(Edge {
                    nx,
                    ny,
                    c: nx * a[0] + ny * a[1],
                });
            }
        }
        let mut bbox = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for v in &verts {
            bbox[0] = bbox[0].min(v[0]);
            bbox[1] = bbox[1].min(v[1]);
            bbox[2] = bbox[2].max(v[0]);
            bbox[3] = bbox[3].max(v[1]);
        }
        ConvexPolygon { verts, edges, bbox }
    }

    pub fn vertices(&self) -> &[P2] {
        &self.verts
    }

    pub fn is_degenerate(&self) -> bool {
        self.verts.len() < 3
    }

    /// `[xmin, ymin, xmax, ymax]`
    pub fn bbox(&self) -> [f64; 4] {
        self.bbox
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.verts).abs()
    }

    /// Boundary length traversed as a closed loop. A segment counts twice,
    /// which is the length term in its planar Steiner polynomial.
    pub fn perimeter(&self) -> f64 {
        let n = self.verts.len();
        match n {
            0 | 1 => 0.0,
            2 => 2.0 * norm(sub(self.verts[1], self.verts[0])),
            _ => (0..n).map(|i| norm(sub(self.verts[(i + 1) % n], self.verts[i]))).sum(),
        }
    }

    #[inline]
    pub fn contains(&self, x: f64, y: f64) -> bool {
        if self.edges.is_empty() {
            return self.distance([x, y]) <= MEMBERSHIP_TOL;
        }
        self.edges.iter().all(|e| e.nx * x + e.ny * y <= e.c + MEMBERSHIP_TOL)
    }

    /// Euclidean distance from `p` to the polygon (0 inside).
    pub fn distance(&self, p: P2) -> f64 {
        match self.verts.len() {
            0 => f64::INFINITY,
            1 => norm(sub(p, self.verts[0])),
            2 => segment_distance(p, self.verts[0], self.verts[1]),
            n => {
                if self.edges.iter().all(|e| e.nx * p[0] + e.ny * p[1] <= e.c) {
                    return 0.0;
                }
                (0..n)
                    .map(|i| segment_distance(p, self.verts[i], self.verts[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Intersection with another convex polygon (Sutherland-Hodgman). Empty
    /// when either operand is degenerate.
    pub fn clip(&self, other: &ConvexPolygon) -> Vec<P2> {
        if self.is_degenerate() || other.is_degenerate() {
            return Vec::new();
        }
        let mut out: Vec<P2> = self.verts.clone();
        let m = other.verts.len();
        for i in 0..m {
            if out.is_empty() {
                break;
            }
            let a = other.verts[i];
            let b = other.verts[(i + 1) % m];
            let input = std::mem::take(&mut out);
            let k = input.len();
            for j in 0..k {
                let p = input[j];
                let q = input[(j + 1) % k];
                let sp = cross(a, b, p);
                let sq = cross(a, b, q);
                if sp >= 0.0 {
                    out.push(p);
                    if sq < 0.0 {
                        out.push(intersect(p, q, sp, sq));
                    }
                } else if sq >= 0.0 {
                    out.push(intersect(p, q, sp, sq));
                }
            }
        }
        out
    }

    pub fn intersection_area(&self, other: &ConvexPolygon) -> f64 {
        signed_area(&self.clip(other)).abs()
    }

    /// Exact area of the intersection with the closed disk `B(center, radius)`.
    pub fn disk_intersection_area(&self, center: P2, radius: f64) -> f64 {
        if self.is_degenerate() || radius <= 0.0 {
            return 0.0;
        }
        let n = self.verts.len();
        let mut s = 0.0;
        for i in 0..n {
            let a = sub(self.verts[i], center);
            let b = sub(self.verts[(i + 1) % n], center);
            s += triangle_disk_signed_area(a, b, radius);
        }
        s.abs()
    }
}

fn intersect(p: P2, q: P2, sp: f64, sq: f64) -> P2 {
    let t = sp / (sp - sq);
    [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
}

fn segment_distance(p: P2, a: P2, b: P2) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    if len2 == 0.0 {
        return norm(sub(p, a));
    }
    let t = (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0);
    norm(sub(p, [a[0] + t * ab[0], a[1] + t * ab[1]]))
}

/// Signed area of `triangle(0, a, b) ∩ B(0, r)`.
fn triangle_disk_signed_area(a: P2, b: P2, r: f64) -> f64 {
    let d = sub(b, a);
    let qa = dot(d, d);
    if qa == 0.0 {
        return 0.0;
    }
    let qb = 2.0 * dot(a, d);
    let qc = dot(a, a) - r * r;
    let mut ts = vec![0.0];
    let disc = qb * qb - 4.0 * qa * qc;
    if disc > 0.0 {
        let sq = disc.sqrt();
        for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
            if t > 0.0 && t < 1.0 {
                ts.push(t);
            }
        }
    }
    ts.push(1.0);
    let at = |t: f64| [a[0] + t * d[0], a[1] + t * d[1]];
    let mut s = 0.0;
    for w in ts.windows(2) {
        let p = at(w[0]);
        let q = at(w[1]);
        let mid = at(0.5 * (w[0] + w[1]));
        let cr = p[0] * q[1] - p[1] * q[0];
        if dot(mid, mid) < r * r {
            s += 0.5 * cr;
        } else {
            s += 0.5 * r * r * cr.atan2(dot(p, q));
        }
    }
    s
}

/// Area of the circular segment cut from a disk of radius `radius` by a
/// chord subtending `theta`.
pub fn segment_area(radius: f64, theta: f64) -> f64 {
    0.5 * radius * radius * (theta - theta.sin())
}

/// Area of a regular `k`-gon inscribed in a circle of radius `radius`.
pub fn regular_polygon_area(k: usize, radius: f64) -> f64 {
    0.5 * k as f64 * radius * radius * (2.0 * PI / k as f64).sin()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> ConvexPolygon {
        ConvexPolygon::hull(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]])
    }

    #[test]
    fn hull_drops_interior_and_collinear_points() {
        let h = convex_hull(&[[0.0, 0.0], [0.5, 0.0], [1.0, 0.0], [1.0, 1.0], [0.2, 0.1]]);
        assert_eq!(h, vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]);
        let seg = convex_hull(&[[0.0, 0.0], [0.5, 0.5], [1.0, 1.0]]);
        assert_eq!(seg, vec![[0.0, 0.0], [1.0, 1.0]]);
        assert_eq!(convex_hull(&[[0.3, 0.3], [0.3, 0.3]]), vec![[0.3, 0.3]]);
    }

    #[test]
    fn square_membership_area_perimeter() {
        let s = square();
        assert!(s.contains(0.5, 0.5));
        assert!(s.contains(1.0, 1.0));
        assert!(!s.contains(1.5, 0.5));
        assert_eq!(s.area(), 1.0);
        assert_eq!(s.perimeter(), 4.0);
    }

    #[test]
    fn degenerate_polygons_have_zero_area_and_closed_membership() {
        let seg = ConvexPolygon::hull(&[[0.0, 0.0], [1.0, 1.0]]);
        assert_eq!(seg.area(), 0.0);
        assert!(seg.contains(0.5, 0.5));
        assert!(!seg.contains(0.5, 0.6));
        assert!((seg.perimeter() - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        let pt = ConvexPolygon::hull(&[[0.2, 0.2]]);
        assert!(pt.contains(0.2, 0.2));
        assert_eq!(pt.intersection_area(&square()), 0.0);
    }

    #[test]
    fn clipping_half_square() {
        let left = ConvexPolygon::hull(&[[0.0, 0.0], [0.5, 0.0], [0.5, 1.0], [0.0, 1.0]]);
        assert!((square().intersection_area(&left) - 0.5).abs() < 1e-15);
        let far = ConvexPolygon::hull(&[[2.0, 2.0], [3.0, 2.0], [2.0, 3.0]]);
        assert_eq!(square().intersection_area(&far), 0.0);
        // touching along an edge: measure-zero intersection
        let right = ConvexPolygon::hull(&[[1.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0]]);
        assert!(square().intersection_area(&right).abs() < 1e-15);
    }

    #[test]
    fn disk_intersection_matches_closed_forms() {
        let c = [0.5, 0.5];
        // square containing the disk
        let v = square().disk_intersection_area(c, 0.5);
        assert!((v - PI / 4.0).abs() < 1e-14, "{v}");
        // disk containing a small square
        let small = ConvexPolygon::hull(&[[0.4, 0.4], [0.6, 0.4], [0.6, 0.6], [0.4, 0.6]]);
        assert!((small.disk_intersection_area(c, 0.5) - 0.04).abs() < 1e-15);
        // half-plane x <= 0.5 cuts the disk in half
        assert!(
            (ConvexPolygon::hull(&[[0.0, 0.0], [0.5, 0.0], [0.5, 1.0], [0.0, 1.0]]).disk_intersection_area(c, 0.5)
                - PI / 8.0)
                .abs()
                < 1e-14
        );
        // a chord at height h cuts off a circular segment
        let h = 0.1;
        let theta = 2.0 * ((0.5 - h) / 0.5f64).acos();
        let strip = ConvexPolygon::hull(&[[0.0, 0.0], [1.0, 0.0], [1.0, h], [0.0, h]]);
        assert!((strip.disk_intersection_area(c, 0.5) - segment_area(0.5, theta)).abs() < 1e-14);
    }

    #[test]
    fn distance_to_polygon() {
        let s = square();
        assert_eq!(s.distance([0.5, 0.5]), 0.0);
        assert!((s.distance([2.0, 0.5]) - 1.0).abs() < 1e-15);
        assert!((s.distance([2.0, 2.0]) - 2f64.sqrt()).abs() < 1e-15);
    }
}
