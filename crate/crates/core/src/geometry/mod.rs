//! Geometry kernel: points, polytopes, convex bodies, measures and the
//! constructions used by the estimators and the lower-bound families.

pub mod cap;
pub mod hull_lp;
pub mod montecarlo;
pub mod packing;
pub mod polygon;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::unit_ball_volume;
pub use cap::cap_volume;
pub use montecarlo::McBudget;
pub use packing::sphere_packing;
use polygon::ConvexPolygon;

/// Boundary points are inside; half-plane and feasibility tests use this slack.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn check(&self, dim: usize) -> Result<()> {
        if self.coords.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.coords.len(),
            });
        }
        if !self.coords.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite("point"));
        }
        Ok(())
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point::new(v)
    }
}

/// Convex hull of a non-empty vertex list inside `[0,1]^d`. Redundant and
/// repeated vertices are allowed; zero-volume hulls are legal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolytope")]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Point>,
}

#[derive(Deserialize)]
struct RawPolytope {
    dim: usize,
    vertices: Vec<Point>,
}

impl TryFrom<RawPolytope> for Polytope {
    type Error = Error;
    fn try_from(raw: RawPolytope) -> Result<Self> {
        Polytope::new(raw.dim, raw.vertices)
    }
}

impl Polytope {
    pub fn new(dim: usize, vertices: Vec<Point>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::invalid(format!("polytope dimension {dim} < 2")));
        }
        if vertices.is_empty() {
            return Err(Error::invalid("polytope needs at least one vertex"));
        }
        for v in &vertices {
            v.check(dim)?;
            if v.coords
                .iter()
                .any(|&c| !(-MEMBERSHIP_TOL..=1.0 + MEMBERSHIP_TOL).contains(&c))
            {
                return Err(Error::invalid(format!(
                    "vertex {:?} lies outside [0,1]^{dim}",
                    v.coords
                )));
            }
        }
        Ok(Polytope { dim, vertices })
    }

    /// Convenience constructor from planar coordinate pairs.
    pub fn planar(vertices: &[[f64; 2]]) -> Result<Self> {
        Polytope::new(2, vertices.iter().map(|v| Point::new(v.to_vec())).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn prepare(&self) -> PreparedPolytope {
        if self.dim == 2 {
            let pts: Vec<[f64; 2]> = self.vertices.iter().map(|v| [v.coords[0], v.coords[1]]).collect();
            PreparedPolytope::Planar(ConvexPolygon::hull(&pts))
        } else {
            PreparedPolytope::Hull(self.vertices.iter().map(|v| v.coords.clone()).collect())
        }
    }

    pub fn contains(&self, x: &Point) -> Result<bool> {
        x.check(self.dim)?;
        Ok(self.prepare().contains(&x.coords))
    }

    /// Planar hull; only meaningful for `dim == 2`.
    pub fn polygon(&self) -> Option<ConvexPolygon> {
        match self.prepare() {
            PreparedPolytope::Planar(p) => Some(p),
            PreparedPolytope::Hull(_) => None,
        }
    }

    fn bbox(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for v in &self.vertices {
            for i in 0..self.dim {
                lo[i] = lo[i].min(v.coords[i]);
                hi[i] = hi[i].max(v.coords[i]);
            }
        }
        (lo, hi)
    }
}

/// Membership-ready form of a polytope.
#[derive(Clone, Debug)]
pub enum PreparedPolytope {
    Planar(ConvexPolygon),
    Hull(Vec<Vec<f64>>),
}

impl PreparedPolytope {
    #[inline]
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            PreparedPolytope::Planar(p) => p.contains(x[0], x[1]),
            PreparedPolytope::Hull(v) => {
                let refs: Vec<&[f64]> = v.iter().map(|v| v.as_slice()).collect();
                hull_lp::in_hull(&refs, x)
            }
        }
    }
}

/// Polytope whose vertex coordinates are integer multiples of `1/resolution`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPolytope {
    base: Polytope,
    resolution: usize,
}

impl GridPolytope {
    pub fn new(base: Polytope, resolution: usize) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::invalid("grid resolution must be >= 1"));
        }
        let m = resolution as f64;
        for v in &base.vertices {
            for &c in &v.coords {
                if (c * m - (c * m).round()).abs() > 1e-9 {
                    return Err(Error::invalid(format!(
                        "coordinate {c} is not a multiple of 1/{resolution}"
                    )));
                }
            }
        }
        Ok(GridPolytope { base, resolution })
    }

    /// Builds from integer grid indices, each in `0..=resolution`.
    pub fn from_indices(dim: usize, resolution: usize, indices: &[Vec<u32>]) -> Result<Self> {
        let m = resolution as f64;
        let vertices = indices
            .iter()
            .map(|ix| Point::new(ix.iter().map(|&k| k as f64 / m).collect()))
            .collect();
        GridPolytope::new(Polytope::new(dim, vertices)?, resolution)
    }

    pub fn base(&self) -> &Polytope {
        &self.base
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn indices(&self) -> Vec<Vec<u32>> {
        let m = self.resolution as f64;
        self.base
            .vertices
            .iter()
            .map(|v| v.coords.iter().map(|&c| (c * m).round() as u32).collect())
            .collect()
    }
}

/// Spherical cap removed from a ball: points `x` with
/// `(x - center) . direction >= radius - height` are cut away.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cap {
    pub direction: Vec<f64>,
    pub height: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ConvexBody {
    Ball {
        center: Point,
        radius: f64,
    },
    Poly(Polytope),
    /// Ball with cap `j` removed whenever `omega[j]` is false.
    CapCarvedBall {
        center: Point,
        radius: f64,
        caps: Vec<Cap>,
        omega: Vec<bool>,
    },
}

impl From<Polytope> for ConvexBody {
    fn from(p: Polytope) -> Self {
        ConvexBody::Poly(p)
    }
}

impl ConvexBody {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        let b = ConvexBody::Ball {
            center: Point::new(center),
            radius,
        };
        b.validate()?;
        Ok(b)
    }

    /// The ball of radius 1/2 centred in the unit cube.
    pub fn inscribed_ball(d: usize) -> Self {
        ConvexBody::Ball {
            center: Point::new(vec![0.5; d]),
            radius: 0.5,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Ball { center, .. } | ConvexBody::CapCarvedBall { center, .. } => center.dim(),
            ConvexBody::Poly(p) => p.dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ConvexBody::Ball { center, radius } => {
                center.check(center.dim())?;
                if !(radius.is_finite() && *radius >= 0.0) {
                    return Err(Error::invalid(format!("ball radius {radius}")));
                }
                if center.dim() < 2 {
                    return Err(Error::invalid("ball dimension < 2"));
                }
                Ok(())
            }
            ConvexBody::Poly(_) => Ok(()),
            ConvexBody::CapCarvedBall {
                center,
                radius,
                caps,
                omega,
            } => {
                center.check(center.dim())?;
                if caps.len() != omega.len() {
                    return Err(Error::invalid(format!(
                        "{} caps but omega has {} bits",
                        caps.len(),
                        omega.len()
                    )));
                }
                for c in caps {
                    if c.direction.len() != center.dim() {
                        return Err(Error::DimensionMismatch {
                            expected: center.dim(),
                            found: c.direction.len(),
                        });
                    }
                    if !(c.height >= 0.0 && c.height <= 2.0 * radius) {
                        return Err(Error::invalid(format!("cap height {}", c.height)));
                    }
                }
                Ok(())
            }
        }
    }

    /// Whether the body lies in the closed unit cube.
    pub fn inside_unit_cube(&self) -> bool {
        let (lo, hi) = self.bbox();
        lo.iter().all(|&v| v >= -MEMBERSHIP_TOL) && hi.iter().all(|&v| v <= 1.0 + MEMBERSHIP_TOL)
    }

    pub fn prepare(&self) -> PreparedBody {
        match self {
            ConvexBody::Ball { center, radius } => PreparedBody::Ball {
                center: center.coords.clone(),
                r2: radius * radius,
            },
            ConvexBody::Poly(p) => PreparedBody::Poly(p.prepare()),
            ConvexBody::CapCarvedBall {
                center,
                radius,
                caps,
                omega,
            } => PreparedBody::Carved {
                center: center.coords.clone(),
                r2: radius * radius,
                cuts: caps
                    .iter()
                    .zip(omega)
                    .filter(|(_, &keep)| !keep)
                    .map(|(c, _)| (c.direction.clone(), radius - c.height))
                    .collect(),
            },
        }
    }

    pub fn contains(&self, x: &Point) -> Result<bool> {
        x.check(self.dim())?;
        Ok(self.prepare().contains(&x.coords))
    }

    fn bbox(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            ConvexBody::Ball { center, radius } | ConvexBody::CapCarvedBall { center, radius, .. } => (
                center.coords.iter().map(|c| c - radius).collect(),
                center.coords.iter().map(|c| c + radius).collect(),
            ),
            ConvexBody::Poly(p) => p.bbox(),
        }
    }

    /// Closed-form volume when one is available without sampling.
    pub fn reference_volume(&self) -> Option<f64> {
        match self {
            ConvexBody::Ball { center, radius } => {
                Some(unit_ball_volume(center.dim()) * radius.powi(center.dim() as i32))
            }
            ConvexBody::Poly(p) => p.polygon().map(|g| g.area()),
            ConvexBody::CapCarvedBall {
                center,
                radius,
                caps,
                omega,
            } => {
                // caps of a packing are pairwise disjoint
                let d = center.dim();
                let mut v = unit_ball_volume(d) * radius.powi(d as i32);
                for (c, &keep) in caps.iter().zip(omega) {
                    if !keep {
                        v -= cap_volume(d, *radius, c.height).ok()?;
                    }
                }
                Some(v)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub enum PreparedBody {
    Ball {
        center: Vec<f64>,
        r2: f64,
    },
    Poly(PreparedPolytope),
    Carved {
        center: Vec<f64>,
        r2: f64,
        cuts: Vec<(Vec<f64>, f64)>,
    },
}

impl PreparedBody {
    #[inline]
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            PreparedBody::Ball { center, r2 } => {
                let s: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                s <= r2 + MEMBERSHIP_TOL
            }
            PreparedBody::Poly(p) => p.contains(x),
            PreparedBody::Carved { center, r2, cuts } => {
                let s: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                if s > r2 + MEMBERSHIP_TOL {
                    return false;
                }
                cuts.iter().all(|(u, offset)| {
                    let proj: f64 = x.iter().zip(center).zip(u).map(|((a, c), w)| (a - c) * w).sum();
                    proj <= offset + MEMBERSHIP_TOL
                })
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureMethod {
    /// Exact planar computation (shoelace, clipping, disk intersection).
    Exact2d,
    /// Closed-form volume formula.
    ClosedForm,
    Mc,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub value: f64,
    /// 95% interval half-width; zero for exact results.
    pub half_width: f64,
    pub method: MeasureMethod,
    /// Monte Carlo sample count (0 for exact results).
    pub samples: u64,
}

impl MeasureEstimate {
    pub fn exact(value: f64, method: MeasureMethod) -> Self {
        MeasureEstimate {
            value,
            half_width: 0.0,
            method,
            samples: 0,
        }
    }

    pub fn brackets(&self, truth: f64) -> bool {
        (self.value - truth).abs() <= self.half_width
    }
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

pub fn contains(body: &ConvexBody, x: &Point) -> Result<bool> {
    body.contains(x)
}

/// Planar polytopes get the exact shoelace area, balls their closed form,
/// everything else a Monte Carlo estimate over its bounding box.
pub fn volume(body: &ConvexBody, budget: McBudget) -> Result<MeasureEstimate> {
    body.validate()?;
    match body {
        ConvexBody::Poly(p) if p.dim == 2 => Ok(MeasureEstimate::exact(
            p.polygon().expect("planar").area(),
            MeasureMethod::Exact2d,
        )),
        ConvexBody::Ball { .. } => Ok(MeasureEstimate::exact(
            body.reference_volume().expect("ball"),
            MeasureMethod::ClosedForm,
        )),
        _ => volume_mc(body, budget),
    }
}

pub fn volume_mc(body: &ConvexBody, budget: McBudget) -> Result<MeasureEstimate> {
    body.validate()?;
    let (lo, hi) = body.bbox();
    let prepared = body.prepare();
    Ok(montecarlo::measure_in_box(&lo, &hi, budget, |x| prepared.contains(x)))
}

/// Measure of the symmetric difference. Exact for two planar polytopes and
/// for a planar polytope against a disk; Monte Carlo otherwise.
pub fn nikodym_distance(a: &ConvexBody, b: &ConvexBody, budget: McBudget) -> Result<MeasureEstimate> {
    same_dim(a.dim(), b.dim())?;
    a.validate()?;
    b.validate()?;
    if a.dim() == 2 {
        match (a, b) {
            (ConvexBody::Poly(p), ConvexBody::Poly(q)) => {
                let (p, q) = (p.polygon().expect("planar"), q.polygon().expect("planar"));
                let v = p.area() + q.area() - 2.0 * p.intersection_area(&q);
                return Ok(MeasureEstimate::exact(v.max(0.0), MeasureMethod::Exact2d));
            }
            (ConvexBody::Poly(p), ConvexBody::Ball { center, radius })
            | (ConvexBody::Ball { center, radius }, ConvexBody::Poly(p)) => {
                let poly = p.polygon().expect("planar");
                let c = [center.coords[0], center.coords[1]];
                let disk = std::f64::consts::PI * radius * radius;
                let v = poly.area() + disk - 2.0 * poly.disk_intersection_area(c, *radius);
                return Ok(MeasureEstimate::exact(v.max(0.0), MeasureMethod::Exact2d));
            }
            _ => {}
        }
    }
    nikodym_distance_mc(a, b, budget)
}

pub fn nikodym_distance_mc(a: &ConvexBody, b: &ConvexBody, budget: McBudget) -> Result<MeasureEstimate> {
    same_dim(a.dim(), b.dim())?;
    a.validate()?;
    b.validate()?;
    let (alo, ahi) = a.bbox();
    let (blo, bhi) = b.bbox();
    let lo: Vec<f64> = alo.iter().zip(&blo).map(|(x, y)| x.min(*y)).collect();
    let hi: Vec<f64> = ahi.iter().zip(&bhi).map(|(x, y)| x.max(*y)).collect();
    let (pa, pb) = (a.prepare(), b.prepare());
    Ok(montecarlo::measure_in_box(&lo, &hi, budget, |x| {
        pa.contains(x) != pb.contains(x)
    }))
}

/// Nearest grid index for coordinate `c` at resolution `m`; exact halves go
/// to the smaller index.
fn nearest_index(c: f64, m: usize) -> u32 {
    let k = (c * m as f64 - 0.5).ceil();
    k.clamp(0.0, m as f64) as u32
}

/// Replaces every vertex by its nearest point of the `1/m` grid.
pub fn snap_to_grid(p: &Polytope, m: usize) -> Result<GridPolytope> {
    if m == 0 {
        return Err(Error::invalid("grid resolution must be >= 1"));
    }
    let indices: Vec<Vec<u32>> = p
        .vertices
        .iter()
        .map(|v| v.coords.iter().map(|&c| nearest_index(c, m)).collect())
        .collect();
    GridPolytope::from_indices(p.dim, m, &indices)
}

/// Area of the `lambda`-neighbourhood of a planar polytope:
/// `area + perimeter * lambda + π lambda^2`.
pub fn dilation_area_2d(p: &Polytope, lambda: f64) -> Result<f64> {
    if p.dim != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: p.dim,
        });
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::invalid(format!("dilation radius {lambda} must be >= 0")));
    }
    let g = p.polygon().expect("planar");
    Ok(g.area() + g.perimeter() * lambda + std::f64::consts::PI * lambda * lambda)
}

/// Monte Carlo area of the `lambda`-neighbourhood via distance-to-polygon
/// membership.
pub fn dilation_area_2d_mc(p: &Polytope, lambda: f64, budget: McBudget) -> Result<MeasureEstimate> {
    let g = p.polygon().ok_or(Error::DimensionMismatch {
        expected: 2,
        found: p.dim,
    })?;
    let [x0, y0, x1, y1] = g.bbox();
    Ok(montecarlo::measure_in_box(
        &[x0 - lambda, y0 - lambda],
        &[x1 + lambda, y1 + lambda],
        budget,
        |x| g.distance([x[0], x[1]]) <= lambda,
    ))
}

/// Regular `k`-gon with vertex `j` at angle `2πj/k` on the circle.
pub fn regular_polygon(k: usize, center: &Point, radius: f64) -> Result<Polytope> {
    if k < 3 {
        return Err(Error::invalid(format!("regular polygon needs >= 3 vertices, got {k}")));
    }
    center.check(2)?;
    let (cx, cy) = (center.coords[0], center.coords[1]);
    let verts: Vec<[f64; 2]> = (0..k)
        .map(|j| {
            let a = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
            [cx + radius * a.cos(), cy + radius * a.sin()]
        })
        .collect();
    Polytope::planar(&verts)
}
