//! The least-squares criterion `A(P) = Σ (1 - 2 Y_i) I(X_i ∈ P)` and its
//! minimization over grid polytopes with at most `r` vertices.
//!
//! Two search paths share one scorer: exhaustive enumeration of vertex
//! subsets for small classes, and simulated annealing over vertex multisets
//! for everything else. The reported `criterion_value` is always recomputed
//! with [`criterion`] on the returned polytope.

use std::cmp::Ordering;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::polygon::ConvexPolygon;
use crate::geometry::{GridPolytope, Point, Polytope, MEMBERSHIP_TOL};
use crate::model::Sample;
use crate::rng::{stream, Role};

pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;
pub const DEFAULT_RESTARTS: usize = 8;
pub const FINAL_TEMPERATURE: f64 = 1e-3;
pub const GLOBAL_JUMP_PROB: f64 = 0.1;

/// The search class `P_r^(m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub dim: usize,
    pub r: usize,
    pub m: usize,
}

impl ClassSpec {
    pub fn new(dim: usize, r: usize, m: usize) -> Result<Self> {
        let spec = ClassSpec { dim, r, m };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::invalid(format!("dimension {} < 2", self.dim)));
        }
        if self.r < self.dim + 1 {
            return Err(Error::invalid(format!(
                "vertex budget r = {} is below d + 1 = {}",
                self.r,
                self.dim + 1
            )));
        }
        if self.m == 0 {
            return Err(Error::invalid("grid resolution m must be >= 1"));
        }
        if self.m > u32::MAX as usize - 1 {
            return Err(Error::invalid("grid resolution too large"));
        }
        Ok(())
    }

    fn grid_points(&self) -> u128 {
        (self.m as u128 + 1).saturating_pow(self.dim as u32)
    }

    /// Number of vertex subsets of size `1..=r` of the grid.
    pub fn enumeration_size(&self) -> u128 {
        let g = self.grid_points();
        let mut total: u128 = 0;
        let mut binom: u128 = 1;
        for k in 1..=self.r as u128 {
            if k > g {
                break;
            }
            binom = binom.saturating_mul(g - k + 1) / k;
            total = total.saturating_add(binom);
        }
        total
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Exact,
    #[default]
    Anneal,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Exact => "exact",
            Strategy::Anneal => "anneal",
        })
    }
}

/// Annealing schedule. Unset fields take the class-dependent defaults:
/// `200 r m` steps per restart and a cooling factor that ends at `1e-3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealParams {
    pub steps: Option<usize>,
    pub t0: f64,
    pub gamma: Option<f64>,
    pub restarts: usize,
}

impl Default for AnnealParams {
    fn default() -> Self {
        AnnealParams {
            steps: None,
            t0: 1.0,
            gamma: None,
            restarts: DEFAULT_RESTARTS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Schedule {
    pub steps: usize,
    pub t0: f64,
    pub gamma: f64,
    pub restarts: usize,
}

impl AnnealParams {
    pub fn resolve(&self, spec: &ClassSpec) -> Result<Schedule> {
        let steps = self.steps.unwrap_or(200 * spec.r * spec.m);
        if steps == 0 {
            return Err(Error::invalid("anneal steps must be >= 1"));
        }
        if !(self.t0.is_finite() && self.t0 > 0.0) {
            return Err(Error::invalid("initial temperature must be > 0"));
        }
        let gamma = match self.gamma {
            Some(g) => g,
            None => (FINAL_TEMPERATURE / self.t0).powf(1.0 / steps as f64).min(1.0 - 1e-12),
        };
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::invalid(format!("cooling factor {gamma} must lie in (0,1)")));
        }
        if self.restarts == 0 {
            return Err(Error::invalid("restarts must be >= 1"));
        }
        Ok(Schedule {
            steps,
            t0: self.t0,
            gamma,
            restarts: self.restarts,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub anneal: AnnealParams,
    pub seed: u64,
    pub enumeration_cap: u128,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::Anneal,
            anneal: AnnealParams::default(),
            seed: 0,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

impl SearchConfig {
    pub fn exact() -> Self {
        SearchConfig {
            strategy: Strategy::Exact,
            ..Default::default()
        }
    }

    pub fn anneal(seed: u64) -> Self {
        SearchConfig {
            seed,
            ..Default::default()
        }
    }
}

/// A fitted grid polytope. Serializes as
/// `{vertices, criterion, evaluations, strategy, seed, resolution}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "FitRecord", try_from = "FitRecord")]
pub struct FitResult {
    pub estimate: GridPolytope,
    pub criterion_value: f64,
    pub evaluations: u64,
    pub strategy: Strategy,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
struct FitRecord {
    vertices: Vec<Vec<f64>>,
    criterion: f64,
    evaluations: u64,
    strategy: Strategy,
    seed: u64,
    resolution: usize,
}

impl From<FitResult> for FitRecord {
    fn from(f: FitResult) -> Self {
        FitRecord {
            vertices: f
                .estimate
                .base()
                .vertices()
                .iter()
                .map(|v| v.coords().to_vec())
                .collect(),
            criterion: f.criterion_value,
            evaluations: f.evaluations,
            strategy: f.strategy,
            seed: f.seed,
            resolution: f.estimate.resolution(),
        }
    }
}

impl TryFrom<FitRecord> for FitResult {
    type Error = Error;
    fn try_from(rec: FitRecord) -> Result<Self> {
        let dim = rec.vertices.first().map_or(0, Vec::len);
        let base = Polytope::new(dim, rec.vertices.into_iter().map(Point::new).collect())?;
        Ok(FitResult {
            estimate: GridPolytope::new(base, rec.resolution)?,
            criterion_value: rec.criterion,
            evaluations: rec.evaluations,
            strategy: rec.strategy,
            seed: rec.seed,
        })
    }
}

/// `Σ_{i: X_i ∈ p} (1 - 2 Y_i)`, accumulated in sample order.
pub fn criterion(p: &Polytope, s: &Sample) -> Result<f64> {
    if s.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: s.dim(),
        });
    }
    let prepared = p.prepare();
    Ok(s.rows
        .iter()
        .filter(|row| prepared.contains(row.x.coords()))
        .map(|row| 1.0 - 2.0 * row.y)
        .sum())
}

/// Criterion evaluation on candidate vertex index lists, specialized for the
/// plane. Membership goes through the same hull and half-plane test as
/// [`criterion`]; only the traversal differs. The sequential traversal visits
/// the points in a candidate's x-range in a fixed order, so identical covered
/// sets produce bit-identical sums; the banded traversal is faster but sums
/// in a different order.
struct Scorer {
    dim: usize,
    m: f64,
    kind: ScorerKind,
}

enum ScorerKind {
    Planar {
        xs: Vec<f64>,
        ys: Vec<f64>,
        ws: Vec<f64>,
        bands: Option<Bands>,
    },
    General {
        xs: Vec<Vec<f64>>,
        ws: Vec<f64>,
    },
}

impl Scorer {
    fn new(s: &Sample, m: usize, banded: bool) -> Self {
        let dim = s.dim();
        let kind = if dim == 2 {
            let mut order: Vec<usize> = (0..s.len()).collect();
            order.sort_by(|&a, &b| {
                let (xa, xb) = (s.rows[a].x.coords()[0], s.rows[b].x.coords()[0]);
                xa.total_cmp(&xb).then(a.cmp(&b))
            });
            let xs: Vec<f64> = order.iter().map(|&i| s.rows[i].x.coords()[0]).collect();
            let ys: Vec<f64> = order.iter().map(|&i| s.rows[i].x.coords()[1]).collect();
            let ws: Vec<f64> = order.iter().map(|&i| 1.0 - 2.0 * s.rows[i].y).collect();
            let bands = banded.then(|| Bands::new(&xs, &ys, &ws));
            ScorerKind::Planar { xs, ys, ws, bands }
        } else {
            ScorerKind::General {
                xs: s.rows.iter().map(|r| r.x.coords().to_vec()).collect(),
                ws: s.rows.iter().map(|r| 1.0 - 2.0 * r.y).collect(),
            }
        };
        Scorer { dim, m: m as f64, kind }
    }

    /// `flat` holds `len / dim` vertices, each as `dim` grid indices.
    fn score(&self, flat: &[u32]) -> f64 {
        match &self.kind {
            ScorerKind::Planar { xs, ys, ws, bands } => {
                let pts: Vec<[f64; 2]> = flat
                    .chunks_exact(2)
                    .map(|c| [c[0] as f64 / self.m, c[1] as f64 / self.m])
                    .collect();
                let poly = ConvexPolygon::hull(&pts);
                if let Some(bands) = bands {
                    if !poly.is_degenerate() {
                        return bands.score(&poly);
                    }
                }
                let [x0, y0, x1, y1] = poly.bbox();
                let slack = 2.0 * MEMBERSHIP_TOL;
                let start = xs.partition_point(|&x| x < x0 - slack);
                let mut acc = 0.0;
                for i in start..xs.len() {
                    let x = xs[i];
                    if x > x1 + slack {
                        break;
                    }
                    let y = ys[i];
                    if y >= y0 - slack && y <= y1 + slack && poly.contains(x, y) {
                        acc += ws[i];
                    }
                }
                acc
            }
            ScorerKind::General { xs, ws } => {
                let vertices: Vec<Point> = flat
                    .chunks_exact(self.dim)
                    .map(|c| Point::new(c.iter().map(|&k| k as f64 / self.m).collect()))
                    .collect();
                let prepared = Polytope::new(self.dim, vertices)
                    .expect("grid vertices lie in the unit cube")
                    .prepare();
                let (lo, hi) = flat_bbox(flat, self.dim, self.m);
                let mut acc = 0.0;
                for (x, w) in xs.iter().zip(ws) {
                    let in_box = x
                        .iter()
                        .zip(lo.iter().zip(&hi))
                        .all(|(&c, (&l, &h))| c >= l - 2.0 * MEMBERSHIP_TOL && c <= h + 2.0 * MEMBERSHIP_TOL);
                    if in_box && prepared.contains(x) {
                        acc += w;
                    }
                }
                acc
            }
        }
    }
}

fn flat_bbox(flat: &[u32], dim: usize, m: f64) -> (Vec<f64>, Vec<f64>) {
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for v in flat.chunks_exact(dim) {
        for (i, &k) in v.iter().enumerate() {
            let c = k as f64 / m;
            lo[i] = lo[i].min(c);
            hi[i] = hi[i].max(c);
        }
    }
    (lo, hi)
}

const SLACK: f64 = 2.0 * MEMBERSHIP_TOL;

/// Design points split into horizontal bands, each sorted by abscissa with
/// prefix sums of the weights. In a band the polygon spans completely, the
/// stretch between the chords at the band's two edges lies inside by
/// convexity and is summed in one step; only points near the boundary go
/// through the membership test.
struct Bands {
    count: usize,
    bands: Vec<Band>,
}

#[derive(Default)]
struct Band {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ws: Vec<f64>,
    prefix: Vec<f64>,
}

impl Bands {
    /// Inputs must be sorted by `xs`.
    fn new(xs: &[f64], ys: &[f64], ws: &[f64]) -> Self {
        let count = (xs.len() / 32).clamp(1, 256);
        let mut bands: Vec<Band> = (0..count).map(|_| Band::default()).collect();
        for i in 0..xs.len() {
            let k = ((ys[i] * count as f64) as usize).min(count - 1);
            let b = &mut bands[k];
            b.xs.push(xs[i]);
            b.ys.push(ys[i]);
            b.ws.push(ws[i]);
        }
        for b in &mut bands {
            b.prefix.push(0.0);
            let mut acc = 0.0;
            for &w in &b.ws {
                acc += w;
                b.prefix.push(acc);
            }
        }
        Bands { count, bands }
    }

    fn score(&self, poly: &ConvexPolygon) -> f64 {
        let [bx0, y0, bx1, y1] = poly.bbox();
        let verts = poly.vertices();
        let h = 1.0 / self.count as f64;
        let first = (((y0 - SLACK) * self.count as f64).floor().max(0.0)) as usize;
        let last = (((y1 + SLACK) * self.count as f64) as usize).min(self.count - 1);
        let mut acc = 0.0;
        for k in first..=last {
            let band = &self.bands[k];
            if band.xs.is_empty() {
                continue;
            }
            let (ylo, yhi) = (k as f64 * h, (k + 1) as f64 * h);
            let (a, b) = (ylo.max(y0), yhi.min(y1));
            let (ol, oh) = if a <= b {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for (l, r) in [chord(verts, a), chord(verts, b)].into_iter().flatten() {
                    lo = lo.min(l);
                    hi = hi.max(r);
                }
                for v in verts.iter().filter(|v| v[1] >= a && v[1] <= b) {
                    lo = lo.min(v[0]);
                    hi = hi.max(v[0]);
                }
                (lo, hi)
            } else {
                (bx0, bx1)
            };
            let i0 = band.xs.partition_point(|&x| x < ol - SLACK);
            let i1 = band.xs.partition_point(|&x| x <= oh + SLACK);
            if i0 >= i1 {
                continue;
            }
            let inner = if y0 <= ylo && y1 >= yhi {
                match (chord(verts, ylo), chord(verts, yhi)) {
                    (Some((l1, r1)), Some((l2, r2))) => {
                        let (il, ih) = (l1.max(l2) + SLACK, r1.min(r2) - SLACK);
                        (il <= ih).then_some((il, ih))
                    }
                    _ => None,
                }
            } else {
                None
            };
            let (j0, j1) = match inner {
                Some((il, ih)) => {
                    let j0 = band.xs.partition_point(|&x| x < il).clamp(i0, i1);
                    let j1 = band.xs.partition_point(|&x| x <= ih).clamp(j0, i1);
                    (j0, j1)
                }
                None => (i1, i1),
            };
            for i in (i0..j0).chain(j1..i1) {
                if poly.contains(band.xs[i], band.ys[i]) {
                    acc += band.ws[i];
                }
            }
            acc += band.prefix[j1] - band.prefix[j0];
        }
        acc
    }
}

/// The x-interval where the horizontal line at height `y` meets the polygon.
fn chord(verts: &[[f64; 2]], y: f64) -> Option<(f64, f64)> {
    let n = verts.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let (p, q) = (verts[i], verts[(i + 1) % n]);
        if (p[1] <= y && y <= q[1]) || (q[1] <= y && y <= p[1]) {
            if p[1] == q[1] {
                lo = lo.min(p[0].min(q[0]));
                hi = hi.max(p[0].max(q[0]));
            } else {
                let x = p[0] + (y - p[1]) / (q[1] - p[1]) * (q[0] - p[0]);
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// Sorted, deduplicated vertex list; the canonical form of a candidate.
fn canonical(flat: &[u32], dim: usize) -> Vec<Vec<u32>> {
    let mut v: Vec<Vec<u32>> = flat.chunks_exact(dim).map(<[u32]>::to_vec).collect();
    v.sort();
    v.dedup();
    v
}

fn finish(
    s: &Sample,
    spec: &ClassSpec,
    vertices: &[Vec<u32>],
    evaluations: u64,
    strategy: Strategy,
    seed: u64,
) -> Result<FitResult> {
    let estimate = GridPolytope::from_indices(spec.dim, spec.m, vertices)?;
    let criterion_value = criterion(estimate.base(), s)?;
    Ok(FitResult {
        estimate,
        criterion_value,
        evaluations,
        strategy,
        seed,
    })
}

fn check_inputs(s: &Sample, spec: &ClassSpec) -> Result<()> {
    spec.validate()?;
    if s.dim() != spec.dim {
        return Err(Error::DimensionMismatch {
            expected: spec.dim,
            found: s.dim(),
        });
    }
    Ok(())
}

/// Visits every strictly increasing index tuple of size `1..=r` over `g`
/// grid points, in lexicographic order within each size.
pub(crate) fn for_each_subset(g: usize, r: usize, mut f: impl FnMut(&[usize])) {
    for k in 1..=r.min(g) {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            f(&idx);
            // rightmost position that can still advance
            let Some(i) = (0..k).rev().find(|&i| idx[i] < g - k + i) else {
                break;
            };
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
}

/// Grid point number `code` in row-major order, as `dim` indices.
fn decode(mut code: usize, dim: usize, m: usize, out: &mut [u32]) {
    for slot in out.iter_mut().take(dim).rev() {
        *slot = (code % (m + 1)) as u32;
        code /= m + 1;
    }
}

/// Global minimizer over all vertex subsets of size at most `r`. Ties go to
/// the lexicographically smallest sorted vertex list.
pub fn exact_minimize(s: &Sample, spec: &ClassSpec) -> Result<FitResult> {
    exact_minimize_capped(s, spec, DEFAULT_ENUMERATION_CAP)
}

pub fn exact_minimize_capped(s: &Sample, spec: &ClassSpec, cap: u128) -> Result<FitResult> {
    check_inputs(s, spec)?;
    let candidates = spec.enumeration_size();
    if candidates > cap {
        return Err(Error::EnumerationTooLarge { candidates, cap });
    }
    let scorer = Scorer::new(s, spec.m, false);
    let g = spec.grid_points() as usize;
    let mut flat = vec![0u32; spec.r * spec.dim];
    let mut best: Option<(f64, Vec<Vec<u32>>)> = None;
    let mut evaluations = 0u64;
    for_each_subset(g, spec.r, |idx| {
        let len = idx.len() * spec.dim;
        for (j, &code) in idx.iter().enumerate() {
            decode(code, spec.dim, spec.m, &mut flat[j * spec.dim..(j + 1) * spec.dim]);
        }
        let value = scorer.score(&flat[..len]);
        evaluations += 1;
        let better = match &best {
            None => true,
            Some((bv, bl)) => match value.total_cmp(bv) {
                Ordering::Less => true,
                Ordering::Equal => canonical(&flat[..len], spec.dim) < *bl,
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some((value, canonical(&flat[..len], spec.dim)));
        }
    });
    let (_, vertices) = best.expect("the grid has at least one point");
    finish(s, spec, &vertices, evaluations, Strategy::Exact, 0)
}

struct RestartOutcome {
    value: f64,
    vertices: Vec<Vec<u32>>,
    evaluations: u64,
}

fn anneal_once(scorer: &Scorer, spec: &ClassSpec, sched: &Schedule, seed: u64, restart: u64) -> RestartOutcome {
    let mut rng = stream(seed, restart, Role::Search);
    let (d, m) = (spec.dim, spec.m as u32);
    let radius = (spec.m / 8).max(1) as u32;
    let mut state: Vec<u32> = (0..spec.r * d).map(|_| rng.gen_range(0..=m)).collect();
    let mut current = scorer.score(&state);
    let mut best_value = current;
    let mut best_state = state.clone();
    let mut evaluations = 1u64;
    let mut temp = sched.t0;
    let mut proposal = state.clone();
    for _ in 0..sched.steps {
        proposal.copy_from_slice(&state);
        let v = rng.gen_range(0..spec.r);
        let slot = &mut proposal[v * d..(v + 1) * d];
        if rng.gen::<f64>() < GLOBAL_JUMP_PROB {
            for c in slot.iter_mut() {
                *c = rng.gen_range(0..=m);
            }
        } else {
            for c in slot.iter_mut() {
                let lo = c.saturating_sub(radius);
                let hi = (*c + radius).min(m);
                *c = rng.gen_range(lo..=hi);
            }
        }
        let value = scorer.score(&proposal);
        evaluations += 1;
        let delta = value - current;
        if delta <= 0.0 || rng.gen::<f64>() < (-delta / temp).exp() {
            std::mem::swap(&mut state, &mut proposal);
            current = value;
            if current < best_value {
                best_value = current;
                best_state.copy_from_slice(&state);
            }
        }
        temp *= sched.gamma;
    }
    RestartOutcome {
        value: best_value,
        vertices: canonical(&best_state, d),
        evaluations,
    }
}

/// Simulated annealing over multisets of `r` grid vertices. Restarts run in
/// parallel on their own streams; the best state over all restarts wins,
/// ties going to the smaller sorted vertex list.
pub fn anneal_minimize(s: &Sample, spec: &ClassSpec, cfg: &SearchConfig) -> Result<FitResult> {
    check_inputs(s, spec)?;
    let sched = cfg.anneal.resolve(spec)?;
    let scorer = Scorer::new(s, spec.m, true);
    let outcomes: Vec<RestartOutcome> = (0..sched.restarts as u64)
        .into_par_iter()
        .map(|k| anneal_once(&scorer, spec, &sched, cfg.seed, k))
        .collect();
    let evaluations = outcomes.iter().map(|o| o.evaluations).sum();
    let best = outcomes
        .into_iter()
        .min_by(|a, b| a.value.total_cmp(&b.value).then_with(|| a.vertices.cmp(&b.vertices)))
        .expect("at least one restart");
    finish(s, spec, &best.vertices, evaluations, Strategy::Anneal, cfg.seed)
}

/// The estimator `P̂^(r)` on the `1/m` grid, by the configured search.
pub fn estimate_polytope(s: &Sample, r: usize, m: usize, cfg: &SearchConfig) -> Result<FitResult> {
    let spec = ClassSpec::new(s.dim(), r, m)?;
    match cfg.strategy {
        Strategy::Exact => exact_minimize_capped(s, &spec, cfg.enumeration_cap),
        Strategy::Anneal => anneal_minimize(s, &spec, cfg),
    }
}

/// Vertex budget `max(d+1, ⌊(n / ln n)^((d-1)/(d+1))⌋)` for convex truths.
pub fn convex_rate_r(n: usize, d: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::invalid("convex_rate_r needs n >= 2"));
    }
    let nf = n as f64;
    let raw = (nf / nf.ln()).powf((d as f64 - 1.0) / (d as f64 + 1.0));
    Ok((raw.floor() as usize).max(d + 1))
}

/// Default grid resolution `min(n, 64)`.
pub fn default_resolution(n: usize) -> usize {
    n.clamp(1, 64)
}
