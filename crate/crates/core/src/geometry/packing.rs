//! Greedy η-packings of the sphere `S = ∂B((1/2,…,1/2), 1/2)`.
//!
//! Candidates are uniform points on `S` from a seeded stream. A candidate is
//! kept when it is at distance at least `η` from every kept point. The
//! stream stops after `REJECTION_FACTOR · M` consecutive rejections, where
//! `M` is the current packing size; maximality is therefore approximate.
//! Neighbour queries go through a hash grid with cell side `η`.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::StandardNormal;

use super::Point;
use crate::error::{Error, Result};
use crate::rng::{stream, Role};

pub const REJECTION_FACTOR: usize = 100_000;

pub fn sphere_packing(d: usize, eta: f64, seed: u64) -> Result<Vec<Point>> {
    if d < 2 {
        return Err(Error::invalid("sphere_packing needs d >= 2"));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::invalid(format!("packing radius eta = {eta} must lie in (0, 1)")));
    }
    let mut rng = stream(seed, d as u64, Role::Packing);
    let mut grid = HashGrid::new(d, eta);
    let mut kept: Vec<Vec<f64>> = Vec::new();
    let mut streak = 0usize;
    let eta2 = eta * eta;
    let mut x = vec![0.0; d];
    loop {
        sample_sphere(&mut rng, &mut x);
        let clear = grid.neighbours(&x).all(|j| squared_distance(&kept[j], &x) >= eta2);
        if clear {
            grid.insert(&x, kept.len());
            kept.push(x.clone());
            streak = 0;
        } else {
            streak += 1;
            if streak >= REJECTION_FACTOR * kept.len().max(1) {
                break;
            }
        }
    }
    Ok(kept.into_iter().map(Point::new).collect())
}

fn sample_sphere<R: Rng>(rng: &mut R, out: &mut [f64]) {
    loop {
        let mut n2 = 0.0;
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
            n2 += *v * *v;
        }
        if n2 > 1e-24 {
            let s = 0.5 / n2.sqrt();
            for v in out.iter_mut() {
                *v = 0.5 + *v * s;
            }
            return;
        }
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
}

struct HashGrid {
    d: usize,
    cell: f64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
    offsets: Vec<Vec<i64>>,
}

impl HashGrid {
    fn new(d: usize, cell: f64) -> Self {
        let mut offsets = vec![Vec::new()];
        for _ in 0..d {
            offsets = offsets
                .into_iter()
                .flat_map(|o| {
                    (-1..=1).map(move |k| {
                        let mut o = o.clone();
                        o.push(k);
                        o
                    })
                })
                .collect();
        }
        HashGrid {
            d,
            cell,
            cells: HashMap::new(),
            offsets,
        }
    }

    fn key(&self, x: &[f64]) -> Vec<i64> {
        x.iter().map(|v| (v / self.cell).floor() as i64).collect()
    }

    fn insert(&mut self, x: &[f64], id: usize) {
        let k = self.key(x);
        self.cells.entry(k).or_default().push(id);
    }

    fn neighbours<'a>(&'a self, x: &[f64]) -> impl Iterator<Item = usize> + 'a {
        let base = self.key(x);
        let d = self.d;
        let mut probe = vec![0i64; d];
        self.offsets.iter().flat_map(move |o| {
            for i in 0..d {
                probe[i] = base[i] + o[i];
            }
            self.cells
                .get(&probe)
                .map(|v| v.as_slice())
                .unwrap_or(&[])
                .iter()
                .copied()
        })
    }
}

/// Deterministic probe points on `S` used to audit the net property: a
/// uniform angle grid for `d = 2`, a Fibonacci lattice for `d = 3`, and a
/// fixed-seed uniform cloud in higher dimension.
pub fn sphere_probes(d: usize, count: usize) -> Vec<Vec<f64>> {
    use std::f64::consts::PI;
    match d {
        2 => (0..count)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / count as f64;
                vec![0.5 + 0.5 * a.cos(), 0.5 + 0.5 * a.sin()]
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let phi = golden * i as f64;
                    vec![0.5 + 0.5 * r * phi.cos(), 0.5 + 0.5 * r * phi.sin(), 0.5 + 0.5 * z]
                })
                .collect()
        }
        _ => {
            let mut rng = stream(0x5EED, d as u64, Role::Aux);
            (0..count)
                .map(|_| {
                    let mut x = vec![0.0; d];
                    sample_sphere(&mut rng, &mut x);
                    x
                })
                .collect()
        }
    }
}

/// Largest distance from a probe to its nearest packing point.
pub fn covering_radius(points: &[Point], probes: &[Vec<f64>]) -> f64 {
    probes
        .iter()
        .map(|p| {
            points
                .iter()
                .map(|q| squared_distance(q.coords(), p))
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// Smallest pairwise distance (infinite for fewer than two points).
pub fn min_pairwise_distance(points: &[Point]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.min(squared_distance(points[i].coords(), points[j].coords()));
        }
    }
    best.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_eta() {
        assert!(sphere_packing(2, 1.0, 1).is_err());
        assert!(sphere_packing(2, 0.0, 1).is_err());
        assert!(sphere_packing(2, -0.5, 1).is_err());
    }

    #[test]
    fn planar_packing_is_separated_and_on_the_circle() {
        let pts = sphere_packing(2, 0.5, 4).unwrap();
        assert!(min_pairwise_distance(&pts) >= 0.5);
        for p in &pts {
            let r = ((p.coords()[0] - 0.5).powi(2) + (p.coords()[1] - 0.5).powi(2)).sqrt();
            assert!((r - 0.5).abs() < 1e-12);
        }
        // chord 0.5 on a circle of radius 0.5 spans 60 degrees
        assert!(pts.len() >= 3 && pts.len() <= 6, "{}", pts.len());
    }

    #[test]
    fn same_seed_same_packing() {
        let a = sphere_packing(3, 0.5, 9).unwrap();
        let b = sphere_packing(3, 0.5, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn probes_lie_on_sphere() {
        for d in 2..=4 {
            for p in sphere_probes(d, 50) {
                let r2: f64 = p.iter().map(|v| (v - 0.5).powi(2)).sum();
                assert!((r2.sqrt() - 0.5).abs() < 1e-12);
            }
        }
    }
}
