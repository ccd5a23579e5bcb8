//! Data-driven choice of the vertex budget.
//!
//! Every `P̂^(r)` for `r = d+1..R_n` is fitted on the same sample, and
//! `r̂` is the smallest `r` whose estimate stays within
//! `6 d r' ln n / (C₂ n)` of every larger-budget estimate `P̂^(r')`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::c2;
use crate::error::{Error, Result};
use crate::estimator::{convex_rate_r, estimate_polytope, FitResult, SearchConfig};
use crate::geometry::montecarlo::McBudget;
use crate::geometry::{nikodym_distance, ConvexBody};
use crate::model::Sample;
use crate::rng::derive_seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptConfig {
    pub sigma: f64,
    /// Largest budget `R_n`; defaults to `max(d+1, ⌊(n/ln n)^((d-1)/(d+1))⌋)`.
    #[serde(default)]
    pub r_max: Option<usize>,
    pub m: usize,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: usize,
}

fn default_mc_samples() -> usize {
    McBudget::STUDY
}

impl AdaptConfig {
    pub fn new(sigma: f64, m: usize, seed: u64) -> Self {
        AdaptConfig {
            sigma,
            r_max: None,
            m,
            search: SearchConfig::default(),
            seed,
            mc_samples: McBudget::STUDY,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairDistance {
    pub r: usize,
    pub r_prime: usize,
    pub value: f64,
    pub half_width: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptResult {
    pub r_hat: usize,
    pub r_min: usize,
    pub r_max: usize,
    pub n: usize,
    pub sigma: f64,
    pub estimates: BTreeMap<usize, FitResult>,
    /// One entry per pair `r < r'`.
    pub distances: Vec<PairDistance>,
    /// Threshold for each `r'`.
    pub thresholds: BTreeMap<usize, f64>,
}

impl AdaptResult {
    pub fn distance(&self, r: usize, r_prime: usize) -> Option<f64> {
        if r == r_prime {
            return Some(0.0);
        }
        let (a, b) = (r.min(r_prime), r.max(r_prime));
        self.distances
            .iter()
            .find(|p| p.r == a && p.r_prime == b)
            .map(|p| p.value)
    }

    /// Whether `A_r` holds on the recorded table with thresholds scaled by `scale`.
    pub fn event_holds(&self, r: usize, scale: f64) -> bool {
        (r..=self.r_max).all(|rp| {
            let d = self.distance(r, rp).unwrap_or(f64::INFINITY);
            d <= scale * self.thresholds[&rp]
        })
    }

    /// Recomputes `r̂` from the recorded table.
    pub fn replay(&self, scale: f64) -> usize {
        (self.r_min..=self.r_max)
            .find(|&r| self.event_holds(r, scale))
            .unwrap_or(self.r_max)
    }

    pub fn selected(&self) -> &FitResult {
        &self.estimates[&self.r_hat]
    }
}

/// `6 d r' ln n / (C₂ n)` with `C₂ = 1 - exp(-1/(4σ²))`.
pub fn adapt_threshold(r_prime: usize, n: usize, d: usize, sigma: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid("adapt_threshold needs n >= 2"));
    }
    let nf = n as f64;
    Ok(6.0 * d as f64 * r_prime as f64 * nf.ln() / (c2(sigma)? * nf))
}

/// `R_n`, clamped below at `d + 1`.
pub fn default_r_max(n: usize, d: usize) -> Result<usize> {
    convex_rate_r(n, d)
}

/// `min(r ln n / n, (ln n / n)^(2/(d+1)))`; `r = None` stands for `r = ∞`.
pub fn phi_rate(n: usize, d: usize, r: Option<usize>) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid("phi_rate needs n >= 2"));
    }
    let ratio = (n as f64).ln() / n as f64;
    let body = ratio.powf(2.0 / (d as f64 + 1.0));
    Ok(match r {
        Some(r) => (r as f64 * ratio).min(body),
        None => body,
    })
}

pub fn select_r_hat(s: &Sample, cfg: &AdaptConfig) -> Result<AdaptResult> {
    let (n, d) = (s.len(), s.dim());
    if n < 2 {
        return Err(Error::invalid("adaptive selection needs n >= 2"));
    }
    let cap = default_r_max(n, d)?;
    let r_max = cfg.r_max.unwrap_or(cap);
    if r_max < d + 1 || r_max > cap {
        return Err(Error::invalid(format!("R_n = {r_max} must lie in [{}, {cap}]", d + 1)));
    }
    let r_min = d + 1;
    let fits: Vec<(usize, FitResult)> = (r_min..=r_max)
        .into_par_iter()
        .map(|r| {
            let search = SearchConfig {
                seed: derive_seed(cfg.seed, &[r as u64]),
                ..cfg.search.clone()
            };
            estimate_polytope(s, r, cfg.m, &search).map(|f| (r, f))
        })
        .collect::<Result<_>>()?;
    let estimates: BTreeMap<usize, FitResult> = fits.into_iter().collect();
    let bodies: BTreeMap<usize, ConvexBody> = estimates
        .iter()
        .map(|(&r, f)| (r, f.estimate.base().clone().into()))
        .collect();
    let pairs: Vec<(usize, usize)> = (r_min..=r_max)
        .flat_map(|r| (r + 1..=r_max).map(move |rp| (r, rp)))
        .collect();
    let distances: Vec<PairDistance> = pairs
        .par_iter()
        .map(|&(r, rp)| {
            let budget = McBudget::new(cfg.mc_samples, derive_seed(cfg.seed, &[r as u64, rp as u64]));
            nikodym_distance(&bodies[&r], &bodies[&rp], budget).map(|e| PairDistance {
                r,
                r_prime: rp,
                value: e.value,
                half_width: e.half_width,
            })
        })
        .collect::<Result<_>>()?;
    let thresholds = (r_min..=r_max)
        .map(|rp| adapt_threshold(rp, n, d, cfg.sigma).map(|t| (rp, t)))
        .collect::<Result<_>>()?;
    let mut result = AdaptResult {
        r_hat: r_max,
        r_min,
        r_max,
        n,
        sigma: cfg.sigma,
        estimates,
        distances,
        thresholds,
    };
    result.r_hat = result.replay(1.0);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polytope;
    use crate::model::{generate_sample, ModelConfig, NoiseKind};

    fn sample(n: usize, seed: u64) -> Sample {
        let truth: ConvexBody = Polytope::planar(&[[0.25, 0.25], [0.75, 0.25], [0.5, 1.0]])
            .unwrap()
            .into();
        generate_sample(&ModelConfig {
            dim: 2,
            n,
            truth,
            sigma: 0.5,
            noise: NoiseKind::Gaussian,
            seed,
        })
        .unwrap()
    }

    #[test]
    fn threshold_example() {
        let t = adapt_threshold(3, 1000, 2, 0.5).unwrap();
        assert!((t - 0.3934).abs() < 5e-4, "{t}");
        assert!(adapt_threshold(4, 1000, 2, 0.5).unwrap() > t);
        assert!(adapt_threshold(3, 1000, 2, 1e6).unwrap() > 1e9);
    }

    #[test]
    fn phi_examples() {
        let v = phi_rate(1000, 2, Some(3)).unwrap();
        assert!((v - 0.02072).abs() < 1e-5);
        let inf = phi_rate(1000, 2, None).unwrap();
        assert!((inf - (6.907755f64 / 1000.0).powf(2.0 / 3.0)).abs() < 1e-8);
        // crossover budget where both branches coincide
        let n = 5000usize;
        let nf = n as f64;
        let r_star = (nf / nf.ln()).powf(1.0 / 3.0);
        let lhs = r_star * nf.ln() / nf;
        assert!((lhs - (nf.ln() / nf).powf(2.0 / 3.0)).abs() < 1e-12);
        assert_eq!(r_star.floor() as usize, default_r_max(n, 2).unwrap());
    }

    #[test]
    fn single_candidate_selects_minimum() {
        let s = sample(40, 1);
        let mut cfg = AdaptConfig::new(0.5, 8, 3);
        cfg.r_max = Some(3);
        let res = select_r_hat(&s, &cfg).unwrap();
        assert_eq!(res.r_hat, 3);
        assert!(res.distances.is_empty());
    }

    #[test]
    fn zero_table_selects_minimum() {
        let s = sample(1000, 2);
        let mut cfg = AdaptConfig::new(0.5, 8, 3);
        cfg.r_max = Some(5);
        cfg.search.anneal.restarts = 1;
        let mut res = select_r_hat(&s, &cfg).unwrap();
        for p in &mut res.distances {
            p.value = 0.0;
        }
        assert_eq!(res.replay(1.0), 3);
    }

    #[test]
    fn selection_replays_and_is_deterministic() {
        let s = sample(1000, 5);
        let mut cfg = AdaptConfig::new(0.5, 8, 11);
        cfg.search.anneal.restarts = 2;
        let a = select_r_hat(&s, &cfg).unwrap();
        let b = select_r_hat(&s, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.r_hat >= a.r_min && a.r_hat <= a.r_max);
        assert!(a.event_holds(a.r_hat, 1.0));
        if a.r_hat > a.r_min {
            assert!(!a.event_holds(a.r_hat - 1, 1.0));
        }
        let mut prev = a.replay(1.0);
        for scale in [1.5, 2.0, 10.0] {
            let r = a.replay(scale);
            assert!(r <= prev);
            prev = r;
        }
    }

    #[test]
    fn result_json_round_trip() {
        let s = sample(60, 4);
        let mut cfg = AdaptConfig::new(0.5, 4, 1);
        cfg.r_max = Some(3);
        cfg.search = SearchConfig::exact();
        let res = select_r_hat(&s, &cfg).unwrap();
        let json = serde_json::to_string(&res).unwrap();
        let back: AdaptResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back, res);
    }

    #[test]
    fn rejects_oversized_cap() {
        let s = sample(100, 1);
        let mut cfg = AdaptConfig::new(0.5, 8, 1);
        cfg.r_max = Some(50);
        assert!(select_r_hat(&s, &cfg).is_err());
    }
}
