//! Monte Carlo measure of a set inside an axis-aligned box.
//!
//! Samples are jittered-stratified: the box is cut into `k^d` congruent cells
//! and each cell receives one uniform point. Rows of cells along the first
//! axis draw from their own keyed stream, so the result does not depend on
//! how the rows are scheduled across threads. The reported interval is the
//! Wilson 95% interval of the hit proportion treated as binomial, which is
//! conservative for stratified sampling.

use rand::Rng;
use rayon::prelude::*;

use super::{MeasureEstimate, MeasureMethod};
use crate::numeric::{wilson_interval, Z95};
use crate::rng::{derive_seed, stream, Role};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct McBudget {
    pub samples: usize,
    pub seed: u64,
}

impl McBudget {
    pub const STUDY: usize = 200_000;
    pub const VERIFY: usize = 1_000_000;

    pub fn new(samples: usize, seed: u64) -> Self {
        McBudget { samples, seed }
    }
}

/// Cells per axis so that `k^d <= samples`.
pub fn cells_per_axis(samples: usize, d: usize) -> usize {
    let mut k = (samples as f64).powf(1.0 / d as f64).round() as usize;
    while k > 1 && k.checked_pow(d as u32).is_none_or(|v| v > samples) {
        k -= 1;
    }
    while (k + 1).checked_pow(d as u32).is_some_and(|v| v <= samples) {
        k += 1;
    }
    k.max(1)
}

/// Estimates the Lebesgue measure of `{x in box : pred(x)}`.
pub fn measure_in_box<F>(lo: &[f64], hi: &[f64], budget: McBudget, pred: F) -> MeasureEstimate
where
    F: Fn(&[f64]) -> bool + Sync,
{
    let d = lo.len();
    let k = cells_per_axis(budget.samples.max(1), d);
    let total = (k as u64).pow(d as u32);
    let cell: Vec<f64> = (0..d).map(|i| (hi[i] - lo[i]) / k as f64).collect();
    let box_volume: f64 = (0..d).map(|i| hi[i] - lo[i]).product();
    let per_row = total / k as u64;
    let hits: u64 = (0..k)
        .into_par_iter()
        .map(|row| {
            let mut rng = stream(derive_seed(budget.seed, &[row as u64]), 0, Role::MonteCarlo);
            let mut idx = vec![0usize; d];
            idx[0] = row;
            let mut x = vec![0.0; d];
            let mut count = 0u64;
            for _ in 0..per_row {
                for i in 0..d {
                    x[i] = lo[i] + (idx[i] as f64 + rng.gen::<f64>()) * cell[i];
                }
                if pred(&x) {
                    count += 1;
                }
                // advance the odometer over axes 1..d
                for slot in idx.iter_mut().skip(1) {
                    *slot += 1;
                    if *slot < k {
                        break;
                    }
                    *slot = 0;
                }
            }
            count
        })
        .sum();
    let p = hits as f64 / total as f64;
    let (low, high) = wilson_interval(hits, total, Z95);
    let half = (p - low).max(high - p);
    MeasureEstimate {
        value: p * box_volume,
        half_width: half * box_volume,
        method: MeasureMethod::Mc,
        samples: total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_fill_budget() {
        assert_eq!(cells_per_axis(1_000_000, 2), 1000);
        assert_eq!(cells_per_axis(1_000_000, 3), 100);
        assert_eq!(cells_per_axis(999_999, 3), 99);
        assert_eq!(cells_per_axis(1, 4), 1);
        assert_eq!(cells_per_axis(200_000, 2), 447);
    }

    #[test]
    fn half_box_measure() {
        let est = measure_in_box(&[0.0, 0.0], &[1.0, 1.0], McBudget::new(10_000, 3), |x| x[0] <= 0.5);
        assert!((est.value - 0.5).abs() <= est.half_width);
        assert_eq!(est.samples, 10_000);
    }

    #[test]
    fn deterministic_under_seed() {
        let f = |x: &[f64]| x[0] * x[0] + x[1] * x[1] <= 1.0;
        let a = measure_in_box(&[0.0, 0.0], &[1.0, 1.0], McBudget::new(5_000, 11), f);
        let b = measure_in_box(&[0.0, 0.0], &[1.0, 1.0], McBudget::new(5_000, 11), f);
        assert_eq!(a, b);
    }
}
