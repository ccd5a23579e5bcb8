//! Constants, information distances and lower-bound constructions.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::cap::cap_volume;
use crate::geometry::montecarlo::McBudget;
use crate::geometry::packing::sphere_packing;
use crate::geometry::{nikodym_distance, regular_polygon, Cap, ConvexBody, MeasureEstimate, Point, Polytope};
use crate::numeric::{adaptive_simpson, mean_and_se, unit_ball_volume};
use crate::rng::{stream, Role};

/// The value printed next to the closed form of `alpha`.
pub const ALPHA_PRINTED: f64 = 0.29;

/// Default for the unspecified polytopal approximation constant `A`.
pub const DEFAULT_APPROX_A: f64 = 8.0;

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("sigma = {sigma} must be > 0")))
    }
}

/// `C₂ = 1 - exp(-1/(4σ²))`.
pub fn c2(sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    Ok(-(-1.0 / (4.0 * sigma * sigma)).exp_m1())
}

/// `α = 1/2 - ln 2 / (2 ln 3)`.
pub fn alpha() -> f64 {
    0.5 - 2f64.ln() / (2.0 * 3f64.ln())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsTable {
    pub sigma: f64,
    pub d: usize,
    pub beta_d: f64,
    pub c1_tilde: f64,
    /// `ln C₁`; `C₁` itself overflows for moderate `d` or small `σ`.
    pub ln_c1: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub alpha: f64,
    pub alpha_printed: f64,
    pub approx_a: f64,
}

pub fn constants(sigma: f64, d: usize, approx_a: f64) -> Result<ConstantsTable> {
    check_sigma(sigma)?;
    if d < 2 {
        return Err(Error::invalid(format!("dimension {d} < 2")));
    }
    if !(approx_a.is_finite() && approx_a > 0.0) {
        return Err(Error::invalid("approximation constant A must be > 0"));
    }
    let df = d as f64;
    let beta_d = unit_ball_volume(d);
    let s2 = sigma * sigma;
    let c1_tilde = 1.0 + (3.0 / (8.0 * s2)).exp();
    let ln_c1 = 2.0 * df.powi(d as i32 + 1) * 1.5f64.powi(d as i32) * beta_d * c1_tilde;
    let c2 = c2(sigma)?;
    Ok(ConstantsTable {
        sigma,
        d,
        beta_d,
        c1_tilde,
        ln_c1,
        c1: ln_c1.exp(),
        c2,
        c3: (1.0 + c1_tilde * approx_a) * df / c2,
        alpha: alpha(),
        alpha_printed: ALPHA_PRINTED,
        approx_a,
    })
}

/// `|P △ P*|` bound for snapping to the `1/m` grid: `2 d^(d+1) (3/2)^d β_d / m`.
pub fn snap_distance_bound(d: usize, m: usize) -> f64 {
    let df = d as f64;
    2.0 * df.powi(d as i32 + 1) * 1.5f64.powi(d as i32) * unit_ball_volume(d) / m as f64
}

/// `H² = 2 (1 - exp(-1/(8σ²))) |G₁ △ G₂|`.
pub fn hellinger_sq(sym_diff: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if !(0.0..=1.0).contains(&sym_diff) {
        return Err(Error::invalid(format!("symmetric difference {sym_diff} outside [0,1]")));
    }
    Ok(-2.0 * (-1.0 / (8.0 * sigma * sigma)).exp_m1() * sym_diff)
}

/// `∫ sqrt(φ_σ(y) φ_σ(y - 1)) dy` by adaptive quadrature.
pub fn gaussian_affinity(sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let norm = 1.0 / (sigma * (2.0 * PI).sqrt());
    let f = |y: f64| {
        let a = y * y;
        let b = (y - 1.0) * (y - 1.0);
        norm * (-(a + b) / (4.0 * sigma * sigma)).exp()
    };
    let half = 40.0 * sigma + 1.0;
    Ok(adaptive_simpson(f, 0.5 - half, 0.5 + half, 1e-13))
}

/// Hellinger distance through the affinity integral: on the difference set
/// the two response laws are `N(0,σ²)` and `N(1,σ²)`, elsewhere identical.
pub fn hellinger_sq_numeric(sym_diff: f64, sigma: f64) -> Result<f64> {
    Ok(2.0 * sym_diff * (1.0 - gaussian_affinity(sigma)?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KlReport {
    pub sym_diff: MeasureEstimate,
    pub n: usize,
    pub sigma: f64,
    /// `n h / (2σ²)`, the Gaussian-shift value.
    pub kl: f64,
    /// `n h / (4σ²)`, the value printed in the lower-bound argument.
    pub kl_printed: f64,
}

/// `K(P_{g1}^n, P_{g2}^n) = n |g1 △ g2| / (2σ²)` for Gaussian noise.
pub fn kl_divergence(g1: &ConvexBody, g2: &ConvexBody, sigma: f64, n: usize, budget: McBudget) -> Result<KlReport> {
    check_sigma(sigma)?;
    let sym_diff = nikodym_distance(g1, g2, budget)?;
    let h = sym_diff.value;
    let s2 = sigma * sigma;
    Ok(KlReport {
        sym_diff,
        n,
        sigma,
        kl: n as f64 * h / (2.0 * s2),
        kl_printed: n as f64 * h / (4.0 * s2),
    })
}

/// Simulated per-observation `E_{g1}[log p_{g1}(X,Y) / p_{g2}(X,Y)]` with its
/// standard error.
pub fn kl_per_observation_mc(
    g1: &ConvexBody,
    g2: &ConvexBody,
    sigma: f64,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    check_sigma(sigma)?;
    if g1.dim() != g2.dim() {
        return Err(Error::DimensionMismatch {
            expected: g1.dim(),
            found: g2.dim(),
        });
    }
    let d = g1.dim();
    let (p1, p2) = (g1.prepare(), g2.prepare());
    let mut rng = stream(seed, 0, Role::MonteCarlo);
    let s2 = sigma * sigma;
    let values: Vec<f64> = (0..samples)
        .map(|_| {
            let x: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
            let xi: f64 = sigma * rng.sample::<f64, _>(StandardNormal);
            let i1 = if p1.contains(&x) { 1.0 } else { 0.0 };
            let i2 = if p2.contains(&x) { 1.0 } else { 0.0 };
            let y = i1 + xi;
            ((y - i2).powi(2) - (y - i1).powi(2)) / (2.0 * s2)
        })
        .collect();
    Ok(mean_and_se(&values))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    SlabSimplices { m: usize, d: usize, h: f64 },
    CarvedBall { d: usize, eta: f64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisFamily {
    pub kind: FamilyKind,
    pub members: Vec<ConvexBody>,
}

/// `M` right simplices of volume `h/2` in the slabs `x₁ ∈ [k/M, (k+1)/M)`.
/// Member `k` has its right-angle corner at `(k/M, 0, ..., 0)`, a leg of
/// length `d! h / 2` along `x₁` and unit legs along the other axes.
pub fn build_thm2_family(m: usize, d: usize, h: Option<f64>) -> Result<HypothesisFamily> {
    if m < 2 {
        return Err(Error::invalid("the family needs M >= 2"));
    }
    if d < 2 {
        return Err(Error::invalid(format!("dimension {d} < 2")));
    }
    let h = h.unwrap_or(1.0 / (m as f64 + 1.0));
    if h.is_nan() || h <= 0.0 {
        return Err(Error::invalid("h must be > 0"));
    }
    let factorial: f64 = (1..=d).map(|k| k as f64).product();
    let leg = factorial * h / 2.0;
    let slab = 1.0 / m as f64;
    if leg >= slab {
        return Err(Error::invalid(format!(
            "infeasible: a simplex of volume {} needs an x1-leg of {leg:.6}, wider than the slab 1/M = {slab:.6}",
            h / 2.0
        )));
    }
    let members = (0..m)
        .map(|k| {
            let x0 = k as f64 * slab;
            let mut verts = Vec::with_capacity(d + 1);
            let mut a = vec![0.0; d];
            a[0] = x0;
            verts.push(Point::new(a.clone()));
            let mut v = a.clone();
            v[0] = x0 + leg;
            verts.push(Point::new(v));
            for j in 1..d {
                let mut v = a.clone();
                v[j] = 1.0;
                verts.push(Point::new(v));
            }
            Polytope::new(d, verts).map(ConvexBody::Poly)
        })
        .collect::<Result<_>>()?;
    Ok(HypothesisFamily {
        kind: FamilyKind::SlabSimplices { m, d, h },
        members,
    })
}

/// Centres of the cap-carving construction: a greedy maximal `η`-packing of
/// the sphere bounding the inscribed ball.
pub fn cap_family_packing(d: usize, eta: f64, seed: u64) -> Result<Vec<Point>> {
    sphere_packing(d, eta, seed)
}

/// Inscribed ball with the cap of height `η²/4` at packing point `y_j`
/// removed whenever `omega[j]` is false.
pub fn build_carved_ball(d: usize, eta: f64, packing: &[Point], omega: &[bool]) -> Result<ConvexBody> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::invalid(format!("eta = {eta} must lie in (0,1)")));
    }
    if omega.len() != packing.len() {
        return Err(Error::invalid(format!(
            "omega has {} bits for {} packing points",
            omega.len(),
            packing.len()
        )));
    }
    let center = vec![0.5; d];
    let caps = packing
        .iter()
        .map(|y| {
            y.check(d)?;
            let dir: Vec<f64> = y.coords().iter().zip(&center).map(|(a, c)| a - c).collect();
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            Ok(Cap {
                direction: dir.iter().map(|v| v / norm).collect(),
                height: eta * eta / 4.0,
            })
        })
        .collect::<Result<_>>()?;
    let body = ConvexBody::CapCarvedBall {
        center: Point::new(center),
        radius: 0.5,
        caps,
        omega: omega.to_vec(),
    };
    body.validate()?;
    Ok(body)
}

/// Packs the sphere with `seed` and carves according to `omega`; an empty
/// `omega` means all ones (no carving).
pub fn build_thm4_family(d: usize, eta: f64, seed: u64, omega: &[bool]) -> Result<HypothesisFamily> {
    let packing = cap_family_packing(d, eta, seed)?;
    let bits = if omega.is_empty() {
        vec![true; packing.len()]
    } else {
        omega.to_vec()
    };
    let body = build_carved_ball(d, eta, &packing, &bits)?;
    Ok(HypothesisFamily {
        kind: FamilyKind::CarvedBall { d, eta, seed },
        members: vec![body],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapSandwich2d {
    pub m: usize,
    pub h: f64,
    pub lower: f64,
    pub upper: f64,
    pub holds: bool,
    pub lower_ratio: f64,
    pub upper_ratio: f64,
}

/// Exact circular segment of the inscribed disk cut by a side of the regular
/// `M`-gon, against `π³/(12M³) ≤ h ≤ π³/M³`.
pub fn verify_cap_sandwich_2d(m: usize) -> Result<CapSandwich2d> {
    if m < 6 {
        return Err(Error::invalid(format!("the sandwich is claimed for M >= 6, got {m}")));
    }
    let theta = 2.0 * PI / m as f64;
    let h = (theta - theta.sin()) / 8.0;
    let m3 = (m as f64).powi(3);
    let lower = PI.powi(3) / (12.0 * m3);
    let upper = PI.powi(3) / m3;
    Ok(CapSandwich2d {
        m,
        h,
        lower,
        upper,
        holds: lower <= h && h <= upper,
        lower_ratio: h / lower,
        upper_ratio: h / upper,
    })
}

/// `(lower, cap_volume(d, 1/2, η²/4), upper)` with
/// `lower = 3^((d-1)/2) η^(d+1) β_{d-1} / (2^(2d-1) (d+1))` and
/// `upper = η^(d+1) β_{d-1} / (2^d (d+1))`.
pub fn cap_sandwich(d: usize, eta: f64) -> Result<(f64, f64, f64)> {
    let (lo, hi) = cap_bounds(d, eta, 1.0);
    Ok((lo, cap_volume(d, 0.5, eta * eta / 4.0)?, hi))
}

/// The same sandwich with the substitution factor `4^(d+1)` in place of
/// `2^(d+1)`: both sides shrink by `2^(d+1)`, so the lower side stays valid
/// and the upper side fails.
pub fn cap_sandwich_printed(d: usize, eta: f64) -> (f64, f64) {
    cap_bounds(d, eta, 2f64.powi(d as i32 + 1))
}

fn cap_bounds(d: usize, eta: f64, shrink: f64) -> (f64, f64) {
    let b = unit_ball_volume(d - 1);
    let df = d as f64;
    let e = eta.powi(d as i32 + 1) * b / (df + 1.0);
    let lower = 3f64.powf((df - 1.0) / 2.0) * e / 2f64.powi(2 * d as i32 - 1);
    let upper = e / 2f64.powi(d as i32);
    (lower / shrink, upper / shrink)
}

/// Two-sided cardinality bound for a maximal `η`-packing of the sphere.
pub fn packing_cardinality_bounds(d: usize, eta: f64) -> (f64, f64) {
    let df = d as f64;
    let tau = (2.0 * PI).sqrt();
    let p = eta.powi(d as i32 - 1);
    let lo = df * tau / (2f64.powi(d as i32 - 1) * (df + 2.0).sqrt() * p);
    let hi = 4f64.powf(df - 2.0) * (2.0 * PI * df).sqrt() / (3f64.powf((df - 3.0) / 2.0) * p);
    (lo, hi)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBounds {
    pub thm2: f64,
    pub thm4: f64,
    pub c8: f64,
    pub c9: f64,
    pub c10: f64,
}

pub fn lower_bound_constants(sigma: f64, d: usize) -> Result<(f64, f64, f64)> {
    check_sigma(sigma)?;
    let df = d as f64;
    let b = unit_ball_volume(d - 1);
    let c8 = 3f64.powf((df - 1.0) / 2.0) * b * df / (2f64.powi(4 * d as i32 + 1) * (df + 1.0) * (df + 2.0).sqrt());
    let c9 = -(-1.0 / (8.0 * sigma * sigma)).exp_m1() * b / (2f64.powi(2 * d as i32 + 1) * (df + 1.0));
    Ok((c8, c9, c8 * (1.0 - c9).powi(2)))
}

/// `α² σ² ln n / n` and `C₁₀ n^(-2/(d+1))`.
pub fn lower_bound_values(n: usize, sigma: f64, d: usize) -> Result<LowerBounds> {
    if n < 2 {
        return Err(Error::invalid("lower bounds need n >= 2"));
    }
    if d < 2 {
        return Err(Error::invalid(format!("dimension {d} < 2")));
    }
    let (c8, c9, c10) = lower_bound_constants(sigma, d)?;
    let nf = n as f64;
    Ok(LowerBounds {
        thm2: alpha().powi(2) * sigma * sigma * nf.ln() / nf,
        thm4: c10 * nf.powf(-2.0 / (d as f64 + 1.0)),
        c8,
        c9,
        c10,
    })
}

/// Regular `r`-gon inscribed in the disk of radius 1/2 centred in the unit
/// square, and its exact Nikodym distance `π/4 - (r/8) sin(2π/r)` to the disk.
pub fn polytopal_approx_disk(r: usize) -> Result<(Polytope, f64)> {
    if r < 3 {
        return Err(Error::invalid(format!("need r >= 3, got {r}")));
    }
    let p = regular_polygon(r, &Point::new(vec![0.5, 0.5]), 0.5)?;
    let err = PI / 4.0 - (r as f64 / 8.0) * (2.0 * PI / r as f64).sin();
    Ok((p, err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{volume, MeasureMethod};
    use crate::numeric::ols;

    #[test]
    fn constants_examples() {
        let t = constants(0.5, 2, DEFAULT_APPROX_A).unwrap();
        assert!((t.c2 - 0.632_121).abs() < 1e-6);
        assert!((t.beta_d - PI).abs() < 1e-12);
        assert!((t.alpha - 0.184_535).abs() < 1e-6);
        assert!(t.alpha > 0.0 && t.alpha < 1.0 && t.c2 > 0.0 && t.c2 < 1.0);
        assert!(t.c3 > 0.0 && t.ln_c1 > 0.0);
        let expect_c3 = (1.0 + (1.0 + 1.5f64.exp()) * 8.0) * 2.0 / (1.0 - (-1f64).exp());
        assert!((t.c3 - expect_c3).abs() < 1e-9);
    }

    #[test]
    fn hellinger_examples() {
        assert_eq!(hellinger_sq(0.0, 1.0).unwrap(), 0.0);
        assert!((hellinger_sq(0.5, 1.0).unwrap() - 0.117_503).abs() < 1e-6);
        assert!(hellinger_sq(1.5, 1.0).is_err());
        for sigma in [0.25, 0.5, 1.0, 2.0] {
            let aff = gaussian_affinity(sigma).unwrap();
            assert!((aff - (-1.0 / (8.0 * sigma * sigma)).exp()).abs() < 1e-8);
            for h in [0.0, 0.1, 0.5, 1.0] {
                let a = hellinger_sq(h, sigma).unwrap();
                let b = hellinger_sq_numeric(h, sigma).unwrap();
                assert!((a - b).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn kl_identity_and_simulation() {
        let sq: ConvexBody = Polytope::planar(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
            .unwrap()
            .into();
        let half: ConvexBody = Polytope::planar(&[[0.0, 0.0], [0.5, 0.0], [0.5, 1.0], [0.0, 1.0]])
            .unwrap()
            .into();
        let budget = McBudget::new(1000, 1);
        assert_eq!(kl_divergence(&sq, &sq, 1.0, 100, budget).unwrap().kl, 0.0);
        let rep = kl_divergence(&sq, &half, 0.7, 100, budget).unwrap();
        assert!((rep.kl - 100.0 * 0.5 / (2.0 * 0.49)).abs() < 1e-9);
        assert!((rep.kl_printed * 2.0 - rep.kl).abs() < 1e-9);
        let (mean, se) = kl_per_observation_mc(&sq, &half, 0.7, 100_000, 3).unwrap();
        let per_obs = rep.kl / 100.0;
        assert!((mean - per_obs).abs() < 3.0 * se, "{mean} vs {per_obs} (se {se})");
    }

    #[test]
    fn simplex_family_d2() {
        let fam = build_thm2_family(4, 2, None).unwrap();
        assert_eq!(fam.members.len(), 4);
        for (k, a) in fam.members.iter().enumerate() {
            let v = volume(a, McBudget::new(1, 0)).unwrap();
            assert_eq!(v.method, MeasureMethod::Exact2d);
            assert!((v.value - 0.1).abs() < 1e-12);
            assert!(a.inside_unit_cube());
            for b in &fam.members[k + 1..] {
                let dist = nikodym_distance(a, b, McBudget::new(1, 0)).unwrap();
                assert!((dist.value - 0.2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn simplex_default_h_is_infeasible_in_d3() {
        assert!(build_thm2_family(4, 3, None).is_err());
        let fam = build_thm2_family(4, 3, Some(0.05)).unwrap();
        let v = volume(&fam.members[0], McBudget::new(200_000, 2)).unwrap();
        assert!(v.brackets(0.025), "{v:?}");
    }

    #[test]
    fn cap_family_uncarved_is_the_ball() {
        let fam = build_thm4_family(2, 0.5, 1, &[]).unwrap();
        let body = &fam.members[0];
        let ball = ConvexBody::inscribed_ball(2);
        let mut rng = stream(4, 0, Role::Aux);
        for _ in 0..2000 {
            let x = Point::new(vec![rng.gen(), rng.gen()]);
            assert_eq!(body.contains(&x).unwrap(), ball.contains(&x).unwrap());
        }
    }

    #[test]
    fn cap_family_cap_flip_changes_volume_by_one_cap() {
        let eta = 0.5;
        let packing = cap_family_packing(2, eta, 3).unwrap();
        let cap = cap_volume(2, 0.5, eta * eta / 4.0).unwrap();
        let full = build_carved_ball(2, eta, &packing, &vec![true; packing.len()]).unwrap();
        let full_v = volume(&full, McBudget::new(1_000_000, 5)).unwrap();
        for j in [0, packing.len() - 1] {
            let mut omega = vec![true; packing.len()];
            omega[j] = false;
            let carved = build_carved_ball(2, eta, &packing, &omega).unwrap();
            assert!((carved.reference_volume().unwrap() + cap - full.reference_volume().unwrap()).abs() < 1e-12);
            let d = nikodym_distance(&full, &carved, McBudget::new(1_000_000, 6 + j as u64)).unwrap();
            assert!(d.brackets(cap), "{d:?} vs {cap}");
        }
        assert!(full_v.brackets(PI / 4.0));
    }

    #[test]
    fn cap_sandwich_2d_examples() {
        let r = verify_cap_sandwich_2d(6).unwrap();
        assert!((r.h - 0.022_646_518_4).abs() < 1e-9);
        assert!((r.lower - 0.011_962).abs() < 1e-6);
        assert!((r.upper - 0.143_547).abs() < 1e-6);
        assert!(r.holds);
        assert!(verify_cap_sandwich_2d(60).unwrap().holds);
        assert!(verify_cap_sandwich_2d(5).is_err());
    }

    #[test]
    fn cap_sandwich_general() {
        for d in 2..=4 {
            for eta in [0.1, 0.2, 0.4] {
                let (lo, v, hi) = cap_sandwich(d, eta).unwrap();
                assert!(lo <= v && v <= hi, "d={d} eta={eta}: {lo} {v} {hi}");
                let (plo, phi) = cap_sandwich_printed(d, eta);
                assert!(plo <= v && phi < v);
            }
        }
    }

    #[test]
    fn lower_bounds_examples() {
        let a = lower_bound_values(1000, 1.0, 2).unwrap();
        let b = lower_bound_values(2000, 1.0, 2).unwrap();
        assert!(a.thm2 > b.thm2 && a.thm4 > b.thm4 && b.thm2 > 0.0 && b.thm4 > 0.0);
        let expect_c9 = (1.0 - (-0.125f64).exp()) * 2.0 / (32.0 * 3.0);
        assert!((a.c9 - expect_c9).abs() < 1e-15 && a.c9 < 1.0);
        let big = lower_bound_values(1_000_000, 1.0, 2).unwrap();
        assert!((big.thm2 - alpha().powi(2) * 13.815_510_557_964_274 / 1e6).abs() < 1e-15);
    }

    #[test]
    fn disk_approximation() {
        let (_, e4) = polytopal_approx_disk(4).unwrap();
        assert!((e4 - 0.285_398).abs() < 1e-6);
        let rs = [8usize, 16, 32, 64, 128];
        let errs: Vec<f64> = rs.iter().map(|&r| polytopal_approx_disk(r).unwrap().1).collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]));
        let fit = ols(
            &rs.iter().map(|&r| (r as f64).ln()).collect::<Vec<_>>(),
            &errs.iter().map(|e| e.ln()).collect::<Vec<_>>(),
        )
        .unwrap();
        assert!((fit.slope + 2.0).abs() < 0.05);
        let (p, e) = polytopal_approx_disk(12).unwrap();
        let area = p.polygon().unwrap().area();
        assert!((PI / 4.0 - area - e).abs() < 1e-12);
        assert!(polytopal_approx_disk(2).is_err());
    }

    #[test]
    fn packing_bounds_are_ordered() {
        for d in [2, 3] {
            for eta in [0.5, 0.25, 0.125] {
                let (lo, hi) = packing_cardinality_bounds(d, eta);
                assert!(0.0 < lo && lo < hi);
            }
        }
    }
}
