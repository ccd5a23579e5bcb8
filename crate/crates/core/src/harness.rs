//! Monte Carlo risk studies, rate fits, deviation tails and their CSV/SVG
//! output.
//!
//! Risk is estimated at one configured truth, so a curve is a pointwise risk
//! `E_G |Ĝ △ G|`, not the supremum over a class.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adaptive::{select_r_hat, AdaptConfig};
use crate::bounds::constants;
use crate::error::{Error, Result};
use crate::estimator::{convex_rate_r, estimate_polytope, SearchConfig};
use crate::geometry::montecarlo::McBudget;
use crate::geometry::{nikodym_distance, ConvexBody, Polytope};
use crate::model::{generate_sample, ModelConfig, NoiseKind};
use crate::numeric::{mean_and_se, ols, LineFit, Z95};
use crate::rng::derive_seed;

/// Triangle with vertices (0.2, 0.2), (0.7, 0.2), (0.35, 0.8) and area 0.15
/// in `d = 2`; the inscribed ball of the unit cube otherwise.
pub fn reference_truth(d: usize) -> ConvexBody {
    if d == 2 {
        Polytope::planar(&[[0.2, 0.2], [0.7, 0.2], [0.35, 0.8]])
            .expect("fixed triangle")
            .into()
    } else {
        ConvexBody::inscribed_ball(d)
    }
}

/// How the vertex budget is chosen at each sample size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum RPolicy {
    Fixed {
        r: usize,
    },
    ConvexRate,
    Adaptive {
        #[serde(default)]
        r_max: Option<usize>,
    },
}

/// How the grid resolution `m` is chosen at each sample size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum GridPolicy {
    Fixed {
        m: usize,
    },
    /// `min(n, cap)`.
    Capped {
        cap: usize,
    },
    /// `⌈ratio · n⌉`.
    Scaled {
        ratio: f64,
    },
}

impl Default for GridPolicy {
    fn default() -> Self {
        GridPolicy::Capped { cap: 64 }
    }
}

impl GridPolicy {
    pub fn resolution(&self, n: usize) -> usize {
        match *self {
            GridPolicy::Fixed { m } => m,
            GridPolicy::Capped { cap } => n.min(cap).max(1),
            GridPolicy::Scaled { ratio } => ((ratio * n as f64).ceil() as usize).max(1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub dim: usize,
    pub sigma: f64,
    #[serde(default)]
    pub noise: NoiseKind,
    pub truth: ConvexBody,
    pub ns: Vec<usize>,
    pub replicates: usize,
    pub r_policy: RPolicy,
    #[serde(default)]
    pub grid: GridPolicy,
    #[serde(default)]
    pub search: SearchConfig,
    pub seed: u64,
    #[serde(default = "default_mc")]
    pub mc_samples: usize,
}

fn default_mc() -> usize {
    McBudget::STUDY
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ns.is_empty() {
            return Err(Error::invalid("the n grid is empty"));
        }
        if self.ns.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("the n grid must be strictly increasing"));
        }
        if self.ns[0] < 2 {
            return Err(Error::invalid("sample sizes must be >= 2"));
        }
        if self.replicates == 0 {
            return Err(Error::invalid("replicates must be >= 1"));
        }
        if let RPolicy::Fixed { r } = self.r_policy {
            if r < self.dim + 1 {
                return Err(Error::invalid(format!("r = {r} is below d + 1 = {}", self.dim + 1)));
            }
        }
        if let GridPolicy::Scaled { ratio } = self.grid {
            if !(ratio.is_finite() && ratio > 0.0) {
                return Err(Error::invalid("grid ratio must be > 0"));
            }
        }
        self.model(self.ns[0], 0).validate()
    }

    fn model(&self, n: usize, seed: u64) -> ModelConfig {
        ModelConfig {
            dim: self.dim,
            n,
            truth: self.truth.clone(),
            sigma: self.sigma,
            noise: self.noise,
            seed,
        }
    }
}

/// One replicate of a study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateOutcome {
    pub n: usize,
    pub index: usize,
    pub r: usize,
    pub m: usize,
    pub loss: f64,
    pub loss_half_width: f64,
}

/// Sample, fit and score replicate `index` at size `n`. Every random input
/// is keyed by `(seed, n, index)`, so replicates are independent of
/// scheduling.
pub fn run_replicate(cfg: &StudyConfig, n: usize, index: usize) -> Result<ReplicateOutcome> {
    let key = [n as u64, index as u64];
    let sample = generate_sample(&cfg.model(n, derive_seed(cfg.seed, &[key[0], key[1], 0])))?;
    let m = cfg.grid.resolution(n);
    let search = SearchConfig {
        seed: derive_seed(cfg.seed, &[key[0], key[1], 1]),
        ..cfg.search.clone()
    };
    let (r, fit) = match &cfg.r_policy {
        RPolicy::Fixed { r } => (*r, estimate_polytope(&sample, *r, m, &search)?),
        RPolicy::ConvexRate => {
            let r = convex_rate_r(n, cfg.dim)?;
            (r, estimate_polytope(&sample, r, m, &search)?)
        }
        RPolicy::Adaptive { r_max } => {
            let adapt = AdaptConfig {
                sigma: cfg.sigma,
                r_max: *r_max,
                m,
                search: search.clone(),
                seed: search.seed,
                mc_samples: cfg.mc_samples,
            };
            let res = select_r_hat(&sample, &adapt)?;
            (res.r_hat, res.selected().clone())
        }
    };
    let est: ConvexBody = fit.estimate.base().clone().into();
    let loss = nikodym_distance(
        &cfg.truth,
        &est,
        McBudget::new(cfg.mc_samples, derive_seed(cfg.seed, &[key[0], key[1], 2])),
    )?;
    Ok(ReplicateOutcome {
        n,
        index,
        r,
        m,
        loss: loss.value,
        loss_half_width: loss.half_width,
    })
}

/// All replicates at size `n`, in index order.
pub fn run_replicates(cfg: &StudyConfig, n: usize) -> Result<Vec<ReplicateOutcome>> {
    (0..cfg.replicates)
        .into_par_iter()
        .map(|k| run_replicate(cfg, n, k).map_err(|e| Error::invalid(format!("replicate {k} at n = {n}: {e}"))))
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateTransform {
    LogN,
    #[default]
    LogNOverLnN,
}

impl RateTransform {
    pub fn apply(self, n: usize) -> f64 {
        let nf = n as f64;
        match self {
            RateTransform::LogN => nf.ln(),
            RateTransform::LogNOverLnN => (nf / nf.ln()).ln(),
        }
    }

    fn label(self) -> &'static str {
        match self {
            RateTransform::LogN => "log n",
            RateTransform::LogNOverLnN => "log(n / ln n)",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskRow {
    pub n: usize,
    pub mean: f64,
    pub ci: f64,
    pub replicates: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskCurve {
    pub rows: Vec<RiskRow>,
    pub transform: RateTransform,
    pub fit: Option<LineFit>,
}

impl RiskCurve {
    pub fn from_losses(groups: &[(usize, Vec<f64>)], transform: RateTransform) -> Self {
        let rows = groups
            .iter()
            .map(|(n, losses)| {
                let (mean, se) = mean_and_se(losses);
                RiskRow {
                    n: *n,
                    mean,
                    ci: Z95 * se,
                    replicates: losses.len(),
                }
            })
            .collect();
        let mut curve = RiskCurve {
            rows,
            transform,
            fit: None,
        };
        curve.fit = fit_rate(&curve, transform).ok();
        curve
    }
}

pub fn run_risk_study(cfg: &StudyConfig) -> Result<RiskCurve> {
    cfg.validate()?;
    let groups = cfg
        .ns
        .iter()
        .map(|&n| run_replicates(cfg, n).map(|reps| (n, reps.into_iter().map(|o| o.loss).collect())))
        .collect::<Result<Vec<(usize, Vec<f64>)>>>()?;
    Ok(RiskCurve::from_losses(&groups, RateTransform::default()))
}

/// Least squares of `log mean` on the transformed `n`, over rows with a
/// positive mean.
pub fn fit_rate(curve: &RiskCurve, transform: RateTransform) -> Result<LineFit> {
    let usable: Vec<&RiskRow> = curve.rows.iter().filter(|r| r.mean > 0.0).collect();
    if usable.len() < 3 {
        return Err(Error::invalid(format!(
            "rate fit needs >= 3 rows with positive mean, found {}",
            usable.len()
        )));
    }
    let xs: Vec<f64> = usable.iter().map(|r| transform.apply(r.n)).collect();
    let ys: Vec<f64> = usable.iter().map(|r| r.mean.ln()).collect();
    ols(&xs, &ys).ok_or_else(|| Error::invalid("degenerate abscissae in rate fit"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub x: f64,
    pub survival: f64,
    pub se: f64,
    /// `ln(C₁) - C₂ x`; the bound itself overflows for moderate `x`.
    pub ln_bound: f64,
    pub dominated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailTable {
    pub n: usize,
    pub r: usize,
    pub replicates: usize,
    /// `2 d r ln n / (C₂ n)`.
    pub centering: f64,
    pub scaled_losses: Vec<f64>,
    pub rows: Vec<TailRow>,
}

impl TailTable {
    pub fn all_dominated(&self) -> bool {
        self.rows.iter().all(|r| r.dominated)
    }
}

/// Empirical survival of `n (|P̂ △ P| - 2 d r ln n / (C₂ n))` at the largest
/// `n` of the study, against `C₁ exp(-C₂ x)`.
pub fn tail_study(cfg: &StudyConfig, r: usize, xs: &[f64]) -> Result<TailTable> {
    let cfg = StudyConfig {
        r_policy: RPolicy::Fixed { r },
        ..cfg.clone()
    };
    cfg.validate()?;
    let n = *cfg.ns.last().expect("validated non-empty");
    let consts = constants(cfg.sigma, cfg.dim, crate::bounds::DEFAULT_APPROX_A)?;
    let nf = n as f64;
    let centering = 2.0 * cfg.dim as f64 * r as f64 * nf.ln() / (consts.c2 * nf);
    let reps = run_replicates(&cfg, n)?;
    let scaled: Vec<f64> = reps.iter().map(|o| nf * (o.loss - centering)).collect();
    Ok(survival_table(n, r, centering, scaled, xs, consts.ln_c1, consts.c2))
}

pub fn survival_table(
    n: usize,
    r: usize,
    centering: f64,
    scaled_losses: Vec<f64>,
    xs: &[f64],
    ln_c1: f64,
    c2: f64,
) -> TailTable {
    let total = scaled_losses.len() as f64;
    let rows = xs
        .iter()
        .map(|&x| {
            let s = scaled_losses.iter().filter(|&&v| v >= x).count() as f64 / total;
            let se = (s * (1.0 - s) / total).sqrt();
            let ln_bound = ln_c1 - c2 * x;
            // beyond e^700 the bound exceeds any probability
            let dominated = ln_bound > 700.0 || s <= ln_bound.exp() + 3.0 * se;
            TailRow {
                x,
                survival: s,
                se,
                ln_bound,
                dominated,
            }
        })
        .collect();
    TailTable {
        n,
        r,
        replicates: scaled_losses.len(),
        centering,
        scaled_losses,
        rows,
    }
}

/// Tabular values with a fixed header, for [`emit_csv`].
pub trait CsvTable {
    fn header(&self) -> Vec<&'static str>;
    fn records(&self) -> Vec<Vec<String>>;
}

impl CsvTable for RiskCurve {
    fn header(&self) -> Vec<&'static str> {
        vec!["n", "mean", "ci", "replicates"]
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    r.mean.to_string(),
                    r.ci.to_string(),
                    r.replicates.to_string(),
                ]
            })
            .collect()
    }
}

impl CsvTable for TailTable {
    fn header(&self) -> Vec<&'static str> {
        vec!["x", "survival", "se", "ln_bound", "dominated"]
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.x.to_string(),
                    r.survival.to_string(),
                    r.se.to_string(),
                    r.ln_bound.to_string(),
                    r.dominated.to_string(),
                ]
            })
            .collect()
    }
}

/// Rows of `(r, error)` from a polygon approximation sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxSweep {
    pub rows: Vec<(usize, f64)>,
    pub fit: Option<LineFit>,
}

impl CsvTable for ApproxSweep {
    fn header(&self) -> Vec<&'static str> {
        vec!["r", "error"]
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|(r, e)| vec![r.to_string(), e.to_string()])
            .collect()
    }
}

pub fn approx_sweep(rs: &[usize]) -> Result<ApproxSweep> {
    let rows = rs
        .iter()
        .map(|&r| crate::bounds::polytopal_approx_disk(r).map(|(_, e)| (r, e)))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|(r, _)| (*r as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|(_, e)| e.ln()).collect();
    Ok(ApproxSweep {
        fit: ols(&xs, &ys),
        rows,
    })
}

fn render_csv<T: CsvTable>(table: &T) -> Result<Vec<u8>> {
    let records = table.records();
    if records.is_empty() {
        return Err(Error::invalid("nothing to write: the table has no rows"));
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::invalid(format!("csv: {e}"));
    w.write_record(table.header()).map_err(to_err)?;
    for rec in records {
        w.write_record(&rec).map_err(to_err)?;
    }
    w.into_inner().map_err(|e| Error::invalid(format!("csv: {e}")))
}

/// Writes a header row and one line per record. An empty table is an error
/// and leaves no file behind.
pub fn emit_csv<T: CsvTable>(table: &T, path: &Path) -> Result<()> {
    let bytes = render_csv(table)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Log-log scatter of the risk curve with its fitted line.
pub fn render_svg(curve: &RiskCurve) -> Result<String> {
    let pts: Vec<(f64, f64)> = curve
        .rows
        .iter()
        .filter(|r| r.mean > 0.0)
        .map(|r| (curve.transform.apply(r.n), r.mean.ln()))
        .collect();
    if pts.is_empty() {
        return Err(Error::invalid("nothing to plot: no row has a positive mean"));
    }
    let (w, h, pad) = (640.0, 420.0, 60.0);
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if let Some(f) = &curve.fit {
        for x in [x0, x1] {
            let y = f.intercept + f.slope * x;
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
    }
    let (dx, dy) = ((x1 - x0).max(1e-9), (y1 - y0).max(1e-9));
    let sx = |x: f64| pad + (x - x0) / dx * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / dy * (h - 2.0 * pad);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    for &(x, y) in &pts {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="steelblue"/>"#,
            sx(x),
            sy(y)
        );
    }
    if let Some(f) = &curve.fit {
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="firebrick" stroke-width="1.5"/>"#,
            sx(x0),
            sy(f.intercept + f.slope * x0),
            sx(x1),
            sy(f.intercept + f.slope * x1)
        );
        let _ = writeln!(
            s,
            r#"<text x="{pad}" y="{:.0}" font-family="sans-serif" font-size="14">slope {:.3}, intercept {:.3}, R² {:.3}</text>"#,
            pad - 20.0,
            f.slope,
            f.intercept,
            f.r2
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.0}" y="{:.0}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        w / 2.0,
        h - 20.0,
        curve.transform.label()
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.0}" font-family="sans-serif" font-size="13" transform="rotate(-90 18 {:.0})" text-anchor="middle">log mean loss</text>"#,
        h / 2.0,
        h / 2.0
    );
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg_plot(curve: &RiskCurve, path: &Path) -> Result<()> {
    let svg = render_svg(curve)?;
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}
