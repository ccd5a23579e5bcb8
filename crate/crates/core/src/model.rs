//! Data generation for `Y = I(X ∈ G) + ξ` with uniform design on `[0,1]^d`,
//! and the CSV dataset format.
//!
//! File layout: a first line `# polyest-sample <config json>`, a header
//! `x1,...,xd,y`, then one row per observation with `.` decimals. Floats are
//! written in shortest round-trip form, so read-after-write is bit exact.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Point};
use crate::rng::{stream, Role};

const MAGIC: &str = "# polyest-sample ";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    #[default]
    Gaussian,
    /// `σ · (±1)` with equal probability.
    ScaledRademacher,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub dim: usize,
    pub n: usize,
    pub truth: ConvexBody,
    pub sigma: f64,
    #[serde(default)]
    pub noise: NoiseKind,
    pub seed: u64,
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::invalid(format!("dimension {} < 2", self.dim)));
        }
        if self.n == 0 {
            return Err(Error::invalid("sample size must be >= 1"));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::invalid(format!("sigma = {} must be > 0", self.sigma)));
        }
        if self.truth.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: self.truth.dim(),
            });
        }
        self.truth.validate()?;
        if !self.truth.inside_unit_cube() {
            return Err(Error::invalid("the true set must lie inside [0,1]^d"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub x: Point,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub config: ModelConfig,
    pub rows: Vec<Observation>,
}

impl Sample {
    pub fn dim(&self) -> usize {
        self.config.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Draws `n` observations. Design points and noise come from separate keyed
/// streams of `cfg.seed`, so the same config always yields the same sample.
pub fn generate_sample(cfg: &ModelConfig) -> Result<Sample> {
    cfg.validate()?;
    let mut design = stream(cfg.seed, 0, Role::Design);
    let mut noise = stream(cfg.seed, 0, Role::Noise);
    let truth = cfg.truth.prepare();
    let rows = (0..cfg.n)
        .map(|_| {
            let x: Vec<f64> = (0..cfg.dim).map(|_| design.gen::<f64>()).collect();
            let xi = match cfg.noise {
                NoiseKind::Gaussian => cfg.sigma * noise.sample::<f64, _>(StandardNormal),
                NoiseKind::ScaledRademacher => {
                    if noise.gen::<bool>() {
                        cfg.sigma
                    } else {
                        -cfg.sigma
                    }
                }
            };
            let inside = if truth.contains(&x) { 1.0 } else { 0.0 };
            Observation {
                x: Point::new(x),
                y: inside + xi,
            }
        })
        .collect();
    Ok(Sample {
        config: cfg.clone(),
        rows,
    })
}

/// Draws `count` noise values with the configured law (used to audit the
/// sub-Gaussian moment bound).
pub fn draw_noise(kind: NoiseKind, sigma: f64, count: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed, 0, Role::Noise);
    (0..count)
        .map(|_| match kind {
            NoiseKind::Gaussian => sigma * rng.sample::<f64, _>(StandardNormal),
            NoiseKind::ScaledRademacher => {
                if rng.gen::<bool>() {
                    sigma
                } else {
                    -sigma
                }
            }
        })
        .collect()
}

pub fn write_sample(s: &Sample, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_sample_to(s, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

/// Same layout as [`write_sample`], to any writer.
pub fn write_sample_to<W: Write>(s: &Sample, mut out: W) -> std::io::Result<()> {
    let meta = serde_json::to_string(&s.config)?;
    writeln!(out, "{MAGIC}{meta}")?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let d = s.dim();
    let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    header.push("y".into());
    w.write_record(&header)?;
    for row in &s.rows {
        let mut rec: Vec<String> = row.x.coords().iter().map(|c| c.to_string()).collect();
        rec.push(row.y.to_string());
        w.write_record(&rec)?;
    }
    w.flush()
}

pub fn read_sample(path: &Path) -> Result<Sample> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut first = String::new();
    reader.read_line(&mut first).map_err(|e| Error::io(path, e))?;
    let meta = first.trim_end().strip_prefix(MAGIC).ok_or_else(|| Error::Parse {
        line: 1,
        msg: format!("expected a `{}` metadata line", MAGIC.trim_end()),
    })?;
    let config: ModelConfig = serde_json::from_str(meta).map_err(|e| Error::Parse {
        line: 1,
        msg: format!("metadata: {e}"),
    })?;
    let d = config.dim;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut rows = Vec::new();
    let mut saw_header = false;
    for (i, rec) in rdr.records().enumerate() {
        // csv line numbers start at 1 for the reader's own first line
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(line, |p| p.line() + 1),
            msg: e.to_string(),
        })?;
        let line = rec.position().map_or(line, |p| p.line() + 1);
        if rec.len() != d + 1 {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} columns, found {}", d + 1, rec.len()),
            });
        }
        if !saw_header {
            let expected: Vec<String> = (1..=d)
                .map(|i| format!("x{i}"))
                .chain(std::iter::once("y".to_string()))
                .collect();
            if rec.iter().ne(expected.iter().map(String::as_str)) {
                return Err(Error::Parse {
                    line,
                    msg: format!("header must be {}", expected.join(",")),
                });
            }
            saw_header = true;
            continue;
        }
        let mut vals = Vec::with_capacity(d + 1);
        for field in rec.iter() {
            let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                line,
                msg: format!("not a number: {field:?}"),
            })?;
            vals.push(v);
        }
        let y = vals.pop().expect("d + 1 fields");
        rows.push(Observation { x: Point::new(vals), y });
    }
    if !saw_header {
        return Err(Error::Parse {
            line: 2,
            msg: "missing header".into(),
        });
    }
    if rows.len() != config.n {
        return Err(Error::Parse {
            line: rows.len() as u64 + 2,
            msg: format!("metadata says n = {} but found {} rows", config.n, rows.len()),
        });
    }
    Ok(Sample { config, rows })
}
