//! Command line front end. Every subcommand writes its result to `--out`, or
//! to stdout when `--out` is absent.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::adaptive::{select_r_hat, AdaptConfig};
use crate::error::{Error, Result};
use crate::estimator::{default_resolution, estimate_polytope, AnnealParams, SearchConfig, Strategy};
use crate::geometry::montecarlo::McBudget;
use crate::geometry::ConvexBody;
use crate::harness::{
    approx_sweep, emit_csv, emit_svg_plot, fit_rate, reference_truth, run_risk_study, tail_study, RateTransform,
    StudyConfig,
};
use crate::model::{generate_sample, read_sample, write_sample, write_sample_to, ModelConfig, NoiseKind};
use crate::verify::{run_all, VerifyOptions};

#[derive(Parser, Debug)]
#[command(
    name = "polyest",
    version,
    about = "Least-squares polytope estimation from noisy indicator data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NoiseArg {
    Gaussian,
    Rademacher,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Exact,
    Anneal,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TransformArg {
    LogN,
    LogNOverLnN,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a sample from the regression model.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 0.5)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = NoiseArg::Gaussian)]
        noise: NoiseArg,
        /// JSON file holding the true body; defaults to a fixed triangle in
        /// d = 2 and the inscribed ball otherwise.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the grid least-squares polytope to a sample file.
    Estimate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        r: usize,
        /// Grid resolution; defaults to min(n, 64).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_enum, default_value_t = StrategyArg::Anneal)]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Choose the vertex budget from the data.
    Adapt {
        #[arg(long)]
        data: PathBuf,
        /// Noise level; defaults to the one recorded in the sample file.
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        r_max: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo risk curve from a JSON study configuration.
    RiskStudy {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = TransformArg::LogNOverLnN)]
        transform: TransformArg,
        /// CSV of (n, mean, ci, replicates).
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Full curve with its fit as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Empirical deviation tail at the largest n of a study configuration.
    TailStudy {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        r: usize,
        /// Comma separated thresholds.
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run every numerical check on constants, lemmas and constructions.
    VerifyBounds {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = McBudget::VERIFY)]
        mc_samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Disk approximation error by inscribed polygons.
    ApproxStudy {
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128")]
        r: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses `argv` (program name first) and runs the subcommand. Returns the
/// process exit code: 0 on success, 1 when a check fails or a file cannot be
/// accessed, 2 on usage or validation errors.
pub fn cli_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io { .. } => 1,
                _ => 2,
            }
        }
    }
}

fn emit(out: Option<&Path>, body: &[u8]) -> Result<()> {
    match out {
        Some(p) => fs::write(p, body).map_err(|e| Error::io(p, e)),
        None => std::io::stdout().write_all(body).map_err(|e| Error::io("<stdout>", e)),
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    emit(out, s.as_bytes())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn run(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Gen {
            n,
            d,
            sigma,
            seed,
            noise,
            truth,
            out,
        } => {
            let truth: ConvexBody = match truth {
                Some(p) => read_json(&p)?,
                None => reference_truth(d),
            };
            let cfg = ModelConfig {
                dim: d,
                n,
                truth,
                sigma,
                noise: match noise {
                    NoiseArg::Gaussian => NoiseKind::Gaussian,
                    NoiseArg::Rademacher => NoiseKind::ScaledRademacher,
                },
                seed,
            };
            let sample = generate_sample(&cfg)?;
            match out {
                Some(p) => write_sample(&sample, &p)?,
                None => write_sample_to(&sample, std::io::stdout().lock()).map_err(|e| Error::io("<stdout>", e))?,
            }
            Ok(0)
        }
        Command::Estimate {
            data,
            r,
            m,
            strategy,
            seed,
            steps,
            restarts,
            out,
        } => {
            let sample = read_sample(&data)?;
            let m = m.unwrap_or_else(|| default_resolution(sample.len()));
            let mut anneal = AnnealParams {
                steps,
                ..AnnealParams::default()
            };
            if let Some(k) = restarts {
                anneal.restarts = k;
            }
            let cfg = SearchConfig {
                strategy: match strategy {
                    StrategyArg::Exact => Strategy::Exact,
                    StrategyArg::Anneal => Strategy::Anneal,
                },
                anneal,
                seed,
                ..SearchConfig::default()
            };
            let fit = estimate_polytope(&sample, r, m, &cfg)?;
            emit_json(out.as_deref(), &fit)?;
            Ok(0)
        }
        Command::Adapt {
            data,
            sigma,
            m,
            r_max,
            seed,
            out,
        } => {
            let sample = read_sample(&data)?;
            let sigma = sigma.unwrap_or(sample.config.sigma);
            let mut cfg = AdaptConfig::new(sigma, m.unwrap_or_else(|| default_resolution(sample.len())), seed);
            cfg.r_max = r_max;
            cfg.search.seed = seed;
            let res = select_r_hat(&sample, &cfg)?;
            emit_json(out.as_deref(), &res)?;
            Ok(0)
        }
        Command::RiskStudy {
            config,
            transform,
            out,
            svg,
            json,
        } => {
            let cfg: StudyConfig = read_json(&config)?;
            let mut curve = run_risk_study(&cfg)?;
            curve.transform = match transform {
                TransformArg::LogN => RateTransform::LogN,
                TransformArg::LogNOverLnN => RateTransform::LogNOverLnN,
            };
            curve.fit = fit_rate(&curve, curve.transform).ok();
            emit_csv(&curve, &out)?;
            if let Some(p) = svg {
                emit_svg_plot(&curve, &p)?;
            }
            if let Some(p) = json {
                emit_json(Some(&p), &curve)?;
            }
            Ok(0)
        }
        Command::TailStudy {
            config,
            r,
            x,
            out,
            json,
        } => {
            let cfg: StudyConfig = read_json(&config)?;
            let table = tail_study(&cfg, r, &x)?;
            emit_csv(&table, &out)?;
            if let Some(p) = json {
                emit_json(Some(&p), &table)?;
            }
            Ok(if table.all_dominated() { 0 } else { 1 })
        }
        Command::VerifyBounds { seed, mc_samples, out } => {
            let records = run_all(VerifyOptions { mc_samples, seed })?;
            let failed: Vec<&str> = records.iter().filter(|r| !r.pass).map(|r| r.check.as_str()).collect();
            emit_json(out.as_deref(), &records)?;
            if failed.is_empty() {
                Ok(0)
            } else {
                eprintln!("failed checks: {}", failed.join(", "));
                Ok(1)
            }
        }
        Command::ApproxStudy { r, out } => {
            let sweep = approx_sweep(&r)?;
            emit_csv(&sweep, &out)?;
            if let Some(f) = sweep.fit {
                eprintln!("slope {:.4} (R² {:.4})", f.slope, f.r2);
            }
            Ok(0)
        }
    }
}
