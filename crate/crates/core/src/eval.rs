//! Structure-preservation metrics and the ratio sweep harness.

use log::warn;
use rayon::prelude::*;

use crate::diffusion::{diffusion_distances, laplacian_spectrum};
use crate::diversity::{magnitude_value, Measure};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pool::{pool, random_pool_with, PoolingConfig, TieBreak};

/// `‖λ[..K] − λ′[..K]‖₂` over the `K = |X′|` smallest normalized-Laplacian
/// eigenvalues of each graph, both ascending.
pub fn spectral_distance(g: &Graph, pooled: &Graph) -> Result<f64> {
    if pooled.node_count() > g.node_count() {
        return Err(Error::InvalidParams(format!(
            "pooled graph has {} nodes, original only {}",
            pooled.node_count(),
            g.node_count()
        )));
    }
    let a = laplacian_spectrum(g)?;
    let b = laplacian_spectrum(pooled)?;
    Ok(a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// `|Mag(G) − Mag(G′)| / Mag(G)` with both magnitudes over diffusion distances.
pub fn relative_magnitude_difference(g: &Graph, pooled: &Graph, t: f64) -> Result<f64> {
    let original = magnitude_value(&diffusion_distances(g)?, t)?;
    if original.is_nan() || original <= 0.0 {
        return Err(Error::InvalidParams("magnitude of the original graph is zero".into()));
    }
    let reduced = magnitude_value(&diffusion_distances(pooled)?, t)?;
    Ok((original - reduced).abs() / original)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PoolMethod {
    Magnitude,
    Spread,
    Random,
}

impl PoolMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            PoolMethod::Magnitude => "mag",
            PoolMethod::Spread => "spread",
            PoolMethod::Random => "random",
        }
    }
}

impl std::fmt::Display for PoolMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PoolMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mag" | "magnitude" => Ok(PoolMethod::Magnitude),
            "spread" => Ok(PoolMethod::Spread),
            "random" => Ok(PoolMethod::Random),
            other => Err(Error::InvalidParams(format!("unknown pooling method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreservationReport {
    pub graph_id: usize,
    pub ratio: f64,
    pub method: PoolMethod,
    pub spectral_distance: f64,
    pub relative_mag_diff: f64,
}

/// Pools `g` with `method` and measures how much structure survived.
pub fn evaluate(g: &Graph, graph_id: usize, method: PoolMethod, cfg: &PoolingConfig) -> Result<PreservationReport> {
    let result = match method {
        PoolMethod::Magnitude | PoolMethod::Spread => {
            let measure = if method == PoolMethod::Magnitude {
                Measure::Magnitude
            } else {
                Measure::Spread
            };
            pool(g, None, &PoolingConfig { measure, ..cfg.clone() })?
        }
        PoolMethod::Random => random_pool_with(g, None, cfg)?,
    };
    Ok(PreservationReport {
        graph_id,
        ratio: cfg.ratio,
        method,
        spectral_distance: spectral_distance(g, &result.pooled)?,
        relative_mag_diff: relative_magnitude_difference(g, &result.pooled, cfg.scale)?,
    })
}

/// Mean, sample standard deviation and linearly interpolated quantiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub q10: f64,
    pub q25: f64,
    pub q75: f64,
    pub q90: f64,
}

impl Summary {
    /// `None` for an empty sample.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Some(Self {
            mean,
            std,
            q10: quantile(&sorted, 0.10),
            q25: quantile(&sorted, 0.25),
            q75: quantile(&sorted, 0.75),
            q90: quantile(&sorted, 0.90),
        })
    }
}

/// Quantile of ascending `sorted` by linear interpolation between the order
/// statistics at positions `q·(n − 1)`.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub ratio: f64,
    pub method: PoolMethod,
    pub count: usize,
    pub failures: usize,
    pub relative_mag_diff: Option<Summary>,
    pub spectral_distance: Option<Summary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub graph_id: usize,
    pub ratio: f64,
    pub method: PoolMethod,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Ordered by ratio, then method, then graph.
    pub reports: Vec<PreservationReport>,
    pub summaries: Vec<SweepSummary>,
    pub failures: Vec<SweepFailure>,
}

/// Pools every graph at every ratio with every method. Graph `i` uses seed
/// `seed + i` for both tie-breaking and the random baseline; `cfg.tie_break`
/// set to lexicographic keeps lexicographic ties for the guided methods.
/// Failed runs are logged, excluded from the aggregates and counted.
pub fn ratio_sweep(
    graphs: &[Graph],
    ratios: &[f64],
    methods: &[PoolMethod],
    cfg: &PoolingConfig,
    seed: u64,
) -> Result<SweepResult> {
    for &r in ratios {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::InvalidParams(format!("ratio {r} outside (0, 1]")));
        }
    }
    let jobs: Vec<(f64, PoolMethod, usize)> = ratios
        .iter()
        .flat_map(|&r| methods.iter().flat_map(move |&m| (0..graphs.len()).map(move |i| (r, m, i))))
        .collect();
    let outcomes: Vec<Result<PreservationReport>> = jobs
        .par_iter()
        .map(|&(ratio, method, i)| {
            let graph_seed = seed.wrapping_add(i as u64);
            let tie_break = match (method, cfg.tie_break) {
                (PoolMethod::Random, _) | (_, TieBreak::Seeded(_)) => TieBreak::Seeded(graph_seed),
                (_, TieBreak::Lexicographic) => TieBreak::Lexicographic,
            };
            let run_cfg = PoolingConfig {
                ratio,
                tie_break,
                record_diversity: false,
                ..cfg.clone()
            };
            evaluate(&graphs[i], i, method, &run_cfg)
        })
        .collect();

    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (&(ratio, method, graph_id), outcome) in jobs.iter().zip(outcomes) {
        match outcome {
            Ok(r) => reports.push(r),
            Err(error) => {
                warn!("graph {graph_id} at ratio {ratio} with {method}: {error}");
                failures.push(SweepFailure {
                    graph_id,
                    ratio,
                    method,
                    error,
                });
            }
        }
    }
    let summaries = ratios
        .iter()
        .flat_map(|&ratio| methods.iter().map(move |&method| (ratio, method)))
        .map(|(ratio, method)| {
            let rows: Vec<&PreservationReport> = reports
                .iter()
                .filter(|r| r.ratio == ratio && r.method == method)
                .collect();
            let mag: Vec<f64> = rows.iter().map(|r| r.relative_mag_diff).collect();
            let spec: Vec<f64> = rows.iter().map(|r| r.spectral_distance).collect();
            SweepSummary {
                ratio,
                method,
                count: rows.len(),
                failures: failures
                    .iter()
                    .filter(|f| f.ratio == ratio && f.method == method)
                    .count(),
                relative_mag_diff: Summary::of(&mag),
                spectral_distance: Summary::of(&spec),
            }
        })
        .collect();
    Ok(SweepResult {
        reports,
        summaries,
        failures,
    })
}
