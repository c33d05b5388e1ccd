//! Command-line surface. Exit codes: 0 success, 1 input error, 2 numerical
//! failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::diffusion::diffusion_distances;
use crate::diversity::{diversity_profile, magnitude_value, spread_value, Measure};
use crate::error::{Error, Result};
use crate::eval::{ratio_sweep, relative_magnitude_difference, spectral_distance, PoolMethod};
use crate::graph::{Aggregation, Graph};
use crate::io::{self, GeneratorSpec, GraphKind};
use crate::pool::{pool, MetricMode, PoolingConfig, TieBreak};

#[derive(Debug, Parser)]
#[command(name = "magpool", version, about = "Diversity-guided edge-contraction graph pooling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pool one graph and write the result document.
    Pool {
        /// Graph file, or `gen:KIND:key=value,...`.
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = 0.5)]
        ratio: f64,
        #[arg(long, value_enum, default_value_t = MeasureArg::Spread)]
        measure: MeasureArg,
        /// Defaults to exact up to 200 nodes, min-update above.
        #[arg(long, value_enum)]
        metric: Option<MetricArg>,
        #[arg(long, value_enum, default_value_t = AggArg::Mean)]
        agg: AggArg,
        /// `seed:N` or `lex`.
        #[arg(long, default_value = "seed:0")]
        tiebreak: String,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Magnitude and spread of one graph.
    Diversity {
        #[arg(long)]
        input: String,
        #[arg(long, value_enum, default_value_t = DiversityArg::Both)]
        measure: DiversityArg,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// `T1:T2:STEPS`, evenly spaced scales from T1 to T2.
        #[arg(long)]
        profile: Option<String>,
    },
    /// Spectral distance and relative magnitude difference of a pooling.
    Eval {
        #[arg(long)]
        original: String,
        /// Pooled graph file or result document.
        #[arg(long)]
        pooled: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Ratio sweep over a TUDataset directory.
    Sweep {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.125,0.25,0.5,0.75")]
        ratios: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "mag,spread,random")]
        methods: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Write a synthetic graph.
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m1: Option<usize>,
        #[arg(long)]
        m2: Option<usize>,
        #[arg(long)]
        bridge: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MeasureArg {
    Mag,
    Spread,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DiversityArg {
    Mag,
    Spread,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MetricArg {
    Exact,
    Minupdate,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AggArg {
    Mean,
    Sum,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Ring,
    Path,
    Star,
    Barbell,
    ErdosRenyi,
    RandomGeometric,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Errors go to standard error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    match run(cli.command, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Pool {
            input,
            ratio,
            measure,
            metric,
            agg,
            tiebreak,
            scale,
            out: path,
        } => {
            let g = load_input(&input)?;
            let cfg = PoolingConfig {
                ratio,
                measure: match measure {
                    MeasureArg::Mag => Measure::Magnitude,
                    MeasureArg::Spread => Measure::Spread,
                },
                metric_mode: match metric {
                    None => MetricMode::default(),
                    Some(MetricArg::Exact) => MetricMode::Exact,
                    Some(MetricArg::Minupdate) => MetricMode::MinUpdate,
                },
                aggregation: match agg {
                    AggArg::Mean => Aggregation::Mean,
                    AggArg::Sum => Aggregation::Sum,
                },
                tie_break: tiebreak.parse::<TieBreak>()?,
                scale,
                ..PoolingConfig::default()
            };
            let result = pool(&g, g.features(), &cfg)?;
            emit(path.as_deref(), &io::format_result(&result), out)
        }
        Command::Diversity {
            input,
            measure,
            scale,
            profile,
        } => {
            let g = load_input(&input)?;
            let d = diffusion_distances(&g)?;
            let measures: &[Measure] = match measure {
                DiversityArg::Mag => &[Measure::Magnitude],
                DiversityArg::Spread => &[Measure::Spread],
                DiversityArg::Both => &[Measure::Magnitude, Measure::Spread],
            };
            let mut text = String::new();
            match profile {
                None => {
                    for &m in measures {
                        let value = match m {
                            Measure::Magnitude => magnitude_value(&d, scale)?,
                            Measure::Spread => spread_value(&d, scale)?,
                        };
                        text.push_str(&format!("{} {value}\n", m.as_str()));
                    }
                }
                Some(spec) => {
                    let grid = parse_profile(&spec)?;
                    for &m in measures {
                        for point in diversity_profile(&d, &grid, m)? {
                            let value = point.value?;
                            text.push_str(&format!("{} {} {value}\n", m.as_str(), point.scale));
                        }
                    }
                }
            }
            emit(None, &text, out)
        }
        Command::Eval {
            original,
            pooled,
            scale,
        } => {
            let g = load_input(&original)?;
            let p = io::read_graph(&pooled)?;
            let text = format!(
                "spectral_distance {}\nrelative_mag_diff {}\n",
                spectral_distance(&g, &p)?,
                relative_magnitude_difference(&g, &p, scale)?
            );
            emit(None, &text, out)
        }
        Command::Sweep {
            dataset,
            ratios,
            methods,
            out: path,
            seed,
            scale,
        } => {
            let name = io::detect_name(&dataset)?;
            let ds = io::load_tudataset(&dataset, &name)?;
            let methods = methods
                .iter()
                .map(|m| m.parse::<PoolMethod>())
                .collect::<Result<Vec<_>>>()?;
            let cfg = PoolingConfig {
                scale,
                ..PoolingConfig::default()
            };
            let result = ratio_sweep(&ds.graphs, &ratios, &methods, &cfg, seed)?;
            io::write_reports_file(&path, &result.reports)?;
            io::write_summaries(out, &result.summaries)
        }
        Command::Gen {
            kind,
            n,
            m1,
            m2,
            bridge,
            p,
            radius,
            seed,
            out: path,
        } => {
            let need_n = || n.ok_or_else(|| Error::InvalidParams("--n is required for this kind".into()));
            let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| Error::InvalidParams(format!("--{flag} is required for barbell")));
            let kind = match kind {
                KindArg::Ring => GraphKind::Ring { n: need_n()? },
                KindArg::Path => GraphKind::Path { n: need_n()? },
                KindArg::Star => GraphKind::Star { leaves: need_n()? },
                KindArg::Barbell => GraphKind::Barbell {
                    m1: need(m1, "m1")?,
                    m2: need(m2, "m2")?,
                    bridge: need(bridge, "bridge")?,
                },
                KindArg::ErdosRenyi => GraphKind::ErdosRenyi {
                    n: need_n()?,
                    p: p.ok_or_else(|| Error::InvalidParams("--p is required for erdos-renyi".into()))?,
                },
                KindArg::RandomGeometric => GraphKind::RandomGeometric {
                    n: need_n()?,
                    radius: radius.ok_or_else(|| Error::InvalidParams("--radius is required for random-geometric".into()))?,
                },
            };
            let g = io::generate(kind, seed)?;
            emit(path.as_deref(), &io::format_graph(&g), out)
        }
    }
}

/// A graph file path, or `gen:` followed by a generator spec.
pub fn load_input(input: &str) -> Result<Graph> {
    match input.strip_prefix("gen:") {
        Some(spec) => spec.parse::<GeneratorSpec>()?.generate(),
        None => io::read_graph(Path::new(input)),
    }
}

fn parse_profile(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidParams(format!("profile must be T1:T2:STEPS, got {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [t1, t2, steps] = parts[..] else {
        return Err(bad());
    };
    let t1: f64 = t1.parse().map_err(|_| bad())?;
    let t2: f64 = t2.parse().map_err(|_| bad())?;
    let steps: usize = steps.parse().map_err(|_| bad())?;
    match steps {
        0 => Err(bad()),
        1 => Ok(vec![t1]),
        _ => Ok((0..steps)
            .map(|i| t1 + (t2 - t1) * i as f64 / (steps - 1) as f64)
            .collect()),
    }
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}
