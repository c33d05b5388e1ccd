//! Diversity-guided edge-contraction pooling.
//!
//! Each round scores every edge of the current graph by
//! `s(e) = |D(G) − D(G/e)|` where `D` is magnitude or spread, then contracts
//! edges in ascending score order subject to the rule that no super-node
//! takes part in two contractions of the same round. When no admissible
//! edge remains and the target size is not reached, the edges are rescored
//! on the contracted graph. Pooling stops at `⌊r·n⌉` nodes or when the
//! graph runs out of edges.

use log::warn;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::diffusion::{diffusion_distances_capped, min_distance_update, DistanceMatrix, DEFAULT_SIZE_CAP};
use crate::diversity::{magnitude_value, measure_value, spread_value, Measure};
use crate::error::{Error, Result};
use crate::graph::canon::canonical_form;
use crate::graph::{aggregate_features, build_assignment, Aggregation, AssignmentMatrix, ContractionTrace, Edge, Graph};

/// Largest input for which [`MetricMode::Auto`] picks exact recomputation.
pub const DEFAULT_EXACT_MAX_NODES: usize = 200;

/// Scores closer than this to the round minimum count as ties.
pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-12;

/// How the metric of a contracted graph is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricMode {
    /// Fresh diffusion distances on every contracted graph.
    Exact,
    /// Merged point takes the minimum of its parents' distances.
    MinUpdate,
    /// `Exact` up to `exact_max_nodes` input nodes, `MinUpdate` above.
    Auto { exact_max_nodes: usize },
}

impl Default for MetricMode {
    fn default() -> Self {
        MetricMode::Auto {
            exact_max_nodes: DEFAULT_EXACT_MAX_NODES,
        }
    }
}

impl MetricMode {
    pub fn resolve(self, node_count: usize) -> MetricMode {
        match self {
            MetricMode::Auto { exact_max_nodes } if node_count <= exact_max_nodes => MetricMode::Exact,
            MetricMode::Auto { .. } => MetricMode::MinUpdate,
            other => other,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            MetricMode::Exact => "exact",
            MetricMode::MinUpdate => "minupdate",
            MetricMode::Auto { .. } => "auto",
        }
    }
}

impl std::str::FromStr for MetricMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(MetricMode::Exact),
            "minupdate" | "min-update" => Ok(MetricMode::MinUpdate),
            "auto" => Ok(MetricMode::default()),
            other => Err(Error::InvalidParams(format!("unknown metric mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    /// Uniform choice among tied edges from a per-graph ChaCha stream.
    Seeded(u64),
    /// Smallest `(u, v)` among tied edges.
    Lexicographic,
}

impl Default for TieBreak {
    fn default() -> Self {
        TieBreak::Seeded(0)
    }
}

impl std::str::FromStr for TieBreak {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "lex" {
            return Ok(TieBreak::Lexicographic);
        }
        s.strip_prefix("seed:")
            .and_then(|n| n.parse().ok())
            .map(TieBreak::Seeded)
            .ok_or_else(|| Error::InvalidParams(format!("tie-break must be seed:N or lex, got {s:?}")))
    }
}

impl std::fmt::Display for TieBreak {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TieBreak::Seeded(s) => write!(f, "seed:{s}"),
            TieBreak::Lexicographic => f.write_str("lex"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoolingConfig {
    pub ratio: f64,
    pub measure: Measure,
    pub metric_mode: MetricMode,
    pub aggregation: Aggregation,
    pub tie_break: TieBreak,
    pub scale: f64,
    pub tie_tolerance: f64,
    pub size_cap: usize,
    /// Record magnitude and spread after every contraction.
    pub record_diversity: bool,
}

impl Default for PoolingConfig {
    fn default() -> Self {
        Self {
            ratio: 0.5,
            measure: Measure::Spread,
            metric_mode: MetricMode::default(),
            aggregation: Aggregation::Mean,
            tie_break: TieBreak::default(),
            scale: 1.0,
            tie_tolerance: DEFAULT_TIE_TOLERANCE,
            size_cap: DEFAULT_SIZE_CAP,
            record_diversity: true,
        }
    }
}

impl PoolingConfig {
    pub fn new(ratio: f64, measure: Measure) -> Self {
        Self {
            ratio,
            measure,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ratio > 0.0 && self.ratio <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "pooling ratio must lie in (0, 1], got {}",
                self.ratio
            )));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::InvalidParams(format!("scale must be positive, got {}", self.scale)));
        }
        if self.tie_tolerance.is_nan() || self.tie_tolerance < 0.0 {
            return Err(Error::InvalidParams("tie tolerance must be non-negative".into()));
        }
        Ok(())
    }
}

/// `⌊r·n⌉` with halves rounded up.
pub fn target_node_count(ratio: f64, node_count: usize) -> usize {
    (ratio * node_count as f64 + 0.5).floor() as usize
}

/// Scores of every edge of one graph against its own diversity.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeScoreTable {
    pub edges: Vec<Edge>,
    /// `+∞` for edges whose contracted graph could not be evaluated.
    pub scores: Vec<f64>,
    pub measure: Measure,
    pub metric_mode: MetricMode,
    pub base_value: f64,
    pub unscoreable: usize,
}

impl EdgeScoreTable {
    pub fn get(&self, u: usize, v: usize) -> Option<f64> {
        let e = crate::graph::normalize_edge(u, v);
        self.edges.binary_search(&e).ok().map(|i| self.scores[i])
    }
}

/// Scores all edges of `g`, whose current metric is `d`. Per-edge work runs
/// in parallel and is order-independent.
pub fn score_edges(g: &Graph, cfg: &PoolingConfig, d: &DistanceMatrix) -> Result<EdgeScoreTable> {
    if d.len() != g.node_count() {
        return Err(Error::ShapeMismatch {
            expected: g.node_count(),
            actual: d.len(),
        });
    }
    let mode = cfg.metric_mode.resolve(g.node_count());
    let base_value = measure_value(d, cfg.scale, cfg.measure)?;
    let edges = g.edges();
    let scores: Vec<Result<f64>> = edges
        .par_iter()
        .map(|&(u, v)| {
            let contracted = match mode {
                MetricMode::MinUpdate => min_distance_update(d, u, v)?,
                _ => diffusion_distances_capped(&g.contract_edge(u, v)?.0, cfg.size_cap)?,
            };
            Ok((base_value - measure_value(&contracted, cfg.scale, cfg.measure)?).abs())
        })
        .collect();
    let mut unscoreable = 0;
    let scores = scores
        .into_iter()
        .map(|s| match s {
            Ok(s) => Ok(s),
            Err(e) if e.is_numerical() => {
                unscoreable += 1;
                Ok(f64::INFINITY)
            }
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<f64>>>()?;
    if unscoreable > 0 {
        warn!("{unscoreable} of {} edges could not be scored", edges.len());
    }
    Ok(EdgeScoreTable {
        edges,
        scores,
        measure: cfg.measure,
        metric_mode: mode,
        base_value,
        unscoreable,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiversitySnapshot {
    /// `None` when the weighting solve failed.
    pub magnitude: Option<f64>,
    pub spread: f64,
}

impl DiversitySnapshot {
    fn of(d: &DistanceMatrix, t: f64) -> Result<Self> {
        Ok(Self {
            magnitude: magnitude_value(d, t).ok(),
            spread: spread_value(d, t)?,
        })
    }

    pub fn value(&self, measure: Measure) -> Option<f64> {
        match measure {
            Measure::Magnitude => self.magnitude,
            Measure::Spread => Some(self.spread),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepLog {
    pub round: usize,
    pub merge: (usize, usize),
    pub before: DiversitySnapshot,
    pub after: DiversitySnapshot,
}

impl StepLog {
    /// `|D(G^(k−1)) − D(G^(k))|`.
    pub fn delta(&self, measure: Measure) -> Option<f64> {
        Some((self.before.value(measure)? - self.after.value(measure)?).abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoolingResult {
    /// Pooled graph; carries the pooled features when features were given.
    pub pooled: Graph,
    pub pooled_features: Option<DMatrix<f64>>,
    pub assignment: AssignmentMatrix,
    pub trace: ContractionTrace,
    pub initial: Option<DiversitySnapshot>,
    /// One entry per contraction; empty when diversity recording is off.
    pub diversity_log: Vec<StepLog>,
    /// Edges ran out before the target size was reached.
    pub exhausted: bool,
    pub unscoreable_edges: usize,
}

enum Selection<'a> {
    Scored(&'a PoolingConfig),
    Uniform,
}

/// Pools `g` to `⌊r·n⌉` nodes by diversity-guided edge contraction.
pub fn pool(g: &Graph, features: Option<&DMatrix<f64>>, cfg: &PoolingConfig) -> Result<PoolingResult> {
    run(g, features, cfg, Selection::Scored(cfg))
}

/// Same contraction mechanics as [`pool`] with a uniformly random admissible
/// edge at every step.
pub fn random_pool(g: &Graph, features: Option<&DMatrix<f64>>, ratio: f64, seed: u64) -> Result<PoolingResult> {
    let cfg = PoolingConfig {
        ratio,
        metric_mode: MetricMode::Exact,
        tie_break: TieBreak::Seeded(seed),
        ..PoolingConfig::default()
    };
    random_pool_with(g, features, &cfg)
}

/// [`random_pool`] with explicit aggregation, metric and recording settings.
/// The seed comes from `cfg.tie_break`; lexicographic falls back to seed 0.
pub fn random_pool_with(g: &Graph, features: Option<&DMatrix<f64>>, cfg: &PoolingConfig) -> Result<PoolingResult> {
    let mut cfg = cfg.clone();
    if cfg.tie_break == TieBreak::Lexicographic {
        cfg.tie_break = TieBreak::Seeded(0);
    }
    run(g, features, &cfg, Selection::Uniform)
}

struct State {
    graph: Graph,
    /// Smallest original member of each current super-node.
    representative: Vec<usize>,
    distances: Option<DistanceMatrix>,
}

fn run(g: &Graph, features: Option<&DMatrix<f64>>, cfg: &PoolingConfig, selection: Selection) -> Result<PoolingResult> {
    cfg.validate()?;
    let n = g.node_count();
    if let Some(f) = features {
        if f.nrows() != n {
            return Err(Error::ShapeMismatch {
                expected: n,
                actual: f.nrows(),
            });
        }
    }
    if n > cfg.size_cap {
        return Err(Error::SizeCapExceeded {
            nodes: n,
            cap: cfg.size_cap,
        });
    }
    let target = target_node_count(cfg.ratio, n);
    let mode = match cfg.metric_mode.resolve(n) {
        MetricMode::MinUpdate => MetricMode::MinUpdate,
        _ => MetricMode::Exact,
    };
    let mut rng = match cfg.tie_break {
        TieBreak::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        TieBreak::Lexicographic => None,
    };

    let mut state = State {
        graph: g.clone().without_features(),
        representative: (0..n).collect(),
        distances: None,
    };
    let needs_metric = cfg.record_diversity || mode == MetricMode::MinUpdate;
    if needs_metric && n > target {
        state.distances = Some(diffusion_distances_capped(&state.graph, cfg.size_cap)?);
    }
    let mut snapshot = match (&state.distances, cfg.record_diversity) {
        (Some(d), true) => Some(DiversitySnapshot::of(d, cfg.scale)?),
        _ => None,
    };
    let initial = snapshot;

    let mut trace = ContractionTrace::default();
    let mut log = Vec::new();
    let mut unscoreable_edges = 0;
    let mut round = 0;

    while state.graph.node_count() > target && state.graph.edge_count() > 0 {
        trace.rescoring_boundaries.push(trace.merges.len());
        let base_edges = state.graph.edges();
        let scores = match selection {
            Selection::Scored(cfg) => {
                if state.distances.is_none() {
                    state.distances = Some(diffusion_distances_capped(&state.graph, cfg.size_cap)?);
                }
                let table = score_edges(&state.graph, cfg, state.distances.as_ref().unwrap())?;
                unscoreable_edges += table.unscoreable;
                if table.unscoreable == table.edges.len() {
                    return Err(Error::IllConditioned {
                        component: 0,
                        residual: f64::INFINITY,
                        condition: f64::INFINITY,
                    });
                }
                table.scores
            }
            Selection::Uniform => vec![0.0; base_edges.len()],
        };

        let base_n = state.graph.node_count();
        let mut touched = vec![false; base_n];
        let mut to_current: Vec<usize> = (0..base_n).collect();
        while state.graph.node_count() > target {
            let admissible: Vec<usize> = (0..base_edges.len())
                .filter(|&i| {
                    let (u, v) = base_edges[i];
                    !touched[u] && !touched[v]
                })
                .collect();
            if admissible.is_empty() {
                break;
            }
            let pick = choose(&admissible, &scores, &base_edges, cfg.tie_tolerance, rng.as_mut());
            let (u, v) = base_edges[pick];
            touched[u] = true;
            touched[v] = true;

            let (cu, cv) = (to_current[u], to_current[v]);
            let (keep, gone) = (cu.min(cv), cu.max(cv));
            let (contracted, mapping) = state.graph.contract_edge(keep, gone)?;
            trace
                .merges
                .push((state.representative[keep], state.representative[gone]));
            state.representative.remove(gone);
            state.distances = match (mode, state.distances.take()) {
                (MetricMode::MinUpdate, Some(d)) => Some(min_distance_update(&d, keep, gone)?),
                _ if cfg.record_diversity => Some(diffusion_distances_capped(&contracted, cfg.size_cap)?),
                _ => None,
            };
            state.graph = contracted;
            for c in to_current.iter_mut() {
                *c = mapping[*c];
            }

            if let (Some(before), Some(d)) = (snapshot, &state.distances) {
                let after = DiversitySnapshot::of(d, cfg.scale)?;
                log.push(StepLog {
                    round,
                    merge: *trace.merges.last().unwrap(),
                    before,
                    after,
                });
                snapshot = Some(after);
            }
        }
        round += 1;
    }

    let assignment = build_assignment(&trace, n)?;
    debug_assert_eq!(assignment.super_node_count(), state.graph.node_count());
    let pooled_features = features
        .map(|f| aggregate_features(f, &assignment, cfg.aggregation))
        .transpose()?;
    let exhausted = state.graph.node_count() != target;
    let pooled = match &pooled_features {
        Some(f) => state.graph.with_features(f.clone())?,
        None => state.graph,
    };
    Ok(PoolingResult {
        pooled,
        pooled_features,
        assignment,
        trace,
        initial,
        diversity_log: log,
        exhausted,
        unscoreable_edges,
    })
}

/// Picks the lowest-scored admissible edge, breaking ties within `tolerance`.
fn choose(
    admissible: &[usize],
    scores: &[f64],
    edges: &[Edge],
    tolerance: f64,
    rng: Option<&mut ChaCha8Rng>,
) -> usize {
    let best = admissible
        .iter()
        .map(|&i| scores[i])
        .fold(f64::INFINITY, f64::min);
    let tied: Vec<usize> = admissible
        .iter()
        .copied()
        .filter(|&i| scores[i] <= best + tolerance || (best.is_infinite() && scores[i].is_infinite()))
        .collect();
    match rng {
        Some(rng) => tied[rng.gen_range(0..tied.len())],
        None => *tied.iter().min_by_key(|&&i| edges[i]).unwrap(),
    }
}

/// Pooling on the canonical relabeling of the input with lexicographic ties,
/// so that isomorphic inputs yield isomorphic outputs.
#[derive(Debug, Clone)]
pub struct CanonicalPooling {
    /// `labeling[v]` is the canonical index of input node `v`.
    pub labeling: Vec<usize>,
    /// Result in canonical coordinates.
    pub result: PoolingResult,
}

impl CanonicalPooling {
    /// Assignment of the original input nodes.
    pub fn input_assignment(&self) -> AssignmentMatrix {
        let s = &self.result.assignment;
        let mapped = self.labeling.iter().map(|&c| s.super_node_of(c)).collect();
        AssignmentMatrix::from_vec(mapped, s.super_node_count()).expect("relabeling keeps surjectivity")
    }
}

pub fn pool_canonical(g: &Graph, features: Option<&DMatrix<f64>>, cfg: &PoolingConfig) -> Result<CanonicalPooling> {
    let form = canonical_form(g);
    let relabeled = g.clone().without_features().permuted(&form.labeling)?;
    let features = features.map(|f| {
        let mut out = DMatrix::zeros(f.nrows(), f.ncols());
        for (v, &c) in form.labeling.iter().enumerate() {
            out.set_row(c, &f.row(v));
        }
        out
    });
    let cfg = PoolingConfig {
        tie_break: TieBreak::Lexicographic,
        ..cfg.clone()
    };
    Ok(CanonicalPooling {
        labeling: form.labeling,
        result: pool(&relabeled, features.as_ref(), &cfg)?,
    })
}

/// One step of the comparison between a magnitude-guided run and a
/// spread-guided run on the same graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundStep {
    pub step: usize,
    pub delta_magnitude: f64,
    pub delta_spread: f64,
    /// Smallest `C` with `|Mag(G^(k−1)) − Sp(G̃^(k))| ≤ C·Δ^(k)Sp`.
    pub constant: Option<f64>,
    /// Whether `Δ^(k)Mag ≤ 3C·Δ^(k)Sp` for that `C`.
    pub holds: Option<bool>,
    /// `Δ^(k)Sp` below `1e−12` or a magnitude missing; step skipped.
    pub degenerate: bool,
}

pub const BOUND_DEGENERATE_THRESHOLD: f64 = 1e-12;

/// Per-step report of `Δ^(k)Mag` against `3C·Δ^(k)Sp`, pairing step `k` of a
/// magnitude-guided run with step `k` of a spread-guided run. Diagnostic
/// only; nothing is asserted.
pub fn pooling_bound_diagnostic(magnitude_run: &PoolingResult, spread_run: &PoolingResult) -> Vec<BoundStep> {
    let steps = magnitude_run
        .diversity_log
        .len()
        .min(spread_run.diversity_log.len());
    (0..steps)
        .map(|k| {
            let m = &magnitude_run.diversity_log[k];
            let s = &spread_run.diversity_log[k];
            let delta_spread = (s.before.spread - s.after.spread).abs();
            let delta_magnitude = m.delta(Measure::Magnitude);
            let mut out = BoundStep {
                step: k + 1,
                delta_magnitude: delta_magnitude.unwrap_or(f64::NAN),
                delta_spread,
                constant: None,
                holds: None,
                degenerate: true,
            };
            if let (Some(dm), Some(mag_before)) = (delta_magnitude, m.before.magnitude) {
                if delta_spread >= BOUND_DEGENERATE_THRESHOLD {
                    let c = (mag_before - s.after.spread).abs() / delta_spread;
                    out.constant = Some(c);
                    out.holds = Some(dm <= 3.0 * c * delta_spread);
                    out.degenerate = false;
                }
            }
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::diffusion_distances;
    use crate::diversity::magnitude;
    use approx::assert_abs_diff_eq;

    fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn cfg(ratio: f64, measure: Measure, tie_break: TieBreak) -> PoolingConfig {
        PoolingConfig {
            ratio,
            measure,
            tie_break,
            metric_mode: MetricMode::Exact,
            ..PoolingConfig::default()
        }
    }

    #[test]
    fn rounding_is_half_up() {
        assert_eq!(target_node_count(0.5, 1), 1);
        assert_eq!(target_node_count(0.5, 5), 3);
        assert_eq!(target_node_count(0.6, 5), 3);
        assert_eq!(target_node_count(0.25, 10), 3);
        assert_eq!(target_node_count(1.0, 7), 7);
        assert_eq!(target_node_count(0.1, 4), 0);
    }

    #[test]
    fn config_parsing() {
        assert_eq!("seed:42".parse::<TieBreak>().unwrap(), TieBreak::Seeded(42));
        assert_eq!("lex".parse::<TieBreak>().unwrap(), TieBreak::Lexicographic);
        assert!("seed:x".parse::<TieBreak>().is_err());
        assert_eq!("minupdate".parse::<MetricMode>().unwrap(), MetricMode::MinUpdate);
        assert!(PoolingConfig::new(0.0, Measure::Spread).validate().is_err());
        assert!(PoolingConfig::new(1.5, Measure::Spread).validate().is_err());
        assert_eq!(MetricMode::default().resolve(200), MetricMode::Exact);
        assert_eq!(MetricMode::default().resolve(201), MetricMode::MinUpdate);
    }

    #[test]
    fn cycle_scores_all_equal() {
        let g = cycle(6);
        let d = diffusion_distances(&g).unwrap();
        for measure in [Measure::Magnitude, Measure::Spread] {
            let table = score_edges(&g, &cfg(0.5, measure, TieBreak::Lexicographic), &d).unwrap();
            assert_eq!(table.scores.len(), 6);
            for s in &table.scores {
                assert_abs_diff_eq!(*s, table.scores[0], epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn single_edge_score_closed_form() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let d = diffusion_distances(&g).unwrap();
        let delta = d.get(0, 1);
        let table = score_edges(&g, &cfg(0.5, Measure::Magnitude, TieBreak::Lexicographic), &d).unwrap();
        let expected = (2.0 / (1.0 + (-delta).exp()) - 1.0).abs();
        assert_abs_diff_eq!(table.get(1, 0).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn barbell_bridge_scores_highest() {
        // two K_5 joined by the single edge (4, 5)
        let mut edges = Vec::new();
        for off in [0, 5] {
            for i in 0..5 {
                for j in (i + 1)..5 {
                    edges.push((off + i, off + j));
                }
            }
        }
        edges.push((4, 5));
        let g = Graph::new(10, edges).unwrap();
        let d = diffusion_distances(&g).unwrap();
        for measure in [Measure::Magnitude, Measure::Spread] {
            let table = score_edges(&g, &cfg(0.5, measure, TieBreak::Lexicographic), &d).unwrap();
            let bridge = table.get(4, 5).unwrap();
            for (&e, &s) in table.edges.iter().zip(&table.scores) {
                if e != (4, 5) && !(e.0 == 4 || e.1 == 5) {
                    assert!(bridge > s, "{measure:?}: bridge {bridge} vs {e:?} {s}");
                }
            }
        }
    }

    #[test]
    fn ratio_one_is_identity() {
        let g = cycle(5);
        let r = pool(&g, None, &cfg(1.0, Measure::Magnitude, TieBreak::Seeded(1))).unwrap();
        assert_eq!(r.pooled, g);
        assert_eq!(r.assignment, AssignmentMatrix::identity(5));
        assert!(r.trace.is_empty());
        assert!(r.diversity_log.is_empty());
        assert!(!r.exhausted);
        let r = random_pool(&g, None, 1.0, 3).unwrap();
        assert_eq!(r.pooled, g);
    }

    #[test]
    fn star_contracts_one_leaf_per_round() {
        let star = Graph::new(5, (1..5).map(|i| (0, i))).unwrap();
        let r = pool(&star, None, &cfg(0.6, Measure::Spread, TieBreak::Lexicographic)).unwrap();
        assert_eq!(r.pooled.node_count(), 3);
        assert_eq!(r.trace.merges.len(), 2);
        assert_eq!(r.trace.rescoring_boundaries, vec![0, 1]);
        assert!(r.trace.merges.iter().all(|&(keep, _)| keep == 0));
        r.trace.validate(5).unwrap();
    }

    #[test]
    fn ring_pools_to_ring() {
        for tie_break in [TieBreak::Lexicographic, TieBreak::Seeded(9)] {
            let r = pool(&cycle(16), None, &cfg(0.5, Measure::Spread, tie_break)).unwrap();
            assert!(crate::graph::canon::are_isomorphic(&r.pooled, &cycle(8)));
        }
    }

    #[test]
    fn seeded_runs_repeat_bit_for_bit() {
        let g = cycle(12).disjoint_union(&Graph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap());
        let c = cfg(0.4, Measure::Spread, TieBreak::Seeded(5));
        assert_eq!(pool(&g, None, &c).unwrap(), pool(&g, None, &c).unwrap());
        assert_eq!(random_pool(&g, None, 0.4, 11).unwrap(), random_pool(&g, None, 0.4, 11).unwrap());
    }

    #[test]
    fn isolated_nodes_survive_and_exhaustion_is_flagged() {
        let g = Graph::new(4, [(0, 1)]).unwrap();
        let r = pool(&g, None, &cfg(0.25, Measure::Magnitude, TieBreak::Lexicographic)).unwrap();
        assert_eq!(r.pooled.node_count(), 3);
        assert!(r.exhausted);
        assert_eq!(r.assignment.as_slice(), &[0, 0, 1, 2]);
    }

    #[test]
    fn features_are_aggregated() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let f = DMatrix::from_row_slice(2, 1, &[2.0, 4.0]);
        let mut c = cfg(0.5, Measure::Spread, TieBreak::Lexicographic);
        let r = pool(&g, Some(&f), &c).unwrap();
        assert_eq!(r.pooled_features.as_ref().unwrap()[(0, 0)], 3.0);
        assert_eq!(r.pooled.features().unwrap()[(0, 0)], 3.0);
        c.aggregation = Aggregation::Sum;
        assert_eq!(pool(&g, Some(&f), &c).unwrap().pooled_features.unwrap()[(0, 0)], 6.0);
        assert!(matches!(
            pool(&g, Some(&DMatrix::zeros(3, 1)), &c),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn log_matches_direct_computation() {
        let g = Graph::new(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5)]).unwrap();
        let r = pool(&g, None, &cfg(0.5, Measure::Magnitude, TieBreak::Lexicographic)).unwrap();
        assert_eq!(r.diversity_log.len(), 3);
        let last = r.diversity_log.last().unwrap().after;
        let direct = magnitude(&r.pooled, 1.0).unwrap();
        assert_abs_diff_eq!(last.magnitude.unwrap(), direct.magnitude.unwrap(), epsilon = 1e-10);
        assert_abs_diff_eq!(last.spread, direct.spread, epsilon = 1e-10);
        assert_eq!(r.initial.unwrap().magnitude, magnitude(&g, 1.0).unwrap().magnitude);
    }

    #[test]
    fn recording_off_gives_same_trace() {
        let g = Graph::new(7, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 6), (6, 3)]).unwrap();
        let mut c = cfg(0.4, Measure::Spread, TieBreak::Seeded(2));
        let a = pool(&g, None, &c).unwrap();
        c.record_diversity = false;
        let b = pool(&g, None, &c).unwrap();
        assert_eq!(a.trace, b.trace);
        assert!(b.diversity_log.is_empty());
    }

    #[test]
    fn bound_diagnostic_on_two_points() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let m = pool(&g, None, &cfg(0.5, Measure::Magnitude, TieBreak::Lexicographic)).unwrap();
        let s = pool(&g, None, &cfg(0.5, Measure::Spread, TieBreak::Lexicographic)).unwrap();
        let report = pooling_bound_diagnostic(&m, &s);
        assert_eq!(report.len(), 1);
        assert_abs_diff_eq!(report[0].constant.unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(report[0].holds, Some(true));
        let id = pool(&g, None, &cfg(1.0, Measure::Magnitude, TieBreak::Lexicographic)).unwrap();
        assert!(pooling_bound_diagnostic(&id, &id).is_empty());
    }

    #[test]
    fn canonical_pooling_maps_back() {
        let g = Graph::new(5, [(0, 3), (3, 1), (1, 4), (4, 2)]).unwrap();
        let c = pool_canonical(&g, None, &cfg(0.6, Measure::Spread, TieBreak::Seeded(0))).unwrap();
        let s = c.input_assignment();
        assert_eq!(s.node_count(), 5);
        assert_eq!(s.super_node_count(), 3);
    }
}
