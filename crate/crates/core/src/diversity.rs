//! Magnitude and spread of finite metric spaces.
//!
//! Magnitude is the sum of the weighting `w` solving `ζw = 𝟙`, found by a
//! Cholesky solve per finite-distance block (never by explicit inversion).
//! Spread is `Σ_x 1 / Σ_y e^{−t·d(x,y)}` and needs no solve. Both are
//! additive over blocks at infinite distance from each other.

use std::collections::HashMap;

use log::warn;
use nalgebra::{Cholesky, DMatrix, DVector};

use crate::diffusion::{check_scale, diffusion_distances, similarity_matrix, DistanceMatrix, SimilarityMatrix};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Maximum accepted `‖ζw − 𝟙‖∞` for a weighting.
pub const SOLVER_TOLERANCE: f64 = 1e-8;

/// Diagonal jitter for the single retry, relative to `trace(ζ)/n`.
pub const JITTER_FACTOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Measure {
    Magnitude,
    #[default]
    Spread,
}

impl Measure {
    pub fn as_str(&self) -> &'static str {
        match self {
            Measure::Magnitude => "mag",
            Measure::Spread => "spread",
        }
    }
}

impl std::str::FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mag" | "magnitude" => Ok(Measure::Magnitude),
            "spread" => Ok(Measure::Spread),
            other => Err(Error::InvalidParams(format!("unknown measure {other:?}"))),
        }
    }
}

/// Solution of `ζw = 𝟙`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weighting {
    pub weights: DVector<f64>,
    /// `‖ζw − 𝟙‖∞` against the unjittered matrix.
    pub residual: f64,
}

impl Weighting {
    pub fn magnitude(&self) -> f64 {
        self.weights.sum()
    }
}

pub fn weighting(similarity: &SimilarityMatrix) -> Result<Weighting> {
    solve_weighting(similarity.values(), 0)
}

fn solve_weighting(zeta: &DMatrix<f64>, component: usize) -> Result<Weighting> {
    let n = zeta.nrows();
    let ones = DVector::from_element(n, 1.0);
    let attempt = |m: DMatrix<f64>| -> Option<Weighting> {
        let weights = Cholesky::new(m)?.solve(&ones);
        let residual = (zeta * &weights - &ones).amax();
        residual.is_finite().then_some(Weighting { weights, residual })
    };

    let first = attempt(zeta.clone());
    if let Some(w) = &first {
        if w.residual <= SOLVER_TOLERANCE {
            return Ok(first.unwrap());
        }
    }
    let jitter = JITTER_FACTOR * zeta.trace() / n as f64;
    let mut shifted = zeta.clone();
    for i in 0..n {
        shifted[(i, i)] += jitter;
    }
    match attempt(shifted) {
        Some(w) if w.residual <= SOLVER_TOLERANCE => Ok(w),
        retry => Err(Error::IllConditioned {
            component,
            residual: retry
                .or(first)
                .map_or(f64::INFINITY, |w| w.residual),
            condition: condition_estimate(zeta),
        }),
    }
}

fn condition_estimate(m: &DMatrix<f64>) -> f64 {
    let eig = m.clone().symmetric_eigenvalues();
    let (lo, hi) = eig
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentDiversity {
    pub size: usize,
    pub magnitude: Option<f64>,
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiversityValue {
    pub magnitude: Option<f64>,
    pub spread: f64,
    pub scale: f64,
    pub per_component: Vec<ComponentDiversity>,
}

/// Magnitude (and spread) of `g` under diffusion distances at scale `t`.
pub fn magnitude(g: &Graph, t: f64) -> Result<DiversityValue> {
    metric_magnitude(&diffusion_distances(g)?, t)
}

/// Magnitude and spread of an arbitrary distance matrix, block by block.
pub fn metric_magnitude(d: &DistanceMatrix, t: f64) -> Result<DiversityValue> {
    let mut value = spread(d, t)?;
    let mut total = 0.0;
    for (id, (block, entry)) in d
        .finite_components()
        .iter()
        .zip(value.per_component.iter_mut())
        .enumerate()
    {
        let mag = block_magnitude(d, block, t, id)?;
        entry.magnitude = Some(mag);
        total += mag;
    }
    value.magnitude = Some(total);
    Ok(value)
}

/// Spread of `d` at scale `t`. `+∞` entries contribute nothing to row sums,
/// which makes the total additive over components.
pub fn spread(d: &DistanceMatrix, t: f64) -> Result<DiversityValue> {
    check_scale(t)?;
    let per_point = spread_terms(d, t);
    let per_component = d
        .finite_components()
        .into_iter()
        .map(|block| ComponentDiversity {
            size: block.len(),
            magnitude: None,
            spread: block.iter().map(|&x| per_point[x]).sum(),
        })
        .collect();
    Ok(DiversityValue {
        magnitude: None,
        spread: per_point.iter().sum(),
        scale: t,
        per_component,
    })
}

fn spread_terms(d: &DistanceMatrix, t: f64) -> Vec<f64> {
    let m = d.as_matrix();
    (0..d.len())
        .map(|x| {
            let row: f64 = m
                .row(x)
                .iter()
                .filter(|v| v.is_finite())
                .map(|&v| (-t * v).exp())
                .sum();
            1.0 / row
        })
        .collect()
}

fn block_magnitude(d: &DistanceMatrix, block: &[usize], t: f64, id: usize) -> Result<f64> {
    if block.len() == 1 {
        return Ok(1.0);
    }
    let zeta = similarity_matrix(&d.submatrix(block), t)?;
    let mag = solve_weighting(zeta.values(), id)?.magnitude();
    let n = block.len() as f64;
    if !(1.0 - SOLVER_TOLERANCE..=n + SOLVER_TOLERANCE).contains(&mag) {
        warn!("component {id} of size {n}: magnitude {mag} outside [1, {n}]");
    }
    Ok(mag)
}

/// Total magnitude of `d` without the per-component breakdown.
pub fn magnitude_value(d: &DistanceMatrix, t: f64) -> Result<f64> {
    check_scale(t)?;
    d.finite_components()
        .iter()
        .enumerate()
        .map(|(id, block)| block_magnitude(d, block, t, id))
        .sum()
}

pub fn spread_value(d: &DistanceMatrix, t: f64) -> Result<f64> {
    check_scale(t)?;
    Ok(spread_terms(d, t).iter().sum())
}

pub fn measure_value(d: &DistanceMatrix, t: f64, measure: Measure) -> Result<f64> {
    match measure {
        Measure::Magnitude => magnitude_value(d, t),
        Measure::Spread => spread_value(d, t),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfilePoint {
    pub scale: f64,
    pub value: Result<f64>,
}

/// Evaluates `t ↦ measure(t·d)` over an ascending grid of positive scales.
/// A failure at one grid point is recorded there and does not stop the rest.
pub fn diversity_profile(d: &DistanceMatrix, grid: &[f64], measure: Measure) -> Result<Vec<ProfilePoint>> {
    if grid.is_empty() {
        return Err(Error::InvalidParams("empty scale grid".into()));
    }
    for &t in grid {
        check_scale(t)?;
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParams("scale grid must be ascending".into()));
    }
    let mut cache: HashMap<u64, Result<f64>> = HashMap::new();
    Ok(grid
        .iter()
        .map(|&t| {
            let value = cache
                .entry(t.to_bits())
                .or_insert_with(|| measure_value(d, t, measure))
                .clone();
            ProfilePoint { scale: t, value }
        })
        .collect())
}

/// Pearson `r²` between magnitudes and spreads, and the largest
/// magnitude-to-spread ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationReport {
    pub r_squared: f64,
    pub max_ratio: f64,
}

pub fn mag_spread_correlation(values: &[(f64, f64)]) -> Result<CorrelationReport> {
    if values.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 (magnitude, spread) pairs, got {}",
            values.len()
        )));
    }
    if values.iter().any(|&(m, s)| !(m > 0.0 && s > 0.0)) {
        return Err(Error::InvalidParams("magnitude and spread must be positive".into()));
    }
    let n = values.len() as f64;
    let (mx, my) = values
        .iter()
        .fold((0.0, 0.0), |(a, b), &(m, s)| (a + m / n, b + s / n));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(m, s) in values {
        sxy += (m - mx) * (s - my);
        sxx += (m - mx) * (m - mx);
        syy += (s - my) * (s - my);
    }
    let r_squared = if sxx == 0.0 || syy == 0.0 {
        // constant series lying on the identity line correlate perfectly
        if values.iter().all(|&(m, s)| m == s) {
            1.0
        } else {
            0.0
        }
    } else {
        (sxy * sxy / (sxx * syy)).min(1.0)
    };
    let max_ratio = values.iter().map(|&(m, s)| m / s).fold(f64::NEG_INFINITY, f64::max);
    Ok(CorrelationReport {
        r_squared,
        max_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_point(delta: f64) -> DistanceMatrix {
        DistanceMatrix::from_matrix(DMatrix::from_row_slice(2, 2, &[0.0, delta, delta, 0.0])).unwrap()
    }

    fn all_infinite(n: usize) -> DistanceMatrix {
        DistanceMatrix::from_matrix(DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { f64::INFINITY }))
            .unwrap()
    }

    fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    /// Gauss-Jordan inverse with partial pivoting; test oracle only.
    fn inverse_sum(m: &DMatrix<f64>) -> f64 {
        let n = m.nrows();
        let mut a = m.clone();
        let mut inv = DMatrix::<f64>::identity(n, n);
        for col in 0..n {
            let pivot = (col..n).max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs())).unwrap();
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= p;
                inv[(col, j)] /= p;
            }
            for i in 0..n {
                if i != col {
                    let f = a[(i, col)];
                    for j in 0..n {
                        a[(i, j)] -= f * a[(col, j)];
                        inv[(i, j)] -= f * inv[(col, j)];
                    }
                }
            }
        }
        inv.sum()
    }

    #[test]
    fn singleton_weighting() {
        let z = SimilarityMatrix::from_values(DMatrix::from_element(1, 1, 1.0), 1.0).unwrap();
        assert_eq!(weighting(&z).unwrap().weights.as_slice(), &[1.0]);
    }

    #[test]
    fn two_by_two_weighting() {
        let q = 0.3;
        let z = SimilarityMatrix::from_values(DMatrix::from_row_slice(2, 2, &[1.0, q, q, 1.0]), 1.0).unwrap();
        let w = weighting(&z).unwrap();
        assert_abs_diff_eq!(w.weights[0], 1.0 / (1.0 + q), epsilon = 1e-14);
        assert_abs_diff_eq!(w.weights[1], 1.0 / (1.0 + q), epsilon = 1e-14);
        assert!(w.residual <= SOLVER_TOLERANCE);
    }

    #[test]
    fn identity_similarity() {
        let z = SimilarityMatrix::from_values(DMatrix::identity(4, 4), 1.0).unwrap();
        assert_eq!(weighting(&z).unwrap().magnitude(), 4.0);
        let v = metric_magnitude(&all_infinite(4), 1.0).unwrap();
        assert_eq!(v.magnitude, Some(4.0));
        assert_eq!(v.spread, 4.0);
    }

    #[test]
    fn singular_similarity_is_reported() {
        let z = SimilarityMatrix::from_values(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]), 1.0).unwrap();
        assert!(matches!(weighting(&z), Err(Error::IllConditioned { component: 0, .. })));
        // coincident points: singular but consistent, the jittered retry solves it
        let z = SimilarityMatrix::from_values(DMatrix::from_element(2, 2, 1.0), 1.0).unwrap();
        assert_abs_diff_eq!(weighting(&z).unwrap().magnitude(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn singleton_graph() {
        let v = magnitude(&Graph::empty(1), 1.0).unwrap();
        assert_eq!(v.magnitude, Some(1.0));
        assert_eq!(v.spread, 1.0);
    }

    #[test]
    fn two_point_closed_form() {
        for delta in [0.5, 1.0, 2.0] {
            for t in [0.5f64, 1.0, 3.0] {
                let expected = 2.0 / (1.0 + (-t * delta).exp());
                let v = metric_magnitude(&two_point(delta), t).unwrap();
                assert_abs_diff_eq!(v.magnitude.unwrap(), expected, epsilon = 1e-12);
                assert_abs_diff_eq!(v.spread, expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn disjoint_union_is_additive() {
        let g1 = cycle(5);
        let g2 = Graph::new(4, [(0, 1), (1, 2), (1, 3)]).unwrap();
        let u = g1.disjoint_union(&g2).disjoint_union(&Graph::empty(1));
        let (a, b, c) = (
            magnitude(&g1, 1.0).unwrap(),
            magnitude(&g2, 1.0).unwrap(),
            magnitude(&u, 1.0).unwrap(),
        );
        assert_abs_diff_eq!(
            c.magnitude.unwrap(),
            a.magnitude.unwrap() + b.magnitude.unwrap() + 1.0,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(c.spread, a.spread + b.spread + 1.0, epsilon = 1e-10);
        assert_eq!(c.per_component.len(), 3);
        assert_eq!(c.per_component[1].size, 4);
    }

    #[test]
    fn cycles_are_homogeneous() {
        for n in [5, 8, 12] {
            let v = magnitude(&cycle(n), 1.0).unwrap();
            assert_abs_diff_eq!(v.magnitude.unwrap(), v.spread, epsilon = 1e-8);
        }
    }

    #[test]
    fn solve_matches_explicit_inverse() {
        let g = Graph::new(7, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 6), (6, 3)]).unwrap();
        let d = diffusion_distances(&g).unwrap();
        let z = similarity_matrix(&d, 1.0).unwrap();
        assert_abs_diff_eq!(magnitude_value(&d, 1.0).unwrap(), inverse_sum(z.values()), epsilon = 1e-8);
    }

    #[test]
    fn profile_behaviour() {
        let grid = [0.5, 1.0, 1.0, 2.0, 4.0, 1e6];
        let p = diversity_profile(&two_point(1.0), &grid, Measure::Magnitude).unwrap();
        let values: Vec<f64> = p.iter().map(|x| x.value.clone().unwrap()).collect();
        assert_eq!(values[1], values[2]);
        assert!(values.windows(2).all(|w| w[1] >= w[0]));
        assert!(values[3] > values[1]);
        assert_abs_diff_eq!(values[5], 2.0, epsilon = 1e-3);
        let single = diversity_profile(&all_infinite(1), &[0.1, 1.0, 10.0], Measure::Spread).unwrap();
        assert!(single.iter().all(|p| p.value == Ok(1.0)));
        assert!(diversity_profile(&all_infinite(1), &[], Measure::Spread).is_err());
        assert!(diversity_profile(&all_infinite(1), &[2.0, 1.0], Measure::Spread).is_err());
    }

    #[test]
    fn profile_large_scale_tends_to_cardinality() {
        let d = diffusion_distances(&cycle(6)).unwrap();
        for m in [Measure::Magnitude, Measure::Spread] {
            let p = diversity_profile(&d, &[1e6], m).unwrap();
            assert_abs_diff_eq!(p[0].value.clone().unwrap(), 6.0, epsilon = 1e-3);
        }
    }

    #[test]
    fn correlation_edge_cases() {
        let same = mag_spread_correlation(&[(1.0, 1.0), (2.0, 2.0), (3.5, 3.5)]).unwrap();
        assert_abs_diff_eq!(same.r_squared, 1.0, epsilon = 1e-15);
        assert_eq!(same.max_ratio, 1.0);
        let pairs: Vec<(f64, f64)> = [0.2, 0.7, 1.3, 2.9]
            .iter()
            .map(|&delta| {
                let v = metric_magnitude(&two_point(delta), 1.0).unwrap();
                (v.magnitude.unwrap(), v.spread)
            })
            .collect();
        assert_abs_diff_eq!(mag_spread_correlation(&pairs).unwrap().r_squared, 1.0, epsilon = 1e-12);
        assert!(matches!(
            mag_spread_correlation(&[(1.0, 1.0)]),
            Err(Error::InsufficientData(_))
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::seq::SliceRandom;
        use rand::SeedableRng;

        fn arb_graph(max: usize) -> impl Strategy<Value = Graph> {
            (1usize..=max).prop_flat_map(|n| {
                proptest::collection::vec((0..n, 0..n), 0..(2 * n)).prop_map(move |pairs| {
                    Graph::new(n, pairs.into_iter().filter(|(a, b)| a != b)).unwrap()
                })
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn permutation_invariance_and_willerton(g in arb_graph(12), seed in any::<u64>()) {
                let n = g.node_count();
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
                let a = magnitude(&g, 1.0).unwrap();
                let b = magnitude(&g.permuted(&perm).unwrap(), 1.0).unwrap();
                prop_assert!((a.magnitude.unwrap() - b.magnitude.unwrap()).abs() <= 1e-8);
                prop_assert!((a.spread - b.spread).abs() <= 1e-8);
                prop_assert!(a.spread <= a.magnitude.unwrap() + 1e-8);
                for c in &a.per_component {
                    let m = c.magnitude.unwrap();
                    prop_assert!(m >= 1.0 - 1e-8 && m <= c.size as f64 + 1e-8);
                }
            }

            #[test]
            fn solve_agrees_with_explicit_inverse(g in arb_graph(12)) {
                prop_assume!(g.is_connected());
                let d = diffusion_distances(&g).unwrap();
                let z = similarity_matrix(&d, 1.0).unwrap();
                let mag = magnitude_value(&d, 1.0).unwrap();
                prop_assert!((mag - inverse_sum(z.values())).abs() <= 1e-8);
            }
        }
    }
}
