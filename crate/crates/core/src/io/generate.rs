//! Deterministic synthetic graph generators.
//!
//! Structure comes from integer arithmetic and a seeded ChaCha stream only;
//! random geometric graphs are the one place floats enter, and their edges
//! use the squared-distance test `dx² + dy² ≤ r²`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphKind {
    Ring { n: usize },
    Path { n: usize },
    Star { leaves: usize },
    /// Cliques `K_m1` and `K_m2` joined by a path of `bridge` extra nodes.
    Barbell { m1: usize, m2: usize, bridge: usize },
    ErdosRenyi { n: usize, p: f64 },
    /// `n` uniform points in the unit square, linked within `radius`.
    RandomGeometric { n: usize, radius: f64 },
}

impl GraphKind {
    pub fn name(&self) -> &'static str {
        match self {
            GraphKind::Ring { .. } => "ring",
            GraphKind::Path { .. } => "path",
            GraphKind::Star { .. } => "star",
            GraphKind::Barbell { .. } => "barbell",
            GraphKind::ErdosRenyi { .. } => "erdos_renyi",
            GraphKind::RandomGeometric { .. } => "random_geometric",
        }
    }
}

pub fn generate(kind: GraphKind, seed: u64) -> Result<Graph> {
    match kind {
        GraphKind::Ring { n } => {
            if n < 3 {
                return Err(Error::InvalidParams(format!("ring needs n ≥ 3, got {n}")));
            }
            Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
        }
        GraphKind::Path { n } => Graph::new(n, (1..n).map(|i| (i - 1, i))),
        GraphKind::Star { leaves } => Graph::new(leaves + 1, (1..=leaves).map(|i| (0, i))),
        GraphKind::Barbell { m1, m2, bridge } => barbell(m1, m2, bridge),
        GraphKind::ErdosRenyi { n, p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParams(format!("edge probability {p} outside [0, 1]")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.gen_bool(p) {
                        edges.push((i, j));
                    }
                }
            }
            Graph::new(n, edges)
        }
        GraphKind::RandomGeometric { n, radius } => {
            if !(radius.is_finite() && radius >= 0.0) {
                return Err(Error::InvalidParams(format!("radius {radius} must be finite and non-negative")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let points: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
            let r2 = radius * radius;
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    let (dx, dy) = (points[i].0 - points[j].0, points[i].1 - points[j].1);
                    if dx * dx + dy * dy <= r2 {
                        edges.push((i, j));
                    }
                }
            }
            Graph::new(n, edges)
        }
    }
}

fn barbell(m1: usize, m2: usize, bridge: usize) -> Result<Graph> {
    if m1 == 0 || m2 == 0 {
        return Err(Error::InvalidParams("barbell cliques need at least one node".into()));
    }
    let n = m1 + bridge + m2;
    let mut edges = Vec::new();
    let clique = |start: usize, size: usize, edges: &mut Vec<(usize, usize)>| {
        for i in start..start + size {
            for j in (i + 1)..start + size {
                edges.push((i, j));
            }
        }
    };
    clique(0, m1, &mut edges);
    clique(m1 + bridge, m2, &mut edges);
    // path from the last node of the first clique to the first of the second
    for i in (m1 - 1)..(m1 + bridge) {
        edges.push((i, i + 1));
    }
    Graph::new(n, edges)
}

/// A generator call written as `kind:key=value,...`, e.g. `ring:n=64` or
/// `erdos_renyi:n=30,p=0.3,seed=7`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub kind: GraphKind,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<Graph> {
        generate(self.kind, self.seed)
    }
}

impl std::str::FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, params) = s.split_once(':').unwrap_or((s, ""));
        let mut values: Vec<(&str, &str)> = Vec::new();
        for pair in params.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::InvalidParams(format!("generator parameter {pair:?} is not key=value")))?;
            values.push((k.trim(), v.trim()));
        }
        let lookup = |key: &str| values.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        let int = |key: &str| -> Result<usize> {
            lookup(key)
                .ok_or_else(|| Error::InvalidParams(format!("{kind} needs {key}")))?
                .parse()
                .map_err(|_| Error::InvalidParams(format!("{key} must be a non-negative integer")))
        };
        let real = |key: &str| -> Result<f64> {
            lookup(key)
                .ok_or_else(|| Error::InvalidParams(format!("{kind} needs {key}")))?
                .parse()
                .map_err(|_| Error::InvalidParams(format!("{key} must be a number")))
        };
        let seed = match lookup("seed") {
            Some(v) => v
                .parse()
                .map_err(|_| Error::InvalidParams("seed must be a non-negative integer".into()))?,
            None => 0,
        };
        let kind = match kind {
            "ring" => GraphKind::Ring { n: int("n")? },
            "path" => GraphKind::Path { n: int("n")? },
            "star" => GraphKind::Star { leaves: int("leaves")? },
            "barbell" => GraphKind::Barbell {
                m1: int("m1")?,
                m2: int("m2")?,
                bridge: int("bridge")?,
            },
            "erdos_renyi" | "er" => GraphKind::ErdosRenyi {
                n: int("n")?,
                p: real("p")?,
            },
            "random_geometric" | "rgg" => GraphKind::RandomGeometric {
                n: int("n")?,
                radius: real("radius")?,
            },
            other => return Err(Error::InvalidParams(format!("unknown generator {other:?}"))),
        };
        Ok(Self { kind, seed })
    }
}
