//! Undirected simple graphs over dense `0..n` node indices.
//!
//! Adjacency is stored as sorted neighbor lists, so iteration order (and
//! therefore every tie-break downstream) is a function of the labels alone.

mod assignment;
pub mod canon;
mod union_find;

use std::collections::VecDeque;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub use assignment::{aggregate_features, build_assignment, Aggregation, AssignmentMatrix, ContractionTrace};
pub use union_find::UnionFind;

/// An edge as an ordered pair `(u, v)` with `u < v`.
pub type Edge = (usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    features: Option<DMatrix<f64>>,
}

#[inline]
pub fn normalize_edge(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Graph {
    /// Builds a graph from an edge list. Pairs given in both orientations or
    /// repeated are collapsed to one undirected edge; self-loops and
    /// out-of-range endpoints are rejected.
    pub fn new<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency = vec![Vec::new(); node_count];
        for (u, v) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::IndexOutOfRange {
                    index: u.max(v),
                    size: node_count,
                });
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop on node {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self {
            adjacency,
            features: None,
        })
    }

    pub fn empty(node_count: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); node_count],
            features: None,
        }
    }

    pub fn with_features(mut self, features: DMatrix<f64>) -> Result<Self> {
        if features.nrows() != self.node_count() {
            return Err(Error::ShapeMismatch {
                expected: self.node_count(),
                actual: features.nrows(),
            });
        }
        self.features = Some(features);
        Ok(self)
    }

    pub fn without_features(mut self) -> Self {
        self.features = None;
        self
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn features(&self) -> Option<&DMatrix<f64>> {
        self.features.as_ref()
    }

    pub fn feature_dim(&self) -> usize {
        self.features.as_ref().map_or(0, |f| f.ncols())
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// All edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, list) in self.adjacency.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    /// Connected components, each sorted ascending, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut component = Vec::new();
            while let Some(u) = queue.pop_front() {
                component.push(u);
                for &v in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            component.sort_unstable();
            components.push(component);
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// Contracts the edge `{u, v}`.
    ///
    /// The smaller endpoint survives and keeps its index; the larger one is
    /// removed and every index above it shifts down by one. Returns the
    /// contracted graph (without features) and the old-to-new index map.
    pub fn contract_edge(&self, u: usize, v: usize) -> Result<(Graph, Vec<usize>)> {
        if !self.has_edge(u, v) {
            return Err(Error::EdgeNotFound(u, v));
        }
        let (keep, gone) = normalize_edge(u, v);
        let n = self.node_count();
        let mapping: Vec<usize> = (0..n)
            .map(|i| match i.cmp(&gone) {
                std::cmp::Ordering::Less => i,
                std::cmp::Ordering::Equal => keep,
                std::cmp::Ordering::Greater => i - 1,
            })
            .collect();

        let mut adjacency = vec![Vec::new(); n - 1];
        for (a, list) in self.adjacency.iter().enumerate() {
            let na = mapping[a];
            for &b in list {
                let nb = mapping[b];
                if na != nb {
                    adjacency[na].push(nb);
                }
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok((
            Graph {
                adjacency,
                features: None,
            },
            mapping,
        ))
    }

    /// Relabels node `i` as `perm[i]`. Features are permuted with the nodes.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        if perm.len() != n {
            return Err(Error::InvalidParams(format!(
                "permutation of length {} for {n} nodes",
                perm.len()
            )));
        }
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParams("not a permutation".into()));
            }
        }
        let edges = self.edges().into_iter().map(|(u, v)| (perm[u], perm[v]));
        let mut g = Graph::new(n, edges)?;
        if let Some(f) = &self.features {
            let mut out = DMatrix::zeros(n, f.ncols());
            for (i, &target) in perm.iter().enumerate() {
                out.set_row(target, &f.row(i));
            }
            g.features = Some(out);
        }
        Ok(g)
    }

    /// Subgraph induced by `nodes`; node `nodes[i]` becomes node `i`.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.node_count()];
        for (i, &u) in nodes.iter().enumerate() {
            index[u] = i;
        }
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (i, &u) in nodes.iter().enumerate() {
            for &v in &self.adjacency[u] {
                if index[v] != usize::MAX {
                    adjacency[i].push(index[v]);
                }
            }
            adjacency[i].sort_unstable();
        }
        Graph {
            adjacency,
            features: None,
        }
    }

    /// Places `other` after `self`, shifting its indices by `self.node_count()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let offset = self.node_count();
        let mut adjacency = self.adjacency.clone();
        adjacency.extend(
            other
                .adjacency
                .iter()
                .map(|list| list.iter().map(|&v| v + offset).collect()),
        );
        Graph {
            adjacency,
            features: None,
        }
    }
}
