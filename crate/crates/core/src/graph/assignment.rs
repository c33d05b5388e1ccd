use nalgebra::DMatrix;

use super::UnionFind;
use crate::error::{Error, Result};

/// Ordered record of the merges performed while pooling one graph.
///
/// Each merge is `(surviving, absorbed)` in original node indices, where a
/// super-node is named by its smallest original member.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContractionTrace {
    pub merges: Vec<(usize, usize)>,
    /// Index into `merges` at which each rescoring round began.
    pub rescoring_boundaries: Vec<usize>,
}

impl ContractionTrace {
    pub fn len(&self) -> usize {
        self.merges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.merges.is_empty()
    }

    /// Merges grouped by rescoring round.
    pub fn rounds(&self) -> Vec<&[(usize, usize)]> {
        let mut starts = self.rescoring_boundaries.clone();
        if starts.first() != Some(&0) {
            starts.insert(0, 0);
        }
        starts.push(self.merges.len());
        starts
            .windows(2)
            .filter(|w| w[0] < w[1])
            .map(|w| &self.merges[w[0]..w[1]])
            .collect()
    }

    /// Checks that the trace replays on an `n`-node graph and that no
    /// super-node takes part in two merges of the same round.
    pub fn validate(&self, n: usize) -> Result<()> {
        let mut uf = UnionFind::new(n);
        let mut absorbed = vec![false; n];
        for round in self.rounds() {
            let mut touched = vec![false; n];
            for &(keep, gone) in round {
                check_merge(keep, gone, n, &absorbed)?;
                let (rk, rg) = (uf.find(keep), uf.find(gone));
                if touched[rk] || touched[rg] {
                    return Err(Error::InvalidTrace(format!(
                        "merge ({keep}, {gone}) reuses a super-node within one round"
                    )));
                }
                absorbed[gone] = true;
                uf.union(keep, gone);
                touched[uf.find(keep)] = true;
            }
        }
        Ok(())
    }
}

fn check_merge(keep: usize, gone: usize, n: usize, absorbed: &[bool]) -> Result<()> {
    for idx in [keep, gone] {
        if idx >= n {
            return Err(Error::InvalidTrace(format!(
                "merge ({keep}, {gone}) references node {idx} of {n}"
            )));
        }
        if absorbed[idx] {
            return Err(Error::InvalidTrace(format!(
                "merge ({keep}, {gone}) references already absorbed node {idx}"
            )));
        }
    }
    if keep == gone {
        return Err(Error::InvalidTrace(format!("merge ({keep}, {gone}) is a self-merge")));
    }
    Ok(())
}

/// Hard node-to-super-node assignment `S` of shape `(n, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentMatrix {
    assignment: Vec<usize>,
    super_nodes: usize,
}

impl AssignmentMatrix {
    pub fn identity(n: usize) -> Self {
        Self {
            assignment: (0..n).collect(),
            super_nodes: n,
        }
    }

    /// Validates totality (implicit) and surjectivity onto `0..super_nodes`.
    pub fn from_vec(assignment: Vec<usize>, super_nodes: usize) -> Result<Self> {
        let mut hit = vec![false; super_nodes];
        for &j in &assignment {
            if j >= super_nodes {
                return Err(Error::IndexOutOfRange {
                    index: j,
                    size: super_nodes,
                });
            }
            hit[j] = true;
        }
        if let Some(empty) = hit.iter().position(|h| !h) {
            return Err(Error::InvalidTrace(format!("super-node {empty} has no members")));
        }
        Ok(Self {
            assignment,
            super_nodes,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.assignment.len(), self.super_nodes)
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn super_node_count(&self) -> usize {
        self.super_nodes
    }

    pub fn super_node_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.assignment
    }

    /// Original nodes of each super-node, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.super_nodes];
        for (i, &j) in self.assignment.iter().enumerate() {
            out[j].push(i);
        }
        out
    }

    /// Dense 0/1 selection matrix.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(self.assignment.len(), self.super_nodes);
        for (i, &j) in self.assignment.iter().enumerate() {
            s[(i, j)] = 1.0;
        }
        s
    }
}

/// Replays `trace` on `n` nodes. Super-nodes are numbered by ascending
/// smallest member, which matches the node order of the pooled graph.
pub fn build_assignment(trace: &ContractionTrace, n: usize) -> Result<AssignmentMatrix> {
    let mut uf = UnionFind::new(n);
    let mut absorbed = vec![false; n];
    for &(keep, gone) in &trace.merges {
        check_merge(keep, gone, n, &absorbed)?;
        absorbed[gone] = true;
        uf.union(keep, gone);
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut assignment = Vec::with_capacity(n);
    for i in 0..n {
        let root = uf.find(i);
        if label[root] == usize::MAX {
            label[root] = next;
            next += 1;
        }
        assignment.push(label[root]);
    }
    Ok(AssignmentMatrix {
        assignment,
        super_nodes: next,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Aggregation {
    #[default]
    Mean,
    Sum,
}

impl Aggregation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Aggregation::Mean => "mean",
            Aggregation::Sum => "sum",
        }
    }
}

impl std::str::FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Aggregation::Mean),
            "sum" => Ok(Aggregation::Sum),
            other => Err(Error::InvalidParams(format!("unknown aggregation {other:?}"))),
        }
    }
}

/// Row `j` of the output is the mean (or sum, i.e. `SᵀF`) of the rows of
/// `features` assigned to super-node `j`.
pub fn aggregate_features(
    features: &DMatrix<f64>,
    assignment: &AssignmentMatrix,
    mode: Aggregation,
) -> Result<DMatrix<f64>> {
    if features.nrows() != assignment.node_count() {
        return Err(Error::ShapeMismatch {
            expected: assignment.node_count(),
            actual: features.nrows(),
        });
    }
    let k = assignment.super_node_count();
    let mut out = DMatrix::zeros(k, features.ncols());
    let mut counts = vec![0usize; k];
    for (i, &j) in assignment.as_slice().iter().enumerate() {
        let mut row = out.row_mut(j);
        row += features.row(i);
        counts[j] += 1;
    }
    if mode == Aggregation::Mean {
        for (j, &c) in counts.iter().enumerate() {
            let mut row = out.row_mut(j);
            row /= c as f64;
        }
    }
    Ok(out)
}
