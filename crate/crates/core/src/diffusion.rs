//! Normalized-Laplacian spectra and diffusion distances.
//!
//! Every node is embedded as `Φ(x) = (λ_i ψ_i(x))_i` over the eigenpairs of
//! the normalized Laplacian of its connected component, and the diffusion
//! distance is the Euclidean distance between embedded points. All
//! eigenpairs are kept; the trivial `λ = 0` pair contributes a zero
//! coordinate and is left out of the stored embedding. Nodes in different
//! components are at distance `+∞`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest graph accepted by the dense eigensolver unless overridden.
pub const DEFAULT_SIZE_CAP: usize = 2_000;

/// Eigenvalues closer to zero than this are snapped to exactly zero.
pub const ZERO_EIGENVALUE_SNAP: f64 = 1e-8;

const EIGEN_MAX_ITERATIONS_PER_ROW: usize = 1_000;

/// `L̂ = I − D^{−1/2} A D^{−1/2}`. Isolated nodes get the identity row.
pub fn normalized_laplacian(g: &Graph) -> DMatrix<f64> {
    let n = g.node_count();
    let inv_sqrt: Vec<f64> = g
        .degrees()
        .into_iter()
        .map(|d| if d == 0 { 0.0 } else { 1.0 / (d as f64).sqrt() })
        .collect();
    let mut lap = DMatrix::identity(n, n);
    for (u, v) in g.edges() {
        let w = -inv_sqrt[u] * inv_sqrt[v];
        lap[(u, v)] = w;
        lap[(v, u)] = w;
    }
    lap
}

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: DVector<f64>,
    /// Column `i` pairs with `eigenvalues[i]`.
    pub eigenvectors: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub fn of_symmetric(m: DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if n == 0 {
            return Ok(Self {
                eigenvalues: DVector::zeros(0),
                eigenvectors: DMatrix::zeros(0, 0),
            });
        }
        let eig = SymmetricEigen::try_new(m, f64::EPSILON, EIGEN_MAX_ITERATIONS_PER_ROW * n)
            .ok_or(Error::ConvergenceFailure(n))?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
        let mut eigenvectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        Ok(Self {
            eigenvalues,
            eigenvectors,
        })
    }

    /// Decomposition of the normalized Laplacian of `g`.
    pub fn of_graph(g: &Graph) -> Result<Self> {
        Self::of_symmetric(normalized_laplacian(g))
    }
}

/// Normalized-Laplacian eigenvalues of `g`, ascending.
pub fn laplacian_spectrum(g: &Graph) -> Result<Vec<f64>> {
    Ok(SpectralDecomposition::of_graph(g)?
        .eigenvalues
        .iter()
        .copied()
        .collect())
}

/// Diffusion coordinates of a connected graph: an `n × (n − 1)` matrix whose
/// row `x` holds `λ_i ψ_i(x)` for the non-trivial eigenpairs in ascending order.
pub fn diffusion_embedding(g: &Graph) -> Result<DMatrix<f64>> {
    let n = g.node_count();
    if n <= 1 {
        return Ok(DMatrix::zeros(n, 0));
    }
    if !g.is_connected() {
        return Err(Error::InvalidGraph(
            "diffusion embedding needs a connected graph; split by component first".into(),
        ));
    }
    let spectral = SpectralDecomposition::of_graph(g)?;
    let mut coords = DMatrix::zeros(n, n - 1);
    for i in 1..n {
        let mut lambda = spectral.eigenvalues[i];
        if lambda.abs() < ZERO_EIGENVALUE_SNAP {
            lambda = 0.0;
        }
        let column = spectral.eigenvectors.column(i) * lambda;
        coords.set_column(i - 1, &column);
    }
    Ok(coords)
}

/// Symmetric matrix of pairwise distances with `+∞` marking pairs that lie
/// in different components.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix(DMatrix<f64>);

impl DistanceMatrix {
    /// Validates symmetry, a zero diagonal and non-negative entries.
    pub fn from_matrix(values: DMatrix<f64>) -> Result<Self> {
        let n = values.nrows();
        if values.ncols() != n {
            return Err(Error::InvalidParams("distance matrix must be square".into()));
        }
        for i in 0..n {
            if values[(i, i)] != 0.0 {
                return Err(Error::InvalidParams(format!("nonzero diagonal at {i}")));
            }
            for j in 0..i {
                let (a, b) = (values[(i, j)], values[(j, i)]);
                if a.is_nan() || a < 0.0 || a != b {
                    return Err(Error::InvalidParams(format!(
                        "entry ({i}, {j}) is negative, NaN or asymmetric"
                    )));
                }
            }
        }
        Ok(Self(values))
    }

    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.nrows() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// Classes of the "finite distance" relation, each ascending, ordered by
    /// smallest member. For graph metrics these are the connected components.
    pub fn finite_components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut assigned = vec![false; n];
        let mut out = Vec::new();
        for i in 0..n {
            if assigned[i] {
                continue;
            }
            let block: Vec<usize> = (i..n)
                .filter(|&j| !assigned[j] && self.0[(i, j)].is_finite())
                .collect();
            for &j in &block {
                assigned[j] = true;
            }
            out.push(block);
        }
        out
    }

    pub fn submatrix(&self, nodes: &[usize]) -> DistanceMatrix {
        let k = nodes.len();
        DistanceMatrix(DMatrix::from_fn(k, k, |a, b| self.0[(nodes[a], nodes[b])]))
    }

    /// Relabels point `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> DistanceMatrix {
        let n = self.len();
        let mut out = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(perm[i], perm[j])] = self.0[(i, j)];
            }
        }
        DistanceMatrix(out)
    }
}

/// Diffusion distances of `g` with the default size cap.
pub fn diffusion_distances(g: &Graph) -> Result<DistanceMatrix> {
    diffusion_distances_capped(g, DEFAULT_SIZE_CAP)
}

pub fn diffusion_distances_capped(g: &Graph, size_cap: usize) -> Result<DistanceMatrix> {
    let n = g.node_count();
    if n > size_cap {
        return Err(Error::SizeCapExceeded {
            nodes: n,
            cap: size_cap,
        });
    }
    let mut d = DMatrix::from_element(n, n, f64::INFINITY);
    for component in g.connected_components() {
        let coords = diffusion_embedding(&g.induced_subgraph(&component))?;
        for (a, &x) in component.iter().enumerate() {
            d[(x, x)] = 0.0;
            for (b, &y) in component.iter().enumerate().skip(a + 1) {
                let dist = (coords.row(a) - coords.row(b)).norm();
                d[(x, y)] = dist;
                d[(y, x)] = dist;
            }
        }
    }
    Ok(DistanceMatrix(d))
}

/// `ζ = exp(−t·d)` entrywise; infinite distances map to exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    values: DMatrix<f64>,
    scale: f64,
}

impl SimilarityMatrix {
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.nrows() == 0
    }

    /// Wraps a precomputed similarity matrix (entries are not re-derived).
    pub fn from_values(values: DMatrix<f64>, scale: f64) -> Result<Self> {
        if values.nrows() != values.ncols() {
            return Err(Error::InvalidParams("similarity matrix must be square".into()));
        }
        check_scale(scale)?;
        Ok(Self { values, scale })
    }

    /// Smallest eigenvalue; positive for positive definite spaces.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let spectral = SpectralDecomposition::of_symmetric(self.values.clone())?;
        Ok(spectral.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
    }
}

pub(crate) fn check_scale(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("scale must be positive and finite, got {t}")))
    }
}

pub fn similarity_matrix(d: &DistanceMatrix, t: f64) -> Result<SimilarityMatrix> {
    check_scale(t)?;
    let values = d.0.map(|x| if x.is_finite() { (-t * x).exp() } else { 0.0 });
    Ok(SimilarityMatrix { values, scale: t })
}

/// Merges points `u` and `v` into one point whose distance to every other
/// point `w` is `min(d(u, w), d(v, w))`.
///
/// The merged point takes index `min(u, v)`; the larger index is removed and
/// later indices shift down, mirroring [`Graph::contract_edge`].
pub fn min_distance_update(d: &DistanceMatrix, u: usize, v: usize) -> Result<DistanceMatrix> {
    let n = d.len();
    for idx in [u, v] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, size: n });
        }
    }
    if u == v {
        return Err(Error::InvalidParams(format!("cannot merge point {u} with itself")));
    }
    let (keep, gone) = if u < v { (u, v) } else { (v, u) };
    let old = |i: usize| if i < gone { i } else { i + 1 };
    let merged = |w: usize| d.0[(keep, w)].min(d.0[(gone, w)]);
    let out = DMatrix::from_fn(n - 1, n - 1, |i, j| {
        let (oi, oj) = (old(i), old(j));
        if oi == oj {
            0.0
        } else if oi == keep {
            merged(oj)
        } else if oj == keep {
            merged(oi)
        } else {
            d.0[(oi, oj)]
        }
    });
    Ok(DistanceMatrix(out))
}
