//! Reader for the TUDataset text layout.
//!
//! `NAME_A.txt` lists 1-indexed `u, v` node pairs over the whole collection
//! (usually in both directions; duplicates are folded silently) and
//! `NAME_graph_indicator.txt` gives the 1-indexed graph of each node.
//! Optional files: `NAME_node_labels.txt`, `NAME_node_attributes.txt`,
//! `NAME_graph_labels.txt`. Node labels are one-hot encoded in ascending
//! label order with attributes appended after the one-hot block; without
//! either, node degree is the single feature.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub graphs: Vec<Graph>,
    /// One label per graph when `NAME_graph_labels.txt` exists.
    pub labels: Option<Vec<i64>>,
    pub feature_dim: usize,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }
}

struct TextFile {
    path: PathBuf,
    lines: Vec<(usize, String)>,
}

impl TextFile {
    fn open(path: PathBuf) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingFile(path));
        }
        let text = std::fs::read_to_string(&path)?;
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim().to_string()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        Ok(Self { path, lines })
    }

    fn open_optional(path: PathBuf) -> Result<Option<Self>> {
        if path.exists() {
            Self::open(path).map(Some)
        } else {
            Ok(None)
        }
    }

    fn err(&self, line: usize, reason: impl Into<String>) -> Error {
        Error::MalformedLine {
            file: self.path.display().to_string(),
            line,
            reason: reason.into(),
        }
    }

    fn values<T: std::str::FromStr>(&self, line: usize, text: &str) -> Result<Vec<T>> {
        text.split(',')
            .map(|field| {
                let field = field.trim();
                field
                    .parse()
                    .map_err(|_| self.err(line, format!("cannot parse {field:?}")))
            })
            .collect()
    }

    fn single<T: std::str::FromStr>(&self) -> Result<Vec<T>> {
        self.lines
            .iter()
            .map(|(no, l)| {
                let mut v = self.values::<T>(*no, l)?;
                match v.len() {
                    1 => Ok(v.pop().unwrap()),
                    _ => Err(self.err(*no, "expected a single value")),
                }
            })
            .collect()
    }

    fn expect_rows(&self, rows: usize, what: &str) -> Result<()> {
        if self.lines.len() != rows {
            return Err(Error::SchemaMismatch(format!(
                "{}: {} rows for {rows} {what}",
                self.path.display(),
                self.lines.len()
            )));
        }
        Ok(())
    }
}

/// Name `NAME` of the single `NAME_A.txt` file in `dir`.
pub fn detect_name(dir: &Path) -> Result<String> {
    if !dir.is_dir() {
        return Err(Error::MissingFile(dir.to_path_buf()));
    }
    let mut names: Vec<String> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().to_str().and_then(|f| f.strip_suffix("_A.txt")).map(String::from))
        .collect();
    names.sort();
    match names.as_slice() {
        [name] => Ok(name.clone()),
        [] => Err(Error::MissingFile(dir.join("NAME_A.txt"))),
        _ => Err(Error::InvalidParams(format!(
            "{} holds several datasets: {}",
            dir.display(),
            names.join(", ")
        ))),
    }
}

pub fn load_tudataset(dir: &Path, name: &str) -> Result<Dataset> {
    let file = |suffix: &str| dir.join(format!("{name}_{suffix}.txt"));
    let indicator = TextFile::open(file("graph_indicator"))?;
    let edges = TextFile::open(file("A"))?;
    let node_labels = TextFile::open_optional(file("node_labels"))?;
    let attributes = TextFile::open_optional(file("node_attributes"))?;
    let graph_labels = TextFile::open_optional(file("graph_labels"))?;

    let graph_of: Vec<usize> = indicator.single::<usize>()?;
    let total = graph_of.len();
    let graph_count = graph_of.iter().copied().max().unwrap_or(0);
    if let Some(pos) = graph_of.iter().position(|&g| g == 0) {
        return Err(indicator.err(indicator.lines[pos].0, "graph ids are 1-indexed"));
    }
    // local index of every node inside its graph, in file order
    let mut sizes = vec![0usize; graph_count];
    let local: Vec<usize> = graph_of
        .iter()
        .map(|&g| {
            sizes[g - 1] += 1;
            sizes[g - 1] - 1
        })
        .collect();

    let mut per_graph: Vec<Vec<(usize, usize)>> = vec![Vec::new(); graph_count];
    for (no, line) in &edges.lines {
        let pair: Vec<usize> = edges.values(*no, line)?;
        let [a, b] = pair[..] else {
            return Err(edges.err(*no, "expected two node ids"));
        };
        for x in [a, b] {
            if x == 0 || x > total {
                return Err(Error::IndexOutOfRange { index: x, size: total });
            }
        }
        if a == b {
            return Err(edges.err(*no, format!("self-loop on node {a}")));
        }
        let (ga, gb) = (graph_of[a - 1], graph_of[b - 1]);
        if ga != gb {
            return Err(edges.err(*no, format!("edge joins graphs {ga} and {gb}")));
        }
        per_graph[ga - 1].push((local[a - 1], local[b - 1]));
    }
    let mut graphs = per_graph
        .into_iter()
        .enumerate()
        .map(|(g, e)| Graph::new(sizes[g], e))
        .collect::<Result<Vec<Graph>>>()?;

    let mut blocks: Vec<DMatrix<f64>> = Vec::new();
    if let Some(labels) = &node_labels {
        labels.expect_rows(total, "nodes")?;
        let values: Vec<i64> = labels.single()?;
        let mut distinct = values.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let mut onehot = DMatrix::zeros(total, distinct.len());
        for (i, v) in values.iter().enumerate() {
            onehot[(i, distinct.binary_search(v).unwrap())] = 1.0;
        }
        blocks.push(onehot);
    }
    if let Some(attrs) = &attributes {
        attrs.expect_rows(total, "nodes")?;
        let rows = attrs
            .lines
            .iter()
            .map(|(no, l)| attrs.values::<f64>(*no, l))
            .collect::<Result<Vec<Vec<f64>>>>()?;
        let width = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != width) {
            return Err(attrs.err(attrs.lines[i].0, format!("expected {width} attributes")));
        }
        blocks.push(DMatrix::from_fn(total, width, |i, j| rows[i][j]));
    }

    let feature_dim = if blocks.is_empty() { 1 } else { blocks.iter().map(|b| b.ncols()).sum() };
    let mut node_rows: Vec<Vec<usize>> = vec![Vec::new(); graph_count];
    for (i, &g) in graph_of.iter().enumerate() {
        node_rows[g - 1].push(i);
    }
    for (g, graph) in graphs.iter_mut().enumerate() {
        let f = if blocks.is_empty() {
            DMatrix::from_fn(graph.node_count(), 1, |i, _| graph.degree(i) as f64)
        } else {
            let mut f = DMatrix::zeros(graph.node_count(), feature_dim);
            for (local_i, &row) in node_rows[g].iter().enumerate() {
                let mut col = 0;
                for b in &blocks {
                    for j in 0..b.ncols() {
                        f[(local_i, col)] = b[(row, j)];
                        col += 1;
                    }
                }
            }
            f
        };
        *graph = std::mem::replace(graph, Graph::empty(0)).with_features(f)?;
    }

    let labels = match &graph_labels {
        Some(file) => {
            file.expect_rows(graph_count, "graphs")?;
            Some(file.single::<i64>()?)
        }
        None => None,
    };
    Ok(Dataset {
        name: name.to_string(),
        graphs,
        labels,
        feature_dim,
    })
}
