//! Canonical labeling for small graphs by individualization-refinement.
//!
//! Colour refinement splits the vertex set into an ordered equitable
//! partition; non-discrete partitions are resolved by individualizing each
//! vertex of the first non-singleton cell in turn. Every leaf yields a
//! certificate (the upper-triangular adjacency bits in leaf order) and the
//! lexicographically largest one wins. Branches that differ by a twin swap
//! (a transposition that is an automorphism) are explored once.
//!
//! The search is exponential in the worst case; it is meant for the small
//! graphs used in invariance checks, not for datasets at large.

use super::Graph;

/// Canonical labeling together with its certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    /// `labeling[v]` is the canonical index of node `v`.
    pub labeling: Vec<usize>,
    pub certificate: Vec<u64>,
}

pub fn canonical_form(g: &Graph) -> CanonicalForm {
    let n = g.node_count();
    let mut best: Option<CanonicalForm> = None;
    search(g, vec![0; n], &mut best);
    best.unwrap_or(CanonicalForm {
        labeling: Vec::new(),
        certificate: vec![0],
    })
}

/// `g` relabeled by its canonical labeling; isomorphic inputs give equal outputs.
pub fn canonical_graph(g: &Graph) -> Graph {
    let form = canonical_form(g);
    g.permuted(&form.labeling)
        .expect("canonical labeling is a permutation")
}

pub fn are_isomorphic(a: &Graph, b: &Graph) -> bool {
    a.node_count() == b.node_count()
        && a.edge_count() == b.edge_count()
        && canonical_form(a).certificate == canonical_form(b).certificate
}

fn search(g: &Graph, mut colors: Vec<usize>, best: &mut Option<CanonicalForm>) {
    let cells = refine(g, &mut colors);
    let n = colors.len();
    if cells == n {
        let certificate = certificate(g, &colors);
        if best.as_ref().is_none_or(|b| certificate > b.certificate) {
            *best = Some(CanonicalForm {
                labeling: colors,
                certificate,
            });
        }
        return;
    }

    let mut size = vec![0usize; cells];
    for &c in &colors {
        size[c] += 1;
    }
    let target = (0..cells).find(|&c| size[c] > 1).expect("non-discrete partition");
    let mut tried: Vec<usize> = Vec::new();
    for v in (0..n).filter(|&v| colors[v] == target) {
        if tried.iter().any(|&w| are_twins(g, v, w)) {
            continue;
        }
        let individualized = colors
            .iter()
            .enumerate()
            .map(|(u, &c)| 2 * c + usize::from(u != v))
            .collect();
        search(g, individualized, best);
        tried.push(v);
    }
}

/// Refines `colors` to the coarsest equitable partition below it, relabeling
/// cells densely in a label-independent order. Returns the number of cells.
fn refine(g: &Graph, colors: &mut [usize]) -> usize {
    let n = colors.len();
    let mut cells = rank(colors);
    loop {
        let signatures: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nbr: Vec<usize> = g.neighbors(v).iter().map(|&u| colors[u]).collect();
                nbr.sort_unstable();
                (colors[v], nbr)
            })
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| signatures[a].cmp(&signatures[b]));
        let mut next = 0;
        for (i, &v) in order.iter().enumerate() {
            if i > 0 && signatures[v] != signatures[order[i - 1]] {
                next += 1;
            }
            colors[v] = next;
        }
        let refined = if n == 0 { 0 } else { next + 1 };
        if refined == cells {
            return cells;
        }
        cells = refined;
    }
}

fn rank(colors: &mut [usize]) -> usize {
    let mut distinct: Vec<usize> = colors.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    for c in colors.iter_mut() {
        *c = distinct.binary_search(c).unwrap();
    }
    distinct.len()
}

fn are_twins(g: &Graph, v: usize, w: usize) -> bool {
    let strip = |a: usize, b: usize| g.neighbors(a).iter().copied().filter(move |&x| x != b);
    strip(v, w).eq(strip(w, v))
}

fn certificate(g: &Graph, position: &[usize]) -> Vec<u64> {
    let n = position.len();
    let mut inverse = vec![0; n];
    for (v, &p) in position.iter().enumerate() {
        inverse[p] = v;
    }
    let mut bits = vec![n as u64];
    let mut word = 0u64;
    let mut filled = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            word = (word << 1) | u64::from(g.has_edge(inverse[i], inverse[j]));
            filled += 1;
            if filled == 64 {
                bits.push(word);
                word = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        bits.push(word << (64 - filled));
    }
    bits
}
