//! Line-oriented text formats for graphs and pooling results.
//!
//! A graph file starts with `nodes N features F`, followed by one
//! `edge u v` line per edge and, when `F > 0`, one `feat i v1 ... vF` line
//! per node. A result file starts with `result 1`, then the pooled graph in
//! the same form, then the assignment, trace and diversity log. Reals are
//! written in shortest round-trip form. Blank lines and `#` comments are
//! ignored on read.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{build_assignment, AssignmentMatrix, ContractionTrace, Graph};
use crate::pool::{DiversitySnapshot, PoolingResult, StepLog};

const RESULT_HEADER: &str = "result 1";

pub fn format_graph(g: &Graph) -> String {
    let mut out = String::new();
    write_graph_section(&mut out, g);
    out
}

fn write_graph_section(out: &mut String, g: &Graph) {
    writeln!(out, "nodes {} features {}", g.node_count(), g.feature_dim()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "edge {u} {v}").unwrap();
    }
    if let Some(f) = g.features() {
        for (i, row) in f.row_iter().enumerate() {
            write!(out, "feat {i}").unwrap();
            for x in row.iter() {
                write!(out, " {x}").unwrap();
            }
            out.push('\n');
        }
    }
}

pub fn format_result(r: &PoolingResult) -> String {
    let mut out = String::from(RESULT_HEADER);
    out.push('\n');
    write_graph_section(&mut out, &r.pooled);
    writeln!(out, "original {}", r.assignment.node_count()).unwrap();
    for (i, &j) in r.assignment.as_slice().iter().enumerate() {
        writeln!(out, "assign {i} {j}").unwrap();
    }
    let mut boundaries = r.trace.rescoring_boundaries.iter().peekable();
    for (k, (keep, gone)) in r.trace.merges.iter().enumerate() {
        while boundaries.next_if(|&&b| b == k).is_some() {
            writeln!(out, "round {k}").unwrap();
        }
        writeln!(out, "merge {keep} {gone}").unwrap();
    }
    for b in boundaries {
        writeln!(out, "round {b}").unwrap();
    }
    writeln!(out, "exhausted {}", r.exhausted).unwrap();
    writeln!(out, "unscoreable {}", r.unscoreable_edges).unwrap();
    if let Some(s) = r.initial {
        writeln!(out, "initial {}", snapshot_fields(&s)).unwrap();
    }
    for step in &r.diversity_log {
        writeln!(
            out,
            "step {} {} {} {} {}",
            step.round,
            step.merge.0,
            step.merge.1,
            snapshot_fields(&step.before),
            snapshot_fields(&step.after)
        )
        .unwrap();
    }
    out
}

fn snapshot_fields(s: &DiversitySnapshot) -> String {
    match s.magnitude {
        Some(m) => format!("{m} {}", s.spread),
        None => format!("none {}", s.spread),
    }
}

struct Lines<'a> {
    source: &'a str,
}

impl Lines<'_> {
    fn err(&self, line: usize, reason: impl Into<String>) -> Error {
        Error::MalformedLine {
            file: self.source.to_string(),
            line,
            reason: reason.into(),
        }
    }

    fn parse<T: std::str::FromStr>(&self, line: usize, field: Option<&str>, what: &str) -> Result<T> {
        let field = field.ok_or_else(|| self.err(line, format!("missing {what}")))?;
        field
            .parse()
            .map_err(|_| self.err(line, format!("invalid {what} {field:?}")))
    }

    fn done(&self, line: usize, mut rest: std::str::SplitWhitespace) -> Result<()> {
        match rest.next() {
            Some(extra) => Err(self.err(line, format!("unexpected trailing field {extra:?}"))),
            None => Ok(()),
        }
    }
}

#[derive(Default)]
struct GraphSection {
    header: Option<(usize, usize)>,
    edges: Vec<(usize, usize)>,
    features: Vec<Option<Vec<f64>>>,
}

impl GraphSection {
    /// Consumes one graph line; returns false for keywords it does not own.
    fn accept(&mut self, ctx: &Lines, no: usize, keyword: &str, mut rest: std::str::SplitWhitespace) -> Result<bool> {
        match keyword {
            "nodes" => {
                if self.header.is_some() {
                    return Err(ctx.err(no, "duplicate nodes header"));
                }
                let n: usize = ctx.parse(no, rest.next(), "node count")?;
                if rest.next() != Some("features") {
                    return Err(ctx.err(no, "expected `nodes N features F`"));
                }
                let f: usize = ctx.parse(no, rest.next(), "feature count")?;
                ctx.done(no, rest)?;
                self.header = Some((n, f));
                self.features = vec![None; if f > 0 { n } else { 0 }];
            }
            "edge" => {
                let (n, _) = self.header.ok_or_else(|| ctx.err(no, "edge before nodes header"))?;
                let u: usize = ctx.parse(no, rest.next(), "endpoint")?;
                let v: usize = ctx.parse(no, rest.next(), "endpoint")?;
                ctx.done(no, rest)?;
                for x in [u, v] {
                    if x >= n {
                        return Err(Error::IndexOutOfRange { index: x, size: n });
                    }
                }
                if u == v {
                    return Err(ctx.err(no, format!("self-loop on node {u}")));
                }
                self.edges.push((u, v));
            }
            "feat" => {
                let (n, f) = self.header.ok_or_else(|| ctx.err(no, "feat before nodes header"))?;
                let i: usize = ctx.parse(no, rest.next(), "node index")?;
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i, size: n });
                }
                let values = rest
                    .map(|x| ctx.parse(no, Some(x), "feature value"))
                    .collect::<Result<Vec<f64>>>()?;
                if values.len() != f {
                    return Err(ctx.err(no, format!("expected {f} feature values, found {}", values.len())));
                }
                if f == 0 || self.features[i].is_some() {
                    return Err(ctx.err(no, format!("unexpected feat line for node {i}")));
                }
                self.features[i] = Some(values);
            }
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn finish(self, source: &str) -> Result<Graph> {
        let (n, f) = self
            .header
            .ok_or_else(|| Error::SchemaMismatch(format!("{source}: missing `nodes N features F` header")))?;
        let g = Graph::new(n, self.edges)?;
        if f == 0 {
            return Ok(g);
        }
        let mut m = DMatrix::zeros(n, f);
        for (i, row) in self.features.into_iter().enumerate() {
            let row = row.ok_or_else(|| Error::SchemaMismatch(format!("{source}: node {i} has no feat line")))?;
            for (j, x) in row.into_iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        g.with_features(m)
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub fn parse_graph(text: &str, source: &str) -> Result<Graph> {
    let ctx = Lines { source };
    let mut section = GraphSection::default();
    for (no, line) in content_lines(text) {
        let mut fields = line.split_whitespace();
        let keyword = fields.next().unwrap();
        if !section.accept(&ctx, no, keyword, fields)? {
            return Err(ctx.err(no, format!("unknown keyword {keyword:?}")));
        }
    }
    section.finish(source)
}

pub fn parse_result(text: &str, source: &str) -> Result<PoolingResult> {
    let ctx = Lines { source };
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, RESULT_HEADER)) => {}
        _ => return Err(Error::SchemaMismatch(format!("{source}: missing `{RESULT_HEADER}` header"))),
    }
    let mut section = GraphSection::default();
    let mut original: Option<usize> = None;
    let mut assign: Vec<Option<usize>> = Vec::new();
    let mut trace = ContractionTrace::default();
    let mut exhausted = None;
    let mut unscoreable = 0;
    let mut initial = None;
    let mut log = Vec::new();

    for (no, line) in lines {
        let mut fields = line.split_whitespace();
        let keyword = fields.next().unwrap();
        if section.accept(&ctx, no, keyword, fields.clone())? {
            continue;
        }
        match keyword {
            "original" => {
                let n: usize = ctx.parse(no, fields.next(), "node count")?;
                ctx.done(no, fields)?;
                original = Some(n);
                assign = vec![None; n];
            }
            "assign" => {
                let n = original.ok_or_else(|| ctx.err(no, "assign before original"))?;
                let i: usize = ctx.parse(no, fields.next(), "node index")?;
                let j: usize = ctx.parse(no, fields.next(), "super-node index")?;
                ctx.done(no, fields)?;
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i, size: n });
                }
                assign[i] = Some(j);
            }
            "round" => {
                let start: usize = ctx.parse(no, fields.next(), "round start")?;
                ctx.done(no, fields)?;
                trace.rescoring_boundaries.push(start);
            }
            "merge" => {
                let a: usize = ctx.parse(no, fields.next(), "node index")?;
                let b: usize = ctx.parse(no, fields.next(), "node index")?;
                ctx.done(no, fields)?;
                trace.merges.push((a, b));
            }
            "exhausted" => {
                exhausted = Some(ctx.parse(no, fields.next(), "flag")?);
                ctx.done(no, fields)?;
            }
            "unscoreable" => {
                unscoreable = ctx.parse(no, fields.next(), "count")?;
                ctx.done(no, fields)?;
            }
            "initial" => {
                initial = Some(parse_snapshot(&ctx, no, &mut fields)?);
                ctx.done(no, fields)?;
            }
            "step" => {
                let round = ctx.parse(no, fields.next(), "round")?;
                let a = ctx.parse(no, fields.next(), "node index")?;
                let b = ctx.parse(no, fields.next(), "node index")?;
                let before = parse_snapshot(&ctx, no, &mut fields)?;
                let after = parse_snapshot(&ctx, no, &mut fields)?;
                ctx.done(no, fields)?;
                log.push(StepLog {
                    round,
                    merge: (a, b),
                    before,
                    after,
                });
            }
            other => return Err(ctx.err(no, format!("unknown keyword {other:?}"))),
        }
    }

    let pooled = section.finish(source)?;
    let n = original.ok_or_else(|| Error::SchemaMismatch(format!("{source}: missing original node count")))?;
    let assign = assign
        .into_iter()
        .enumerate()
        .map(|(i, j)| j.ok_or_else(|| Error::SchemaMismatch(format!("{source}: node {i} has no assignment"))))
        .collect::<Result<Vec<usize>>>()?;
    let assignment = AssignmentMatrix::from_vec(assign, pooled.node_count())?;
    if build_assignment(&trace, n)? != assignment {
        return Err(Error::SchemaMismatch(format!("{source}: assignment does not match the merge trace")));
    }
    Ok(PoolingResult {
        pooled_features: pooled.features().cloned(),
        pooled,
        assignment,
        trace,
        initial,
        diversity_log: log,
        exhausted: exhausted.ok_or_else(|| Error::SchemaMismatch(format!("{source}: missing exhausted flag")))?,
        unscoreable_edges: unscoreable,
    })
}

fn parse_snapshot(ctx: &Lines, no: usize, fields: &mut std::str::SplitWhitespace) -> Result<DiversitySnapshot> {
    let magnitude = match fields.next() {
        Some("none") => None,
        other => Some(ctx.parse(no, other, "magnitude")?),
    };
    Ok(DiversitySnapshot {
        magnitude,
        spread: ctx.parse(no, fields.next(), "spread")?,
    })
}

fn read_text(path: &Path) -> Result<String> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    Ok(std::fs::read_to_string(path)?)
}

/// Reads a graph file, or the pooled graph of a result file.
pub fn read_graph(path: &Path) -> Result<Graph> {
    let text = read_text(path)?;
    let source = path.display().to_string();
    if content_lines(&text).next().map(|(_, l)| l) == Some(RESULT_HEADER) {
        return Ok(parse_result(&text, &source)?.pooled);
    }
    parse_graph(&text, &source)
}

pub fn write_graph(path: &Path, g: &Graph) -> Result<()> {
    Ok(std::fs::write(path, format_graph(g))?)
}

pub fn read_result(path: &Path) -> Result<PoolingResult> {
    parse_result(&read_text(path)?, &path.display().to_string())
}

pub fn write_result(path: &Path, r: &PoolingResult) -> Result<()> {
    Ok(std::fs::write(path, format_result(r))?)
}
