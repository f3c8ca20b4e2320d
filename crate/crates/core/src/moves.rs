//! Graph moves: outsplitting, source addition, and finite fan attachment.
//!
//! Generated vertices are named `parent#k` with the smallest unused `k ≥ 1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{ExtNat, Graph};

/// A partition of the edges leaving `vertex`. Each part records, per target,
/// how many of the edges to that target it contains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutPartition {
    pub vertex: usize,
    pub parts: Vec<BTreeMap<usize, ExtNat>>,
}

impl OutPartition {
    pub fn new(vertex: usize, parts: Vec<BTreeMap<usize, ExtNat>>) -> OutPartition {
        let parts = parts
            .into_iter()
            .map(|p| p.into_iter().filter(|(_, c)| !c.is_zero()).collect())
            .collect();
        OutPartition { vertex, parts }
    }

    /// Checks the partition against `g`.
    ///
    /// Besides summing to the out-multiplicities, all infinite edge sets must
    /// land in a single part; splitting ω edges across two parts creates an
    /// extra singular vertex and changes K₀.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let v = self.vertex;
        if v >= g.vertex_count() {
            return Err(Error::UnknownVertex(format!("#{v}")));
        }
        if g.out_degree(v).is_zero() {
            return Err(Error::SinkSplit(g.name(v).to_string()));
        }
        let bad = |msg: String| Err(Error::InvalidPartition(msg));
        if self.parts.is_empty() {
            return bad("no parts".into());
        }
        for (i, p) in self.parts.iter().enumerate() {
            if p.is_empty() {
                return bad(format!("part {} is empty", i + 1));
            }
            if let Some(&t) = p.keys().find(|&&t| t >= g.vertex_count()) {
                return bad(format!("unknown target #{t}"));
            }
        }
        let targets: BTreeSet<usize> = self
            .parts
            .iter()
            .flat_map(|p| p.keys().copied())
            .chain(g.out_counts(v).map(|(t, _)| t))
            .collect();
        for t in targets {
            let counts: Vec<ExtNat> = self.parts.iter().map(|p| p.get(&t).copied().unwrap_or(ExtNat::ZERO)).collect();
            let total: ExtNat = counts.iter().copied().sum();
            let expected = g.mult(v, t);
            if total != expected {
                return bad(format!(
                    "edges to `{}` sum to {total}, graph has {expected}",
                    g.name(t)
                ));
            }
            if expected.is_omega() && counts.iter().filter(|c| c.is_omega()).count() != 1 {
                return bad(format!("infinitely many edges to `{}` must lie in exactly one part", g.name(t)));
            }
        }
        let infinite_parts = self.parts.iter().filter(|p| p.values().any(|c| c.is_omega())).count();
        if infinite_parts > 1 {
            return bad("at most one part may contain infinitely many edges".into());
        }
        Ok(())
    }

    /// Parses `v = {t1:c1, t2:c2} | {t3:inf}`; counts are positive integers
    /// or `inf`.
    pub fn parse(g: &Graph, text: &str) -> Result<OutPartition> {
        let (head, body) = text
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected `VERTEX = {{...}} | ...`, got `{text}`")))?;
        let vertex = g.vertex(head.trim())?;
        let mut parts = Vec::new();
        for raw in body.split('|') {
            let inner = raw
                .trim()
                .strip_prefix('{')
                .and_then(|s| s.strip_suffix('}'))
                .ok_or_else(|| Error::Parse(format!("expected `{{target:count, ...}}`, got `{}`", raw.trim())))?;
            let mut part = BTreeMap::new();
            for item in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (t, c) = item
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("expected `target:count`, got `{item}`")))?;
                let t = g.vertex(t.trim())?;
                let c: ExtNat = c.trim().parse()?;
                let slot = part.entry(t).or_insert(ExtNat::ZERO);
                *slot = *slot + c;
            }
            parts.push(part);
        }
        Ok(OutPartition::new(vertex, parts))
    }

    pub fn display<'a>(&'a self, g: &'a Graph) -> impl fmt::Display + 'a {
        PartitionDisplay { p: self, g }
    }
}

struct PartitionDisplay<'a> {
    p: &'a OutPartition,
    g: &'a Graph,
}

impl fmt::Display for PartitionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = ", self.g.name(self.p.vertex))?;
        for (i, part) in self.p.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            let items: Vec<String> = part.iter().map(|(&t, c)| format!("{}:{c}", self.g.name(t))).collect();
            write!(f, "{{{}}}", items.join(", "))?;
        }
        Ok(())
    }
}

/// `n` distinct names `base#k` absent from `g`.
fn fresh_names(g: &Graph, base: &str, n: usize) -> Vec<String> {
    (1..)
        .map(|k| format!("{base}#{k}"))
        .filter(|name| g.vertex(name).is_err())
        .take(n)
        .collect()
}

/// Replaces the split vertex by one copy per part. Copies sit where the
/// vertex was in the vertex order and are named `v#1, …, v#n`.
pub fn outsplit(g: &Graph, p: &OutPartition) -> Result<Graph> {
    p.validate(g)?;
    let v = p.vertex;
    let n = p.parts.len();
    let copies = fresh_names(g, g.name(v), n);

    let mut out = Graph::new();
    let mut image: Vec<Vec<usize>> = Vec::with_capacity(g.vertex_count());
    for u in g.vertices() {
        if u == v {
            let ids = copies.iter().map(|c| out.add_vertex(c.clone())).collect::<Result<Vec<_>>>()?;
            image.push(ids);
        } else {
            image.push(vec![out.add_vertex(g.name(u))?]);
        }
    }
    for (u, t, m) in g.edge_counts() {
        if u == v {
            continue;
        }
        for &t2 in &image[t] {
            out.add_edges(image[u][0], t2, m)?;
        }
    }
    for (i, part) in p.parts.iter().enumerate() {
        let src = image[v][i];
        for (&t, &c) in part {
            for &t2 in &image[t] {
                out.add_edges(src, t2, c)?;
            }
        }
    }
    Ok(out)
}

/// Appends `n` sources, each emitting one edge to `v`.
pub fn add_sources(g: &Graph, v: usize, n: usize) -> Result<Graph> {
    if v >= g.vertex_count() {
        return Err(Error::UnknownVertex(format!("#{v}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("number of sources must be at least 1".into()));
    }
    let mut out = g.clone();
    for name in fresh_names(g, g.name(v), n) {
        let s = out.add_vertex(name)?;
        out.add_edges(s, v, ExtNat::Fin(1))?;
    }
    Ok(out)
}

/// Depth-one truncation of the infinite fan: `n` new sources at every vertex.
pub fn attach_fan_approx(g: &Graph, n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidArgument("fan size must be at least 1".into()));
    }
    let mut out = g.clone();
    for v in g.vertices() {
        out = add_sources(&out, v, n)?;
    }
    Ok(out)
}
