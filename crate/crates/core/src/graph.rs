//! Directed graphs with edge multiplicities in ℕ ∪ {ω}.
//!
//! Vertices are addressed by their position in the vertex order, which is
//! fixed at construction and drives every matrix and coordinate vector built
//! downstream. Parallel edges are not stored individually: a pair of vertices
//! carries a multiplicity, and individual edges are named `(src, dst, index)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// An extended natural number: a finite count or ω.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtNat {
    Fin(u64),
    Omega,
}

impl ExtNat {
    pub const ZERO: ExtNat = ExtNat::Fin(0);

    pub fn is_zero(self) -> bool {
        self == ExtNat::ZERO
    }

    pub fn is_omega(self) -> bool {
        self == ExtNat::Omega
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            ExtNat::Fin(n) => Some(n),
            ExtNat::Omega => None,
        }
    }
}

impl Add for ExtNat {
    type Output = ExtNat;

    fn add(self, rhs: ExtNat) -> ExtNat {
        match (self, rhs) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => ExtNat::Fin(a + b),
            _ => ExtNat::Omega,
        }
    }
}

impl std::iter::Sum for ExtNat {
    fn sum<I: Iterator<Item = ExtNat>>(iter: I) -> ExtNat {
        iter.fold(ExtNat::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Fin(n) => write!(f, "{n}"),
            ExtNat::Omega => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for ExtNat {
    type Err = Error;

    /// Accepts a positive decimal integer or `inf`.
    fn from_str(s: &str) -> Result<ExtNat> {
        if s == "inf" || s == "ω" {
            return Ok(ExtNat::Omega);
        }
        match s.parse::<u64>() {
            Ok(n) if n > 0 => Ok(ExtNat::Fin(n)),
            _ => Err(Error::Parse(format!("expected a positive count or `inf`, got `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexClass {
    Regular,
    Sink,
    InfiniteEmitter,
}

impl VertexClass {
    pub fn is_singular(self) -> bool {
        self != VertexClass::Regular
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VertexClass::Regular => "Regular",
            VertexClass::Sink => "Sink",
            VertexClass::InfiniteEmitter => "InfiniteEmitter",
        }
    }
}

impl fmt::Display for VertexClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The `index`-th of the parallel edges from `src` to `dst`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub index: u64,
}

impl Edge {
    pub fn new(src: usize, dst: usize, index: u64) -> Edge {
        Edge { src, dst, index }
    }
}

/// Characters that the text formats use as delimiters.
const RESERVED: &[char] = &['.', ',', ':', ';', '{', '}', '(', ')', '|', '*', '+', '=', '\\', '"'];

/// Vertex names are non-empty, contain no whitespace or delimiter characters,
/// and do not start with `#`. A `#` later in the name is reserved for
/// generated vertices (`v#1`, `v#2`, ...).
pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name.starts_with('#')
        && !name.chars().any(|c| c.is_whitespace() || RESERVED.contains(&c))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    mult: BTreeMap<(usize, usize), ExtNat>,
}

impl Graph {
    pub fn new() -> Graph {
        Graph::default()
    }

    /// Builds a graph from named vertices and `(src, dst, count)` triples.
    /// Counts for the same pair accumulate; zero counts are dropped.
    pub fn from_edges<S: Into<String>>(
        vertices: impl IntoIterator<Item = S>,
        edges: impl IntoIterator<Item = (usize, usize, ExtNat)>,
    ) -> Result<Graph> {
        let mut g = Graph::new();
        for name in vertices {
            g.add_vertex(name)?;
        }
        for (u, v, m) in edges {
            g.add_edges(u, v, m)?;
        }
        Ok(g)
    }

    /// Appends a vertex; fails if the name is taken.
    pub fn add_vertex(&mut self, name: impl Into<String>) -> Result<usize> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(Error::InvalidArgument(format!("vertex `{name}` already exists")));
        }
        let id = self.names.len();
        self.index.insert(name.clone(), id);
        self.names.push(name);
        Ok(id)
    }

    pub fn add_edges(&mut self, src: usize, dst: usize, count: ExtNat) -> Result<()> {
        self.check_vertex(src)?;
        self.check_vertex(dst)?;
        if count.is_zero() {
            return Ok(());
        }
        let entry = self.mult.entry((src, dst)).or_insert(ExtNat::ZERO);
        *entry = *entry + count;
        Ok(())
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.names.len() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(format!("#{v}")))
        }
    }

    /// A name of the form `base#k` not yet used in this graph, `k ≥ 1`.
    pub fn fresh_name(&self, base: &str) -> String {
        (1..)
            .map(|k| format!("{base}#{k}"))
            .find(|n| !self.index.contains_key(n))
            .expect("unbounded counter")
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn mult(&self, src: usize, dst: usize) -> ExtNat {
        self.mult.get(&(src, dst)).copied().unwrap_or(ExtNat::ZERO)
    }

    /// All nonzero multiplicities, ordered by `(src, dst)`.
    pub fn edge_counts(&self) -> impl Iterator<Item = (usize, usize, ExtNat)> + '_ {
        self.mult.iter().map(|(&(u, v), &m)| (u, v, m))
    }

    /// Targets of `v` with their multiplicities, in vertex order.
    pub fn out_counts(&self, v: usize) -> impl Iterator<Item = (usize, ExtNat)> + '_ {
        self.mult.range((v, 0)..(v + 1, 0)).map(|(&(_, t), &m)| (t, m))
    }

    pub fn in_counts(&self, v: usize) -> impl Iterator<Item = (usize, ExtNat)> + '_ {
        self.mult
            .iter()
            .filter(move |(&(_, t), _)| t == v)
            .map(|(&(s, _), &m)| (s, m))
    }

    pub fn out_degree(&self, v: usize) -> ExtNat {
        self.out_counts(v).map(|(_, m)| m).sum()
    }

    pub fn classify(&self, v: usize) -> VertexClass {
        match self.out_degree(v) {
            ExtNat::Omega => VertexClass::InfiniteEmitter,
            ExtNat::Fin(0) => VertexClass::Sink,
            ExtNat::Fin(_) => VertexClass::Regular,
        }
    }

    pub fn classify_vertex(&self, name: &str) -> Result<VertexClass> {
        Ok(self.classify(self.vertex(name)?))
    }

    pub fn regular_vertices(&self) -> Vec<usize> {
        self.vertices()
            .filter(|&v| self.classify(v) == VertexClass::Regular)
            .collect()
    }

    pub fn is_edge(&self, e: &Edge) -> bool {
        e.src < self.vertex_count()
            && match self.mult(e.src, e.dst) {
                ExtNat::Omega => true,
                ExtNat::Fin(n) => e.index < n,
            }
    }

    /// Every edge out of `v`, or `None` for an infinite emitter.
    pub fn out_edges(&self, v: usize) -> Option<Vec<Edge>> {
        let mut out = Vec::new();
        for (t, m) in self.out_counts(v) {
            let n = m.finite()?;
            out.extend((0..n).map(|i| Edge::new(v, t, i)));
        }
        Some(out)
    }

    /// Enumerates `vE¹` with a single index: finite-multiplicity targets
    /// first (in vertex order), then the ω targets interleaved round-robin.
    pub fn edge_at(&self, v: usize, local: u64) -> Option<Edge> {
        let mut k = local;
        let mut omega = Vec::new();
        for (t, m) in self.out_counts(v) {
            match m {
                ExtNat::Fin(n) if k < n => return Some(Edge::new(v, t, k)),
                ExtNat::Fin(n) => k -= n,
                ExtNat::Omega => omega.push(t),
            }
        }
        if omega.is_empty() {
            return None;
        }
        let m = omega.len() as u64;
        Some(Edge::new(v, omega[(k % m) as usize], k / m))
    }

    /// Inverse of [`Graph::edge_at`].
    pub fn local_index(&self, e: &Edge) -> Option<u64> {
        if !self.is_edge(e) {
            return None;
        }
        let mut finite_total = 0;
        let mut finite_offset = None;
        let mut omega = Vec::new();
        for (t, m) in self.out_counts(e.src) {
            match m {
                ExtNat::Fin(n) => {
                    if t == e.dst {
                        finite_offset = Some(finite_total);
                    }
                    finite_total += n;
                }
                ExtNat::Omega => omega.push(t),
            }
        }
        if let Some(off) = finite_offset {
            return Some(off + e.index);
        }
        let pos = omega.iter().position(|&t| t == e.dst)? as u64;
        Some(finite_total + e.index * omega.len() as u64 + pos)
    }

    /// `(A•−I)ᵀ`: rows are all vertices, columns the regular vertices, and
    /// entry `(w, v) = A(v, w) − δ(v, w)`.
    pub fn stable_matrix(&self) -> StableMatrix {
        let cols = self.regular_vertices();
        let mut entries = IntMatrix::zeros(self.vertex_count(), cols.len());
        for (j, &v) in cols.iter().enumerate() {
            for (w, m) in self.out_counts(v) {
                let n = m.finite().expect("regular vertices have finite out-degree");
                entries.set(w, j, BigInt::from(n));
            }
            let d = entries.get(v, j) - 1;
            entries.set(v, j, d);
        }
        StableMatrix {
            rows: self.vertices().collect(),
            cols,
            entries,
        }
    }

    /// Canonical text serialization; [`parse_graph`] reads it back.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for name in &self.names {
            out.push_str("vertex ");
            out.push_str(name);
            out.push('\n');
        }
        for (u, v, m) in self.edge_counts() {
            out.push_str(&format!("edge {} {} {}\n", self.names[u], self.names[v], m));
        }
        out
    }

    /// DOT rendering. Multiplicities up to 4 are drawn as parallel edges,
    /// larger ones as a single labeled edge, ω as one edge labeled `∞`.
    pub fn to_dot(&self) -> String {
        if self.is_empty() {
            return "digraph { }\n".to_string();
        }
        let mut out = String::from("digraph {\n");
        for name in &self.names {
            out.push_str(&format!("  {};\n", dot_id(name)));
        }
        for (u, v, m) in self.edge_counts() {
            let (a, b) = (dot_id(&self.names[u]), dot_id(&self.names[v]));
            match m {
                ExtNat::Fin(n) if n <= 4 => {
                    for _ in 0..n {
                        out.push_str(&format!("  {a} -> {b};\n"));
                    }
                }
                ExtNat::Fin(n) => out.push_str(&format!("  {a} -> {b} [label=\"{n}\"];\n")),
                ExtNat::Omega => out.push_str(&format!("  {a} -> {b} [label=\"∞\"];\n")),
            }
        }
        out.push_str("}\n");
        out
    }

    /// Brute-force isomorphism test (multiplicity-preserving vertex
    /// bijection), pruned by out/in degree profiles.
    pub fn is_isomorphic(&self, other: &Graph) -> bool {
        let n = self.vertex_count();
        if n != other.vertex_count() || self.mult.len() != other.mult.len() {
            return false;
        }
        let profile = |g: &Graph, v: usize| {
            let mut outs: Vec<ExtNat> = g.out_counts(v).map(|(_, m)| m).collect();
            let mut ins: Vec<ExtNat> = g.in_counts(v).map(|(_, m)| m).collect();
            outs.sort();
            ins.sort();
            (g.mult(v, v), outs, ins)
        };
        let pa: Vec<_> = self.vertices().map(|v| profile(self, v)).collect();
        let pb: Vec<_> = other.vertices().map(|v| profile(other, v)).collect();
        let mut assign = vec![usize::MAX; n];
        let mut used = vec![false; n];
        self.extend_iso(other, 0, &pa, &pb, &mut assign, &mut used)
    }

    fn extend_iso<P: PartialEq>(
        &self,
        other: &Graph,
        k: usize,
        pa: &[P],
        pb: &[P],
        assign: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if k == assign.len() {
            return true;
        }
        for cand in 0..assign.len() {
            if used[cand] || pa[k] != pb[cand] {
                continue;
            }
            assign[k] = cand;
            let consistent = (0..=k).all(|j| {
                self.mult(k, j) == other.mult(cand, assign[j])
                    && self.mult(j, k) == other.mult(assign[j], cand)
            });
            if consistent {
                used[cand] = true;
                if self.extend_iso(other, k + 1, pa, pb, assign, used) {
                    return true;
                }
                used[cand] = false;
            }
        }
        assign[k] = usize::MAX;
        false
    }
}

fn dot_id(name: &str) -> String {
    format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
}

/// `(A•−I)ᵀ` together with its row and column vertex labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableMatrix {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub entries: IntMatrix,
}

impl StableMatrix {
    pub fn shape(&self) -> (usize, usize) {
        (self.entries.rows(), self.entries.cols())
    }
}

/// Parses the line-oriented graph format:
///
/// ```text
/// # comment
/// vertex NAME
/// edge SRC DST COUNT      # COUNT: positive integer or `inf`
/// ```
///
/// Vertex order is first appearance. Repeated edge lines accumulate.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut g = Graph::new();
    let mut declared = std::collections::HashSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        let syntax = |msg: String| Error::Syntax { line, msg };
        match toks[0] {
            "vertex" => {
                let [_, name] = toks[..] else {
                    return Err(syntax("expected `vertex NAME`".into()));
                };
                check_name(name, line)?;
                if !declared.insert(name.to_string()) {
                    return Err(Error::DuplicateVertex { line, name: name.to_string() });
                }
                intern(&mut g, name)?;
            }
            "edge" => {
                let [_, src, dst, count] = toks[..] else {
                    return Err(syntax("expected `edge SRC DST COUNT`".into()));
                };
                check_name(src, line)?;
                check_name(dst, line)?;
                let count: ExtNat = count.parse().map_err(|_| Error::BadCount {
                    line,
                    literal: count.to_string(),
                })?;
                let u = intern(&mut g, src)?;
                let v = intern(&mut g, dst)?;
                g.add_edges(u, v, count)?;
            }
            other => return Err(syntax(format!("unknown directive `{other}`"))),
        }
    }
    Ok(g)
}

fn check_name(name: &str, line: usize) -> Result<()> {
    if is_valid_name(name) {
        Ok(())
    } else {
        Err(Error::Syntax { line, msg: format!("invalid vertex name `{name}`") })
    }
}

fn intern(g: &mut Graph, name: &str) -> Result<usize> {
    match g.vertex(name) {
        Ok(v) => Ok(v),
        Err(_) => g.add_vertex(name),
    }
}
