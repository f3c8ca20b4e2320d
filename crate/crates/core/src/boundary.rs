//! Compact-open subsets of the boundary path space `∂E`.
//!
//! `∂E` consists of the infinite paths and the finite paths ending at a
//! singular vertex. A generalized cylinder `Z(μ∖S)` is the set of boundary
//! paths extending `μ` that do not continue through an edge of the finite
//! set `S ⊆ r(μ)E¹`. Finite disjoint unions of these form a Boolean algebra
//! (relative to each compact piece), and every set operation here returns
//! such a disjoint union in sorted order.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, VertexClass};
use crate::monoid::{local_edge_label, parse_local_edge, MonGen, MonoidElement};

/// A finite path; the empty path at `base` when `edges` is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub base: usize,
    pub edges: Vec<Edge>,
}

impl Path {
    pub fn vertex(v: usize) -> Path {
        Path { base: v, edges: Vec::new() }
    }

    pub fn range(&self) -> usize {
        self.edges.last().map_or(self.base, |e| e.dst)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn extended(&self, e: Edge) -> Path {
        let mut p = self.clone();
        p.edges.push(e);
        p
    }

    pub fn is_prefix_of(&self, other: &Path) -> bool {
        self.base == other.base && other.edges.starts_with(&self.edges)
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.base >= g.vertex_count() {
            return Err(Error::AmbientMismatch(format!("vertex #{} out of range", self.base)));
        }
        let mut at = self.base;
        for e in &self.edges {
            if e.src != at || !g.is_edge(e) {
                return Err(Error::AmbientMismatch(format!("edge {e:?} does not continue the path")));
            }
            at = e.dst;
        }
        Ok(())
    }

    fn write(&self, g: &Graph, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(g.name(self.base))?;
        for e in &self.edges {
            write!(f, ".{}", local_edge_label(g, e))?;
        }
        Ok(())
    }
}

/// `Z(μ∖S)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GenCylinder {
    pub mu: Path,
    pub s: BTreeSet<Edge>,
}

impl GenCylinder {
    pub fn new(mu: Path, s: impl IntoIterator<Item = Edge>) -> GenCylinder {
        GenCylinder { mu, s: s.into_iter().collect() }
    }

    /// `Z(μ)`
    pub fn full(mu: Path) -> GenCylinder {
        GenCylinder { mu, s: BTreeSet::new() }
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        self.mu.validate(g)?;
        let r = self.mu.range();
        match self.s.iter().find(|e| e.src != r || !g.is_edge(e)) {
            Some(e) => Err(Error::AmbientMismatch(format!("excluded edge {e:?} does not leave r(μ)"))),
            None => Ok(()),
        }
    }

    /// Empty exactly when `r(μ)` is regular and `S` is all of `r(μ)E¹`.
    pub fn is_empty_in(&self, g: &Graph) -> bool {
        let r = self.mu.range();
        g.classify(r) == VertexClass::Regular
            && g.out_degree(r).finite() == Some(self.s.len() as u64)
    }

    fn sort_key(&self) -> (usize, &Path, &BTreeSet<Edge>) {
        (self.mu.len(), &self.mu, &self.s)
    }

    pub fn display<'a>(&'a self, g: &'a Graph) -> impl fmt::Display + 'a {
        CylinderDisplay { c: self, g }
    }

    /// Parses `Z(v.e0.e1 \ {e2, e3})`; edges are local indices `eK` at the
    /// vertex reached so far.
    pub fn parse(g: &Graph, text: &str) -> Result<GenCylinder> {
        let t = text.trim();
        let inner = t
            .strip_prefix("Z(")
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("expected `Z(path \\ {{edges}})`, got `{t}`")))?;
        let (path_text, excl) = match inner.split_once('\\') {
            Some((p, s)) => (p.trim(), Some(s.trim())),
            None => (inner.trim(), None),
        };
        let mut toks = path_text.split('.');
        let base = g.vertex(toks.next().unwrap_or_default().trim())?;
        let mut mu = Path::vertex(base);
        for tok in toks {
            let e = parse_local_edge(g, mu.range(), tok.trim())?;
            mu.edges.push(e);
        }
        let mut s = BTreeSet::new();
        if let Some(excl) = excl {
            let body = excl
                .strip_prefix('{')
                .and_then(|x| x.strip_suffix('}'))
                .ok_or_else(|| Error::Parse(format!("expected `{{e0, ...}}`, got `{excl}`")))?;
            for tok in body.split(',').map(str::trim).filter(|x| !x.is_empty()) {
                s.insert(parse_local_edge(g, mu.range(), tok)?);
            }
        }
        Ok(GenCylinder { mu, s })
    }
}

impl Ord for GenCylinder {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for GenCylinder {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct CylinderDisplay<'a> {
    c: &'a GenCylinder,
    g: &'a Graph,
}

impl fmt::Display for CylinderDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Z(")?;
        self.c.mu.write(self.g, f)?;
        if !self.c.s.is_empty() {
            let s: Vec<String> = self.c.s.iter().map(|e| local_edge_label(self.g, e)).collect();
            write!(f, " \\ {{{}}}", s.join(", "))?;
        }
        f.write_str(")")
    }
}

/// A finite union of pairwise disjoint, nonempty cylinders, sorted by path
/// length, then path, then excluded set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CylinderUnion {
    parts: Vec<GenCylinder>,
}

impl CylinderUnion {
    pub fn empty() -> CylinderUnion {
        CylinderUnion::default()
    }

    /// Wraps parts that are already known to be pairwise disjoint; empty
    /// cylinders are dropped.
    pub fn from_disjoint(g: &Graph, parts: impl IntoIterator<Item = GenCylinder>) -> CylinderUnion {
        let mut parts: Vec<GenCylinder> = parts.into_iter().filter(|c| !c.is_empty_in(g)).collect();
        parts.sort();
        CylinderUnion { parts }
    }

    pub fn cylinder(g: &Graph, c: GenCylinder) -> Result<CylinderUnion> {
        c.validate(g)?;
        Ok(CylinderUnion::from_disjoint(g, [c]))
    }

    pub fn parts(&self) -> &[GenCylinder] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        self.parts.iter().try_for_each(|c| c.validate(g))
    }

    /// Parses cylinders joined by `+`, e.g. `Z(c \ {e0}) + Z(c.e0.e1)`. The
    /// pieces need not be disjoint; they are unioned in order.
    pub fn parse(g: &Graph, text: &str) -> Result<CylinderUnion> {
        let mut acc = CylinderUnion::empty();
        if text.trim() == "0" || text.trim() == "∅" {
            return Ok(acc);
        }
        for piece in split_cylinders(text) {
            let c = CylinderUnion::cylinder(g, GenCylinder::parse(g, piece)?)?;
            acc = union(g, &acc, &c)?;
        }
        Ok(acc)
    }

    pub fn display<'a>(&'a self, g: &'a Graph) -> impl fmt::Display + 'a {
        UnionDisplay { u: self, g }
    }
}

fn split_cylinders(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            '+' if depth == 0 => {
                out.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(text[start..].trim());
    out
}

struct UnionDisplay<'a> {
    u: &'a CylinderUnion,
    g: &'a Graph,
}

impl fmt::Display for UnionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.u.parts.is_empty() {
            return f.write_str("∅");
        }
        for (i, c) in self.u.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}", c.display(self.g))?;
        }
        Ok(())
    }
}

/// `a ∩ b` for two cylinders.
pub fn intersect(g: &Graph, a: &GenCylinder, b: &GenCylinder) -> Result<CylinderUnion> {
    a.validate(g)?;
    b.validate(g)?;
    Ok(CylinderUnion::from_disjoint(g, intersect_raw(a, b)))
}

fn intersect_raw(a: &GenCylinder, b: &GenCylinder) -> Option<GenCylinder> {
    if a.mu == b.mu {
        return Some(GenCylinder { mu: a.mu.clone(), s: a.s.union(&b.s).copied().collect() });
    }
    let (short, long) = if a.mu.is_prefix_of(&b.mu) {
        (a, b)
    } else if b.mu.is_prefix_of(&a.mu) {
        (b, a)
    } else {
        return None;
    };
    let next = long.mu.edges[short.mu.len()];
    (!short.s.contains(&next)).then(|| long.clone())
}

pub fn intersect_unions(g: &Graph, a: &CylinderUnion, b: &CylinderUnion) -> Result<CylinderUnion> {
    a.validate(g)?;
    b.validate(g)?;
    let parts = a
        .parts
        .iter()
        .flat_map(|x| b.parts.iter().filter_map(move |y| intersect_raw(x, y)));
    Ok(CylinderUnion::from_disjoint(g, parts))
}

/// `a ∖ b` as disjoint cylinders, peeling `a` along `b`'s path only as far
/// as needed: `Z(μ∖S) = Z(μ∖(S∪{e})) ⊔ Z(μe)` for `e ∉ S`.
fn cylinder_minus(g: &Graph, a: &GenCylinder, b: &GenCylinder) -> Vec<GenCylinder> {
    if a.mu == b.mu {
        return b
            .s
            .difference(&a.s)
            .map(|&e| GenCylinder::full(a.mu.extended(e)))
            .collect();
    }
    if b.mu.is_prefix_of(&a.mu) {
        let next = a.mu.edges[b.mu.len()];
        return if b.s.contains(&next) { vec![a.clone()] } else { Vec::new() };
    }
    if a.mu.is_prefix_of(&b.mu) {
        let next = b.mu.edges[a.mu.len()];
        if a.s.contains(&next) {
            return vec![a.clone()];
        }
        let mut rest_s = a.s.clone();
        rest_s.insert(next);
        let rest = GenCylinder { mu: a.mu.clone(), s: rest_s };
        let mut out = Vec::new();
        if !rest.is_empty_in(g) {
            out.push(rest);
        }
        out.extend(cylinder_minus(g, &GenCylinder::full(a.mu.extended(next)), b));
        return out;
    }
    vec![a.clone()]
}

/// `a ∖ b`.
pub fn subtract(g: &Graph, a: &CylinderUnion, b: &CylinderUnion) -> Result<CylinderUnion> {
    a.validate(g)?;
    b.validate(g)?;
    let mut cur = a.parts.clone();
    for y in &b.parts {
        cur = cur.iter().flat_map(|x| cylinder_minus(g, x, y)).collect();
    }
    Ok(CylinderUnion::from_disjoint(g, cur))
}

/// `a ∪ b`, computed as `a ⊔ (b ∖ a)`.
pub fn union(g: &Graph, a: &CylinderUnion, b: &CylinderUnion) -> Result<CylinderUnion> {
    let extra = subtract(g, b, a)?;
    Ok(CylinderUnion::from_disjoint(g, a.parts.iter().cloned().chain(extra.parts)))
}

/// `∂E = ⊔_v Z(v)`.
pub fn full_space(g: &Graph) -> Result<CylinderUnion> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(CylinderUnion::from_disjoint(g, g.vertices().map(|v| GenCylinder::full(Path::vertex(v)))))
}

pub fn complement(g: &Graph, a: &CylinderUnion) -> Result<CylinderUnion> {
    subtract(g, &full_space(g)?, a)
}

/// A finite path describing boundary paths: with `terminal` set it is the
/// single finite boundary path itself (its range must be singular);
/// otherwise it stands for all boundary paths that properly extend it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoundaryPrefix {
    pub path: Path,
    pub terminal: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Membership {
    In,
    Out,
    /// Some extensions of the prefix are in the set and some are not (or the
    /// prefix is too short to tell).
    InsufficientDepth,
}

pub fn member(g: &Graph, x: &BoundaryPrefix, u: &CylinderUnion) -> Result<Membership> {
    x.path.validate(g).map_err(|e| Error::InvalidPrefix(e.to_string()))?;
    let r = x.path.range();
    if x.terminal && !g.classify(r).is_singular() {
        return Err(Error::InvalidPrefix(format!(
            "a terminal boundary path must end at a singular vertex, `{}` is regular",
            g.name(r)
        )));
    }
    if !x.terminal && g.classify(r) == VertexClass::Sink {
        return Err(Error::InvalidPrefix(format!("nothing extends past the sink `{}`", g.name(r))));
    }
    u.validate(g)?;
    let mut unsure = false;
    for c in &u.parts {
        let verdict = if c.mu.is_prefix_of(&x.path) {
            if x.path.len() > c.mu.len() {
                let next = x.path.edges[c.mu.len()];
                if c.s.contains(&next) { Membership::Out } else { Membership::In }
            } else if x.terminal || c.s.is_empty() {
                Membership::In
            } else {
                Membership::InsufficientDepth
            }
        } else if x.path.is_prefix_of(&c.mu) {
            if x.terminal { Membership::Out } else { Membership::InsufficientDepth }
        } else {
            Membership::Out
        };
        match verdict {
            Membership::In => return Ok(Membership::In),
            Membership::InsufficientDepth => unsure = true,
            Membership::Out => {}
        }
    }
    Ok(if unsure { Membership::InsufficientDepth } else { Membership::Out })
}

/// The graph monoid element a disjoint union of cylinders represents:
/// `Z(μ)` gives `r(μ)`; `Z(μ∖S)` with `r(μ)` regular gives
/// `Σ_{e ∈ r(μ)E¹∖S} r(e)`; with `r(μ)` an infinite emitter it gives `q_S`.
pub fn monoid_class_of(g: &Graph, u: &CylinderUnion) -> Result<MonoidElement> {
    u.validate(g)?;
    let mut out = MonoidElement::zero();
    for c in &u.parts {
        let r = c.mu.range();
        if c.s.is_empty() {
            out.add_gen(MonGen::V(r), 1);
            continue;
        }
        match g.classify(r) {
            VertexClass::Regular => {
                for e in g.out_edges(r).expect("regular").iter().filter(|e| !c.s.contains(e)) {
                    out.add_gen(MonGen::V(e.dst), 1);
                }
            }
            VertexClass::InfiniteEmitter => out.add_gen(MonGen::Q(r, c.s.clone()), 1),
            VertexClass::Sink => unreachable!("validated: sinks have no edges to exclude"),
        }
    }
    Ok(out)
}
