//! Matrix-equivalence certificates `U·B·V = C` with determinant and
//! unit-vector side conditions, their verification, a bounded search, and
//! the sign report comparing two graphs.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ktheory::{int_json, k0_of_graph, pointed_compare, K0Data, PointedComparison};
use crate::matrix::IntMatrix;
use crate::moves::add_sources;
use crate::snf::smith_normal_form;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DetRequirement {
    Plus,
    Minus,
    Either,
}

impl DetRequirement {
    pub fn accepts(self, det: &BigInt) -> bool {
        match self {
            DetRequirement::Plus => det.is_one(),
            DetRequirement::Minus => *det == -BigInt::one(),
            DetRequirement::Either => det.is_one() || *det == -BigInt::one(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DetRequirement::Plus => "+1",
            DetRequirement::Minus => "-1",
            DetRequirement::Either => "either",
        }
    }

    pub fn parse(s: &str) -> Result<DetRequirement> {
        match s.trim() {
            "+1" | "1" | "plus" => Ok(DetRequirement::Plus),
            "-1" | "minus" => Ok(DetRequirement::Minus),
            "either" | "any" | "±1" => Ok(DetRequirement::Either),
            other => Err(Error::Parse(format!("determinant requirement must be +1, -1 or either, got `{other}`"))),
        }
    }

    /// Allowed number of row swaps in the search (each swap flips the sign).
    fn allows_swaps(self, swaps: u8) -> bool {
        match self {
            DetRequirement::Plus => swaps == 0,
            DetRequirement::Minus => swaps == 1,
            DetRequirement::Either => swaps <= 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub det_u: DetRequirement,
    pub unit_src: Option<Vec<BigInt>>,
    pub unit_tgt: Option<Vec<BigInt>>,
}

impl Certificate {
    pub fn to_json(&self) -> Value {
        let mat = |m: &IntMatrix| -> Value {
            Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(int_json).collect())).collect())
        };
        let vec = |v: &Option<Vec<BigInt>>| -> Value {
            match v {
                Some(v) => Value::Array(v.iter().map(int_json).collect()),
                None => Value::Null,
            }
        };
        json!({
            "u": mat(&self.u),
            "v": mat(&self.v),
            "det_u": self.det_u.as_str(),
            "unit_src": vec(&self.unit_src),
            "unit_tgt": vec(&self.unit_tgt),
        })
    }
}

/// Reads a JSON integer matrix given as an array of rows.
pub fn matrix_from_json(v: &Value) -> Result<IntMatrix> {
    let rows = v.as_array().ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))?;
    let parsed: Vec<Vec<BigInt>> = rows.iter().map(vector_from_json).collect::<Result<_>>()?;
    let cols = parsed.first().map_or(0, Vec::len);
    if parsed.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("matrix rows have different lengths".into()));
    }
    Ok(IntMatrix::from_rows(parsed, cols))
}

pub fn vector_from_json(v: &Value) -> Result<Vec<BigInt>> {
    let items = v.as_array().ok_or_else(|| Error::Parse("expected an array of integers".into()))?;
    items
        .iter()
        .map(|x| match x {
            Value::Number(n) => n
                .as_i64()
                .map(BigInt::from)
                .ok_or_else(|| Error::Parse(format!("not an integer: {n}"))),
            Value::String(s) => s.parse().map_err(|_| Error::Parse(format!("not an integer: {s}"))),
            other => Err(Error::Parse(format!("not an integer: {other}"))),
        })
        .collect()
}

/// Parses `{"u": [[..]], "v": [[..]], "det_u": "+1", "unit_src": [..], "unit_tgt": [..]}`;
/// `det_u` defaults to `either`, unit vectors are optional.
pub fn certificate_from_json(v: &Value) -> Result<Certificate> {
    let field = |k: &str| v.get(k).filter(|x| !x.is_null());
    let u = matrix_from_json(field("u").ok_or_else(|| Error::Parse("certificate lacks `u`".into()))?)?;
    let vm = matrix_from_json(field("v").ok_or_else(|| Error::Parse("certificate lacks `v`".into()))?)?;
    let det_u = match field("det_u") {
        Some(Value::String(s)) => DetRequirement::parse(s)?,
        Some(Value::Number(n)) => DetRequirement::parse(&n.to_string())?,
        Some(other) => return Err(Error::Parse(format!("bad det_u: {other}"))),
        None => DetRequirement::Either,
    };
    let unit_src = field("unit_src").map(vector_from_json).transpose()?;
    let unit_tgt = field("unit_tgt").map(vector_from_json).transpose()?;
    Ok(Certificate { u, v: vm, det_u, unit_src, unit_tgt })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verification {
    Valid,
    Invalid(String),
}

impl Verification {
    pub fn is_valid(&self) -> bool {
        *self == Verification::Valid
    }
}

impl fmt::Display for Verification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verification::Valid => f.write_str("Valid"),
            Verification::Invalid(r) => write!(f, "Invalid({r})"),
        }
    }
}

/// `x ∈ col(m)`?
fn in_column_space(m: &IntMatrix, x: &[BigInt]) -> bool {
    let snf = smith_normal_form(m);
    let y = snf.u.mul_vec(x);
    let d = snf.diagonal();
    y.iter().enumerate().all(|(i, yi)| match d.get(i) {
        Some(di) if !di.is_zero() => yi.is_multiple_of(di),
        _ => yi.is_zero(),
    })
}

pub fn verify_certificate(b: &IntMatrix, c: &IntMatrix, cert: &Certificate) -> Result<Verification> {
    if b.shape() != c.shape() {
        return Err(Error::ShapeMismatch(format!("B is {:?}, C is {:?}", b.shape(), c.shape())));
    }
    let (rows, cols) = b.shape();
    let invalid = |r: String| Ok(Verification::Invalid(r));
    if cert.u.shape() != (rows, rows) {
        return invalid(format!("U must be {rows}x{rows}, is {:?}", cert.u.shape()));
    }
    if cert.v.shape() != (cols, cols) {
        return invalid(format!("V must be {cols}x{cols}, is {:?}", cert.v.shape()));
    }
    let det_v = cert.v.det();
    if !det_v.is_one() {
        return invalid(format!("det mismatch: det V = {det_v}, must be 1"));
    }
    let det_u = cert.u.det();
    if !cert.det_u.accepts(&det_u) {
        return invalid(format!("det mismatch: det U = {det_u}, required {}", cert.det_u.as_str()));
    }
    if &(&cert.u * b) * &cert.v != *c {
        return invalid("U·B·V differs from C".into());
    }
    match (&cert.unit_src, &cert.unit_tgt) {
        (None, None) => {}
        (Some(src), Some(tgt)) => {
            if src.len() != rows || tgt.len() != rows {
                return invalid(format!("unit vectors must have length {rows}"));
            }
            let image = cert.u.mul_vec(src);
            let diff: Vec<BigInt> = image.iter().zip(tgt).map(|(a, b)| a - b).collect();
            if !in_column_space(c, &diff) {
                return invalid("U·unit_src is not congruent to unit_tgt modulo the columns of C".into());
            }
        }
        _ => return invalid("unit_src and unit_tgt must be given together".into()),
    }
    Ok(Verification::Valid)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found { certificate: Certificate, word_length: usize },
    NotFoundWithinBound,
}

/// Per-side cap on visited states.
pub const SEARCH_STATE_LIMIT: usize = 250_000;
const ENTRY_LIMIT: i64 = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    /// `row[dst] += k · row[src]`
    RowAdd { dst: usize, src: usize, k: i64 },
    /// `col[dst] += k · col[src]`
    ColAdd { dst: usize, src: usize, k: i64 },
    RowSwap { a: usize, b: usize },
}

impl Op {
    fn inverse(self) -> Op {
        match self {
            Op::RowAdd { dst, src, k } => Op::RowAdd { dst, src, k: -k },
            Op::ColAdd { dst, src, k } => Op::ColAdd { dst, src, k: -k },
            swap => swap,
        }
    }
}

/// Dense `i64` matrix used inside the search.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Small {
    rows: usize,
    cols: usize,
    a: Vec<i64>,
}

impl Small {
    fn identity(n: usize) -> Small {
        let mut a = vec![0; n * n];
        for i in 0..n {
            a[i * n + i] = 1;
        }
        Small { rows: n, cols: n, a }
    }

    fn from_int(m: &IntMatrix) -> Option<Small> {
        let rows = m.to_i64_rows()?;
        Some(Small { rows: m.rows(), cols: m.cols(), a: rows.into_iter().flatten().collect() })
    }

    fn to_int(&self) -> IntMatrix {
        IntMatrix::from_i64(self.rows, self.cols, &self.a)
    }

    fn row_add(&mut self, dst: usize, src: usize, k: i64) -> Option<()> {
        for j in 0..self.cols {
            let x = self.a[dst * self.cols + j].checked_add(k * self.a[src * self.cols + j])?;
            if x.abs() > ENTRY_LIMIT {
                return None;
            }
            self.a[dst * self.cols + j] = x;
        }
        Some(())
    }

    fn col_add(&mut self, dst: usize, src: usize, k: i64) -> Option<()> {
        for i in 0..self.rows {
            let x = self.a[i * self.cols + dst].checked_add(k * self.a[i * self.cols + src])?;
            if x.abs() > ENTRY_LIMIT {
                return None;
            }
            self.a[i * self.cols + dst] = x;
        }
        Some(())
    }

    fn swap_rows(&mut self, r: usize, s: usize) {
        for j in 0..self.cols {
            self.a.swap(r * self.cols + j, s * self.cols + j);
        }
    }

    /// Left-multiplies by the elementary matrix of a row operation.
    fn apply_row(&mut self, op: Op) -> Option<()> {
        match op {
            Op::RowAdd { dst, src, k } => self.row_add(dst, src, k),
            Op::RowSwap { a, b } => {
                self.swap_rows(a, b);
                Some(())
            }
            Op::ColAdd { .. } => unreachable!("not a row operation"),
        }
    }

    /// Right-multiplies by the elementary matrix of a row operation, i.e.
    /// applies the transposed action on columns: `M·E`.
    fn right_mul_row_op(&mut self, op: Op) -> Option<()> {
        match op {
            // E = I + k·e_{dst,src}: M·E adds k·col[dst] to col[src]
            Op::RowAdd { dst, src, k } => self.col_add(src, dst, k),
            Op::RowSwap { a, b } => {
                for i in 0..self.rows {
                    self.a.swap(i * self.cols + a, i * self.cols + b);
                }
                Some(())
            }
            Op::ColAdd { .. } => unreachable!("not a row operation"),
        }
    }
}

fn vec_row_op(y: &mut [i64], op: Op) -> Option<()> {
    if y.is_empty() {
        return Some(());
    }
    match op {
        Op::RowAdd { dst, src, k } => {
            y[dst] = y[dst].checked_add(k * y[src])?;
            Some(())
        }
        Op::RowSwap { a, b } => {
            y.swap(a, b);
            Some(())
        }
        Op::ColAdd { .. } => Some(()),
    }
}

#[derive(Clone, Debug)]
struct Entry {
    x: Small,
    swaps: u8,
    y: Vec<i64>,
    u: Small,
    v: Small,
    depth: usize,
}

type Key = (Small, u8, Vec<i64>);

struct Side {
    entries: Vec<Entry>,
    index: HashMap<Key, usize>,
    by_matrix: HashMap<Small, Vec<usize>>,
    frontier: Vec<usize>,
    depth: usize,
}

impl Side {
    fn new(start: Entry) -> Side {
        let mut s = Side {
            entries: Vec::new(),
            index: HashMap::new(),
            by_matrix: HashMap::new(),
            frontier: Vec::new(),
            depth: 0,
        };
        let id = s.insert(start).expect("fresh side");
        s.frontier.push(id);
        s
    }

    fn insert(&mut self, e: Entry) -> Option<usize> {
        let key = (e.x.clone(), e.swaps, e.y.clone());
        if self.index.contains_key(&key) {
            return None;
        }
        let id = self.entries.len();
        self.index.insert(key, id);
        self.by_matrix.entry(e.x.clone()).or_default().push(id);
        self.entries.push(e);
        Some(id)
    }
}

fn operations(rows: usize, cols: usize, with_swaps: bool) -> Vec<Op> {
    let mut ops = Vec::new();
    for dst in 0..rows {
        for src in 0..rows {
            if dst != src {
                ops.push(Op::RowAdd { dst, src, k: 1 });
                ops.push(Op::RowAdd { dst, src, k: -1 });
            }
        }
    }
    for dst in 0..cols {
        for src in 0..cols {
            if dst != src {
                ops.push(Op::ColAdd { dst, src, k: 1 });
                ops.push(Op::ColAdd { dst, src, k: -1 });
            }
        }
    }
    if with_swaps {
        for a in 0..rows {
            for b in a + 1..rows {
                ops.push(Op::RowSwap { a, b });
            }
        }
    }
    ops
}

/// Searches for `U`, `V` with `U·B·V = C`, `det V = 1` and `det U` as
/// required, built from at most `bound` elementary operations (±1
/// transvections on rows and columns, plus at most one row swap).
pub fn search_certificate(b: &IntMatrix, c: &IntMatrix, det: DetRequirement, bound: usize) -> Result<SearchOutcome> {
    search_certificate_pointed(b, c, det, bound, None)
}

/// As [`search_certificate`], additionally requiring
/// `U·unit_src ≡ unit_tgt` modulo the columns of `C`.
pub fn search_certificate_pointed(
    b: &IntMatrix,
    c: &IntMatrix,
    det: DetRequirement,
    bound: usize,
    units: Option<(&[BigInt], &[BigInt])>,
) -> Result<SearchOutcome> {
    if b.shape() != c.shape() {
        return Err(Error::ShapeMismatch(format!("B is {:?}, C is {:?}", b.shape(), c.shape())));
    }
    let (rows, cols) = b.shape();
    if let Some((s, t)) = units {
        if s.len() != rows || t.len() != rows {
            return Err(Error::LengthMismatch { expected: rows, got: s.len().min(t.len()) });
        }
    }
    let (Some(bs), Some(cs)) = (Small::from_int(b), Small::from_int(c)) else {
        return Ok(SearchOutcome::NotFoundWithinBound);
    };
    let to_small_vec = |v: &[BigInt]| v.iter().map(|x| x.to_i64()).collect::<Option<Vec<i64>>>();
    let (ys, yt) = match units {
        Some((s, t)) => match (to_small_vec(s), to_small_vec(t)) {
            (Some(s), Some(t)) => (s, t),
            _ => return Ok(SearchOutcome::NotFoundWithinBound),
        },
        None => (Vec::new(), Vec::new()),
    };
    let pointed = units.is_some();

    let mut sides = [
        Side::new(Entry { x: bs, swaps: 0, y: ys, u: Small::identity(rows), v: Small::identity(cols), depth: 0 }),
        Side::new(Entry { x: cs, swaps: 0, y: yt, u: Small::identity(rows), v: Small::identity(cols), depth: 0 }),
    ];
    let ops = operations(rows, cols, det != DetRequirement::Plus);

    // a meeting of forward entry f and backward entry g
    let accept = |f: &Entry, g: &Entry| -> Option<Certificate> {
        if !det.allows_swaps(f.swaps + g.swaps) {
            return None;
        }
        if pointed {
            let diff: Vec<BigInt> = f.y.iter().zip(&g.y).map(|(a, b)| BigInt::from(a - b)).collect();
            if !in_column_space(&f.x.to_int(), &diff) {
                return None;
            }
        }
        let u = &g.u.to_int() * &f.u.to_int();
        let v = &f.v.to_int() * &g.v.to_int();
        Some(Certificate {
            u,
            v,
            det_u: det,
            unit_src: units.map(|(s, _)| s.to_vec()),
            unit_tgt: units.map(|(_, t)| t.to_vec()),
        })
    };
    let finish = |cert: Certificate, len: usize| -> Result<SearchOutcome> {
        let check = verify_certificate(b, c, &cert)?;
        assert!(check.is_valid(), "search produced a rejected certificate: {check}");
        Ok(SearchOutcome::Found { certificate: cert, word_length: len })
    };

    if let Some(cert) = accept(&sides[0].entries[0], &sides[1].entries[0]).filter(|_| sides[0].entries[0].x == sides[1].entries[0].x) {
        return finish(cert, 0);
    }

    while sides[0].depth + sides[1].depth < bound {
        let s = if sides[0].frontier.len() <= sides[1].frontier.len() { 0 } else { 1 };
        if sides[s].frontier.is_empty() {
            break;
        }
        let frontier = std::mem::take(&mut sides[s].frontier);
        let mut next = Vec::new();
        let mut best: Option<(usize, Certificate)> = None;
        for id in frontier {
            let cur = sides[s].entries[id].clone();
            for &op in &ops {
                if matches!(op, Op::RowSwap { .. }) && cur.swaps >= 1 {
                    continue;
                }
                let Some(e) = step(&cur, op, s == 1) else { continue };
                if let Some(others) = sides[1 - s].by_matrix.get(&e.x) {
                    for &oid in others {
                        let o = &sides[1 - s].entries[oid];
                        let (f, g) = if s == 0 { (&e, o) } else { (o, &e) };
                        let len = e.depth + o.depth;
                        if best.as_ref().is_none_or(|(l, _)| len < *l) {
                            if let Some(cert) = accept(f, g) {
                                best = Some((len, cert));
                            }
                        }
                    }
                }
                if let Some(nid) = sides[s].insert(e) {
                    next.push(nid);
                }
            }
            if sides[s].entries.len() > SEARCH_STATE_LIMIT {
                break;
            }
        }
        if let Some((len, cert)) = best {
            return finish(cert, len);
        }
        if sides[s].entries.len() > SEARCH_STATE_LIMIT {
            return Ok(SearchOutcome::NotFoundWithinBound);
        }
        sides[s].frontier = next;
        sides[s].depth += 1;
    }
    Ok(SearchOutcome::NotFoundWithinBound)
}

/// One elementary step. Forward: `X ↦ E·X` (or `X·F`), `U ↦ E·U`,
/// `V ↦ V·F`. Backward (towards B from C, keeping `C = U·X·V`):
/// `X ↦ E·X`, `U ↦ U·E⁻¹`, `V ↦ F⁻¹·V`, and `y ↦ E·y` for `y = U⁻¹·t`.
fn step(cur: &Entry, op: Op, backward: bool) -> Option<Entry> {
    let mut e = cur.clone();
    e.depth += 1;
    match op {
        Op::ColAdd { dst, src, k } => {
            e.x.col_add(dst, src, k)?;
            if backward {
                // F = I + k·e_{src,dst}; F⁻¹·V adds −k·row[dst] to row[src]
                e.v.row_add(src, dst, -k)?;
            } else {
                e.v.col_add(dst, src, k)?;
            }
        }
        _ => {
            e.x.apply_row(op)?;
            vec_row_op(&mut e.y, op)?;
            if backward {
                e.u.right_mul_row_op(op.inverse())?;
            } else {
                e.u.apply_row(op)?;
            }
            if let Op::RowSwap { .. } = op {
                e.swaps += 1;
            }
        }
    }
    Some(e)
}

/// Outcome of a certificate search for one determinant sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignAttempt {
    pub det_u: DetRequirement,
    pub outcome: SearchOutcome,
}

/// Sources appended to one side: (target vertex name, count).
pub type Padding = (String, usize);

#[derive(Clone, Debug)]
pub struct SignReport {
    pub names: (String, String),
    pub k0: (K0Data, K0Data),
    pub comparison: PointedComparison,
    /// Sources appended to each side to equalize shapes.
    pub padding: (Option<Padding>, Option<Padding>),
    pub shapes: ((usize, usize), (usize, usize)),
    pub bound: usize,
    /// `None` when the stable matrices cannot be aligned by adding sources.
    pub attempts: Option<Vec<SignAttempt>>,
}

/// First singular vertex, else the first vertex.
fn padding_target(g: &Graph) -> usize {
    g.vertices().find(|&v| g.classify(v).is_singular()).unwrap_or(0)
}

fn pad(g: &Graph, n: usize) -> Result<(Graph, Option<Padding>)> {
    if n == 0 {
        return Ok((g.clone(), None));
    }
    let t = padding_target(g);
    Ok((add_sources(g, t, n)?, Some((g.name(t).to_string(), n))))
}

/// Compares two graphs: K₀ with units, pointed comparison, and certificate
/// searches for `det U = +1` and `det U = −1` carrying the unit of the first
/// graph to the unit of the second.
///
/// Stable matrices of different shape are aligned only by appending sources
/// (one row and one column each) to the smaller graph; the new sources do
/// not contribute to that graph's unit vector.
pub fn sign_report(a: &Graph, b: &Graph, names: (&str, &str), bound: usize) -> Result<SignReport> {
    let ka = k0_of_graph(a)?;
    let kb = k0_of_graph(b)?;
    let comparison = pointed_compare(&ka, &kb);
    let sa = a.stable_matrix().shape();
    let sb = b.stable_matrix().shape();
    let gap_a = sa.0 as i64 - sa.1 as i64;
    let gap_b = sb.0 as i64 - sb.1 as i64;

    let mut report = SignReport {
        names: (names.0.to_string(), names.1.to_string()),
        k0: (ka, kb),
        comparison,
        padding: (None, None),
        shapes: (sa, sb),
        bound,
        attempts: None,
    };
    if gap_a != gap_b {
        return Ok(report);
    }
    let (pa, pb) = if sa.0 <= sb.0 { (sb.0 - sa.0, 0) } else { (0, sa.0 - sb.0) };
    let (ga, pad_a) = pad(a, pa)?;
    let (gb, pad_b) = pad(b, pb)?;
    report.padding = (pad_a, pad_b);

    let unit = |g: &Graph, extra: usize| -> Vec<BigInt> {
        let mut v = vec![BigInt::one(); g.vertex_count()];
        v.extend(std::iter::repeat_n(BigInt::zero(), extra));
        v
    };
    let ua = unit(a, pa);
    let ub = unit(b, pb);
    let (mb, mc) = (ga.stable_matrix().entries, gb.stable_matrix().entries);
    let mut attempts = Vec::new();
    for det in [DetRequirement::Plus, DetRequirement::Minus] {
        let outcome = search_certificate_pointed(&mb, &mc, det, bound, Some((&ua, &ub)))?;
        attempts.push(SignAttempt { det_u: det, outcome });
    }
    report.attempts = Some(attempts);
    Ok(report)
}

impl SignReport {
    pub fn to_json(&self) -> Value {
        let attempts = self.attempts.as_ref().map(|list| {
            list.iter()
                .map(|a| match &a.outcome {
                    SearchOutcome::Found { certificate, word_length } => json!({
                        "det_u": a.det_u.as_str(),
                        "result": "Found",
                        "word_length": word_length,
                        "certificate": certificate.to_json(),
                    }),
                    SearchOutcome::NotFoundWithinBound => json!({
                        "det_u": a.det_u.as_str(),
                        "result": "NotFoundWithinBound",
                    }),
                })
                .collect::<Vec<_>>()
        });
        let pad = |p: &Option<Padding>| match p {
            Some((t, n)) => json!({"target": t, "sources": n}),
            None => Value::Null,
        };
        json!({
            "graphs": [self.names.0, self.names.1],
            "k0": [self.k0.0.to_json(), self.k0.1.to_json()],
            "pointed_compare": self.comparison.as_str(),
            "stable_shapes": [[self.shapes.0 .0, self.shapes.0 .1], [self.shapes.1 .0, self.shapes.1 .1]],
            "padding": [pad(&self.padding.0), pad(&self.padding.1)],
            "bound": self.bound,
            "certificates": attempts,
        })
    }

    pub fn to_text(&self) -> String {
        let (a, b) = &self.names;
        let mut out = String::new();
        for (name, k) in [(a, &self.k0.0), (b, &self.k0.1)] {
            out.push_str(&format!("K0({name}) = {}, unit {}, K1 rank {}\n", k.group_string(), k.unit, k.k1_rank));
        }
        out.push_str(&format!("pointed comparison ({a}, {b}): {}\n", self.comparison));
        match &self.attempts {
            None => out.push_str(&format!(
                "stable matrices {:?} and {:?} cannot be aligned by adding sources\n",
                self.shapes.0, self.shapes.1
            )),
            Some(list) => {
                for (name, p) in [(a, &self.padding.0), (b, &self.padding.1)] {
                    if let Some((t, n)) = p {
                        out.push_str(&format!("padded {name} with {n} source(s) at {t}\n"));
                    }
                }
                for att in list {
                    match &att.outcome {
                        SearchOutcome::Found { word_length, .. } => out.push_str(&format!(
                            "det U = {}: unit-matching certificate found at word length {word_length}\n",
                            att.det_u.as_str()
                        )),
                        SearchOutcome::NotFoundWithinBound => out.push_str(&format!(
                            "det U = {}: no unit-matching certificate within word length {}\n",
                            att.det_u.as_str(),
                            self.bound
                        )),
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn m(rows: usize, cols: usize, xs: &[i64]) -> IntMatrix {
        IntMatrix::from_i64(rows, cols, xs)
    }

    fn cert(u: IntMatrix, v: IntMatrix, det_u: DetRequirement) -> Certificate {
        Certificate { u, v, det_u, unit_src: None, unit_tgt: None }
    }

    #[test]
    fn identity_certificate() {
        let b = m(2, 1, &[1, 2]);
        let c = cert(IntMatrix::identity(2), IntMatrix::identity(1), DetRequirement::Plus);
        assert_eq!(verify_certificate(&b, &b, &c).unwrap(), Verification::Valid);
    }

    #[test]
    fn det_minus_one_certificate() {
        let b = m(2, 1, &[1, 2]);
        let c = m(2, 1, &[1, 0]);
        let good = cert(m(2, 2, &[1, 0, 2, -1]), IntMatrix::identity(1), DetRequirement::Minus);
        assert_eq!(verify_certificate(&b, &c, &good).unwrap(), Verification::Valid);
        let wrong_sign = cert(m(2, 2, &[1, 0, -2, 1]), IntMatrix::identity(1), DetRequirement::Minus);
        match verify_certificate(&b, &c, &wrong_sign).unwrap() {
            Verification::Invalid(r) => assert!(r.contains("det mismatch") && r.contains("det U = 1")),
            Verification::Valid => panic!("accepted a det +1 certificate"),
        }
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let c = cert(IntMatrix::identity(2), IntMatrix::identity(1), DetRequirement::Plus);
        assert!(matches!(
            verify_certificate(&m(2, 1, &[1, 2]), &m(1, 1, &[1]), &c),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            search_certificate(&m(2, 1, &[1, 2]), &m(1, 1, &[1]), DetRequirement::Plus, 3),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn unit_congruence() {
        let b = m(2, 1, &[1, 2]);
        let mut c = cert(IntMatrix::identity(2), IntMatrix::identity(1), DetRequirement::Plus);
        c.unit_src = Some(vec![1.into(), 1.into()]);
        // (1,1) ≡ (0,-1) since (1,2) is a column
        c.unit_tgt = Some(vec![0.into(), (-1).into()]);
        assert!(verify_certificate(&b, &b, &c).unwrap().is_valid());
        c.unit_tgt = Some(vec![0.into(), 1.into()]);
        assert!(!verify_certificate(&b, &b, &c).unwrap().is_valid());
    }

    #[test]
    fn search_examples() {
        let b = m(2, 1, &[1, 2]);
        match search_certificate(&b, &b, DetRequirement::Plus, 6).unwrap() {
            SearchOutcome::Found { certificate, word_length } => {
                assert_eq!(word_length, 0);
                assert_eq!(certificate.u, IntMatrix::identity(2));
            }
            other => panic!("{other:?}"),
        }
        match search_certificate(&b, &m(2, 1, &[1, 0]), DetRequirement::Plus, 6).unwrap() {
            SearchOutcome::Found { certificate, word_length } => {
                assert_eq!(word_length, 2);
                assert_eq!(certificate.u, m(2, 2, &[1, 0, -2, 1]));
                assert_eq!(certificate.v, IntMatrix::identity(1));
            }
            other => panic!("{other:?}"),
        }
        match search_certificate(&b, &m(2, 1, &[1, 1]), DetRequirement::Plus, 6).unwrap() {
            SearchOutcome::Found { certificate, word_length } => {
                assert_eq!(word_length, 1);
                assert_eq!(certificate.u, m(2, 2, &[1, 0, -1, 1]));
            }
            other => panic!("{other:?}"),
        }
        match search_certificate(&b, &m(2, 1, &[1, 0]), DetRequirement::Minus, 6).unwrap() {
            SearchOutcome::Found { certificate, .. } => assert_eq!(certificate.u.det(), BigInt::from(-1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn search_reports_not_found() {
        // different invariant factors: no certificate exists at all
        let b = m(2, 2, &[1, 0, 0, 1]);
        let c = m(2, 2, &[2, 0, 0, 1]);
        assert_eq!(
            search_certificate(&b, &c, DetRequirement::Either, 4).unwrap(),
            SearchOutcome::NotFoundWithinBound
        );
    }

    #[test]
    fn column_operations_are_tracked() {
        let b = m(1, 2, &[1, 1]);
        let c = m(1, 2, &[1, 0]);
        match search_certificate(&b, &c, DetRequirement::Plus, 3).unwrap() {
            SearchOutcome::Found { certificate, word_length } => {
                assert_eq!(word_length, 1);
                assert_eq!(certificate.v, m(2, 2, &[1, -1, 0, 1]));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let c = Certificate {
            u: m(2, 2, &[1, 0, 2, -1]),
            v: IntMatrix::identity(1),
            det_u: DetRequirement::Minus,
            unit_src: Some(vec![1.into(), 1.into()]),
            unit_tgt: None,
        };
        assert_eq!(certificate_from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn report_on_e_infinity_with_itself() {
        let g = fixtures::e_infinity();
        let r = sign_report(&g, &g, ("E(inf)", "E(inf)"), 4).unwrap();
        assert_eq!(r.comparison, PointedComparison::IsoPreservingUnit);
        let attempts = r.attempts.unwrap();
        assert!(matches!(attempts[0].outcome, SearchOutcome::Found { word_length: 0, .. }));
    }

    #[test]
    fn report_on_e_and_f() {
        let r = sign_report(&fixtures::graph_e(), &fixtures::graph_f(), ("E", "F"), 4).unwrap();
        assert_eq!(r.comparison, PointedComparison::IsoOnlyFlippingUnit);
        assert_eq!(r.padding.0, Some(("w".to_string(), 2)));
        assert!(r.attempts.is_some());
        assert!(r.to_text().contains("IsoOnlyFlippingUnit"));
    }
}
