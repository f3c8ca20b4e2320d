//! K₀ and K₁ of graph algebras from the stable matrix, the H₀ presentation
//! built from the graph monoid relations, and comparison of pointed groups.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::graph::{Edge, ExtNat, Graph, VertexClass};
use crate::matrix::IntMatrix;
use crate::snf::{hermite_rows, smith_normal_form, Cokernel};

/// A class in K₀, as reduced coordinates in the owning [`K0Data`] basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CokerClass(pub Vec<BigInt>);

impl CokerClass {
    pub fn zero(len: usize) -> CokerClass {
        CokerClass(vec![BigInt::zero(); len])
    }

    pub fn scale(&self, k: i64) -> CokerClass {
        CokerClass(self.0.iter().map(|x| x * k).collect())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.0.iter().map(int_json).collect())
    }
}

impl Add for &CokerClass {
    type Output = CokerClass;
    fn add(self, rhs: &CokerClass) -> CokerClass {
        CokerClass(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &CokerClass {
    type Output = CokerClass;
    fn sub(self, rhs: &CokerClass) -> CokerClass {
        CokerClass(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &CokerClass {
    type Output = CokerClass;
    fn neg(self) -> CokerClass {
        CokerClass(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for CokerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            let x = &self.0[0];
            return if x.is_positive() { write!(f, "+{x}") } else { write!(f, "{x}") };
        }
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

pub(crate) fn int_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(n) => json!(n),
        None => json!(x.to_string()),
    }
}

/// K₀ as a finitely generated abelian group with its distinguished classes.
///
/// Coordinates list torsion components (ascending invariant factors) before
/// free ones. Free coordinates are oriented so that the first singular
/// vertex (or, failing that, the first vertex) with a nonzero free image is
/// positive; this makes the coordinates of a group depend only on the graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K0Data {
    pub invariant_factors: Vec<BigInt>,
    pub free_rank: usize,
    pub vertex_names: Vec<String>,
    pub classes: Vec<CokerClass>,
    pub unit: CokerClass,
    pub k1_rank: usize,
    coker: Cokernel,
}

impl K0Data {
    fn assemble(g: &Graph, coker: Cokernel, invariant_factors: Vec<BigInt>, free_rank: usize, k1_rank: usize) -> K0Data {
        let classes: Vec<CokerClass> = g.vertices().map(|v| CokerClass(coker.unit_vector(v))).collect();
        let ones = vec![BigInt::one(); g.vertex_count()];
        let unit = CokerClass(coker.coordinates(&ones));
        K0Data {
            invariant_factors,
            free_rank,
            vertex_names: g.names().to_vec(),
            classes,
            unit,
            k1_rank,
            coker,
        }
    }

    pub fn class_of(&self, name: &str) -> Option<&CokerClass> {
        let i = self.vertex_names.iter().position(|n| n == name)?;
        Some(&self.classes[i])
    }

    /// Class of an integer combination of vertices.
    pub fn class_of_vector(&self, vec: &[BigInt]) -> Result<CokerClass> {
        if vec.len() != self.vertex_names.len() {
            return Err(Error::LengthMismatch { expected: self.vertex_names.len(), got: vec.len() });
        }
        Ok(CokerClass(self.coker.coordinates(vec)))
    }

    pub fn reduce(&self, c: CokerClass) -> CokerClass {
        CokerClass(self.coker.reduce(c.0))
    }

    pub fn coordinate_count(&self) -> usize {
        self.invariant_factors.len() + self.free_rank
    }

    /// True when the group is ℤ or ℤ/n (or trivial).
    pub fn is_cyclic(&self) -> bool {
        self.coordinate_count() <= 1
    }

    pub fn to_json(&self) -> Value {
        let mut classes = Map::new();
        for (name, c) in self.vertex_names.iter().zip(&self.classes) {
            classes.insert(name.clone(), c.to_json());
        }
        json!({
            "invariant_factors": self.invariant_factors.iter().map(int_json).collect::<Vec<_>>(),
            "free_rank": self.free_rank,
            "classes": Value::Object(classes),
            "unit": self.unit.to_json(),
            "k1_rank": self.k1_rank,
        })
    }

    /// Human-readable group description such as `ℤ ⊕ ℤ/2`.
    pub fn group_string(&self) -> String {
        let mut parts: Vec<String> = self.invariant_factors.iter().map(|d| format!("ℤ/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("ℤ".into()),
            r => parts.push(format!("ℤ^{r}")),
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" ⊕ ")
        }
    }
}

/// Singular vertices first, then regular ones, each in vertex order.
fn orientation_priority(g: &Graph) -> Vec<usize> {
    let (mut singular, regular): (Vec<usize>, Vec<usize>) =
        g.vertices().partition(|&v| g.classify(v).is_singular());
    singular.extend(regular);
    singular
}

/// K₀ as the cokernel of `(A•−I)ᵀ`; K₁ rank as the nullity of that matrix.
pub fn k0_of_graph(g: &Graph) -> Result<K0Data> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let sm = g.stable_matrix();
    let snf = smith_normal_form(&sm.entries);
    let rank = snf.rank();
    let gens: Vec<Vec<BigInt>> = (0..sm.entries.cols()).map(|j| sm.entries.column(j)).collect();
    let coker = Cokernel::from_generators(&gens, g.vertex_count(), &orientation_priority(g));
    let invariant_factors = snf.invariant_factors();
    let free_rank = g.vertex_count() - rank;
    debug_assert_eq!(coker.invariant_factors(), &invariant_factors[..]);
    Ok(K0Data::assemble(g, coker, invariant_factors, free_rank, sm.cols.len() - rank))
}

/// The finite family of edges at an infinite emitter that the H₀
/// presentation names: edges 0 and 1 to each target (edge 1 only where it
/// exists).
fn presentation_edges(g: &Graph, v: usize) -> Vec<Edge> {
    let mut out = Vec::new();
    for (t, m) in g.out_counts(v) {
        out.push(Edge::new(v, t, 0));
        if m == ExtNat::Omega || m > ExtNat::Fin(1) {
            out.push(Edge::new(v, t, 1));
        }
    }
    out
}

/// H₀ of the boundary path groupoid, computed from a finite presentation by
/// vertex generators and `q_S` generators under the group-completed graph
/// monoid relations.
///
/// For each infinite emitter the `q_S` family is truncated to the singletons
/// of [`presentation_edges`] and (when there are several) their union; the
/// omitted generators are ℤ-combinations of these and vertex classes.
pub fn h0_of_graph(g: &Graph) -> Result<K0Data> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let n = g.vertex_count();
    let mut qgens: Vec<(usize, BTreeSet<Edge>)> = Vec::new();
    let mut nesting: Vec<(usize, usize)> = Vec::new();
    for v in g.vertices() {
        if g.classify(v) != VertexClass::InfiniteEmitter {
            continue;
        }
        let named = presentation_edges(g, v);
        let first = qgens.len();
        for e in &named {
            qgens.push((v, BTreeSet::from([*e])));
        }
        if named.len() > 1 {
            let full = qgens.len();
            qgens.push((v, named.iter().copied().collect()));
            nesting.extend((first..full).map(|s| (s, full)));
        }
    }
    let dim = n + qgens.len();
    let zero = || vec![BigInt::zero(); dim];

    // relations (i) and (ii) first: K₁ is read off from these alone
    let mut relations = Vec::new();
    for v in g.regular_vertices() {
        let mut r = zero();
        r[v] += 1;
        for (t, m) in g.out_counts(v) {
            r[t] -= m.finite().expect("regular");
        }
        relations.push(r);
    }
    for (qi, (v, s)) in qgens.iter().enumerate() {
        let mut r = zero();
        r[*v] += 1;
        for e in s {
            r[e.dst] -= 1;
        }
        r[n + qi] -= 1;
        relations.push(r);
    }
    let basic = relations.len();
    for &(small, big) in &nesting {
        let mut r = zero();
        r[n + small] += 1;
        r[n + big] -= 1;
        for e in qgens[big].1.difference(&qgens[small].1) {
            r[e.dst] -= 1;
        }
        relations.push(r);
    }

    let presentation = IntMatrix::from_rows(relations.clone(), dim).transpose();
    let presentation = if relations.is_empty() { IntMatrix::zeros(dim, 0) } else { presentation };
    let snf = smith_normal_form(&presentation);
    let invariant_factors = snf.invariant_factors();
    let free_rank = dim - snf.rank();

    let basic_rank = smith_normal_form(&IntMatrix::from_rows(relations[..basic].to_vec(), dim)).rank();
    let k1_rank = basic - basic_rank;

    // eliminate the q-generators: with q-coordinates leading, the echelon
    // rows whose pivot lies among the vertex coordinates span the relations
    // among vertex classes
    let q = qgens.len();
    let reordered: Vec<Vec<BigInt>> = relations
        .iter()
        .map(|r| r[n..].iter().chain(&r[..n]).cloned().collect())
        .collect();
    let hnf = hermite_rows(&IntMatrix::from_rows(reordered, dim));
    let vertex_relations: Vec<Vec<BigInt>> = (0..hnf.rank)
        .filter(|&i| hnf.pivots[i] >= q)
        .map(|i| hnf.h.row(i)[q..].to_vec())
        .collect();
    let coker = Cokernel::from_generators(&vertex_relations, n, &orientation_priority(g));
    Ok(K0Data::assemble(g, coker, invariant_factors, free_rank, k1_rank))
}

/// Class of `Σ vec[v]·[v]` in K₀(g).
pub fn coker_class(g: &Graph, vec: &[BigInt]) -> Result<CokerClass> {
    k0_of_graph(g)?.class_of_vector(vec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PointedComparison {
    IsoPreservingUnit,
    IsoOnlyFlippingUnit,
    IsoEitherWay,
    NotIsomorphic,
    Undecided,
}

impl PointedComparison {
    pub fn as_str(self) -> &'static str {
        match self {
            PointedComparison::IsoPreservingUnit => "IsoPreservingUnit",
            PointedComparison::IsoOnlyFlippingUnit => "IsoOnlyFlippingUnit",
            PointedComparison::IsoEitherWay => "IsoEitherWay",
            PointedComparison::NotIsomorphic => "NotIsomorphic",
            PointedComparison::Undecided => "Undecided",
        }
    }

    fn from_flags(preserving: bool, flipping: bool) -> PointedComparison {
        match (preserving, flipping) {
            (true, true) => PointedComparison::IsoEitherWay,
            (true, false) => PointedComparison::IsoPreservingUnit,
            (false, true) => PointedComparison::IsoOnlyFlippingUnit,
            (false, false) => PointedComparison::NotIsomorphic,
        }
    }
}

impl fmt::Display for PointedComparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

const FREE_ENTRY_BOUND: i64 = 2;
const SEARCH_LIMIT: u64 = 2_000_000;
const TORSION_ENUMERATION_LIMIT: u64 = 4096;

/// Compares two K₀ groups with their unit classes.
///
/// `IsoOnlyFlippingUnit` means the units correspond under `x ↦ −x` and under
/// no other automorphism; `IsoPreservingUnit` means some automorphism other
/// than `x ↦ −x` (in particular the identity) carries one unit to the other
/// and the flip does not; `IsoEitherWay` means both kinds exist.
/// `NotIsomorphic` covers both non-isomorphic groups and isomorphic groups
/// with no unit-matching automorphism.
pub fn pointed_compare(a: &K0Data, b: &K0Data) -> PointedComparison {
    if a.invariant_factors != b.invariant_factors || a.free_rank != b.free_rank {
        return PointedComparison::NotIsomorphic;
    }
    let ua = &a.unit.0;
    let ub = &b.unit.0;
    let flipped = a.reduce(-&a.unit);
    let flipping = flipped.0 == *ub;
    if ua == ub {
        return PointedComparison::from_flags(true, flipping);
    }
    let t = a.invariant_factors.len();
    let f = a.free_rank;

    if t == 0 {
        // ℤ^f: Aut acts transitively on vectors of equal content; for f ≥ 2
        // the stabilizer is nontrivial, so a non-flip match exists too
        if f == 1 {
            return PointedComparison::from_flags(false, flipping);
        }
        let content = |v: &[BigInt]| v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        return PointedComparison::from_flags(content(ua) == content(ub), flipping);
    }
    if t + f > 3 {
        return PointedComparison::Undecided;
    }
    match search_automorphism(&a.invariant_factors, f, ua, ub) {
        Some(true) => PointedComparison::from_flags(true, flipping),
        Some(false) => PointedComparison::from_flags(false, flipping),
        None => PointedComparison::Undecided,
    }
}

/// Looks for an automorphism of `⊕ℤ/dᵢ ⊕ ℤ^f`, other than `−id`, sending
/// `ua` to `ub`. `Some(false)` is only returned when the search was
/// exhaustive (pure torsion); `None` means not found within bounds.
fn search_automorphism(moduli: &[BigInt], f: usize, ua: &[BigInt], ub: &[BigInt]) -> Option<bool> {
    let t = moduli.len();
    let k = t + f;
    let d: Vec<i64> = moduli.iter().map(|x| x.to_i64()).collect::<Option<_>>()?;
    let ua: Vec<i64> = ua.iter().map(|x| x.to_i64()).collect::<Option<_>>()?;
    let ub: Vec<i64> = ub.iter().map(|x| x.to_i64()).collect::<Option<_>>()?;

    // admissible values for entry (i, j): image of generator j, component i
    let mut choices: Vec<Vec<i64>> = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let vals: Vec<i64> = match (i < t, j < t) {
                (true, true) => {
                    let step = d[i] / d[i].gcd(&d[j]);
                    (0..d[i]).step_by(step as usize).collect()
                }
                (false, true) => vec![0],
                (true, false) => (0..d[i]).collect(),
                (false, false) => (-FREE_ENTRY_BOUND..=FREE_ENTRY_BOUND).collect(),
            };
            choices.push(vals);
        }
    }
    let total: u64 = choices.iter().map(|c| c.len() as u64).try_fold(1u64, |acc, n| acc.checked_mul(n))?;
    let torsion_size: u64 = d.iter().map(|&x| x as u64).product();
    if total > SEARCH_LIMIT || torsion_size > TORSION_ENUMERATION_LIMIT {
        return None;
    }
    let reduce = |v: &mut [i64]| {
        for (x, m) in v.iter_mut().zip(&d) {
            *x = x.rem_euclid(*m);
        }
    };
    let apply = |phi: &[i64], x: &[i64]| -> Vec<i64> {
        let mut y: Vec<i64> = (0..k).map(|i| (0..k).map(|j| phi[i * k + j] * x[j]).sum()).collect();
        reduce(&mut y);
        y
    };
    let mut neg_id = vec![0i64; k * k];
    for i in 0..k {
        neg_id[i * k + i] = if i < t { (d[i] - 1).rem_euclid(d[i]) } else { -1 };
    }

    let mut idx = vec![0usize; k * k];
    let mut phi = vec![0i64; k * k];
    loop {
        for (p, (c, &i)) in phi.iter_mut().zip(choices.iter().zip(&idx)) {
            *p = c[i];
        }
        if phi != neg_id && apply(&phi, &ua) == ub && is_automorphism(&phi, &d, f) {
            return Some(true);
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return if f == 0 { Some(false) } else { None };
            }
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// An endomorphism of `T ⊕ ℤ^f` (T torsion) is bijective iff its torsion
/// block is bijective on T and its free block is unimodular.
fn is_automorphism(phi: &[i64], d: &[i64], f: usize) -> bool {
    let t = d.len();
    let k = t + f;
    if f > 0 {
        let free: Vec<i64> = (t..k).flat_map(|i| (t..k).map(move |j| phi[i * k + j])).collect();
        let m = IntMatrix::from_i64(f, f, &free);
        if m.det().abs() != BigInt::one() {
            return false;
        }
    }
    // injective on T: only 0 maps to 0
    let mut x = vec![0i64; t];
    loop {
        let mut pos = 0;
        loop {
            if pos == t {
                return true;
            }
            x[pos] += 1;
            if x[pos] < d[pos] {
                break;
            }
            x[pos] = 0;
            pos += 1;
        }
        let image_zero = (0..t).all(|i| (0..t).map(|j| phi[i * k + j] * x[j]).sum::<i64>().rem_euclid(d[i]) == 0);
        if image_zero {
            return false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn ints(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn class(xs: &[i64]) -> CokerClass {
        CokerClass(ints(xs))
    }

    #[test]
    fn k0_of_e_infinity() {
        let k = k0_of_graph(&fixtures::e_infinity()).unwrap();
        assert!(k.invariant_factors.is_empty());
        assert_eq!(k.free_rank, 1);
        assert_eq!(k.classes, vec![class(&[1])]);
        assert_eq!(k.unit, class(&[1]));
        assert_eq!(k.k1_rank, 0);
    }

    #[test]
    fn k0_of_e() {
        let k = k0_of_graph(&fixtures::graph_e()).unwrap();
        assert_eq!(k.free_rank, 1);
        assert_eq!(k.class_of("v"), Some(&class(&[-2])));
        assert_eq!(k.class_of("w"), Some(&class(&[1])));
        assert_eq!(k.unit, class(&[-1]));
        assert_eq!(k.k1_rank, 0);
    }

    #[test]
    fn k0_of_f() {
        let k = k0_of_graph(&fixtures::graph_f()).unwrap();
        assert_eq!(k.free_rank, 1);
        assert!(k.invariant_factors.is_empty());
        assert_eq!(k.classes, vec![class(&[-2]), class(&[1]), class(&[1]), class(&[1])]);
        assert_eq!(k.unit, class(&[1]));
    }

    #[test]
    fn k0_of_e_infinity_minus() {
        let k = k0_of_graph(&fixtures::e_infinity_minus()).unwrap();
        assert_eq!(k.free_rank, 1);
        assert_eq!(k.unit, class(&[1]));
        assert_eq!(k.class_of("c"), Some(&class(&[1])));
        assert_eq!(k.class_of("d1"), Some(&class(&[0])));
    }

    #[test]
    fn torsion_example() {
        // one vertex with three loops: K₀ = ℤ/2, unit of order 2
        let g = crate::graph::parse_graph("edge v v 3").unwrap();
        let k = k0_of_graph(&g).unwrap();
        assert_eq!(k.invariant_factors, ints(&[2]));
        assert_eq!(k.free_rank, 0);
        assert_eq!(k.unit, class(&[1]));
        assert_eq!(k.k1_rank, 0);
        // a single loop: K₀ = ℤ, K₁ = ℤ
        let c = crate::graph::parse_graph("edge v v 1").unwrap();
        let kc = k0_of_graph(&c).unwrap();
        assert_eq!((kc.free_rank, kc.k1_rank), (1, 1));
    }

    #[test]
    fn empty_graph_is_rejected() {
        assert_eq!(k0_of_graph(&Graph::new()), Err(Error::EmptyGraph));
        assert_eq!(h0_of_graph(&Graph::new()).unwrap_err(), Error::EmptyGraph);
    }

    #[test]
    fn h0_matches_k0_on_fixtures() {
        for g in fixtures::all().into_iter().map(|(_, g)| g) {
            let k = k0_of_graph(&g).unwrap();
            let h = h0_of_graph(&g).unwrap();
            assert_eq!(k.invariant_factors, h.invariant_factors);
            assert_eq!(k.free_rank, h.free_rank);
            assert_eq!(k.classes, h.classes);
            assert_eq!(k.k1_rank, h.k1_rank);
        }
    }

    #[test]
    fn h0_of_a_sink() {
        let g = crate::graph::parse_graph("vertex s").unwrap();
        let h = h0_of_graph(&g).unwrap();
        assert_eq!(h.free_rank, 1);
        assert_eq!(h.unit, class(&[1]));
    }

    #[test]
    fn coker_class_examples() {
        let e = fixtures::graph_e();
        assert_eq!(coker_class(&e, &ints(&[1, 1])).unwrap(), class(&[-1]));
        assert_eq!(coker_class(&e, &ints(&[1, 2])).unwrap(), class(&[0]));
        assert_eq!(coker_class(&fixtures::graph_f(), &ints(&[1, 1, 1, 1])).unwrap(), class(&[1]));
        assert_eq!(
            coker_class(&e, &ints(&[1])),
            Err(Error::LengthMismatch { expected: 2, got: 1 })
        );
    }

    #[test]
    fn pointed_comparisons() {
        let k = |g: &Graph| k0_of_graph(g).unwrap();
        let (einf, einfm, e, f) = (
            k(&fixtures::e_infinity()),
            k(&fixtures::e_infinity_minus()),
            k(&fixtures::graph_e()),
            k(&fixtures::graph_f()),
        );
        assert_eq!(pointed_compare(&einf, &einfm), PointedComparison::IsoPreservingUnit);
        assert_eq!(pointed_compare(&e, &f), PointedComparison::IsoOnlyFlippingUnit);
        assert_eq!(pointed_compare(&e, &e), PointedComparison::IsoPreservingUnit);
        let torsion = k(&crate::graph::parse_graph("edge v v 3").unwrap());
        assert_eq!(pointed_compare(&e, &torsion), PointedComparison::NotIsomorphic);
    }

    #[test]
    fn pointed_compare_cyclic_torsion() {
        // K₀ = ℤ/4 for one vertex with five loops; unit 1.
        let g = crate::graph::parse_graph("edge v v 5").unwrap();
        let a = k0_of_graph(&g).unwrap();
        assert_eq!(a.invariant_factors, ints(&[4]));
        assert_eq!(pointed_compare(&a, &a), PointedComparison::IsoPreservingUnit);
        let mut b = a.clone();
        b.unit = class(&[3]);
        // 1 ↦ 3 only via multiplication by 3 = −1
        assert_eq!(pointed_compare(&a, &b), PointedComparison::IsoOnlyFlippingUnit);
        b.unit = class(&[2]);
        assert_eq!(pointed_compare(&a, &b), PointedComparison::NotIsomorphic);
    }

    #[test]
    fn pointed_compare_zero_units_match_both_ways() {
        let e = k0_of_graph(&fixtures::graph_e()).unwrap();
        let mut z = e.clone();
        z.unit = class(&[0]);
        assert_eq!(pointed_compare(&z, &z), PointedComparison::IsoEitherWay);
    }

    #[test]
    fn json_layout() {
        let k = k0_of_graph(&fixtures::graph_e()).unwrap();
        assert_eq!(
            k.to_json().to_string(),
            r#"{"invariant_factors":[],"free_rank":1,"classes":{"v":[-2],"w":[1]},"unit":[-1],"k1_rank":0}"#
        );
    }
}
