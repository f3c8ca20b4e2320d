#![allow(dead_code)]

use std::collections::BTreeMap;

use diagk::moves::OutPartition;
use diagk::{ExtNat, Graph};
use rand::seq::SliceRandom;
use rand::Rng;

/// Random graph on `1..=max_vertices` vertices. Each ordered pair gets an
/// edge count in `0..=max_mult` with probability `density`; each vertex
/// independently becomes an infinite emitter with probability `p_emitter`.
pub fn random_graph<R: Rng>(rng: &mut R, max_vertices: usize, max_mult: u64, density: f64, p_emitter: f64) -> Graph {
    let n = rng.gen_range(1..=max_vertices);
    let mut edges = Vec::new();
    for u in 0..n {
        for w in 0..n {
            if rng.gen_bool(density) {
                let m = rng.gen_range(0..=max_mult);
                edges.push((u, w, ExtNat::Fin(m)));
            }
        }
        if rng.gen_bool(p_emitter) {
            edges.push((u, rng.gen_range(0..n), ExtNat::Omega));
        }
    }
    Graph::from_edges((0..n).map(|i| format!("v{i}")), edges).expect("valid random graph")
}

/// A random valid out-split partition of some non-sink vertex, if any.
pub fn random_partition<R: Rng>(rng: &mut R, g: &Graph) -> Option<OutPartition> {
    let candidates: Vec<usize> = g.vertices().filter(|&v| !g.out_degree(v).is_zero()).collect();
    let &v = candidates.choose(rng)?;
    for _ in 0..20 {
        let k = rng.gen_range(1..=3usize);
        let mut parts = vec![BTreeMap::new(); k];
        let omega_part = rng.gen_range(0..k);
        for (t, m) in g.out_counts(v) {
            match m {
                ExtNat::Omega => {
                    parts[omega_part].insert(t, ExtNat::Omega);
                }
                ExtNat::Fin(n) => {
                    for _ in 0..n {
                        let i = rng.gen_range(0..k);
                        let c = parts[i].entry(t).or_insert(ExtNat::Fin(0));
                        *c = *c + ExtNat::Fin(1);
                    }
                }
            }
        }
        let p = OutPartition::new(v, parts);
        if p.validate(g).is_ok() {
            return Some(p);
        }
    }
    None
}
