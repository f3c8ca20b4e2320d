//! Smith and Hermite normal forms over ℤ, and canonical cokernel coordinates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::IntMatrix;

/// `u · m · v = s` with `s` diagonal, `d₁ | d₂ | …`, all `dᵢ ≥ 0`, and
/// `u`, `v` unimodular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.s.rows().min(self.s.cols());
        (0..k).map(|i| self.s.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }

    /// Diagonal entries greater than one.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal().into_iter().filter(|d| *d > BigInt::one()).collect()
    }
}

/// Position of the smallest nonzero `|a[i][j]|` with `i, j ≥ t`; ties go to
/// the first in row-major order.
fn min_nonzero(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            let ax = x.abs();
            if best.as_ref().is_none_or(|(_, _, b)| ax < *b) {
                best = Some((i, j, ax));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        if min_nonzero(&a, t).is_none() {
            break;
        }
        loop {
            let (pi, pj) = min_nonzero(&a, t).expect("submatrix is nonzero");
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let p = a.get(t, t).clone();

            let mut leftover = false;
            for i in t + 1..rows {
                let q = a.get(i, t) / &p;
                if !q.is_zero() {
                    let k = -q;
                    a.add_row_multiple(i, t, &k);
                    u.add_row_multiple(i, t, &k);
                }
                leftover |= !a.get(i, t).is_zero();
            }
            for j in t + 1..cols {
                let q = a.get(t, j) / &p;
                if !q.is_zero() {
                    let k = -q;
                    a.add_col_multiple(j, t, &k);
                    v.add_col_multiple(j, t, &k);
                }
                leftover |= !a.get(t, j).is_zero();
            }
            if leftover {
                continue;
            }
            // pivot must divide the rest of the submatrix
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !a.get(i, j).is_multiple_of(&p)));
            match offender {
                Some(i) => {
                    a.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
    }
    SnfResult { s: a, u, v }
}

/// Row-style Hermite normal form: `h = g · m` with `g` unimodular and `h` in
/// row echelon form, pivots positive, entries above each pivot reduced into
/// `[0, pivot)`. Nonzero rows of `h` come first; `rank` counts them.
#[derive(Clone, Debug)]
pub struct HnfResult {
    pub h: IntMatrix,
    pub g: IntMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl HnfResult {
    pub fn nonzero_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rank).map(|i| self.h.row(i).to_vec()).collect()
    }
}

pub fn hermite_rows(m: &IntMatrix) -> HnfResult {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut g = IntMatrix::identity(rows);
    let mut pr = 0;
    let mut pivots = Vec::new();
    for col in 0..cols {
        if pr == rows {
            break;
        }
        loop {
            let best = (pr..rows)
                .filter(|&i| !a.get(i, col).is_zero())
                .min_by(|&x, &y| a.get(x, col).abs().cmp(&a.get(y, col).abs()));
            let Some(i) = best else { break };
            a.swap_rows(pr, i);
            g.swap_rows(pr, i);
            let p = a.get(pr, col).clone();
            let mut done = true;
            for i in pr + 1..rows {
                let q = a.get(i, col) / &p;
                if !q.is_zero() {
                    let k = -q;
                    a.add_row_multiple(i, pr, &k);
                    g.add_row_multiple(i, pr, &k);
                }
                done &= a.get(i, col).is_zero();
            }
            if done {
                break;
            }
        }
        if a.get(pr, col).is_zero() {
            continue;
        }
        if a.get(pr, col).is_negative() {
            a.negate_row(pr);
            g.negate_row(pr);
        }
        let p = a.get(pr, col).clone();
        for i in 0..pr {
            let q = a.get(i, col).div_floor(&p);
            if !q.is_zero() {
                let k = -q;
                a.add_row_multiple(i, pr, &k);
                g.add_row_multiple(i, pr, &k);
            }
        }
        pivots.push(col);
        pr += 1;
    }
    HnfResult { h: a, g, rank: pr, pivots }
}

/// Coordinates on `ℤⁿ / L` for a lattice `L`, depending only on `L` itself
/// (not on the generating set it was handed).
///
/// A coordinate vector lists the torsion components first (modulo the
/// invariant factors, ascending), then the free components. Free
/// coordinates are normalized by a Hermite form read in `priority` order,
/// so the first basis vector in that order with a nonzero image gets a
/// positive coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cokernel {
    dim: usize,
    moduli: Vec<BigInt>,
    free_rank: usize,
    projection: IntMatrix,
    lattice_rank: usize,
}

impl Cokernel {
    /// `generators` are vectors of length `dim` spanning the lattice.
    pub fn from_generators(generators: &[Vec<BigInt>], dim: usize, priority: &[usize]) -> Cokernel {
        assert_eq!(priority.len(), dim, "priority must be a permutation of the coordinates");
        let gens = IntMatrix::from_rows(generators.to_vec(), dim);
        let basis = hermite_rows(&gens).nonzero_rows();
        let k = basis.len();
        // columns of `presentation` are the canonical lattice basis
        let presentation = IntMatrix::from_rows(basis, dim).transpose();
        let presentation = if k == 0 { IntMatrix::zeros(dim, 0) } else { presentation };
        let snf = smith_normal_form(&presentation);
        let diag = snf.diagonal();
        let rank = snf.rank();

        let mut rows = Vec::new();
        let mut moduli = Vec::new();
        for (i, d) in diag.iter().enumerate().take(rank) {
            if *d > BigInt::one() {
                rows.push(snf.u.row(i).to_vec());
                moduli.push(d.clone());
            }
        }

        let free: Vec<Vec<BigInt>> = (rank..dim).map(|i| snf.u.row(i).to_vec()).collect();
        let free_rank = free.len();
        if free_rank > 0 {
            let permuted: Vec<Vec<BigInt>> = free
                .iter()
                .map(|r| priority.iter().map(|&c| r[c].clone()).collect())
                .collect();
            let hnf = hermite_rows(&IntMatrix::from_rows(permuted, dim));
            debug_assert_eq!(hnf.rank, free_rank);
            let normalized = &hnf.g * &IntMatrix::from_rows(free, dim);
            rows.extend(normalized.to_rows());
        }

        let mut coker = Cokernel {
            dim,
            moduli,
            free_rank,
            projection: IntMatrix::from_rows(rows, dim),
            lattice_rank: rank,
        };
        coker.reduce_torsion_rows();
        coker
    }

    fn reduce_torsion_rows(&mut self) {
        for (i, d) in self.moduli.iter().enumerate() {
            for j in 0..self.dim {
                let x = self.projection.get(i, j).mod_floor(d);
                self.projection.set(i, j, x);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.moduli
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn lattice_rank(&self) -> usize {
        self.lattice_rank
    }

    pub fn coordinate_count(&self) -> usize {
        self.moduli.len() + self.free_rank
    }

    /// Reduced coordinates of the class of `x`.
    pub fn coordinates(&self, x: &[BigInt]) -> Vec<BigInt> {
        let raw = self.projection.mul_vec(x);
        self.reduce(raw)
    }

    /// Reduces torsion components into `[0, d)`.
    pub fn reduce(&self, mut coords: Vec<BigInt>) -> Vec<BigInt> {
        for (c, d) in coords.iter_mut().zip(&self.moduli) {
            *c = c.mod_floor(d);
        }
        coords
    }

    pub fn unit_vector(&self, i: usize) -> Vec<BigInt> {
        let mut e = vec![BigInt::zero(); self.dim];
        e[i] = BigInt::one();
        self.coordinates(&e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_snf(m: &IntMatrix) -> SnfResult {
        let r = smith_normal_form(m);
        assert_eq!(&(&r.u * m) * &r.v, r.s);
        assert_eq!(r.u.det().abs(), BigInt::one());
        assert_eq!(r.v.det().abs(), BigInt::one());
        let d = r.diagonal();
        for i in 0..r.s.rows() {
            for j in 0..r.s.cols() {
                if i != j {
                    assert!(r.s.get(i, j).is_zero());
                }
            }
        }
        for w in d.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        r
    }

    #[test]
    fn identity_is_fixed() {
        let r = check_snf(&IntMatrix::identity(3));
        assert_eq!(r.s, IntMatrix::identity(3));
    }

    #[test]
    fn two_by_two() {
        let r = check_snf(&IntMatrix::from_i64(2, 2, &[2, 4, 6, 8]));
        assert_eq!(r.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn single_column() {
        let r = check_snf(&IntMatrix::from_i64(2, 1, &[1, 2]));
        assert_eq!(r.s, IntMatrix::from_i64(2, 1, &[1, 0]));
        assert_eq!(r.u, IntMatrix::from_i64(2, 2, &[1, 0, -2, 1]));
    }

    #[test]
    fn empty_shapes() {
        check_snf(&IntMatrix::zeros(0, 0));
        let r = check_snf(&IntMatrix::zeros(1, 0));
        assert_eq!(r.rank(), 0);
        check_snf(&IntMatrix::zeros(0, 3));
        check_snf(&IntMatrix::zeros(2, 3));
    }

    #[test]
    fn needs_divisibility_fix() {
        // diag(2, 3) is not in Smith form; the answer is diag(1, 6)
        let r = check_snf(&IntMatrix::from_i64(2, 2, &[2, 0, 0, 3]));
        assert_eq!(r.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn hermite_is_canonical_for_the_row_lattice() {
        let a = IntMatrix::from_i64(2, 3, &[2, 4, 6, 1, 1, 1]);
        let b = IntMatrix::from_i64(3, 3, &[3, 5, 7, 1, 1, 1, 0, 0, 0]);
        let ha = hermite_rows(&a);
        let hb = hermite_rows(&b);
        assert_eq!(ha.nonzero_rows(), hb.nonzero_rows());
        assert_eq!(&ha.g * &a, ha.h);
        assert_eq!(ha.g.det().abs(), BigInt::one());
        assert_eq!(ha.pivots, vec![0, 1]);
    }

    #[test]
    fn cokernel_of_z2_mod_12() {
        // ℤ² / ⟨(1,2)⟩ ≅ ℤ, first basis vector ↦ −2, second ↦ 1 when the
        // second coordinate has priority
        let gens = vec![vec![BigInt::from(1), BigInt::from(2)]];
        let c = Cokernel::from_generators(&gens, 2, &[1, 0]);
        assert_eq!(c.free_rank(), 1);
        assert!(c.invariant_factors().is_empty());
        assert_eq!(c.unit_vector(0), vec![BigInt::from(-2)]);
        assert_eq!(c.unit_vector(1), vec![BigInt::from(1)]);
        let c = Cokernel::from_generators(&gens, 2, &[0, 1]);
        assert_eq!(c.unit_vector(0), vec![BigInt::from(2)]);
    }

    #[test]
    fn cokernel_with_torsion() {
        let gens = vec![vec![BigInt::from(4), BigInt::from(0)]];
        let c = Cokernel::from_generators(&gens, 2, &[0, 1]);
        assert_eq!(c.invariant_factors(), &[BigInt::from(4)]);
        assert_eq!(c.free_rank(), 1);
        let x = c.coordinates(&[BigInt::from(5), BigInt::from(0)]);
        assert_eq!(x[0], BigInt::from(1));
        assert_eq!(c.coordinates(&[BigInt::from(4), BigInt::from(0)]), vec![
            BigInt::zero(),
            BigInt::zero()
        ]);
    }
}
