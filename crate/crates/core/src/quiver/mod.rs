//! Indecomposable singularities, the residual quiver, maximal shattering and
//! the δ-lattice at a fixed local index.

mod cancel;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

pub use cancel::{
    contains_cancelling_tuple, contains_cancelling_tuple_with_budget, zero_sum_in_box,
    residual_system, ResidualClass, ResidualSystem, DEFAULT_SEARCH_BUDGET,
};

use crate::error::{Error, Result};
use crate::exactalg::{hermite_rows, IntMatrix};
use crate::hilbert::{orbifold_contribution, DeltaVector};
use crate::singularity::{normalize_cone, Basket, IntCone, Singularity, V2};

pub fn euler_phi(n: u64) -> u64 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
}

/// One indecomposable per unit slope `c`: `1/(wℓ)(1, wc−1)` with `w` least such that `gcd(ℓ, wc−1) = 1`.
pub fn indecomposables(ell: u64) -> Result<Vec<Singularity>> {
    if ell <= 2 {
        return Err(Error::UnsupportedIndex(ell));
    }
    let mut out = Vec::new();
    for c in 1..ell {
        if c.gcd(&ell) != 1 {
            continue;
        }
        let w = (1..).find(|&w: &u64| ell.gcd(&(w * c - 1)) == 1).unwrap();
        out.push(Singularity::new(w * ell, w * c - 1)?);
    }
    out.sort();
    Ok(out)
}

/// The φ(ℓ)-cycle of indecomposables, laid out along the edge line
/// `e₂ + j(ℓ, −1)`; vertex `i` is the segment between primitive points
/// `J_i < J_{i+1}`, extended periodically by `J_{i+φ} = J_i + ℓ`.
/// The cycle is rotated to start at a self-dual vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidualQuiver {
    ell: u64,
    vertices: Vec<Singularity>,
    positions: Vec<i64>,
    orbits: Vec<Vec<usize>>,
    orbit_of: Vec<usize>,
}

fn line_point(ell: u64, j: i64) -> V2 {
    (j * ell as i64, 1 - j)
}

impl ResidualQuiver {
    pub fn new(ell: u64) -> Result<Self> {
        if ell <= 2 {
            return Err(Error::UnsupportedIndex(ell));
        }
        let l = ell as i64;
        let prim: Vec<i64> = (0..l).filter(|&j| (j * l).gcd(&(j - 1)) == 1).collect();
        let seg = |a: i64, b: i64| {
            normalize_cone(&IntCone::new(line_point(ell, a), line_point(ell, b)).expect("edge cone"))
        };
        let n = prim.len();
        let pos_at = |i: usize| prim[i % n] + (i / n) as i64 * l;
        let verts: Vec<Singularity> = (0..n).map(|i| seg(pos_at(i), pos_at(i + 1))).collect();
        let start = (0..n)
            .filter(|&i| verts[i].dual() == verts[i])
            .min_by_key(|&i| verts[i].order_key())
            .expect("self-dual vertex");
        let vertices: Vec<Singularity> = (0..n).map(|i| verts[(start + i) % n]).collect();
        let positions = (0..n).map(|i| pos_at(start + i)).collect();
        let mut orbits = Vec::new();
        let mut orbit_of = vec![usize::MAX; n];
        for i in 0..n {
            if orbit_of[i] != usize::MAX {
                continue;
            }
            let j = vertices.iter().position(|v| *v == vertices[i].dual()).expect("dual vertex");
            orbit_of[i] = orbits.len();
            orbit_of[j] = orbits.len();
            orbits.push(if i == j { vec![i] } else { vec![i, j] });
        }
        Ok(ResidualQuiver { ell, vertices, positions, orbits, orbit_of })
    }

    pub fn local_index(&self) -> u64 {
        self.ell
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Singularity] {
        &self.vertices
    }

    pub fn successor(&self, i: usize) -> usize {
        (i + 1) % self.len()
    }

    pub fn index_of(&self, s: &Singularity) -> Option<usize> {
        self.vertices.iter().position(|v| v == s)
    }

    /// Edge position of primitive point `i` (any integer index).
    pub fn position(&self, i: i64) -> i64 {
        let n = self.len() as i64;
        self.positions[i.rem_euclid(n) as usize] + i.div_euclid(n) * self.ell as i64
    }

    /// Singularity glued from `len` consecutive vertices starting at `start`.
    pub fn arc(&self, start: usize, len: usize) -> Singularity {
        let a = self.position(start as i64);
        let b = self.position((start + len) as i64);
        normalize_cone(&IntCone::new(line_point(self.ell, a), line_point(self.ell, b)).expect("arc"))
    }

    /// Full cycle glued from `start`: an elementary T-singularity.
    pub fn elementary_t(&self, start: &Singularity) -> Result<Singularity> {
        let i = self
            .index_of(start)
            .ok_or_else(|| Error::InvalidSingularity(format!("{start} is not a quiver vertex")))?;
        Ok(self.arc(i, self.len()))
    }

    /// Vertex `j` with `vertex(j) = dual(vertex(i))`.
    pub fn dual_vertex(&self, i: usize) -> usize {
        let o = &self.orbits[self.orbit_of[i]];
        if o[0] == i { o[o.len() - 1] } else { o[0] }
    }

    /// Dual orbit containing vertex `i`.
    pub fn orbit_of(&self, i: usize) -> usize {
        self.orbit_of[i]
    }

    /// Vertex indices of the maximal shattering of `s`, in edge order.
    pub fn arc_word(&self, s: &Singularity) -> Result<Vec<usize>> {
        if s.local_index() != self.ell {
            return Err(Error::MixedIndex { expected: self.ell, found: s.local_index() });
        }
        s.maximal_shards()
            .iter()
            .map(|x| self.index_of(x).ok_or_else(|| Error::InvalidSingularity(format!("shard {x}"))))
            .collect()
    }
}

/// The two dual-fixed indecomposables, ordered.
pub fn self_duals(ell: u64) -> Result<(Singularity, Singularity)> {
    let fixed: Vec<Singularity> =
        indecomposables(ell)?.into_iter().filter(|s| s.dual() == *s).collect();
    match fixed.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(Error::InvalidSingularity(format!(
            "expected two self-dual indecomposables at local index {ell}, found {}",
            fixed.len()
        ))),
    }
}

/// Multiplicities of indecomposables up to isomorphism, indexed by the dual
/// orbits of quiver vertices (see [`iso_classes`]).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IndecMultiset {
    pub ell: u64,
    pub counts: Vec<u64>,
}

impl IndecMultiset {
    pub fn zero(q: &ResidualQuiver) -> Self {
        IndecMultiset { ell: q.ell, counts: vec![0; q.orbits.len()] }
    }

    /// `times` full quiver cycles, i.e. `times·(1,2,…,2,1)`.
    pub fn cycle(q: &ResidualQuiver, times: u64) -> Self {
        IndecMultiset { ell: q.ell, counts: q.orbits.iter().map(|o| times * o.len() as u64).collect() }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn add(&self, o: &IndecMultiset) -> IndecMultiset {
        IndecMultiset {
            ell: self.ell,
            counts: self.counts.iter().zip(&o.counts).map(|(a, b)| a + b).collect(),
        }
    }

    /// `self − o` if nonnegative.
    pub fn checked_sub(&self, o: &IndecMultiset) -> Option<IndecMultiset> {
        let counts: Option<Vec<u64>> =
            self.counts.iter().zip(&o.counts).map(|(a, b)| a.checked_sub(*b)).collect();
        counts.map(|counts| IndecMultiset { ell: self.ell, counts })
    }

    /// `(indecomposable, count)` with one representative per class.
    pub fn named(&self, q: &ResidualQuiver) -> Vec<(Singularity, u64)> {
        q.orbits
            .iter()
            .zip(&self.counts)
            .filter(|(_, &c)| c > 0)
            .map(|(o, &c)| (q.vertices[o[0]].canonical(), c))
            .collect()
    }
}

/// `ρ` of a single singularity.
pub fn shattering_of(q: &ResidualQuiver, s: &Singularity) -> Result<IndecMultiset> {
    let mut m = IndecMultiset::zero(q);
    for i in q.arc_word(s)? {
        m.counts[q.orbit_of[i]] += 1;
    }
    Ok(m)
}

/// `ρ`: counts of indecomposable shards over all elements of an ℓ-piece.
pub fn maximal_shattering(q: &ResidualQuiver, basket: &Basket) -> Result<IndecMultiset> {
    let mut m = IndecMultiset::zero(q);
    for s in basket.elements() {
        m = m.add(&shattering_of(q, s)?);
    }
    Ok(m)
}

/// All baskets whose maximal shattering is `m`.
pub fn regroupings(q: &ResidualQuiver, m: &IndecMultiset) -> Vec<Basket> {
    let n = q.len();
    let total = m.total() as usize;
    let mut items: Vec<(Singularity, Vec<u64>)> = Vec::new();
    let mut seen = BTreeSet::new();
    for s in 0..n {
        for len in 1..=total {
            let sing = q.arc(s, len).canonical();
            if seen.insert(sing) {
                let mut cov = vec![0u64; q.orbits.len()];
                for t in 0..len {
                    cov[q.orbit_of[(s + t) % n]] += 1;
                }
                items.push((sing, cov));
            }
        }
    }
    let mut out = BTreeSet::new();
    let mut rem = m.counts.clone();
    let mut chosen = Vec::new();
    regroup_dfs(&items, 0, &mut rem, &mut chosen, &mut out);
    out.into_iter().collect()
}

fn regroup_dfs(
    items: &[(Singularity, Vec<u64>)],
    from: usize,
    rem: &mut Vec<u64>,
    chosen: &mut Vec<Singularity>,
    out: &mut BTreeSet<Basket>,
) {
    if rem.iter().all(|&c| c == 0) {
        out.insert(Basket::new(chosen.iter().copied()));
        return;
    }
    for (idx, (sing, cov)) in items.iter().enumerate().skip(from) {
        if cov.iter().zip(rem.iter()).any(|(c, r)| c > r) {
            continue;
        }
        for (r, c) in rem.iter_mut().zip(cov) {
            *r -= c;
        }
        chosen.push(*sing);
        regroup_dfs(items, idx, rem, chosen, out);
        chosen.pop();
        for (r, c) in rem.iter_mut().zip(cov) {
            *r += c;
        }
    }
}

/// `Δ(ℓ)`, generated by the δ-vectors of the indecomposables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaLattice {
    pub ell: u64,
    pub generators: Vec<DeltaVector>,
    pub rank: usize,
    /// Hermite basis, one row per lattice generator.
    pub basis: Vec<Vec<BigInt>>,
}

pub fn delta_lattice(ell: u64) -> DeltaLattice {
    if ell <= 2 {
        return DeltaLattice { ell, generators: Vec::new(), rank: 0, basis: Vec::new() };
    }
    let q = ResidualQuiver::new(ell).expect("ell >= 3");
    let generators: Vec<DeltaVector> = q.vertices().iter().map(orbifold_contribution).collect();
    let rows: Vec<Vec<BigInt>> = generators
        .iter()
        .map(|d| d.entries().iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let basis = hermite_rows(rows);
    DeltaLattice { ell, generators, rank: basis.len(), basis }
}

/// Vertex orbits under duality, in the order `{v_0}, {v_1, v_{φ−1}}, …, {v_{φ/2}}`.
pub fn iso_classes(q: &ResidualQuiver) -> Vec<Vec<usize>> {
    q.orbits.clone()
}

/// Matrix of the contribution map on isomorphism classes of indecomposables.
pub fn iso_contribution_matrix(q: &ResidualQuiver) -> IntMatrix {
    let cols: Vec<Vec<BigInt>> = iso_classes(q)
        .iter()
        .map(|c| {
            orbifold_contribution(&q.vertices()[c[0]])
                .entries()
                .iter()
                .map(|&x| BigInt::from(x))
                .collect()
        })
        .collect();
    IntMatrix::from_columns(&cols, q.local_index() as usize - 2)
}
