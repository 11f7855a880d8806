//! Residual classes at a fixed local index, the signed coordinates on
//! `Z⟨Res⁺(ℓ)⟩`, and the search for cancelling tuples.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::{iso_classes, ResidualQuiver};
use crate::error::{Error, Result};
use crate::exactalg::{int_kernel, IntMatrix, Rational};
use crate::hilbert::{degree_contribution, orbifold_contribution, DeltaVector};
use crate::singularity::{Basket, Singularity};

pub const DEFAULT_SEARCH_BUDGET: u64 = 50_000_000;

/// Most cycle multiples scanned for small cancelling tuples.
pub const CYCLE_TUPLE_DEPTH: i64 = 8;

/// Node budget of that scan.
pub const CYCLE_SCAN_NODES: u64 = 20_000_000;

#[derive(Clone, Debug)]
pub struct ResidualClass {
    pub sing: Singularity,
    pub delta: DeltaVector,
    pub degree: Rational,
    /// Indecomposable counts of the maximal shattering, per dual orbit.
    pub coverage: Vec<i64>,
    pub pair: usize,
    pub positive: bool,
}

/// Everything about residuals of one local index that the reconstruction needs.
#[derive(Debug)]
pub struct ResidualSystem {
    pub ell: u64,
    pub quiver: ResidualQuiver,
    /// Dual orbits of vertices; see [`iso_classes`].
    pub orbits: Vec<Vec<usize>>,
    /// Coverage of one full cycle, `(1,2,…,2,1)`.
    pub cycle: Vec<i64>,
    pub classes: Vec<ResidualClass>,
    /// `Res⁺(ℓ)`: (positive member, inverse) class indices.
    pub res_plus: Vec<(usize, usize)>,
    /// Columns are the δ-vectors of the positive members.
    pub phi_plus: IntMatrix,
    /// Hermite basis of `ker Φ⁺`.
    pub kernel: Vec<Vec<i64>>,
    cycle_tuples: OnceLock<Vec<Vec<i64>>>,
    lookup: HashMap<Singularity, usize>,
}

impl ResidualSystem {
    fn build(ell: u64) -> Result<Self> {
        let quiver = ResidualQuiver::new(ell)?;
        let n = quiver.len();
        let orbits = iso_classes(&quiver);
        let mut orbit_of = vec![0; n];
        for (k, o) in orbits.iter().enumerate() {
            for &v in o {
                orbit_of[v] = k;
            }
        }
        let cycle: Vec<i64> = orbits.iter().map(|o| o.len() as i64).collect();

        let mut by_sing: BTreeMap<Singularity, Vec<i64>> = BTreeMap::new();
        for s in 0..n {
            for len in 1..n {
                let sing = quiver.arc(s, len).canonical();
                by_sing.entry(sing).or_insert_with(|| {
                    let mut cov = vec![0; orbits.len()];
                    for t in 0..len {
                        cov[orbit_of[(s + t) % n]] += 1;
                    }
                    cov
                });
            }
        }
        let lookup: HashMap<Singularity, usize> =
            by_sing.keys().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut classes: Vec<ResidualClass> = by_sing
            .into_iter()
            .map(|(sing, coverage)| ResidualClass {
                sing,
                delta: orbifold_contribution(&sing),
                degree: degree_contribution(&sing),
                coverage,
                pair: usize::MAX,
                positive: false,
            })
            .collect();

        let mut pairs = Vec::new();
        for i in 0..classes.len() {
            if classes[i].pair != usize::MAX {
                continue;
            }
            let inv = classes[i].sing.hyperplane_inverse()?.canonical();
            let j = lookup[&inv];
            let first = classes[i].delta.entries().iter().find(|&&x| x != 0).copied().unwrap_or(0);
            let (p, m) = if first > 0 { (i, j) } else { (j, i) };
            let key = classes[i].sing.order_key().min(classes[j].sing.order_key());
            classes[i].pair = 0;
            classes[j].pair = 0;
            pairs.push((key, p, m));
        }
        pairs.sort();
        let res_plus: Vec<(usize, usize)> = pairs.iter().map(|&(_, p, m)| (p, m)).collect();
        for (k, &(p, m)) in res_plus.iter().enumerate() {
            classes[p].pair = k;
            classes[p].positive = true;
            classes[m].pair = k;
            classes[m].positive = false;
        }

        let cols: Vec<Vec<BigInt>> = res_plus
            .iter()
            .map(|&(p, _)| classes[p].delta.entries().iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let phi_plus = IntMatrix::from_columns(&cols, ell as usize - 2);
        let kernel = int_kernel(&phi_plus)
            .into_iter()
            .map(|row| row.iter().map(|x| x.to_i64().expect("kernel entry fits i64")).collect())
            .collect();
        Ok(ResidualSystem {
            ell,
            quiver,
            orbits,
            cycle,
            classes,
            res_plus,
            phi_plus,
            kernel,
            cycle_tuples: OnceLock::new(),
            lookup,
        })
    }

    /// Conformally minimal cancelling tuples, grouped by the number of cycles
    /// they shatter to; scanned until a multiple brings nothing new, up to
    /// [`CYCLE_TUPLE_DEPTH`] cycles and [`CYCLE_SCAN_NODES`] search nodes.
    /// Only a fast path: exactness never depends on this list being complete.
    pub fn cycle_tuples(&self) -> &[Vec<i64>] {
        self.cycle_tuples.get_or_init(|| {
            let mut minimal: Vec<Vec<i64>> = Vec::new();
            let mut nodes = 0u64;
            for c in 1..=CYCLE_TUPLE_DEPTH {
                let mut found = Vec::new();
                let mut x = vec![0; self.dim()];
                let mut rem: Vec<i64> = self.cycle.iter().map(|v| c * v).collect();
                let done = self.fill_cycle(0, &mut x, &mut rem, &mut found, &mut nodes);
                found.sort_by_key(|g| (g.iter().map(|v| v.abs()).sum::<i64>(), g.clone()));
                let before = minimal.len();
                for g in found {
                    if !minimal.iter().any(|h| conformal_le(h, &g)) {
                        minimal.push(g);
                    }
                }
                if !done || (c >= 2 && minimal.len() == before) {
                    break;
                }
            }
            minimal
        })
    }

    // false when the node budget ran out
    fn fill_cycle(
        &self,
        i: usize,
        x: &mut Vec<i64>,
        rem: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
        nodes: &mut u64,
    ) -> bool {
        *nodes += 1;
        if *nodes > CYCLE_SCAN_NODES {
            return false;
        }
        if rem.iter().all(|&r| r == 0) {
            if x.iter().any(|&v| v != 0) {
                out.push(x.clone());
            }
            return true;
        }
        if i == x.len() {
            return true;
        }
        if !self.fill_cycle(i + 1, x, rem, out, nodes) {
            return false;
        }
        for sign in [1, -1] {
            let cov = &self.signed(i, sign).coverage;
            let mut taken = 0;
            while cov.iter().zip(rem.iter()).all(|(c, r)| c <= r) {
                for (r, c) in rem.iter_mut().zip(cov) {
                    *r -= c;
                }
                taken += 1;
                x[i] = sign * taken;
                if !self.fill_cycle(i + 1, x, rem, out, nodes) {
                    return false;
                }
            }
            for _ in 0..taken {
                for (r, c) in rem.iter_mut().zip(cov) {
                    *r += c;
                }
            }
            x[i] = 0;
        }
        true
    }

    /// Some cycle tuple sitting conformally inside `x`.
    pub fn cycle_tuple_in(&self, x: &[i64]) -> Option<&[i64]> {
        self.cycle_tuples()
            .iter()
            .find(|g| conformal_le(g, x))
            .map(|g| g.as_slice())
    }

    pub fn class_of(&self, s: &Singularity) -> Option<usize> {
        self.lookup.get(&s.canonical()).copied()
    }

    /// Number of `Res⁺(ℓ)` coordinates.
    pub fn dim(&self) -> usize {
        self.res_plus.len()
    }

    pub fn positive(&self, i: usize) -> &ResidualClass {
        &self.classes[self.res_plus[i].0]
    }

    pub fn negative(&self, i: usize) -> &ResidualClass {
        &self.classes[self.res_plus[i].1]
    }

    /// Class used by coordinate `i` with the given sign.
    pub fn signed(&self, i: usize, x: i64) -> &ResidualClass {
        if x >= 0 {
            self.positive(i)
        } else {
            self.negative(i)
        }
    }

    /// `φ`: the basket interpreting a signed coordinate vector.
    pub fn interpret(&self, x: &[i64]) -> Basket {
        Basket::new(x.iter().enumerate().flat_map(|(i, &v)| {
            std::iter::repeat(self.signed(i, v).sing).take(v.unsigned_abs() as usize)
        }))
    }

    /// Signed coordinates of a basket of residuals, or `None` when it holds an inverse pair.
    pub fn coordinates(&self, b: &Basket) -> Result<Option<Vec<i64>>> {
        let mut x = vec![0i64; self.dim()];
        for s in b.elements() {
            let c = self
                .class_of(s)
                .ok_or_else(|| Error::NotResidual(format!("{s} at local index {}", self.ell)))?;
            let cls = &self.classes[c];
            let step = if cls.positive { 1 } else { -1 };
            if x[cls.pair] != 0 && x[cls.pair].signum() != step {
                return Ok(None);
            }
            x[cls.pair] += step;
        }
        Ok(Some(x))
    }

    /// Dual-orbit coverage of `φ(x)`.
    pub fn coverage(&self, x: &[i64]) -> Vec<i64> {
        let mut cov = vec![0; self.orbits.len()];
        for (i, &v) in x.iter().enumerate() {
            for (c, e) in cov.iter_mut().zip(&self.signed(i, v).coverage) {
                *c += v.abs() * e;
            }
        }
        cov
    }

    pub fn delta_of(&self, x: &[i64]) -> DeltaVector {
        let mut entries = vec![0; self.ell as usize - 2];
        for (i, &v) in x.iter().enumerate() {
            for (e, d) in entries.iter_mut().zip(self.positive(i).delta.entries()) {
                *e += v * d;
            }
        }
        DeltaVector::new(self.ell, entries).expect("length")
    }

    pub fn degree_of(&self, x: &[i64]) -> Rational {
        x.iter()
            .enumerate()
            .map(|(i, &v)| Rational::from_integer(BigInt::from(v.abs())) * &self.signed(i, v).degree)
            .sum()
    }

    /// A nonzero `k` with `Φ⁺k = 0` and each `k_i` between 0 and `x_i`, if any.
    pub fn cancelling_kernel_vector(&self, x: &[i64], budget: u64) -> Result<Option<Vec<i64>>> {
        if let Some(g) = self.cycle_tuple_in(x) {
            return Ok(Some(g.to_vec()));
        }
        self.exact_cancelling_vector(x, budget)
    }

    /// As [`Self::cancelling_kernel_vector`], by subset-sum search alone.
    pub fn exact_cancelling_vector(&self, x: &[i64], budget: u64) -> Result<Option<Vec<i64>>> {
        let half = (self.ell as usize - 1) / 2;
        let vecs: Vec<Vec<i64>> = x
            .iter()
            .enumerate()
            .map(|(i, &v)| self.signed(i, v).delta.entries()[..half].to_vec())
            .collect();
        let caps: Vec<i64> = x.iter().map(|v| v.abs()).collect();
        let found = zero_sum_in_box(&vecs, &caps, budget)?;
        Ok(found.map(|t| t.iter().zip(x).map(|(t, v)| t * v.signum()).collect()))
    }
}

// `a ⊑ b`: same signs where `a` is nonzero, and no larger in absolute value.
fn conformal_le(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(&u, &v)| u == 0 || (u.signum() == v.signum() && u.abs() <= v.abs()))
}

/// Shared per-ℓ residual data.
pub fn residual_system(ell: u64) -> Result<Arc<ResidualSystem>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<ResidualSystem>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(s) = cache.lock().unwrap().get(&ell) {
        return Ok(s.clone());
    }
    let sys = Arc::new(ResidualSystem::build(ell)?);
    Ok(cache.lock().unwrap().entry(ell).or_insert(sys).clone())
}

/// Counts `0 ≤ t_i ≤ caps[i]`, not all zero, with `Σ t_i·vecs[i] = 0`.
///
/// Forward search over partial sums, keeping only sums that the remaining
/// vectors can still bring back to zero.
pub fn zero_sum_in_box(vecs: &[Vec<i64>], caps: &[i64], budget: u64) -> Result<Option<Vec<i64>>> {
    let idx: Vec<usize> = (0..vecs.len()).filter(|&i| caps[i] > 0).collect();
    let Some(&first) = idx.first() else {
        return Ok(None);
    };
    let m = vecs[first].len();
    // reachable range of the sum over idx[k..], per row
    let mut lo = vec![vec![0i64; m]; idx.len() + 1];
    let mut hi = vec![vec![0i64; m]; idx.len() + 1];
    for k in (0..idx.len()).rev() {
        let i = idx[k];
        for r in 0..m {
            let v = vecs[i][r] * caps[i];
            lo[k][r] = lo[k + 1][r] + v.min(0);
            hi[k][r] = hi[k + 1][r] + v.max(0);
        }
    }
    type Key = (Vec<i64>, bool);
    let mut layers: Vec<Vec<(Key, usize, i64)>> = vec![vec![((vec![0; m], false), 0, 0)]];
    let mut states = 0u64;
    for k in 0..idx.len() {
        let i = idx[k];
        let mut seen: HashMap<Key, ()> = HashMap::new();
        let mut next = Vec::new();
        for (id, ((sum, nz), _, _)) in layers[k].iter().enumerate() {
            let mut s = sum.clone();
            for t in 0..=caps[i] {
                if t > 0 {
                    for (a, b) in s.iter_mut().zip(&vecs[i]) {
                        *a += b;
                    }
                }
                let nz = *nz || t > 0;
                if nz && s.iter().all(|&v| v == 0) {
                    let mut out = vec![0i64; vecs.len()];
                    out[i] = t;
                    let mut cur = id;
                    for kk in (0..k).rev() {
                        let (_, prev, tt) = &layers[kk + 1][cur];
                        out[idx[kk]] = *tt;
                        cur = *prev;
                    }
                    return Ok(Some(out));
                }
                if (0..m).any(|r| -s[r] < lo[k + 1][r] || -s[r] > hi[k + 1][r]) {
                    continue;
                }
                let key = (s.clone(), nz);
                if seen.insert(key.clone(), ()).is_none() {
                    states += 1;
                    if states > budget {
                        return Err(Error::CapacityExceeded {
                            what: "cancelling-tuple search states".into(),
                            attained: budget,
                        });
                    }
                    next.push((key, id, t));
                }
            }
        }
        layers.push(next);
    }
    Ok(None)
}

/// A nonempty sub-multiset with zero total orbifold contribution, searched per ℓ-piece.
pub fn contains_cancelling_tuple(basket: &Basket) -> Result<Option<Basket>> {
    contains_cancelling_tuple_with_budget(basket, DEFAULT_SEARCH_BUDGET)
}

pub fn contains_cancelling_tuple_with_budget(basket: &Basket, budget: u64) -> Result<Option<Basket>> {
    for (ell, piece) in basket.pieces() {
        if let Some(w) = piece_witness(ell, &piece, budget)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn piece_witness(ell: u64, piece: &Basket, budget: u64) -> Result<Option<Basket>> {
    // an element contributes through its residue; invisible ones cancel alone
    let mut residual = Vec::new();
    for s in piece.elements() {
        match s.residue().residue {
            Some(r) if ell >= 3 => residual.push((*s, r)),
            _ => return Ok(Some(Basket::new([*s]))),
        }
    }
    let sys = residual_system(ell)?;
    let mut slots: Vec<[Vec<Singularity>; 2]> = vec![[Vec::new(), Vec::new()]; sys.dim()];
    for (s, r) in &residual {
        let c = sys.class_of(r).ok_or_else(|| Error::NotResidual(r.to_string()))?;
        let cls = &sys.classes[c];
        slots[cls.pair][cls.positive as usize].push(*s);
    }
    if let Some([neg, pos]) = slots.iter().find(|[n, p]| !n.is_empty() && !p.is_empty()) {
        return Ok(Some(Basket::new([pos[0], neg[0]])));
    }
    let x: Vec<i64> = slots.iter().map(|[n, p]| p.len() as i64 - n.len() as i64).collect();
    let Some(k) = sys.cancelling_kernel_vector(&x, budget)? else {
        return Ok(None);
    };
    let chosen = k.iter().enumerate().flat_map(|(i, &v)| {
        let side = &slots[i][(v > 0) as usize];
        side.iter().take(v.unsigned_abs() as usize).copied()
    });
    Ok(Some(Basket::new(chosen)))
}
