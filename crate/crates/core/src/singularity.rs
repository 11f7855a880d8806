//! Cyclic quotient surface singularities `1/r(1,a)`: normal forms, invariants,
//! classification, residues and cone-level gluing.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lattice vector in the plane.
pub type V2 = (i64, i64);

/// Oriented normal form `1/r(1,a)`. The smooth point is `r = 1, a = 0`.
///
/// Equality is oriented: `1/5(1,2)` and `1/5(1,3)` are different values but
/// isomorphic singularities, see [`Singularity::is_isomorphic`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Singularity {
    r: u64,
    a: u64,
}

impl Singularity {
    pub fn new(r: u64, a: u64) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidSingularity("r must be positive".into()));
        }
        if r == 1 {
            return if a == 0 {
                Ok(Self::SMOOTH)
            } else {
                Err(Error::InvalidSingularity(format!("1/1(1,{a}) must have a = 0")))
            };
        }
        if a == 0 || a >= r {
            return Err(Error::InvalidSingularity(format!("need 1 <= a < r in 1/{r}(1,{a})")));
        }
        if r.gcd(&a) != 1 {
            return Err(Error::InvalidSingularity(format!(
                "1/{r}(1,{a}) is not isolated: gcd({r},{a}) = {}",
                r.gcd(&a)
            )));
        }
        Ok(Singularity { r, a })
    }

    pub const SMOOTH: Singularity = Singularity { r: 1, a: 0 };

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn is_smooth(&self) -> bool {
        self.r == 1
    }

    pub fn width(&self) -> u64 {
        self.r.gcd(&(self.a + 1))
    }

    pub fn local_index(&self) -> u64 {
        self.r / self.width()
    }

    pub fn slope(&self) -> u64 {
        ((self.a + 1) / self.width()) % self.local_index()
    }

    /// `(ℓ, k, c)`.
    pub fn invariants(&self) -> (u64, u64, u64) {
        (self.local_index(), self.width(), self.slope())
    }

    /// `1/r(1,ā)` with `aā ≡ 1 mod r`.
    pub fn dual(&self) -> Singularity {
        if self.r == 1 {
            return *self;
        }
        Singularity { r: self.r, a: mod_inverse(self.a, self.r) }
    }

    /// Representative `1/r(1, min(a, ā))` of the isomorphism class.
    pub fn canonical(&self) -> Singularity {
        let d = self.dual();
        if d.a < self.a {
            d
        } else {
            *self
        }
    }

    pub fn is_isomorphic(&self, other: &Singularity) -> bool {
        self.canonical() == other.canonical()
    }

    /// Deterministic order: by `r`, then `min(a, ā)`, then `a`.
    pub fn order_key(&self) -> (u64, u64, u64) {
        (self.r, self.canonical().a, self.a)
    }

    /// Edge lattice point `e₂ + j(ℓ, −c)` of the normalized cone.
    pub fn edge_point(&self, j: i64) -> V2 {
        let (l, _, c) = self.invariants();
        (j * l as i64, 1 - j * c as i64)
    }

    pub fn is_primitive_edge_point(&self, j: i64) -> bool {
        let (l, _, c) = self.invariants();
        (j * l as i64).gcd(&(j * c as i64 - 1)) == 1
    }

    /// Interior primitive edge points, `0 < j < k`.
    pub fn interior_primitive_points(&self) -> Vec<i64> {
        (1..self.width() as i64).filter(|&j| self.is_primitive_edge_point(j)).collect()
    }

    /// Normal form of the sub-cone between edge points `i < j`.
    pub fn edge_segment(&self, i: i64, j: i64) -> Singularity {
        normalize_rays(self.edge_point(i), self.edge_point(j)).expect("edge segment")
    }

    pub fn classify(&self) -> Classification {
        let (l, k, c) = self.invariants();
        if self.r == 1 {
            Classification::Smooth
        } else if k % l == 0 {
            Classification::TSingularity { d: k / l, n: l, c }
        } else if k < l {
            if self.interior_primitive_points().is_empty() {
                Classification::ResidualIndecomposable
            } else {
                Classification::Residual
            }
        } else {
            Classification::Composite
        }
    }

    pub fn is_residual(&self) -> bool {
        matches!(
            self.classify(),
            Classification::Residual | Classification::ResidualIndecomposable
        )
    }

    pub fn is_t(&self) -> bool {
        matches!(self.classify(), Classification::TSingularity { .. })
    }

    /// Splits off all T-pieces: the residual cone sits at the start of the edge.
    pub fn residue(&self) -> Residue {
        let (l, k, _) = self.invariants();
        if self.r == 1 {
            return Residue { residue: None, t_parts: Vec::new() };
        }
        let k0 = k % l;
        let residue = (k0 > 0).then(|| self.edge_segment(0, k0 as i64));
        let t_parts = if k >= l { vec![self.edge_segment(k0 as i64, k as i64)] } else { Vec::new() };
        Residue { residue, t_parts }
    }

    /// Continuation of the edge up to the next elementary T-cone.
    pub fn hyperplane_inverse(&self) -> Result<Singularity> {
        if !self.is_residual() {
            return Err(Error::NotResidual(self.to_string()));
        }
        let (l, k, _) = self.invariants();
        Ok(self.edge_segment(k as i64, l as i64))
    }

    /// All shatterings, one per subset of interior primitive edge points, trivial one first.
    pub fn shatterings(&self) -> Vec<Vec<Singularity>> {
        let pts = self.interior_primitive_points();
        assert!(pts.len() < 24, "too many primitive edge points to list all shatterings");
        let k = self.width() as i64;
        let mut out = Vec::with_capacity(1 << pts.len());
        for mask in 0u32..(1 << pts.len()) {
            let mut cuts = vec![0];
            cuts.extend(pts.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &j)| j));
            cuts.push(k);
            out.push(cuts.windows(2).map(|w| self.edge_segment(w[0], w[1])).collect());
        }
        out
    }

    /// Shards at every primitive edge point; all of them are indecomposable.
    pub fn maximal_shards(&self) -> Vec<Singularity> {
        let mut cuts = vec![0];
        cuts.extend(self.interior_primitive_points());
        cuts.push(self.width() as i64);
        cuts.windows(2).map(|w| self.edge_segment(w[0], w[1])).collect()
    }
}

impl PartialOrd for Singularity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Singularity {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl fmt::Display for Singularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1/{}(1,{})", self.r, self.a)
    }
}

impl FromStr for Singularity {
    type Err = Error;

    /// Accepts `1/r(1,a)` with arbitrary whitespace.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("expected 1/r(1,a), got {s:?}"));
        let rest = t.strip_prefix("1/").ok_or_else(bad)?;
        let (r, rest) = rest.split_once("(1,").ok_or_else(bad)?;
        let a = rest.strip_suffix(')').ok_or_else(bad)?;
        let r: u64 = r.parse().map_err(|_| bad())?;
        let a: u64 = a.parse().map_err(|_| bad())?;
        if r > 1 && a > 0 && a < r && r.gcd(&a) != 1 {
            return Err(Error::InvalidWeight { r, a: a as i64 });
        }
        Singularity::new(r, a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Smooth,
    /// `1/dn²(1, dnc−1)`.
    TSingularity { d: u64, n: u64, c: u64 },
    Residual,
    ResidualIndecomposable,
    /// Width exceeds the local index without being a multiple: a residual plus T-pieces.
    Composite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residue {
    pub residue: Option<Singularity>,
    pub t_parts: Vec<Singularity>,
}

/// Two primitive rays spanning a strictly convex cone, stored in clockwise order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntCone {
    u: V2,
    v: V2,
}

/// Clockwise determinant: positive when `v` lies clockwise of `u`.
pub fn cw_det(u: V2, v: V2) -> i64 {
    u.1 * v.0 - u.0 * v.1
}

impl IntCone {
    pub fn new(u: V2, v: V2) -> Result<Self> {
        for w in [u, v] {
            if w.0.gcd(&w.1) != 1 {
                return Err(Error::NonPrimitiveRay(w.0, w.1));
            }
        }
        match cw_det(u, v).cmp(&0) {
            Ordering::Equal => Err(Error::DegenerateCone),
            Ordering::Greater => Ok(IntCone { u, v }),
            Ordering::Less => Ok(IntCone { u: v, v: u }),
        }
    }

    pub fn rays(&self) -> (V2, V2) {
        (self.u, self.v)
    }

    /// Applies `g` (row-major 2×2 integer matrix).
    pub fn transform(&self, g: [[i64; 2]; 2]) -> Result<Self> {
        let ap = |w: V2| (g[0][0] * w.0 + g[0][1] * w.1, g[1][0] * w.0 + g[1][1] * w.1);
        IntCone::new(ap(self.u), ap(self.v))
    }
}

/// Oriented normal form `Cone(e₂, (r, −a))` reached by an orientation-preserving unimodular map.
pub fn normalize_cone(cone: &IntCone) -> Singularity {
    normalize_rays(cone.u, cone.v).expect("IntCone invariants")
}

fn normalize_rays(u: V2, v: V2) -> Result<Singularity> {
    let (p, q) = u;
    let eg = p.extended_gcd(&q);
    if eg.gcd.abs() != 1 {
        return Err(Error::NonPrimitiveRay(p, q));
    }
    let (s, t) = (eg.x * eg.gcd, eg.y * eg.gcd);
    // g = [[q, -p], [s, t]] sends u to e₂ and has determinant 1
    let x = q * v.0 - p * v.1;
    let y = s * v.0 + t * v.1;
    if x == 0 {
        return Err(Error::DegenerateCone);
    }
    if x < 0 {
        return Err(Error::InvalidSingularity("rays are in anticlockwise order".into()));
    }
    let r = x as u64;
    let a = (-y).rem_euclid(x) as u64;
    Singularity::new(r, a)
}

/// `s1 ∗ s2`, defined when the edge of `s1` continues into an oriented copy of `s2`.
pub fn hyperplane_sum(s1: &Singularity, s2: &Singularity) -> Option<Singularity> {
    if s1.local_index() != s2.local_index() {
        return None;
    }
    let k1 = s1.width() as i64;
    let k2 = s2.width() as i64;
    if !s1.is_primitive_edge_point(k1 + k2) {
        return None;
    }
    if s1.edge_segment(k1, k1 + k2) != *s2 {
        return None;
    }
    Some(s1.edge_segment(0, k1 + k2))
}

/// Left-to-right hyperplane sum of a sequence.
pub fn hyperplane_sum_all(parts: &[Singularity]) -> Option<Singularity> {
    let (first, rest) = parts.split_first()?;
    rest.iter().try_fold(*first, |acc, s| hyperplane_sum(&acc, s))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Glue {
    /// `s1 ∗ s2` is already defined.
    Empty,
    Cone(Singularity),
}

/// Smallest-width `g` with `s1 ∗ g` and `g ∗ s2` both defined.
pub fn gluing_cone(s1: &Singularity, s2: &Singularity) -> Result<Glue> {
    let (l1, l2) = (s1.local_index(), s2.local_index());
    if l1 != l2 {
        return Err(Error::LocalIndexMismatch(l1, l2));
    }
    if hyperplane_sum(s1, s2).is_some() {
        return Ok(Glue::Empty);
    }
    let k1 = s1.width() as i64;
    for w in 1..=(2 * l1 as i64 + 2) {
        if !s1.is_primitive_edge_point(k1 + w) {
            continue;
        }
        let g = s1.edge_segment(k1, k1 + w);
        if hyperplane_sum(&g, s2).is_some() {
            return Ok(Glue::Cone(g));
        }
    }
    unreachable!("every residual arc recurs within two periods")
}

/// Finite multiset of singularities up to isomorphism, kept sorted by
/// [`Singularity::order_key`] with every element in canonical form.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Basket {
    elems: Vec<Singularity>,
}

impl Basket {
    pub fn new(elems: impl IntoIterator<Item = Singularity>) -> Self {
        let mut elems: Vec<Singularity> = elems.into_iter().map(|s| s.canonical()).collect();
        elems.sort();
        Basket { elems }
    }

    pub fn empty() -> Self {
        Basket::default()
    }

    pub fn elements(&self) -> &[Singularity] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn union(&self, other: &Basket) -> Basket {
        Basket::new(self.elems.iter().chain(&other.elems).copied())
    }

    /// Elements grouped by local index.
    pub fn pieces(&self) -> BTreeMap<u64, Basket> {
        let mut m: BTreeMap<u64, Vec<Singularity>> = BTreeMap::new();
        for s in &self.elems {
            m.entry(s.local_index()).or_default().push(*s);
        }
        m.into_iter().map(|(l, v)| (l, Basket::new(v))).collect()
    }

    /// Residues of all elements, smooth residues dropped.
    pub fn residues(&self) -> Basket {
        Basket::new(self.elems.iter().filter_map(|s| s.residue().residue))
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.elems.iter().map(|s| s.to_string()).collect()
    }
}

impl fmt::Display for Basket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.to_strings().join(", "))
    }
}

impl FromStr for Basket {
    type Err = Error;

    /// Comma-separated `1/r(1,a)` items, optionally wrapped in braces.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t.strip_prefix('{').and_then(|x| x.strip_suffix('}')).unwrap_or(t);
        let mut items = Vec::new();
        let (mut depth, mut start) = (0i32, 0usize);
        for (i, ch) in t.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                ',' if depth == 0 => {
                    items.push(&t[start..i]);
                    start = i + 1;
                }
                _ => {}
            }
        }
        items.push(&t[start..]);
        let elems = items
            .into_iter()
            .filter(|x| !x.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Singularity>>>()?;
        Ok(Basket::new(elems))
    }
}

pub fn mod_inverse(a: u64, m: u64) -> u64 {
    let eg = (a as i64).extended_gcd(&(m as i64));
    debug_assert_eq!(eg.gcd, 1);
    eg.x.rem_euclid(m as i64) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(r: u64, a: u64) -> Singularity {
        Singularity::new(r, a).unwrap()
    }

    #[test]
    fn parse_roundtrip() {
        let x: Singularity = " 1 / 20 ( 1 , 11 ) ".parse().unwrap();
        assert_eq!(x, s(20, 11));
        assert_eq!(x.to_string(), "1/20(1,11)");
        assert!("1/4(1,2)".parse::<Singularity>().is_err());
        assert!("1/5(2,1)".parse::<Singularity>().is_err());
        assert_eq!("1/1(1,0)".parse::<Singularity>().unwrap(), Singularity::SMOOTH);
    }

    #[test]
    fn normal_forms() {
        let n = |u, v| normalize_cone(&IntCone::new(u, v).unwrap());
        assert_eq!(n((0, 1), (5, -1)), s(5, 1));
        assert_eq!(n((0, 1), (1, 0)), Singularity::SMOOTH);
        assert_eq!(n((6, -1), (3, -1)), s(3, 2));
        assert_eq!(IntCone::new((1, 2), (-1, -2)), Err(Error::DegenerateCone));
        assert_eq!(IntCone::new((2, 2), (0, 1)), Err(Error::NonPrimitiveRay(2, 2)));
    }

    #[test]
    fn invariants_examples() {
        assert_eq!(s(9, 2).invariants(), (3, 3, 1));
        assert_eq!(s(20, 11).invariants(), (5, 4, 3));
        assert_eq!(s(5, 1).invariants(), (5, 1, 2));
        assert_eq!(Singularity::SMOOTH.invariants(), (1, 1, 0));
    }

    #[test]
    fn classification_examples() {
        assert_eq!(s(9, 2).classify(), Classification::TSingularity { d: 1, n: 3, c: 1 });
        assert_eq!(s(10, 1).classify(), Classification::ResidualIndecomposable);
        assert_eq!(s(15, 2).classify(), Classification::Residual);
        assert_eq!(s(12, 7).classify(), Classification::Composite);
        assert_eq!(Singularity::SMOOTH.classify(), Classification::Smooth);
    }

    #[test]
    fn residues() {
        let r = s(12, 7).residue();
        assert_eq!(r.residue, Some(s(3, 1)));
        assert_eq!(r.t_parts.len(), 1);
        assert_eq!(r.t_parts[0].width(), 3);
        assert!(r.t_parts[0].is_t());
        assert_eq!(s(9, 2).residue(), Residue { residue: None, t_parts: vec![s(9, 2)] });
        assert_eq!(s(5, 1).residue(), Residue { residue: Some(s(5, 1)), t_parts: vec![] });
    }

    #[test]
    fn duals() {
        assert_eq!(s(5, 2).dual(), s(5, 3));
        assert_eq!(s(5, 1).dual(), s(5, 1));
        assert_eq!(s(10, 1).dual(), s(10, 1));
    }

    #[test]
    fn inverses() {
        assert_eq!(s(5, 1).hyperplane_inverse().unwrap(), s(20, 11));
        assert_eq!(s(10, 1).hyperplane_inverse().unwrap(), s(15, 11));
        assert_eq!(s(10, 3).hyperplane_inverse().unwrap(), s(15, 2));
        assert!(s(9, 2).hyperplane_inverse().is_err());
    }

    #[test]
    fn sums() {
        assert_eq!(hyperplane_sum(&s(6, 1), &s(3, 1)), Some(s(9, 2)));
        assert_eq!(hyperplane_sum(&s(3, 1), &s(6, 1)), Some(s(9, 5)));
        assert_eq!(hyperplane_sum(&s(5, 1), &s(3, 1)), None);
        assert_eq!(hyperplane_sum(&s(6, 1), &s(9, 8)), None);
    }

    #[test]
    fn shattering_examples() {
        assert_eq!(s(9, 2).shatterings(), vec![vec![s(9, 2)], vec![s(6, 1), s(3, 1)]]);
        assert_eq!(s(5, 1).shatterings(), vec![vec![s(5, 1)]]);
        assert_eq!(s(15, 2).shatterings(), vec![vec![s(15, 2)], vec![s(10, 1), s(5, 3)]]);
    }

    #[test]
    fn basket_parse_and_order() {
        let b: Basket = "{1/15(1,2), 1/5(1,3),1/20(1,11)}".parse().unwrap();
        assert_eq!(b.to_string(), "{1/5(1,2), 1/15(1,2), 1/20(1,11)}");
        assert_eq!("{}".parse::<Basket>().unwrap(), Basket::empty());
        assert_eq!(b.pieces().len(), 1);
    }

    #[test]
    fn gluing() {
        match gluing_cone(&s(5, 1), &s(5, 1)).unwrap() {
            Glue::Cone(g) => assert_eq!(g.width(), 4),
            Glue::Empty => panic!("not directly summable"),
        }
        assert_eq!(gluing_cone(&s(3, 1), &s(3, 1)).unwrap(), Glue::Cone(s(6, 1)));
        assert_eq!(gluing_cone(&s(5, 1), &s(5, 2)).unwrap(), Glue::Empty);
        assert_eq!(gluing_cone(&s(5, 1), &s(3, 1)), Err(Error::LocalIndexMismatch(5, 3)));
    }
}
