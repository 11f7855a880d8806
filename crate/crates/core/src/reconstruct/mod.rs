//! Reduced bodies, feasibility of Hilbert series, degree and size bounds.

mod enumerate;

use std::collections::BTreeMap;

use serde::Serialize;

pub use enumerate::{
    enumerate_reduced_baskets, enumerate_reduced_baskets_with, EnumerationConfig, DEFAULT_MAX_MU,
};

use crate::error::{Error, Result};
use crate::exactalg::rational::{floor, frac, is_integer, is_nonneg_integer, to_i64};
use crate::exactalg::{int, Rational, RationalFunction};
use crate::hilbert::{degree_contribution, split_series, DeltaVector};
use crate::quiver::{maximal_shattering, IndecMultiset, ResidualQuiver};
use crate::singularity::Basket;

/// Coordinates on `Z⟨Res⁺(ℓ)⟩`; negative entries stand for inverses.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SignedBasketVector {
    pub ell: u64,
    pub coords: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedBodyResult {
    pub ell: u64,
    pub delta: DeltaVector,
    /// False when δ lies outside `Δ(ℓ)`; then there are no baskets.
    pub realizable: bool,
    pub particular: Option<SignedBasketVector>,
    pub kernel_basis: Vec<Vec<i64>>,
    pub baskets: Vec<Basket>,
    pub vectors: Vec<SignedBasketVector>,
    pub rk2: Vec<Rational>,
    pub mu_max: u64,
}

impl ReducedBodyResult {
    fn trivial(ell: u64, delta: DeltaVector, kernel_basis: Vec<Vec<i64>>) -> Self {
        ReducedBodyResult {
            ell,
            delta,
            realizable: true,
            particular: None,
            kernel_basis,
            baskets: vec![Basket::empty()],
            vectors: Vec::new(),
            rk2: vec![int(0)],
            mu_max: 0,
        }
    }

    fn not_realizable(ell: u64, delta: DeltaVector, kernel_basis: Vec<Vec<i64>>) -> Self {
        ReducedBodyResult {
            ell,
            delta,
            realizable: false,
            particular: None,
            kernel_basis,
            baskets: Vec::new(),
            vectors: Vec::new(),
            rk2: Vec::new(),
            mu_max: 0,
        }
    }

    pub fn json(&self) -> ReportJson {
        ReportJson {
            local_index: Some(self.ell),
            delta: Some(self.delta.entries().to_vec()),
            baskets: Some(self.baskets.iter().map(|b| b.to_strings()).collect()),
            rk_squared: Some(self.rk2.iter().map(fmt_rational).collect()),
            verdict: (!self.realizable).then(|| "NOT_REALIZABLE".to_string()),
            ..Default::default()
        }
    }
}

/// True iff `u ∈ v + L_v`: `u_i − v_i` is a nonnegative multiple of `sign(v_i)` wherever `v_i ≠ 0`.
pub fn features_in(u: &[i64], v: &[i64]) -> Result<bool> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch(u.len(), v.len()));
    }
    Ok(u.iter().zip(v).all(|(&a, &b)| b == 0 || (a - b) * b.signum() >= 0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Feasible,
    Infeasible,
    NoSurface,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Feasible => "FEASIBLE",
            Verdict::Infeasible => "INFEASIBLE",
            Verdict::NoSurface => "NO_SURFACE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceReport {
    /// One reduced basket per ℓ-piece, united.
    pub basket: Basket,
    pub rk2: Rational,
    pub ik2: Rational,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub k2: Rational,
    pub parts: BTreeMap<u64, DeltaVector>,
    pub choices: Vec<ChoiceReport>,
    pub verdict: Verdict,
    /// No choice leaves room for a cancelling tuple or a smooth affine piece.
    pub toric_impossible: bool,
}

impl FeasibilityReport {
    pub fn json(&self) -> ReportJson {
        ReportJson {
            k_squared: Some(fmt_rational(&self.k2)),
            baskets: Some(self.choices.iter().map(|c| c.basket.to_strings()).collect()),
            rk_squared: Some(self.choices.iter().map(|c| fmt_rational(&c.rk2)).collect()),
            ik_squared: Some(self.choices.iter().map(|c| fmt_rational(&c.ik2)).collect()),
            verdict: Some(self.verdict.to_string()),
            toric_impossible: Some(self.toric_impossible),
            parts: Some(self.parts.iter().map(|(l, d)| (l.to_string(), d.entries().to_vec())).collect()),
            ..Default::default()
        }
    }
}

/// Per-ℓ reduced bodies of a Hilbert series and the verdict for every choice.
pub fn analyze_series(h: &RationalFunction) -> Result<FeasibilityReport> {
    analyze_series_with(h, &EnumerationConfig::default())
}

pub fn analyze_series_with(h: &RationalFunction, cfg: &EnumerationConfig) -> Result<FeasibilityReport> {
    let hs = split_series(h)?;
    let mut choices = vec![(Basket::empty(), int(0))];
    for (ell, d) in &hs.parts {
        let body = enumerate_reduced_baskets_with(*ell, d, cfg)?;
        let mut next = Vec::new();
        for (b, rk) in &choices {
            for (b2, rk2) in body.baskets.iter().zip(&body.rk2) {
                next.push((b.union(b2), rk + rk2));
            }
        }
        choices = next;
    }
    let twelve = int(12);
    let choices: Vec<ChoiceReport> = choices
        .into_iter()
        .map(|(basket, rk2)| {
            let ik2 = &twelve - &hs.k2 - &rk2;
            let verdict = if is_nonneg_integer(&ik2) { Verdict::Feasible } else { Verdict::Infeasible };
            ChoiceReport { basket, rk2, ik2, verdict }
        })
        .collect();
    let verdict = if choices.iter().any(|c| c.verdict == Verdict::Feasible) {
        Verdict::Feasible
    } else {
        Verdict::NoSurface
    };
    let toric_impossible = !choices.iter().any(|c| c.verdict == Verdict::Feasible && c.ik2 >= int(1));
    Ok(FeasibilityReport { k2: hs.k2, parts: hs.parts, choices, verdict, toric_impossible })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DegreeBoundsConfig {
    /// Lower bound for the Euler number of the smooth locus.
    pub n_min: u64,
}

/// `(m, M)` with `m ≤ K² ≤ M` for every surface whose residual basket is `basket`.
pub fn degree_bounds(basket: &Basket, cfg: DegreeBoundsConfig) -> Result<(Rational, Rational)> {
    let a: Rational = basket.elements().iter().map(degree_contribution).sum();
    let big_m = int(12) - a - int(cfg.n_min as i64);
    if big_m <= int(0) {
        return Err(Error::Infeasible(format!("no positive degree: 12 - A - nMin = {}", fmt_rational(&big_m))));
    }
    let m = if is_integer(&big_m) { int(1) } else { frac(&big_m) };
    Ok((m, big_m))
}

/// Upper bound on the number of singularities of a surface with orbifold
/// contribution `q` and Gorenstein index at most `ell_star`.
pub fn count_bound(q: &BTreeMap<u64, DeltaVector>, ell_star: u64) -> Result<u64> {
    count_bound_with(q, ell_star, &EnumerationConfig::default())
}

pub fn count_bound_with(q: &BTreeMap<u64, DeltaVector>, ell_star: u64, cfg: &EnumerationConfig) -> Result<u64> {
    let mut s_max = 0u64;
    let mut min_rk = int(0);
    for (ell, d) in q {
        let body = enumerate_reduced_baskets_with(*ell, d, cfg)?;
        if !body.realizable {
            return Err(Error::NotRealizable(*ell));
        }
        s_max += body.baskets.iter().map(|b| b.len() as u64).max().unwrap_or(0);
        min_rk += body.rk2.iter().min().cloned().unwrap_or_else(|| int(0));
    }
    let b = int(12) - min_rk;
    let u = if is_integer(&b) { b.to_integer() - 1 } else { floor(&b) };
    let u = to_i64(&u).unwrap_or(0).max(0);
    Ok(s_max + u as u64 * (ell_star + 1))
}

/// `(Ψ, Ψ̃)`: maximal shatterings of the residues and of the raw ℓ-piece.
pub fn psi_invariants(basket: &Basket, ell: u64) -> Result<(IndecMultiset, IndecMultiset)> {
    let q = ResidualQuiver::new(ell)?;
    let piece = basket.pieces().remove(&ell).unwrap_or_else(Basket::empty);
    let psi = maximal_shattering(&q, &piece.residues())?;
    let psi_tilde = maximal_shattering(&q, &piece)?;
    Ok((psi, psi_tilde))
}

/// JSON shape shared by the `reduce`, `analyze` and `bounds` outputs.
#[derive(Clone, Debug, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local_index: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_squared: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parts: Option<BTreeMap<String, Vec<i64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baskets: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rk_squared: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ik_squared: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub toric_impossible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsJson {
    pub m: String,
    #[serde(rename = "M")]
    pub big_m: String,
}

/// `p/q`, or `p` when `q = 1`.
pub fn fmt_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    fn b(s: &str) -> Basket {
        s.parse().unwrap()
    }

    #[test]
    fn features_in_examples() {
        assert!(features_in(&[1, 2], &[1, 0]).unwrap());
        assert!(!features_in(&[0, 0], &[1, 0]).unwrap());
        assert!(features_in(&[3, -2], &[3, -2]).unwrap());
        assert!(features_in(&[3, -5], &[2, -2]).unwrap());
        assert!(!features_in(&[3, -1], &[2, -2]).unwrap());
        assert_eq!(features_in(&[1], &[1, 2]), Err(Error::LengthMismatch(1, 2)));
    }

    #[test]
    fn degree_bounds_examples() {
        let cfg = DegreeBoundsConfig::default();
        assert_eq!(degree_bounds(&Basket::empty(), cfg).unwrap(), (int(1), int(12)));
        let want = (rat(3, 5), rat(68, 5));
        assert_eq!(degree_bounds(&b("1/5(1,1), 1/15(1,2)"), cfg).unwrap(), want);
        assert_eq!(degree_bounds(&b("1/20(1,3)"), cfg).unwrap(), want);
        assert!(matches!(
            degree_bounds(&Basket::empty(), DegreeBoundsConfig { n_min: 12 }),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn reduced_body_five() {
        let d = DeltaVector::new(5, vec![2, 1, 2]).unwrap();
        let r = enumerate_reduced_baskets(5, &d).unwrap();
        let mut got: Vec<Vec<i64>> = r.vectors.iter().map(|v| v.coords.clone()).collect();
        got.sort();
        let mut want = vec![vec![1, 0, 0, 1], vec![1, -1, 1, 0], vec![0, 0, 1, -1], vec![0, 1, 0, 0]];
        want.sort();
        assert_eq!(got, want);
        assert!(r.rk2.iter().all(|x| *x == rat(-8, 5)));
    }

    #[test]
    fn reduced_body_zero_is_empty_basket() {
        let r = enumerate_reduced_baskets(7, &DeltaVector::zero(7)).unwrap();
        assert_eq!(r.baskets, vec![Basket::empty()]);
    }

    #[test]
    fn unrealizable_delta() {
        let r = enumerate_reduced_baskets(5, &DeltaVector::new(5, vec![1, 0, 1]).unwrap()).unwrap();
        assert!(!r.realizable && r.baskets.is_empty());
        let q = BTreeMap::from([(5, DeltaVector::new(5, vec![1, 0, 1]).unwrap())]);
        assert_eq!(count_bound(&q, 5), Err(Error::NotRealizable(5)));
    }

    #[test]
    fn analyze_smooth_series() {
        let h = |s: &str| RationalFunction::parse(s).unwrap();
        let r = analyze_series(&h("(1+11*t+t^2)/(1-t)^3")).unwrap();
        assert_eq!(r.verdict, Verdict::NoSurface);
        let r = analyze_series(&h("(1+10*t+t^2)/(1-t)^3")).unwrap();
        assert_eq!(r.verdict, Verdict::Feasible);
        assert!(r.toric_impossible);
        assert_eq!(r.choices[0].ik2, int(0));
        let r = analyze_series(&h("(1+7*t+t^2)/(1-t)^3")).unwrap();
        assert_eq!((r.verdict, r.toric_impossible), (Verdict::Feasible, false));
        assert_eq!(r.choices[0].ik2, int(3));
    }

    #[test]
    fn psi_of_twelve() {
        let q = ResidualQuiver::new(3).unwrap();
        let (psi, tilde) = psi_invariants(&b("1/12(1,7)"), 3).unwrap();
        assert_eq!(psi, maximal_shattering(&q, &b("1/3(1,1)")).unwrap());
        assert_eq!(tilde, psi.add(&IndecMultiset::cycle(&q, 1)));
        let (psi, tilde) = psi_invariants(&b("1/9(1,2), 1/18(1,5)"), 3).unwrap();
        assert_eq!(psi.total(), 0);
        assert_eq!(tilde, IndecMultiset::cycle(&q, 3));
    }
}
