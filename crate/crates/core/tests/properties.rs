use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

use orbibasket::exactalg::{int, int_kernel, poly_inverse_mod, rat, IntMatrix, IntPolynomial, Rational, RationalFunction};
use orbibasket::hilbert::{
    assemble_series, degree_contribution, dedekind_sum, orbifold_contribution, split_series, DeltaVector,
};
use orbibasket::quiver::residual_system;
use orbibasket::singularity::{
    hyperplane_sum, hyperplane_sum_all, normalize_cone, Basket, Classification, IntCone, Singularity,
};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..ProptestConfig::default() }
}

fn sing(r: u64, a: u64) -> Singularity {
    Singularity::new(r, a).unwrap()
}

fn any_singularity(max_r: u64) -> impl Strategy<Value = Singularity> {
    (2..=max_r, 1..max_r)
        .prop_filter("coprime weight", |&(r, a)| a < r && r.gcd(&a) == 1)
        .prop_map(|(r, a)| sing(r, a))
}

// `1/kℓ(1, kc − 1)` has width `k` and local index `ℓ`.
fn small_index_singularity(max_ell: u64, max_k: u64) -> impl Strategy<Value = Singularity> {
    (1..=max_ell, 1..=max_k, 1..=max_ell)
        .prop_filter("valid", |&(l, k, c)| {
            c <= l && l.gcd(&c) == 1 && k * l >= 2 && (k * l).gcd(&(k * c - 1)) == 1 && k * c - 1 >= 1
        })
        .prop_map(|(l, k, c)| sing(k * l, k * c - 1))
}

fn q_sum(ss: &[Singularity]) -> Vec<i64> {
    let ell = ss[0].local_index();
    ss.iter().fold(DeltaVector::zero(ell), |acc, s| &acc + &orbifold_contribution(s)).full()
}

fn q_total(parts: &BTreeMap<u64, DeltaVector>) -> RationalFunction {
    parts.values().fold(RationalFunction::zero(), |acc, d| &acc + &d.q_series())
}

fn a_sum(ss: &[Singularity]) -> Rational {
    ss.iter().map(degree_contribution).sum()
}

// 2x2 SL2(Z) words in the generators S and T^{±1}.
fn sl2_word() -> impl Strategy<Value = [[i64; 2]; 2]> {
    prop::collection::vec(0..3u8, 0..8).prop_map(|w| {
        let mut g = [[1i64, 0], [0, 1]];
        for x in w {
            let h = match x {
                0 => [[0, -1], [1, 0]],
                1 => [[1, 1], [0, 1]],
                _ => [[1, -1], [0, 1]],
            };
            g = [
                [g[0][0] * h[0][0] + g[0][1] * h[1][0], g[0][0] * h[0][1] + g[0][1] * h[1][1]],
                [g[1][0] * h[0][0] + g[1][1] * h[1][0], g[1][0] * h[0][1] + g[1][1] * h[1][1]],
            ];
        }
        g
    })
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn inverse_mod_is_an_inverse(f in prop::collection::vec(-4i64..=4, 1..5), n in 2usize..9) {
        let f = IntPolynomial::from_i64(&f);
        let h = IntPolynomial::from_i64(&vec![1; n]);
        if let Ok(g) = poly_inverse_mod(&f, &h) {
            let one = &(&f.to_rat() * &g) - &IntPolynomial::one().to_rat();
            prop_assert!(one.rem(&h.to_rat()).is_zero());
        }
    }

    #[test]
    fn kernel_is_complementary(rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 4), 1..4)) {
        let m = IntMatrix::from_i64_rows(&rows);
        let k = int_kernel(&m);
        for v in &k {
            prop_assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
        prop_assert_eq!(m.rank() + k.len(), m.cols());
    }

    #[test]
    fn ratfunc_normalization_is_stable(
        p in prop::collection::vec(-5i64..=5, 1..4),
        q in prop::collection::vec(-5i64..=5, 1..4),
        g in prop::collection::vec(-3i64..=3, 1..3),
    ) {
        let (p, q, g) = (IntPolynomial::from_i64(&p), IntPolynomial::from_i64(&q), IntPolynomial::from_i64(&g));
        prop_assume!(!q.is_zero() && !g.is_zero());
        let a = RationalFunction::new(p.clone(), q.clone());
        let b = RationalFunction::new(&p * &g, &q * &g);
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(RationalFunction::new(a.num().clone(), a.den().clone()), a);
    }

    #[test]
    fn normal_form_is_sl2_invariant(u in (-9i64..=9, -9i64..=9), v in (-9i64..=9, -9i64..=9), g in sl2_word()) {
        prop_assume!(u.0.gcd(&u.1) == 1 && v.0.gcd(&v.1) == 1);
        let Ok(c) = IntCone::new(u, v) else { return Ok(()) };
        prop_assert_eq!(normalize_cone(&c.transform(g).unwrap()), normalize_cone(&c));
    }

    #[test]
    fn dual_reverses_gluing(s in any_singularity(60), t in any_singularity(60)) {
        prop_assert_eq!(s.dual().dual(), s);
        prop_assert_eq!(hyperplane_sum(&s, &t).is_some(), hyperplane_sum(&t.dual(), &s.dual()).is_some());
    }

    #[test]
    fn shatterings_recompose_and_add(s in small_index_singularity(8, 11)) {
        prop_assert!(s.local_index() <= 8);
        for parts in s.shatterings() {
            prop_assert_eq!(hyperplane_sum_all(&parts), Some(s));
            prop_assert_eq!(q_sum(&parts), orbifold_contribution(&s).full());
            // a smooth shard enters K² through the Euler number, i.e. with weight 1
            let smooth = parts.iter().filter(|p| p.is_smooth()).count() as i64;
            prop_assert_eq!(a_sum(&parts) + int(smooth), degree_contribution(&s));
        }
    }

    #[test]
    fn residue_keeps_index_and_slope(s in any_singularity(400)) {
        let res = s.residue();
        let (ell, k) = (s.local_index(), s.width());
        match res.residue {
            Some(r) => {
                prop_assert_eq!(r.local_index(), ell);
                prop_assert_eq!(r.slope(), s.slope());
                prop_assert_eq!(r.width(), k % ell);
            }
            None => prop_assert_eq!(k % ell, 0),
        }
        for t in &res.t_parts {
            prop_assert!(t.is_t());
        }
    }

    #[test]
    fn split_inverts_assemble(
        items in prop::collection::vec(any_singularity(120), 1..6),
        num in 1i64..=60,
        den in 1i64..=12,
    ) {
        let b = Basket::new(items.into_iter().filter(|s| s.local_index() <= 10));
        let k2 = rat(num, den);
        let h = assemble_series(&b, &k2);
        let idx: Vec<u64> = h.parts.keys().copied().collect();
        let unique = idx.iter().all(|&l| idx.iter().all(|&m| m == l || l.gcd(&m) < 3));
        match split_series(&h.series) {
            Ok(back) => {
                prop_assert_eq!(&back.k2, &k2);
                prop_assert!(unique || q_total(&back.parts) == q_total(&h.parts));
                if unique {
                    prop_assert_eq!(back.parts, h.parts);
                }
            }
            Err(e) => prop_assert!(!unique, "{}", e),
        }
    }

    // A random T-cone shatters into a multiset with zero Q-sum.
    #[test]
    fn cancelling_multisets_have_natural_degree(
        cones in prop::collection::vec((1u64..=3, 1u64..=5, any::<prop::sample::Index>()), 1..4),
        ell in 3u64..=6,
    ) {
        let mut all: Vec<Singularity> = Vec::new();
        // every cone is 1/(d·ℓ²)(1, dℓc − 1), so all pieces share local index ℓ
        for (d, c, pick) in cones {
            if ell.gcd(&c) != 1 {
                continue;
            }
            let t = sing(d * ell * ell, (d * ell * c - 1) % (d * ell * ell));
            prop_assert!(t.is_t(), "{} is not T", t);
            let sh = t.shatterings();
            all.extend(pick.get(&sh).iter().copied());
        }
        prop_assume!(!all.is_empty());
        prop_assert!(q_sum(&all).iter().all(|&x| x == 0));
        let a = a_sum(&all);
        prop_assert!(a.is_integer() && a >= int(1));
    }
}

#[test]
fn inverse_pairs_sum_to_one() {
    for ell in 3..=12u64 {
        for c in &residual_system(ell).unwrap().classes {
            let inv = c.sing.hyperplane_inverse().unwrap();
            let t = hyperplane_sum(&c.sing, &inv).expect("inverse glues");
            assert!(matches!(t.classify(), Classification::TSingularity { d: 1, .. }), "{}", c.sing);
            assert_eq!(degree_contribution(&c.sing) + degree_contribution(&inv), int(1), "{}", c.sing);
        }
    }
}

#[test]
fn deltas_are_palindromic_up_to_twenty() {
    for ell in 3..=20u64 {
        for c in &residual_system(ell).unwrap().classes {
            let full = orbifold_contribution(&c.sing).full();
            assert_eq!(full.len() as u64, ell);
            assert_eq!((full[0], full[full.len() - 1]), (0, 0));
            assert!(full.iter().eq(full.iter().rev()), "{}", c.sing);
        }
    }
}

#[test]
fn invisible_iff_t_up_to_200() {
    for r in 2..=200u64 {
        for a in 1..r {
            if r.gcd(&a) != 1 {
                continue;
            }
            let s = sing(r, a);
            let t = matches!(s.classify(), Classification::TSingularity { .. });
            assert_eq!(orbifold_contribution(&s).is_zero(), t, "{s}");
        }
    }
}

#[test]
fn t_laws() {
    for d in 1..=4u64 {
        for n in 1..=5u64 {
            for c in 1..=n {
                if n.gcd(&c) != 1 || d * n * n < 2 {
                    continue;
                }
                let s = sing(d * n * n, (d * n * c - 1) % (d * n * n));
                assert!(orbifold_contribution(&s).is_zero(), "{s}");
                assert_eq!(degree_contribution(&s), int(d as i64), "{s}");
            }
        }
    }
}

#[test]
fn width_is_even_at_local_index_two() {
    for r in 2..=200u64 {
        for a in 1..r {
            if r.gcd(&a) == 1 && sing(r, a).local_index() == 2 {
                let s = sing(r, a);
                assert_eq!(s.width() % 2, 0, "{s}");
                assert!(s.is_t());
            }
        }
    }
}

// Direct summation over the r-th roots of unity in f64.
fn numeric(r: u64, a: u64, i: i64) -> f64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for k in 1..r {
        let th = 2.0 * std::f64::consts::PI * k as f64 / r as f64;
        let (c1, s1) = (1.0 - th.cos(), -th.sin());
        let tha = th * a as f64;
        let (c2, s2) = (1.0 - tha.cos(), -tha.sin());
        let (dr, di) = (c1 * c2 - s1 * s2, c1 * s2 + s1 * c2);
        let thi = th * i as f64;
        let (nr, ni) = (thi.cos(), thi.sin());
        let m = dr * dr + di * di;
        re += (nr * dr + ni * di) / m;
        im += (ni * dr - nr * di) / m;
    }
    assert!(im.abs() < 1e-6);
    re / r as f64
}

#[test]
fn dedekind_matches_numeric_up_to_sixty() {
    for r in 2..=60u64 {
        for a in 1..r {
            if r.gcd(&a) != 1 {
                continue;
            }
            for i in 0..r as i64 {
                let exact = dedekind_sum(r, a as i64, i).unwrap();
                let x = exact.numer().to_f64().unwrap() / exact.denom().to_f64().unwrap();
                assert!((x - numeric(r, a, i)).abs() <= 1e-9, "r={r} a={a} i={i}");
            }
        }
    }
}

// A part of index 5 and its pullback to index 10 give the same series.
#[test]
fn nested_indices_are_indistinguishable() {
    let five = orbifold_contribution(&sing(5, 1));
    let mut lifted = vec![0i64; 10];
    for (i, d) in five.full().iter().enumerate() {
        lifted[i] += 2 * d;
        lifted[i + 5] += 2 * d;
    }
    let ten = DeltaVector::new(10, lifted[1..9].to_vec()).unwrap();
    assert_eq!(five.q_series(), ten.q_series());
    let h = assemble_series(&Basket::new([sing(5, 1), sing(20, 1)]), &rat(7, 1));
    let back = split_series(&h.series).unwrap();
    assert_eq!(back.parts.keys().copied().collect::<Vec<_>>(), [10]);
}
