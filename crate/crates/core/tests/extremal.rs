use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use seplab_core::extremal::{
    are_t_far, chernoff_two_sided, compress_pair, down_closure, fi_condition, ideals, is_ideal, is_left_compressed,
    kl_and_topsoe, leftof, max_border_product, max_product_bruteforce, mu_prob_exact, prob_bound_rhs_exact, shift_family,
    theorem3_bound, theorem3_bound_exact, SetFamily,
};
use seplab_core::sets::combinations;
use seplab_core::{Caps, Subset};

fn sorted(x: Subset) -> Vec<u32> {
    x.iter().collect()
}

/// Componentwise order straight from the definition.
fn below(x: Subset, y: Subset) -> bool {
    sorted(x).iter().zip(sorted(y).iter()).all(|(p, q)| p <= q)
}

fn family(n: u32, a: u32, bits: u64) -> SetFamily {
    let pool = combinations(n, a);
    SetFamily::new(n, a, (0..pool.len()).filter(|&i| bits >> i & 1 == 1).map(|i| pool[i])).unwrap()
}

fn arb_family(n: u32, a: u32) -> impl Strategy<Value = SetFamily> {
    let c = combinations(n, a).len();
    (0u64..1 << c).prop_map(move |bits| family(n, a, bits))
}

fn arb_subset(n: u32, a: u32) -> impl Strategy<Value = Subset> {
    let pool = combinations(n, a);
    (0..pool.len()).prop_map(move |i| pool[i])
}

#[test]
fn ideals_match_brute_force_over_all_families() {
    for (n, a) in [(4, 2), (5, 2), (5, 3), (6, 2)] {
        let pool = combinations(n, a);
        let mut brute = BTreeSet::new();
        for bits in 0u64..1 << pool.len() {
            let ok = (0..pool.len()).all(|i| {
                bits >> i & 1 == 0 || (0..pool.len()).all(|j| !below(pool[j], pool[i]) || bits >> j & 1 == 1)
            });
            if ok {
                brute.insert(bits);
            }
        }
        let found = ideals(n, a, &Caps::default()).unwrap();
        assert_eq!(found.len(), brute.len(), "n={n} a={a}");
        let distinct: BTreeSet<Vec<Subset>> = found.iter().map(|f| f.iter().collect()).collect();
        assert_eq!(distinct.len(), found.len());
        assert!(found.iter().all(is_ideal));
    }
}

#[test]
fn left_compressed_families_are_ideals() {
    for (n, a) in [(4, 2), (5, 2), (5, 3), (6, 2)] {
        let c = combinations(n, a).len();
        for bits in 0u64..1 << c {
            let f = family(n, a, bits);
            if is_left_compressed(&f) {
                assert!(is_ideal(&f), "{f:?}");
            }
        }
    }
}

#[test]
fn order_is_partial_exhaustively() {
    for a in 1..=3 {
        let pool = combinations(6, a);
        for &x in &pool {
            assert!(leftof(x, x).unwrap());
            for &y in &pool {
                let xy = leftof(x, y).unwrap();
                assert_eq!(xy, below(x, y));
                if xy && leftof(y, x).unwrap() {
                    assert_eq!(x, y);
                }
                for &z in &pool {
                    if xy && leftof(y, z).unwrap() {
                        assert!(leftof(x, z).unwrap());
                    }
                }
            }
        }
    }
    assert!(leftof(Subset::from_elements([1]).unwrap(), Subset::from_elements([1, 2]).unwrap()).is_err());
}

#[test]
fn fi_condition_matches_farness_on_ideals() {
    let caps = Caps::default();
    let mut checked = 0u64;
    for n in 2..=6 {
        for a in 1..=3.min(n - 1) {
            let pool = combinations(n, a);
            for f in ideals(n, a, &caps).unwrap() {
                for &y in &pool {
                    let g = SetFamily::new(n, a, [y]).unwrap();
                    for t in 0..a {
                        assert_eq!(are_t_far(&f, &g, t), fi_condition(&f, &g, t).unwrap(), "{f:?} {y:?} t={t}");
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 1000);
}

/// max |F| |G| over every F, with G forced to the largest compatible family.
fn max_product_oracle(n: u32, a: u32, t: u32) -> u128 {
    let pool = combinations(n, a);
    let mut best = 0u128;
    for bits in 0u64..1 << pool.len() {
        let f: Vec<Subset> = (0..pool.len()).filter(|&i| bits >> i & 1 == 1).map(|i| pool[i]).collect();
        let g = pool.iter().filter(|y| f.iter().all(|x| x.intersection(**y).len() <= t as usize)).count();
        best = best.max(f.len() as u128 * g as u128);
    }
    best
}

#[test]
fn max_product_matches_oracle_and_bounds() {
    let caps = Caps::default();
    for (n, a) in [(3, 1), (4, 1), (4, 2), (5, 2), (5, 3), (6, 2)] {
        for t in 0..a {
            let m = max_product_bruteforce(n, a, t, &caps).unwrap();
            assert_eq!(m.value, max_product_oracle(n, a, t), "n={n} a={a} t={t}");
            assert_eq!(m.value, (m.f.len() * m.g.len()) as u128);
            assert!(are_t_far(&m.f, &m.g, t));
            assert_eq!(max_border_product(n, a, t, &caps).unwrap().0, m.value);
            let (lo, _) = theorem3_bound_exact(n, a, t).unwrap();
            assert!(BigRational::from_integer(BigInt::from(m.value)) <= lo);
        }
    }
    assert_eq!(max_product_bruteforce(6, 2, 0, &caps).unwrap().value, 9);
    assert_eq!(max_product_bruteforce(4, 2, 0, &caps).unwrap().value, 1);
}

#[test]
fn theorem3_bound_is_monotone_in_t() {
    for n in 4..=12 {
        for a in 2..n {
            let values: Vec<f64> = (0..a).map(|t| theorem3_bound(n, a, t).unwrap()).collect();
            assert!(values.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}

#[test]
fn prob_bound_holds_on_ideal_pairs() {
    let caps = Caps::default();
    for n in 3..=6 {
        for a in 1..=3.min(n - 1) {
            let p = BigRational::new(a.into(), n.into());
            let pool = combinations(n, a);
            for t in 0..a {
                let (rhs, _) = prob_bound_rhs_exact(n, a, t).unwrap();
                for f in ideals(n, a, &caps).unwrap() {
                    let g = SetFamily::new(
                        n,
                        a,
                        pool.iter().copied().filter(|&y| fi_condition(&f, &SetFamily::new(n, a, [y]).unwrap(), t).unwrap()),
                    )
                    .unwrap();
                    assert!(mu_prob_exact(&f, &p) * mu_prob_exact(&g, &p) <= rhs);
                }
            }
        }
    }
}

#[test]
fn kl_dominates_topsoe_on_grid() {
    for i in 1..100 {
        for j in 1..100 {
            let (kl, rhs) = kl_and_topsoe(i as f64 / 100.0, j as f64 / 100.0).unwrap();
            assert!(kl + 1e-12 >= rhs, "x={i} y={j}");
        }
    }
}

#[test]
fn chernoff_bound_dominates_exact_tail() {
    for l in 1..=20 {
        for p in 1..=9i64 {
            for e in 0..=10i64 {
                let c = chernoff_two_sided(
                    l,
                    &BigRational::new(p.into(), 10.into()),
                    &BigRational::new(e.into(), 20.into()),
                )
                .unwrap();
                assert!(c.holds(), "l={l} p={p} e={e}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn shifting_keeps_size_and_farness(f in arb_family(6, 3), g in arb_family(6, 3), i in 1u32..6, dj in 1u32..6, t in 0u32..3) {
        let j = (i + dj).min(6);
        prop_assume!(i < j);
        let sf = shift_family(&f, i, j);
        let sg = shift_family(&g, j, i);
        prop_assert_eq!(sf.len(), f.len());
        prop_assert_eq!(sg.len(), g.len());
        if are_t_far(&f, &g, t) {
            prop_assert!(are_t_far(&sf, &sg, t));
        }
    }

    #[test]
    fn compression_terminates_compressed(f in arb_family(5, 2), g in arb_family(5, 2), t in 0u32..2) {
        let c = compress_pair(&f, &g);
        prop_assert!(is_left_compressed(&c.f));
        prop_assert!(is_ideal(&c.f));
        prop_assert_eq!(c.f.len(), f.len());
        prop_assert_eq!(c.g.len(), g.len());
        prop_assert!(c.potentials.windows(2).all(|w| w[1] < w[0]));
        prop_assert_eq!(c.potentials.len(), c.steps.len() + 1);
        if are_t_far(&f, &g, t) {
            prop_assert!(are_t_far(&c.f, &c.g, t));
        }
    }

    #[test]
    fn down_closure_is_least_ideal(f in arb_family(6, 2)) {
        let c = down_closure(&f);
        prop_assert!(is_ideal(&c));
        prop_assert!(f.iter().all(|x| c.contains(x)));
        prop_assert!(c.iter().all(|x| f.iter().any(|y| below(x, y))));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, max_global_rejects: 100_000, ..ProptestConfig::default() })]

    #[test]
    fn lowering_elements_moves_left(y in arb_subset(9, 4), drops in proptest::collection::vec(0u32..6, 4)) {
        // x_i <= m(Y, i), the x_i themselves in no particular order.
        let xs: Vec<u32> = sorted(y).iter().zip(&drops).map(|(&v, &d)| v.saturating_sub(d).max(1)).collect();
        let x = Subset::from_elements(xs.iter().copied()).unwrap();
        prop_assume!(x.len() == 4);
        prop_assert!(leftof(x, y).unwrap());
    }

    #[test]
    fn raising_elements_moves_right(x in arb_subset(9, 4), bumps in proptest::collection::vec(0u32..6, 4)) {
        // m(X, i) <= y_i, the y_i in no particular order.
        let ys: Vec<u32> = sorted(x).iter().zip(&bumps).map(|(&v, &d)| (v + d).min(9)).collect();
        let y = Subset::from_elements(ys.iter().copied()).unwrap();
        prop_assume!(y.len() == 4);
        prop_assert!(leftof(x, y).unwrap());
    }
}
