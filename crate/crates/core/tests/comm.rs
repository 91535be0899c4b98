use num_rational::Ratio;
use proptest::prelude::*;
use seplab_core::comm::{
    a_bruteforce, check_cover, d_size_formula, disj_value, gen_d, gen_i, lemma9_threshold, min_cover_bruteforce,
    thm4_lower_bound, Box, CoverCertificate, DisjPrimeInstance, DisjValue,
};
use seplab_core::extremal::SetFamily;
use seplab_core::sets::combinations;
use seplab_core::{Caps, Subset};

/// All k-tuples over `pool`, no pruning.
fn product(pool: &[Subset], k: u32) -> Vec<Vec<Subset>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t: Vec<Subset>| {
                pool.iter().map(move |&y| {
                    let mut t = t.clone();
                    t.push(y);
                    t
                })
            })
            .collect();
    }
    out
}

#[test]
fn d_and_i_match_filtered_products() {
    let caps = Caps::default();
    for n in 1..=8u32 {
        for k in 1..=3.min(n) {
            let pool = combinations(n, n / k);
            let brute: Vec<Vec<Subset>> = product(&pool, k)
                .into_iter()
                .filter(|t| (0..t.len()).all(|i| (i + 1..t.len()).all(|j| t[i].is_disjoint(t[j]))))
                .collect();
            let d = gen_d(n, k, &caps).unwrap();
            assert_eq!(d, brute, "n={n} k={k}");
            assert_eq!(d.len() as u128, d_size_formula(n, k));
            if k >= 2 {
                let inst = DisjPrimeInstance::new(n, k, Ratio::new(1, 2)).unwrap();
                let a = inst.a();
                let close = |x: Subset, y: Subset| 2 * x.symmetric_difference(y).len() as u32 <= a;
                let brute_i: Vec<Vec<Subset>> = product(&pool, k)
                    .into_iter()
                    .filter(|t| (0..t.len()).all(|i| (i + 1..t.len()).all(|j| close(t[i], t[j]))))
                    .collect();
                let i = gen_i(&inst, &caps).unwrap();
                assert_eq!(i, brute_i);
                if a > 0 {
                    assert!(d.iter().all(|t| disj_value(t, inst.gamma).unwrap() == DisjValue::One));
                    assert!(i.iter().all(|t| disj_value(t, inst.gamma).unwrap() == DisjValue::Zero));
                }
            }
        }
    }
}

/// Smallest number of I-avoiding boxes covering D, by trying every
/// collection of maximal I-avoiding boxes.
fn min_cover_oracle(inst: &DisjPrimeInstance) -> usize {
    let caps = Caps::default();
    let pool = combinations(inst.n, inst.a());
    let d = gen_d(inst.n, inst.k, &caps).unwrap();
    let i = gen_i(inst, &caps).unwrap();
    let fams = 1u64 << pool.len();
    let mut boxes: Vec<Vec<u64>> = Vec::new();
    for code in 0..fams.pow(inst.k) {
        let factors: Vec<u64> = (0..inst.k).map(|c| code / fams.pow(c) % fams).collect();
        let contains = |t: &Vec<Subset>| {
            t.iter().zip(&factors).all(|(y, f)| f >> pool.iter().position(|p| p == y).unwrap() & 1 == 1)
        };
        if !i.iter().any(contains) {
            boxes.push(factors);
        }
    }
    let maximal: Vec<&Vec<u64>> = boxes
        .iter()
        .filter(|b| !boxes.iter().any(|c| c != *b && b.iter().zip(c.iter()).all(|(x, y)| x & y == *x)))
        .collect();
    let covers: Vec<u64> = maximal
        .iter()
        .map(|b| {
            d.iter().enumerate().fold(0u64, |m, (j, t)| {
                let inside = t.iter().zip(b.iter()).all(|(y, f)| f >> pool.iter().position(|p| p == y).unwrap() & 1 == 1);
                if inside {
                    m | 1 << j
                } else {
                    m
                }
            })
        })
        .collect();
    let full = (1u64 << d.len()) - 1;
    let mut reach = vec![0u64];
    for size in 1.. {
        let next: Vec<u64> = reach.iter().flat_map(|&m| covers.iter().map(move |c| m | c)).collect();
        if next.contains(&full) {
            return size;
        }
        reach = next;
        reach.sort();
        reach.dedup();
    }
    unreachable!()
}

#[test]
fn min_cover_matches_box_oracle() {
    let caps = Caps::default();
    for (n, k, g) in [(2, 2, Ratio::new(1, 2)), (3, 2, Ratio::new(1, 2)), (3, 3, Ratio::new(1, 2)), (4, 2, Ratio::new(1, 2))] {
        let inst = DisjPrimeInstance::new(n, k, g).unwrap();
        let m = min_cover_bruteforce(&inst, &caps).unwrap();
        assert_eq!(m.size, min_cover_oracle(&inst), "n={n} k={k}");
        assert_eq!(m.certificate.boxes.len(), m.size);
        assert!(check_cover(&m.certificate, &caps).unwrap().is_valid());
    }
    let inst = DisjPrimeInstance::new(2, 2, Ratio::new(1, 2)).unwrap();
    assert_eq!(min_cover_bruteforce(&inst, &caps).unwrap().size, 2);
}

fn arb_box(n: u32, a: u32, k: u32) -> impl Strategy<Value = Box> {
    let pool = combinations(n, a);
    let c = pool.len();
    proptest::collection::vec(0u64..1 << c, k as usize).prop_map(move |codes| Box {
        factors: codes
            .into_iter()
            .map(|m| SetFamily::new(n, a, (0..c).filter(|&j| m >> j & 1 == 1).map(|j| pool[j])).unwrap())
            .collect(),
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn no_valid_cover_beats_the_minimum(boxes in proptest::collection::vec(arb_box(4, 2, 2), 1..5)) {
        let caps = Caps::default();
        let inst = DisjPrimeInstance::new(4, 2, Ratio::new(1, 2)).unwrap();
        let cert = CoverCertificate { instance: inst.clone(), boxes };
        if check_cover(&cert, &caps).unwrap().is_valid() {
            prop_assert!(cert.boxes.len() >= min_cover_bruteforce(&inst, &caps).unwrap().size);
        }
    }
}

/// `A` from the definition: the least `N` such that every choice of `k`
/// families of size `N` admits `F_1` meeting some member of each other
/// family in at least `t + 1` points.
fn a_oracle(n: u32, a: u32, t: u32, k: u32) -> u64 {
    let pool = combinations(n, a);
    let m = pool.len();
    let families = |size: usize| -> Vec<Vec<Subset>> {
        (0u64..1 << m)
            .filter(|b| b.count_ones() as usize == size)
            .map(|b| (0..m).filter(|&j| b >> j & 1 == 1).map(|j| pool[j]).collect())
            .collect()
    };
    for size in 1..=m {
        let fs = families(size);
        let meets = |x: Subset, f: &Vec<Subset>| f.iter().any(|y| x.intersection(*y).len() > t as usize);
        let ok = product_indices(fs.len(), k as usize).all(|idx| {
            fs[idx[0]].iter().any(|&x| idx[1..].iter().all(|&i| meets(x, &fs[i])))
        });
        if ok {
            return size as u64;
        }
    }
    unreachable!("full families always succeed")
}

fn product_indices(base: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..base.pow(k as u32)).map(move |mut c| {
        (0..k)
            .map(|_| {
                let d = c % base;
                c /= base;
                d
            })
            .collect()
    })
}

#[test]
fn a_matches_definition() {
    let caps = Caps::default();
    for (n, a, t, k) in [(3, 1, 0, 2), (3, 1, 0, 3), (4, 1, 0, 2), (4, 1, 0, 3), (4, 2, 0, 2), (4, 2, 1, 2), (4, 2, 0, 3), (4, 2, 1, 3), (5, 2, 0, 2), (5, 2, 1, 2)] {
        assert_eq!(a_bruteforce(n, a, t, k, &caps).unwrap(), a_oracle(n, a, t, k), "n={n} a={a} t={t} k={k}");
    }
    assert_eq!(a_bruteforce(3, 1, 0, 2, &caps).unwrap(), 2);
}

#[test]
fn a_recursion_inequalities() {
    let caps = Caps::default();
    for n in 3..=5 {
        for a in 1..n {
            if combinations(n, a).len() > caps.a_members {
                continue;
            }
            for t in 0..a {
                let values: Vec<u64> = (2..=5).map(|k| a_bruteforce(n, a, t, k, &caps).unwrap()).collect();
                for w in values.windows(2) {
                    assert!(w[0] <= w[1] && w[1] <= 2 * w[0], "n={n} a={a} t={t} {values:?}");
                }
                let bound = lemma9_threshold(n, a, t, 2).unwrap().floor();
                if bound < combinations(n, a).len() as f64 {
                    assert!(values[0] as f64 <= bound, "n={n} a={a} t={t}");
                }
            }
        }
    }
}

#[test]
fn thm4_applicability_is_exact() {
    // k / gamma = 100 needs sqrt(n) >= 10^4.
    assert!(thm4_lower_bound(100_000_000, 10, Ratio::new(1, 10)).is_some());
    assert!(thm4_lower_bound(99_999_999, 10, Ratio::new(1, 10)).is_none());
    let v = thm4_lower_bound(100_000_000, 10, Ratio::new(1, 10)).unwrap();
    assert!((v - (10.0 - 2.0 * (1e8f64).log2())).abs() < 1e-9);
}
