//! The promise disjointness problem `DISJ'` for `k` parties, box covers of
//! its 1-inputs, and the threshold quantities behind its lower bound.
//!
//! Each party holds an `a`-subset of `[n]`, `a = floor(n / k)`. Inputs in `D`
//! are pairwise disjoint, inputs in `I` pairwise have symmetric difference at
//! most `gamma a`. A nondeterministic protocol for the problem yields a cover
//! of `D` by boxes avoiding `I`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::Ratio;

use crate::caps::Caps;
use crate::error::{check_cap, Error, Result};
use crate::extremal::SetFamily;
use crate::sets::{binomial, combinations, Subset};

/// Parameters of `DISJ'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjPrimeInstance {
    pub n: u32,
    pub k: u32,
    pub gamma: Ratio<u64>,
}

impl DisjPrimeInstance {
    /// Requires `2 <= k <= n` and `0 < gamma < 1`.
    pub fn new(n: u32, k: u32, gamma: Ratio<u64>) -> Result<Self> {
        if k < 2 || k > n {
            return Err(Error::Parameter(format!("need 2 <= k <= n, got k = {k}, n = {n}")));
        }
        if *gamma.numer() == 0 || gamma >= Ratio::from_integer(1) {
            return Err(Error::Parameter(format!("need 0 < gamma < 1, got {gamma}")));
        }
        if n > 64 {
            return Err(Error::Parameter(format!("n = {n} exceeds 64")));
        }
        Ok(DisjPrimeInstance { n, k, gamma })
    }

    pub fn a(&self) -> u32 {
        self.n / self.k
    }

    /// `|X ^ Y| <= gamma a`.
    fn close(&self, x: Subset, y: Subset) -> bool {
        close(x, y, self.gamma, self.a())
    }
}

fn close(x: Subset, y: Subset, gamma: Ratio<u64>, a: u32) -> bool {
    x.symmetric_difference(y).len() as u64 * gamma.denom() <= gamma.numer() * a as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DisjValue {
    One,
    Zero,
    /// Outside the promise, or the degenerate `a = 0` where every tuple is
    /// both disjoint and close.
    Undefined,
}

/// The value of `DISJ'` on a tuple of equal-size sets.
pub fn disj_value(tuple: &[Subset], gamma: Ratio<u64>) -> Result<DisjValue> {
    let a = tuple.first().map_or(0, |x| x.len());
    if let Some(x) = tuple.iter().find(|x| x.len() != a) {
        return Err(Error::SizeMismatch { expected: a, found: x.len() });
    }
    if a == 0 {
        return Ok(DisjValue::Undefined);
    }
    let pairs = || (0..tuple.len()).flat_map(|i| (i + 1..tuple.len()).map(move |j| (tuple[i], tuple[j])));
    if pairs().all(|(x, y)| x.is_disjoint(y)) {
        Ok(DisjValue::One)
    } else if pairs().all(|(x, y)| close(x, y, gamma, a as u32)) {
        Ok(DisjValue::Zero)
    } else {
        Ok(DisjValue::Undefined)
    }
}

/// `C(n, a) C(n - a, a) ... C(n - (k-1) a, a)`.
pub fn d_size_formula(n: u32, k: u32) -> u128 {
    let a = n / k;
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(binomial((n - i * a) as u64, a as u64)))
}

fn check_tuple_space(n: u32, k: u32, caps: &Caps) -> Result<Vec<Subset>> {
    let pool = combinations(n, n / k);
    let space = (pool.len() as u128).checked_pow(k).unwrap_or(u128::MAX);
    check_cap("tuple space", space, caps.tuple_space)?;
    Ok(pool)
}

/// Tuples over `pool` in lexicographic order, first coordinate slowest, such
/// that every new set is compatible with all earlier ones.
fn tuples<F: Fn(Subset, Subset) -> bool>(pool: &[Subset], k: usize, compatible: F) -> Vec<Vec<Subset>> {
    let mut out = Vec::new();
    let mut chosen: Vec<Subset> = Vec::with_capacity(k);
    let mut cursor = vec![0usize];
    while let Some(pos) = cursor.last_mut() {
        if *pos == pool.len() {
            cursor.pop();
            chosen.pop();
            continue;
        }
        let y = pool[*pos];
        *pos += 1;
        if !chosen.iter().all(|&x| compatible(x, y)) {
            continue;
        }
        chosen.push(y);
        if chosen.len() == k {
            out.push(chosen.clone());
            chosen.pop();
        } else {
            cursor.push(0);
        }
    }
    out
}

/// All pairwise disjoint tuples, lexicographically.
pub fn gen_d(n: u32, k: u32, caps: &Caps) -> Result<Vec<Vec<Subset>>> {
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let pool = check_tuple_space(n, k, caps)?;
    Ok(tuples(&pool, k as usize, |x, y| x.is_disjoint(y)))
}

/// All pairwise close tuples, lexicographically.
pub fn gen_i(inst: &DisjPrimeInstance, caps: &Caps) -> Result<Vec<Vec<Subset>>> {
    let pool = check_tuple_space(inst.n, inst.k, caps)?;
    Ok(tuples(&pool, inst.k as usize, |x, y| inst.close(x, y)))
}

/// A product `F_1 x ... x F_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Box {
    pub factors: Vec<SetFamily>,
}

impl Box {
    pub fn contains(&self, tuple: &[Subset]) -> bool {
        tuple.len() == self.factors.len() && self.factors.iter().zip(tuple).all(|(f, &x)| f.contains(x))
    }

    /// The first tuple of `I` inside the box, if any.
    pub fn find_close_tuple(&self, inst: &DisjPrimeInstance) -> Option<Vec<Subset>> {
        let k = self.factors.len();
        let lists: Vec<Vec<Subset>> = self.factors.iter().map(|f| f.iter().collect()).collect();
        let mut chosen: Vec<Subset> = Vec::with_capacity(k);
        let mut cursor = vec![0usize];
        while !cursor.is_empty() {
            let level = cursor.len() - 1;
            let pos = &mut cursor[level];
            if *pos == lists[level].len() {
                cursor.pop();
                chosen.pop();
                continue;
            }
            let y = lists[level][*pos];
            *pos += 1;
            if !chosen.iter().all(|&x| inst.close(x, y)) {
                continue;
            }
            chosen.push(y);
            if chosen.len() == k {
                return Some(chosen);
            }
            cursor.push(0);
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverCertificate {
    pub instance: DisjPrimeInstance,
    pub boxes: Vec<Box>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverCheck {
    Valid,
    Malformed(alloc::string::String),
    Uncovered(Vec<Subset>),
    HitsI { index: usize, tuple: Vec<Subset> },
}

impl CoverCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, CoverCheck::Valid)
    }
}

/// Every tuple of `D` lies in a box, and no box meets `I`.
pub fn check_cover(cert: &CoverCertificate, caps: &Caps) -> Result<CoverCheck> {
    let inst = &cert.instance;
    let a = inst.a();
    for (index, b) in cert.boxes.iter().enumerate() {
        if b.factors.len() != inst.k as usize || b.factors.iter().any(|f| f.n() != inst.n || f.a() != a) {
            return Ok(CoverCheck::Malformed(format!("box {index} does not have {} factors over C([{}], {a})", inst.k, inst.n)));
        }
    }
    for (index, b) in cert.boxes.iter().enumerate() {
        if let Some(tuple) = b.find_close_tuple(inst) {
            return Ok(CoverCheck::HitsI { index, tuple });
        }
    }
    for tuple in gen_d(inst.n, inst.k, caps)? {
        if !cert.boxes.iter().any(|b| b.contains(&tuple)) {
            return Ok(CoverCheck::Uncovered(tuple));
        }
    }
    Ok(CoverCheck::Valid)
}

/// The smallest box containing the tuples of `d` selected by `mask`.
pub fn span_box(inst: &DisjPrimeInstance, d: &[Vec<Subset>], mask: u64) -> Box {
    let factors = (0..inst.k as usize)
        .map(|i| {
            let members = (0..d.len()).filter(|&j| mask >> j & 1 == 1).map(|j| d[j][i]);
            SetFamily::new(inst.n, inst.a(), members).expect("tuples of D have a-sets")
        })
        .collect();
    Box { factors }
}

/// An optimal cover and its size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinCover {
    pub size: usize,
    pub certificate: CoverCertificate,
}

/// Minimum number of `I`-avoiding boxes covering `D`.
///
/// A set `S` of `D`-tuples fits in an `I`-avoiding box iff its span box avoids
/// `I`; that property is closed under subsets, so minimum covers may be taken
/// to be partitions and are found by dynamic programming over subsets of `D`.
pub fn min_cover_bruteforce(inst: &DisjPrimeInstance, caps: &Caps) -> Result<MinCover> {
    let d = gen_d(inst.n, inst.k, caps)?;
    check_cap("cover tuples", d.len() as u128, caps.cover_tuples as u128)?;
    let m = d.len();
    let full = (1u64 << m) - 1;
    let feasible: Vec<bool> = (0..=full).map(|mask| span_box(inst, &d, mask).find_close_tuple(inst).is_none()).collect();
    let mut best = vec![usize::MAX; 1 << m];
    let mut pick = vec![0u64; 1 << m];
    best[0] = 0;
    for mask in 1..=full {
        // Fix the lowest tuple in the part to avoid recounting orderings.
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut sub = rest;
        loop {
            let part = sub | low;
            if feasible[part as usize] && best[(mask ^ part) as usize] != usize::MAX {
                let c = best[(mask ^ part) as usize] + 1;
                if c < best[mask as usize] {
                    best[mask as usize] = c;
                    pick[mask as usize] = part;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    let mut boxes = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let part = pick[mask as usize];
        boxes.push(span_box(inst, &d, part));
        mask ^= part;
    }
    Ok(MinCover { size: best[full as usize], certificate: CoverCertificate { instance: inst.clone(), boxes } })
}

/// `gamma^2 n / (10^4 k) - 2 log2 n` when `k / gamma <= sqrt(n) / 100` and
/// `2 <= k <= n - 1`; `None` otherwise.
pub fn thm4_lower_bound(n: u64, k: u64, gamma: Ratio<u64>) -> Option<f64> {
    if k < 2 || k + 1 > n || *gamma.numer() == 0 {
        return None;
    }
    // k / gamma <= sqrt(n) / 100  <=>  10^4 k^2 q^2 <= p^2 n  for gamma = p/q.
    let (p, q) = (*gamma.numer() as u128, *gamma.denom() as u128);
    let lhs = 10_000u128.checked_mul(k as u128 * k as u128)?.checked_mul(q * q)?;
    let rhs = (p * p).checked_mul(n as u128)?;
    if lhs > rhs {
        return None;
    }
    let g = p as f64 / q as f64;
    Some(g * g * n as f64 / (1e4 * k as f64) - 2.0 * libm::log2(n as f64))
}

/// `2^(k-2) sqrt(32 a (n - a)) exp(-(a - t - 1)^2 / (40 a)) C(n, a) + 2^(k-2)`.
pub fn lemma9_threshold(n: u32, a: u32, t: u32, k: u32) -> Result<f64> {
    if !(t < a && a < n) || k < 2 {
        return Err(Error::Precondition(format!("need t < a < n and k >= 2, got n = {n}, a = {a}, t = {t}, k = {k}")));
    }
    let s = (a - t - 1) as f64;
    let scale = libm::pow(2.0, (k - 2) as f64);
    let root = libm::sqrt(32.0 * a as f64 * (n - a) as f64);
    Ok(scale * root * libm::exp(-s * s / (40.0 * a as f64)) * binomial(n as u64, a as u64) as f64 + scale)
}

/// `A^{k,n}_{a,t}`: the least `N` such that any `k` families of `a`-sets of
/// size at least `N` admit `F_1, ..., F_k` with `|F_1 ^ F_i| >= t + 1`.
///
/// With `far(T)` the members `t`-far from all of `T`, families of size `N`
/// fail iff some `F_1` of size `N` splits into at most `k - 1` parts `T` with
/// `|far(T)| >= N` (each part is killed by one of the other families).
pub fn a_bruteforce(n: u32, a: u32, t: u32, k: u32, caps: &Caps) -> Result<u64> {
    if !(t < a && a < n) || k < 2 {
        return Err(Error::Precondition(format!("need t < a < n and k >= 2, got n = {n}, a = {a}, t = {t}, k = {k}")));
    }
    let pool = combinations(n, a);
    let m = pool.len();
    check_cap("A members", m as u128, caps.a_members as u128)?;
    let far: Vec<u64> = pool
        .iter()
        .map(|x| (0..m).filter(|&j| x.intersection(pool[j]).len() <= t as usize).fold(0u64, |acc, j| acc | 1 << j))
        .collect();
    let full = (1u64 << m) - 1;
    let far_of: Vec<u32> = (0..=full)
        .map(|mask| (0..m).filter(|&j| mask >> j & 1 == 1).fold(full, |acc, j| acc & far[j]).count_ones())
        .collect();
    let mut max_bad = 0u64;
    for size in 1..=m as u32 {
        let mut parts = vec![u32::MAX; 1 << m];
        parts[0] = 0;
        for mask in 1..=full {
            let low = mask & mask.wrapping_neg();
            let rest = mask ^ low;
            let mut sub = rest;
            loop {
                let part = sub | low;
                if far_of[part as usize] >= size && parts[(mask ^ part) as usize] != u32::MAX {
                    parts[mask as usize] = parts[mask as usize].min(parts[(mask ^ part) as usize] + 1);
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
        let bad = (0..=full).any(|mask| mask.count_ones() == size && parts[mask as usize] < k);
        if bad {
            max_bad = size as u64;
        }
    }
    Ok(max_bad + 1)
}
