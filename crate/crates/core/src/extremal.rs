//! Families of `a`-sets with small cross intersections.
//!
//! Shifting, left compression, the componentwise order on sorted sets and its
//! ideals, borders, the border criterion for being far from an ideal, and the
//! numeric side: the product bound, the `mu_p` measure, Chernoff-type tails
//! and a Stirling-type lower bound for binomials.
//!
//! Closed forms come in two flavours: `f64` for display and exact rational
//! brackets (via [`exp_neg_bounds`]) for comparisons that must not depend on
//! rounding.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::caps::Caps;
use crate::error::{check_cap, out_of_range, Error, Result};
use crate::sets::{binomial, binomial_big, combinations, Subset};

/// A family of `a`-element subsets of `[n]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetFamily {
    n: u32,
    a: u32,
    members: BTreeSet<Subset>,
}

impl SetFamily {
    pub fn new<I: IntoIterator<Item = Subset>>(n: u32, a: u32, members: I) -> Result<Self> {
        if n > 64 {
            return Err(out_of_range("ground set size", n as u64, 0, 64));
        }
        let members: BTreeSet<Subset> = members.into_iter().collect();
        for m in &members {
            if m.len() != a as usize || (*m).max().is_some_and(|x| x > n) {
                return Err(Error::Precondition(format!("{m:?} is not a {a}-subset of [{n}]")));
            }
        }
        Ok(SetFamily { n, a, members })
    }

    pub fn empty(n: u32, a: u32) -> Self {
        SetFamily { n, a, members: BTreeSet::new() }
    }

    /// All of `C([n], a)`.
    pub fn complete(n: u32, a: u32) -> Self {
        SetFamily { n, a, members: combinations(n, a).into_iter().collect() }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: Subset) -> bool {
        self.members.contains(&x)
    }

    pub fn iter(&self) -> impl Iterator<Item = Subset> + '_ {
        self.members.iter().copied()
    }

    /// Sum of all elements of all members; shifting towards 1 lowers it.
    pub fn potential(&self) -> u64 {
        self.members.iter().map(|m| m.element_sum()).sum()
    }
}

/// `s_ij`: replace `j` by `i` when `j` is in and `i` is out.
pub fn shift_set(x: Subset, i: u32, j: u32) -> Subset {
    if x.contains(j) && !x.contains(i) {
        x.without(j).with(i)
    } else {
        x
    }
}

/// `S_ij`: shift every member whose image is not already present.
pub fn shift_family(f: &SetFamily, i: u32, j: u32) -> SetFamily {
    let members = f
        .members
        .iter()
        .map(|&x| {
            let y = shift_set(x, i, j);
            if f.members.contains(&y) {
                x
            } else {
                y
            }
        })
        .collect();
    SetFamily { n: f.n, a: f.a, members }
}

pub fn are_t_far(f: &SetFamily, g: &SetFamily, t: u32) -> bool {
    f.iter().all(|x| g.iter().all(|y| x.intersection(y).len() <= t as usize))
}

pub fn is_left_compressed(f: &SetFamily) -> bool {
    first_moving_shift(f).is_none()
}

fn first_moving_shift(f: &SetFamily) -> Option<(u32, u32)> {
    (1..=f.n).flat_map(|i| (i + 1..=f.n).map(move |j| (i, j))).find(|&(i, j)| shift_family(f, i, j) != *f)
}

/// Result of [`compress_pair`]: the final families, the shifts applied and
/// the potential of `F` before each step and at the end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compression {
    pub f: SetFamily,
    pub g: SetFamily,
    pub steps: Vec<(u32, u32)>,
    pub potentials: Vec<u64>,
}

/// Applies `S_ij` to `F` and `S_ji` to `G` for the least `(i, j)`, `i < j`,
/// that moves `F`, until `F` is left-compressed.
pub fn compress_pair(f: &SetFamily, g: &SetFamily) -> Compression {
    let (mut f, mut g) = (f.clone(), g.clone());
    let mut steps = Vec::new();
    let mut potentials = vec![f.potential()];
    while let Some((i, j)) = first_moving_shift(&f) {
        f = shift_family(&f, i, j);
        g = shift_family(&g, j, i);
        steps.push((i, j));
        potentials.push(f.potential());
    }
    Compression { f, g, steps, potentials }
}

/// `X` precedes `Y` componentwise on sorted elements.
pub fn leftof(x: Subset, y: Subset) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::SizeMismatch { expected: x.len(), found: y.len() });
    }
    Ok(x.iter().zip(y.iter()).all(|(p, q)| p <= q))
}

/// Sets obtained from `y` by lowering one element by one.
pub fn lower_covers(y: Subset) -> impl Iterator<Item = Subset> {
    y.iter().filter(move |&v| v > 1 && !y.contains(v - 1)).map(move |v| y.without(v).with(v - 1))
}

/// Downward closed under [`leftof`]. Closure under [`lower_covers`] is
/// enough: any `X` below `Y` is reached by unit decrements.
pub fn is_ideal(f: &SetFamily) -> bool {
    f.iter().all(|y| lower_covers(y).all(|x| f.contains(x)))
}

pub fn down_closure(f: &SetFamily) -> SetFamily {
    let mut members = f.members.clone();
    let mut stack: Vec<Subset> = members.iter().copied().collect();
    while let Some(y) = stack.pop() {
        for x in lower_covers(y) {
            if members.insert(x) {
                stack.push(x);
            }
        }
    }
    SetFamily { n: f.n, a: f.a, members }
}

/// `(L_j(X), R_j(X))`: the `j` smallest and the `j` largest elements.
pub fn borders(x: Subset, j: u32) -> Result<(Subset, Subset)> {
    let l = x.len();
    if j == 0 || j as usize > l {
        return Err(out_of_range("border width", j as u64, 1, l as u64));
    }
    let elems: Vec<u32> = x.iter().collect();
    let left = elems[..j as usize].iter().fold(Subset::EMPTY, |s, &v| s.with(v));
    let right = elems[l - j as usize..].iter().fold(Subset::EMPTY, |s, &v| s.with(v));
    Ok((left, right))
}

/// `L_{t+1}(G)` is not below `R_{t+1}(F)` for every `F` in `f`, `G` in `g`.
pub fn fi_condition(f: &SetFamily, g: &SetFamily, t: u32) -> Result<bool> {
    if t + 1 > f.a || f.a != g.a {
        return Err(Error::Precondition(format!("need t + 1 <= a, got t = {t}, a = {}", f.a)));
    }
    for y in g.iter() {
        let (lg, _) = borders(y, t + 1)?;
        for x in f.iter() {
            let (_, rf) = borders(x, t + 1)?;
            if leftof(lg, rf)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Every ideal of `C([n], a)`, each exactly once.
///
/// Walks the members in order of element sum (a linear extension of the
/// order); a member may join only when all its lower covers are in.
pub fn ideals(n: u32, a: u32, caps: &Caps) -> Result<Vec<SetFamily>> {
    let mut pool = combinations(n, a);
    check_cap("family members", pool.len() as u128, caps.family_members as u128)?;
    pool.sort_by_key(|s| (s.element_sum(), *s));
    let index = |s: Subset| pool.iter().position(|&p| p == s).expect("cover stays in the pool");
    let covers: Vec<u64> = pool.iter().map(|&y| lower_covers(y).fold(0u64, |m, x| m | 1 << index(x))).collect();
    let mut out = Vec::new();
    let mut stack: Vec<(usize, u64)> = vec![(0, 0)];
    while let Some((i, chosen)) = stack.pop() {
        if i == pool.len() {
            let members = (0..pool.len()).filter(|&b| chosen >> b & 1 == 1).map(|b| pool[b]);
            out.push(SetFamily { n, a, members: members.collect() });
            check_cap("ideals", out.len() as u128, caps.scan_steps)?;
            continue;
        }
        if covers[i] & !chosen == 0 {
            stack.push((i + 1, chosen | 1 << i));
        }
        stack.push((i + 1, chosen));
    }
    Ok(out)
}

fn check_nat(n: u32, a: u32, t: u32) -> Result<()> {
    if !(t < a && a < n) {
        return Err(Error::Precondition(format!("need t < a < n, got t = {t}, a = {a}, n = {n}")));
    }
    Ok(())
}

/// `32 a (n - a) exp(-(a - t - 1)^2 / (20 a)) C(n, a)^2`.
pub fn theorem3_bound(n: u32, a: u32, t: u32) -> Result<f64> {
    check_nat(n, a, t)?;
    let s = (a - t - 1) as f64;
    let c = binomial(n as u64, a as u64) as f64;
    Ok(32.0 * a as f64 * (n - a) as f64 * libm::exp(-s * s / (20.0 * a as f64)) * c * c)
}

/// Rational bracket `(lo, hi)` around [`theorem3_bound`].
pub fn theorem3_bound_exact(n: u32, a: u32, t: u32) -> Result<(BigRational, BigRational)> {
    check_nat(n, a, t)?;
    let s = (a - t - 1) as i64;
    let (lo, hi) = exp_neg_bounds(&BigRational::new(BigInt::from(s * s), BigInt::from(20 * a as i64)))?;
    let c = BigInt::from(binomial_big(n as u64, a as u64));
    let factor = BigRational::from_integer(BigInt::from(32 * a as i64 * (n - a) as i64) * &c * &c);
    Ok((&factor * lo, factor * hi))
}

/// Optimal `F` (containing `{1..a}`) and `G = {G : |F ^ G| <= t for all F}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxProduct {
    pub value: u128,
    pub f: SetFamily,
    pub g: SetFamily,
}

/// `max |F| |G|` over `t`-far pairs, by search over `F` with the largest
/// compatible `G`. Since permutations of `[n]` act transitively on `a`-sets,
/// `F` may be assumed to contain the first member `{1, ..., a}`.
pub fn max_product_bruteforce(n: u32, a: u32, t: u32, caps: &Caps) -> Result<MaxProduct> {
    if a > n || n > 64 {
        return Err(Error::Precondition(format!("need a <= n <= 64, got a = {a}, n = {n}")));
    }
    let pool = combinations(n, a);
    let m = pool.len();
    check_cap("family members", m as u128, caps.family_members as u128)?;
    let far: Vec<u64> = pool
        .iter()
        .map(|x| (0..m).filter(|&j| x.intersection(pool[j]).len() <= t as usize).fold(0u64, |acc, j| acc | 1 << j))
        .collect();
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let mut best = (0u128, 0u64, 0u64);
    if m == 0 {
        return Ok(MaxProduct { value: 0, f: SetFamily::empty(n, a), g: SetFamily::empty(n, a) });
    }
    // Depth-first over members with index > the last chosen; `g` is the AND of
    // the far masks so far.
    let mut stack: Vec<(usize, u64, u64)> = vec![(1, 1, far[0] & full)];
    while let Some((next, f, g)) = stack.pop() {
        let size = f.count_ones() as u128;
        let value = size * g.count_ones() as u128;
        if value > best.0 {
            best = (value, f, g);
        }
        // Adding members never grows G.
        let room = (m - next) as u128;
        if (size + room) * g.count_ones() as u128 <= best.0 {
            continue;
        }
        for j in (next..m).rev() {
            let g2 = g & far[j];
            if g2 != 0 {
                stack.push((j + 1, f | 1 << j, g2));
            }
        }
    }
    let family = |mask: u64| SetFamily { n, a, members: (0..m).filter(|&b| mask >> b & 1 == 1).map(|b| pool[b]).collect() };
    Ok(MaxProduct { value: best.0, f: family(best.1), g: family(best.2) })
}

/// `mu_p(F) = |F| p^a (1 - p)^(n - a)`.
pub fn mu_prob(f: &SetFamily, p: f64) -> f64 {
    f.len() as f64 * libm::pow(p, f.a as f64) * libm::pow(1.0 - p, (f.n - f.a) as f64)
}

pub fn mu_prob_exact(f: &SetFamily, p: &BigRational) -> BigRational {
    let one = BigRational::one();
    BigRational::from_integer(BigInt::from(f.len())) * p.pow(f.a as i32) * (one - p).pow((f.n - f.a) as i32)
}

/// `4 n exp(-(a - t - 1)^2 / (20 a))`.
pub fn prob_bound_rhs(n: u32, a: u32, t: u32) -> Result<f64> {
    if t >= a {
        return Err(Error::Precondition(format!("need t < a, got t = {t}, a = {a}")));
    }
    let s = (a - t - 1) as f64;
    Ok(4.0 * n as f64 * libm::exp(-s * s / (20.0 * a as f64)))
}

/// Rational bracket around [`prob_bound_rhs`].
pub fn prob_bound_rhs_exact(n: u32, a: u32, t: u32) -> Result<(BigRational, BigRational)> {
    if t >= a {
        return Err(Error::Precondition(format!("need t < a, got t = {t}, a = {a}")));
    }
    let s = (a - t - 1) as i64;
    let (lo, hi) = exp_neg_bounds(&BigRational::new(BigInt::from(s * s), BigInt::from(20 * a as i64)))?;
    let four_n = BigRational::from_integer(BigInt::from(4 * n as i64));
    Ok((&four_n * lo, four_n * hi))
}

/// Largest `|F| |G|` over pairs meeting the border condition, where `F` runs
/// over ideals and `G` is the largest family compatible with `F`. Since the
/// condition survives taking down-closures of `F`, this is the maximum over
/// all pairs.
pub fn max_border_product(n: u32, a: u32, t: u32, caps: &Caps) -> Result<(u128, SetFamily, SetFamily)> {
    check_nat(n, a, t)?;
    let all = SetFamily::complete(n, a);
    let mut best = (0u128, SetFamily::empty(n, a), SetFamily::empty(n, a));
    for f in ideals(n, a, caps)? {
        let g = SetFamily {
            n,
            a,
            members: all.iter().filter(|&y| fi_condition(&f, &single(n, a, y), t).expect("t < a")).collect(),
        };
        let v = f.len() as u128 * g.len() as u128;
        if v > best.0 {
            best = (v, f, g);
        }
    }
    Ok(best)
}

fn single(n: u32, a: u32, x: Subset) -> SetFamily {
    SetFamily { n, a, members: core::iter::once(x).collect() }
}

/// `(D(x || y), (x - y)^2 / (2 (x + y)))` with `0 ln 0 = 0`.
pub fn kl_and_topsoe(x: f64, y: f64) -> Result<(f64, f64)> {
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::Parameter(format!("y = {y} must lie in (0, 1)")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Parameter(format!("x = {x} must lie in [0, 1]")));
    }
    let term = |p: f64, q: f64| if p == 0.0 { 0.0 } else { p * libm::log(p / q) };
    let kl = term(x, y) + term(1.0 - x, 1.0 - y);
    Ok((kl, (x - y) * (x - y) / (2.0 * (x + y))))
}

/// Two-sided binomial tail against `2 exp(-eps^2 l / (4p + 2eps))`.
#[derive(Clone, Debug, PartialEq)]
pub struct Chernoff {
    pub bound: f64,
    pub exact: f64,
    /// Rational lower bound on `bound`.
    pub bound_lo: BigRational,
    /// `P[Bin(l, p) outside [(p - eps) l, (p + eps) l]]`, exactly.
    pub exact_tail: BigRational,
}

impl Chernoff {
    /// The bound dominates the tail, decided in rational arithmetic.
    pub fn holds(&self) -> bool {
        self.bound_lo >= self.exact_tail
    }
}

pub fn chernoff_two_sided(l: u32, p: &BigRational, eps: &BigRational) -> Result<Chernoff> {
    let (zero, one) = (BigRational::zero(), BigRational::one());
    if l == 0 || eps.is_negative() || p < &zero || p > &one {
        return Err(Error::Parameter(format!("need l >= 1, eps >= 0, 0 <= p <= 1; got l = {l}, p = {p}, eps = {eps}")));
    }
    let lr = BigRational::from_integer(BigInt::from(l));
    let (lo_edge, hi_edge) = ((p - eps) * &lr, (p + eps) * &lr);
    let mut tail = BigRational::zero();
    for j in 0..=l {
        let jr = BigRational::from_integer(BigInt::from(j));
        if jr < lo_edge || jr > hi_edge {
            let c = BigRational::from_integer(BigInt::from(binomial_big(l as u64, j as u64)));
            tail += c * p.pow(j as i32) * (&one - p).pow((l - j) as i32);
        }
    }
    let denom = p * BigRational::from_integer(4.into()) + eps * BigRational::from_integer(2.into());
    let (bound_lo, bound) = if denom.is_zero() {
        // p = eps = 0: the exponent is 0 / 0; the bound degenerates to 2.
        (BigRational::from_integer(2.into()), 2.0)
    } else {
        let x = eps * eps * &lr / &denom;
        let (lo, _) = exp_neg_bounds(&x)?;
        (lo * BigRational::from_integer(2.into()), 2.0 * libm::exp(-to_f64(&x)))
    };
    Ok(Chernoff { bound, exact: to_f64(&tail), bound_lo, exact_tail: tail })
}

/// `sqrt(1 / (8 n (a/n) ((n - a)/n))) (n/a)^a (n/(n - a))^(n - a)`.
pub fn binom_lower_bound(n: u32, a: u32) -> Result<f64> {
    if !(0 < a && a < n) {
        return Err(Error::Precondition(format!("need 0 < a < n, got a = {a}, n = {n}")));
    }
    let (nf, af) = (n as f64, a as f64);
    let p = af / nf;
    let root = libm::sqrt(1.0 / (8.0 * nf * p * (1.0 - p)));
    Ok(root * libm::pow(nf / af, af) * libm::pow(nf / (nf - af), nf - af))
}

/// `binom_lower_bound(n, a) <= C(n, a)`, squared and cleared of
/// denominators: `n^(2n+1) <= 8 a (n - a) a^(2a) (n - a)^(2(n - a)) C(n, a)^2`.
pub fn binom_lower_bound_holds(n: u32, a: u32) -> Result<bool> {
    if !(0 < a && a < n) {
        return Err(Error::Precondition(format!("need 0 < a < n, got a = {a}, n = {n}")));
    }
    let (nb, ab, bb) = (BigUint::from(n), BigUint::from(a), BigUint::from(n - a));
    let c = binomial_big(n as u64, a as u64);
    let lhs = nb.pow(2 * n + 1);
    let rhs = BigUint::from(8u32) * &ab * &bb * ab.pow(2 * a) * bb.pow(2 * (n - a)) * &c * &c;
    Ok(lhs <= rhs)
}

pub(crate) fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

const EXP_BITS: u32 = 256;

fn round_to_grid(x: &BigRational, up: bool) -> BigRational {
    let scale = BigInt::one() << EXP_BITS;
    let scaled = x * BigRational::from_integer(scale.clone());
    let (q, r) = scaled.numer().div_mod_floor(scaled.denom());
    let q = if up && !r.is_zero() { q + 1 } else { q };
    BigRational::new(q, scale)
}

/// Rational `(lo, hi)` with `lo <= exp(-x) <= hi`, for `x >= 0`.
///
/// Reduces to `y = x / 2^m <= 1/2`, brackets `exp(-y)` by consecutive partial
/// sums of its alternating series, then squares `m` times; both ends stay
/// positive, so squaring keeps the bracket. Intermediate values are rounded
/// outward onto a 2^-256 grid.
pub fn exp_neg_bounds(x: &BigRational) -> Result<(BigRational, BigRational)> {
    if x.is_negative() {
        return Err(Error::Parameter(format!("exp_neg_bounds needs x >= 0, got {x}")));
    }
    let half = BigRational::new(1.into(), 2.into());
    let mut y = x.clone();
    let mut m = 0u32;
    while y > half {
        y /= BigRational::from_integer(2.into());
        m += 1;
    }
    let mut sum = BigRational::one();
    let mut term = BigRational::one();
    let (mut lo, mut hi) = (BigRational::zero(), BigRational::one());
    for k in 1..=30u32 {
        term = -term * &y / BigRational::from_integer(BigInt::from(k));
        sum += &term;
        if k % 2 == 1 {
            lo = sum.clone();
        } else {
            hi = sum.clone();
        }
    }
    let (mut lo, mut hi) = (round_to_grid(&lo, false), round_to_grid(&hi, true));
    for _ in 0..m {
        lo = round_to_grid(&(&lo * &lo), false);
        hi = round_to_grid(&(&hi * &hi), true);
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[u32]) -> Subset {
        Subset::from_elements(v.iter().copied()).unwrap()
    }

    fn fam(n: u32, a: u32, v: &[&[u32]]) -> SetFamily {
        SetFamily::new(n, a, v.iter().map(|x| s(x))).unwrap()
    }

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn shifting_examples() {
        assert_eq!(shift_set(s(&[2, 3]), 1, 2), s(&[1, 3]));
        assert_eq!(shift_set(s(&[1, 2]), 1, 2), s(&[1, 2]));
        assert_eq!(shift_family(&fam(4, 2, &[&[2, 3]]), 1, 2), fam(4, 2, &[&[1, 3]]));
        let both = fam(4, 2, &[&[1, 3], &[2, 3]]);
        assert_eq!(shift_family(&both, 1, 2), both);
        assert!(are_t_far(&fam(4, 2, &[&[1, 2]]), &fam(4, 2, &[&[3, 4]]), 0));
        assert!(!are_t_far(&fam(4, 2, &[&[1, 2]]), &fam(4, 2, &[&[2, 3]]), 0));
        assert!(are_t_far(&fam(4, 2, &[&[1, 2]]), &SetFamily::empty(4, 2), 0));
    }

    #[test]
    fn compression_example() {
        let c = compress_pair(&fam(4, 2, &[&[2, 3]]), &fam(4, 2, &[&[1, 4]]));
        assert_eq!(c.f, fam(4, 2, &[&[1, 2]]));
        assert_eq!(c.g.len(), 1);
        assert!(c.potentials.windows(2).all(|w| w[1] < w[0]));
        assert!(are_t_far(&c.f, &c.g, 0));
        let done = fam(4, 2, &[&[1, 2]]);
        assert!(compress_pair(&done, &done).steps.is_empty());
    }

    #[test]
    fn order_and_borders() {
        assert!(leftof(s(&[1, 3]), s(&[2, 3])).unwrap());
        assert!(!leftof(s(&[2, 3]), s(&[1, 4])).unwrap());
        assert!(leftof(s(&[1]), s(&[1, 2])).is_err());
        assert!(is_ideal(&fam(4, 2, &[&[1, 2]])));
        assert!(!is_ideal(&fam(4, 2, &[&[2, 3]])));
        assert_eq!(borders(s(&[1, 4, 6, 9]), 2).unwrap(), (s(&[1, 4]), s(&[6, 9])));
        assert_eq!(borders(s(&[1, 4]), 2).unwrap(), (s(&[1, 4]), s(&[1, 4])));
        assert_eq!(borders(s(&[1, 4, 6]), 1).unwrap(), (s(&[1]), s(&[6])));
        assert!(borders(s(&[1]), 2).is_err());
        assert!(fi_condition(&fam(4, 2, &[&[1, 2]]), &fam(4, 2, &[&[3, 4]]), 0).unwrap());
        assert!(!fi_condition(&fam(4, 2, &[&[1, 2]]), &fam(4, 2, &[&[1, 2]]), 0).unwrap());
    }

    #[test]
    fn ideal_counts() {
        let caps = Caps::default();
        // C([3], 1) is a chain of 3: 4 ideals. C([4], 2) has 6 members.
        assert_eq!(ideals(3, 1, &caps).unwrap().len(), 4);
        let all = ideals(4, 2, &caps).unwrap();
        assert!(all.iter().all(is_ideal));
        let distinct: BTreeSet<Vec<Subset>> = all.iter().map(|f| f.iter().collect()).collect();
        assert_eq!(distinct.len(), all.len());
        // Brute force over all 2^6 families.
        let pool = combinations(4, 2);
        let brute = (0u32..64)
            .filter(|mask| is_ideal(&SetFamily::new(4, 2, (0..6).filter(|b| mask >> b & 1 == 1).map(|b| pool[b])).unwrap()))
            .count();
        assert_eq!(all.len(), brute);
    }

    #[test]
    fn bounds() {
        // 57600 e^(-1/40) = 56177.8509...
        assert!((theorem3_bound(6, 2, 0).unwrap() - 56177.851).abs() < 1e-3);
        assert!((theorem3_bound(10, 4, 1).unwrap() / 3.222e7 - 1.0).abs() < 1e-3);
        let (lo, hi) = theorem3_bound_exact(6, 2, 0).unwrap();
        assert!(to_f64(&lo) <= 56177.851 && to_f64(&hi) >= 56177.850);
        assert!((prob_bound_rhs(6, 2, 0).unwrap() - 23.41).abs() < 0.01);
        assert_eq!(prob_bound_rhs(6, 3, 2).unwrap(), 24.0);
        assert_eq!(max_product_bruteforce(6, 2, 0, &Caps::default()).unwrap().value, 9);
        assert_eq!(max_product_bruteforce(4, 2, 0, &Caps::default()).unwrap().value, 1);
        assert_eq!(mu_prob_exact(&fam(4, 2, &[&[1, 2]]), &r(1, 2)), r(1, 16));
        assert_eq!(mu_prob(&SetFamily::empty(4, 2), 0.5), 0.0);
    }

    #[test]
    fn divergences_and_tails() {
        assert_eq!(kl_and_topsoe(0.5, 0.5).unwrap(), (0.0, 0.0));
        let (kl, rhs) = kl_and_topsoe(1.0, 0.5).unwrap();
        assert!((kl - core::f64::consts::LN_2).abs() < 1e-12 && (rhs - 0.25 / 3.0).abs() < 1e-12);
        let (kl, rhs) = kl_and_topsoe(0.6, 0.5).unwrap();
        assert!((kl - 0.02014).abs() < 1e-5 && (rhs - 0.004545).abs() < 1e-6);
        assert!(kl_and_topsoe(0.5, 1.0).is_err());
        let c = chernoff_two_sided(10, &r(1, 2), &r(3, 10)).unwrap();
        assert_eq!(c.exact_tail, r(22, 1024));
        assert!((c.bound - 1.415).abs() < 1e-3);
        assert!(c.holds());
        let c = chernoff_two_sided(10, &r(1, 2), &r(0, 1)).unwrap();
        assert_eq!(c.bound, 2.0);
        assert_eq!(chernoff_two_sided(10, &r(1, 2), &r(1, 1)).unwrap().exact_tail, r(0, 1));
    }

    #[test]
    fn binomial_lower_bound() {
        assert!((binom_lower_bound(2, 1).unwrap() - 2.0).abs() < 1e-12);
        assert!((binom_lower_bound(10, 5).unwrap() - 228.97).abs() < 0.01);
        for n in 2..=60 {
            for a in 1..n {
                assert!(binom_lower_bound_holds(n, a).unwrap(), "n = {n}, a = {a}");
            }
        }
    }

    #[test]
    fn exp_brackets() {
        for (p, q) in [(0, 1), (1, 40), (1, 2), (3, 1), (25, 2)] {
            let x = r(p, q);
            let (lo, hi) = exp_neg_bounds(&x).unwrap();
            let e = libm::exp(-to_f64(&x));
            assert!(lo <= hi);
            assert!((to_f64(&lo) - e).abs() <= 1e-15 * e.max(1e-300) + 1e-300);
            assert!((to_f64(&hi) - e).abs() <= 1e-15 * e.max(1e-300) + 1e-300);
        }
    }
}
