//! Small subsets of `[64]` as bitmasks, plus the binomial/combination helpers
//! shared by the set-family and communication modules.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigUint;

use crate::error::{out_of_range, Result};

/// Largest element a [`Subset`] can hold.
pub const MAX_ELEMENT: u32 = 64;

/// A subset of `{1, ..., 64}`; element `x` is bit `x - 1`.
///
/// Ordering is lexicographic on the ascending element sequence, so
/// `{1, 2} < {1, 3} < {2, 3}` and a prefix sorts before its extensions.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub const fn from_bits(bits: u64) -> Self {
        Subset(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn from_elements<I: IntoIterator<Item = u32>>(elements: I) -> Result<Self> {
        let mut bits = 0u64;
        for x in elements {
            if x == 0 || x > MAX_ELEMENT {
                return Err(out_of_range("set element", x as u64, 1, MAX_ELEMENT as u64));
            }
            bits |= 1 << (x - 1);
        }
        Ok(Subset(bits))
    }

    /// `{1, ..., n}`.
    pub fn interval(n: u32) -> Self {
        match n {
            0 => Subset(0),
            64.. => Subset(u64::MAX),
            _ => Subset((1u64 << n) - 1),
        }
    }

    pub fn contains(self, x: u32) -> bool {
        (1..=MAX_ELEMENT).contains(&x) && self.0 & (1 << (x - 1)) != 0
    }

    #[must_use]
    pub fn with(self, x: u32) -> Self {
        debug_assert!((1..=MAX_ELEMENT).contains(&x));
        Subset(self.0 | 1 << (x - 1))
    }

    #[must_use]
    pub fn without(self, x: u32) -> Self {
        debug_assert!((1..=MAX_ELEMENT).contains(&x));
        Subset(self.0 & !(1 << (x - 1)))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn symmetric_difference(self, other: Subset) -> Subset {
        Subset(self.0 ^ other.0)
    }

    pub fn is_disjoint(self, other: Subset) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn min(self) -> Option<u32> {
        (self.0 != 0).then(|| self.0.trailing_zeros() + 1)
    }

    pub fn max(self) -> Option<u32> {
        (self.0 != 0).then(|| 64 - self.0.leading_zeros())
    }

    /// `m(X, i)`: the `i`-th smallest element (1-based), with `m(X, 0) = 0`.
    pub fn nth_smallest(self, i: usize) -> Option<u32> {
        if i == 0 {
            return Some(0);
        }
        self.iter().nth(i - 1)
    }

    pub fn element_sum(self) -> u64 {
        self.iter().map(u64::from).sum()
    }

    /// Ascending iterator over the elements.
    pub fn iter(self) -> SubsetIter {
        SubsetIter(self.0)
    }
}

impl FromIterator<u32> for Subset {
    /// Panics on elements outside `1..=64`; use [`Subset::from_elements`] for
    /// checked construction.
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        Subset::from_elements(iter).expect("subset element out of range")
    }
}

impl IntoIterator for Subset {
    type Item = u32;
    type IntoIter = SubsetIter;
    fn into_iter(self) -> SubsetIter {
        self.iter()
    }
}

#[derive(Clone)]
pub struct SubsetIter(u64);

impl Iterator for SubsetIter {
    type Item = u32;
    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let x = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(x + 1)
    }
    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for SubsetIter {}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Ordering::Equal;
        }
        let x = diff.trailing_zeros();
        // Elements strictly above the first difference.
        let above = if x == 63 { 0 } else { !((2u64 << x) - 1) };
        if self.0 & (1 << x) != 0 {
            if other.0 & above != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        } else if self.0 & above != 0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// All `a`-element subsets of `[n]` in lexicographic order.
pub fn combinations(n: u32, a: u32) -> Vec<Subset> {
    let mut out = Vec::new();
    if a > n || n > MAX_ELEMENT {
        return out;
    }
    let mut idx: Vec<u32> = (1..=a).collect();
    loop {
        out.push(Subset::from_elements(idx.iter().copied()).expect("in range"));
        // Rightmost position that can still advance.
        let mut pos = a as usize;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] < n - (a - 1 - pos as u32) {
                break;
            }
        }
        idx[pos] += 1;
        for q in pos + 1..a as usize {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// `C(n, k)` in `u128`; saturates at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        match acc.checked_mul((n - i) as u128) {
            Some(v) => acc = v / (i as u128 + 1),
            None => return binomial_big(n, k).try_into().unwrap_or(u128::MAX),
        }
    }
    acc
}

/// `C(n, k)` as a big integer.
pub fn binomial_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}
