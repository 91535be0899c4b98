//! Adversarial words against time-bounded separators.
//!
//! The structured search follows the block induction: pick a disjoint tuple
//! `X`, let `g^r` list `X_1 \ U, ..., X_k \ U` in the `<_X` order, and ask
//! [`alg1`] for an `f^r` from an intersecting tuple that reaches the same
//! state. The general search drops the block structure and compares the state
//! sets reachable by odd-realizable and by long even-realizable prefixes.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::automaton::{check_alphabet, delta_star, make_absorbing, product_arcs, SafetyAutomaton};
use crate::caps::Caps;
use crate::error::{check_cap, out_of_range, Error, Result};
use crate::game::{classify_graph, encode_set_word, enumerate_game_graphs, hash_letter, is_walk, GameGraph, GraphParity, Letter, Word};
use crate::separation::{Counterexample, FailureReason};
use crate::sets::{combinations, Subset};

/// Derived quantities for a node bound `n` and a time bound `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Params {
    pub n: u64,
    pub t: u64,
    pub n_prime: u64,
    pub k: u64,
    pub a: u64,
    /// `log2 Q`.
    pub q_exponent: BigUint,
}

impl Params {
    pub fn gamma(&self) -> Ratio<u64> {
        Ratio::new(1, self.k)
    }

    /// Number of blocks, `floor(k / 5)`.
    pub fn blocks(&self) -> u64 {
        self.k / 5
    }

    /// `Q` itself, when it fits.
    pub fn q(&self) -> Option<u128> {
        let e = self.q_exponent.to_u32()?;
        1u128.checked_shl(e).filter(|_| e < 128)
    }

    /// Whether `states <= Q`.
    pub fn admits_states(&self, states: u32) -> bool {
        self.q().is_none_or(|q| states as u128 <= q)
    }
}

pub fn derive_params(n: u64, t: u64) -> Result<Params> {
    if n == 0 {
        return Err(Error::Parameter("n must be positive".into()));
    }
    let k = 20 * (t / n);
    if k == 0 {
        return Err(Error::Parameter(format!("k = 20 * floor({t} / {n}) is zero; need t >= n")));
    }
    let n_prime = n.div_ceil(2);
    let num = BigUint::from(n).pow(5);
    let den = (BigUint::from(1000u32) * t).pow(4);
    let q_exponent = (&num + &den - 1u32) / &den;
    Ok(Params { n, t, n_prime, k, a: n_prime / k, q_exponent })
}

/// A tuple of pairwise disjoint sets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DisjointTuple(Vec<Subset>);

impl DisjointTuple {
    pub fn new(sets: Vec<Subset>) -> Result<Self> {
        let mut seen = Subset::EMPTY;
        for s in &sets {
            if !seen.is_disjoint(*s) {
                return Err(Error::Precondition(format!("sets of the tuple overlap in {:?}", seen.intersection(*s))));
            }
            seen = seen.union(*s);
        }
        Ok(DisjointTuple(sets))
    }

    pub fn sets(&self) -> &[Subset] {
        &self.0
    }

    pub fn union(&self) -> Subset {
        self.0.iter().fold(Subset::EMPTY, |acc, s| acc.union(*s))
    }

    fn block_of(&self, p: u32) -> Option<usize> {
        self.0.iter().position(|s| s.contains(p))
    }

    /// `(X_1 \ U, 1) ... (X_k \ U, 1)`.
    pub fn increasing_word(&self, removed: Subset) -> Word {
        let mut w = Word::new();
        for s in &self.0 {
            w.extend_from(&encode_set_word(s.difference(removed).iter()));
        }
        w
    }
}

/// `p <_X q`: earlier block first, numeric order inside a block.
pub fn xbar_less(xbar: &DisjointTuple, p: u32, q: u32) -> Result<bool> {
    let hi = xbar.union().max().unwrap_or(0) as u64;
    let bp = xbar.block_of(p).ok_or_else(|| out_of_range("node outside the tuple", p as u64, 1, hi))?;
    let bq = xbar.block_of(q).ok_or_else(|| out_of_range("node outside the tuple", q as u64, 1, hi))?;
    Ok(bp < bq || (bp == bq && p < q))
}

pub fn is_xbar_increasing(xbar: &DisjointTuple, w: &Word) -> bool {
    let mut prev: Option<(usize, u32)> = None;
    for l in w.iter() {
        let Some(b) = xbar.block_of(l.node) else {
            return false;
        };
        if let Some(p) = prev {
            if p >= (b, l.node) {
                return false;
            }
        }
        prev = Some((b, l.node));
    }
    true
}

/// A witness graph on `[n]` and the nodes that carry the construction; every
/// other node only has a padding loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessGraph {
    pub graph: GameGraph,
    pub core: BTreeSet<u32>,
}

fn pad_and_build(n: u32, mut edges: Vec<(u32, u32, u32)>, core: BTreeSet<u32>, pad_priority: u32) -> Result<WitnessGraph> {
    edges.extend((1..=n).filter(|v| !core.contains(v)).map(|v| (v, v, pad_priority)));
    let graph = GameGraph::new(n as usize, 2, edges)?;
    Ok(WitnessGraph { graph, core })
}

fn check_letters_within(w: &Word, n_prime: u32) -> Result<()> {
    match w.iter().find(|l| l.node == 0 || l.node > n_prime || l.priority != 1) {
        Some(l) => Err(Error::Precondition(format!("letter {l:?} is not in [{n_prime}] x {{1}}"))),
        None => Ok(()),
    }
}

/// The odd graph carrying `f^1 #_1 ... f^m #_m` on `[n]`: each block
/// `v(f^j) + {n' + j}` is a priority-1 clique with loops, consecutive blocks are
/// joined forward at priority 2, and the last block feeds a sink `n' + m + 1`
/// with a priority-1 loop.
pub fn build_odd_witness(fs: &[Word], n_prime: u32, n: u32) -> Result<WitnessGraph> {
    let m = fs.len() as u32;
    let sink = n_prime + m + 1;
    if sink > n {
        return Err(out_of_range("node budget", sink as u64, 1, n as u64));
    }
    let mut blocks: Vec<Vec<u32>> = Vec::with_capacity(fs.len() + 1);
    let mut used = BTreeSet::new();
    for (j, f) in fs.iter().enumerate() {
        check_letters_within(f, n_prime)?;
        let mut block: Vec<u32> = f.iter().map(|l| l.node).collect::<BTreeSet<_>>().into_iter().collect();
        if block.iter().any(|v| used.contains(v)) {
            return Err(Error::Precondition(format!("node sets of the words overlap at block {}", j + 1)));
        }
        used.extend(block.iter().copied());
        block.push(n_prime + j as u32 + 1);
        blocks.push(block);
    }
    blocks.push(vec![sink]);
    let mut edges = Vec::new();
    for (j, block) in blocks.iter().enumerate() {
        if j + 1 < blocks.len() {
            for &u in block {
                edges.extend(block.iter().map(|&v| (u, v, 1)));
                edges.extend(blocks[j + 1].iter().map(|&v| (u, v, 2)));
            }
        }
    }
    edges.push((sink, sink, 1));
    let core = blocks.into_iter().flatten().collect();
    pad_and_build(n, edges, core, 1)
}

/// The even graph carrying `g^1 #_1 ... g^m #_m` for `X`-increasing `g^j`:
/// priority-1 edges along `<_X`, priority-1 edges into the hubs
/// `n' + 1, ..., n' + m` and priority-2 edges out of them.
///
/// The word is a walk only when every `g^j` is nonempty, as there are no
/// hub-to-hub edges.
pub fn build_even_witness(xbar: &DisjointTuple, n_prime: u32, m: u32, n: u32) -> Result<WitnessGraph> {
    if m == 0 {
        return Err(Error::Parameter("the even witness needs at least one hub".into()));
    }
    if n_prime + m > n {
        return Err(out_of_range("node budget", (n_prime + m) as u64, 1, n as u64));
    }
    let xs: Vec<u32> = xbar.union().iter().collect();
    if xs.is_empty() {
        return Err(Error::Precondition("the tuple covers no nodes".into()));
    }
    if xs.iter().any(|&x| x > n_prime) {
        return Err(Error::Precondition(format!("the tuple leaves [{n_prime}]")));
    }
    let hubs: Vec<u32> = (n_prime + 1..=n_prime + m).collect();
    let mut edges = Vec::new();
    for &u in &xs {
        for &v in &xs {
            if xbar_less(xbar, u, v)? {
                edges.push((u, v, 1));
            }
        }
        for &h in &hubs {
            edges.push((u, h, 1));
            edges.push((h, u, 2));
        }
    }
    let core = xs.into_iter().chain(hubs).collect();
    pad_and_build(n, edges, core, 2)
}

/// `f^1 #_1 f^2 #_2 ... f^m #_m`.
pub fn interleave_hashes(ws: &[Word], n_prime: u32, n: u32) -> Result<Word> {
    let mut out = Word::new();
    for (j, w) in ws.iter().enumerate() {
        out.extend_from(w);
        out.push(hash_letter(n_prime, j as u32 + 1, n)?);
    }
    Ok(out)
}

fn nodes_union(ws: &[Word]) -> Subset {
    ws.iter().flat_map(|w| w.iter()).fold(Subset::EMPTY, |acc, l| acc.with(l.node))
}

struct Steps<'a> {
    used: u128,
    caps: &'a Caps,
}

impl Steps<'_> {
    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        check_cap("search steps", self.used, self.caps.scan_steps)
    }
}

/// Lexicographic depth-first scan of intersecting tuples `(Y_1, ..., Y_k)` of
/// `a`-sets of `[n']` with `k |Y_i ^ Y_i'| <= a`, threading automaton states.
fn scan_intersecting(
    a1: &SafetyAutomaton,
    p: &Params,
    removed: Subset,
    q0: u32,
    target: u32,
    steps: &mut Steps<'_>,
) -> Result<Option<Vec<Subset>>> {
    let pool = combinations(p.n_prime as u32, p.a as u32);
    let k = p.k as usize;
    let mut chosen: Vec<Subset> = Vec::with_capacity(k);
    let mut states: Vec<u32> = vec![q0];
    let mut cursor: Vec<usize> = vec![0];
    while let Some(pos) = cursor.last_mut() {
        if *pos == pool.len() {
            cursor.pop();
            if chosen.pop().is_some() {
                states.pop();
            }
            continue;
        }
        let y = pool[*pos];
        *pos += 1;
        steps.tick()?;
        let close = chosen.iter().all(|z| p.k * y.symmetric_difference(*z).len() as u64 <= p.a);
        if !close {
            continue;
        }
        let q = delta_star(a1, *states.last().expect("nonempty"), &encode_set_word(y.difference(removed).iter()))?;
        if chosen.len() + 1 == k {
            if q == target {
                chosen.push(y);
                return Ok(Some(chosen));
            }
            continue;
        }
        chosen.push(y);
        states.push(q);
        cursor.push(0);
    }
    Ok(None)
}

/// The search algorithm that recovers `f^r` from a state: given `f^1..f^j`
/// and a state `q`, returns `(Y_1 \ U, 1) ... (Y_k \ U, 1)` for the first
/// intersecting tuple (lexicographically) that drives `A_1` from
/// `q_0 = delta(start, f^1 #_1 ... f^j #_j)` to `q`.
///
/// Returns `Ok(None)` for "not found", including when the inputs do not make
/// sense (too many states, letters outside the alphabet). Errors only on caps.
pub fn alg1(n1: u64, t1: u64, a1: &SafetyAutomaton, alpha: &[Word], q: u32, caps: &Caps) -> Result<Option<Word>> {
    let Ok(p) = derive_params(n1, t1) else {
        return Ok(None);
    };
    if !p.admits_states(a1.states()) || q >= a1.states() {
        return Ok(None);
    }
    if p.n_prime > 64 || (p.n_prime + alpha.len() as u64) > a1.n() as u64 || a1.d() < 2 {
        return Ok(None);
    }
    if alpha.iter().any(|f| check_letters_within(f, p.n_prime as u32).is_err()) {
        return Ok(None);
    }
    let removed = nodes_union(alpha);
    let Ok(prefix) = interleave_hashes(alpha, p.n_prime as u32, a1.n()) else {
        return Ok(None);
    };
    let Ok(q0) = delta_star(a1, a1.start(), &prefix) else {
        return Ok(None);
    };
    let mut steps = Steps { used: 0, caps };
    let found = scan_intersecting(a1, &p, removed, q0, q, &mut steps)?;
    Ok(found.map(|ys| DisjointTuple(ys).increasing_word(removed)))
}

/// Words `f^1..f^m`, `g^1..g^m` for a disjoint tuple `X`, claimed to satisfy
/// the block conditions against some automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoolingCertificate {
    pub n: u64,
    pub t: u64,
    pub xbar: DisjointTuple,
    pub fs: Vec<Word>,
    pub gs: Vec<Word>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateFailure {
    BadParameters,
    AutomatonMismatch,
    TupleNotDisjointFamily,
    WrongBlockCount,
    FOutOfRange,
    FNotDisjoint,
    FTooLarge,
    GNotIncreasing,
    GTooShort,
    StatesDiffer,
    OddWitness,
    EvenWitness,
    EvenTooShort,
}

impl CertificateFailure {
    pub fn as_str(self) -> &'static str {
        match self {
            CertificateFailure::BadParameters => "bad-parameters",
            CertificateFailure::AutomatonMismatch => "automaton-mismatch",
            CertificateFailure::TupleNotDisjointFamily => "tuple-not-disjoint-family",
            CertificateFailure::WrongBlockCount => "wrong-block-count",
            CertificateFailure::FOutOfRange => "f-out-of-range",
            CertificateFailure::FNotDisjoint => "f-not-disjoint",
            CertificateFailure::FTooLarge => "f-too-large",
            CertificateFailure::GNotIncreasing => "g-not-increasing",
            CertificateFailure::GTooShort => "g-too-short",
            CertificateFailure::StatesDiffer => "states-differ",
            CertificateFailure::OddWitness => "odd-witness",
            CertificateFailure::EvenWitness => "even-witness",
            CertificateFailure::EvenTooShort => "even-too-short",
        }
    }
}

impl fmt::Display for CertificateFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FoolingCertificate {
    pub fn odd_word(&self, n_prime: u32) -> Result<Word> {
        interleave_hashes(&self.fs, n_prime, self.n as u32)
    }

    pub fn even_word(&self, n_prime: u32) -> Result<Word> {
        interleave_hashes(&self.gs, n_prime, self.n as u32)
    }

    /// The separation failure the certificate implies for `a`.
    pub fn counterexample(&self, a: &SafetyAutomaton) -> Result<Counterexample> {
        let p = derive_params(self.n, self.t)?;
        let np = p.n_prime as u32;
        let a = make_absorbing(a);
        let odd = self.odd_word(np)?;
        let end = delta_star(&a, a.start(), &odd)?;
        if end == a.accept() {
            let w = build_odd_witness(&self.fs, np, self.n as u32)?;
            return Ok(Counterexample { graph: w.graph, word: odd, reason: FailureReason::OddAccepted, loop_start: None });
        }
        let w = build_even_witness(&self.xbar, np, self.gs.len() as u32, self.n as u32)?;
        let even = self.even_word(np)?;
        if (even.len() as u64) < self.t {
            return Err(Error::Precondition("even word shorter than t".into()));
        }
        Ok(Counterexample {
            graph: w.graph,
            word: Word(even.0[..self.t as usize].to_vec()),
            reason: FailureReason::EvenNotAcceptedByT,
            loop_start: None,
        })
    }
}

/// Checks every block condition plus the two consequences: the odd word walks
/// the odd witness, the even word walks the even witness and has length `>= t`.
pub fn check_fooling_certificate(cert: &FoolingCertificate, a: &SafetyAutomaton) -> core::result::Result<(), CertificateFailure> {
    use CertificateFailure as F;
    let p = derive_params(cert.n, cert.t).map_err(|_| F::BadParameters)?;
    let (np, k) = (p.n_prime, p.k);
    let m = p.blocks() as usize;
    if np > 64 || cert.n > u32::MAX as u64 {
        return Err(F::BadParameters);
    }
    if (a.n() as u64) < cert.n || a.d() < 2 {
        return Err(F::AutomatonMismatch);
    }
    let xs = cert.xbar.sets();
    if xs.len() as u64 != k
        || xs.iter().any(|x| x.len() as u64 != p.a || Subset::max(*x).unwrap_or(0) as u64 > np)
        || DisjointTuple::new(xs.to_vec()).is_err()
    {
        return Err(F::TupleNotDisjointFamily);
    }
    if m == 0 || cert.fs.len() != m || cert.gs.len() != m {
        return Err(F::WrongBlockCount);
    }
    if cert.fs.iter().chain(&cert.gs).any(|w| check_letters_within(w, np as u32).is_err()) {
        return Err(F::FOutOfRange);
    }
    let mut used = Subset::EMPTY;
    for f in &cert.fs {
        let v = nodes_union(core::slice::from_ref(f));
        if !v.is_disjoint(used) {
            return Err(F::FNotDisjoint);
        }
        if v.len() as u64 * k > 2 * np {
            return Err(F::FTooLarge);
        }
        used = used.union(v);
    }
    for g in &cert.gs {
        if !is_xbar_increasing(&cert.xbar, g) {
            return Err(F::GNotIncreasing);
        }
        if g.is_empty() || 7 * (g.len() as u64) < 4 * np {
            return Err(F::GTooShort);
        }
    }
    let a = make_absorbing(a);
    let odd = cert.odd_word(np as u32).map_err(|_| F::BadParameters)?;
    let even = cert.even_word(np as u32).map_err(|_| F::BadParameters)?;
    let (Ok(qf), Ok(qg)) = (delta_star(&a, a.start(), &odd), delta_star(&a, a.start(), &even)) else {
        return Err(F::AutomatonMismatch);
    };
    if qf != qg {
        return Err(F::StatesDiffer);
    }
    match build_odd_witness(&cert.fs, np as u32, cert.n as u32) {
        Ok(w) if classify_graph(&w.graph) == GraphParity::Odd && is_walk(&w.graph, &odd) => {}
        _ => return Err(F::OddWitness),
    }
    match build_even_witness(&cert.xbar, np as u32, m as u32, cert.n as u32) {
        Ok(w) if classify_graph(&w.graph) == GraphParity::Even && is_walk(&w.graph, &even) => {}
        _ => return Err(F::EvenWitness),
    }
    if (even.len() as u64) < cert.t {
        return Err(F::EvenTooShort);
    }
    Ok(())
}

/// Runs the block induction for one disjoint tuple.
fn induct(a: &SafetyAutomaton, p: &Params, xbar: &DisjointTuple, caps: &Caps, steps: &mut Steps<'_>) -> Result<Option<(Vec<Word>, Vec<Word>)>> {
    let np = p.n_prime as u32;
    let mut fs: Vec<Word> = Vec::new();
    let mut gs: Vec<Word> = Vec::new();
    for _ in 0..p.blocks() {
        let removed = nodes_union(&fs);
        let q0 = delta_star(a, a.start(), &interleave_hashes(&fs, np, a.n())?)?;
        let g = xbar.increasing_word(removed);
        let q = delta_star(a, q0, &g)?;
        steps.tick()?;
        let Some(f) = alg1(p.n, p.t, a, &fs, q, caps)? else {
            return Ok(None);
        };
        fs.push(f);
        gs.push(g);
    }
    Ok(Some((fs, gs)))
}

/// Scans disjoint tuples lexicographically and returns the first one whose
/// block induction completes, as a certificate.
///
/// Needs `a >= 1`, `k >= 5` and room for the odd witness (`n' + k/5 + 1 <= n`).
pub fn structured_search(a: &SafetyAutomaton, n: u64, t: u64, caps: &Caps) -> Result<Option<FoolingCertificate>> {
    let p = derive_params(n, t)?;
    if p.a == 0 || p.k < 5 {
        return Err(Error::Parameter(format!("degenerate parameters (a = {}, k = {})", p.a, p.k)));
    }
    if p.n_prime + p.blocks() + 1 > n {
        return Err(Error::Parameter(format!("n' + k/5 + 1 = {} exceeds n = {n}", p.n_prime + p.blocks() + 1)));
    }
    if p.n_prime > 64 {
        return Err(Error::CapExceeded { what: "n'", value: p.n_prime as u128, cap: 64 });
    }
    if (a.n() as u64) < n || a.d() < 2 {
        return Err(Error::Precondition("automaton alphabet must cover [n] x {1, 2}".into()));
    }
    let a = make_absorbing(a);
    let pool = combinations(p.n_prime as u32, p.a as u32);
    let k = p.k as usize;
    let mut steps = Steps { used: 0, caps };
    let mut chosen: Vec<Subset> = Vec::with_capacity(k);
    let mut used = Subset::EMPTY;
    let mut cursor: Vec<usize> = vec![0];
    while let Some(pos) = cursor.last_mut() {
        if *pos == pool.len() {
            cursor.pop();
            if let Some(x) = chosen.pop() {
                used = used.difference(x);
            }
            continue;
        }
        let x = pool[*pos];
        *pos += 1;
        steps.tick()?;
        if !x.is_disjoint(used) {
            continue;
        }
        chosen.push(x);
        used = used.union(x);
        if chosen.len() == k {
            let xbar = DisjointTuple(chosen.clone());
            if let Some((fs, gs)) = induct(&a, &p, &xbar, caps, &mut steps)? {
                return Ok(Some(FoolingCertificate { n, t, xbar, fs, gs }));
            }
            used = used.difference(chosen.pop().expect("just pushed"));
        } else {
            cursor.push(0);
        }
    }
    Ok(None)
}

/// An odd-realizable prefix and an even-realizable prefix of length `>= t`
/// that end in the same state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoolingPair {
    pub f: Word,
    pub g: Word,
    pub state: u32,
    pub odd_graph: GameGraph,
    pub even_graph: GameGraph,
}

impl FoolingPair {
    /// Accepting common state: `f` breaks the odd side. Otherwise the first
    /// `t` letters of `g` break the even side.
    pub fn as_counterexample(&self, a: &SafetyAutomaton, t: u32) -> Counterexample {
        if self.state == make_absorbing(a).accept() {
            Counterexample { graph: self.odd_graph.clone(), word: self.f.clone(), reason: FailureReason::OddAccepted, loop_start: None }
        } else {
            Counterexample {
                graph: self.even_graph.clone(),
                word: Word(self.g.0[..t as usize].to_vec()),
                reason: FailureReason::EvenNotAcceptedByT,
                loop_start: None,
            }
        }
    }
}

fn letter_path(states: usize, path: &[usize], g: &GameGraph) -> Word {
    path.windows(2)
        .map(|w| {
            let (u, v) = ((w[0] / states) as u32 + 1, (w[1] / states) as u32 + 1);
            Letter::new(u, g.priority(u, v).expect("product arc comes from an edge"))
        })
        .collect()
}

/// BFS in the product from `sources`; returns the path to the first vertex
/// (by BFS order) whose state is `target`.
fn bfs_to_state(arcs: &[Vec<(usize, u32)>], states: usize, sources: &[usize], target: usize) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; arcs.len()];
    let mut seen = vec![false; arcs.len()];
    let mut queue = VecDeque::new();
    for &x in sources {
        if !seen[x] {
            seen[x] = true;
            queue.push_back(x);
        }
    }
    while let Some(x) = queue.pop_front() {
        if x % states == target {
            let mut path = vec![x];
            let mut y = x;
            while parent[y] != usize::MAX {
                y = parent[y];
                path.push(y);
            }
            path.reverse();
            return Some(path);
        }
        for &(y, _) in &arcs[x] {
            if !seen[y] {
                seen[y] = true;
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    None
}

/// Product vertices after exactly `t` steps, with per-layer parents.
fn layers(arcs: &[Vec<(usize, u32)>], sources: &[usize], t: u32) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut layer = sources.to_vec();
    let mut parents = Vec::with_capacity(t as usize);
    for _ in 0..t {
        let mut parent = vec![usize::MAX; arcs.len()];
        let mut next = Vec::new();
        for &x in &layer {
            for &(y, _) in &arcs[x] {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    next.push(y);
                }
            }
        }
        next.sort_unstable();
        parents.push(parent);
        layer = next;
    }
    (layer, parents)
}

fn reached_states(arcs: &[Vec<(usize, u32)>], states: usize, sources: &[usize]) -> Vec<bool> {
    let mut out = vec![false; states];
    let mut seen = vec![false; arcs.len()];
    let mut stack: Vec<usize> = sources.to_vec();
    for &x in sources {
        seen[x] = true;
    }
    while let Some(x) = stack.pop() {
        out[x % states] = true;
        for &(y, _) in &arcs[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    out
}

/// Exhaustive fooling-pair search over all game graphs on `[n]` with
/// priorities `[d]`.
///
/// Collects the states reachable by walks of odd graphs and the states
/// reachable by walks of length `>= t` of even graphs; the least common state,
/// if any, yields the pair (first odd graph and first even graph in
/// enumeration order, shortest words).
pub fn search_fooling_pair(a: &SafetyAutomaton, n: usize, d: u32, t: u32, caps: &Caps) -> Result<Option<FoolingPair>> {
    check_alphabet(a, n, d)?;
    let graphs = enumerate_game_graphs(n, d, caps)?;
    let a = make_absorbing(a);
    let s = a.states() as usize;
    let work = graphs.len() as u128 * (t as u128 + 1) * (n * s) as u128;
    check_cap("search steps", work, caps.scan_steps)?;
    let sources: Vec<usize> = (0..n).map(|v| v * s + a.start() as usize).collect();
    let mut odd_states = vec![false; s];
    let mut even_states = vec![false; s];
    for g in graphs.iter() {
        let parity = classify_graph(&g);
        if parity == GraphParity::Neither {
            continue;
        }
        let arcs = product_arcs(&a, &g);
        let (target, from) = match parity {
            GraphParity::Odd => (&mut odd_states, sources.clone()),
            _ => (&mut even_states, layers(&arcs, &sources, t).0),
        };
        for (acc, r) in target.iter_mut().zip(reached_states(&arcs, s, &from)) {
            *acc |= r;
        }
    }
    let Some(q) = (0..s).find(|&q| odd_states[q] && even_states[q]) else {
        return Ok(None);
    };
    let mut odd = None;
    let mut even = None;
    for g in graphs.iter() {
        let arcs = product_arcs(&a, &g);
        match classify_graph(&g) {
            GraphParity::Odd if odd.is_none() => {
                if let Some(path) = bfs_to_state(&arcs, s, &sources, q) {
                    odd = Some((letter_path(s, &path, &g), g));
                }
            }
            GraphParity::Even if even.is_none() => {
                let (layer, parents) = layers(&arcs, &sources, t);
                if let Some(tail) = bfs_to_state(&arcs, s, &layer, q) {
                    let mut path = vec![tail[0]];
                    for parent in parents.iter().rev() {
                        path.push(parent[*path.last().expect("nonempty")]);
                    }
                    path.reverse();
                    path.extend_from_slice(&tail[1..]);
                    even = Some((letter_path(s, &path, &g), g));
                }
            }
            _ => {}
        }
        if odd.is_some() && even.is_some() {
            break;
        }
    }
    let ((f, odd_graph), (g, even_graph)) = (odd.expect("odd state has a witness"), even.expect("even state has a witness"));
    Ok(Some(FoolingPair { f, g, state: q as u32, odd_graph, even_graph }))
}

/// Whether `|g^r| >= 4n'/7` follows from `|g^r| >= k floor(n'/k) - |U|` with
/// `|U| <= 2n'/5`, i.e. `35 k a >= 34 n'`.
pub fn length_lemma_holds(p: &Params) -> bool {
    35 * (p.k as u128) * (p.a as u128) >= 34 * (p.n_prime as u128)
}

/// Outcome of replaying the communication-bound arithmetic at one point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofReplay {
    pub n: u64,
    pub t: u64,
    /// `None` when the parameters are undefined (`k = 0`).
    pub params: Option<Params>,
    /// `(2k + 1) log2 Q + 1 <= 3k log2 Q`.
    pub protocol_cost: bool,
    /// `k / gamma <= sqrt(n') / 100`, i.e. `10^4 k^4 <= n'`.
    pub k_over_gamma: bool,
    /// `log2 Q < n^5 / (10^11 t^4)`.
    pub log_q: bool,
    /// `8n <= t <= n^(5/4) / 10^3`.
    pub hypotheses: bool,
}

impl ProofReplay {
    pub fn holds(&self) -> bool {
        self.protocol_cost && self.k_over_gamma && self.log_q
    }
}

/// `floor(n^(5/4) / 10^3)`, exactly.
pub fn upper_time(n: u64) -> u64 {
    let n5 = BigUint::from(n).pow(5);
    (n5.nth_root(4) / 1000u32).to_u64().unwrap_or(u64::MAX)
}

pub fn replay_communication_bound(n: u64, t: u64) -> ProofReplay {
    let hypotheses = t >= 8 * n && {
        // t^4 <= n^5 / 10^12
        let t4 = BigUint::from(t).pow(4) * BigUint::from(10u32).pow(12);
        t4 <= BigUint::from(n).pow(5)
    };
    let Ok(p) = derive_params(n, t) else {
        return ProofReplay { n, t, params: None, protocol_cost: false, k_over_gamma: false, log_q: false, hypotheses };
    };
    let l = &p.q_exponent;
    let k = BigUint::from(p.k);
    #[allow(clippy::int_plus_one)]
    let protocol_cost = (&k * 2u32 + 1u32) * l + 1u32 <= &k * 3u32 * l;
    let k_over_gamma = k.pow(4) * 10_000u32 <= BigUint::from(p.n_prime);
    let log_q = !l.is_zero() && l * BigUint::from(10u32).pow(11) * BigUint::from(t).pow(4) < BigUint::from(n).pow(5);
    ProofReplay { n, t, params: Some(p), protocol_cost, k_over_gamma, log_q, hypotheses }
}
