//! Deterministic safety automata over `[n] x [d]`, their products with game
//! graphs, and enumeration up to isomorphism.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::caps::Caps;
use crate::error::{check_cap, out_of_range, Error, Result};
use crate::game::{GameGraph, Letter, Word};

/// A deterministic automaton with a start and an accepting state.
///
/// States are `0..states`. The transition table is indexed by
/// `state * n * d + (node - 1) * d + (priority - 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SafetyAutomaton {
    n: u32,
    d: u32,
    states: u32,
    start: u32,
    accept: u32,
    delta: Vec<u32>,
}

impl SafetyAutomaton {
    pub fn new(n: u32, d: u32, states: u32, start: u32, accept: u32, delta: Vec<u32>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::MalformedAutomaton(format!("need n >= 1 and d >= 1, got n={n}, d={d}")));
        }
        if states == 0 {
            return Err(Error::MalformedAutomaton("no states".into()));
        }
        for (what, s) in [("start state", start), ("accept state", accept)] {
            if s >= states {
                return Err(out_of_range(what, s as u64, 0, states as u64 - 1));
            }
        }
        let expected = states as usize * (n * d) as usize;
        if delta.len() != expected {
            return Err(Error::SizeMismatch { expected, found: delta.len() });
        }
        if let Some(&s) = delta.iter().find(|&&s| s >= states) {
            return Err(out_of_range("transition target", s as u64, 0, states as u64 - 1));
        }
        Ok(SafetyAutomaton { n, d, states, start, accept, delta })
    }

    /// Builds an automaton from a closure `(state, letter) -> state`.
    pub fn from_fn<F>(n: u32, d: u32, states: u32, start: u32, accept: u32, mut f: F) -> Result<Self>
    where
        F: FnMut(u32, Letter) -> u32,
    {
        let mut delta = Vec::with_capacity((states * n * d) as usize);
        for q in 0..states {
            for v in 1..=n {
                for p in 1..=d {
                    delta.push(f(q, Letter::new(v, p)));
                }
            }
        }
        Self::new(n, d, states, start, accept, delta)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn states(&self) -> u32 {
        self.states
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    pub fn accept(&self) -> u32 {
        self.accept
    }

    pub fn alphabet_size(&self) -> u32 {
        self.n * self.d
    }

    pub fn letter_index(&self, letter: Letter) -> Result<usize> {
        if letter.node == 0 || letter.node > self.n {
            return Err(out_of_range("letter node", letter.node as u64, 1, self.n as u64));
        }
        if letter.priority == 0 || letter.priority > self.d {
            return Err(out_of_range("letter priority", letter.priority as u64, 1, self.d as u64));
        }
        Ok(((letter.node - 1) * self.d + letter.priority - 1) as usize)
    }

    /// Single transition. Panics if `q` or the letter is out of range.
    #[inline]
    pub fn step(&self, q: u32, letter: Letter) -> u32 {
        let li = ((letter.node - 1) * self.d + letter.priority - 1) as usize;
        self.delta[q as usize * (self.n * self.d) as usize + li]
    }

    pub fn delta(&self, q: u32, letter: Letter) -> Result<u32> {
        if q >= self.states {
            return Err(out_of_range("state", q as u64, 0, self.states as u64 - 1));
        }
        let li = self.letter_index(letter)?;
        Ok(self.delta[q as usize * self.alphabet_size() as usize + li])
    }

    /// Transition table in `(state, node, priority, target)` form.
    pub fn transitions(&self) -> impl Iterator<Item = (u32, u32, u32, u32)> + '_ {
        let (n, d) = (self.n, self.d);
        self.delta.iter().enumerate().map(move |(i, &target)| {
            let i = i as u32;
            let q = i / (n * d);
            let li = i % (n * d);
            (q, li / d + 1, li % d + 1, target)
        })
    }

    pub fn is_absorbing(&self) -> bool {
        let l = self.alphabet_size() as usize;
        let row = self.accept as usize * l;
        self.delta[row..row + l].iter().all(|&s| s == self.accept)
    }
}

/// `delta*(q, w)`: the state reached from `q` after reading `w`.
pub fn delta_star(a: &SafetyAutomaton, q: u32, w: &Word) -> Result<u32> {
    w.iter().try_fold(q, |q, &l| a.delta(q, l))
}

/// The same automaton with every transition out of the accepting state
/// redirected to itself.
pub fn make_absorbing(a: &SafetyAutomaton) -> SafetyAutomaton {
    let mut out = a.clone();
    let l = a.alphabet_size() as usize;
    let row = a.accept as usize * l;
    out.delta[row..row + l].fill(a.accept);
    out
}

/// Counts priority-2 letters and accepts at the `threshold`-th one.
///
/// States `c_0..c_threshold`, start `c_0`, accept `c_threshold`; priority-1
/// letters are self-loops.
pub fn counter_automaton(n: u32, threshold: u32) -> Result<SafetyAutomaton> {
    if n == 0 {
        return Err(Error::Parameter("counter automaton needs n >= 1".into()));
    }
    SafetyAutomaton::from_fn(n, 2, threshold + 1, 0, threshold, |q, l| {
        if l.priority == 2 {
            (q + 1).min(threshold)
        } else {
            q
        }
    })
}

/// The `n + 2` state automaton that accepts once it has seen `n + 1`
/// priority-2 letters.
pub fn counter_separator(n: u32) -> Result<SafetyAutomaton> {
    counter_automaton(n, n + 1)
}

/// Product of a game graph with an automaton.
///
/// Vertex `(v, q)` has index `(v - 1) * states + q`. An arc
/// `(u, q) -> (v, delta(q, (u, l)))` exists for every edge `u -> v` of priority `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductGraph {
    pub nodes: usize,
    pub states: u32,
    pub accept: u32,
    /// Outgoing arcs `(target vertex, priority of the underlying edge)`.
    pub arcs: Vec<Vec<(usize, u32)>>,
    /// Reachable from some `(v, start)`.
    pub reachable: Vec<bool>,
    /// BFS depth from the start set.
    pub depth: Vec<Option<u32>>,
    /// Smallest depth of a reachable accepting vertex.
    pub accept_depth: Option<u32>,
}

impl ProductGraph {
    #[inline]
    pub fn vertex(&self, node: u32, state: u32) -> usize {
        (node as usize - 1) * self.states as usize + state as usize
    }

    #[inline]
    pub fn node_of(&self, vertex: usize) -> u32 {
        (vertex / self.states as usize) as u32 + 1
    }

    #[inline]
    pub fn state_of(&self, vertex: usize) -> u32 {
        (vertex % self.states as usize) as u32
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }
}

pub(crate) fn check_alphabet(a: &SafetyAutomaton, n: usize, d: u32) -> Result<()> {
    if n as u64 > a.n as u64 {
        return Err(out_of_range("node count", n as u64, 1, a.n as u64));
    }
    if d > a.d {
        return Err(out_of_range("priority count", d as u64, 1, a.d as u64));
    }
    Ok(())
}

/// Arcs of the product, without reachability information.
pub(crate) fn product_arcs(a: &SafetyAutomaton, g: &GameGraph) -> Vec<Vec<(usize, u32)>> {
    let s = a.states as usize;
    let mut arcs = vec![Vec::new(); g.n() * s];
    for (u, v, p) in g.edges() {
        let letter = Letter::new(u, p);
        for q in 0..a.states {
            let from = (u as usize - 1) * s + q as usize;
            let to = (v as usize - 1) * s + a.step(q, letter) as usize;
            arcs[from].push((to, p));
        }
    }
    arcs
}

/// Builds the product of `g` and `a` and explores it breadth-first from
/// `{(v, start) : v in [n]}`.
pub fn product_reach(a: &SafetyAutomaton, g: &GameGraph) -> Result<ProductGraph> {
    check_alphabet(a, g.n(), g.d())?;
    let arcs = product_arcs(a, g);
    let s = a.states as usize;
    let mut depth = vec![None; arcs.len()];
    let mut queue = VecDeque::new();
    for v in 0..g.n() {
        let x = v * s + a.start as usize;
        depth[x] = Some(0);
        queue.push_back(x);
    }
    while let Some(x) = queue.pop_front() {
        let dx = depth[x].expect("queued vertices have a depth");
        for &(y, _) in &arcs[x] {
            if depth[y].is_none() {
                depth[y] = Some(dx + 1);
                queue.push_back(y);
            }
        }
    }
    let reachable: Vec<bool> = depth.iter().map(Option::is_some).collect();
    let accept_depth = (0..g.n()).filter_map(|v| depth[v * s + a.accept as usize]).min();
    Ok(ProductGraph { nodes: g.n(), states: a.states, accept: a.accept, arcs, reachable, depth, accept_depth })
}

/// Renames states breadth-first from the start state, reading letters in
/// order. The accepting state is appended last if unreachable; other
/// unreachable states are dropped.
pub fn canonicalize(a: &SafetyAutomaton) -> SafetyAutomaton {
    let a = make_absorbing(a);
    let l = a.alphabet_size();
    let mut rename = vec![u32::MAX; a.states as usize];
    let mut order = Vec::with_capacity(a.states as usize);
    rename[a.start as usize] = 0;
    order.push(a.start);
    let mut head = 0;
    while head < order.len() {
        let q = order[head];
        head += 1;
        for li in 0..l {
            let r = a.delta[(q * l + li) as usize];
            if rename[r as usize] == u32::MAX {
                rename[r as usize] = order.len() as u32;
                order.push(r);
            }
        }
    }
    if rename[a.accept as usize] == u32::MAX {
        rename[a.accept as usize] = order.len() as u32;
        order.push(a.accept);
    }
    let mut delta = Vec::with_capacity(order.len() * l as usize);
    for &q in &order {
        for li in 0..l {
            delta.push(rename[a.delta[(q * l + li) as usize] as usize]);
        }
    }
    SafetyAutomaton {
        n: a.n,
        d: a.d,
        states: order.len() as u32,
        start: 0,
        accept: rename[a.accept as usize],
        delta,
    }
}

/// Enumeration of absorbing automata with exactly `q` states in canonical form.
///
/// The raw index space fixes start `0`, picks the accepting state, and fills
/// the transitions of the other `q - 1` states in row-major order (each digit
/// in base `q`). A raw automaton is yielded iff it equals its canonical form;
/// each isomorphism class of automata whose non-accepting states are all
/// reachable is hit exactly once.
#[derive(Clone, Debug)]
pub struct AutomatonSpace {
    n: u32,
    d: u32,
    q: u32,
    per_accept: u128,
}

impl AutomatonSpace {
    /// Size of the raw index space.
    pub fn raw_len(&self) -> u128 {
        self.q as u128 * self.per_accept
    }

    pub fn states(&self) -> u32 {
        self.q
    }

    /// The raw automaton at `index`, whether canonical or not.
    pub fn raw(&self, index: u128) -> Option<SafetyAutomaton> {
        if index >= self.raw_len() {
            return None;
        }
        let (q, l) = (self.q, self.n * self.d);
        let accept = (index / self.per_accept) as u32;
        let mut rest = index % self.per_accept;
        let mut delta = vec![accept; (q * l) as usize];
        for s in (0..q).rev() {
            if s == accept {
                continue;
            }
            for li in (0..l).rev() {
                delta[(s * l + li) as usize] = (rest % q as u128) as u32;
                rest /= q as u128;
            }
        }
        Some(SafetyAutomaton { n: self.n, d: self.d, states: q, start: 0, accept, delta })
    }

    /// The raw automaton at `index` if it is canonical.
    pub fn canonical(&self, index: u128) -> Option<SafetyAutomaton> {
        let a = self.raw(index)?;
        (canonicalize(&a) == a).then_some(a)
    }

    pub fn iter(&self) -> impl Iterator<Item = SafetyAutomaton> + '_ {
        (0..self.raw_len()).filter_map(move |i| self.canonical(i))
    }
}

fn automaton_space(n: u32, d: u32, q: u32) -> Option<AutomatonSpace> {
    let free = (q as u64 - 1).checked_mul((n * d) as u64)?;
    let per_accept = (q as u128).checked_pow(u32::try_from(free).ok()?)?;
    Some(AutomatonSpace { n, d, q, per_accept })
}

/// Canonical automata with `1..=q_max` states over `[n] x [d]`, grouped by
/// state count.
pub fn automaton_spaces(n: u32, d: u32, q_max: u32, caps: &Caps) -> Result<Vec<AutomatonSpace>> {
    if n == 0 || d == 0 || q_max == 0 {
        return Err(Error::Parameter(format!("need n, d, q_max >= 1, got n={n}, d={d}, q_max={q_max}")));
    }
    check_cap("automaton states", q_max as u128, caps.automaton_states as u128)?;
    check_cap("alphabet size", (n * d) as u128, caps.alphabet as u128)?;
    (1..=q_max)
        .map(|q| {
            automaton_space(n, d, q).ok_or(Error::CapExceeded {
                what: "automaton index space",
                value: u128::MAX,
                cap: u128::MAX - 1,
            })
        })
        .collect()
}

/// All canonical automata with at most `q_max` states, smallest first.
pub fn enumerate_automata(n: u32, d: u32, q_max: u32, caps: &Caps) -> Result<Vec<SafetyAutomaton>> {
    let spaces = automaton_spaces(n, d, q_max, caps)?;
    Ok(spaces.iter().flat_map(|s| s.iter().collect::<Vec<_>>()).collect())
}
