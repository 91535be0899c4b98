//! Separation checks for safety automata, refutation of automata that are too
//! small, and the parity-to-reachability reduction.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::automaton::{check_alphabet, delta_star, make_absorbing, product_arcs, SafetyAutomaton};
use crate::caps::Caps;
use crate::error::{check_cap, out_of_range, Error, Result};
use crate::game::{classify_graph, cycle_max_parities, enumerate_game_graphs, is_walk, GameGraph, GraphParity, Letter, Word};

/// Which separation condition a counterexample violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FailureReason {
    /// A walk of an odd graph reaches the accepting state.
    OddAccepted,
    /// A walk of an even graph of the given length ends outside the accepting state.
    EvenNotAcceptedByT,
    /// An infinite walk of an even graph never reaches the accepting state.
    EvenNeverAccepted,
}

impl FailureReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureReason::OddAccepted => "OddAccepted",
            FailureReason::EvenNotAcceptedByT => "EvenNotAcceptedByT",
            FailureReason::EvenNeverAccepted => "EvenNeverAccepted",
        }
    }
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A graph together with a walk that the automaton mishandles.
///
/// For [`FailureReason::EvenNeverAccepted`] the walk is a lasso: after `word`
/// it repeats `word[loop_start..]` forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub graph: GameGraph,
    pub word: Word,
    pub reason: FailureReason,
    pub loop_start: Option<usize>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {:?} with word {:?}", self.reason, self.graph, self.word)?;
        if let Some(s) = self.loop_start {
            write!(f, " looping from letter {s}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    Counterexample(Counterexample),
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Ok => None,
            Verdict::Counterexample(c) => Some(c),
        }
    }
}

/// Word spelled by a product path `v_0 -> ... -> v_m` (the last vertex
/// contributes no letter; its node is the dangling target).
fn word_of_path(states: usize, path: &[usize], arcs: &[Vec<(usize, u32)>]) -> Word {
    path.windows(2)
        .map(|w| {
            let p = arcs[w[0]].iter().find(|&&(y, _)| y == w[1]).expect("consecutive path vertices are adjacent").1;
            Letter::new((w[0] / states) as u32 + 1, p)
        })
        .collect()
}

fn path_to(parent: &[usize], mut x: usize) -> Vec<usize> {
    let mut path = vec![x];
    while parent[x] != usize::MAX {
        x = parent[x];
        path.push(x);
    }
    path.reverse();
    path
}

fn start_vertices(n: usize, states: usize, start: u32, initial: Option<u32>) -> Vec<usize> {
    match initial {
        Some(v) => vec![(v as usize - 1) * states + start as usize],
        None => (0..n).map(|v| v * states + start as usize).collect(),
    }
}

/// A walk of `g` that drives `a` into the accepting state, if any.
fn odd_violation(a: &SafetyAutomaton, g: &GameGraph, initial: Option<u32>) -> Option<Word> {
    let s = a.states() as usize;
    if a.start() == a.accept() {
        let v = initial.unwrap_or(1);
        let (_, p) = g.successors(v).next().expect("out-degree >= 1");
        return Some(Word(vec![Letter::new(v, p)]));
    }
    let arcs = product_arcs(a, g);
    let mut parent = vec![usize::MAX; arcs.len()];
    let mut seen = vec![false; arcs.len()];
    let mut queue = VecDeque::new();
    for x in start_vertices(g.n(), s, a.start(), initial) {
        seen[x] = true;
        queue.push_back(x);
    }
    while let Some(x) = queue.pop_front() {
        for &(y, _) in &arcs[x] {
            if !seen[y] {
                seen[y] = true;
                parent[y] = x;
                if y % s == a.accept() as usize {
                    return Some(word_of_path(s, &path_to(&parent, y), &arcs));
                }
                queue.push_back(y);
            }
        }
    }
    None
}

/// A walk of length `t` of `g` that avoids the accepting state, if any.
fn even_time_violation(a: &SafetyAutomaton, g: &GameGraph, t: u32, initial: Option<u32>) -> Option<Word> {
    let s = a.states() as usize;
    if a.start() == a.accept() {
        return None;
    }
    let arcs = product_arcs(a, g);
    // parents[i][x]: predecessor of x in layer i + 1.
    let mut layer: Vec<usize> = start_vertices(g.n(), s, a.start(), initial);
    let mut parents: Vec<Vec<usize>> = Vec::new();
    for _ in 0..t {
        let mut parent = vec![usize::MAX; arcs.len()];
        let mut next = Vec::new();
        for &x in &layer {
            for &(y, _) in &arcs[x] {
                if y % s != a.accept() as usize && parent[y] == usize::MAX {
                    parent[y] = x;
                    next.push(y);
                }
            }
        }
        if next.is_empty() {
            return None;
        }
        next.sort_unstable();
        parents.push(parent);
        layer = next;
    }
    let mut path = vec![layer[0]];
    for parent in parents.iter().rev() {
        path.push(parent[*path.last().expect("nonempty")]);
    }
    path.reverse();
    Some(word_of_path(s, &path, &arcs))
}

/// A lasso of `g` avoiding the accepting state forever, if any.
fn even_cycle_violation(a: &SafetyAutomaton, g: &GameGraph, initial: Option<u32>) -> Option<(Word, usize)> {
    let s = a.states() as usize;
    if a.start() == a.accept() {
        return None;
    }
    let arcs = product_arcs(a, g);
    let acc = a.accept() as usize;
    // 0 = unvisited, 1 = on stack, 2 = done.
    let mut color = vec![0u8; arcs.len()];
    for root in start_vertices(g.n(), s, a.start(), initial) {
        if color[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        color[root] = 1;
        while let Some(&mut (x, ref mut pos)) = stack.last_mut() {
            if *pos < arcs[x].len() {
                let y = arcs[x][*pos].0;
                *pos += 1;
                if y % s == acc {
                    continue;
                }
                match color[y] {
                    0 => {
                        color[y] = 1;
                        stack.push((y, 0));
                    }
                    1 => {
                        let mut path: Vec<usize> = stack.iter().map(|&(v, _)| v).collect();
                        let loop_start = path.iter().position(|&v| v == y).expect("grey vertex is on the stack");
                        path.push(y);
                        return Some((word_of_path(s, &path, &arcs), loop_start));
                    }
                    _ => {}
                }
            } else {
                color[x] = 2;
                stack.pop();
            }
        }
    }
    None
}

/// Which check to run per graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Even walks must be accepted within `t` letters.
    Time(u32),
    /// Even walks must be accepted eventually.
    Unrestricted,
}

/// Checks a single graph. Graphs that are neither even nor odd impose nothing.
pub fn check_graph(a: &SafetyAutomaton, g: &GameGraph, mode: Mode, initial: Option<u32>) -> Option<Counterexample> {
    let a = make_absorbing(a);
    match classify_graph(g) {
        GraphParity::Neither => None,
        GraphParity::Odd => odd_violation(&a, g, initial).map(|word| Counterexample {
            graph: g.clone(),
            word,
            reason: FailureReason::OddAccepted,
            loop_start: None,
        }),
        GraphParity::Even => match mode {
            Mode::Time(t) => even_time_violation(&a, g, t, initial).map(|word| Counterexample {
                graph: g.clone(),
                word,
                reason: FailureReason::EvenNotAcceptedByT,
                loop_start: None,
            }),
            Mode::Unrestricted => even_cycle_violation(&a, g, initial).map(|(word, s)| Counterexample {
                graph: g.clone(),
                word,
                reason: FailureReason::EvenNeverAccepted,
                loop_start: Some(s),
            }),
        },
    }
}

fn check_initial(initial: Option<u32>, n: usize) -> Result<()> {
    match initial {
        Some(v) if v == 0 || v as usize > n => Err(out_of_range("initial node", v as u64, 1, n as u64)),
        _ => Ok(()),
    }
}

/// Number of graphs a verification at `(n, d)` walks through.
pub fn verification_len(n: usize, d: u32, caps: &Caps) -> Result<u64> {
    Ok(enumerate_game_graphs(n, d, caps)?.len())
}

/// First violation among graphs with enumeration index in `range`.
pub fn verify_range(
    a: &SafetyAutomaton,
    n: usize,
    d: u32,
    mode: Mode,
    initial: Option<u32>,
    range: Range<u64>,
    caps: &Caps,
) -> Result<Option<(u64, Counterexample)>> {
    check_alphabet(a, n, d)?;
    check_initial(initial, n)?;
    let graphs = enumerate_game_graphs(n, d, caps)?;
    let a = make_absorbing(a);
    let found = graphs.range(range).find_map(|(i, g)| check_graph(&a, &g, mode, initial).map(|c| (i, c)));
    Ok(found)
}

fn verify_all(a: &SafetyAutomaton, n: usize, d: u32, mode: Mode, initial: Option<u32>, caps: &Caps) -> Result<Verdict> {
    let len = verification_len(n, d, caps)?;
    Ok(match verify_range(a, n, d, mode, initial, 0..len, caps)? {
        None => Verdict::Ok,
        Some((_, c)) => Verdict::Counterexample(c),
    })
}

/// Separation in time `t` over every game graph on `[n]` with priorities `[d]`.
pub fn verify_time_t(a: &SafetyAutomaton, n: usize, d: u32, t: u32, caps: &Caps) -> Result<Verdict> {
    verify_all(a, n, d, Mode::Time(t), None, caps)
}

/// Separation without a time limit.
pub fn verify_unrestricted(a: &SafetyAutomaton, n: usize, d: u32, caps: &Caps) -> Result<Verdict> {
    verify_all(a, n, d, Mode::Unrestricted, None, caps)
}

/// Like [`verify_time_t`] / [`verify_unrestricted`], but walks may only start
/// at `initial`.
pub fn verify_from(
    a: &SafetyAutomaton,
    n: usize,
    d: u32,
    mode: Mode,
    initial: u32,
    caps: &Caps,
) -> Result<Verdict> {
    verify_all(a, n, d, mode, Some(initial), caps)
}

/// `1 +` the longest walk of `g` that stays out of the accepting state, or
/// `None` if such walks can be arbitrarily long.
fn even_acceptance_time(a: &SafetyAutomaton, g: &GameGraph) -> Option<u32> {
    let s = a.states() as usize;
    if a.start() == a.accept() {
        return Some(0);
    }
    let arcs = product_arcs(a, g);
    let acc = a.accept() as usize;
    // Longest path by memoized DFS over the (acyclic) non-accepting part.
    let mut longest: Vec<Option<u32>> = vec![None; arcs.len()];
    let mut on_stack = vec![false; arcs.len()];
    let mut best = 0;
    for root in start_vertices(g.n(), s, a.start(), None) {
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        if longest[root].is_some() {
            best = best.max(longest[root].expect("checked"));
            continue;
        }
        on_stack[root] = true;
        while let Some(&mut (x, ref mut pos)) = stack.last_mut() {
            if *pos < arcs[x].len() {
                let y = arcs[x][*pos].0;
                *pos += 1;
                if y % s == acc || longest[y].is_some() {
                    continue;
                }
                if on_stack[y] {
                    return None;
                }
                on_stack[y] = true;
                stack.push((y, 0));
            } else {
                let len = arcs[x]
                    .iter()
                    .filter(|&&(y, _)| y % s != acc)
                    .map(|&(y, _)| longest[y].expect("children finished") + 1)
                    .max()
                    .unwrap_or(0);
                longest[x] = Some(len);
                on_stack[x] = false;
                stack.pop();
            }
        }
        best = best.max(longest[root].expect("root finished"));
    }
    Some(best + 1)
}

/// The least `t` for which `a` separates in time `t` at `(n, d)`.
///
/// Fails with [`Error::NotSeparating`] if `a` does not separate at all.
pub fn derive_time_bound(a: &SafetyAutomaton, n: usize, d: u32, caps: &Caps) -> Result<u32> {
    check_alphabet(a, n, d)?;
    let graphs = enumerate_game_graphs(n, d, caps)?;
    let a = make_absorbing(a);
    let mut t = 0;
    for g in graphs.iter() {
        match classify_graph(&g) {
            GraphParity::Neither => {}
            GraphParity::Odd => {
                if let Some(c) = check_graph(&a, &g, Mode::Unrestricted, None) {
                    return Err(Error::NotSeparating(c.into()));
                }
            }
            GraphParity::Even => match even_acceptance_time(&a, &g) {
                Some(x) => t = t.max(x),
                None => {
                    let c = check_graph(&a, &g, Mode::Unrestricted, None).expect("cycle found by both searches");
                    return Err(Error::NotSeparating(c.into()));
                }
            },
        }
    }
    Ok(t)
}

/// Builds a counterexample for an automaton with at most `n` states over
/// `[n] x [2]`, following the pigeonhole argument on the priority-2 chain.
///
/// With `q_i` the state after `(1,2)(2,2)...(i,2)`, `i < n`: if some `q_i` is
/// accepting, the chain `1 -> 2 -> ... -> n` (priority 2) ending in a
/// priority-1 loop is an odd graph realizing that prefix. Otherwise two of the
/// `q_i` coincide and the complete priority-2 graph carries a lasso that
/// never accepts.
pub fn refute_small_separator(a: &SafetyAutomaton, n: u32) -> Result<Counterexample> {
    if a.d() != 2 {
        return Err(Error::Precondition(format!("refutation needs d = 2, automaton has d = {}", a.d())));
    }
    if n == 0 || n > a.n() {
        return Err(out_of_range("n", n as u64, 1, a.n() as u64));
    }
    if a.states() > n {
        return Err(Error::Precondition(format!(
            "automaton has {} states, refutation needs at most n = {n}",
            a.states()
        )));
    }
    let a = make_absorbing(a);
    let chain: Word = (1..n).map(|v| Letter::new(v, 2)).collect();
    let mut qs = Vec::with_capacity(n as usize);
    let mut q = a.start();
    qs.push(q);
    for &l in chain.iter() {
        q = a.step(q, l);
        qs.push(q);
    }
    if let Some(i) = qs.iter().position(|&q| q == a.accept()) {
        let mut edges: Vec<(u32, u32, u32)> = (1..n).map(|v| (v, v + 1, 2)).collect();
        edges.push((n, n, 1));
        let graph = GameGraph::new(n as usize, 2, edges)?;
        let word = if i == 0 {
            Word(vec![if n == 1 { Letter::new(1, 1) } else { Letter::new(1, 2) }])
        } else {
            Word(chain.0[..i].to_vec())
        };
        return Ok(Counterexample { graph, word, reason: FailureReason::OddAccepted, loop_start: None });
    }
    // Pigeonhole: n values among at most n - 1 non-accepting states.
    let (i, j) = (0..qs.len())
        .flat_map(|j| (0..j).map(move |i| (i, j)))
        .find(|&(i, j)| qs[i] == qs[j])
        .ok_or_else(|| Error::Precondition("no repeated state; automaton has too many states".into()))?;
    let edges = (1..=n).flat_map(|u| (1..=n).map(move |v| (u, v, 2)));
    let graph = GameGraph::new(n as usize, 2, edges)?;
    let word: Word = (1..=j as u32).map(|v| Letter::new(v, 2)).collect();
    Ok(Counterexample { graph, word, reason: FailureReason::EvenNeverAccepted, loop_start: Some(i) })
}

/// Independently re-checks a counterexample against `a` at `(n, d)`.
///
/// `time` is required for [`FailureReason::EvenNotAcceptedByT`].
pub fn confirm_counterexample(a: &SafetyAutomaton, n: usize, d: u32, c: &Counterexample, time: Option<u32>) -> bool {
    let a = make_absorbing(a);
    if c.graph.n() > n || c.graph.d() > d || check_alphabet(&a, c.graph.n(), c.graph.d()).is_err() {
        return false;
    }
    if !is_walk(&c.graph, &c.word) {
        return false;
    }
    let Ok(end) = delta_star(&a, a.start(), &c.word) else {
        return false;
    };
    let parity = classify_graph(&c.graph);
    match c.reason {
        FailureReason::OddAccepted => parity == GraphParity::Odd && end == a.accept(),
        FailureReason::EvenNotAcceptedByT => {
            parity == GraphParity::Even && time == Some(c.word.len() as u32) && end != a.accept()
        }
        FailureReason::EvenNeverAccepted => {
            let Some(s) = c.loop_start else {
                return false;
            };
            if s >= c.word.len() || parity != GraphParity::Even || end == a.accept() {
                return false;
            }
            // The loop must close both in the graph and in the automaton.
            let mut closed = c.word.clone();
            closed.push(c.word.0[s]);
            let at_loop = delta_star(&a, a.start(), &Word(c.word.0[..s].to_vec())).expect("letters checked");
            is_walk(&c.graph, &closed) && at_loop == end
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Player {
    /// Wins plays whose highest recurring priority is even.
    Even,
    /// Wins plays whose highest recurring priority is odd.
    Odd,
}

impl Player {
    pub fn index(self) -> u8 {
        match self {
            Player::Even => 0,
            Player::Odd => 1,
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::Even => Player::Odd,
            Player::Odd => Player::Even,
        }
    }
}

/// A reachability game on an explicit arena.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachabilityGame {
    pub succ: Vec<Vec<usize>>,
    pub owner: Vec<Player>,
}

/// Vertices from which `player` can force a visit to `targets`.
pub fn attractor(game: &ReachabilityGame, targets: &[bool], player: Player) -> Vec<bool> {
    let len = game.succ.len();
    let mut pred = vec![Vec::new(); len];
    for (x, ys) in game.succ.iter().enumerate() {
        for &y in ys {
            pred[y].push(x);
        }
    }
    let mut attr = targets.to_vec();
    // Opponent vertices leave the attractor once every successor is inside.
    let mut remaining: Vec<usize> = game.succ.iter().map(Vec::len).collect();
    let mut queue: VecDeque<usize> = (0..len).filter(|&x| attr[x]).collect();
    while let Some(y) = queue.pop_front() {
        for &x in &pred[y] {
            if attr[x] {
                continue;
            }
            if game.owner[x] == player {
                attr[x] = true;
                queue.push_back(x);
            } else {
                remaining[x] -= 1;
                if remaining[x] == 0 {
                    attr[x] = true;
                    queue.push_back(x);
                }
            }
        }
    }
    attr
}

/// A parity game: a game graph, an owner per node and an initial node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityArena {
    pub graph: GameGraph,
    pub owner: Vec<Player>,
    pub initial: u32,
}

impl ParityArena {
    pub fn new(graph: GameGraph, owner: Vec<Player>, initial: u32) -> Result<Self> {
        if owner.len() != graph.n() {
            return Err(Error::SizeMismatch { expected: graph.n(), found: owner.len() });
        }
        if initial == 0 || initial as usize > graph.n() {
            return Err(out_of_range("initial node", initial as u64, 1, graph.n() as u64));
        }
        Ok(ParityArena { graph, owner, initial })
    }
}

/// Solves `arena` as a reachability game on its product with `a`: the Even
/// player wins iff they can force the automaton into its accepting state.
///
/// Unless `trust` is set, `a` is first checked to separate at the arena's size.
pub fn solve_parity_via_separator(arena: &ParityArena, a: &SafetyAutomaton, trust: bool, caps: &Caps) -> Result<Player> {
    let (n, d) = (arena.graph.n(), arena.graph.d());
    check_alphabet(a, n, d)?;
    if !trust {
        if let Verdict::Counterexample(c) = verify_unrestricted(a, n, d, caps)? {
            return Err(Error::NotSeparating(c.into()));
        }
    }
    let a = make_absorbing(a);
    let s = a.states() as usize;
    let arcs = product_arcs(&a, &arena.graph);
    let game = ReachabilityGame {
        succ: arcs.iter().map(|ys| ys.iter().map(|&(y, _)| y).collect()).collect(),
        owner: (0..arcs.len()).map(|x| arena.owner[x / s]).collect(),
    };
    let targets: Vec<bool> = (0..arcs.len()).map(|x| x % s == a.accept() as usize).collect();
    let win = attractor(&game, &targets, Player::Even);
    let init = (arena.initial as usize - 1) * s + a.start() as usize;
    Ok(if win[init] { Player::Even } else { Player::Odd })
}

/// Winner of a parity game plus, when Even wins, the first winning memoryless
/// strategy found (`strategy[v - 1]` is the successor chosen at an Even node
/// `v`, `0` at Odd nodes).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectSolution {
    pub winner: Player,
    pub strategy: Option<Vec<u32>>,
}

/// Solves `arena` by trying every memoryless strategy of the Even player.
///
/// A strategy wins iff, after dropping the Even player's unchosen edges, every
/// cycle reachable from the initial node has an even maximum priority.
pub fn solve_parity_direct(arena: &ParityArena, caps: &Caps) -> Result<DirectSolution> {
    let g = &arena.graph;
    let n = g.n();
    let choices: Vec<Vec<u32>> = (1..=n as u32)
        .map(|v| match arena.owner[v as usize - 1] {
            Player::Even => g.successors(v).map(|(w, _)| w).collect(),
            Player::Odd => vec![0],
        })
        .collect();
    let total = choices.iter().try_fold(1u128, |acc, c| acc.checked_mul(c.len() as u128));
    check_cap("memoryless strategies", total.unwrap_or(u128::MAX), caps.strategies)?;
    let mut pick = vec![0usize; n];
    loop {
        let strategy: Vec<u32> = pick.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
        let mut matrix = g.matrix().to_vec();
        for (u, &w) in strategy.iter().enumerate() {
            if w != 0 {
                for v in 0..n {
                    if v + 1 != w as usize {
                        matrix[u * n + v] = 0;
                    }
                }
            }
        }
        let restricted = GameGraph::from_matrix(n, g.d(), matrix).expect("strategy keeps one edge per node");
        let reach = reachable_from(&restricted, arena.initial);
        let (_, odd) = cycle_max_parities(&restricted, &reach);
        if !odd {
            return Ok(DirectSolution { winner: Player::Even, strategy: Some(strategy) });
        }
        // Advance the mixed-radix counter, last node fastest.
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(DirectSolution { winner: Player::Odd, strategy: None });
            }
            pos -= 1;
            pick[pos] += 1;
            if pick[pos] < choices[pos].len() {
                break;
            }
            pick[pos] = 0;
        }
    }
}

fn reachable_from(g: &GameGraph, v: u32) -> Vec<bool> {
    let mut seen = vec![false; g.n()];
    let mut stack = vec![v];
    seen[v as usize - 1] = true;
    while let Some(u) = stack.pop() {
        for (w, _) in g.successors(u) {
            if !seen[w as usize - 1] {
                seen[w as usize - 1] = true;
                stack.push(w);
            }
        }
    }
    seen
}
