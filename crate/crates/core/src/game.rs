//! Game graphs with priorities on edges, their even/odd classification, and
//! the letter/word encoding of walks over the alphabet `[n] x [d]`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::caps::Caps;
use crate::error::{check_cap, out_of_range, Error, Result};

/// A letter `(node, priority)`; both components are 1-based.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub node: u32,
    pub priority: u32,
}

impl Letter {
    pub const fn new(node: u32, priority: u32) -> Self {
        Letter { node, priority }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.node, self.priority)
    }
}

/// A finite word over `[n] x [d]`, read as a walk prefix
/// `(v1, p1)(v2, p2)...` where `p_i` is the priority of the edge leaving `v_i`.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Letter> {
        self.0.iter()
    }
}

impl From<Vec<Letter>> for Word {
    fn from(letters: Vec<Letter>) -> Self {
        Word(letters)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Word {
    type Item = &'a Letter;
    type IntoIter = core::slice::Iter<'a, Letter>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for l in &self.0 {
            write!(f, "{l:?}")?;
        }
        Ok(())
    }
}

/// Parity of a game graph: the parity shared by the maximum priority of every cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GraphParity {
    Even,
    Odd,
    Neither,
}

/// Requested parity for realizability questions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(priority: u32) -> Parity {
        if priority.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Directed graph on nodes `[n]` with one priority in `[d]` per edge.
///
/// Loops are allowed, parallel edges are not, and every node has at least
/// one outgoing edge. Stored as an `n x n` matrix with `0` for "no edge".
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GameGraph {
    n: usize,
    d: u32,
    matrix: Vec<u32>,
}

impl GameGraph {
    /// Builds a graph from `(u, v, priority)` triples with 1-based nodes.
    pub fn new<I>(n: usize, d: u32, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32, u32)>,
    {
        if n == 0 || d == 0 {
            return Err(Error::MalformedGraph(format!("need n >= 1 and d >= 1, got n={n}, d={d}")));
        }
        let mut matrix = vec![0u32; n * n];
        for (u, v, p) in edges {
            for x in [u, v] {
                if x == 0 || x as usize > n {
                    return Err(out_of_range("node", x as u64, 1, n as u64));
                }
            }
            if p == 0 || p > d {
                return Err(out_of_range("priority", p as u64, 1, d as u64));
            }
            let slot = &mut matrix[(u as usize - 1) * n + v as usize - 1];
            if *slot != 0 {
                return Err(Error::MalformedGraph(format!("parallel edge {u}->{v}")));
            }
            *slot = p;
        }
        Self::from_matrix(n, d, matrix)
    }

    /// Builds a graph from a row-major matrix (`0` = no edge).
    pub fn from_matrix(n: usize, d: u32, matrix: Vec<u32>) -> Result<Self> {
        if matrix.len() != n * n {
            return Err(Error::SizeMismatch { expected: n * n, found: matrix.len() });
        }
        if let Some(&p) = matrix.iter().find(|&&p| p > d) {
            return Err(out_of_range("priority", p as u64, 1, d as u64));
        }
        for u in 0..n {
            if matrix[u * n..(u + 1) * n].iter().all(|&p| p == 0) {
                return Err(Error::MalformedGraph(format!("node {} has no outgoing edge", u + 1)));
            }
        }
        Ok(GameGraph { n, d, matrix })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Priority of edge `u -> v`, if present.
    pub fn priority(&self, u: u32, v: u32) -> Option<u32> {
        if u == 0 || v == 0 || u as usize > self.n || v as usize > self.n {
            return None;
        }
        match self.matrix[(u as usize - 1) * self.n + v as usize - 1] {
            0 => None,
            p => Some(p),
        }
    }

    /// Outgoing `(target, priority)` pairs of `u`, by increasing target.
    pub fn successors(&self, u: u32) -> impl Iterator<Item = (u32, u32)> + '_ {
        let row = &self.matrix[(u as usize - 1) * self.n..u as usize * self.n];
        row.iter()
            .enumerate()
            .filter(|(_, &p)| p != 0)
            .map(|(v, &p)| (v as u32 + 1, p))
    }

    /// All edges `(u, v, priority)` in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32, u32)> + '_ {
        let n = self.n;
        self.matrix
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != 0)
            .map(move |(i, &p)| ((i / n) as u32 + 1, (i % n) as u32 + 1, p))
    }

    pub fn edge_count(&self) -> usize {
        self.matrix.iter().filter(|&&p| p != 0).count()
    }

    /// Row-major matrix, `0` for absent edges.
    pub fn matrix(&self) -> &[u32] {
        &self.matrix
    }
}

impl fmt::Debug for GameGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GameGraph(n={}, d={}, [", self.n, self.d)?;
        for (i, (u, v, p)) in self.edges().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{u}->{v}:{p}")?;
        }
        f.write_str("])")
    }
}

/// Strongly connected component ids for the subgraph of `adj` restricted to
/// `active` nodes (0-based). Inactive nodes get `usize::MAX`.
pub(crate) fn scc_ids(adj: &[Vec<usize>], active: &[bool]) -> Vec<usize> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    // Iterative Tarjan: frames are (node, next successor position).
    let mut frames: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if !active[root] || index[root] != usize::MAX {
            continue;
        }
        frames.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (u, ref mut pos)) = frames.last_mut() {
            if *pos < adj[u].len() {
                let v = adj[u][*pos];
                *pos += 1;
                if !active[v] {
                    continue;
                }
                if index[v] == usize::MAX {
                    index[v] = next_index;
                    low[v] = next_index;
                    next_index += 1;
                    stack.push(v);
                    on_stack[v] = true;
                    frames.push((v, 0));
                } else if on_stack[v] {
                    low[u] = low[u].min(index[v]);
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    low[parent] = low[parent].min(low[u]);
                }
                if low[u] == index[u] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == u {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

/// Which cycle-maximum parities occur among cycles through `active` nodes.
///
/// A cycle with maximum priority `p` exists iff some edge of priority `p` has
/// both endpoints in one SCC of the subgraph of edges with priority `<= p`.
pub(crate) fn cycle_max_parities(g: &GameGraph, active: &[bool]) -> (bool, bool) {
    let n = g.n;
    let mut priorities: Vec<u32> = g.edges().map(|(_, _, p)| p).collect();
    priorities.sort_unstable();
    priorities.dedup();
    let (mut even, mut odd) = (false, false);
    for p in priorities {
        if (p % 2 == 0 && even) || (p % 2 == 1 && odd) {
            continue;
        }
        let mut adj = vec![Vec::new(); n];
        for (u, v, q) in g.edges() {
            if q <= p {
                adj[u as usize - 1].push(v as usize - 1);
            }
        }
        let comp = scc_ids(&adj, active);
        let closes = g.edges().any(|(u, v, q)| {
            let (u, v) = (u as usize - 1, v as usize - 1);
            q == p && active[u] && active[v] && comp[u] == comp[v]
        });
        if closes {
            if p % 2 == 0 {
                even = true;
            } else {
                odd = true;
            }
        }
    }
    (even, odd)
}

/// Even iff every cycle's maximum priority is even, Odd iff every cycle's
/// maximum is odd, Neither otherwise.
pub fn classify_graph(g: &GameGraph) -> GraphParity {
    match cycle_max_parities(g, &vec![true; g.n]) {
        (true, false) => GraphParity::Even,
        (false, true) => GraphParity::Odd,
        // Every node has an out-edge, so some cycle always exists.
        _ => GraphParity::Neither,
    }
}

/// Deterministic enumeration of every game graph on exactly the nodes `[n]`
/// with priorities in `[d]`.
///
/// Order: lexicographic over the row-major `(d+1)`-valued edge matrix
/// (entry `0` = absent, `p` = priority `p`), skipping matrices that contain an
/// all-absent row. Supports random access, so index ranges can be farmed out
/// to workers and merged back in order.
#[derive(Clone, Debug)]
pub struct GraphEnumeration {
    n: usize,
    d: u32,
    /// Number of admissible rows, `(d+1)^n - 1`.
    rows: u64,
    len: u64,
}

impl GraphEnumeration {
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// The graph at position `index` of the enumeration order.
    pub fn get(&self, index: u64) -> Option<GameGraph> {
        if index >= self.len {
            return None;
        }
        let (n, base) = (self.n, self.d as u64 + 1);
        let mut matrix = vec![0u32; n * n];
        let mut rest = index;
        for u in (0..n).rev() {
            let mut row = rest % self.rows + 1;
            rest /= self.rows;
            for v in (0..n).rev() {
                matrix[u * n + v] = (row % base) as u32;
                row /= base;
            }
        }
        Some(GameGraph { n, d: self.d, matrix })
    }

    pub fn iter(&self) -> impl Iterator<Item = GameGraph> + '_ {
        (0..self.len).map(move |i| self.get(i).expect("index in range"))
    }

    /// Graphs with indices in `range`, paired with their index.
    pub fn range(&self, range: core::ops::Range<u64>) -> impl Iterator<Item = (u64, GameGraph)> + '_ {
        let end = range.end.min(self.len);
        (range.start..end).map(move |i| (i, self.get(i).expect("index in range")))
    }
}

/// `((d+1)^n - 1)^n`, the number of game graphs on exactly `[n]`.
pub fn game_graph_count(n: usize, d: u32) -> Option<u64> {
    let rows = (d as u64 + 1).checked_pow(n as u32)? - 1;
    rows.checked_pow(n as u32)
}

/// All game graphs on `[n]` with priorities in `[d]`, refusing past the caps.
pub fn enumerate_game_graphs(n: usize, d: u32, caps: &Caps) -> Result<GraphEnumeration> {
    if n == 0 || d == 0 {
        return Err(Error::Parameter(format!("need n >= 1 and d >= 1, got n={n}, d={d}")));
    }
    check_cap("graph nodes", n as u128, caps.graph_nodes as u128)?;
    check_cap("graph priorities", d as u128, caps.priorities as u128)?;
    let len = game_graph_count(n, d).ok_or(Error::CapExceeded {
        what: "graph count",
        value: u128::MAX,
        cap: u64::MAX as u128,
    })?;
    Ok(GraphEnumeration { n, d, rows: (d as u64 + 1).pow(n as u32) - 1, len })
}

/// `(X, 1)`: the elements of `X` in increasing order, each with priority 1.
pub fn encode_set_word<I: IntoIterator<Item = u32>>(set: I) -> Word {
    let sorted: BTreeSet<u32> = set.into_iter().collect();
    sorted.into_iter().map(|x| Letter::new(x, 1)).collect()
}

/// `v(w)`: the set of nodes appearing in `w`.
pub fn nodes_of_word(w: &Word) -> BTreeSet<u32> {
    w.iter().map(|l| l.node).collect()
}

/// The separator letter `#_r = (n' + r, 2)`; `n` is the ambient node bound.
pub fn hash_letter(n_prime: u32, r: u32, n: u32) -> Result<Letter> {
    if r == 0 {
        return Err(out_of_range("hash index r", 0, 1, u32::MAX as u64));
    }
    let node = n_prime
        .checked_add(r)
        .ok_or_else(|| out_of_range("hash node", u64::from(n_prime) + u64::from(r), 1, n as u64))?;
    if node > n {
        return Err(out_of_range("hash node", node as u64, 1, n as u64));
    }
    Ok(Letter::new(node, 2))
}

/// Whether `w` is a walk prefix in `g`.
///
/// Each consecutive pair `(v_i, l_i)(v_{i+1}, _)` needs the edge
/// `v_i -> v_{i+1}` with priority `l_i`; the last letter only needs some
/// out-edge of its priority (its target is not part of the word).
pub fn is_walk(g: &GameGraph, w: &Word) -> bool {
    let letters = w.letters();
    let in_range = |l: &Letter| l.node >= 1 && l.node as usize <= g.n && l.priority >= 1 && l.priority <= g.d;
    if !letters.iter().all(in_range) {
        return false;
    }
    let steps_ok = letters
        .windows(2)
        .all(|pair| g.priority(pair[0].node, pair[1].node) == Some(pair[0].priority));
    let dangling_ok = letters
        .last()
        .is_none_or(|last| g.successors(last.node).any(|(_, p)| p == last.priority));
    steps_ok && dangling_ok
}

/// Whether `w` is realizable as a walk prefix in some game graph on at most
/// `n` nodes with priorities in `[d]` whose cycles all have the requested
/// parity.
///
/// The search is exact: a witness graph can be shrunk to the edges forced by
/// consecutive letters plus one dangling edge for the last letter (dropping
/// edges never creates cycles), and every node left without an out-edge can
/// take a self-loop of the requested parity (which only adds that loop as a
/// cycle). So it suffices to try each dangling target.
pub fn is_cycles_prefix(w: &Word, n: usize, d: u32, parity: Parity) -> Result<bool> {
    if n == 0 || d == 0 {
        return Err(Error::Parameter(format!("need n >= 1 and d >= 1, got n={n}, d={d}")));
    }
    let loop_priority = match parity {
        Parity::Odd => 1,
        Parity::Even if d >= 2 => 2,
        Parity::Even => return Ok(false),
    };
    let letters = w.letters();
    for l in letters {
        if l.node == 0 || l.node as usize > n {
            return Err(out_of_range("node", l.node as u64, 1, n as u64));
        }
        if l.priority == 0 || l.priority > d {
            return Err(out_of_range("priority", l.priority as u64, 1, d as u64));
        }
    }
    let mut forced = vec![0u32; n * n];
    for pair in letters.windows(2) {
        let slot = &mut forced[(pair[0].node as usize - 1) * n + pair[1].node as usize - 1];
        if *slot != 0 && *slot != pair[0].priority {
            return Ok(false);
        }
        *slot = pair[0].priority;
    }
    let complete = |mut m: Vec<u32>| -> bool {
        for u in 0..n {
            if m[u * n..(u + 1) * n].iter().all(|&p| p == 0) {
                m[u * n + u] = loop_priority;
            }
        }
        let g = GameGraph { n, d, matrix: m };
        let want = match parity {
            Parity::Even => GraphParity::Even,
            Parity::Odd => GraphParity::Odd,
        };
        classify_graph(&g) == want
    };
    let Some(last) = letters.last() else {
        return Ok(complete(forced));
    };
    let row = (last.node as usize - 1) * n;
    for x in 0..n {
        let existing = forced[row + x];
        if existing != 0 && existing != last.priority {
            continue;
        }
        let mut m = forced.clone();
        m[row + x] = last.priority;
        if complete(m) {
            return Ok(true);
        }
    }
    Ok(false)
}
