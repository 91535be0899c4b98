/// Explicit limits for every exhaustive enumeration in the crate.
///
/// Exceeding a cap is always a refusal ([`crate::Error::CapExceeded`]), never a
/// silent truncation. The defaults keep every sweep at desk scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest node count for game-graph enumeration.
    pub graph_nodes: usize,
    /// Largest priority count for game-graph enumeration.
    pub priorities: u32,
    /// Largest state count for automaton enumeration.
    pub automaton_states: usize,
    /// Largest alphabet size `n * d` for automaton enumeration.
    pub alphabet: usize,
    /// Largest `C(n, a)` for set-family brute force (max product, ideals).
    pub family_members: usize,
    /// Largest `C(n, a)` for the `A^{k,n}_{a,t}` brute force.
    pub a_members: usize,
    /// Largest `C(n, a)^k` for D / I generation.
    pub tuple_space: u128,
    /// Largest `|D|` for exact minimum covers.
    pub cover_tuples: usize,
    /// Largest number of memoryless strategies the direct solver may enumerate.
    pub strategies: u128,
    /// Largest number of candidate tuples a single scan may examine
    /// (ALG1 over I, structured search over D).
    pub scan_steps: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            graph_nodes: 4,
            priorities: 2,
            automaton_states: 3,
            alphabet: 6,
            family_members: 20,
            a_members: 10,
            tuple_space: 1_000_000,
            cover_tuples: 12,
            strategies: 1_000_000,
            scan_steps: 10_000_000,
        }
    }
}

impl Caps {
    /// Caps large enough that nothing in practice hits them.
    pub fn unlimited() -> Self {
        Caps {
            graph_nodes: usize::MAX,
            priorities: u32::MAX,
            automaton_states: usize::MAX,
            alphabet: usize::MAX,
            family_members: 64,
            a_members: 64,
            tuple_space: u128::MAX,
            cover_tuples: 20,
            strategies: u128::MAX,
            scan_steps: u128::MAX,
        }
    }
}
