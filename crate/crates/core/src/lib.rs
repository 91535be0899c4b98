//! Separation automata for parity games, checked by brute force.
//!
//! The crate models game graphs with priorities on edges, deterministic safety
//! automata over the alphabet `[n] x [d]`, and the combinatorial machinery
//! around the question of how small such an automaton can be when it must tell
//! walks of even graphs from walks of odd graphs:
//!
//! * [`game`]: graphs, classification, walk encodings, exhaustive enumeration;
//! * [`automaton`]: safety automata, products, canonical enumeration;
//! * [`separation`]: separation verifiers, refutation of small automata,
//!   reachability and parity solvers;
//! * [`fooling`]: parameters, ordered tuples, witness graphs and fooling words;
//! * [`extremal`]: shifting, the componentwise order, far families and bounds;
//! * [`comm`]: the promise disjointness problem, box covers and thresholds.
//!
//! Every exhaustive routine takes a [`Caps`] and refuses, rather than
//! truncates, when a limit would be exceeded.
#![no_std]

extern crate alloc;

pub mod automaton;
pub mod caps;
pub mod comm;
pub mod error;
pub mod extremal;
pub mod fooling;
pub mod game;
pub mod separation;
pub mod sets;

pub use automaton::SafetyAutomaton;
pub use caps::Caps;
pub use error::{Error, Result};
pub use game::{GameGraph, GraphParity, Letter, Parity, Word};
pub use sets::Subset;
