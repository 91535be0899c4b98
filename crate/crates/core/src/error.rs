use alloc::boxed::Box;
use alloc::string::String;

use crate::separation::Counterexample;

/// Errors raised by the laboratory's operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("malformed graph: {0}")]
    MalformedGraph(String),
    #[error("malformed automaton: {0}")]
    MalformedAutomaton(String),
    #[error("{what} out of range: {value} not in {lo}..={hi}")]
    OutOfRange {
        what: &'static str,
        value: u64,
        lo: u64,
        hi: u64,
    },
    #[error("cap exceeded: {what} is {value}, cap is {cap} (raise it explicitly to proceed)")]
    CapExceeded {
        what: &'static str,
        value: u128,
        cap: u128,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("automaton does not separate: {0}")]
    NotSeparating(Box<Counterexample>),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn out_of_range(what: &'static str, value: u64, lo: u64, hi: u64) -> Error {
    Error::OutOfRange { what, value, lo, hi }
}

pub(crate) fn check_cap(what: &'static str, value: u128, cap: u128) -> Result<()> {
    if value > cap {
        Err(Error::CapExceeded { what, value, cap })
    } else {
        Ok(())
    }
}
