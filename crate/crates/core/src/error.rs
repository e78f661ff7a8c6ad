// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use thiserror::Error;

/// A location in parsed input, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: Position, message: String },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("symbol `{symbol}` expects {expected} argument(s), got {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },

    #[error("symbol `{symbol}` declared twice (arity {first} and {second})")]
    DuplicateSymbol {
        symbol: String,
        first: usize,
        second: usize,
    },

    #[error("symbol `{0}` is reserved by the logic and cannot be declared")]
    ReservedSymbol(String),

    #[error("agent index {agent} out of range 1..={agents}")]
    AgentOutOfRange { agent: usize, agents: usize },

    #[error("observation `{0}` must be a ground term over the base signature")]
    ObservationNotBase(String),

    #[error("atom `{0}` may not be headed by a logical constructor")]
    ReservedAtom(String),

    #[error("term `{0}` is not ground")]
    NotGround(String),

    #[error("signature declares no constant; `true`/`false` and tower encodings need one")]
    NoConstant,

    #[error("cannot translate `{0}` into a formula: ob is only translated over base ground terms")]
    Translation(String),

    #[error("unbound metavariable `{0}`")]
    UnboundMetavariable(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("duplicate state `{0}`")]
    DuplicateState(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("malformed intercept `{0}`: expected recv(t) with no `has` inside t")]
    MalformedIntercept(String),

    #[error("state `{state}` observes `{term}` but the valuation makes it false under reliable observations")]
    UnreliableObservation { state: String, term: String },

    #[error("deduction for `{0}` exhausted its bound; choose a decidable strategy")]
    StrategyEscalation(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("witness replay failed: {0}")]
    WitnessReplay(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
