// SPDX-License-Identifier: Apache-2.0

//! Deductive algorithmic knowledge: rule-based deduction over term algebras, an
//! epistemic logic with implicit (`K`) and explicit (`X`) knowledge, axiom generation
//! and satisfiability procedures.

pub mod axioms;
pub mod deduction;
pub mod error;
pub mod files;
pub mod formula;
pub mod language;
pub mod model;
pub mod presets;
pub mod sat;
pub mod syntax;
pub mod term;

pub use deduction::{
    check_deduction, closure, derive, is_monotone_witness, Deduction, DeductiveSystem, Justification, Rule, Step,
    Strategy, Verdict,
};
pub use error::{Error, Position, Result};
pub use formula::{Formula, Nnf};
pub use language::{Ctor, Language};
pub use model::{State, Structure, Truth};
pub use term::{match_term, GroundTerm, Signature, Substitution, Symbol, Term};
