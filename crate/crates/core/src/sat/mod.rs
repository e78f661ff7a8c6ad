// SPDX-License-Identifier: Apache-2.0

//! Satisfiability: reduction to the modal language with a single `K`, a small-model
//! S5 solver, and witness reconstruction as knowledge structures.

mod circuit;
mod general;
mod multi;
mod s5;

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::language::{is_reserved_name, Language};
use crate::model::Structure;
use crate::term::{Signature, Term};

pub use general::{default_pool, sat_fixed_d, sat_general, FixedDOptions};
pub use multi::sat_multi;
pub use s5::{sat_s5, S5Model};

/// Propositional atoms of the target modal language.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum ModalAtom {
    /// An anonymous proposition `p_k`, `k ≥ 1`.
    Plain(usize),
    /// `p_t`: the primitive proposition `t`.
    Term(Term),
    /// `q_ψ`: stands for `X_i ψ`.
    XKnow(usize, Formula),
    /// `r_t`: stands for `Ob_i(t)`.
    Obs(usize, Term),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Modal {
    Atom(ModalAtom),
    Not(Box<Modal>),
    And(Box<Modal>, Box<Modal>),
    Implies(Box<Modal>, Box<Modal>),
    Iff(Box<Modal>, Box<Modal>),
    Know(usize, Box<Modal>),
}

impl Modal {
    pub fn atom(a: ModalAtom) -> Modal {
        Modal::Atom(a)
    }

    pub fn plain(k: usize) -> Modal {
        Modal::Atom(ModalAtom::Plain(k))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Modal) -> Modal {
        Modal::Not(Box::new(a))
    }

    pub fn and(a: Modal, b: Modal) -> Modal {
        Modal::And(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Modal, b: Modal) -> Modal {
        Modal::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Modal, b: Modal) -> Modal {
        Modal::Iff(Box::new(a), Box::new(b))
    }

    pub fn know(agent: usize, a: Modal) -> Modal {
        Modal::Know(agent, Box::new(a))
    }

    /// Symbol count; each atom counts once.
    pub fn size(&self) -> usize {
        match self {
            Modal::Atom(_) => 1,
            Modal::Not(a) | Modal::Know(_, a) => 1 + a.size(),
            Modal::And(a, b) | Modal::Implies(a, b) | Modal::Iff(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<ModalAtom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<ModalAtom>) {
        match self {
            Modal::Atom(a) => {
                out.insert(a.clone());
            }
            Modal::Not(a) | Modal::Know(_, a) => a.collect_atoms(out),
            Modal::And(a, b) | Modal::Implies(a, b) | Modal::Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn max_agent(&self) -> usize {
        match self {
            Modal::Atom(ModalAtom::XKnow(i, _) | ModalAtom::Obs(i, _)) => *i,
            Modal::Atom(_) => 0,
            Modal::Not(a) => a.max_agent(),
            Modal::Know(i, a) => (*i).max(a.max_agent()),
            Modal::And(a, b) | Modal::Implies(a, b) | Modal::Iff(a, b) => a.max_agent().max(b.max_agent()),
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, level: u8, indexed: bool) -> fmt::Result {
        match self {
            Modal::Atom(a) => a.write(f, indexed),
            Modal::Not(a) => {
                f.write_str("!")?;
                a.write(f, 3, indexed)
            }
            Modal::Know(i, a) => {
                if indexed {
                    write!(f, "K{i} ")?;
                } else {
                    f.write_str("K ")?;
                }
                a.write(f, 3, indexed)
            }
            Modal::And(a, b) => {
                if level > 2 {
                    f.write_str("(")?;
                }
                a.write(f, 2, indexed)?;
                f.write_str(" & ")?;
                b.write(f, 3, indexed)?;
                if level > 2 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Modal::Implies(a, b) | Modal::Iff(a, b) => {
                let sym = if matches!(self, Modal::Implies(..)) { " => " } else { " <=> " };
                if level > 0 {
                    f.write_str("(")?;
                }
                a.write(f, 1, indexed)?;
                f.write_str(sym)?;
                b.write(f, 1, indexed)?;
                if level > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl ModalAtom {
    fn write(&self, f: &mut fmt::Formatter<'_>, indexed: bool) -> fmt::Result {
        let agent = |i: &usize| if indexed { i.to_string() } else { String::new() };
        match self {
            ModalAtom::Plain(k) => write!(f, "p{k}"),
            ModalAtom::Term(t) => write!(f, "p[{t}]"),
            ModalAtom::XKnow(i, psi) => {
                let shown = if indexed { psi.display_indexed() } else { psi.display() };
                write!(f, "q{}[{shown}]", agent(i))
            }
            ModalAtom::Obs(i, t) => write!(f, "r{}[{t}]", agent(i)),
        }
    }
}

impl fmt::Display for ModalAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, false)
    }
}

impl fmt::Display for Modal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0, self.max_agent() > 1)
    }
}

impl Modal {
    /// Text with agent indices on every operator and atom when `indexed` is set,
    /// so that formulas of one multi-agent translation print alike.
    pub fn render(&self, indexed: bool) -> String {
        struct Shown<'a>(&'a Modal, bool);
        impl fmt::Display for Shown<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.write(f, 0, self.1)
            }
        }
        Shown(self, indexed).to_string()
    }
}

/// The modal image of a formula: the translated body and the frame conditions tying
/// the `q`/`r` atoms to `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tilde {
    pub body: Modal,
    pub frames: Vec<Modal>,
}

impl Tilde {
    /// Body and frame conditions as one flat conjunction.
    pub fn conjoined(&self) -> Modal {
        self.frames.iter().cloned().fold(self.body.clone(), Modal::and)
    }

    /// Body together with the frame conditions required at every world of every agent.
    ///
    /// The flat form only constrains the designated world; a formula such as
    /// `!Ob(p) & !K !Ob(p)` would become satisfiable. Nesting `K` for each agent up
    /// to the depth of the formula makes the conditions hold in every reachable world.
    pub fn framed(&self) -> Modal {
        let Some(all) = self.frames.iter().cloned().reduce(Modal::and) else {
            return self.body.clone();
        };
        let agents = self.body.max_agent().max(self.frames.iter().map(Modal::max_agent).max().unwrap_or(0)).max(1);
        if agents == 1 {
            return Modal::and(self.body.clone(), Modal::and(all.clone(), Modal::know(1, all)));
        }
        // multi-agent: conditions hold everywhere within `depth` steps
        let depth = modal_depth(&self.body).max(1);
        let mut everywhere = all.clone();
        for _ in 0..depth {
            let mut next = all.clone();
            for i in 1..=agents {
                next = Modal::and(next, Modal::know(i, everywhere.clone()));
            }
            everywhere = next;
        }
        Modal::and(self.body.clone(), everywhere)
    }
}

fn modal_depth(m: &Modal) -> usize {
    match m {
        Modal::Atom(_) => 0,
        Modal::Not(a) => modal_depth(a),
        Modal::Know(_, a) => 1 + modal_depth(a),
        Modal::And(a, b) | Modal::Implies(a, b) | Modal::Iff(a, b) => modal_depth(a).max(modal_depth(b)),
    }
}

/// Replace atoms, `X_i ψ` and `Ob_i(t)` by fresh propositions and collect the frame
/// conditions for every observation and `X` subformula (outside the scope of `X`).
pub fn translate_tilde(phi: &Formula) -> Tilde {
    let mut frames = Vec::new();
    let mut seen = BTreeSet::new();
    let body = tilde(phi, &mut frames, &mut seen);
    Tilde { body, frames }
}

fn tilde(phi: &Formula, frames: &mut Vec<Modal>, seen: &mut BTreeSet<Modal>) -> Modal {
    let mut push = |m: Modal, frames: &mut Vec<Modal>| {
        if seen.insert(m.clone()) {
            frames.push(m);
        }
    };
    match phi {
        Formula::Atom(t) => Modal::Atom(ModalAtom::Term(t.clone())),
        Formula::Not(a) => Modal::not(tilde(a, frames, seen)),
        Formula::And(a, b) => {
            let a = tilde(a, frames, seen);
            Modal::and(a, tilde(b, frames, seen))
        }
        Formula::Know(i, a) => Modal::know(*i, tilde(a, frames, seen)),
        Formula::XKnow(i, a) => {
            let q = Modal::Atom(ModalAtom::XKnow(*i, (**a).clone()));
            push(Modal::iff(q.clone(), Modal::know(*i, q.clone())), frames);
            q
        }
        Formula::Obs(i, t) => {
            let r = Modal::Atom(ModalAtom::Obs(*i, t.clone()));
            let q = Modal::Atom(ModalAtom::XKnow(*i, phi.clone()));
            push(Modal::iff(r.clone(), Modal::know(*i, r.clone())), frames);
            push(Modal::implies(r.clone(), q.clone()), frames);
            push(Modal::iff(q.clone(), Modal::know(*i, q)), frames);
            r
        }
    }
}

/// A name not used by `sig` and not reserved, built from `stem`.
pub(crate) fn fresh_symbol(sig: &Signature, stem: &str) -> String {
    if !sig.contains(stem) && !is_reserved_name(stem) {
        return stem.to_string();
    }
    (1..)
        .map(|k| format!("{stem}_{k}"))
        .find(|n| !sig.contains(n) && !is_reserved_name(n))
        .expect("unbounded search")
}

/// Encode a pure modal formula over plain atoms: `p_k` becomes the ground term
/// `tower^(k-1)(c)` for the first constant `c` and a fresh unary symbol `tower`.
///
/// Returns the formula and the language extended with the fresh symbol.
pub fn embed_modal(f: &Modal, lang: &Language) -> Result<(Formula, Language)> {
    let seed = lang.first_constant()?.to_string();
    let tower = fresh_symbol(lang.full(), "tower");
    let mut extra = Signature::new();
    extra.declare(&tower, 1)?;
    let lang = lang.extend_base(&extra)?;
    fn go(f: &Modal, seed: &str, tower: &str, lang: &Language) -> Result<Formula> {
        Ok(match f {
            Modal::Atom(ModalAtom::Plain(k)) => {
                let mut t = Term::constant(seed);
                for _ in 1..*k {
                    t = Term::app(tower, vec![t]);
                }
                Formula::Atom(t)
            }
            Modal::Atom(other) => {
                return Err(Error::Unsupported(format!("embedding expects plain atoms, found {other}")));
            }
            Modal::Not(a) => Formula::not(go(a, seed, tower, lang)?),
            Modal::And(a, b) => Formula::and(go(a, seed, tower, lang)?, go(b, seed, tower, lang)?),
            Modal::Implies(a, b) => Formula::implies(go(a, seed, tower, lang)?, go(b, seed, tower, lang)?),
            Modal::Iff(a, b) => Formula::iff(go(a, seed, tower, lang)?, go(b, seed, tower, lang)?),
            Modal::Know(i, a) => {
                lang.check_agent(*i)?;
                Formula::know(*i, go(a, seed, tower, lang)?)
            }
        })
    }
    let out = go(f, &seed, &tower, &lang)?;
    Ok((out, lang))
}

/// Outcome of a satisfiability query.
#[derive(Clone, Debug)]
pub enum SatVerdict<W> {
    Sat(W),
    Unsat,
    UnknownAtBound(String),
}

impl<W> SatVerdict<W> {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatVerdict::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SatVerdict::Unsat)
    }

    pub fn map<V>(self, f: impl FnOnce(W) -> V) -> SatVerdict<V> {
        match self {
            SatVerdict::Sat(w) => SatVerdict::Sat(f(w)),
            SatVerdict::Unsat => SatVerdict::Unsat,
            SatVerdict::UnknownAtBound(s) => SatVerdict::UnknownAtBound(s),
        }
    }
}

/// A knowledge structure and the state at which the formula holds.
#[derive(Clone, Debug)]
pub struct Witness {
    pub structure: Structure,
    pub state: String,
}
