// SPDX-License-Identifier: Apache-2.0

//! Random generators and an independent satisfiability oracle shared by the
//! integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use dedukt::language::Ctor;
use dedukt::model::State;
use dedukt::{DeductiveSystem, Formula, GroundTerm, Language, Rule, Signature, Structure, Term};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Between two and six symbols, at least one of them a constant.
pub fn random_signature(rng: &mut ChaCha8Rng) -> Signature {
    let candidates = [("a", 0), ("b", 0), ("c", 0), ("f", 1), ("g", 1), ("h", 2)];
    let count = rng.gen_range(2..=6);
    let mut chosen: Vec<(&str, usize)> = vec![candidates[0]];
    let mut rest: Vec<_> = candidates[1..].to_vec();
    rest.shuffle(rng);
    chosen.extend(rest.into_iter().take(count - 1));
    Signature::from_symbols(chosen).unwrap()
}

pub fn random_ground(rng: &mut ChaCha8Rng, sig: &Signature, depth: usize) -> GroundTerm {
    let symbols: Vec<(&str, usize)> = sig.iter().filter(|&(_, a)| depth > 0 || a == 0).collect();
    let (name, arity) = *symbols.choose(rng).unwrap();
    let args = (0..arity).map(|_| random_ground(rng, sig, depth - 1)).collect();
    GroundTerm::app(name, args)
}

pub fn random_pattern(rng: &mut ChaCha8Rng, sig: &Signature, vars: &[&str], depth: usize) -> Term {
    if !vars.is_empty() && rng.gen_bool(0.35) {
        return Term::var(vars.choose(rng).unwrap());
    }
    let symbols: Vec<(&str, usize)> = sig.iter().filter(|&(_, a)| depth > 0 || a == 0).collect();
    let (name, arity) = *symbols.choose(rng).unwrap();
    let args = (0..arity).map(|_| random_pattern(rng, sig, vars, depth - 1)).collect();
    Term::app(name, args)
}

fn occurrences(t: &Term, v: &str) -> usize {
    match t {
        Term::Var(x) => usize::from(&**x == v),
        Term::App(_, args) => args.iter().map(|a| occurrences(a, v)).sum(),
    }
}

/// A rule whose instances never produce a term larger than one of their premises,
/// so that saturation from finitely many observations terminates.
pub fn random_rule(rng: &mut ChaCha8Rng, lang: &Language, agent: usize) -> Rule {
    let sig = lang.base();
    loop {
        let npremises = rng.gen_range(0..=2);
        let vars: &[&str] = if npremises == 0 { &[] } else { &["x", "y"] };
        let premises: Vec<Term> = (0..npremises)
            .map(|_| {
                let p = random_pattern(rng, sig, vars, 2);
                if rng.gen_bool(0.5) {
                    lang.mk(Ctor::Ob(agent), vec![p])
                } else {
                    p
                }
            })
            .collect();
        let conclusion = random_pattern(rng, sig, vars, 2);
        if matches!(conclusion, Term::Var(_)) {
            continue;
        }
        let fits = |p: &Term| {
            conclusion.size() <= p.size()
                && conclusion
                    .vars()
                    .iter()
                    .all(|v| occurrences(&conclusion, v) <= occurrences(p, v))
        };
        if conclusion.is_ground() || premises.iter().any(fits) {
            return Rule::new(premises, conclusion);
        }
    }
}

pub fn random_system(rng: &mut ChaCha8Rng, lang: &Language, agent: usize) -> DeductiveSystem {
    let n = rng.gen_range(0..=8);
    let rules = (0..n).map(|_| random_rule(rng, lang, agent)).collect();
    DeductiveSystem::new(lang.clone(), rules).unwrap()
}

/// Up to five states over one or two agents, at most four observations per state
/// drawn from a small pool so that states often share observations.
pub fn random_structure(rng: &mut ChaCha8Rng) -> Structure {
    let sig = random_signature(rng);
    let agents = rng.gen_range(1..=2);
    let lang = Language::new(sig.clone(), agents).unwrap();
    let pool: Vec<GroundTerm> = (0..5).map(|_| random_ground(rng, &sig, 2)).collect();
    let systems = (1..=agents).map(|i| random_system(rng, &lang, i)).collect();
    let nstates = rng.gen_range(1..=5);
    let states = (0..nstates)
        .map(|k| {
            let mut st = State::new(&format!("s{}", k + 1), agents);
            for o in st.obs.iter_mut() {
                let count = rng.gen_range(0..=4);
                o.extend(pool.choose_multiple(rng, count).cloned());
            }
            for t in &pool {
                if rng.gen_bool(0.5) {
                    st.truths.insert(t.clone());
                }
            }
            st
        })
        .collect();
    Structure::new(lang, systems, states, false).unwrap()
}

/// A formula with `connectives` connectives over the given atoms and observed terms.
pub fn random_formula(
    rng: &mut ChaCha8Rng,
    agents: usize,
    atoms: &[GroundTerm],
    observed: &[GroundTerm],
    connectives: usize,
) -> Formula {
    if connectives == 0 {
        return Formula::atom(atoms.choose(rng).unwrap().clone());
    }
    let agent = rng.gen_range(1..=agents);
    match rng.gen_range(0..5) {
        0 => Formula::not(random_formula(rng, agents, atoms, observed, connectives - 1)),
        1 => Formula::know(agent, random_formula(rng, agents, atoms, observed, connectives - 1)),
        2 => Formula::xknow(agent, random_formula(rng, agents, atoms, observed, connectives - 1)),
        3 if !observed.is_empty() && connectives == 1 => Formula::obs(agent, observed.choose(rng).unwrap().clone()),
        _ => {
            let left = rng.gen_range(0..connectives);
            Formula::and(
                random_formula(rng, agents, atoms, observed, left),
                random_formula(rng, agents, atoms, observed, connectives - 1 - left),
            )
        }
    }
}

/// Ground terms of `structure`'s pool of observations and valuations.
pub fn structure_terms(s: &Structure) -> Vec<GroundTerm> {
    let mut out = BTreeSet::new();
    for st in s.states() {
        out.extend(st.truths.iter().cloned());
        for o in &st.obs {
            out.extend(o.iter().cloned());
        }
    }
    if out.is_empty() {
        out.insert(GroundTerm::constant("a"));
    }
    out.into_iter().collect()
}

/// Satisfiability of a ground single-agent formula by enumerating structures.
///
/// A single-agent formula is evaluated inside the equivalence class of the state, so
/// it suffices to enumerate one class: a set of at most `|φ|` distinct valuations of
/// the atoms of `φ`, an observation set drawn from the terms observed in `φ`, and a
/// deductive system `{ob(tag) -> ψ^T : ψ ∈ R}` for a subset `R` of the `X`
/// subformulas, with `tag` observed in every state.
pub fn oracle_sat(phi: &Formula) -> bool {
    let mut atoms = BTreeSet::new();
    let mut observed = BTreeSet::new();
    let mut xs = BTreeSet::new();
    collect(phi, &mut atoms, &mut observed, &mut xs);
    let atoms: Vec<Term> = atoms.into_iter().collect();
    let observed: Vec<Term> = observed.into_iter().collect();
    let xs: Vec<Formula> = xs.into_iter().collect();
    let bound = phi.size();
    let valuations = 1usize << atoms.len();
    assert!(valuations <= 16, "oracle limited to four atoms");

    for o_mask in 0..1u32 << observed.len() {
        for r_mask in 0..1u32 << xs.len() {
            let ctx = Ctx {
                atoms: &atoms,
                observed: &observed,
                xs: &xs,
                o_mask,
                r_mask,
            };
            for w_mask in 1u32..1 << valuations {
                if w_mask.count_ones() as usize > bound {
                    continue;
                }
                let worlds: Vec<usize> = (0..valuations).filter(|v| w_mask >> v & 1 == 1).collect();
                if worlds.iter().any(|&w| ctx.eval(phi, w, &worlds)) {
                    return true;
                }
            }
        }
    }
    false
}

fn collect(f: &Formula, atoms: &mut BTreeSet<Term>, observed: &mut BTreeSet<Term>, xs: &mut BTreeSet<Formula>) {
    match f {
        Formula::Atom(t) => {
            atoms.insert(t.clone());
        }
        Formula::Obs(_, t) => {
            observed.insert(t.clone());
        }
        Formula::XKnow(_, a) => {
            xs.insert((**a).clone());
            // the premise set may make an observed term derivable
            if let Formula::Obs(_, t) = &**a {
                observed.insert(t.clone());
            }
        }
        Formula::Not(a) | Formula::Know(_, a) => collect(a, atoms, observed, xs),
        Formula::And(a, b) => {
            collect(a, atoms, observed, xs);
            collect(b, atoms, observed, xs);
        }
    }
}

struct Ctx<'a> {
    atoms: &'a [Term],
    observed: &'a [Term],
    xs: &'a [Formula],
    o_mask: u32,
    r_mask: u32,
}

impl Ctx<'_> {
    fn eval(&self, f: &Formula, w: usize, worlds: &[usize]) -> bool {
        match f {
            Formula::Atom(t) => {
                let k = self.atoms.iter().position(|a| a == t).unwrap();
                w >> k & 1 == 1
            }
            Formula::Obs(_, t) => self.observes(t),
            Formula::Not(a) => !self.eval(a, w, worlds),
            Formula::And(a, b) => self.eval(a, w, worlds) && self.eval(b, w, worlds),
            Formula::Know(_, a) => worlds.iter().all(|&v| self.eval(a, v, worlds)),
            Formula::XKnow(_, a) => {
                // ob(o) for observed o is a premise; rule conclusions are the chosen ψ^T
                let premise = matches!(&**a, Formula::Obs(_, t) if self.observes(t));
                let k = self.xs.iter().position(|x| x == &**a).unwrap();
                premise || self.r_mask >> k & 1 == 1
            }
        }
    }

    fn observes(&self, t: &Term) -> bool {
        self.observed
            .iter()
            .position(|o| o == t)
            .is_some_and(|k| self.o_mask >> k & 1 == 1)
    }
}
