// SPDX-License-Identifier: Apache-2.0

//! Single-agent satisfiability over knowledge structures, with the deductive system
//! either free or fixed in advance.

use std::collections::{BTreeMap, BTreeSet};

use super::s5::{solve_s5, S5Model};
use super::{fresh_symbol, translate_tilde, ModalAtom, SatVerdict, Witness};
use crate::deduction::{derive, DeductiveSystem, Rule, Strategy, Verdict};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::language::Language;
use crate::model::{State, Structure, Truth};
use crate::term::{GroundTerm, Signature, Term};

fn single_agent(phi: &Formula, lang: &Language) -> Result<()> {
    phi.validate(lang)?;
    if !phi.is_ground() {
        return Err(Error::NotGround(phi.to_string()));
    }
    if phi.max_agent() > 1 {
        return Err(Error::Unsupported(
            "formula mentions several agents; use the bounded multi-agent search".into(),
        ));
    }
    Ok(())
}

/// Check the witness against the original formula.
pub(crate) fn replay(structure: Structure, state: &str, phi: &Formula, strategy: Strategy) -> Result<Witness> {
    match structure.check(state, phi, strategy)? {
        Truth::True => Ok(Witness {
            structure,
            state: state.to_string(),
        }),
        other => Err(Error::WitnessReplay(format!("`{phi}` evaluates to {other} at {state}"))),
    }
}

/// World valuations of a modal model as states over `agents` agents.
pub(crate) fn states_from(model: &S5Model, agents: usize) -> Vec<State> {
    (0..model.worlds().len())
        .map(|w| {
            let mut st = State::new(&format!("w{}", w + 1), agents);
            for a in model.atoms() {
                if let ModalAtom::Term(t) = a {
                    if model.value(w, a) {
                        st.truths.insert(GroundTerm::new(t.clone()).expect("ground formula"));
                    }
                }
            }
            st
        })
        .collect()
}

/// Decide satisfiability of a ground single-agent formula over all knowledge
/// structures, and build a witness for satisfiable ones.
///
/// The witness observes a fresh constant in every state, and its deductive system has
/// one rule `ob(tag) -> ψ` for every `X ψ` that must hold.
pub fn sat_general(phi: &Formula, lang: &Language) -> Result<SatVerdict<Witness>> {
    single_agent(phi, lang)?;
    let tilde = translate_tilde(phi);
    let Some(model) = solve_s5(&tilde.framed(), &BTreeMap::new())? else {
        return Ok(SatVerdict::Unsat);
    };

    let tag = fresh_symbol(lang.full(), "tag");
    let mut extra = Signature::new();
    extra.declare(&tag, 0)?;
    let wl = lang.with_agents(1)?.extend_base(&extra)?;
    let tag = GroundTerm::constant(&tag);
    let ob_tag = wl.ob_term(1, &tag).into_term();

    let mut obs = BTreeSet::from([tag]);
    let mut rules = Vec::new();
    for a in model.atoms() {
        match a {
            ModalAtom::Obs(_, t) if model.value(0, a) => {
                obs.insert(GroundTerm::new(t.clone())?);
            }
            ModalAtom::XKnow(_, psi) if model.value(0, a) => {
                rules.push(Rule::new(vec![ob_tag.clone()], psi.to_term(&wl)));
            }
            _ => {}
        }
    }
    let mut states = states_from(&model, 1);
    for st in &mut states {
        st.obs[0] = obs.clone();
    }
    let system = DeductiveSystem::new(wl.clone(), rules)?;
    let structure = Structure::new(wl, vec![system], states, false)?;
    replay(structure, "w1", phi, Strategy::Local).map(SatVerdict::Sat)
}

/// Search parameters for [`sat_fixed_d`].
#[derive(Clone, Debug)]
pub struct FixedDOptions {
    /// Largest observation set tried; all of the pool by default.
    pub max_obs: Option<usize>,
    /// Candidate observations; [`default_pool`] when absent.
    pub pool: Option<BTreeSet<GroundTerm>>,
    pub strategy: Strategy,
}

impl Default for FixedDOptions {
    fn default() -> Self {
        FixedDOptions {
            max_obs: None,
            pool: None,
            strategy: Strategy::Local,
        }
    }
}

/// Base ground subterms of the atoms and observed terms of `phi`, including those
/// under `X`.
pub fn default_pool(phi: &Formula, lang: &Language) -> BTreeSet<GroundTerm> {
    let mut pool = BTreeSet::new();
    for f in phi.subformulas() {
        if let Formula::Atom(t) | Formula::Obs(_, t) = f {
            for s in t.subterms() {
                if lang.is_base_term(&s) {
                    if let Ok(g) = GroundTerm::new(s) {
                        pool.insert(g);
                    }
                }
            }
        }
    }
    pool
}

fn subsets_of_size<T: Clone>(items: &[T], k: usize, f: &mut impl FnMut(&[T]) -> Result<bool>) -> Result<bool> {
    fn go<T: Clone>(
        items: &[T],
        k: usize,
        start: usize,
        cur: &mut Vec<T>,
        f: &mut impl FnMut(&[T]) -> Result<bool>,
    ) -> Result<bool> {
        if cur.len() == k {
            return f(cur);
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i].clone());
            if go(items, k, i + 1, cur, f)? {
                return Ok(true);
            }
            cur.pop();
        }
        Ok(false)
    }
    go(items, k, 0, &mut Vec::new(), f)
}

/// Satisfiability with the deductive system fixed to `system`, searching observation
/// sets drawn from a finite pool.
///
/// `Unsat` means no model exists whose observations come from the pool. When the
/// size bound stops the search short of the whole pool the answer is
/// `UnknownAtBound`.
pub fn sat_fixed_d(phi: &Formula, system: &DeductiveSystem, opts: &FixedDOptions) -> Result<SatVerdict<Witness>> {
    let lang = system.language().clone();
    single_agent(phi, &lang)?;
    let pool: Vec<GroundTerm> = match &opts.pool {
        Some(p) => {
            for t in p {
                if !lang.is_base_term(t) {
                    return Err(Error::ObservationNotBase(t.to_string()));
                }
            }
            p.iter().cloned().collect()
        }
        None => default_pool(phi, &lang).into_iter().collect(),
    };
    let max_obs = opts.max_obs.unwrap_or(pool.len()).min(pool.len());
    let tilde = translate_tilde(phi);
    let mut atoms = tilde.body.atoms();
    for fr in &tilde.frames {
        atoms.extend(fr.atoms());
    }

    let mut found = None;
    for size in 0..=max_obs {
        let hit = subsets_of_size(&pool, size, &mut |obs| {
            let gamma: Vec<Term> = obs.iter().map(|t| lang.ob_term(1, t).into_term()).collect();
            let mut fixed = BTreeMap::new();
            for a in &atoms {
                match a {
                    ModalAtom::Obs(_, t) => {
                        fixed.insert(a.clone(), obs.iter().any(|o| o.as_term() == t));
                    }
                    ModalAtom::XKnow(_, psi) => {
                        let goal = psi.to_ground_term(&lang)?;
                        let v = match derive(system, &gamma, &goal, opts.strategy)? {
                            Verdict::Derivable(_) => true,
                            Verdict::NotDerivable => false,
                            Verdict::Unknown => return Err(Error::StrategyEscalation(goal.to_string())),
                        };
                        fixed.insert(a.clone(), v);
                    }
                    _ => {}
                }
            }
            if let Some(model) = solve_s5(&tilde.body, &fixed)? {
                found = Some((obs.to_vec(), model));
                return Ok(true);
            }
            Ok(false)
        })?;
        if hit {
            break;
        }
    }

    match found {
        Some((obs, model)) => {
            let mut states = states_from(&model, 1);
            for st in &mut states {
                st.obs[0] = obs.iter().cloned().collect();
            }
            let structure = Structure::new(lang, vec![system.clone()], states, false)?;
            replay(structure, "w1", phi, opts.strategy).map(SatVerdict::Sat)
        }
        None if max_obs == pool.len() => Ok(SatVerdict::Unsat),
        None => Ok(SatVerdict::UnknownAtBound(format!(
            "no model observing at most {max_obs} of {} pool terms",
            pool.len()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::presets::load_preset;

    fn lang() -> Language {
        Language::new(Signature::from_symbols([("p", 0), ("q", 0), ("f", 1)]).unwrap(), 1).unwrap()
    }

    fn general(text: &str) -> SatVerdict<Witness> {
        let l = lang();
        sat_general(&parse_formula(text, &l).unwrap(), &l).unwrap()
    }

    #[test]
    fn explicit_knowledge_cases() {
        assert!(general("X p & !X p").is_unsat());
        assert!(general("!(X p => X X p)").is_sat());
        assert!(general("X p & !K p").is_sat());
        assert!(general("X p & !p").is_sat());
        assert!(general("!(Ob(p) => X Ob(p))").is_unsat());
        assert!(general("!(Ob(p) => K Ob(p))").is_unsat());
        assert!(general("!(X p => K X p)").is_unsat());
        assert!(general("!(!X p => K !X p)").is_unsat());
        assert!(general("!Ob(p) & !K !Ob(p)").is_unsat());
        assert!(general("Ob(p) & !Ob(q) & X f(q)").is_sat());
    }

    #[test]
    fn witness_shape() {
        let SatVerdict::Sat(w) = general("X p & !K p") else { panic!() };
        let st = w.structure.state(&w.state).unwrap();
        assert!(st.obs[0].contains(&GroundTerm::constant("tag")));
        assert_eq!(w.structure.system(1).rules().len(), 1);
        assert_eq!(w.structure.system(1).rules()[0].to_string(), "ob(tag) -> p");
        assert!(w.structure.states().len() <= 3);
    }

    #[test]
    fn rejects_multi_agent_and_templates() {
        let l = Language::new(Signature::from_symbols([("p", 0)]).unwrap(), 2).unwrap();
        let phi = parse_formula("K2 p", &l).unwrap();
        assert!(matches!(sat_general(&phi, &l), Err(Error::Unsupported(_))));
        let t = Formula::atom(Term::var("x"));
        assert!(matches!(sat_general(&t, &lang()), Err(Error::NotGround(_))));
    }

    #[test]
    fn fixed_dolev_yao() {
        let (_, dyp) = load_preset("DY_PRIME").unwrap();
        let l = dyp.language().clone();
        let opts = FixedDOptions::default();
        let phi = parse_formula("Ob(recv(encr(m,k1))) & X has(m)", &l).unwrap();
        assert!(sat_fixed_d(&phi, &dyp, &opts).unwrap().is_unsat());
        let phi = parse_formula("Ob(recv(encr(m,k1))) & Ob(recv(inv(k1))) & X has(m)", &l).unwrap();
        let SatVerdict::Sat(w) = sat_fixed_d(&phi, &dyp, &opts).unwrap() else { panic!() };
        assert_eq!(w.structure.state(&w.state).unwrap().obs[0].len(), 2);
        let phi = parse_formula("X has(m) & !has(m)", &l).unwrap();
        let opts = FixedDOptions {
            max_obs: Some(0),
            ..FixedDOptions::default()
        };
        assert!(matches!(
            sat_fixed_d(&phi, &dyp, &opts).unwrap(),
            SatVerdict::UnknownAtBound(_)
        ));
        let opts = FixedDOptions {
            pool: Some(BTreeSet::from([l.base().parse_ground("recv(m)").unwrap()])),
            ..FixedDOptions::default()
        };
        assert!(sat_fixed_d(&phi, &dyp, &opts).unwrap().is_sat());
    }
}
