// SPDX-License-Identifier: Apache-2.0

//! Bounded model search for formulas with several agents.

use std::collections::{BTreeMap, BTreeSet};

use super::circuit::{Circuit, NodeId};
use super::general::replay;
use super::{fresh_symbol, translate_tilde, Modal, ModalAtom, SatVerdict, Witness};
use crate::deduction::{DeductiveSystem, Rule, Strategy};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::language::Language;
use crate::model::{State, Structure};
use crate::term::{GroundTerm, Signature};

/// Every partition of `0..n` as a restricted growth string.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn go(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let next = cur.iter().max().map_or(0, |m| m + 1);
        for c in 0..=next {
            cur.push(c);
            go(n, cur, out);
            cur.pop();
        }
    }
    go(n, &mut cur, &mut out);
    out
}

struct Unfold<'a> {
    circuit: Circuit,
    atoms: &'a BTreeMap<ModalAtom, usize>,
    /// `classes[i][w]`: class of world `w` for agent `i + 1`.
    classes: &'a [Vec<usize>],
}

impl Unfold<'_> {
    fn at(&mut self, m: &Modal, w: usize) -> NodeId {
        match m {
            Modal::Atom(a) => {
                let v = w * self.atoms.len() + self.atoms[a];
                self.circuit.var(v)
            }
            Modal::Not(a) => {
                let a = self.at(a, w);
                self.circuit.not(a)
            }
            Modal::And(a, b) => {
                let (a, b) = (self.at(a, w), self.at(b, w));
                self.circuit.and(a, b)
            }
            Modal::Implies(a, b) => {
                let (a, b) = (self.at(a, w), self.at(b, w));
                self.circuit.implies(a, b)
            }
            Modal::Iff(a, b) => {
                let (a, b) = (self.at(a, w), self.at(b, w));
                self.circuit.iff(a, b)
            }
            Modal::Know(i, a) => {
                let part = &self.classes[i - 1];
                let peers: Vec<usize> = (0..part.len()).filter(|&v| part[v] == part[w]).collect();
                let nodes: Vec<NodeId> = peers.into_iter().map(|v| self.at(a, v)).collect();
                self.circuit.and_all(nodes)
            }
        }
    }
}

/// Look for a model of a ground formula with at most `max_states` states.
///
/// Failing to find one is reported as `UnknownAtBound`: larger models may exist.
pub fn sat_multi(phi: &Formula, lang: &Language, max_states: usize) -> Result<SatVerdict<Witness>> {
    phi.validate(lang)?;
    if !phi.is_ground() {
        return Err(Error::NotGround(phi.to_string()));
    }
    let agents = lang.agents();
    let tilde = translate_tilde(phi);
    let mut all = tilde.body.atoms();
    for f in &tilde.frames {
        all.extend(f.atoms());
    }
    let atoms: BTreeMap<ModalAtom, usize> = all.into_iter().enumerate().map(|(k, a)| (a, k)).collect();

    for n in 1..=max_states {
        let parts = partitions(n);
        let mut choice = vec![0usize; agents];
        loop {
            let classes: Vec<Vec<usize>> = choice.iter().map(|&c| parts[c].clone()).collect();
            let mut u = Unfold {
                circuit: Circuit::new(),
                atoms: &atoms,
                classes: &classes,
            };
            let mut roots = vec![u.at(&tilde.body, 0)];
            for w in 0..n {
                for f in &tilde.frames {
                    roots.push(u.at(f, w));
                }
            }
            if let Some(assign) = u.circuit.solve(&roots, n * atoms.len(), &[]) {
                return witness(phi, lang, &atoms, &classes, &assign).map(SatVerdict::Sat);
            }
            // next tuple of partitions
            let mut k = 0;
            while k < agents {
                choice[k] += 1;
                if choice[k] < parts.len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == agents {
                break;
            }
        }
    }
    Ok(SatVerdict::UnknownAtBound(format!("no model with at most {max_states} states")))
}

fn witness(
    phi: &Formula,
    lang: &Language,
    atoms: &BTreeMap<ModalAtom, usize>,
    classes: &[Vec<usize>],
    assign: &[bool],
) -> Result<Witness> {
    let agents = lang.agents();
    let n = classes.first().map_or(1, Vec::len);
    let value = |a: &ModalAtom, w: usize| assign[w * atoms.len() + atoms[a]];

    let mut used = lang.full().clone();
    let mut extra = Signature::new();
    let mut tags: Vec<Vec<GroundTerm>> = Vec::new();
    for (i, part) in classes.iter().enumerate() {
        let count = part.iter().max().map_or(0, |m| m + 1);
        let mut per = Vec::new();
        for c in 0..count {
            let name = fresh_symbol(&used, &format!("tag{}c{}", i + 1, c + 1));
            used.declare(&name, 0)?;
            extra.declare(&name, 0)?;
            per.push(GroundTerm::constant(&name));
        }
        tags.push(per);
    }
    let wl = lang.extend_base(&extra)?;

    let mut states: Vec<State> = (0..n).map(|w| State::new(&format!("w{}", w + 1), agents)).collect();
    let mut rules: Vec<Vec<Rule>> = vec![Vec::new(); agents];
    for (w, st) in states.iter_mut().enumerate() {
        for i in 0..agents {
            st.obs[i].insert(tags[i][classes[i][w]].clone());
        }
        for a in atoms.keys() {
            if !value(a, w) {
                continue;
            }
            match a {
                ModalAtom::Term(t) => {
                    st.truths.insert(GroundTerm::new(t.clone())?);
                }
                ModalAtom::Obs(i, t) => {
                    st.obs[i - 1].insert(GroundTerm::new(t.clone())?);
                }
                _ => {}
            }
        }
    }
    for (i, part) in classes.iter().enumerate() {
        let mut seen = BTreeSet::new();
        for (w, &c) in part.iter().enumerate() {
            if !seen.insert(c) {
                continue;
            }
            let premise = wl.ob_term(i + 1, &tags[i][c]).into_term();
            for a in atoms.keys() {
                if let ModalAtom::XKnow(j, psi) = a {
                    if *j == i + 1 && value(a, w) {
                        rules[i].push(Rule::new(vec![premise.clone()], psi.to_term(&wl)));
                    }
                }
            }
        }
    }
    let systems = rules
        .into_iter()
        .map(|r| DeductiveSystem::new(wl.clone(), r))
        .collect::<Result<Vec<_>>>()?;
    let structure = Structure::new(wl, systems, states, false)?;
    replay(structure, "w1", phi, Strategy::Local)
}
