// SPDX-License-Identifier: Apache-2.0

//! Satisfiability for single-agent S5 by guessing the truth of every boxed
//! subformula and keeping the largest set of worlds consistent with the guesses.

use std::collections::{BTreeMap, HashMap};

use super::circuit::{and_into, first_common, intersects, is_zero, Circuit, NodeId, Tables};
use super::{Modal, ModalAtom, SatVerdict};
use crate::error::{Error, Result};

/// Above this many free atoms the solver searches assignments instead of building
/// truth tables.
const TABLE_LIMIT: usize = 12;

/// A finite S5 model with the universal relation. World 0 is the designated one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct S5Model {
    atoms: Vec<ModalAtom>,
    worlds: Vec<Vec<bool>>,
}

impl S5Model {
    pub fn atoms(&self) -> &[ModalAtom] {
        &self.atoms
    }

    /// Valuations indexed like [`S5Model::atoms`].
    pub fn worlds(&self) -> &[Vec<bool>] {
        &self.worlds
    }

    /// Value of `atom` at `world`; atoms outside the model are false.
    pub fn value(&self, world: usize, atom: &ModalAtom) -> bool {
        self.atoms
            .iter()
            .position(|a| a == atom)
            .is_some_and(|k| self.worlds[world][k])
    }

    /// Truth of `m` at the designated world.
    pub fn holds(&self, m: &Modal) -> bool {
        self.eval(m)[0]
    }

    fn eval(&self, m: &Modal) -> Vec<bool> {
        let n = self.worlds.len();
        match m {
            Modal::Atom(a) => (0..n).map(|w| self.value(w, a)).collect(),
            Modal::Not(a) => self.eval(a).into_iter().map(|x| !x).collect(),
            Modal::And(a, b) => self.eval(a).into_iter().zip(self.eval(b)).map(|(x, y)| x && y).collect(),
            Modal::Implies(a, b) => self.eval(a).into_iter().zip(self.eval(b)).map(|(x, y)| !x || y).collect(),
            Modal::Iff(a, b) => self.eval(a).into_iter().zip(self.eval(b)).map(|(x, y)| x == y).collect(),
            Modal::Know(_, a) => vec![self.eval(a).into_iter().all(|x| x); n],
        }
    }
}

struct Compiled {
    circuit: Circuit,
    vars: Vec<ModalAtom>,
    var_index: HashMap<ModalAtom, usize>,
    /// Body of each box; inner boxes come first.
    bodies: Vec<NodeId>,
    negated: Vec<NodeId>,
    box_of_body: HashMap<NodeId, usize>,
    fixed: BTreeMap<ModalAtom, bool>,
}

impl Compiled {
    fn node(&mut self, m: &Modal) -> Result<NodeId> {
        Ok(match m {
            Modal::Atom(a) => match self.fixed.get(a) {
                Some(&b) => self.circuit.constant(b),
                None => {
                    let next = self.vars.len();
                    let v = *self.var_index.entry(a.clone()).or_insert(next);
                    if v == next {
                        self.vars.push(a.clone());
                    }
                    self.circuit.var(v)
                }
            },
            Modal::Not(a) => {
                let a = self.node(a)?;
                self.circuit.not(a)
            }
            Modal::And(a, b) => {
                let (a, b) = (self.node(a)?, self.node(b)?);
                self.circuit.and(a, b)
            }
            Modal::Implies(a, b) => {
                let (a, b) = (self.node(a)?, self.node(b)?);
                self.circuit.implies(a, b)
            }
            Modal::Iff(a, b) => {
                let (a, b) = (self.node(a)?, self.node(b)?);
                self.circuit.iff(a, b)
            }
            Modal::Know(i, a) => {
                if *i != 1 {
                    return Err(Error::Unsupported(format!(
                        "the S5 procedure handles a single agent, found K{i}"
                    )));
                }
                let body = self.node(a)?;
                let next = self.bodies.len();
                let j = *self.box_of_body.entry(body).or_insert(next);
                if j == next {
                    self.bodies.push(body);
                    let neg = self.circuit.not(body);
                    self.negated.push(neg);
                }
                self.circuit.add(super::circuit::Node::Hole(j))
            }
        })
    }
}

/// Decide satisfiability of a single-agent modal formula in S5.
///
/// A satisfiable formula gets a model with at most one world more than it has
/// distinct boxed subformulas.
pub fn sat_s5(f: &Modal) -> Result<SatVerdict<S5Model>> {
    Ok(match solve_s5(f, &BTreeMap::new())? {
        Some(m) => SatVerdict::Sat(m),
        None => SatVerdict::Unsat,
    })
}

/// As [`sat_s5`], with some atoms held at the same value in every world.
pub(crate) fn solve_s5(f: &Modal, fixed: &BTreeMap<ModalAtom, bool>) -> Result<Option<S5Model>> {
    let mut c = Compiled {
        circuit: Circuit::new(),
        vars: Vec::new(),
        var_index: HashMap::new(),
        bodies: Vec::new(),
        negated: Vec::new(),
        box_of_body: HashMap::new(),
        fixed: fixed.clone(),
    };
    let root = c.node(f)?;
    let top = c.circuit.constant(true);
    let nvars = c.vars.len();
    let worlds = if nvars <= TABLE_LIMIT {
        TableSearch::new(&c, root).run(top)
    } else {
        AssignSearch::new(&c, root).run()
    };
    Ok(worlds.map(|mut worlds| {
        let mut atoms = c.vars.clone();
        for (a, &b) in fixed {
            if !c.var_index.contains_key(a) {
                atoms.push(a.clone());
                for w in &mut worlds {
                    w.push(b);
                }
            }
        }
        let mut unique: Vec<Vec<bool>> = Vec::new();
        for w in worlds {
            if !unique.contains(&w) {
                unique.push(w);
            }
        }
        S5Model { atoms, worlds: unique }
    }))
}

fn decode(index: usize, vars: usize) -> Vec<bool> {
    (0..vars).map(|i| (index >> i) & 1 == 1).collect()
}

struct TableSearch<'a> {
    c: &'a Compiled,
    root: NodeId,
    holes: Vec<bool>,
    scratch: Tables,
    /// Negated bodies of the boxes guessed false.
    falses: Vec<Vec<u64>>,
}

impl<'a> TableSearch<'a> {
    fn new(c: &'a Compiled, root: NodeId) -> Self {
        TableSearch {
            c,
            root,
            holes: vec![false; c.bodies.len()],
            scratch: Tables::default(),
            falses: Vec::new(),
        }
    }

    fn table(&mut self, node: NodeId) -> Vec<u64> {
        let cone = self.c.circuit.cone(node);
        self.c.circuit.table(&cone, self.c.vars.len(), &self.holes, &mut self.scratch)
    }

    fn run(mut self, top: NodeId) -> Option<Vec<Vec<bool>>> {
        let all = self.table(top);
        self.dfs(0, all)
    }

    fn dfs(&mut self, j: usize, w: Vec<u64>) -> Option<Vec<Vec<bool>>> {
        let nvars = self.c.vars.len();
        if j == self.c.bodies.len() {
            let r = self.table(self.root);
            let mut worlds = vec![decode(first_common(&w, &r)?, nvars)];
            for nb in &self.falses {
                worlds.push(decode(first_common(&w, nb)?, nvars));
            }
            return Some(worlds);
        }
        let body = self.table(self.c.bodies[j]);
        let mut narrowed = w.clone();
        and_into(&mut narrowed, &body);
        if !is_zero(&narrowed) && self.falses.iter().all(|nb| intersects(&narrowed, nb)) {
            self.holes[j] = true;
            if let Some(found) = self.dfs(j + 1, narrowed) {
                return Some(found);
            }
        }
        self.holes[j] = false;
        let neg = self.table(self.c.negated[j]);
        if intersects(&w, &neg) {
            self.falses.push(neg);
            if let Some(found) = self.dfs(j + 1, w) {
                return Some(found);
            }
            self.falses.pop();
        }
        None
    }
}

struct AssignSearch<'a> {
    c: &'a Compiled,
    root: NodeId,
    holes: Vec<bool>,
    trues: Vec<NodeId>,
    falses: Vec<NodeId>,
}

impl<'a> AssignSearch<'a> {
    fn new(c: &'a Compiled, root: NodeId) -> Self {
        AssignSearch {
            c,
            root,
            holes: vec![false; c.bodies.len()],
            trues: Vec::new(),
            falses: Vec::new(),
        }
    }

    fn find(&self, extra: Option<NodeId>) -> Option<Vec<bool>> {
        let mut roots = self.trues.clone();
        roots.extend(extra);
        if roots.is_empty() {
            return Some(vec![false; self.c.vars.len()]);
        }
        self.c.circuit.solve(&roots, self.c.vars.len(), &self.holes)
    }

    fn run(mut self) -> Option<Vec<Vec<bool>>> {
        self.dfs(0)
    }

    fn dfs(&mut self, j: usize) -> Option<Vec<Vec<bool>>> {
        if j == self.c.bodies.len() {
            let mut worlds = vec![self.find(Some(self.root))?];
            for &nb in &self.falses {
                worlds.push(self.find(Some(nb))?);
            }
            return Some(worlds);
        }
        self.holes[j] = true;
        self.trues.push(self.c.bodies[j]);
        if self.find(None).is_some() && self.falses.iter().all(|&nb| self.find(Some(nb)).is_some()) {
            if let Some(found) = self.dfs(j + 1) {
                return Some(found);
            }
        }
        self.trues.pop();
        self.holes[j] = false;
        let neg = self.c.negated[j];
        if self.find(Some(neg)).is_some() {
            self.falses.push(neg);
            if let Some(found) = self.dfs(j + 1) {
                return Some(found);
            }
            self.falses.pop();
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(k: usize) -> Modal {
        Modal::plain(k)
    }

    fn k(m: Modal) -> Modal {
        Modal::know(1, m)
    }

    fn sat(m: &Modal) -> Option<S5Model> {
        match sat_s5(m).unwrap() {
            SatVerdict::Sat(w) => {
                assert!(w.holds(m), "model does not satisfy {m}");
                Some(w)
            }
            SatVerdict::Unsat => None,
            SatVerdict::UnknownAtBound(_) => panic!("complete procedure"),
        }
    }

    #[test]
    fn textbook_cases() {
        assert!(sat(&Modal::and(p(1), Modal::not(p(1)))).is_none());
        assert!(sat(&Modal::not(Modal::implies(k(p(1)), p(1)))).is_none());
        let m = sat(&Modal::and(p(1), Modal::not(k(p(1))))).unwrap();
        assert_eq!(m.worlds().len(), 2);
        // 5: !K p => K !K p
        let five = Modal::implies(Modal::not(k(p(1))), k(Modal::not(k(p(1)))));
        assert!(sat(&Modal::not(five)).is_none());
        let four = Modal::implies(k(p(1)), k(k(p(1))));
        assert!(sat(&Modal::not(four)).is_none());
        let kd = Modal::implies(k(Modal::implies(p(1), p(2))), Modal::implies(k(p(1)), k(p(2))));
        assert!(sat(&Modal::not(kd)).is_none());
    }

    #[test]
    fn world_bound() {
        // three independent possibilities need three extra worlds
        let f = [1, 2, 3]
            .into_iter()
            .map(|i| Modal::not(k(Modal::not(Modal::and(p(i), Modal::and(p(i % 3 + 1), Modal::not(p((i + 1) % 3 + 1))))))))
            .reduce(Modal::and)
            .unwrap();
        let m = sat(&f).unwrap();
        assert!(m.worlds().len() <= 4);
    }

    #[test]
    fn many_atoms_use_search() {
        let mut f = p(1);
        for i in 2..=16 {
            f = Modal::and(f, Modal::implies(p(i - 1), p(i)));
        }
        let f = Modal::and(f, Modal::not(k(p(16))));
        let m = sat(&f).unwrap();
        assert_eq!(m.worlds().len(), 2);
        let g = Modal::and(k(f.clone()), Modal::not(p(16)));
        assert!(sat(&g).is_none());
    }

    #[test]
    fn rejects_other_agents() {
        assert!(matches!(sat_s5(&Modal::know(2, p(1))), Err(Error::Unsupported(_))));
    }

    #[test]
    fn fixed_atoms_are_uniform() {
        let f = Modal::and(p(1), Modal::not(k(p(2))));
        let fixed = BTreeMap::from([(ModalAtom::Plain(2), true)]);
        assert!(solve_s5(&f, &fixed).unwrap().is_none());
        let fixed = BTreeMap::from([(ModalAtom::Plain(2), false)]);
        let m = solve_s5(&f, &fixed).unwrap().unwrap();
        assert!(m.holds(&f));
        assert!(!m.value(0, &ModalAtom::Plain(2)));
    }
}
