// SPDX-License-Identifier: Apache-2.0

//! Deductive algorithmic knowledge structures and the satisfaction relation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Mutex;

use crate::deduction::{derive, DeductiveSystem, Strategy, Verdict};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::language::Language;
use crate::presets::{load_preset, subterm_rel};
use crate::term::{GroundTerm, Term};

/// Three-valued truth; `Unknown` only arises from a bounded deduction strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    pub fn from_bool(b: bool) -> Truth {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    pub fn to_bool(self) -> Option<bool> {
        match self {
            Truth::True => Some(true),
            Truth::False => Some(false),
            Truth::Unknown => None,
        }
    }

    pub fn is_true(self) -> bool {
        self == Truth::True
    }

    pub fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        }
    }
}

impl std::ops::Not for Truth {
    type Output = Truth;
    fn not(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
        }
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth::True => "true",
            Truth::False => "false",
            Truth::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct State {
    pub name: String,
    pub env: String,
    /// Observations of agents `1..=n`, at positions `0..n`.
    pub obs: Vec<BTreeSet<GroundTerm>>,
    /// Primitive propositions true at this state; all others are false.
    pub truths: BTreeSet<GroundTerm>,
}

impl State {
    pub fn new(name: &str, agents: usize) -> State {
        State {
            name: name.to_string(),
            env: name.to_string(),
            obs: vec![BTreeSet::new(); agents],
            truths: BTreeSet::new(),
        }
    }

    pub fn observations(&self, agent: usize) -> &BTreeSet<GroundTerm> {
        &self.obs[agent - 1]
    }
}

type MemoKey = (usize, usize, GroundTerm);

pub struct Structure {
    language: Language,
    systems: Vec<DeductiveSystem>,
    states: Vec<State>,
    reliable_obs: bool,
    /// `class_of[i][s]`: equivalence class of state `s` for agent `i + 1`.
    class_of: Vec<Vec<usize>>,
    members: Vec<Vec<Vec<usize>>>,
    memo: Mutex<HashMap<MemoKey, Truth>>,
}

impl Clone for Structure {
    fn clone(&self) -> Self {
        Structure {
            language: self.language.clone(),
            systems: self.systems.clone(),
            states: self.states.clone(),
            reliable_obs: self.reliable_obs,
            class_of: self.class_of.clone(),
            members: self.members.clone(),
            memo: Mutex::new(HashMap::new()),
        }
    }
}

impl fmt::Debug for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Structure")
            .field("language", &self.language)
            .field("systems", &self.systems)
            .field("states", &self.states)
            .field("reliable_obs", &self.reliable_obs)
            .finish()
    }
}

impl Structure {
    /// Build and validate a structure. The language is widened with the base symbols
    /// of the agents' systems, and every system is moved onto that language.
    pub fn new(language: Language, systems: Vec<DeductiveSystem>, states: Vec<State>, reliable_obs: bool) -> Result<Self> {
        let agents = language.agents();
        if systems.len() != agents {
            return Err(Error::AgentOutOfRange {
                agent: systems.len(),
                agents,
            });
        }
        let mut language = language;
        for d in &systems {
            if d.agents() > agents {
                return Err(Error::AgentOutOfRange {
                    agent: d.agents(),
                    agents,
                });
            }
            language = language.extend_base(d.language().base())?;
        }
        let systems = systems
            .iter()
            .map(|d| d.with_language(language.clone()))
            .collect::<Result<Vec<_>>>()?;

        let mut names = BTreeSet::new();
        for s in &states {
            if !names.insert(s.name.as_str()) {
                return Err(Error::DuplicateState(s.name.clone()));
            }
            if s.obs.len() != agents {
                return Err(Error::AgentOutOfRange {
                    agent: s.obs.len(),
                    agents,
                });
            }
            for t in s.obs.iter().flatten() {
                language.full().check_term(t)?;
                if !language.is_base_term(t) {
                    return Err(Error::ObservationNotBase(t.to_string()));
                }
                if reliable_obs && !s.truths.contains(t) {
                    return Err(Error::UnreliableObservation {
                        state: s.name.clone(),
                        term: t.to_string(),
                    });
                }
            }
            for t in &s.truths {
                language.full().check_term(t)?;
                if t.head().is_some_and(|h| language.ctor(h).is_some()) {
                    return Err(Error::ReservedAtom(t.to_string()));
                }
            }
        }

        let mut class_of = Vec::new();
        let mut members = Vec::new();
        for i in 0..agents {
            let mut ids: BTreeMap<&BTreeSet<GroundTerm>, usize> = BTreeMap::new();
            let mut of = Vec::with_capacity(states.len());
            let mut mem: Vec<Vec<usize>> = Vec::new();
            for (si, s) in states.iter().enumerate() {
                let next = ids.len();
                let c = *ids.entry(&s.obs[i]).or_insert(next);
                if c == mem.len() {
                    mem.push(Vec::new());
                }
                mem[c].push(si);
                of.push(c);
            }
            class_of.push(of);
            members.push(mem);
        }

        Ok(Structure {
            language,
            systems,
            states,
            reliable_obs,
            class_of,
            members,
            memo: Mutex::new(HashMap::new()),
        })
    }

    pub fn language(&self) -> &Language {
        &self.language
    }

    pub fn agents(&self) -> usize {
        self.language.agents()
    }

    pub fn system(&self, agent: usize) -> &DeductiveSystem {
        &self.systems[agent - 1]
    }

    pub fn systems(&self) -> &[DeductiveSystem] {
        &self.systems
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn reliable_obs(&self) -> bool {
        self.reliable_obs
    }

    pub fn state_index(&self, name: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn state(&self, name: &str) -> Result<&State> {
        Ok(&self.states[self.state_index(name)?])
    }

    /// `s ∼_i s'`: agent `i` has the same observations at both states.
    pub fn indistinguishable(&self, agent: usize, s: usize, t: usize) -> bool {
        self.class_of[agent - 1][s] == self.class_of[agent - 1][t]
    }

    pub fn check(&self, state: &str, phi: &Formula, strategy: Strategy) -> Result<Truth> {
        let s = self.state_index(state)?;
        Ok(self.label(phi, strategy)?[s])
    }

    pub fn valid_in(&self, phi: &Formula, strategy: Strategy) -> Result<Truth> {
        Ok(self.label(phi, strategy)?.into_iter().fold(Truth::True, Truth::and))
    }

    /// Truth value of `phi` at every state, in state order.
    pub fn label(&self, phi: &Formula, strategy: Strategy) -> Result<Vec<Truth>> {
        phi.validate(&self.language)?;
        if !phi.is_ground() {
            return Err(Error::NotGround(phi.to_string()));
        }
        self.eval(phi, strategy)
    }

    fn eval(&self, phi: &Formula, strategy: Strategy) -> Result<Vec<Truth>> {
        Ok(match phi {
            Formula::Atom(t) => {
                let t = GroundTerm::new(t.clone())?;
                self.states.iter().map(|s| Truth::from_bool(s.truths.contains(&t))).collect()
            }
            Formula::Obs(i, t) => {
                let t = GroundTerm::new(t.clone())?;
                self.states.iter().map(|s| Truth::from_bool(s.obs[i - 1].contains(&t))).collect()
            }
            Formula::Not(a) => self.eval(a, strategy)?.into_iter().map(|v| !v).collect(),
            Formula::And(a, b) => {
                let va = self.eval(a, strategy)?;
                let vb = self.eval(b, strategy)?;
                va.into_iter().zip(vb).map(|(x, y)| x.and(y)).collect()
            }
            Formula::Know(i, a) => {
                let va = self.eval(a, strategy)?;
                let per_class: Vec<Truth> = self.members[i - 1]
                    .iter()
                    .map(|m| m.iter().map(|&s| va[s]).fold(Truth::True, Truth::and))
                    .collect();
                self.class_of[i - 1].iter().map(|&c| per_class[c]).collect()
            }
            Formula::XKnow(i, a) => {
                let goal = a.to_ground_term(&self.language)?;
                let mut per_class = Vec::with_capacity(self.members[i - 1].len());
                for (c, m) in self.members[i - 1].iter().enumerate() {
                    per_class.push(self.explicit(*i, c, m[0], &goal, strategy)?);
                }
                self.class_of[i - 1].iter().map(|&c| per_class[c]).collect()
            }
        })
    }

    fn explicit(&self, agent: usize, class: usize, rep: usize, goal: &GroundTerm, strategy: Strategy) -> Result<Truth> {
        let key = (agent, class, goal.clone());
        if let Some(&v) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(v);
        }
        let gamma: Vec<Term> = self.states[rep].obs[agent - 1]
            .iter()
            .map(|p| self.language.ob_term(agent, p).into_term())
            .collect();
        let v = match derive(&self.systems[agent - 1], &gamma, goal, strategy)? {
            Verdict::Derivable(_) => Truth::True,
            Verdict::NotDerivable => Truth::False,
            Verdict::Unknown => Truth::Unknown,
        };
        self.memo.lock().expect("memo lock").insert(key, v);
        Ok(v)
    }
}

/// The Dolev-Yao structure: one state per intercept set, `has(t)` true exactly for the
/// parts `t` of intercepted messages, adversary running `DY_PRIME`.
pub fn build_dy_model(intercepts: &[Vec<GroundTerm>]) -> Result<Structure> {
    let (sig, system) = load_preset("DY_PRIME")?;
    let lang = Language::new(sig, 1)?;
    let mut states = Vec::new();
    for (k, terms) in intercepts.iter().enumerate() {
        let mut st = State::new(&format!("s{}", k + 1), 1);
        for t in terms {
            let msg = match t.as_term() {
                Term::App(f, args) if &**f == "recv" && args.len() == 1 => GroundTerm::new(args[0].clone())?,
                _ => return Err(Error::MalformedIntercept(t.to_string())),
            };
            if msg.any_symbol(&|s| s == "has") || !lang.is_base_term(t) {
                return Err(Error::MalformedIntercept(t.to_string()));
            }
            lang.full().check_term(t)?;
            for part in msg.ground_subterms() {
                if subterm_rel(&part, &msg) {
                    st.truths.insert(GroundTerm::app("has", vec![part]));
                }
            }
            st.obs[0].insert(t.clone());
        }
        states.push(st);
    }
    Structure::new(lang, vec![system], states, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn example() -> Structure {
        let (sig, _) = load_preset("DY").unwrap();
        let g = |s: &str| sig.parse_ground(s).unwrap();
        build_dy_model(&[
            vec![g("recv(encr(m,k1))"), g("recv(encr(inv(k1),k2))")],
            vec![g("recv(encr(m,k1))"), g("recv(encr(inv(k1),k2))"), g("recv(inv(k2))")],
        ])
        .unwrap()
    }

    fn check(m: &Structure, s: &str, f: &str) -> Truth {
        let phi = parse_formula(f, m.language()).unwrap();
        m.check(s, &phi, Strategy::Local).unwrap()
    }

    #[test]
    fn dolev_yao_knowledge() {
        let m = example();
        assert_eq!(check(&m, "s1", "K has(m)"), Truth::True);
        assert_eq!(check(&m, "s2", "K has(m)"), Truth::True);
        assert_eq!(check(&m, "s2", "X has(m)"), Truth::True);
        assert_eq!(check(&m, "s1", "X has(m)"), Truth::False);
        assert_eq!(check(&m, "s1", "Ob(recv(encr(m,k1)))"), Truth::True);
        let phi = parse_formula("X has(m) => K has(m)", m.language()).unwrap();
        assert_eq!(m.valid_in(&phi, Strategy::Local).unwrap(), Truth::True);
        let phi = parse_formula("X has(m)", m.language()).unwrap();
        assert_eq!(m.valid_in(&phi, Strategy::Local).unwrap(), Truth::False);
        let phi = parse_formula("true", m.language()).unwrap();
        assert_eq!(m.valid_in(&phi, Strategy::Local).unwrap(), Truth::True);
    }

    #[test]
    fn dy_valuation() {
        let (sig, _) = load_preset("DY").unwrap();
        let g = |s: &str| sig.parse_ground(s).unwrap();
        let m = build_dy_model(&[vec![], vec![g("recv(conc(m,k1))")]]).unwrap();
        assert!(m.state("s1").unwrap().truths.is_empty());
        assert!(m.state("s2").unwrap().truths.contains(&g("has(m)")));
        assert!(m.state("s2").unwrap().truths.contains(&g("has(conc(m,k1))")));
        assert!(matches!(
            build_dy_model(&[vec![g("has(m)")]]),
            Err(Error::MalformedIntercept(_))
        ));
        assert!(matches!(
            build_dy_model(&[vec![g("recv(has(m))")]]),
            Err(Error::MalformedIntercept(_))
        ));
    }

    #[test]
    fn unknown_state_and_reliability() {
        let m = example();
        let phi = parse_formula("p", m.language()).err();
        assert!(phi.is_some());
        let f = parse_formula("has(m)", m.language()).unwrap();
        assert!(matches!(m.check("s9", &f, Strategy::Local), Err(Error::UnknownState(_))));

        let lang = m.language().clone();
        let mut st = State::new("a", 1);
        st.obs[0].insert(lang.base().parse_ground("m").unwrap());
        let err = Structure::new(lang, vec![m.system(1).clone()], vec![st], true).unwrap_err();
        assert!(matches!(err, Error::UnreliableObservation { .. }));
    }

    #[test]
    fn kleene_connectives() {
        assert_eq!(Truth::Unknown.and(Truth::False), Truth::False);
        assert_eq!(Truth::Unknown.and(Truth::True), Truth::Unknown);
        assert_eq!(!Truth::Unknown, Truth::Unknown);
    }
}
