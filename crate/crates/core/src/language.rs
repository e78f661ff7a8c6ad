// SPDX-License-Identifier: Apache-2.0

//! A base signature together with the reserved logical constructors for `n` agents.
//!
//! With one agent the constructors are `ob`, `know`, `xknow`; with several they carry
//! an agent suffix (`ob_1`, `know_2`, ...). `true`, `false`, `not` and `and` are shared.

use std::fmt;

use crate::error::{Error, Result};
use crate::term::{GroundTerm, Signature, Term};

/// A reserved constructor of the extended signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ctor {
    True,
    False,
    Not,
    And,
    Ob(usize),
    Know(usize),
    XKnow(usize),
}

impl Ctor {
    pub fn arity(self) -> usize {
        match self {
            Ctor::True | Ctor::False => 0,
            Ctor::And => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Language {
    base: Signature,
    full: Signature,
    agents: usize,
}

fn suffixed(stem: &str, agent: usize, agents: usize) -> String {
    if agents == 1 {
        stem.to_string()
    } else {
        format!("{stem}_{agent}")
    }
}

/// True for names that look like logical constructors or formula keywords, for any agent count.
pub fn is_reserved_name(name: &str) -> bool {
    if matches!(name, "true" | "false" | "not" | "and" | "L") {
        return true;
    }
    for stem in ["ob", "know", "xknow"] {
        if let Some(rest) = name.strip_prefix(stem) {
            if rest.is_empty() || rest.strip_prefix('_').is_some_and(is_digits) {
                return true;
            }
        }
    }
    for stem in ["K", "X", "Ob"] {
        if let Some(rest) = name.strip_prefix(stem) {
            if rest.is_empty() || is_digits(rest) {
                return true;
            }
        }
    }
    false
}

fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

impl Language {
    pub fn new(base: Signature, agents: usize) -> Result<Self> {
        if agents == 0 {
            return Err(Error::AgentOutOfRange { agent: 0, agents: 0 });
        }
        if let Some((name, _)) = base.iter().find(|(n, _)| is_reserved_name(n)) {
            return Err(Error::ReservedSymbol(name.to_string()));
        }
        let mut full = base.clone();
        for (name, arity) in [("true", 0), ("false", 0), ("not", 1), ("and", 2)] {
            full.declare(name, arity)?;
        }
        for i in 1..=agents {
            for stem in ["ob", "know", "xknow"] {
                full.declare(&suffixed(stem, i, agents), 1)?;
            }
        }
        Ok(Language { base, full, agents })
    }

    pub fn base(&self) -> &Signature {
        &self.base
    }

    /// The base signature extended with the reserved constructors.
    pub fn full(&self) -> &Signature {
        &self.full
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn check_agent(&self, agent: usize) -> Result<()> {
        if agent == 0 || agent > self.agents {
            Err(Error::AgentOutOfRange {
                agent,
                agents: self.agents,
            })
        } else {
            Ok(())
        }
    }

    pub fn name(&self, ctor: Ctor) -> String {
        match ctor {
            Ctor::True => "true".into(),
            Ctor::False => "false".into(),
            Ctor::Not => "not".into(),
            Ctor::And => "and".into(),
            Ctor::Ob(i) => suffixed("ob", i, self.agents),
            Ctor::Know(i) => suffixed("know", i, self.agents),
            Ctor::XKnow(i) => suffixed("xknow", i, self.agents),
        }
    }

    pub fn ctor(&self, name: &str) -> Option<Ctor> {
        match name {
            "true" => return Some(Ctor::True),
            "false" => return Some(Ctor::False),
            "not" => return Some(Ctor::Not),
            "and" => return Some(Ctor::And),
            _ => {}
        }
        let agent_of = |rest: &str| -> Option<usize> {
            if self.agents == 1 {
                rest.is_empty().then_some(1)
            } else {
                let i: usize = rest.strip_prefix('_').filter(|r| is_digits(r))?.parse().ok()?;
                (1..=self.agents).contains(&i).then_some(i)
            }
        };
        if let Some(rest) = name.strip_prefix("xknow") {
            return agent_of(rest).map(Ctor::XKnow);
        }
        if let Some(rest) = name.strip_prefix("know") {
            return agent_of(rest).map(Ctor::Know);
        }
        if let Some(rest) = name.strip_prefix("ob") {
            return agent_of(rest).map(Ctor::Ob);
        }
        None
    }

    pub fn is_base_term(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::App(f, args) => self.base.contains(f) && args.iter().all(|a| self.is_base_term(a)),
        }
    }

    pub fn mk(&self, ctor: Ctor, args: Vec<Term>) -> Term {
        debug_assert_eq!(args.len(), ctor.arity());
        Term::app(&self.name(ctor), args)
    }

    /// The lexicographically first base constant.
    pub fn first_constant(&self) -> Result<&str> {
        self.base.constants().next().ok_or(Error::NoConstant)
    }

    pub fn ob_term(&self, agent: usize, t: &GroundTerm) -> GroundTerm {
        GroundTerm::new(self.mk(Ctor::Ob(agent), vec![t.as_term().clone()])).expect("ground argument")
    }

    /// Renaming that moves single-agent constructor names to agent `agent` of this language.
    pub fn relabel_from_single(&self, agent: usize) -> impl Fn(&str) -> Option<String> + '_ {
        move |name: &str| match name {
            "ob" => Some(self.name(Ctor::Ob(agent))),
            "know" => Some(self.name(Ctor::Know(agent))),
            "xknow" => Some(self.name(Ctor::XKnow(agent))),
            _ => None,
        }
    }

    /// Same base, different agent count.
    pub fn with_agents(&self, agents: usize) -> Result<Language> {
        Language::new(self.base.clone(), agents)
    }

    /// Add base symbols.
    pub fn extend_base(&self, extra: &Signature) -> Result<Language> {
        let mut base = self.base.clone();
        base.merge(extra)?;
        Language::new(base, self.agents)
    }
}

impl fmt::Debug for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Language")
            .field("base", &self.base)
            .field("agents", &self.agents)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Signature {
        Signature::from_symbols([("has", 1), ("m", 0)]).unwrap()
    }

    #[test]
    fn single_agent_constructors() {
        let lang = Language::new(base(), 1).unwrap();
        assert_eq!(lang.full().arity("xknow"), Some(1));
        assert_eq!(lang.full().arity("and"), Some(2));
        assert_eq!(lang.full().arity("true"), Some(0));
        assert_eq!(lang.ctor("know"), Some(Ctor::Know(1)));
        assert_eq!(lang.ctor("know_1"), None);
        assert_eq!(lang.ctor("has"), None);
    }

    #[test]
    fn multi_agent_constructors() {
        let lang = Language::new(base(), 3).unwrap();
        assert_eq!(lang.name(Ctor::Ob(2)), "ob_2");
        assert_eq!(lang.ctor("xknow_3"), Some(Ctor::XKnow(3)));
        assert_eq!(lang.ctor("xknow_4"), None);
        assert!(!lang.full().contains("ob"));
        assert!(lang.check_agent(4).is_err());
    }

    #[test]
    fn collisions_are_rejected() {
        for bad in ["not", "ob", "know_2", "K", "X1", "Ob", "L", "true"] {
            let sig = Signature::from_symbols([(bad, 0)]).unwrap();
            assert_eq!(Language::new(sig, 1), Err(Error::ReservedSymbol(bad.into())), "{bad}");
        }
        for ok in ["obs", "knows", "Key", "Xa", "ob_x"] {
            let sig = Signature::from_symbols([(ok, 0)]).unwrap();
            assert!(Language::new(sig, 2).is_ok(), "{ok}");
        }
    }

    #[test]
    fn first_constant_is_lexicographic() {
        let sig = Signature::from_symbols([("z", 0), ("b", 0), ("f", 1)]).unwrap();
        assert_eq!(Language::new(sig, 1).unwrap().first_constant(), Ok("b"));
        let sig = Signature::from_symbols([("f", 1)]).unwrap();
        assert_eq!(Language::new(sig, 1).unwrap().first_constant(), Err(Error::NoConstant));
    }
}
