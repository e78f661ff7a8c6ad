// SPDX-License-Identifier: Apache-2.0

//! Deductive systems and the deduction relation.
//!
//! Derivability is decided by forward saturation over an interned term store. A
//! derived term is only admitted when its proper subterms lie in a finite universe;
//! the local universe is made of the proper subterms of the goal and of the
//! premises together with the ground subterms of the rules.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::Result;
use crate::language::Language;
use crate::term::{GroundTerm, Substitution, Symbol, Term};

/// `premises ▷ conclusion`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub premises: Vec<Term>,
    pub conclusion: Term,
}

impl Rule {
    pub fn new(premises: Vec<Term>, conclusion: Term) -> Self {
        Rule { premises, conclusion }
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        let mut vs = self.conclusion.vars();
        for p in &self.premises {
            vs.extend(p.vars());
        }
        vs
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.premises.is_empty() {
            return write!(f, "|- {}", self.conclusion);
        }
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, " -> {}", self.conclusion)
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite list of rules over a language; rule ids are list positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeductiveSystem {
    language: Language,
    rules: Vec<Rule>,
}

impl DeductiveSystem {
    pub fn new(language: Language, rules: Vec<Rule>) -> Result<Self> {
        for r in &rules {
            for t in r.premises.iter().chain(std::iter::once(&r.conclusion)) {
                language.full().check_term(t)?;
            }
        }
        Ok(DeductiveSystem { language, rules })
    }

    pub fn empty(language: Language) -> Self {
        DeductiveSystem {
            language,
            rules: Vec::new(),
        }
    }

    pub fn language(&self) -> &Language {
        &self.language
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn agents(&self) -> usize {
        self.language.agents()
    }

    /// Append rules from another system over a compatible language.
    pub fn union(&self, other: &DeductiveSystem) -> Result<DeductiveSystem> {
        let language = self.language.extend_base(other.language.base())?;
        let language = if other.agents() > language.agents() {
            language.with_agents(other.agents())?
        } else {
            language
        };
        let mut rules = self.rules.clone();
        for r in &other.rules {
            if !rules.contains(r) {
                rules.push(r.clone());
            }
        }
        DeductiveSystem::new(language, rules)
    }

    /// Same rules over a larger language.
    pub fn with_language(&self, language: Language) -> Result<DeductiveSystem> {
        DeductiveSystem::new(language, self.rules.clone())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Justification {
    /// `source` is a member of the premise set and `subst(source)` is the step's term.
    FromGamma { source: Term, subst: Substitution },
    /// Rule `rule` instantiated by `subst`, with its premises at earlier step indices.
    ByRule {
        rule: usize,
        subst: Substitution,
        premises: Vec<usize>,
    },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Step {
    pub term: GroundTerm,
    pub justification: Justification,
}

/// A sequence of ground terms, each justified by the premise set or by earlier steps.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Deduction {
    pub steps: Vec<Step>,
}

impl Deduction {
    pub fn conclusion(&self) -> Option<&GroundTerm> {
        self.steps.last().map(|s| &s.term)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

impl fmt::Display for Deduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, step) in self.steps.iter().enumerate() {
            write!(f, "{i:>3}  {}  ", step.term)?;
            match &step.justification {
                Justification::FromGamma { source, subst } if subst.is_empty() => {
                    writeln!(f, "[premise {source}]")?;
                }
                Justification::FromGamma { source, subst } => writeln!(f, "[premise {source} {subst}]")?,
                Justification::ByRule { rule, subst, premises } => {
                    let ps: Vec<String> = premises.iter().map(|p| p.to_string()).collect();
                    writeln!(f, "[rule {rule} {subst} from {}]", ps.join(","))?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Saturate within the local universe. Complete for local systems.
    Local,
    /// Grow the universe up to the given number of times past the local one. A widened
    /// round that needs more than a fixed number of rule firings ends in `Unknown`.
    Bounded(usize),
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Local => f.write_str("local"),
            Strategy::Bounded(k) => write!(f, "bounded:{k}"),
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "local" {
            return Ok(Strategy::Local);
        }
        s.strip_prefix("bounded:")
            .and_then(|n| n.parse().ok())
            .map(Strategy::Bounded)
            .ok_or_else(|| format!("expected `local` or `bounded:N`, got `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Derivable(Deduction),
    NotDerivable,
    Unknown,
}

impl Verdict {
    pub fn is_derivable(&self) -> bool {
        matches!(self, Verdict::Derivable(_))
    }
}

type SymId = u32;
type TermId = u32;
type FactId = usize;

#[derive(Default)]
struct Store {
    syms: Vec<Symbol>,
    sym_ids: HashMap<Symbol, SymId>,
    nodes: Vec<(SymId, Box<[TermId]>)>,
    ids: HashMap<(SymId, Box<[TermId]>), TermId>,
}

impl Store {
    fn sym(&mut self, s: &Symbol) -> SymId {
        if let Some(&id) = self.sym_ids.get(s) {
            return id;
        }
        let id = self.syms.len() as SymId;
        self.syms.push(s.clone());
        self.sym_ids.insert(s.clone(), id);
        id
    }

    fn intern(&mut self, sym: SymId, args: Box<[TermId]>) -> TermId {
        if let Some(&id) = self.ids.get(&(sym, args.clone())) {
            return id;
        }
        let id = self.nodes.len() as TermId;
        self.nodes.push((sym, args.clone()));
        self.ids.insert((sym, args), id);
        id
    }

    fn add(&mut self, t: &Term) -> Option<TermId> {
        match t {
            Term::Var(_) => None,
            Term::App(f, args) => {
                let f = self.sym(f);
                let args = args.iter().map(|a| self.add(a)).collect::<Option<Box<[TermId]>>>()?;
                Some(self.intern(f, args))
            }
        }
    }

    fn lookup(&self, t: &Term) -> Option<TermId> {
        match t {
            Term::Var(_) => None,
            Term::App(f, args) => {
                let f = *self.sym_ids.get(f)?;
                let args = args.iter().map(|a| self.lookup(a)).collect::<Option<Box<[TermId]>>>()?;
                self.ids.get(&(f, args)).copied()
            }
        }
    }

    fn head(&self, t: TermId) -> SymId {
        self.nodes[t as usize].0
    }

    fn args(&self, t: TermId) -> &[TermId] {
        &self.nodes[t as usize].1
    }

    fn term(&self, t: TermId) -> Term {
        let (f, args) = &self.nodes[t as usize];
        Term::App(self.syms[*f as usize].clone(), args.iter().map(|&a| self.term(a)).collect())
    }

    fn ground(&self, t: TermId) -> GroundTerm {
        GroundTerm::new(self.term(t)).expect("store holds ground terms")
    }

    fn collect_subterms(&self, t: TermId, out: &mut Vec<bool>, list: &mut Vec<TermId>) {
        if out.len() <= t as usize {
            out.resize(self.nodes.len().max(t as usize + 1), false);
        }
        if out[t as usize] {
            return;
        }
        out[t as usize] = true;
        list.push(t);
        for i in 0..self.args(t).len() {
            let a = self.args(t)[i];
            self.collect_subterms(a, out, list);
        }
    }
}

#[derive(Clone, Debug)]
enum Pat {
    Var(usize),
    Ground(TermId),
    App(SymId, Box<[Pat]>),
}

#[derive(Clone, Copy, Debug)]
enum Source {
    Rule(usize),
    Gamma(usize),
}

struct CompiledRule {
    source: Source,
    premises: Vec<Pat>,
    conclusion: Pat,
    var_names: Vec<Symbol>,
    /// Slots that only occur in the conclusion.
    free: Vec<usize>,
}

fn compile(store: &mut Store, t: &Term, vars: &mut Vec<Symbol>) -> Pat {
    if t.is_ground() {
        return Pat::Ground(store.add(t).expect("ground"));
    }
    match t {
        Term::Var(v) => match vars.iter().position(|x| x == v) {
            Some(i) => Pat::Var(i),
            None => {
                vars.push(v.clone());
                Pat::Var(vars.len() - 1)
            }
        },
        Term::App(f, args) => {
            let f = store.sym(f);
            Pat::App(f, args.iter().map(|a| compile(store, a, vars)).collect())
        }
    }
}

fn compile_rule(store: &mut Store, source: Source, premises: &[Term], conclusion: &Term) -> CompiledRule {
    let mut var_names = Vec::new();
    let premises: Vec<Pat> = premises.iter().map(|p| compile(store, p, &mut var_names)).collect();
    let bound = var_names.len();
    let conclusion = compile(store, conclusion, &mut var_names);
    CompiledRule {
        source,
        premises,
        conclusion,
        free: (bound..var_names.len()).collect(),
        var_names,
    }
}

#[derive(Clone, Debug)]
enum Just {
    Gamma { index: usize, bindings: Box<[TermId]> },
    Rule { rule: usize, bindings: Box<[TermId]>, premises: Box<[FactId]> },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Trigger {
    Head(SymId),
    Any,
}

fn trigger_of(p: &Pat, store: &Store) -> Trigger {
    match p {
        Pat::Var(_) => Trigger::Any,
        Pat::Ground(t) => Trigger::Head(store.head(*t)),
        Pat::App(f, _) => Trigger::Head(*f),
    }
}

/// One saturation run over a fixed universe.
struct Saturation<'a> {
    store: Store,
    rules: Vec<CompiledRule>,
    gamma: &'a [Term],
    in_universe: Vec<bool>,
    universe: Vec<TermId>,
    goal: Option<TermId>,
    facts: Vec<TermId>,
    just: Vec<Just>,
    fact_of: HashMap<TermId, FactId>,
    /// Processed facts grouped by head symbol.
    by_head: HashMap<SymId, Vec<FactId>>,
    processed: usize,
    triggers: HashMap<SymId, Vec<(usize, usize)>>,
    any_triggers: Vec<(usize, usize)>,
    rejected: Vec<TermId>,
    /// Set when an instantiation over an unbounded domain was cut down to the universe.
    truncated: bool,
    stop_at_goal: bool,
    /// Number of rule firings a run may perform.
    budget: usize,
    work: usize,
    exhausted: bool,
}

impl<'a> Saturation<'a> {
    fn new(system: &DeductiveSystem, gamma: &'a [Term]) -> Self {
        let mut store = Store::default();
        let mut rules = Vec::new();
        for (i, r) in system.rules().iter().enumerate() {
            rules.push(compile_rule(&mut store, Source::Rule(i), &r.premises, &r.conclusion));
        }
        for (i, g) in gamma.iter().enumerate() {
            if !g.is_ground() {
                rules.push(compile_rule(&mut store, Source::Gamma(i), &[], g));
            }
        }
        let mut triggers: HashMap<SymId, Vec<(usize, usize)>> = HashMap::new();
        let mut any_triggers = Vec::new();
        for (ri, r) in rules.iter().enumerate() {
            for (k, p) in r.premises.iter().enumerate() {
                match trigger_of(p, &store) {
                    Trigger::Head(f) => triggers.entry(f).or_default().push((ri, k)),
                    Trigger::Any => any_triggers.push((ri, k)),
                }
            }
        }
        Saturation {
            store,
            rules,
            gamma,
            in_universe: Vec::new(),
            universe: Vec::new(),
            goal: None,
            facts: Vec::new(),
            just: Vec::new(),
            fact_of: HashMap::new(),
            by_head: HashMap::new(),
            processed: 0,
            triggers,
            any_triggers,
            rejected: Vec::new(),
            truncated: false,
            stop_at_goal: true,
            budget: usize::MAX,
            work: 0,
            exhausted: false,
        }
    }

    fn add_to_universe(&mut self, t: TermId) {
        let mut list = Vec::new();
        self.store.collect_subterms(t, &mut self.in_universe, &mut list);
        self.universe.extend(list);
    }

    fn add_children_to_universe(&mut self, t: TermId) {
        for i in 0..self.store.args(t).len() {
            let a = self.store.args(t)[i];
            self.add_to_universe(a);
        }
    }

    fn in_universe(&self, t: TermId) -> bool {
        self.in_universe.get(t as usize).copied().unwrap_or(false)
    }

    /// The local universe: proper subterms of the goal and of Γ, ground subterms of rules.
    fn seed_local(&mut self, system: &DeductiveSystem, goal: Option<&Term>) {
        let mut roots = Vec::new();
        let mut children_of = Vec::new();
        if let Some(g) = goal {
            children_of.push(self.store.add(g).expect("goal is ground"));
        }
        for g in self.gamma {
            if let Some(id) = self.store.add(g) {
                children_of.push(id);
            } else {
                for s in g.proper_subterms() {
                    if let Some(id) = self.store.add(&s) {
                        roots.push(id);
                    }
                }
            }
        }
        for r in system.rules() {
            for t in r.premises.iter().chain(std::iter::once(&r.conclusion)) {
                for s in t.subterms() {
                    if s.is_ground() {
                        roots.push(self.store.add(&s).expect("ground"));
                    }
                }
            }
        }
        for t in children_of {
            self.add_children_to_universe(t);
        }
        for t in roots {
            self.add_to_universe(t);
        }
    }

    fn admissible(&self, t: TermId) -> bool {
        Some(t) == self.goal || self.store.args(t).iter().all(|&a| self.in_universe(a))
    }

    /// Record a new fact; returns true when the goal has just been reached.
    fn assert_fact(&mut self, t: TermId, just: Just) -> bool {
        self.work += 1;
        if self.work > self.budget {
            // unwinds like a goal hit; callers check `exhausted` first
            self.exhausted = true;
            return true;
        }
        if self.fact_of.contains_key(&t) {
            return false;
        }
        // instances of premises are admitted as they stand
        if !matches!(just, Just::Gamma { .. }) && !self.admissible(t) {
            self.rejected.push(t);
            return false;
        }
        self.fact_of.insert(t, self.facts.len());
        self.facts.push(t);
        self.just.push(just);
        Some(t) == self.goal
    }

    fn matches(store: &Store, p: &Pat, t: TermId, b: &mut [Option<TermId>], trail: &mut Vec<usize>) -> bool {
        match p {
            Pat::Ground(g) => *g == t,
            Pat::Var(v) => match b[*v] {
                Some(x) => x == t,
                None => {
                    b[*v] = Some(t);
                    trail.push(*v);
                    true
                }
            },
            Pat::App(f, ps) => {
                let (g, args) = &store.nodes[t as usize];
                *g == *f && args.len() == ps.len() && ps.iter().zip(args.iter()).all(|(p, &a)| Self::matches(store, p, a, b, trail))
            }
        }
    }

    fn undo(b: &mut [Option<TermId>], trail: &mut Vec<usize>, mark: usize) {
        for v in trail.drain(mark..) {
            b[v] = None;
        }
    }

    fn build(&mut self, p: &Pat, b: &[Option<TermId>]) -> TermId {
        match p {
            Pat::Ground(g) => *g,
            Pat::Var(v) => b[*v].expect("bound variable"),
            Pat::App(f, ps) => {
                let args: Box<[TermId]> = ps.iter().map(|q| self.build(q, b)).collect();
                self.store.intern(*f, args)
            }
        }
    }

    fn run(&mut self) -> bool {
        // ground premises
        for (i, g) in self.gamma.iter().enumerate() {
            if let Some(id) = self.store.add(g) {
                if self.assert_fact(id, Just::Gamma { index: i, bindings: Box::new([]) }) && self.stop_at_goal {
                    return true;
                }
            }
        }
        for ri in 0..self.rules.len() {
            if self.rules[ri].premises.is_empty() {
                let n = self.rules[ri].var_names.len();
                let mut b = vec![None; n];
                if self.fire(ri, &mut b, &[]) && self.stop_at_goal {
                    return true;
                }
            }
        }
        while self.processed < self.facts.len() {
            let fid = self.processed;
            let t = self.facts[fid];
            let head = self.store.head(t);
            self.by_head.entry(head).or_default().push(fid);
            self.processed += 1;
            let mut cands: Vec<(usize, usize)> = self.triggers.get(&head).cloned().unwrap_or_default();
            cands.extend(self.any_triggers.iter().copied());
            for (ri, k) in cands {
                let n = self.rules[ri].var_names.len();
                let mut b = vec![None; n];
                let mut trail = Vec::new();
                let pat = self.rules[ri].premises[k].clone();
                if !Self::matches(&self.store, &pat, t, &mut b, &mut trail) {
                    continue;
                }
                let np = self.rules[ri].premises.len();
                let mut chosen = vec![usize::MAX; np];
                chosen[k] = fid;
                if self.join(ri, k, 0, &mut b, &mut trail, &mut chosen) && self.stop_at_goal {
                    return true;
                }
            }
        }
        self.goal.is_some_and(|g| self.fact_of.contains_key(&g))
    }

    /// Match premises other than `fixed`, starting at position `pos`, against processed facts.
    fn join(
        &mut self,
        ri: usize,
        fixed: usize,
        pos: usize,
        b: &mut Vec<Option<TermId>>,
        trail: &mut Vec<usize>,
        chosen: &mut Vec<FactId>,
    ) -> bool {
        let np = self.rules[ri].premises.len();
        if pos == np {
            return self.fire(ri, b, chosen);
        }
        if pos == fixed {
            return self.join(ri, fixed, pos + 1, b, trail, chosen);
        }
        let pat = self.rules[ri].premises[pos].clone();
        let candidates: Vec<FactId> = match &pat {
            Pat::Ground(g) => match self.fact_of.get(g) {
                Some(&f) if f < self.processed => vec![f],
                _ => Vec::new(),
            },
            Pat::Var(v) => match b[*v] {
                Some(x) => match self.fact_of.get(&x) {
                    Some(&f) if f < self.processed => vec![f],
                    _ => Vec::new(),
                },
                None => (0..self.processed).collect(),
            },
            Pat::App(f, _) => self.by_head.get(f).cloned().unwrap_or_default(),
        };
        for f in candidates {
            let mark = trail.len();
            let t = self.facts[f];
            if Self::matches(&self.store, &pat, t, b, trail) {
                chosen[pos] = f;
                if self.join(ri, fixed, pos + 1, b, trail, chosen) && self.stop_at_goal {
                    Self::undo(b, trail, mark);
                    return true;
                }
            }
            Self::undo(b, trail, mark);
        }
        false
    }

    fn justification(&self, ri: usize, b: &[Option<TermId>], chosen: &[FactId]) -> Just {
        let bindings: Box<[TermId]> = b.iter().map(|x| x.expect("all slots bound")).collect();
        match self.rules[ri].source {
            Source::Rule(rule) => Just::Rule {
                rule,
                bindings,
                premises: chosen.into(),
            },
            Source::Gamma(index) => Just::Gamma { index, bindings },
        }
    }

    /// Premises are matched; instantiate the conclusion (enumerating conclusion-only variables).
    fn fire(&mut self, ri: usize, b: &mut [Option<TermId>], chosen: &[FactId]) -> bool {
        let free = self.rules[ri].free.clone();
        let conclusion = self.rules[ri].conclusion.clone();
        if free.is_empty() {
            let t = self.build(&conclusion, b);
            let j = self.justification(ri, b, chosen);
            return self.assert_fact(t, j);
        }
        let mut hit = false;
        // goal-directed instantiation
        if let Some(g) = self.goal {
            let mut trail = Vec::new();
            if Self::matches(&self.store, &conclusion, g, b, &mut trail) {
                let j = self.justification(ri, b, chosen);
                hit |= self.assert_fact(g, j);
            }
            Self::undo(b, &mut trail, 0);
            if hit && self.stop_at_goal {
                return true;
            }
        }
        if let Pat::Var(_) = conclusion {
            // A bare variable ranges over every term whose children lie in the universe;
            // only universe members (and the goal above) are produced.
            self.truncated = true;
        }
        let domain = self.universe.clone();
        let mut idx = vec![0usize; free.len()];
        if domain.is_empty() {
            return hit;
        }
        loop {
            for (slot, &i) in free.iter().zip(&idx) {
                b[*slot] = Some(domain[i]);
            }
            let t = self.build(&conclusion, b);
            let j = self.justification(ri, b, chosen);
            if self.assert_fact(t, j) {
                hit = true;
                if self.stop_at_goal {
                    break;
                }
            }
            // odometer
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < domain.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
        for &slot in &free {
            b[slot] = None;
        }
        hit
    }

    fn substitution(&self, ri_names: &[Symbol], bindings: &[TermId]) -> Substitution {
        ri_names
            .iter()
            .zip(bindings)
            .map(|(v, &t)| (v.clone(), self.store.ground(t)))
            .collect()
    }

    fn reconstruct(&self, target: FactId) -> Deduction {
        let mut needed = vec![false; self.facts.len()];
        let mut stack = vec![target];
        while let Some(f) = stack.pop() {
            if needed[f] {
                continue;
            }
            needed[f] = true;
            if let Just::Rule { premises, .. } = &self.just[f] {
                stack.extend(premises.iter().copied());
            }
        }
        let mut renumber = vec![usize::MAX; self.facts.len()];
        let mut steps = Vec::new();
        for f in 0..self.facts.len() {
            if !needed[f] {
                continue;
            }
            renumber[f] = steps.len();
            let justification = match &self.just[f] {
                Just::Gamma { index, bindings } => {
                    let source = self.gamma[*index].clone();
                    let names: Vec<Symbol> = if bindings.is_empty() {
                        Vec::new()
                    } else {
                        self.rules
                            .iter()
                            .find(|r| matches!(r.source, Source::Gamma(i) if i == *index))
                            .map(|r| r.var_names.clone())
                            .unwrap_or_default()
                    };
                    Justification::FromGamma {
                        source,
                        subst: self.substitution(&names, bindings),
                    }
                }
                Just::Rule { rule, bindings, premises } => {
                    let names = &self
                        .rules
                        .iter()
                        .find(|r| matches!(r.source, Source::Rule(i) if i == *rule))
                        .expect("compiled rule")
                        .var_names;
                    Justification::ByRule {
                        rule: *rule,
                        subst: self.substitution(names, bindings),
                        premises: premises.iter().map(|&p| renumber[p]).collect(),
                    }
                }
            };
            steps.push(Step {
                term: self.store.ground(self.facts[f]),
                justification,
            });
        }
        Deduction { steps }
    }
}

/// Rule firings a widened bounded round may perform before giving up with `Unknown`.
const WIDENING_BUDGET: usize = 50_000;

/// Decide whether `goal` is derivable from `gamma` in `system`.
pub fn derive(system: &DeductiveSystem, gamma: &[Term], goal: &GroundTerm, strategy: Strategy) -> Result<Verdict> {
    let sig = system.language().full();
    sig.check_term(goal)?;
    for g in gamma {
        sig.check_term(g)?;
    }
    let rounds = match strategy {
        Strategy::Local => 0,
        Strategy::Bounded(k) => k,
    };
    let mut extra: Vec<Term> = Vec::new();
    for round in 0..=rounds {
        let mut sat = Saturation::new(system, gamma);
        sat.seed_local(system, Some(goal.as_term()));
        for t in &extra {
            let id = sat.store.add(t).expect("ground");
            sat.add_to_universe(id);
        }
        sat.goal = sat.store.lookup(goal.as_term());
        if round > 0 {
            sat.budget = WIDENING_BUDGET;
        }
        let reached = sat.run();
        if sat.exhausted {
            break;
        }
        if reached {
            let target = sat.fact_of[&sat.goal.expect("goal interned")];
            return Ok(Verdict::Derivable(sat.reconstruct(target)));
        }
        if matches!(strategy, Strategy::Local) {
            return Ok(Verdict::NotDerivable);
        }
        if sat.rejected.is_empty() && !sat.truncated {
            return Ok(Verdict::NotDerivable);
        }
        if round == rounds {
            break;
        }
        let mut seen: BTreeSet<Term> = extra.iter().cloned().collect();
        for &r in &sat.rejected {
            for &a in sat.store.args(r) {
                let t = sat.store.term(a);
                if seen.insert(t.clone()) {
                    extra.push(t);
                }
            }
        }
        if sat.truncated {
            // let bare-variable conclusions reach one level further
            for &f in &sat.facts {
                let t = sat.store.term(f);
                if seen.insert(t.clone()) {
                    extra.push(t);
                }
            }
        }
    }
    Ok(Verdict::Unknown)
}

/// Least set of ground terms containing the ground instances of `gamma` and closed
/// under the rules, where a term is admitted only when its proper subterms lie in
/// `universe` (taken subterm-closed). Conclusion-only variables range over `universe`.
pub fn closure(system: &DeductiveSystem, gamma: &[Term], universe: &BTreeSet<GroundTerm>) -> BTreeSet<GroundTerm> {
    let mut sat = Saturation::new(system, gamma);
    sat.stop_at_goal = false;
    for u in universe {
        let id = sat.store.add(u).expect("ground");
        sat.add_to_universe(id);
    }
    sat.run();
    sat.facts.iter().map(|&f| sat.store.ground(f)).collect()
}

/// Closure over the local universe of `gamma` and the rules.
pub fn local_closure(system: &DeductiveSystem, gamma: &[Term]) -> BTreeSet<GroundTerm> {
    let mut sat = Saturation::new(system, gamma);
    sat.stop_at_goal = false;
    sat.seed_local(system, None);
    sat.run();
    sat.facts.iter().map(|&f| sat.store.ground(f)).collect()
}

/// Check that every step is a premise instance or a rule instance over earlier steps.
pub fn check_deduction(system: &DeductiveSystem, gamma: &[Term], d: &Deduction) -> bool {
    for (i, step) in d.steps.iter().enumerate() {
        let ok = match &step.justification {
            Justification::FromGamma { source, subst } => {
                gamma.contains(source) && source.apply(subst) == *step.term.as_term()
            }
            Justification::ByRule { rule, subst, premises } => {
                let Some(r) = system.rules().get(*rule) else {
                    return false;
                };
                premises.len() == r.premises.len()
                    && premises.iter().all(|&p| p < i)
                    && r.premises
                        .iter()
                        .zip(premises)
                        .all(|(pat, &p)| pat.apply(subst) == *d.steps[p].term.as_term())
                    && r.conclusion.apply(subst) == *step.term.as_term()
            }
        };
        if !ok {
            return false;
        }
    }
    true
}

/// Monotonicity probe: derivability from `gamma` carries over to `gamma_sup`.
pub fn is_monotone_witness(
    system: &DeductiveSystem,
    gamma: &[Term],
    gamma_sup: &[Term],
    goal: &GroundTerm,
    strategy: Strategy,
) -> Result<bool> {
    if !derive(system, gamma, goal, strategy)?.is_derivable() {
        return Ok(true);
    }
    Ok(derive(system, gamma_sup, goal, strategy)?.is_derivable())
}

impl From<Verdict> for Option<bool> {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Derivable(_) => Some(true),
            Verdict::NotDerivable => Some(false),
            Verdict::Unknown => None,
        }
    }
}
