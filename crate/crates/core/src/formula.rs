// SPDX-License-Identifier: Apache-2.0

//! Formulas of the epistemic language, their term encoding and negation normal form.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::language::{Ctor, Language};
use crate::syntax::{Cursor, Token};
use crate::term::{parse_term_at, GroundTerm, Substitution, Term};

/// A formula in the core connectives. Agents are numbered from 1.
///
/// Atoms and observed terms are ground in concrete formulas; axiom templates may
/// carry variables, which `instantiate` replaces.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Know(usize, Box<Formula>),
    XKnow(usize, Box<Formula>),
    Obs(usize, Term),
}

impl Formula {
    pub fn atom(t: impl Into<Term>) -> Formula {
        Formula::Atom(t.into())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    /// `¬(¬a ∧ ¬b)`
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    /// `¬a ∨ b`, expanded.
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(Formula::not(a), b)
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn know(agent: usize, f: Formula) -> Formula {
        Formula::Know(agent, Box::new(f))
    }

    pub fn xknow(agent: usize, f: Formula) -> Formula {
        Formula::XKnow(agent, Box::new(f))
    }

    pub fn obs(agent: usize, t: impl Into<Term>) -> Formula {
        Formula::Obs(agent, t.into())
    }

    /// The fixed tautology `¬(p₀ ∧ ¬p₀)`, `p₀` the first base constant.
    pub fn truth(lang: &Language) -> Result<Formula> {
        let p0 = Formula::Atom(Term::constant(lang.first_constant()?));
        Ok(Formula::not(Formula::and(p0.clone(), Formula::not(p0))))
    }

    pub fn falsity(lang: &Language) -> Result<Formula> {
        Ok(Formula::not(Formula::truth(lang)?))
    }

    /// Conjunction of a list, `truth` when empty.
    pub fn conj(lang: &Language, items: Vec<Formula>) -> Result<Formula> {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::truth(lang),
            Some(first) => Ok(it.fold(first, Formula::and)),
        }
    }

    /// Number of connectives plus the symbols of atoms and observed terms.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(t) => t.size(),
            Formula::Obs(_, t) => 1 + t.size(),
            Formula::Not(a) | Formula::Know(_, a) | Formula::XKnow(_, a) => 1 + a.size(),
            Formula::And(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Number of `¬`, `∧`, `K`, `X` and `Ob` nodes.
    pub fn connectives(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Obs(..) => 1,
            Formula::Not(a) | Formula::Know(_, a) | Formula::XKnow(_, a) => 1 + a.connectives(),
            Formula::And(a, b) => 1 + a.connectives() + b.connectives(),
        }
    }

    pub fn max_agent(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Obs(i, _) => *i,
            Formula::Not(a) => a.max_agent(),
            Formula::Know(i, a) | Formula::XKnow(i, a) => (*i).max(a.max_agent()),
            Formula::And(a, b) => a.max_agent().max(b.max_agent()),
        }
    }

    /// Pre-order traversal of all subformulas, including those under `X`.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            out.push(f);
            match f {
                Formula::Not(a) | Formula::Know(_, a) | Formula::XKnow(_, a) => stack.push(a),
                Formula::And(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
                _ => {}
            }
        }
        out
    }

    pub fn is_ground(&self) -> bool {
        self.subformulas().iter().all(|f| match f {
            Formula::Atom(t) | Formula::Obs(_, t) => t.is_ground(),
            _ => true,
        })
    }

    pub fn vars(&self) -> BTreeSet<crate::term::Symbol> {
        let mut out = BTreeSet::new();
        for f in self.subformulas() {
            if let Formula::Atom(t) | Formula::Obs(_, t) = f {
                out.extend(t.vars());
            }
        }
        out
    }

    /// Apply a substitution to every atom and observed term.
    pub fn apply(&self, subst: &Substitution) -> Formula {
        match self {
            Formula::Atom(t) => Formula::Atom(t.apply(subst)),
            Formula::Obs(i, t) => Formula::Obs(*i, t.apply(subst)),
            Formula::Not(a) => Formula::not(a.apply(subst)),
            Formula::And(a, b) => Formula::and(a.apply(subst), b.apply(subst)),
            Formula::Know(i, a) => Formula::know(*i, a.apply(subst)),
            Formula::XKnow(i, a) => Formula::xknow(*i, a.apply(subst)),
        }
    }

    /// Check agents, signature, the base-only restriction on observations and that
    /// atoms are not headed by a logical constructor.
    pub fn validate(&self, lang: &Language) -> Result<()> {
        for f in self.subformulas() {
            match f {
                Formula::Atom(t) => {
                    lang.full().check_term(t)?;
                    if t.head().is_some_and(|h| lang.ctor(h).is_some()) {
                        return Err(Error::ReservedAtom(t.to_string()));
                    }
                }
                Formula::Obs(i, t) => {
                    lang.check_agent(*i)?;
                    lang.full().check_term(t)?;
                    if !lang.is_base_term(t) {
                        return Err(Error::ObservationNotBase(t.to_string()));
                    }
                }
                Formula::Know(i, _) | Formula::XKnow(i, _) => lang.check_agent(*i)?,
                _ => {}
            }
        }
        Ok(())
    }

    /// The term encoding `φ^T`.
    pub fn to_term(&self, lang: &Language) -> Term {
        match self {
            Formula::Atom(t) => t.clone(),
            Formula::Not(a) => lang.mk(Ctor::Not, vec![a.to_term(lang)]),
            Formula::And(a, b) => lang.mk(Ctor::And, vec![a.to_term(lang), b.to_term(lang)]),
            Formula::Know(i, a) => lang.mk(Ctor::Know(*i), vec![a.to_term(lang)]),
            Formula::XKnow(i, a) => lang.mk(Ctor::XKnow(*i), vec![a.to_term(lang)]),
            Formula::Obs(i, t) => lang.mk(Ctor::Ob(*i), vec![t.clone()]),
        }
    }

    pub fn to_ground_term(&self, lang: &Language) -> Result<GroundTerm> {
        GroundTerm::new(self.to_term(lang))
    }

    /// The reverse translation `t^R`. Constructors below a base symbol are left alone.
    pub fn from_term(t: &Term, lang: &Language) -> Result<Formula> {
        let Term::App(head, args) = t else {
            return Ok(Formula::Atom(t.clone()));
        };
        let Some(ctor) = lang.ctor(head) else {
            return Ok(Formula::Atom(t.clone()));
        };
        Ok(match ctor {
            Ctor::True => Formula::truth(lang)?,
            Ctor::False => Formula::falsity(lang)?,
            Ctor::Not => Formula::not(Formula::from_term(&args[0], lang)?),
            Ctor::And => Formula::and(Formula::from_term(&args[0], lang)?, Formula::from_term(&args[1], lang)?),
            Ctor::Know(i) => Formula::know(i, Formula::from_term(&args[0], lang)?),
            Ctor::XKnow(i) => Formula::xknow(i, Formula::from_term(&args[0], lang)?),
            Ctor::Ob(i) => {
                let arg = &args[0];
                if !lang.is_base_term(arg) {
                    return Err(Error::Translation(t.to_string()));
                }
                Formula::Obs(i, arg.clone())
            }
        })
    }

    /// Every `X` not nested in another `X` sits under an even number of negations.
    pub fn top_level_x_positive(&self) -> bool {
        fn walk(f: &Formula, negations: usize) -> bool {
            match f {
                Formula::XKnow(..) => negations.is_multiple_of(2),
                Formula::Not(a) => walk(a, negations + 1),
                Formula::Know(_, a) => walk(a, negations),
                Formula::And(a, b) => walk(a, negations) && walk(b, negations),
                Formula::Atom(_) | Formula::Obs(..) => true,
            }
        }
        walk(self, 0)
    }

    pub fn nnf(&self) -> Nnf {
        Nnf::of(self, true)
    }

    /// Render with bare operators when only agent 1 is used.
    pub fn display(&self) -> FormulaDisplay<'_> {
        FormulaDisplay {
            formula: self,
            indexed: self.max_agent() > 1,
        }
    }

    /// Render with explicit agent indices.
    pub fn display_indexed(&self) -> FormulaDisplay<'_> {
        FormulaDisplay {
            formula: self,
            indexed: true,
        }
    }
}

/// Printer that folds the expansions of `|`, `=>`, `true` and `false` back into sugar.
///
/// Parsing the output yields the same formula.
pub struct Pretty<'a> {
    formula: &'a Formula,
    indexed: bool,
    truth: Option<Formula>,
    level: u8,
}

impl Formula {
    pub fn pretty(&self, lang: &Language) -> Pretty<'_> {
        Pretty {
            formula: self,
            indexed: lang.agents() > 1,
            truth: Formula::truth(lang).ok(),
            level: 0,
        }
    }

    /// Like `pretty`, parenthesized for use as the left operand of `=>`.
    pub fn pretty_operand(&self, lang: &Language) -> Pretty<'_> {
        Pretty {
            level: 1,
            ..self.pretty(lang)
        }
    }
}

impl Pretty<'_> {
    fn as_implication(phi: &Formula) -> Option<(&Formula, &Formula)> {
        if let Formula::Not(inner) = phi {
            if let Formula::And(a, b) = &**inner {
                if let (Formula::Not(na), Formula::Not(nb)) = (&**a, &**b) {
                    // `(a | b) | c` also has this shape; print it as a disjunction
                    if let Formula::Not(x) = &**na {
                        if Self::as_disjunction(na).is_some() {
                            return None;
                        }
                        return Some((x, nb));
                    }
                }
            }
        }
        None
    }

    fn as_disjunction(phi: &Formula) -> Option<(&Formula, &Formula)> {
        if let Formula::Not(inner) = phi {
            if let Formula::And(a, b) = &**inner {
                if let (Formula::Not(x), Formula::Not(y)) = (&**a, &**b) {
                    return Some((x, y));
                }
            }
        }
        None
    }

    // 0: implication, 1: disjunction, 2: conjunction, 3: prefix operators and atoms
    fn write(&self, f: &mut fmt::Formatter<'_>, phi: &Formula, level: u8) -> fmt::Result {
        if let Some(t) = &self.truth {
            if phi == t {
                return f.write_str("true");
            }
            if matches!(phi, Formula::Not(a) if **a == *t) {
                return f.write_str("false");
            }
        }
        let open = |f: &mut fmt::Formatter<'_>, mine: u8| if level > mine { f.write_str("(") } else { Ok(()) };
        let close = |f: &mut fmt::Formatter<'_>, mine: u8| if level > mine { f.write_str(")") } else { Ok(()) };
        if let Some((a, b)) = Self::as_implication(phi) {
            open(f, 0)?;
            self.write(f, a, 1)?;
            f.write_str(" => ")?;
            self.write(f, b, 0)?;
            return close(f, 0);
        }
        if let Some((a, b)) = Self::as_disjunction(phi) {
            open(f, 1)?;
            self.write(f, a, 1)?;
            f.write_str(" | ")?;
            self.write(f, b, 2)?;
            return close(f, 1);
        }
        match phi {
            Formula::Atom(t) => write!(f, "{t}"),
            Formula::Obs(i, t) => {
                op(f, "Ob", *i, self.indexed)?;
                write!(f, "({t})")
            }
            Formula::Not(a) => {
                f.write_str("!")?;
                self.write(f, a, 3)
            }
            Formula::Know(i, a) | Formula::XKnow(i, a) => {
                let name = if matches!(phi, Formula::Know(..)) { "K" } else { "X" };
                op(f, name, *i, self.indexed)?;
                f.write_str(" ")?;
                self.write(f, a, 3)
            }
            Formula::And(a, b) => {
                open(f, 2)?;
                self.write(f, a, 2)?;
                f.write_str(" & ")?;
                self.write(f, b, 3)?;
                close(f, 2)
            }
        }
    }
}

impl fmt::Display for Pretty<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.formula, self.level)
    }
}

fn op(f: &mut fmt::Formatter<'_>, name: &str, agent: usize, indexed: bool) -> fmt::Result {
    if indexed {
        write!(f, "{name}{agent}")
    } else {
        f.write_str(name)
    }
}

pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    indexed: bool,
}

impl FormulaDisplay<'_> {
    // 2: conjunction, 3: prefix operators and atoms
    fn write(&self, f: &mut fmt::Formatter<'_>, phi: &Formula, level: u8) -> fmt::Result {
        match phi {
            Formula::Atom(t) => write!(f, "{t}"),
            Formula::Obs(i, t) => {
                op(f, "Ob", *i, self.indexed)?;
                write!(f, "({t})")
            }
            Formula::Not(a) => {
                f.write_str("!")?;
                self.write(f, a, 3)
            }
            Formula::Know(i, a) | Formula::XKnow(i, a) => {
                let name = if matches!(phi, Formula::Know(..)) { "K" } else { "X" };
                op(f, name, *i, self.indexed)?;
                f.write_str(" ")?;
                self.write(f, a, 3)
            }
            Formula::And(a, b) => {
                if level > 2 {
                    f.write_str("(")?;
                }
                self.write(f, a, 2)?;
                f.write_str(" & ")?;
                self.write(f, b, 3)?;
                if level > 2 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.formula, 0)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.display(), f)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.display_indexed(), f)
    }
}

/// Parse a concrete formula. `|`, `=>`, `true` and `false` are expanded on the way in.
pub fn parse_formula(text: &str, lang: &Language) -> Result<Formula> {
    let mut cur = Cursor::new(text)?;
    let f = parse_formula_at(&mut cur, lang)?;
    cur.expect_eof()?;
    Ok(f)
}

pub(crate) fn parse_formula_at(cur: &mut Cursor, lang: &Language) -> Result<Formula> {
    let f = FormulaParser { lang, cur }.implication()?;
    Ok(f)
}

struct FormulaParser<'a, 'c> {
    lang: &'a Language,
    cur: &'c mut Cursor,
}

/// Splits `K2` into (`K`, Some(2)); returns None for non-operator identifiers.
fn operator(ident: &str) -> Option<(&'static str, Option<usize>)> {
    for name in ["Ob", "K", "X", "L"] {
        if let Some(rest) = ident.strip_prefix(name) {
            if rest.is_empty() {
                return Some((name, None));
            }
            if rest.bytes().all(|b| b.is_ascii_digit()) {
                return Some((name, rest.parse().ok().or(Some(usize::MAX))));
            }
        }
    }
    None
}

impl FormulaParser<'_, '_> {
    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.cur.eat(&Token::Implies) {
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.conjunction()?;
        while self.cur.eat(&Token::Pipe) {
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.cur.eat(&Token::Amp) {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn agent(&self, index: Option<usize>) -> Result<usize> {
        let agent = index.unwrap_or(1);
        self.lang.check_agent(agent)?;
        Ok(agent)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.cur.peek().clone() {
            Token::Bang => {
                self.cur.next();
                Ok(Formula::not(self.unary()?))
            }
            Token::LParen => {
                self.cur.next();
                let f = self.implication()?;
                self.cur.expect(&Token::RParen)?;
                Ok(f)
            }
            Token::Ident(id) if id == "true" => {
                self.cur.next();
                Formula::truth(self.lang)
            }
            Token::Ident(id) if id == "false" => {
                self.cur.next();
                Formula::falsity(self.lang)
            }
            Token::Ident(id) => match operator(&id) {
                Some(("L", _)) => self.cur.error("`L` is output-only; write `!K !...` instead"),
                Some(("K", index)) => {
                    self.cur.next();
                    let agent = self.agent(index)?;
                    Ok(Formula::know(agent, self.unary()?))
                }
                Some(("X", index)) => {
                    self.cur.next();
                    let agent = self.agent(index)?;
                    Ok(Formula::xknow(agent, self.unary()?))
                }
                Some(("Ob", index)) => {
                    self.cur.next();
                    let agent = self.agent(index)?;
                    self.cur.expect(&Token::LParen)?;
                    let t = parse_term_at(self.cur, self.lang.full())?;
                    self.cur.expect(&Token::RParen)?;
                    if !t.is_ground() {
                        return Err(Error::NotGround(t.to_string()));
                    }
                    if !self.lang.is_base_term(&t) {
                        return Err(Error::ObservationNotBase(t.to_string()));
                    }
                    Ok(Formula::Obs(agent, t))
                }
                _ => self.atom(),
            },
            Token::Var(_) => self.atom(),
            other => self.cur.error(format!("expected formula, found {other}")),
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        let t = parse_term_at(self.cur, self.lang.full())?;
        if !t.is_ground() {
            return Err(Error::NotGround(t.to_string()));
        }
        if t.head().is_some_and(|h| self.lang.ctor(h).is_some()) {
            return Err(Error::ReservedAtom(t.to_string()));
        }
        Ok(Formula::Atom(t))
    }
}

/// A literal of negation normal form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Literal {
    Prop(Term),
    Obs(usize, Term),
    /// `X` subformulas are kept as they are: their truth depends on their syntax.
    XKnow(usize, Formula),
}

/// Negation normal form over `∧`, `∨`, `K` and its dual `L = ¬K¬`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Nnf {
    Lit { positive: bool, literal: Literal },
    And(Box<Nnf>, Box<Nnf>),
    Or(Box<Nnf>, Box<Nnf>),
    Know(usize, Box<Nnf>),
    Possible(usize, Box<Nnf>),
}

impl Nnf {
    fn of(f: &Formula, positive: bool) -> Nnf {
        let lit = |literal| Nnf::Lit { positive, literal };
        match f {
            Formula::Atom(t) => lit(Literal::Prop(t.clone())),
            Formula::Obs(i, t) => lit(Literal::Obs(*i, t.clone())),
            Formula::XKnow(i, a) => lit(Literal::XKnow(*i, (**a).clone())),
            Formula::Not(a) => Nnf::of(a, !positive),
            Formula::And(a, b) if positive => Nnf::And(Box::new(Nnf::of(a, true)), Box::new(Nnf::of(b, true))),
            Formula::And(a, b) => Nnf::Or(Box::new(Nnf::of(a, false)), Box::new(Nnf::of(b, false))),
            Formula::Know(i, a) if positive => Nnf::Know(*i, Box::new(Nnf::of(a, true))),
            Formula::Know(i, a) => Nnf::Possible(*i, Box::new(Nnf::of(a, false))),
        }
    }

    /// Expand `∨` and `L` back into the core connectives.
    pub fn to_formula(&self) -> Formula {
        match self {
            Nnf::Lit { positive, literal } => {
                let f = match literal {
                    Literal::Prop(t) => Formula::Atom(t.clone()),
                    Literal::Obs(i, t) => Formula::Obs(*i, t.clone()),
                    Literal::XKnow(i, a) => Formula::xknow(*i, a.clone()),
                };
                if *positive {
                    f
                } else {
                    Formula::not(f)
                }
            }
            Nnf::And(a, b) => Formula::and(a.to_formula(), b.to_formula()),
            Nnf::Or(a, b) => Formula::or(a.to_formula(), b.to_formula()),
            Nnf::Know(i, a) => Formula::know(*i, a.to_formula()),
            Nnf::Possible(i, a) => Formula::not(Formula::know(*i, Formula::not(a.to_formula()))),
        }
    }

    /// True when no `X` literal is negated.
    pub fn x_literals_positive(&self) -> bool {
        match self {
            Nnf::Lit { positive, literal } => *positive || !matches!(literal, Literal::XKnow(..)),
            Nnf::And(a, b) | Nnf::Or(a, b) => a.x_literals_positive() && b.x_literals_positive(),
            Nnf::Know(_, a) | Nnf::Possible(_, a) => a.x_literals_positive(),
        }
    }

    fn max_agent(&self) -> usize {
        match self {
            Nnf::Lit { literal, .. } => match literal {
                Literal::Prop(_) => 0,
                Literal::Obs(i, _) => *i,
                Literal::XKnow(i, a) => (*i).max(a.max_agent()),
            },
            Nnf::And(a, b) | Nnf::Or(a, b) => a.max_agent().max(b.max_agent()),
            Nnf::Know(i, a) | Nnf::Possible(i, a) => (*i).max(a.max_agent()),
        }
    }

    // 1: disjunction, 2: conjunction, 3: prefix
    fn write(&self, f: &mut fmt::Formatter<'_>, level: u8, indexed: bool) -> fmt::Result {
        match self {
            Nnf::Lit { positive, literal } => {
                if !positive {
                    f.write_str("!")?;
                }
                match literal {
                    Literal::Prop(t) => write!(f, "{t}"),
                    Literal::Obs(i, t) => {
                        op(f, "Ob", *i, indexed)?;
                        write!(f, "({t})")
                    }
                    Literal::XKnow(i, a) => {
                        op(f, "X", *i, indexed)?;
                        let inner = FormulaDisplay { formula: a, indexed };
                        f.write_str(" ")?;
                        inner.write(f, a, 3)
                    }
                }
            }
            Nnf::And(a, b) | Nnf::Or(a, b) => {
                let (mine, sym) = if matches!(self, Nnf::And(..)) { (2, " & ") } else { (1, " | ") };
                if level > mine {
                    f.write_str("(")?;
                }
                a.write(f, mine, indexed)?;
                f.write_str(sym)?;
                b.write(f, mine + 1, indexed)?;
                if level > mine {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Nnf::Know(i, a) | Nnf::Possible(i, a) => {
                op(f, if matches!(self, Nnf::Know(..)) { "K" } else { "L" }, *i, indexed)?;
                f.write_str(" ")?;
                a.write(f, 3, indexed)
            }
        }
    }
}

impl fmt::Display for Nnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0, self.max_agent() > 1)
    }
}
