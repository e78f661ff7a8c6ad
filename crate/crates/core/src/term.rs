// SPDX-License-Identifier: Apache-2.0

//! Signatures, first-order terms, ground substitutions and one-way matching.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::syntax::{Cursor, Token};

/// Operation symbol or variable name.
pub type Symbol = Arc<str>;

/// A term over some signature: a variable or a symbol applied to arguments.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Symbol),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Arc::from(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::App(Arc::from(name), Vec::new())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(Arc::from(name), args)
    }

    pub fn head(&self) -> Option<&str> {
        match self {
            Term::App(f, _) => Some(f),
            Term::Var(_) => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(_, args) => args,
            Term::Var(_) => &[],
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Number of symbols needed to write the term; variables count one each.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// The term itself and all its descendants.
    pub fn subterms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        self.collect_subterms(&mut out);
        out
    }

    fn collect_subterms(&self, out: &mut BTreeSet<Term>) {
        if out.insert(self.clone()) {
            for a in self.args() {
                a.collect_subterms(out);
            }
        }
    }

    pub fn proper_subterms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        for a in self.args() {
            a.collect_subterms(&mut out);
        }
        out
    }

    /// Replace every bound variable; unbound variables are left in place.
    pub fn apply(&self, subst: &Substitution) -> Term {
        match self {
            Term::Var(v) => match subst.get(v) {
                Some(g) => g.as_term().clone(),
                None => self.clone(),
            },
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.apply(subst)).collect()),
        }
    }

    /// Renames every symbol with `f`; used to move rules between agents.
    pub fn map_symbols(&self, f: &impl Fn(&str) -> Option<String>) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::App(s, args) => {
                let name = f(s).map(Arc::from).unwrap_or_else(|| s.clone());
                Term::App(name, args.iter().map(|a| a.map_symbols(f)).collect())
            }
        }
    }

    pub fn any_symbol(&self, pred: &impl Fn(&str) -> bool) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(s, args) => pred(s) || args.iter().any(|a| a.any_symbol(pred)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::App(s, args) if args.is_empty() => f.write_str(s),
            Term::App(s, args) => {
                write!(f, "{s}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A variable-free term.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundTerm(Term);

impl GroundTerm {
    pub fn new(term: Term) -> Result<Self> {
        if term.is_ground() {
            Ok(GroundTerm(term))
        } else {
            Err(Error::NotGround(term.to_string()))
        }
    }

    pub fn constant(name: &str) -> Self {
        GroundTerm(Term::constant(name))
    }

    pub fn app(name: &str, args: Vec<GroundTerm>) -> Self {
        GroundTerm(Term::app(name, args.into_iter().map(GroundTerm::into_term).collect()))
    }

    pub fn as_term(&self) -> &Term {
        &self.0
    }

    pub fn into_term(self) -> Term {
        self.0
    }

    pub fn ground_subterms(&self) -> BTreeSet<GroundTerm> {
        self.0.subterms().into_iter().map(GroundTerm).collect()
    }

    pub fn ground_args(&self) -> impl Iterator<Item = GroundTerm> + '_ {
        self.0.args().iter().cloned().map(GroundTerm)
    }
}

impl Deref for GroundTerm {
    type Target = Term;
    fn deref(&self) -> &Term {
        &self.0
    }
}

impl TryFrom<Term> for GroundTerm {
    type Error = Error;
    fn try_from(term: Term) -> Result<Self> {
        GroundTerm::new(term)
    }
}

impl From<GroundTerm> for Term {
    fn from(g: GroundTerm) -> Term {
        g.0
    }
}

impl fmt::Display for GroundTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for GroundTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// A finite map from variables to ground terms.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution(BTreeMap<Symbol, GroundTerm>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, var: &str, value: GroundTerm) -> Option<GroundTerm> {
        self.0.insert(Arc::from(var), value)
    }

    pub fn with(mut self, var: &str, value: GroundTerm) -> Self {
        self.bind(var, value);
        self
    }

    pub fn get(&self, var: &str) -> Option<&GroundTerm> {
        self.0.get(var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &GroundTerm)> {
        self.0.iter()
    }

    /// Apply and demand a ground result.
    pub fn ground(&self, term: &Term) -> Result<GroundTerm> {
        GroundTerm::new(term.apply(self))
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "?{v}:={t}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromIterator<(Symbol, GroundTerm)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Symbol, GroundTerm)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

/// One-way matching: find the minimal `rho` with `pattern.apply(rho) == subject`.
///
/// Repeated variables must bind consistently.
pub fn match_term(pattern: &Term, subject: &GroundTerm) -> Option<Substitution> {
    let mut rho = Substitution::new();
    if match_into(pattern, subject.as_term(), &mut rho) {
        Some(rho)
    } else {
        None
    }
}

/// Extend `rho` so that `pattern` matches `subject`. On failure `rho` may hold partial bindings.
pub fn match_into(pattern: &Term, subject: &Term, rho: &mut Substitution) -> bool {
    match pattern {
        Term::Var(v) => match rho.0.get(v) {
            Some(bound) => bound.as_term() == subject,
            None => {
                rho.0.insert(v.clone(), GroundTerm(subject.clone()));
                true
            }
        },
        Term::App(f, pargs) => match subject {
            Term::App(g, sargs) if f == g && pargs.len() == sargs.len() => {
                pargs.iter().zip(sargs).all(|(p, s)| match_into(p, s, rho))
            }
            _ => false,
        },
    }
}

/// Operation symbols with their arities.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: BTreeMap<Symbol, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_symbols<'a>(symbols: impl IntoIterator<Item = (&'a str, usize)>) -> Result<Self> {
        let mut sig = Signature::new();
        for (name, arity) in symbols {
            sig.declare(name, arity)?;
        }
        Ok(sig)
    }

    /// Declare a symbol; redeclaring with the same arity is a no-op.
    pub fn declare(&mut self, name: &str, arity: usize) -> Result<()> {
        match self.symbols.get(name) {
            Some(&a) if a == arity => Ok(()),
            Some(&a) => Err(Error::DuplicateSymbol {
                symbol: name.to_string(),
                first: a,
                second: arity,
            }),
            None => {
                self.symbols.insert(Arc::from(name), arity);
                Ok(())
            }
        }
    }

    pub fn merge(&mut self, other: &Signature) -> Result<()> {
        for (name, &arity) in &other.symbols {
            self.declare(name, arity)?;
        }
        Ok(())
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.symbols.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.symbols.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.symbols.iter().map(|(k, &v)| (&**k, v))
    }

    /// Arity-0 symbols in lexicographic order.
    pub fn constants(&self) -> impl Iterator<Item = &str> {
        self.iter().filter(|(_, a)| *a == 0).map(|(n, _)| n)
    }

    /// Verify that every application matches a declared arity.
    pub fn check_term(&self, term: &Term) -> Result<()> {
        match term {
            Term::Var(_) => Ok(()),
            Term::App(f, args) => {
                let expected = self.arity(f).ok_or_else(|| Error::UnknownSymbol(f.to_string()))?;
                if expected != args.len() {
                    return Err(Error::ArityMismatch {
                        symbol: f.to_string(),
                        expected,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
        }
    }

    pub fn parse_term(&self, text: &str) -> Result<Term> {
        let mut cur = Cursor::new(text)?;
        let t = parse_term_at(&mut cur, self)?;
        cur.expect_eof()?;
        Ok(t)
    }

    pub fn parse_ground(&self, text: &str) -> Result<GroundTerm> {
        GroundTerm::new(self.parse_term(text)?)
    }

    /// Parse a comma-separated list of terms (possibly empty).
    pub fn parse_term_list(&self, text: &str) -> Result<Vec<Term>> {
        let mut cur = Cursor::new(text)?;
        let mut out = Vec::new();
        if cur.peek() != &Token::Eof {
            out.push(parse_term_at(&mut cur, self)?);
            while cur.eat(&Token::Comma) {
                out.push(parse_term_at(&mut cur, self)?);
            }
        }
        cur.expect_eof()?;
        Ok(out)
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|(n, a)| format!("{n}/{a}"))).finish()
    }
}

pub(crate) fn parse_term_at(cur: &mut Cursor, sig: &Signature) -> Result<Term> {
    match cur.peek().clone() {
        Token::Var(v) => {
            cur.next();
            Ok(Term::var(&v))
        }
        Token::Ident(name) => {
            let pos = cur.pos();
            cur.next();
            let mut args = Vec::new();
            if cur.eat(&Token::LParen) {
                args.push(parse_term_at(cur, sig)?);
                while cur.eat(&Token::Comma) {
                    args.push(parse_term_at(cur, sig)?);
                }
                cur.expect(&Token::RParen)?;
            }
            let expected = sig.arity(&name).ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
            if expected != args.len() {
                let _ = pos;
                return Err(Error::ArityMismatch {
                    symbol: name,
                    expected,
                    found: args.len(),
                });
            }
            Ok(Term::app(&name, args))
        }
        other => cur.error(format!("expected term, found {other}")),
    }
}
