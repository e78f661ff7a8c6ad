// SPDX-License-Identifier: Apache-2.0

//! The base axiom system and the axioms generated from deduction rules.

use std::fmt;

use crate::deduction::DeductiveSystem;
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::language::Language;
use crate::term::{GroundTerm, Substitution, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    /// Part of the base system, for the given agent.
    Base { agent: usize },
    /// Generated from rule `rule` of the agent's deductive system.
    FromRule { rule: usize, agent: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Template {
    /// `antecedent₁ ∧ … ∧ antecedentₖ ⇒ consequent`, `true ⇒ …` when `k = 0`.
    Implication { antecedent: Vec<Formula>, consequent: Formula },
    /// Tautologies and inference rules; documented, not instantiable.
    Documentation(String),
}

/// An axiom schema. Formula metavariables appear as atoms `?φ`, `?ψ`; proposition and
/// term metavariables as ordinary term variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomSchema {
    pub name: String,
    pub origin: Origin,
    pub template: Template,
    language: Language,
}

impl AxiomSchema {
    pub fn is_instantiable(&self) -> bool {
        matches!(self.template, Template::Implication { .. })
    }

    pub fn language(&self) -> &Language {
        &self.language
    }

    /// The template as text, e.g. `X ?φ => K X ?φ`.
    pub fn render(&self) -> String {
        match &self.template {
            Template::Documentation(text) => text.clone(),
            Template::Implication { antecedent, consequent } => {
                let lhs = match antecedent.iter().cloned().reduce(Formula::and) {
                    None => "true".to_string(),
                    Some(conj) => conj.pretty_operand(&self.language).to_string(),
                };
                format!("{lhs} => {}", consequent.pretty(&self.language))
            }
        }
    }

    /// Replace every metavariable, producing a concrete formula.
    pub fn instantiate(&self, rho: &Substitution) -> Result<Formula> {
        let Template::Implication { antecedent, consequent } = &self.template else {
            return Err(Error::Unsupported(format!("{} is not an instantiable schema", self.name)));
        };
        let lang = &self.language;
        let concrete = |f: &Formula| -> Result<Formula> {
            let t = f.to_term(lang).apply(rho);
            if let Some(v) = t.vars().into_iter().next() {
                return Err(Error::UnboundMetavariable(format!("?{v}")));
            }
            let out = Formula::from_term(&t, lang)?;
            out.validate(lang)?;
            Ok(out)
        };
        let lhs = antecedent.iter().map(concrete).collect::<Result<Vec<_>>>()?;
        Ok(Formula::implies(Formula::conj(lang, lhs)?, concrete(consequent)?))
    }

    /// Metavariables of the template, formula metavariables first.
    pub fn metavariables(&self) -> Vec<String> {
        let Template::Implication { antecedent, consequent } = &self.template else {
            return Vec::new();
        };
        let mut vars = consequent.vars();
        for f in antecedent {
            vars.extend(f.vars());
        }
        let mut out: Vec<String> = vars.into_iter().map(|v| v.to_string()).collect();
        out.sort_by_key(|v| (!is_formula_meta(v), v.clone()));
        out
    }
}

impl fmt::Display for AxiomSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.name, self.render())
    }
}

pub const PHI: &str = "φ";
pub const PSI: &str = "ψ";
pub const PROP: &str = "p";

pub fn is_formula_meta(name: &str) -> bool {
    name == PHI || name == PSI
}

/// Bind a formula metavariable to a formula through its term encoding.
pub fn bind_formula(rho: &mut Substitution, meta: &str, phi: &Formula, lang: &Language) -> Result<()> {
    rho.bind(meta, phi.to_ground_term(lang)?);
    Ok(())
}

fn meta(name: &str) -> Formula {
    Formula::Atom(Term::var(name))
}

/// K1-K5 and X1-X3 for every agent, preceded by the tautology and inference rule entries.
pub fn base_axioms(lang: &Language) -> Vec<AxiomSchema> {
    let n = lang.agents();
    let named = |base: &str, i: usize| if n == 1 { base.to_string() } else { format!("{base}_{i}") };
    let mk = |name: String, origin: Origin, template: Template| AxiomSchema {
        name,
        origin,
        template,
        language: lang.clone(),
    };
    let imp = |antecedent: Vec<Formula>, consequent: Formula| Template::Implication { antecedent, consequent };
    let phi = meta(PHI);
    let psi = meta(PSI);
    let p = Term::var(PROP);

    let mut out = vec![
        mk(
            "Taut".into(),
            Origin::Base { agent: 0 },
            Template::Documentation("all instances of propositional tautologies".into()),
        ),
        mk(
            "MP".into(),
            Origin::Base { agent: 0 },
            Template::Documentation("from ?φ and ?φ => ?ψ infer ?ψ".into()),
        ),
    ];
    for i in 1..=n {
        let k = |f: Formula| Formula::know(i, f);
        let x = |f: Formula| Formula::xknow(i, f);
        let ob = Formula::obs(i, p.clone());
        let origin = Origin::Base { agent: i };
        out.push(mk(
            named("K1", i),
            origin.clone(),
            imp(
                vec![k(phi.clone()), k(Formula::implies(phi.clone(), psi.clone()))],
                k(psi.clone()),
            ),
        ));
        let op = if n == 1 { "K".to_string() } else { format!("K{i}") };
        out.push(mk(
            named("K2", i),
            origin.clone(),
            Template::Documentation(format!("from ?φ infer {op} ?φ")),
        ));
        out.push(mk(named("K3", i), origin.clone(), imp(vec![k(phi.clone())], phi.clone())));
        out.push(mk(named("K4", i), origin.clone(), imp(vec![k(phi.clone())], k(k(phi.clone())))));
        out.push(mk(
            named("K5", i),
            origin.clone(),
            imp(vec![Formula::not(k(phi.clone()))], k(Formula::not(k(phi.clone())))),
        ));
        out.push(mk(named("X1", i), origin.clone(), imp(vec![x(phi.clone())], k(x(phi.clone())))));
        out.push(mk(named("X2", i), origin.clone(), imp(vec![ob.clone()], x(ob.clone()))));
        out.push(mk(named("X3", i), origin, imp(vec![ob.clone()], k(ob))));
    }
    out
}

/// One schema per rule: `X t₁^R ∧ … ∧ X tₖ^R ⇒ X t^R` for the given agent.
pub fn rule_axioms(system: &DeductiveSystem, agent: usize) -> Result<Vec<Result<AxiomSchema>>> {
    let lang = system.language();
    lang.check_agent(agent)?;
    Ok(system
        .rules()
        .iter()
        .enumerate()
        .map(|(id, rule)| {
            let tr = |t: &Term| {
                Formula::from_term(t, lang)
                    .map(|f| Formula::xknow(agent, f))
                    .map_err(|e| Error::Translation(format!("rule {id}: {e}")))
            };
            let antecedent = rule.premises.iter().map(tr).collect::<Result<Vec<_>>>()?;
            Ok(AxiomSchema {
                name: if lang.agents() == 1 {
                    format!("R{id}")
                } else {
                    format!("R{id}_{agent}")
                },
                origin: Origin::FromRule { rule: id, agent },
                template: Template::Implication {
                    antecedent,
                    consequent: tr(&rule.conclusion)?,
                },
                language: lang.clone(),
            })
        })
        .collect())
}

/// Convenience for tests and tools: bind `?φ`, `?ψ` to formulas and `?p` to a term.
pub fn base_substitution(
    lang: &Language,
    phi: &Formula,
    psi: &Formula,
    prop: &GroundTerm,
) -> Result<Substitution> {
    let mut rho = Substitution::new();
    bind_formula(&mut rho, PHI, phi, lang)?;
    bind_formula(&mut rho, PSI, psi, lang)?;
    rho.bind(PROP, prop.clone());
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::presets::{load_preset, preset, relabel};
    use crate::term::Signature;

    fn find<'a>(list: &'a [AxiomSchema], name: &str) -> &'a AxiomSchema {
        list.iter().find(|a| a.name == name).unwrap()
    }

    #[test]
    fn single_agent_base() {
        let (sig, _) = load_preset("DY").unwrap();
        let lang = Language::new(sig, 1).unwrap();
        let ax = base_axioms(&lang);
        assert_eq!(find(&ax, "X1").render(), "X ?φ => K X ?φ");
        assert_eq!(find(&ax, "K5").render(), "!K ?φ => K !K ?φ");
        assert_eq!(find(&ax, "K1").render(), "K ?φ & K (?φ => ?ψ) => K ?ψ");
        assert_eq!(find(&ax, "X2").render(), "Ob(?p) => X Ob(?p)");
        assert!(!find(&ax, "Taut").is_instantiable());
        assert!(!find(&ax, "K2").is_instantiable());
    }

    #[test]
    fn multi_agent_base() {
        let lang = Language::new(Signature::from_symbols([("p", 0)]).unwrap(), 2).unwrap();
        let ax = base_axioms(&lang);
        assert_eq!(find(&ax, "X3_2").render(), "Ob2(?p) => K2 Ob2(?p)");
        assert_eq!(ax.iter().filter(|a| a.is_instantiable()).count(), 14);
    }

    #[test]
    fn rule_schemas() {
        let dy = preset("DY_PRIME").unwrap();
        let ax: Vec<AxiomSchema> = rule_axioms(&dy, 1).unwrap().into_iter().map(Result::unwrap).collect();
        assert_eq!(ax[0].render(), "X recv(?m) => X has(?m)");
        assert_eq!(ax[4].render(), "X Ob(recv(?t)) => X recv(?t)");
        assert_eq!(ax[1].render(), "X has(inv(?k)) & X has(encr(?m,?k)) => X has(?m)");

        let lang = dy.language().clone();
        let empty = DeductiveSystem::new(lang.clone(), vec![crate::deduction::Rule::new(vec![], lang.full().parse_term("has(m)").unwrap())]).unwrap();
        let ax = rule_axioms(&empty, 1).unwrap().remove(0).unwrap();
        assert_eq!(ax.render(), "true => X has(m)");
    }

    #[test]
    fn instantiation() {
        let dy = preset("DY_PRIME").unwrap();
        let lang = dy.language().clone();
        let ax = rule_axioms(&dy, 1).unwrap().remove(0).unwrap();
        let rho = Substitution::new().with("m", lang.base().parse_ground("m").unwrap());
        let f = ax.instantiate(&rho).unwrap();
        assert_eq!(f, parse_formula("X recv(m) => X has(m)", &lang).unwrap());
        assert!(matches!(ax.instantiate(&Substitution::new()), Err(Error::UnboundMetavariable(_))));

        let base = base_axioms(&lang);
        let mut rho = Substitution::new();
        bind_formula(&mut rho, PHI, &parse_formula("has(m)", &lang).unwrap(), &lang).unwrap();
        let f = find(&base, "X1").instantiate(&rho).unwrap();
        assert_eq!(f, parse_formula("X has(m) => K X has(m)", &lang).unwrap());
    }

    #[test]
    fn reports_untranslatable_rules() {
        let (_, sx) = load_preset("SELF_X").unwrap();
        let lang = Language::new(Signature::from_symbols([("f", 1), ("a", 0)]).unwrap(), 1).unwrap();
        let rules = vec![
            crate::presets::parse_rule("ob(not(?x)) -> f(?x)", lang.full()).unwrap(),
            crate::presets::parse_rule("f(?x) -> f(f(?x))", lang.full()).unwrap(),
        ];
        let d = DeductiveSystem::new(lang.clone(), rules).unwrap();
        let out = rule_axioms(&d, 1).unwrap();
        assert!(matches!(out[0], Err(Error::Translation(_))));
        assert!(out[1].is_ok());
        let sx = relabel(&sx, 1, &lang).unwrap();
        let ax = rule_axioms(&sx, 1).unwrap().remove(0).unwrap();
        assert_eq!(ax.render(), "X ?t => X X ?t");
    }
}
