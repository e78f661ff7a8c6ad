// SPDX-License-Identifier: Apache-2.0

//! Built-in deductive systems and rule transformers.

use crate::deduction::{DeductiveSystem, Rule};
use crate::error::{Error, Result};
use crate::language::{Ctor, Language};
use crate::term::{GroundTerm, Signature, Term};

struct Preset {
    name: &'static str,
    file: &'static str,
    sig: &'static [(&'static str, usize)],
    rules: &'static [&'static str],
}

const DY_SIG: &[(&str, usize)] = &[
    ("conc", 2),
    ("encr", 2),
    ("has", 1),
    ("inv", 1),
    ("k1", 0),
    ("k2", 0),
    ("m", 0),
    ("recv", 1),
];

const DY_CONSTR_SIG: &[(&str, usize)] = &[
    ("conc", 2),
    ("constr", 1),
    ("encr", 2),
    ("has", 1),
    ("inv", 1),
    ("k1", 0),
    ("k2", 0),
    ("m", 0),
    ("recv", 1),
];

const DY_RULES: &[&str] = &[
    "recv(?m) -> has(?m)",
    "has(inv(?k)), has(encr(?m,?k)) -> has(?m)",
    "has(conc(?a,?b)) -> has(?a)",
    "has(conc(?a,?b)) -> has(?b)",
];

const PRESETS: &[Preset] = &[
    Preset {
        name: "DY",
        file: "dy.sys",
        sig: DY_SIG,
        rules: DY_RULES,
    },
    Preset {
        name: "DY_CONSTR",
        file: "dy_constr.sys",
        sig: DY_CONSTR_SIG,
        rules: &[
            "recv(?m) -> has(?m)",
            "has(inv(?k)), has(encr(?m,?k)) -> has(?m)",
            "has(conc(?a,?b)) -> has(?a)",
            "has(conc(?a,?b)) -> has(?b)",
            "has(?m) -> constr(?m)",
            "constr(?k), constr(?m) -> constr(encr(?m,?k))",
            "constr(?a), constr(?b) -> constr(conc(?a,?b))",
        ],
    },
    Preset {
        name: "DY_PRIME",
        file: "dy_prime.sys",
        sig: DY_SIG,
        rules: &[
            "recv(?m) -> has(?m)",
            "has(inv(?k)), has(encr(?m,?k)) -> has(?m)",
            "has(conc(?a,?b)) -> has(?a)",
            "has(conc(?a,?b)) -> has(?b)",
            "ob(recv(?t)) -> recv(?t)",
        ],
    },
    Preset {
        name: "BOOL",
        file: "bool.sys",
        sig: &[("p", 0), ("q", 0)],
        rules: &[
            "?t -> not(not(?t))",
            "not(not(?t)) -> ?t",
            "?t -> not(and(not(?t),not(?u)))",
            "?u -> not(and(not(?t),not(?u)))",
            "not(and(?t,not(?u))), ?t -> ?u",
            "not(and(?t,not(?u))), not(?u) -> not(?t)",
            "?t, ?u -> and(?t,?u)",
            "and(?t,?u) -> ?t",
            "and(?t,?u) -> ?u",
            "?t, not(?t) -> false",
            "false -> ?t",
        ],
    },
    Preset {
        name: "SELF_X",
        file: "self_x.sys",
        sig: &[],
        rules: &["?t -> xknow(?t)"],
    },
];

fn find(name: &str) -> Result<&'static Preset> {
    PRESETS
        .iter()
        .find(|p| p.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}

/// Preset names in catalog order.
pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|p| p.name)
}

/// File name under which the preset is shipped in `systems/`.
pub fn preset_file(name: &str) -> Result<&'static str> {
    Ok(find(name)?.file)
}

pub(crate) fn parse_rule(text: &str, sig: &Signature) -> Result<Rule> {
    let (premises, conclusion) = match text.split_once("->") {
        Some((p, c)) => (sig.parse_term_list(p.trim())?, c),
        None => (Vec::new(), text.trim_start().trim_start_matches("|-")),
    };
    Ok(Rule::new(premises, sig.parse_term(conclusion.trim())?))
}

/// The bundled base signature and the single-agent system of a preset.
pub fn load_preset(name: &str) -> Result<(Signature, DeductiveSystem)> {
    let p = find(name)?;
    let sig = Signature::from_symbols(p.sig.iter().copied())?;
    let lang = Language::new(sig.clone(), 1)?;
    let rules = p
        .rules
        .iter()
        .map(|r| parse_rule(r, lang.full()))
        .collect::<Result<Vec<_>>>()?;
    Ok((sig, DeductiveSystem::new(lang, rules)?))
}

pub fn preset(name: &str) -> Result<DeductiveSystem> {
    Ok(load_preset(name)?.1)
}

/// Move a single-agent system to agent `agent` of `lang`, renaming `ob`/`know`/`xknow`.
///
/// `lang` must already contain the system's base symbols.
pub fn relabel(system: &DeductiveSystem, agent: usize, lang: &Language) -> Result<DeductiveSystem> {
    lang.check_agent(agent)?;
    let rename = lang.relabel_from_single(agent);
    let rules = system
        .rules()
        .iter()
        .map(|r| {
            Rule::new(
                r.premises.iter().map(|t| t.map_symbols(&rename)).collect(),
                r.conclusion.map_symbols(&rename),
            )
        })
        .collect();
    DeductiveSystem::new(lang.clone(), rules)
}

/// The containment order on Dolev-Yao messages: reflexive, through both halves of
/// a concatenation and through the plaintext (not the key) of an encryption.
pub fn subterm_rel(t: &GroundTerm, u: &GroundTerm) -> bool {
    fn below(t: &Term, u: &Term) -> bool {
        if t == u {
            return true;
        }
        match u {
            Term::App(f, args) if &**f == "conc" && args.len() == 2 => below(t, &args[0]) || below(t, &args[1]),
            Term::App(f, args) if &**f == "encr" && args.len() == 2 => below(t, &args[0]),
            _ => false,
        }
    }
    below(t, u)
}

/// Extend `d_i` so that it can replay the deductions of agent `j` running `d_j`.
///
/// Both systems must already use the agent naming of their common language.
pub fn simulative_extension(d_i: &DeductiveSystem, d_j: &DeductiveSystem, j: usize) -> Result<DeductiveSystem> {
    let merged = d_i.union(&DeductiveSystem::empty(d_j.language().clone()))?;
    let lang = merged.language().clone();
    lang.check_agent(j)?;
    let wrap = |t: &Term| lang.mk(Ctor::XKnow(j), vec![t.clone()]);
    let ob_t = lang.mk(Ctor::Ob(j), vec![Term::var("t")]);
    let mut rules = d_i.rules().to_vec();
    rules.push(Rule::new(vec![ob_t.clone()], wrap(&ob_t)));
    for r in d_j.rules() {
        rules.push(Rule::new(r.premises.iter().map(wrap).collect(), wrap(&r.conclusion)));
    }
    DeductiveSystem::new(lang, rules)
}
