// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use dedukt::axioms::{base_axioms, rule_axioms, AxiomSchema, Origin};
use dedukt::files::{infer_signature, load_model, load_system, parse_ground_list, parse_signature, print_model, print_system, read};
use dedukt::formula::parse_formula;
use dedukt::presets::{load_preset, preset_file, preset_names, relabel};
use dedukt::sat::{sat_fixed_d, sat_general, sat_multi, translate_tilde, FixedDOptions, SatVerdict, Witness};
use dedukt::{derive, DeductiveSystem, Error, Formula, Language, Signature, Truth, Verdict};
use serde::Serialize;

use crate::report::{envelope, steps, truth_code, truth_word, Output, StepDoc};
use crate::status;
use crate::{AxiomsArgs, CheckArgs, Command, DeriveArgs, FormulaArgs, SatArgs, SearchArgs, SystemArgs, TranslateArgs, ValidArgs};

pub struct Fail {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Unsupported(_) => status::USAGE,
            Error::WitnessReplay(_) => status::INTERNAL,
            _ => status::INPUT,
        };
        Fail {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Fail {
    Fail {
        code: status::USAGE,
        message: message.into(),
    }
}

type Outcome = Result<u8, Fail>;

pub fn run(command: &Command, out: &Output) -> Outcome {
    match command {
        Command::Derive(a) => run_derive(a, out),
        Command::Check(a) => run_check(a, out),
        Command::Valid(a) => run_valid(a, out),
        Command::Sat(a) => run_sat(a, out),
        Command::Axioms(a) => run_axioms(a, out),
        Command::Nnf(a) => run_nnf(a, out),
        Command::Translate(a) => run_translate(a, out),
        Command::Presets(a) => run_presets(a.name.as_deref(), out),
    }
}

/// Highest agent index written in `text`, e.g. 2 for `K1 X2 p`.
fn guess_agents(text: &str) -> usize {
    text.split(|c: char| !c.is_ascii_alphanumeric() && c != '_')
        .filter_map(|w| {
            ["Ob", "K", "X", "L"]
                .iter()
                .find_map(|op| w.strip_prefix(op))
                .filter(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
                .and_then(|rest| rest.parse().ok())
        })
        .max()
        .unwrap_or(1)
}

fn extra_signature(args: &SystemArgs) -> Result<Signature, Fail> {
    match &args.sig {
        Some(path) => Ok(parse_signature(&read(path)?)?),
        None => Ok(Signature::new()),
    }
}

/// The deductive system named by `--preset` or `--system`, over `agents` agents and
/// the extra symbols of `--sig` and `mentioned`.
fn system(args: &SystemArgs, agents: usize, mentioned: &Signature) -> Result<Option<DeductiveSystem>, Fail> {
    let mut extra = extra_signature(args)?;
    extra.merge(mentioned)?;
    if let Some(name) = &args.preset {
        let (sig, sys) = load_preset(name)?;
        let mut base = sig;
        base.merge(&extra)?;
        let lang = Language::new(base, agents)?;
        return Ok(Some(if agents == 1 {
            sys.with_language(lang)?
        } else {
            relabel(&sys, 1, &lang)?
        }));
    }
    if let Some(path) = &args.system {
        return Ok(Some(load_system(path, agents, &extra)?));
    }
    Ok(None)
}

/// Language and optional system for commands that take formula or term text.
fn language(args: &SystemArgs, texts: &[&str]) -> Result<(Language, Option<DeductiveSystem>), Fail> {
    let agents = match args.agents {
        Some(n) => n as usize,
        None => texts.iter().map(|t| guess_agents(t)).max().unwrap_or(1),
    };
    // with a signature file the symbols are checked; otherwise they are inferred
    let mentioned = if args.sig.is_some() {
        Signature::new()
    } else {
        infer_signature(texts.iter().copied())?
    };
    if let Some(sys) = system(args, agents, &mentioned)? {
        return Ok((sys.language().clone(), Some(sys)));
    }
    let mut base = extra_signature(args)?;
    base.merge(&mentioned)?;
    Ok((Language::new(base, agents)?, None))
}

#[derive(Serialize)]
struct DeriveDoc {
    verdict: &'static str,
    strategy: String,
    goal: String,
    steps: Vec<StepDoc>,
}

fn run_derive(a: &DeriveArgs, out: &Output) -> Outcome {
    let agents = a.system.agents.unwrap_or(1) as usize;
    let Some(sys) = system(&a.system, agents, &Signature::new())? else {
        return Err(usage("derive needs --preset or --system"));
    };
    let sig = sys.language().full();
    let gamma = if a.from.trim().is_empty() {
        Vec::new()
    } else {
        sig.parse_term_list(&a.from)?
    };
    let goal = sig.parse_ground(&a.goal)?;
    let verdict = derive(&sys, &gamma, &goal, a.strategy)?;
    let (word, code, trace) = match &verdict {
        Verdict::Derivable(d) => ("derivable", status::YES, Some(d)),
        Verdict::NotDerivable => ("not derivable", status::NO, None),
        Verdict::Unknown => ("unknown", status::UNKNOWN, None),
    };
    let doc = DeriveDoc {
        verdict: match code {
            status::YES => "derivable",
            status::NO => "not_derivable",
            _ => "unknown",
        },
        strategy: a.strategy.to_string(),
        goal: goal.to_string(),
        steps: trace.map(steps).unwrap_or_default(),
    };
    out.emit(
        || {
            let mut text = format!("{}\n", out.verdict(word, code));
            if let Some(d) = trace {
                text.push_str(&d.to_string());
            }
            text
        },
        &envelope("derive", doc),
    );
    Ok(code)
}

#[derive(Serialize)]
struct CheckDoc {
    state: String,
    formula: String,
    value: &'static str,
}

fn run_check(a: &CheckArgs, out: &Output) -> Outcome {
    let m = load_model(&a.model)?;
    let phi = parse_formula(&a.formula, m.language())?;
    let value = m.check(&a.state, &phi, a.strategy)?;
    let doc = CheckDoc {
        state: a.state.clone(),
        formula: phi.pretty(m.language()).to_string(),
        value: truth_word(value),
    };
    out.emit(
        || format!("{}\n", out.verdict(truth_word(value), truth_code(value))),
        &envelope("check", doc),
    );
    Ok(truth_code(value))
}

/// Search for a model of `phi`, with `sys` fixed when given.
fn search(phi: &Formula, lang: &Language, sys: Option<&DeductiveSystem>, s: &SearchArgs) -> Result<SatVerdict<Witness>, Fail> {
    if let Some(sys) = sys {
        let pool = match &s.pool {
            Some(text) => Some(parse_ground_list(text, lang.base())?.into_iter().collect::<BTreeSet<_>>()),
            None => None,
        };
        let opts = FixedDOptions {
            max_obs: s.max_obs,
            pool,
            strategy: s.strategy,
        };
        return match sat_fixed_d(phi, sys, &opts) {
            Err(Error::StrategyEscalation(goal)) => Ok(SatVerdict::UnknownAtBound(format!(
                "derivability of `{goal}` is undecided under {}",
                s.strategy
            ))),
            r => Ok(r?),
        };
    }
    if s.max_obs.is_some() || s.pool.is_some() {
        return Err(usage("--max-obs and --pool need --preset or --system"));
    }
    if phi.max_agent() > 1 {
        Ok(sat_multi(phi, lang, s.max_states)?)
    } else {
        Ok(sat_general(phi, lang)?)
    }
}

#[derive(Serialize)]
struct SatDoc {
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    state: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<String>,
}

fn sat_doc(v: &SatVerdict<Witness>, yes: &'static str, no: &'static str) -> (SatDoc, u8) {
    match v {
        SatVerdict::Sat(w) => (
            SatDoc {
                verdict: yes,
                reason: None,
                state: Some(w.state.clone()),
                model: Some(witness_text(w)),
            },
            status::YES,
        ),
        SatVerdict::Unsat => (
            SatDoc {
                verdict: no,
                reason: None,
                state: None,
                model: None,
            },
            status::NO,
        ),
        SatVerdict::UnknownAtBound(why) => (
            SatDoc {
                verdict: "unknown",
                reason: Some(why.clone()),
                state: None,
                model: None,
            },
            status::UNKNOWN,
        ),
    }
}

fn witness_text(w: &Witness) -> String {
    format!("# designated state: {}\n{}", w.state, print_model(&w.structure))
}

fn write_witness(path: &Path, w: &Witness) -> Result<(), Fail> {
    std::fs::write(path, witness_text(w)).map_err(|e| Fail {
        code: status::INPUT,
        message: format!("{}: {e}", path.display()),
    })
}

fn run_sat(a: &SatArgs, out: &Output) -> Outcome {
    let (lang, sys) = language(&a.system, &[&a.formula])?;
    let phi = parse_formula(&a.formula, &lang)?;
    let verdict = search(&phi, &lang, sys.as_ref(), &a.search)?;
    if let (Some(path), SatVerdict::Sat(w)) = (&a.witness, &verdict) {
        write_witness(path, w)?;
    }
    let (mut doc, code) = sat_doc(&verdict, "sat", "unsat");
    let mut text = format!("{}\n", out.verdict(doc.verdict, code));
    if let Some(why) = &doc.reason {
        text.push_str(&format!("# {why}\n"));
    }
    match (&doc.model, &a.witness) {
        (Some(_), Some(path)) => {
            text.push_str(&format!("# witness written to {}\n", path.display()));
            doc.model = None;
        }
        (Some(model), None) => text.push_str(model),
        _ => {}
    }
    out.emit(|| text, &envelope("sat", &doc));
    Ok(code)
}

#[derive(Serialize)]
struct ModelValidDoc {
    value: &'static str,
    states: BTreeMap<String, &'static str>,
}

fn run_valid(a: &ValidArgs, out: &Output) -> Outcome {
    if let Some(path) = &a.model {
        let m = load_model(path)?;
        let phi = parse_formula(&a.formula, m.language())?;
        let labels = m.label(&phi, a.search.strategy)?;
        let value = labels.iter().fold(Truth::True, |acc, &t| acc.and(t));
        let states: BTreeMap<String, &'static str> = m
            .states()
            .iter()
            .zip(&labels)
            .map(|(s, &t)| (s.name.clone(), truth_word(t)))
            .collect();
        let failing: Vec<&str> = m
            .states()
            .iter()
            .zip(&labels)
            .filter(|(_, &t)| t != Truth::True)
            .map(|(s, _)| s.name.as_str())
            .collect();
        let code = truth_code(value);
        out.emit(
            || {
                let mut text = out.verdict(truth_word(value), code);
                if !failing.is_empty() {
                    text.push_str(&format!(" (not true at {})", failing.join(", ")));
                }
                text + "\n"
            },
            &envelope(
                "valid",
                ModelValidDoc {
                    value: truth_word(value),
                    states,
                },
            ),
        );
        return Ok(code);
    }
    let (lang, sys) = language(&a.system, &[&a.formula])?;
    let phi = parse_formula(&a.formula, &lang)?;
    let verdict = search(&Formula::not(phi), &lang, sys.as_ref(), &a.search)?;
    // a model of the negation is a counterexample
    let (doc, code) = sat_doc(&verdict, "invalid", "valid");
    let code = match code {
        status::YES => status::NO,
        status::NO => status::YES,
        c => c,
    };
    out.emit(
        || {
            let mut text = format!("{}\n", out.verdict(doc.verdict, code));
            if let Some(why) = &doc.reason {
                text.push_str(&format!("# {why}\n"));
            }
            if let Some(model) = &doc.model {
                text.push_str("# counterexample\n");
                text.push_str(model);
            }
            text
        },
        &envelope("valid", &doc),
    );
    Ok(code)
}

#[derive(Serialize)]
struct AxiomDoc {
    name: String,
    agent: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    rule: Option<usize>,
    schema: String,
    instantiable: bool,
}

#[derive(Serialize)]
struct SkippedDoc {
    rule: usize,
    reason: String,
}

#[derive(Serialize)]
struct AxiomsDoc {
    axioms: Vec<AxiomDoc>,
    skipped: Vec<SkippedDoc>,
}

fn axiom_doc(a: &AxiomSchema) -> AxiomDoc {
    let (agent, rule) = match a.origin {
        Origin::Base { agent } => (agent, None),
        Origin::FromRule { rule, agent } => (agent, Some(rule)),
    };
    AxiomDoc {
        name: a.name.clone(),
        agent,
        rule,
        schema: a.render(),
        instantiable: a.is_instantiable(),
    }
}

fn run_axioms(a: &AxiomsArgs, out: &Output) -> Outcome {
    let (lang, sys) = language(&a.system, &[])?;
    let mut doc = AxiomsDoc {
        axioms: base_axioms(&lang).iter().map(axiom_doc).collect(),
        skipped: Vec::new(),
    };
    if let Some(sys) = &sys {
        for (rule, schema) in rule_axioms(sys, 1)?.into_iter().enumerate() {
            match schema {
                Ok(s) => doc.axioms.push(axiom_doc(&s)),
                Err(e) => doc.skipped.push(SkippedDoc {
                    rule,
                    reason: e.to_string(),
                }),
            }
        }
    }
    out.emit(
        || {
            let width = doc.axioms.iter().map(|x| x.name.len()).max().unwrap_or(0);
            let mut text = String::new();
            for x in &doc.axioms {
                text.push_str(&format!("{:<width$}  {}\n", x.name, x.schema));
            }
            for s in &doc.skipped {
                text.push_str(&format!("# rule {} skipped: {}\n", s.rule, s.reason));
            }
            text
        },
        &envelope("axioms", &doc),
    );
    Ok(status::YES)
}

#[derive(Serialize)]
struct NnfDoc {
    formula: String,
    nnf: String,
}

fn run_nnf(a: &FormulaArgs, out: &Output) -> Outcome {
    let (lang, _) = language(&a.system, &[&a.formula])?;
    let phi = parse_formula(&a.formula, &lang)?;
    let nnf = phi.nnf().to_string();
    out.emit(
        || format!("{nnf}\n"),
        &envelope(
            "nnf",
            NnfDoc {
                formula: phi.pretty(&lang).to_string(),
                nnf: nnf.clone(),
            },
        ),
    );
    Ok(status::YES)
}

#[derive(Serialize)]
struct TranslateDoc {
    formula: String,
    term: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    modal: Option<ModalDoc>,
}

#[derive(Serialize)]
struct ModalDoc {
    body: String,
    frames: Vec<String>,
}

fn run_translate(a: &TranslateArgs, out: &Output) -> Outcome {
    let text = a.formula.as_deref().or(a.term.as_deref()).unwrap_or_default();
    let (lang, _) = language(&a.system, &[text])?;
    let (phi, term) = match (&a.formula, &a.term) {
        (Some(f), _) => {
            let phi = parse_formula(f, &lang)?;
            let t = phi.to_term(&lang);
            (phi, t)
        }
        (None, Some(t)) => {
            let t = lang.full().parse_term(t)?;
            (Formula::from_term(&t, &lang)?, t)
        }
        (None, None) => return Err(usage("translate needs --formula or --term")),
    };
    let modal = a.modal.then(|| {
        let tilde = translate_tilde(&phi);
        let indexed = lang.agents() > 1;
        ModalDoc {
            body: tilde.body.render(indexed),
            frames: tilde.frames.iter().map(|f| f.render(indexed)).collect(),
        }
    });
    let doc = TranslateDoc {
        formula: phi.pretty(&lang).to_string(),
        term: term.to_string(),
        modal,
    };
    out.emit(
        || {
            let mut text = if a.formula.is_some() {
                format!("{}\n", doc.term)
            } else {
                format!("{}\n", doc.formula)
            };
            if let Some(m) = &doc.modal {
                text.push_str(&format!("body: {}\n", m.body));
                for f in &m.frames {
                    text.push_str(&format!("frame: {f}\n"));
                }
            }
            text
        },
        &envelope("translate", &doc),
    );
    Ok(status::YES)
}

#[derive(Serialize)]
struct PresetDoc {
    name: &'static str,
    file: &'static str,
    rules: usize,
}

#[derive(Serialize)]
struct PresetListDoc {
    presets: Vec<PresetDoc>,
}

#[derive(Serialize)]
struct PresetTextDoc {
    name: String,
    system: String,
}

fn run_presets(name: Option<&str>, out: &Output) -> Outcome {
    if let Some(name) = name {
        let (_, sys) = load_preset(name)?;
        let text = print_system(&sys);
        out.emit(
            || text.clone(),
            &envelope(
                "presets",
                PresetTextDoc {
                    name: name.to_uppercase(),
                    system: text.clone(),
                },
            ),
        );
        return Ok(status::YES);
    }
    let mut presets = Vec::new();
    for name in preset_names() {
        presets.push(PresetDoc {
            name,
            file: preset_file(name)?,
            rules: load_preset(name)?.1.rules().len(),
        });
    }
    let text: String = presets
                .iter()
                .map(|p| format!("{:<10} {:<14} {} rules\n", p.name, p.file, p.rules))
                .collect();
    out.emit(
        || text,
        &envelope("presets", &PresetListDoc { presets }),
    );
    Ok(status::YES)
}
