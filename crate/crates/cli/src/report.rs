// SPDX-License-Identifier: Apache-2.0

//! Text and JSON rendering of command results.

use std::collections::BTreeMap;
use std::io::IsTerminal;

use dedukt::{Deduction, Justification, Substitution, Truth};
use serde::Serialize;

/// Version of the JSON documents.
pub const FORMAT: u32 = 1;

pub struct Output {
    json: bool,
    color: bool,
}

impl Output {
    pub fn new(json: bool) -> Self {
        let color = match std::env::var("DEDUKT_COLOR").as_deref() {
            Ok("1") => true,
            Ok("0") => false,
            _ => std::io::stdout().is_terminal(),
        };
        Output { json, color }
    }

    /// Print `doc` as JSON, or `text` otherwise.
    pub fn emit<T: Serialize>(&self, text: impl FnOnce() -> String, doc: &T) {
        if self.json {
            println!("{}", serde_json::to_string_pretty(doc).expect("serializable"));
        } else {
            print!("{}", text());
        }
    }

    /// A verdict word, colored green, red or yellow for exit statuses 0, 1 and 2.
    pub fn verdict(&self, word: &str, code: u8) -> String {
        if !self.color {
            return word.to_string();
        }
        let c = match code {
            0 => 32,
            1 => 31,
            _ => 33,
        };
        format!("\x1b[{c}m{word}\x1b[0m")
    }
}

pub fn truth_word(t: Truth) -> &'static str {
    match t {
        Truth::True => "true",
        Truth::False => "false",
        Truth::Unknown => "unknown",
    }
}

pub fn truth_code(t: Truth) -> u8 {
    match t {
        Truth::True => crate::status::YES,
        Truth::False => crate::status::NO,
        Truth::Unknown => crate::status::UNKNOWN,
    }
}

#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub format: u32,
    pub command: &'a str,
    #[serde(flatten)]
    pub body: T,
}

pub fn envelope<T: Serialize>(command: &str, body: T) -> Envelope<'_, T> {
    Envelope {
        format: FORMAT,
        command,
        body,
    }
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepJustification {
    Premise {
        source: String,
        subst: BTreeMap<String, String>,
    },
    Rule {
        rule: usize,
        subst: BTreeMap<String, String>,
        premises: Vec<usize>,
    },
}

#[derive(Serialize)]
pub struct StepDoc {
    pub index: usize,
    pub term: String,
    pub justification: StepJustification,
}

fn subst_map(s: &Substitution) -> BTreeMap<String, String> {
    s.iter().map(|(v, t)| (v.to_string(), t.to_string())).collect()
}

pub fn steps(d: &Deduction) -> Vec<StepDoc> {
    d.steps
        .iter()
        .enumerate()
        .map(|(index, step)| StepDoc {
            index,
            term: step.term.to_string(),
            justification: match &step.justification {
                Justification::FromGamma { source, subst } => StepJustification::Premise {
                    source: source.to_string(),
                    subst: subst_map(subst),
                },
                Justification::ByRule { rule, subst, premises } => StepJustification::Rule {
                    rule: *rule,
                    subst: subst_map(subst),
                    premises: premises.clone(),
                },
            },
        })
        .collect()
}
