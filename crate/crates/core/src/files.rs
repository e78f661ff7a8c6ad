// SPDX-License-Identifier: Apache-2.0

//! Text formats for signatures, deductive systems and knowledge structures.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::deduction::{DeductiveSystem, Rule};
use crate::error::{Error, Result};
use crate::language::{is_reserved_name, Language};
use crate::model::{State, Structure};
use crate::presets::{load_preset, relabel};
use crate::syntax::{Cursor, Token};
use crate::term::{parse_term_at, GroundTerm, Signature};

/// Read a text file, reporting failures as [`Error::Io`].
pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse_sig_block(cur: &mut Cursor, sig: &mut Signature) -> Result<()> {
    cur.expect_keyword("sig")?;
    parse_sig_tail(cur, sig)
}

/// The braces of a `sig` block whose keyword was already consumed.
fn parse_sig_tail(cur: &mut Cursor, sig: &mut Signature) -> Result<()> {
    cur.expect(&Token::LBrace)?;
    while !cur.eat(&Token::RBrace) {
        let name = cur.expect_ident()?;
        cur.expect(&Token::Slash)?;
        let arity = cur.expect_int()?;
        cur.expect(&Token::Semi)?;
        if is_reserved_name(&name) {
            return Err(Error::ReservedSymbol(name));
        }
        sig.declare(&name, arity)?;
    }
    Ok(())
}

fn parse_rules_block(cur: &mut Cursor, sig: &Signature) -> Result<Vec<Rule>> {
    cur.expect_keyword("rules")?;
    cur.expect(&Token::LBrace)?;
    let mut rules = Vec::new();
    while !cur.eat(&Token::RBrace) {
        let mut premises = Vec::new();
        if !cur.eat(&Token::Turnstile) {
            premises.push(parse_term_at(cur, sig)?);
            while cur.eat(&Token::Comma) {
                premises.push(parse_term_at(cur, sig)?);
            }
            cur.expect(&Token::Arrow)?;
        }
        let conclusion = parse_term_at(cur, sig)?;
        cur.expect(&Token::Semi)?;
        rules.push(Rule::new(premises, conclusion));
    }
    Ok(rules)
}

/// Parse a `sig { name/arity; ... }` file.
pub fn parse_signature(text: &str) -> Result<Signature> {
    let mut cur = Cursor::new(text)?;
    let mut sig = Signature::new();
    parse_sig_block(&mut cur, &mut sig)?;
    cur.expect_eof()?;
    Ok(sig)
}

/// Guess the base signature used by terms or formulas: every non-reserved identifier
/// with the number of arguments it is applied to. Variables are skipped.
pub fn infer_signature<'a>(texts: impl IntoIterator<Item = &'a str>) -> Result<Signature> {
    let mut sig = Signature::new();
    for text in texts {
        let tokens = crate::syntax::tokenize(text)?;
        // (symbol, commas seen, parenthesis opens a call)
        let mut open: Vec<(Option<String>, usize)> = Vec::new();
        for (k, (tok, _)) in tokens.iter().enumerate() {
            let next = tokens.get(k + 1).map(|(t, _)| t);
            match tok {
                Token::Ident(name) if next != Some(&Token::LParen) => {
                    if !is_reserved_name(name) {
                        sig.declare(name, 0)?;
                    }
                }
                Token::Ident(name) => open.push((Some(name.clone()), 0)),
                Token::LParen if !matches!(k.checked_sub(1).map(|j| &tokens[j].0), Some(Token::Ident(_))) => {
                    open.push((None, 0));
                }
                Token::Comma => {
                    if let Some(top) = open.last_mut() {
                        top.1 += 1;
                    }
                }
                Token::RParen => {
                    if let Some((Some(name), commas)) = open.pop() {
                        if !is_reserved_name(&name) {
                            sig.declare(&name, commas + 1)?;
                        }
                    }
                }
                _ => {}
            }
        }
    }
    Ok(sig)
}

/// Parse an optional `sig` block followed by a `rules` block. Symbols of `extra` are
/// available in addition to the declared ones.
pub fn parse_system(text: &str, agents: usize, extra: &Signature) -> Result<DeductiveSystem> {
    let mut cur = Cursor::new(text)?;
    let sys = system_at(&mut cur, agents, extra)?;
    cur.expect_eof()?;
    Ok(sys)
}

fn system_at(cur: &mut Cursor, agents: usize, extra: &Signature) -> Result<DeductiveSystem> {
    let mut base = extra.clone();
    if matches!(cur.peek(), Token::Ident(s) if s == "sig") {
        parse_sig_block(cur, &mut base)?;
    }
    let lang = Language::new(base, agents)?;
    let rules = parse_rules_block(cur, lang.full())?;
    DeductiveSystem::new(lang, rules)
}

pub fn load_system(path: &Path, agents: usize, extra: &Signature) -> Result<DeductiveSystem> {
    parse_system(&read(path)?, agents, extra)
}

fn write_sig(out: &mut String, sig: &Signature, indent: &str) {
    let _ = writeln!(out, "{indent}sig {{");
    for (name, arity) in sig.iter() {
        let _ = writeln!(out, "{indent}  {name}/{arity};");
    }
    let _ = writeln!(out, "{indent}}}");
}

fn write_rules(out: &mut String, rules: &[Rule], indent: &str) {
    let _ = writeln!(out, "{indent}rules {{");
    for r in rules {
        let _ = writeln!(out, "{indent}  {r};");
    }
    let _ = writeln!(out, "{indent}}}");
}

/// Canonical text of a system: its base signature, then its rules in order.
pub fn print_system(system: &DeductiveSystem) -> String {
    let mut out = String::new();
    write_sig(&mut out, system.language().base(), "");
    write_rules(&mut out, system.rules(), "");
    out
}

fn term_list(cur: &mut Cursor, lang: &Language) -> Result<Vec<GroundTerm>> {
    let mut out = Vec::new();
    if cur.eat(&Token::Semi) {
        return Ok(out);
    }
    loop {
        let t = parse_term_at(cur, lang.full())?;
        out.push(GroundTerm::new(t)?);
        if !cur.eat(&Token::Comma) {
            break;
        }
    }
    cur.expect(&Token::Semi)?;
    Ok(out)
}

fn agent_index(cur: &mut Cursor, agents: usize) -> Result<usize> {
    cur.expect(&Token::LBracket)?;
    let i = cur.expect_int()?;
    cur.expect(&Token::RBracket)?;
    if i == 0 || i > agents {
        return Err(Error::AgentOutOfRange { agent: i, agents });
    }
    Ok(i)
}

/// Parse a model file. Relative system paths resolve against `base_dir`.
///
/// ```text
/// model {
///   agents: 1;
///   reliable_obs: no;
///   sig { p/0; }
///   system[1]: "preset:DY_PRIME";
///   state s1 { env: "e"; obs[1]: recv(m); true: has(m); }
/// }
/// ```
pub fn parse_model(text: &str, base_dir: &Path) -> Result<Structure> {
    let mut cur = Cursor::new(text)?;
    cur.expect_keyword("model")?;
    cur.expect(&Token::LBrace)?;
    let mut agents = 1;
    let mut reliable = false;
    let mut sig = Signature::new();
    let mut systems: Vec<Option<DeductiveSystem>> = vec![None];
    let mut states = Vec::new();
    let mut names = BTreeSet::new();
    let mut lang: Option<Language> = None;

    while !cur.eat(&Token::RBrace) {
        let key = cur.expect_ident()?;
        let header_done = lang.is_some();
        match key.as_str() {
            "agents" if !header_done => {
                cur.expect(&Token::Colon)?;
                agents = cur.expect_int()?;
                if agents == 0 {
                    return cur.error("a model needs at least one agent");
                }
                if systems.iter().any(Option::is_some) {
                    return cur.error("`agents` must come before the systems");
                }
                systems = vec![None; agents];
                cur.expect(&Token::Semi)?;
            }
            "reliable_obs" if !header_done => {
                cur.expect(&Token::Colon)?;
                reliable = match cur.expect_ident()?.as_str() {
                    "yes" | "true" => true,
                    "no" | "false" => false,
                    other => return cur.error(format!("expected yes or no, found `{other}`")),
                };
                cur.expect(&Token::Semi)?;
            }
            "sig" if !header_done => {
                let mut block = Signature::new();
                parse_sig_tail(&mut cur, &mut block)?;
                sig.merge(&block)?;
            }
            "system" if !header_done => {
                let i = agent_index(&mut cur, agents)?;
                let sys = if cur.eat(&Token::Colon) {
                    let target = cur.expect_str()?;
                    cur.expect(&Token::Semi)?;
                    if let Some(name) = target.strip_prefix("preset:") {
                        let (psig, d) = load_preset(name)?;
                        let l = Language::new(psig, agents)?.extend_base(&sig)?;
                        relabel(&d, i, &l)?
                    } else {
                        let path: PathBuf = base_dir.join(&target);
                        load_system(&path, agents, &sig)?
                    }
                } else {
                    cur.expect(&Token::LBrace)?;
                    let d = system_at(&mut cur, agents, &sig)?;
                    cur.expect(&Token::RBrace)?;
                    d
                };
                systems[i - 1] = Some(sys);
            }
            "state" => {
                let l = match &lang {
                    Some(l) => l.clone(),
                    None => {
                        let mut l = Language::new(sig.clone(), agents)?;
                        for d in systems.iter().flatten() {
                            l = l.extend_base(d.language().base())?;
                        }
                        lang = Some(l.clone());
                        l
                    }
                };
                let name = cur.expect_ident()?;
                if !names.insert(name.clone()) {
                    return Err(Error::DuplicateState(name));
                }
                let mut st = State::new(&name, agents);
                cur.expect(&Token::LBrace)?;
                while !cur.eat(&Token::RBrace) {
                    let field = cur.expect_ident()?;
                    match field.as_str() {
                        "env" => {
                            cur.expect(&Token::Colon)?;
                            st.env = cur.expect_str()?;
                            cur.expect(&Token::Semi)?;
                        }
                        "obs" => {
                            let i = if cur.peek() == &Token::Colon && agents == 1 {
                                1
                            } else {
                                agent_index(&mut cur, agents)?
                            };
                            cur.expect(&Token::Colon)?;
                            st.obs[i - 1].extend(term_list(&mut cur, &l)?);
                        }
                        "true" => {
                            cur.expect(&Token::Colon)?;
                            st.truths.extend(term_list(&mut cur, &l)?);
                        }
                        other => return cur.error(format!("unknown state field `{other}`")),
                    }
                }
                states.push(st);
            }
            other if header_done => {
                return cur.error(format!("`{other}` must come before the first state"));
            }
            other => return cur.error(format!("unknown model field `{other}`")),
        }
    }
    cur.expect_eof()?;

    let mut language = Language::new(sig, agents)?;
    for d in systems.iter().flatten() {
        language = language.extend_base(d.language().base())?;
    }
    let systems = systems
        .into_iter()
        .map(|d| d.unwrap_or_else(|| DeductiveSystem::empty(language.clone())))
        .collect();
    Structure::new(language, systems, states, reliable)
}

pub fn load_model(path: &Path) -> Result<Structure> {
    let dir = path.parent().unwrap_or(Path::new("."));
    parse_model(&read(path)?, dir)
}

fn list(terms: &BTreeSet<GroundTerm>) -> String {
    terms.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Self-contained text of a structure, with every system written inline.
pub fn print_model(m: &Structure) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model {{");
    let _ = writeln!(out, "  agents: {};", m.agents());
    let _ = writeln!(out, "  reliable_obs: {};", if m.reliable_obs() { "yes" } else { "no" });
    write_sig(&mut out, m.language().base(), "  ");
    for (i, d) in m.systems().iter().enumerate() {
        let _ = writeln!(out, "  system[{}] {{", i + 1);
        write_rules(&mut out, d.rules(), "    ");
        let _ = writeln!(out, "  }}");
    }
    for s in m.states() {
        let _ = writeln!(out, "  state {} {{", s.name);
        let _ = writeln!(out, "    env: \"{}\";", s.env.replace('"', "'"));
        for (i, o) in s.obs.iter().enumerate() {
            if !o.is_empty() {
                let _ = writeln!(out, "    obs[{}]: {};", i + 1, list(o));
            }
        }
        if !s.truths.is_empty() {
            let _ = writeln!(out, "    true: {};", list(&s.truths));
        }
        let _ = writeln!(out, "  }}");
    }
    let _ = writeln!(out, "}}");
    out
}

/// Ground terms separated by commas, as given to `--from` and `--pool`.
pub fn parse_ground_list(text: &str, sig: &Signature) -> Result<Vec<GroundTerm>> {
    sig.parse_term_list(text)?.into_iter().map(GroundTerm::new).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deduction::Strategy;
    use crate::formula::parse_formula;
    use crate::model::Truth;
    use crate::presets::{preset, preset_names};

    #[test]
    fn system_round_trip() {
        for name in preset_names() {
            let d = preset(name).unwrap();
            let text = print_system(&d);
            let back = parse_system(&text, 1, &Signature::new()).unwrap();
            assert_eq!(back.rules(), d.rules(), "{name}");
            assert_eq!(print_system(&back), text);
        }
    }

    #[test]
    fn system_syntax() {
        let d = parse_system("sig { a/0; f/1; } rules { |- a; a -> f(a); # axiom\n }", 1, &Signature::new()).unwrap();
        assert_eq!(d.rules().len(), 2);
        assert_eq!(d.rules()[0].to_string(), "|- a");
        let two = parse_system("sig { a/0; } rules { ob_2(a) -> xknow_1(a); }", 2, &Signature::new()).unwrap();
        assert_eq!(two.rules()[0].to_string(), "ob_2(a) -> xknow_1(a)");
        assert!(matches!(
            parse_system("sig { a/0; } rules { b -> a; }", 1, &Signature::new()),
            Err(Error::UnknownSymbol(_))
        ));
        assert!(matches!(
            parse_system("sig { K/0; } rules { }", 1, &Signature::new()),
            Err(Error::ReservedSymbol(_))
        ));
        assert!(matches!(
            parse_system("sig { a/0; } rules { a -> }", 1, &Signature::new()),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(parse_signature("sig { f/1; f/2; }"), Err(Error::DuplicateSymbol { .. })));
    }

    const DY: &str = r#"
        model {
          agents: 1;
          reliable_obs: no;
          system[1]: "preset:DY_PRIME";
          state s1 { obs[1]: recv(encr(m,k1)), recv(encr(inv(k1),k2)); true: has(m); }
          state s2 { env: "other"; obs: recv(encr(m,k1)), recv(encr(inv(k1),k2)), recv(inv(k2)); }
        }
    "#;

    #[test]
    fn model_parse_and_print() {
        let m = parse_model(DY, Path::new(".")).unwrap();
        assert_eq!(m.states().len(), 2);
        assert_eq!(m.state("s2").unwrap().env, "other");
        let x = parse_formula("X has(m)", m.language()).unwrap();
        assert_eq!(m.check("s2", &x, Strategy::Local).unwrap(), Truth::True);
        assert_eq!(m.check("s1", &x, Strategy::Local).unwrap(), Truth::False);
        let text = print_model(&m);
        let back = parse_model(&text, Path::new(".")).unwrap();
        assert_eq!(back.states(), m.states());
        assert_eq!(back.system(1).rules(), m.system(1).rules());
        assert_eq!(print_model(&back), text);
    }

    #[test]
    fn model_errors() {
        let bad = "model { agents: 1; state s { obs[2]: m; } }";
        assert!(matches!(parse_model(bad, Path::new(".")), Err(Error::AgentOutOfRange { .. })));
        let dup = "model { sig { a/0; } state s { } state s { } }";
        assert!(matches!(parse_model(dup, Path::new(".")), Err(Error::DuplicateState(_))));
        let late = "model { sig { a/0; } state s { } agents: 2; }";
        assert!(matches!(parse_model(late, Path::new(".")), Err(Error::Syntax { .. })));
        let unreliable = "model { reliable_obs: yes; sig { a/0; } state s { obs[1]: a; } }";
        assert!(matches!(
            parse_model(unreliable, Path::new(".")),
            Err(Error::UnreliableObservation { .. })
        ));
        let missing = "model { system[1]: \"/nonexistent/x.sys\"; }";
        assert!(matches!(parse_model(missing, Path::new(".")), Err(Error::Io { .. })));
    }

    #[test]
    fn multi_agent_presets_are_relabelled() {
        let text = r#"model { agents: 2; system[2]: "preset:DY_PRIME"; state s { obs[2]: recv(m); } }"#;
        let m = parse_model(text, Path::new(".")).unwrap();
        assert_eq!(m.system(2).rules()[4].to_string(), "ob_2(recv(?t)) -> recv(?t)");
        let phi = parse_formula("X2 has(m) & !X1 has(m)", m.language()).unwrap();
        assert_eq!(m.check("s", &phi, Strategy::Local).unwrap(), Truth::True);
    }

    #[test]
    fn signature_inference() {
        let sig = infer_signature(["K1 has(conc(m,k1)) & !Ob2(recv(m))", "X (p => q)", "f(?x, a)"]).unwrap();
        let got: Vec<(&str, usize)> = sig.iter().collect();
        assert_eq!(
            got,
            [("a", 0), ("conc", 2), ("f", 2), ("has", 1), ("k1", 0), ("m", 0), ("p", 0), ("q", 0), ("recv", 1)]
        );
        assert!(matches!(infer_signature(["f(a) & f"]), Err(Error::DuplicateSymbol { .. })));
    }
}
