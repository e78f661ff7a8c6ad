// SPDX-License-Identifier: Apache-2.0

mod common;

use dedukt::files::{parse_model, print_model};
use dedukt::formula::parse_formula;
use dedukt::presets::preset;
use dedukt::sat::{embed_modal, sat_general, sat_s5, translate_tilde, Modal, SatVerdict};
use dedukt::{Formula, GroundTerm, Language, Nnf, Signature, Strategy, Structure, Truth};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use common::{random_formula, random_ground, random_structure, random_system, rng, structure_terms};

const STRATEGY: Strategy = Strategy::Bounded(12);

fn text(f: &Formula, lang: &Language) -> String {
    if lang.agents() == 1 {
        f.to_string()
    } else {
        f.display_indexed().to_string()
    }
}

/// A structure together with a formula over its terms.
fn scenario(rng: &mut ChaCha8Rng, connectives: std::ops::RangeInclusive<usize>) -> (Structure, Formula) {
    let s = random_structure(rng);
    let terms = structure_terms(&s);
    let c = rng.gen_range(connectives);
    let phi = random_formula(rng, s.agents(), &terms, &terms, c);
    (s, phi)
}

fn no_negated_compound(n: &Nnf) -> bool {
    match n {
        Nnf::Lit { .. } => true,
        Nnf::And(a, b) | Nnf::Or(a, b) => no_negated_compound(a) && no_negated_compound(b),
        Nnf::Know(_, a) | Nnf::Possible(_, a) => no_negated_compound(a),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn formula_print_parse_round_trip(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (s, phi) = scenario(&mut rng, 0..=10);
        let lang = s.language();
        prop_assert_eq!(&parse_formula(&text(&phi, lang), lang).unwrap(), &phi);
        prop_assert_eq!(&parse_formula(&phi.pretty(lang).to_string(), lang).unwrap(), &phi);
    }

    #[test]
    fn translation_round_trip(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (s, phi) = scenario(&mut rng, 0..=10);
        let lang = s.language();
        let t = phi.to_term(lang);
        prop_assert!(t.is_ground());
        prop_assert!(lang.full().check_term(&t).is_ok());
        prop_assert_eq!(Formula::from_term(&t, lang).unwrap(), phi);
        let g = random_ground(&mut rng, lang.base(), 3);
        let atom = Formula::atom(g.clone());
        prop_assert_eq!(atom.to_term(lang), g.into_term());
    }

    #[test]
    fn nnf_preserves_truth(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (s, phi) = scenario(&mut rng, 1..=8);
        let nnf = phi.nnf();
        prop_assert!(no_negated_compound(&nnf));
        prop_assert_eq!(
            s.label(&phi, STRATEGY).unwrap(),
            s.label(&nnf.to_formula(), STRATEGY).unwrap()
        );
    }

    #[test]
    fn indistinguishability_is_an_equivalence(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let s = random_structure(&mut rng);
        let n = s.states().len();
        for i in 1..=s.agents() {
            for a in 0..n {
                prop_assert!(s.indistinguishable(i, a, a));
                for b in 0..n {
                    prop_assert_eq!(s.indistinguishable(i, a, b), s.indistinguishable(i, b, a));
                    for c in 0..n {
                        if s.indistinguishable(i, a, b) && s.indistinguishable(i, b, c) {
                            prop_assert!(s.indistinguishable(i, a, c));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn knowledge_and_explicit_knowledge_are_class_invariant(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (s, phi) = scenario(&mut rng, 0..=5);
        let i = rng.gen_range(1..=s.agents());
        for f in [Formula::know(i, phi.clone()), Formula::xknow(i, phi.clone())] {
            let values = s.label(&f, STRATEGY).unwrap();
            for a in 0..values.len() {
                for b in 0..values.len() {
                    if s.indistinguishable(i, a, b) {
                        prop_assert_eq!(values[a], values[b]);
                    }
                }
            }
        }
    }

    #[test]
    fn explicit_knowledge_persists(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (s, phi) = scenario(&mut rng, 0..=5);
        let i = rng.gen_range(1..=s.agents());
        let terms = structure_terms(&s);
        // a copy of the first state that has made one more observation
        let mut states = s.states().to_vec();
        let mut later = states[0].clone();
        later.name = "later".into();
        later.obs[i - 1].insert(terms[rng.gen_range(0..terms.len())].clone());
        states.push(later);
        let grown = Structure::new(s.language().clone(), s.systems().to_vec(), states, false).unwrap();
        let x = Formula::xknow(i, phi);
        let first = &s.states()[0].name;
        if grown.check(first, &x, STRATEGY).unwrap() == Truth::True {
            prop_assert_eq!(grown.check("later", &x, STRATEGY).unwrap(), Truth::True);
        }
    }

    #[test]
    fn reliable_observations_are_true(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let s = random_structure(&mut rng);
        let mut states = s.states().to_vec();
        for st in &mut states {
            for o in st.obs.clone() {
                st.truths.extend(o);
            }
        }
        let s = Structure::new(s.language().clone(), s.systems().to_vec(), states, true).unwrap();
        for t in structure_terms(&s) {
            for i in 1..=s.agents() {
                let f = Formula::implies(Formula::obs(i, t.clone()), Formula::atom(t.clone()));
                prop_assert_eq!(s.valid_in(&f, STRATEGY).unwrap(), Truth::True);
            }
        }
    }

    #[test]
    fn self_aware_agents_know_what_they_know(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let s = random_structure(&mut rng);
        let lang = s.language().with_agents(1).unwrap();
        let own = random_system(&mut rng, &lang, 1);
        let system = own.union(&preset("SELF_X").unwrap()).unwrap();
        let lang = system.language().clone();
        let states: Vec<_> = s
            .states()
            .iter()
            .map(|st| {
                let mut st = st.clone();
                st.obs.truncate(1);
                st
            })
            .collect();
        let s = Structure::new(lang, vec![system], states, false).unwrap();
        let terms = structure_terms(&s);
        let c = rng.gen_range(0..=4);
        let phi = random_formula(&mut rng, 1, &terms, &terms, c);
        let x = Formula::xknow(1, phi);
        let xx = Formula::xknow(1, x.clone());
        for (a, b) in s.label(&x, STRATEGY).unwrap().into_iter().zip(s.label(&xx, STRATEGY).unwrap()) {
            if a == Truth::True {
                prop_assert_eq!(b, Truth::True);
            }
        }
    }
}

fn random_modal(rng: &mut ChaCha8Rng, atoms: usize, connectives: usize) -> Modal {
    if connectives == 0 {
        return Modal::plain(rng.gen_range(1..=atoms));
    }
    match rng.gen_range(0..3) {
        0 => Modal::not(random_modal(rng, atoms, connectives - 1)),
        1 => Modal::know(1, random_modal(rng, atoms, connectives - 1)),
        _ => {
            let left = rng.gen_range(0..connectives);
            Modal::and(
                random_modal(rng, atoms, left),
                random_modal(rng, atoms, connectives - 1 - left),
            )
        }
    }
}

fn single_agent_lang() -> Language {
    Language::new(Signature::from_symbols([("p", 0), ("q", 0), ("f", 1)]).unwrap(), 1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn modal_embedding_preserves_satisfiability(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let c = rng.gen_range(0..=7);
        let f = random_modal(&mut rng, 3, c);
        let (phi, lang) = embed_modal(&f, &single_agent_lang()).unwrap();
        let modal = sat_s5(&f).unwrap();
        if let SatVerdict::Sat(m) = &modal {
            prop_assert!(m.holds(&f));
        }
        prop_assert_eq!(modal.is_sat(), sat_general(&phi, &lang).unwrap().is_sat());
    }

    #[test]
    fn witnesses_replay_after_printing(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let lang = single_agent_lang();
        let atoms: Vec<GroundTerm> = ["p", "q", "f(p)"].iter().map(|t| lang.base().parse_ground(t).unwrap()).collect();
        let c = rng.gen_range(1..=8);
        let phi = random_formula(&mut rng, 1, &atoms, &atoms, c);
        if let SatVerdict::Sat(w) = sat_general(&phi, &lang).unwrap() {
            let back = parse_model(&print_model(&w.structure), std::path::Path::new(".")).unwrap();
            prop_assert_eq!(print_model(&back), print_model(&w.structure));
            prop_assert_eq!(back.check(&w.state, &phi, Strategy::Local).unwrap(), Truth::True);
        }
    }
}

/// The reduction to modal logic stays linear in the size of the formula.
#[test]
fn tilde_translation_is_linear() {
    let mut rng = rng(0x71);
    let lang = single_agent_lang();
    let atoms: Vec<GroundTerm> = ["p", "q", "f(q)"].iter().map(|t| lang.base().parse_ground(t).unwrap()).collect();
    let mut worst = 0.0f64;
    for _ in 0..2000 {
        let c = rng.gen_range(0..=30);
        let phi = random_formula(&mut rng, 1, &atoms, &atoms, c);
        let tilde = translate_tilde(&phi);
        let size = tilde.body.size() + tilde.frames.iter().map(Modal::size).sum::<usize>();
        worst = worst.max(size as f64 / phi.size() as f64);
    }
    assert!(worst <= 8.0, "translation grew by a factor of {worst}");
}
