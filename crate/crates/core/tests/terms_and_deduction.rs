// SPDX-License-Identifier: Apache-2.0

mod common;

use std::collections::BTreeSet;

use dedukt::presets::{preset, subterm_rel};
use dedukt::{
    check_deduction, derive, is_monotone_witness, match_term, DeductiveSystem, GroundTerm, Signature, Strategy,
    Substitution, Term, Verdict,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use common::{random_ground, random_pattern, random_signature, rng};

fn dy_sig() -> Signature {
    preset("DY").unwrap().language().base().clone()
}

/// A Dolev-Yao message over `m`, `k1`, `k2`.
fn message(rng: &mut ChaCha8Rng, depth: usize) -> GroundTerm {
    let atoms = ["m", "k1", "k2"];
    if depth == 0 || rng.gen_bool(0.3) {
        return GroundTerm::constant(atoms.choose(rng).unwrap());
    }
    match rng.gen_range(0..3) {
        0 => GroundTerm::app("conc", vec![message(rng, depth - 1), message(rng, depth - 1)]),
        1 => GroundTerm::app("encr", vec![message(rng, depth - 1), message(rng, depth - 1)]),
        _ => GroundTerm::app("inv", vec![message(rng, depth - 1)]),
    }
}

fn intercepts(rng: &mut ChaCha8Rng, counts: std::ops::RangeInclusive<usize>) -> Vec<GroundTerm> {
    let n = rng.gen_range(counts);
    (0..n)
        .map(|_| GroundTerm::app("recv", vec![message(rng, 3)]))
        .collect()
}

fn terms(v: &[GroundTerm]) -> Vec<Term> {
    v.iter().map(|t| t.as_term().clone()).collect()
}

fn verdict(v: Verdict) -> Option<bool> {
    v.into()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn term_print_parse_round_trip(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let sig = random_signature(&mut rng);
        let t = random_pattern(&mut rng, &sig, &["x", "y", "z"], 4);
        prop_assert_eq!(sig.parse_term(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn matching_recovers_substitution(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let sig = random_signature(&mut rng);
        let p = random_pattern(&mut rng, &sig, &["x", "y"], 3);
        let mut rho = Substitution::new();
        for v in p.vars() {
            rho.bind(&v, random_ground(&mut rng, &sig, 2));
        }
        let s = rho.ground(&p).unwrap();
        let sigma = match_term(&p, &s).expect("instance must match");
        prop_assert_eq!(p.apply(&sigma), s.as_term().clone());
        for v in p.vars() {
            prop_assert_eq!(sigma.get(&v), rho.get(&v));
        }
    }

    #[test]
    fn matching_is_sound(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let sig = random_signature(&mut rng);
        let p = random_pattern(&mut rng, &sig, &["x", "y"], 2);
        let s = random_ground(&mut rng, &sig, 3);
        if let Some(rho) = match_term(&p, &s) {
            prop_assert_eq!(p.apply(&rho), s.into_term());
        }
    }

    #[test]
    fn substitution_size_law(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let sig = random_signature(&mut rng);
        let p = random_pattern(&mut rng, &sig, &["x", "y"], 3);
        let mut rho = Substitution::new();
        for v in p.vars() {
            rho.bind(&v, random_ground(&mut rng, &sig, 2));
        }
        let mut expected = p.size();
        for v in p.vars() {
            let occurrences = p.to_string().matches(&format!("?{v}")).count();
            expected += occurrences * (rho.get(&v).unwrap().as_term().size() - 1);
        }
        prop_assert_eq!(p.apply(&rho).size(), expected);
    }

    #[test]
    fn derivations_carry_valid_traces(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let dy = preset("DY").unwrap();
        let gamma = intercepts(&mut rng, 1..=3);
        let goal = GroundTerm::app("has", vec![message(&mut rng, 2)]);
        if let Verdict::Derivable(d) = derive(&dy, &terms(&gamma), &goal, Strategy::Local).unwrap() {
            prop_assert!(check_deduction(&dy, &terms(&gamma), &d));
            prop_assert_eq!(d.conclusion(), Some(&goal));
        }
    }

    #[test]
    fn reflexivity(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let sig = random_signature(&mut rng);
        let lang = dedukt::Language::new(sig.clone(), 1).unwrap();
        let system = common::random_system(&mut rng, &lang, 1);
        let t = random_ground(&mut rng, &sig, 3);
        let v = derive(&system, &[t.as_term().clone()], &t, Strategy::Local).unwrap();
        prop_assert!(v.is_derivable());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn monotone_over_dolev_yao_and_bool(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let dy = preset("DY").unwrap();
        let both = dy.union(&preset("BOOL").unwrap()).unwrap();
        let gamma = intercepts(&mut rng, 1..=3);
        let mut sup = gamma.clone();
        sup.extend(intercepts(&mut rng, 0..=2));
        let goal = GroundTerm::app("has", vec![message(&mut rng, 2)]);
        for system in [&dy, &both] {
            prop_assert!(is_monotone_witness(system, &terms(&gamma), &terms(&sup), &goal, Strategy::Local).unwrap());
        }
    }
}

/// Local and bounded search agree on local systems. With `exact` unset, bounded
/// search may answer `Unknown` for non-derivable goals, since BOOL introduction rules
/// always reach past any finite universe; it must still match every derivable goal
/// and never contradict.
fn agreement(system: &DeductiveSystem, seed: u64, exact: bool, bounds: std::ops::RangeInclusive<usize>) {
    let mut rng = rng(seed);
    for q in 0..500 {
        let gamma = terms(&intercepts(&mut rng, 1..=3));
        let goal = if rng.gen_bool(0.5) {
            let Term::App(_, args) = &gamma[rng.gen_range(0..gamma.len())] else { unreachable!() };
            let sub: Vec<Term> = args[0].subterms().into_iter().collect();
            GroundTerm::new(Term::app("has", vec![sub.choose(&mut rng).unwrap().clone()])).unwrap()
        } else {
            GroundTerm::app("has", vec![message(&mut rng, 2)])
        };
        let local = verdict(derive(system, &gamma, &goal, Strategy::Local).unwrap());
        assert!(local.is_some());
        for k in bounds.clone() {
            let bounded = verdict(derive(system, &gamma, &goal, Strategy::Bounded(k)).unwrap());
            if exact || local == Some(true) {
                assert_eq!(bounded, local, "query {q}: {goal} from {gamma:?} with bound {k}");
            } else {
                assert_ne!(bounded, Some(true), "query {q}: {goal} from {gamma:?} with bound {k}");
            }
        }
    }
}

#[test]
fn dolev_yao_is_local() {
    agreement(&preset("DY").unwrap(), 0xD1, true, 0..=3);
}

#[test]
fn bool_union_stays_local() {
    let both = preset("DY").unwrap().union(&preset("BOOL").unwrap()).unwrap();
    agreement(&both, 0xB0, false, 0..=1);
}

#[test]
fn dolev_yao_signature_is_bundled() {
    let sig = dy_sig();
    for s in ["m", "k1", "k2", "recv", "has", "conc", "encr", "inv"] {
        assert!(sig.contains(s));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn subterm_relation_laws(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let a = message(&mut rng, 3);
        let b = message(&mut rng, 3);
        prop_assert!(subterm_rel(&a, &a));
        let wrapped = GroundTerm::app("conc", vec![b.clone(), a.clone()]);
        prop_assert!(subterm_rel(&a, &wrapped));
        // transitivity through everything below a random message
        let all: BTreeSet<Term> = a.as_term().subterms();
        let below: Vec<GroundTerm> = all
            .into_iter()
            .map(|t| GroundTerm::new(t).unwrap())
            .filter(|t| subterm_rel(t, &a))
            .collect();
        for x in &below {
            prop_assert!(subterm_rel(x, &wrapped));
            for y in &below {
                if subterm_rel(y, x) {
                    prop_assert!(subterm_rel(y, &a));
                }
            }
        }
        if subterm_rel(&a, &b) {
            let outer = GroundTerm::app("conc", vec![b.clone(), GroundTerm::constant("m")]);
            prop_assert!(subterm_rel(&a, &outer));
        }
    }
}
