// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use dedukt::files::{load_model, load_system, print_system};
use dedukt::model::build_dy_model;
use dedukt::presets::{preset, preset_file, preset_names};
use dedukt::{Signature, Strategy, Truth};

fn repo() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

#[test]
fn preset_files_match_catalog() {
    let bless = std::env::var_os("DEDUKT_BLESS").is_some();
    for name in preset_names() {
        let path = repo().join("systems").join(preset_file(name).unwrap());
        let expected = print_system(&preset(name).unwrap());
        if bless {
            std::fs::write(&path, &expected).unwrap();
        }
        let on_disk = std::fs::read_to_string(&path).unwrap_or_default();
        assert_eq!(on_disk, expected, "{} is stale; rerun with DEDUKT_BLESS=1", path.display());
        let loaded = load_system(&path, 1, &Signature::new()).unwrap();
        assert_eq!(loaded.rules(), preset(name).unwrap().rules());
    }
}

#[test]
fn dolev_yao_model_file() {
    let m = load_model(&repo().join("models/dy.dkm")).unwrap();
    let sig = m.language().base().clone();
    let g = |s: &str| sig.parse_ground(s).unwrap();
    let built = build_dy_model(&[
        vec![g("recv(encr(m,k1))"), g("recv(encr(inv(k1),k2))")],
        vec![g("recv(encr(m,k1))"), g("recv(encr(inv(k1),k2))"), g("recv(inv(k2))")],
    ])
    .unwrap();
    assert_eq!(m.states(), built.states());
    assert_eq!(m.system(1).rules(), built.system(1).rules());
    let x = dedukt::formula::parse_formula("X has(m)", m.language()).unwrap();
    assert_eq!(m.check("s1", &x, Strategy::Local).unwrap(), Truth::False);
    assert_eq!(m.check("s2", &x, Strategy::Local).unwrap(), Truth::True);
}
