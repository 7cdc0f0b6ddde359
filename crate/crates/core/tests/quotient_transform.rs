//! The quotient transform on generated representations: faithfulness and
//! composition always survive, and each operation or constant the input
//! represented correctly stays correctly represented.

mod common;

use relred_core::representation::{find_base_bijection, VerifyOptions};
use relred_core::signature::SigSymbol;

#[test]
fn quotient_preserves_what_the_input_represented() {
    let mut rng = common::rng(0x5eed_0001);
    let mut produced = 0;
    while produced < 60 {
        let Some(fixture) = common::generate_fixture(&mut rng, 256) else {
            continue;
        };
        if fixture.rep.algebra().const_e().is_err() {
            continue; // the quotient needs e as a designated element
        }
        produced += 1;
        for rep in [&fixture.rep, &fixture.inflated] {
            let before = rep.verify(&VerifyOptions::default());
            let quotient = rep.quotient().unwrap_or_else(|e| {
                panic!("quotient failed on a compose-preserving input: {e}")
            });
            let after = quotient.verify(&VerifyOptions::default());

            assert!(after.faithful(), "quotient broke faithfulness");
            assert!(
                after.symbol_ok(SigSymbol::Compose),
                "quotient broke composition"
            );
            for sym in rep.claimed_signature().symbols() {
                if before.symbol_ok(sym) {
                    assert!(
                        after.symbol_ok(sym),
                        "quotient broke {sym}, preserved by the input"
                    );
                }
            }
        }
    }
}

#[test]
fn quotient_is_idempotent() {
    let mut rng = common::rng(0x5eed_0002);
    let mut produced = 0;
    while produced < 40 {
        let Some(fixture) = common::generate_fixture(&mut rng, 256) else {
            continue;
        };
        if fixture.rep.algebra().const_e().is_err() {
            continue;
        }
        produced += 1;
        let once = fixture.inflated.quotient().unwrap();
        let (_, classes) = once.quotient_with_classes().unwrap();
        assert!(
            classes.iter().all(|c| c.len() == 1),
            "second quotient still collapses: {classes:?}"
        );
    }
}

#[test]
fn inflate_then_quotient_is_the_identity_up_to_base_bijection() {
    let mut rng = common::rng(0x5eed_0003);
    let mut produced = 0;
    while produced < 40 {
        let Some(fixture) = common::generate_fixture(&mut rng, 256) else {
            continue;
        };
        produced += 1;
        let rep = &fixture.rep;
        // the round trip needs e represented as the identity relation
        let Ok(e) = rep.algebra().const_e() else {
            continue;
        };
        if *rep.image(e) != relred_core::relations::Relation::identity(rep.base_size()) {
            continue;
        }
        let quotient = fixture.inflated.quotient().unwrap();
        assert!(
            find_base_bijection(&quotient, rep).is_some(),
            "inflate∘quotient is not an isomorphism"
        );
    }
}

#[test]
fn zero_is_empty_under_order_and_universal_complement() {
    let mut rng = common::rng(0x5eed_0004);
    let mut checked = 0;
    let mut produced = 0;
    while produced < 80 && checked < 10 {
        let Some(fixture) = common::generate_fixture(&mut rng, 256) else {
            continue;
        };
        produced += 1;
        let rep = &fixture.rep;
        let sig = rep.claimed_signature();
        if rep.semantics() != relred_core::relations::Complementation::Universal
            || !sig.contains(SigSymbol::Order)
            || !sig.contains(SigSymbol::Complement)
        {
            continue;
        }
        let Ok(zero) = rep.algebra().const_zero() else {
            continue;
        };
        let report = rep.verify(&VerifyOptions::default());
        if report.symbol_ok(SigSymbol::Order) && report.symbol_ok(SigSymbol::Complement) {
            assert!(rep.image(zero).is_empty());
            checked += 1;
        }
    }
    assert!(checked > 0, "no universal ordered-complemented fixture was generated");
}
