//! The injectivization pipeline on normal Boolean monoid fixtures, and
//! the idempotent fixed-point finder on compose-and-order-preserving
//! representations.

mod common;

use relred_core::instances::full_relation_algebra;
use relred_core::representation::{PipelineOptions, PipelineRoute, Representation};
use relred_core::signature::Signature;
use relred_core::Complementation;

fn reclaim(rep: &Representation, sig: Signature) -> Representation {
    Representation::new(
        rep.algebra().clone(),
        rep.base_size(),
        rep.images().to_vec(),
        sig,
        rep.semantics(),
    )
    .unwrap()
}

#[test]
fn pipeline_succeeds_on_full_algebras_and_inflations() {
    let mut rng = common::rng(0x5eed_0005);
    for base in 1..=2usize {
        let concrete = full_relation_algebra(base);
        let identity_rep = concrete.identity_representation();
        let mut fixtures = vec![identity_rep.clone()];
        for _ in 0..3 {
            let fibers: Vec<usize> = (0..identity_rep.base_size())
                .map(|_| rand::Rng::gen_range(&mut rng, 1..=3))
                .collect();
            fixtures.push(identity_rep.inflate(&fibers));
        }
        for rep in fixtures {
            for (route, sig) in [
                (PipelineRoute::LatticeOrdered, Signature::lattice_ordered()),
                (
                    PipelineRoute::OrderedComplemented,
                    Signature::ordered_complemented(),
                ),
            ] {
                let claimed = reclaim(&rep, sig);
                let report = claimed
                    .injectivize(&PipelineOptions {
                        finite_base: true,
                        route: Some(route),
                    })
                    .unwrap_or_else(|e| panic!("pipeline failed ({route}): {e}"));
                assert!(report.passed(), "pipeline checks failed on {route}");

                let top = rep.algebra().const_top().unwrap();
                let final_top = report.result.image(top);
                assert!(final_top.is_equivalence_on_domain());
                assert!(!final_top.is_empty());
                for &a in &report.i_elements {
                    assert!(report.result.image(a).is_injective_partial_function());
                }
            }
        }
    }
}

#[test]
fn pipeline_on_a_doubled_base_recovers_the_original_up_to_bijection() {
    use relred_core::representation::find_base_bijection;

    let concrete = full_relation_algebra(2);
    let identity_rep = concrete.identity_representation();
    let inflated = reclaim(
        &identity_rep.inflate(&[2, 2]),
        Signature::lattice_ordered(),
    );
    let report = inflated
        .injectivize(&PipelineOptions::default())
        .expect("pipeline succeeds");
    assert!(report.passed());
    let original = reclaim(&identity_rep, Signature::lattice_ordered());
    assert!(
        find_base_bijection(&report.result, &original).is_some(),
        "pipeline output is not isomorphic to the uninflated original"
    );
}

#[test]
fn pipeline_demands_top_equivalence_when_interior_is_disabled() {
    let concrete = full_relation_algebra(2);
    let rep = reclaim(
        &concrete.identity_representation(),
        Signature::lattice_ordered(),
    );
    // h(⊤) is the full square, already an equivalence: both modes work
    assert!(rep
        .injectivize(&PipelineOptions {
            finite_base: false,
            route: None,
        })
        .is_ok());
}

#[test]
fn fixed_points_exist_for_every_nonzero_idempotent() {
    let mut rng = common::rng(0x5eed_0006);
    let mut fixtures: Vec<Representation> = Vec::new();
    for base in 1..=2usize {
        let rep = full_relation_algebra(base).identity_representation();
        fixtures.push(rep.inflate(&[2; 2][..rep.base_size()].to_vec()));
        fixtures.push(rep);
    }
    let mut produced = 0;
    while produced < 30 {
        let Some(fixture) = common::generate_fixture(&mut rng, 128) else {
            continue;
        };
        produced += 1;
        if fixture.rep.algebra().const_zero().is_ok() {
            fixtures.push(fixture.inflated);
        }
    }

    let mut total = 0;
    for rep in &fixtures {
        let alg = rep.algebra();
        let Ok(zero) = alg.const_zero() else { continue };
        for f in alg.idempotents() {
            if rep.image(f) == rep.image(zero) {
                continue;
            }
            let x = rep
                .find_idempotent_fixed_point(f)
                .unwrap_or_else(|e| panic!("no fixed point for idempotent {f}: {e}"));
            assert!(rep.image(f).contains(x, x));
            assert!(!rep.image(zero).contains(x, x));
            total += 1;
        }
    }
    assert!(total > 50, "too few idempotents exercised: {total}");
}

#[test]
fn strong_complement_holds_on_single_generator_closures_over_base_2() {
    use relred_core::relations::closure_generate;
    use relred_core::representation::check_strong_complement;
    use relred_core::signature::SigSymbol;

    let sig = Signature::compose_only().with(SigSymbol::Complement);
    for relation in relred_core::instances::all_relations(2) {
        let closed =
            closure_generate(&[relation.clone()], &sig, Complementation::Universal, 64).unwrap();
        let violations = check_strong_complement(&closed).unwrap();
        assert!(
            violations.is_empty(),
            "strong complement fails for generator {relation}"
        );
    }
}
