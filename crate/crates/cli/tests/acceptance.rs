//! The acceptance suite: one test per criterion, each printing a
//! PASS/FAIL line and holding to its time budget.
//!
//! The criteria are property-based at desk scale: exhaustive where the
//! space is tiny, seeded random generation where it is not, and every
//! expected value recomputed by an independent route before being
//! asserted.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use relred_core::algebra::FiniteAlgebra;
use relred_core::instances::{all_relations, full_relation_algebra, groups_up_to_order_6};
use relred_core::partial_group::{
    check_embedding, embed_oracle, embed_search, restrict_group, EmbedConfig, EmbedStatus,
};
use relred_core::relations::{closure_generate, Complementation, Relation};
use relred_core::representation::{
    check_strong_complement, PipelineOptions, PipelineRoute, Representation,
};
use relred_core::repsearch::{
    exhaustive_oracle, search_representation, SearchConfig, SearchStatus,
};
use relred_core::signature::{SigSymbol, Signature};
use relred_core::VerifyOptions;

struct Budget {
    number: u32,
    name: &'static str,
    limit: Duration,
    started: Instant,
}

impl Budget {
    fn start(number: u32, name: &'static str, limit_secs: u64) -> Budget {
        Budget {
            number,
            name,
            limit: Duration::from_secs(limit_secs),
            started: Instant::now(),
        }
    }

    fn finish(self) {
        let elapsed = self.started.elapsed();
        let ok = elapsed <= self.limit;
        println!(
            "criterion {} ({}): {} in {} ms (limit {} ms)",
            self.number,
            self.name,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_millis(),
            self.limit.as_millis()
        );
        assert!(
            ok,
            "criterion {} exceeded its budget: {:?} > {:?}",
            self.number, elapsed, self.limit
        );
    }

    fn fail(&self, message: &str) -> ! {
        println!("criterion {} ({}): FAIL — {}", self.number, self.name, message);
        panic!("criterion {} failed: {}", self.number, message);
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_relation(rng: &mut ChaCha8Rng, base: usize, density: f64) -> Relation {
    let mut pairs = Vec::new();
    for x in 0..base {
        for y in 0..base {
            if rng.gen_bool(density) {
                pairs.push((x, y));
            }
        }
    }
    Relation::from_pairs(base, &pairs).unwrap()
}

// ---------------------------------------------------------------------
// criterion 1: the two i-relation evaluators agree with each other and
// with the brute-force injective-partial-function predicate on the full
// 16-element algebra over a 2-point base
// ---------------------------------------------------------------------
#[test]
fn criterion_1_i_relation_agreement() {
    let budget = Budget::start(1, "i-relation agreement", 1);

    let concrete = full_relation_algebra(2);
    let alg = concrete.algebra();
    let via_meet = alg.i_elements_via_meet().unwrap();
    let via_complement = alg.i_elements_via_complement().unwrap();

    // independent predicate: at most one partner per point, both ways
    let by_counting: Vec<usize> = concrete
        .relations()
        .iter()
        .enumerate()
        .filter(|(_, r)| {
            (0..2).all(|x| (0..2).filter(|&y| r.contains(x, y)).count() <= 1)
                && (0..2).all(|y| (0..2).filter(|&x| r.contains(x, y)).count() <= 1)
        })
        .map(|(i, _)| i)
        .collect();

    if via_meet != via_complement {
        budget.fail("the meet and complement routes disagree");
    }
    if via_meet != by_counting {
        budget.fail("the evaluators disagree with the brute-force predicate");
    }
    if via_meet.len() != 7 {
        budget.fail("the full algebra over 2 points must have exactly 7 i-elements");
    }
    budget.finish();
}

// ---------------------------------------------------------------------
// criterion 2: the quotient of ≥ 200 generated representations is
// faithful and composition-preserving, and preserves every operation or
// constant the input represented correctly
// ---------------------------------------------------------------------
#[test]
fn criterion_2_quotient_lemma_suite() {
    let budget = Budget::start(2, "quotient lemma suite", 30);
    let mut rng = rng(0xace_2);

    let pool: Vec<Signature> = vec![
        Signature::compose_only()
            .with(SigSymbol::ConstE)
            .with(SigSymbol::ConstZero),
        Signature::lattice_ordered()
            .with(SigSymbol::ConstE)
            .with(SigSymbol::ConstTop),
        Signature::ordered_complemented()
            .with(SigSymbol::ConstE)
            .with(SigSymbol::ConstZero),
        Signature::boolean_monoid(),
        Signature::full(),
    ];

    let mut tested = 0;
    while tested < 200 {
        let base = rng.gen_range(1..=3);
        let generators: Vec<Relation> = (0..rng.gen_range(1..=2))
            .map(|_| random_relation(&mut rng, base, 0.4))
            .collect();
        let sig = pool[rng.gen_range(0..pool.len())].clone();
        let semantics = if rng.gen_bool(0.5) {
            Complementation::Universal
        } else {
            Complementation::Relative
        };
        let Ok(closed) = closure_generate(&generators, &sig, semantics, 256) else {
            continue;
        };
        let identity_rep = closed.identity_representation();
        let fibers: Vec<usize> = (0..identity_rep.base_size())
            .map(|_| rng.gen_range(1..=3))
            .collect();
        let rep = identity_rep.inflate(&fibers);
        tested += 1;

        let before = rep.verify(&VerifyOptions::default());
        let quotient = match rep.quotient() {
            Ok(q) => q,
            Err(e) => budget.fail(&format!("quotient failed: {e}")),
        };
        let after = quotient.verify(&VerifyOptions::default());
        if !after.faithful() || !after.symbol_ok(SigSymbol::Compose) {
            budget.fail("quotient broke faithfulness or composition");
        }
        for sym in [
            SigSymbol::Meet,
            SigSymbol::Join,
            SigSymbol::Complement,
            SigSymbol::ConstE,
            SigSymbol::ConstZero,
            SigSymbol::ConstTop,
        ] {
            if rep.claimed_signature().contains(sym)
                && before.symbol_ok(sym)
                && !after.symbol_ok(sym)
            {
                budget.fail(&format!("quotient broke {sym}, which the input preserved"));
            }
        }
    }
    budget.finish();
}

// ---------------------------------------------------------------------
// criterion 3: the injectivization pipeline succeeds on every normal
// Boolean monoid fixture (full algebras over bases 1–3 and inflations);
// the result represents ⊤ as an equivalence relation on a nonempty base,
// maps every i-element to an injective partial function, and realizes
// ⊟/⊡ as concrete domain/range equality
// ---------------------------------------------------------------------
#[test]
fn criterion_3_interior_and_pipeline_suite() {
    let budget = Budget::start(3, "interior + pipeline suite", 60);
    let mut rng = rng(0xace_3);

    for base in 1..=3usize {
        let concrete = full_relation_algebra(base);
        let identity_rep = concrete.identity_representation();
        let mut fixtures = vec![identity_rep.clone()];
        for _ in 0..2 {
            let fibers: Vec<usize> = (0..base).map(|_| rng.gen_range(1..=3)).collect();
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
                let claimed = Representation::new(
                    rep.algebra().clone(),
                    rep.base_size(),
                    rep.images().to_vec(),
                    sig,
                    rep.semantics(),
                )
                .unwrap();
                let report = match claimed.injectivize(&PipelineOptions {
                    finite_base: true,
                    route: Some(route),
                }) {
                    Ok(r) => r,
                    Err(e) => budget.fail(&format!("pipeline failed at base {base}: {e}")),
                };
                if !report.passed() {
                    budget.fail(&format!("pipeline checks failed at base {base} ({route})"));
                }
                let top = rep.algebra().const_top().unwrap();
                let final_top = report.result.image(top);
                if !final_top.is_equivalence_on_domain() || final_top.is_empty() {
                    budget.fail("⊤ is not an equivalence relation on a nonempty base");
                }
                for &a in &report.i_elements {
                    if !report.result.image(a).is_injective_partial_function() {
                        budget.fail(&format!("i-element {a} is not an injective function"));
                    }
                }
                // ⊟/⊡ against concrete domains and ranges, re-derived here
                let alg = report.result.algebra();
                for a in 0..alg.n() {
                    for b in 0..alg.n() {
                        let dom_eq = alg.compose(a, top) == alg.compose(b, top);
                        let concrete_eq = report.result.image(a).domain_mask()
                            == report.result.image(b).domain_mask();
                        if dom_eq != concrete_eq {
                            budget.fail("⊟ does not match concrete domain equality");
                        }
                        let ran_eq = alg.compose(top, a) == alg.compose(top, b);
                        let concrete_eq = report.result.image(a).range_mask()
                            == report.result.image(b).range_mask();
                        if ran_eq != concrete_eq {
                            budget.fail("⊡ does not match concrete range equality");
                        }
                    }
                }
            }
        }
    }
    budget.finish();
}

// ---------------------------------------------------------------------
// criterion 4: over bases 2 and 3, for every single-relation generator,
// the universal-complement-closed closure has no idempotent f with
// idempotent complement absorbed on both sides other than the full
// square
// ---------------------------------------------------------------------
#[test]
fn criterion_4_strong_complement_sweep() {
    let budget = Budget::start(4, "strong-complement sweep", 60);
    let sig = Signature::compose_only().with(SigSymbol::Complement);
    for base in 2..=3usize {
        for generator in all_relations(base) {
            let closed = match closure_generate(
                &[generator.clone()],
                &sig,
                Complementation::Universal,
                1 << (base * base),
            ) {
                Ok(c) => c,
                Err(e) => budget.fail(&format!("closure failed for {generator}: {e}")),
            };
            match check_strong_complement(&closed) {
                Ok(violations) if violations.is_empty() => {}
                Ok(violations) => budget.fail(&format!(
                    "strong complement violated for generator {generator}: elements {violations:?}"
                )),
                Err(e) => budget.fail(&format!("sweep error: {e}")),
            }
        }
    }
    budget.finish();
}

// ---------------------------------------------------------------------
// criterion 5: the bounded search agrees with the exhaustive map oracle
// (found vs none) on every algebra with n ≤ 2 and on ≥ 50 random valid
// tables with n = 3, in the signatures {·}, {·,∧}, {·,≤}, at bases 1–2
// ---------------------------------------------------------------------
#[test]
fn criterion_5_search_against_oracle() {
    let budget = Budget::start(5, "search soundness/completeness", 120);
    let mut rng = rng(0xace_5);

    let signatures = [
        Signature::compose_only(),
        Signature::compose_only().with(SigSymbol::Meet),
        Signature::compose_only().with(SigSymbol::Order),
    ];

    let mut agreements = 0usize;
    let mut check = |alg: &FiniteAlgebra, sig: &Signature| {
        for base in 1..=2usize {
            let oracle =
                exhaustive_oracle(alg, sig, base, Complementation::Universal, false).unwrap();
            let cfg = SearchConfig {
                max_base: base,
                node_limit: 5_000_000,
                ..SearchConfig::default()
            };
            let outcome = search_representation(alg, sig, &cfg).unwrap();
            let found = matches!(outcome.status, SearchStatus::Found(_));
            if found != !oracle.is_empty() {
                return Err(format!(
                    "disagreement at n={}, base={base}, sig={sig}: search={found}, oracle={}",
                    alg.n(),
                    !oracle.is_empty()
                ));
            }
            if let SearchStatus::Found(rep) = outcome.status {
                if !rep.verify(&VerifyOptions::default()).passed() {
                    return Err("found representation fails verification".into());
                }
            }
            agreements += 1;
        }
        Ok(())
    };

    // exhaustive n ≤ 2
    for sig in &signatures {
        for n in 1..=2usize {
            let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
            let cells = n * n;
            for code in 0..n.pow(cells as u32) {
                let mut table = Vec::with_capacity(cells);
                let mut c = code;
                for _ in 0..cells {
                    table.push(c % n);
                    c /= n;
                }
                let mut candidates: Vec<FiniteAlgebra> = Vec::new();
                if sig.contains(SigSymbol::Meet) {
                    for meet_code in 0..n.pow(cells as u32) {
                        let mut meet = Vec::with_capacity(cells);
                        let mut m = meet_code;
                        for _ in 0..cells {
                            meet.push(m % n);
                            m /= n;
                        }
                        candidates.push(
                            FiniteAlgebra::builder(names.clone(), table.clone())
                                .meet(meet)
                                .build()
                                .unwrap(),
                        );
                    }
                } else if sig.contains(SigSymbol::Order) {
                    for order_code in 0..1usize << cells {
                        let matrix: Vec<bool> =
                            (0..cells).map(|p| order_code >> p & 1 == 1).collect();
                        candidates.push(
                            FiniteAlgebra::builder(names.clone(), table.clone())
                                .order(matrix)
                                .build()
                                .unwrap(),
                        );
                    }
                } else {
                    candidates.push(
                        FiniteAlgebra::builder(names.clone(), table.clone())
                            .build()
                            .unwrap(),
                    );
                }
                for alg in candidates {
                    if alg.validate(sig).unwrap().is_empty() {
                        if let Err(message) = check(&alg, sig) {
                            budget.fail(&message);
                        }
                    }
                }
            }
        }
    }

    // ≥ 50 random valid 3-element tables across the three signatures
    for sig in &signatures {
        for _ in 0..20 {
            let alg = random_valid_algebra(&mut rng, 3, sig);
            if let Err(message) = check(&alg, sig) {
                budget.fail(&message);
            }
        }
    }
    assert!(agreements >= 50 * 2, "not enough cases exercised");
    budget.finish();
}

fn random_valid_algebra(rng: &mut ChaCha8Rng, n: usize, sig: &Signature) -> FiniteAlgebra {
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    loop {
        let compose: Vec<usize> = (0..n * n).map(|_| rng.gen_range(0..n)).collect();
        let mut builder = FiniteAlgebra::builder(names.clone(), compose);
        if sig.contains(SigSymbol::Meet) {
            builder = builder.meet((0..n * n).map(|_| rng.gen_range(0..n)).collect());
        }
        if sig.contains(SigSymbol::Order) {
            let mut matrix: Vec<bool> = (0..n * n).map(|_| rng.gen_bool(0.4)).collect();
            for a in 0..n {
                matrix[a * n + a] = true;
            }
            builder = builder.order(matrix);
        }
        let alg = builder.build().unwrap();
        if alg.validate(sig).unwrap().is_empty() {
            return alg;
        }
    }
}

// ---------------------------------------------------------------------
// criterion 6: on every compose-and-order-preserving fixture, every
// nonzero idempotent fixes a base point that zero does not
// ---------------------------------------------------------------------
#[test]
fn criterion_6_idempotent_fixed_points() {
    let budget = Budget::start(6, "idempotent fixed points", 10);
    let mut rng = rng(0xace_6);

    let mut fixtures: Vec<Representation> = Vec::new();
    for base in 1..=3usize {
        let rep = full_relation_algebra(base).identity_representation();
        let fibers: Vec<usize> = (0..base).map(|_| rng.gen_range(1..=2)).collect();
        fixtures.push(rep.inflate(&fibers));
        fixtures.push(rep);
    }
    let mut produced = 0;
    while produced < 40 {
        let base = rng.gen_range(1..=3);
        let generators = vec![random_relation(&mut rng, base, 0.4)];
        let Ok(closed) = closure_generate(
            &generators,
            &Signature::full(),
            Complementation::Universal,
            256,
        ) else {
            continue;
        };
        produced += 1;
        fixtures.push(closed.identity_representation());
    }

    let mut exercised = 0;
    for rep in &fixtures {
        let alg = rep.algebra();
        let zero = alg.const_zero().unwrap();
        for f in alg.idempotents() {
            if rep.image(f) == rep.image(zero) {
                continue;
            }
            match rep.find_idempotent_fixed_point(f) {
                Ok(x) => {
                    if !rep.image(f).contains(x, x) || rep.image(zero).contains(x, x) {
                        budget.fail(&format!("returned point violates the contract for {f}"));
                    }
                    exercised += 1;
                }
                Err(e) => budget.fail(&format!("no fixed point for idempotent {f}: {e}")),
            }
        }
    }
    assert!(exercised > 100, "too few idempotents exercised: {exercised}");
    budget.finish();
}

// ---------------------------------------------------------------------
// criterion 7: partial-group embedding — the cyclic-4 restriction
// embeds at degree 3 and not at degree 1; restrictions of every group
// of order ≤ 6 embed at degree ≤ the group order; the search matches
// the exhaustive map oracle on carrier ≤ 3, degree ≤ 3
// ---------------------------------------------------------------------
#[test]
fn criterion_7_partial_group_embedding() {
    let budget = Budget::start(7, "partial-group embedding", 60);

    let z4 = relred_core::instances::cyclic_group(4);
    let restriction = restrict_group(&z4, &BTreeSet::from([0, 1]));
    let cfg = EmbedConfig {
        max_degree: 3,
        node_limit: 1_000_000,
    };
    match embed_search(&restriction, &cfg).unwrap().status {
        EmbedStatus::Found(e) if e.degree == 3 => {}
        other => budget.fail(&format!("z4 restriction: expected Found at 3, got {other:?}")),
    }
    let cfg1 = EmbedConfig {
        max_degree: 1,
        node_limit: 1_000_000,
    };
    if !matches!(
        embed_search(&restriction, &cfg1).unwrap().status,
        EmbedStatus::NotFoundUpTo(1)
    ) {
        budget.fail("z4 restriction must not embed at degree 1");
    }

    for (label, group) in groups_up_to_order_6() {
        let n = group.order();
        let others: Vec<usize> = (0..n).filter(|&a| a != group.identity()).collect();
        for code in 0..1usize << others.len() {
            let mut sqrt = BTreeSet::from([group.identity()]);
            for (i, &a) in others.iter().enumerate() {
                if code >> i & 1 == 1 {
                    sqrt.insert(a);
                }
            }
            let pg = restrict_group(&group, &sqrt);
            if !pg.validate().passed() {
                budget.fail(&format!("{label}: restriction to {sqrt:?} fails validation"));
            }
            let cfg = EmbedConfig {
                max_degree: n,
                node_limit: 100_000_000,
            };
            let outcome = embed_search(&pg, &cfg).unwrap();
            let embedding = match &outcome.status {
                EmbedStatus::Found(e) => e,
                other => budget.fail(&format!(
                    "{label}: restriction to {sqrt:?} did not embed at degree ≤ {n}: {other:?}"
                )),
            };
            if check_embedding(&pg, embedding).is_err() {
                budget.fail(&format!("{label}: returned embedding fails the check"));
            }

            // oracle agreement within the caps
            if pg.carrier_size() <= 3 {
                for degree in 1..=3usize {
                    let oracle = embed_oracle(&pg, degree).unwrap();
                    let cfg = EmbedConfig {
                        max_degree: degree,
                        node_limit: 1_000_000,
                    };
                    let found = matches!(
                        embed_search(&pg, &cfg).unwrap().status,
                        EmbedStatus::Found(_)
                    );
                    if found != !oracle.is_empty() {
                        budget.fail(&format!(
                            "{label}/{sqrt:?}: search and oracle disagree at degree {degree}"
                        ));
                    }
                }
            }
        }
    }
    budget.finish();
}

// ---------------------------------------------------------------------
// criterion 8: starting from a lattice-ordered and an
// ordered-complemented fixture with ⊤ an equivalence relation, the CLI
// pipeline emits a verified embedding report with exit 0
// ---------------------------------------------------------------------
#[test]
fn criterion_8_end_to_end_pipeline_smoke() {
    let budget = Budget::start(8, "end-to-end pipeline smoke", 10);
    for fixture in ["full16-lattice.rep.json", "full16-ordered.rep.json"] {
        let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("tests/fixtures")
            .join(fixture);
        let output = Command::new(env!("CARGO_BIN_EXE_relred"))
            .args(["--json", "pipeline", path.to_str().unwrap()])
            .output()
            .expect("binary runs");
        if output.status.code() != Some(0) {
            budget.fail(&format!(
                "pipeline on {fixture} exited {:?}: {}",
                output.status.code(),
                String::from_utf8_lossy(&output.stderr)
            ));
        }
        let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
        if report["verdict"] != "pass" {
            budget.fail(&format!("pipeline on {fixture} did not pass"));
        }
        let stages = report["details"]["stages"].as_array().unwrap();
        if !stages.iter().all(|s| s["passed"] == true) {
            budget.fail(&format!("a pipeline stage failed on {fixture}"));
        }
    }
    budget.finish();
}
